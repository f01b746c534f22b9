"""Relation tables for the two operating modes.

Massive mode realizes the Poincare algebra through the Foldy primitives
``{H, W, P, S, Q}`` with the canonical position-momentum relation; ``J`` and
``K`` are composite there.  Massless mode takes ``{H, P, J, K}`` as
primitives with the Poincare brackets as axioms and imposes the massless
shell relations as a two-sided ideal.  Helicity never appears as a symbol:
it is eliminated as ``H^-1 (P.J)`` when the ideal is written down.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache
from typing import Dict, FrozenSet, Mapping, Tuple

from .polynomial import (
    Generator, NCPolynomial, H, H_INV, W, P, S, J, K, M, IMAG,
    cross, dot, levi_civita, vector_generators,
)

G = Generator


class Mode(str, Enum):
    MASSIVE = "massive"
    MASSLESS = "massless"


COMMUTATIVE = frozenset({G.H, G.W, G.P1, G.P2, G.P3})

PARITY_SIGN = {
    "H": 1, "W": 1, "P": -1, "K": -1, "J": 1, "Q": -1, "S": 1,
}
TIME_REVERSAL_SIGN = {
    "H": 1, "W": 1, "P": -1, "K": 1, "J": -1, "Q": 1, "S": -1,
}


@dataclass(frozen=True)
class ModeRelations:
    mode: Mode
    primitives: FrozenSet[Generator]
    commutator_table: Mapping[Tuple[Generator, Generator], NCPolynomial]
    ideal_generators: Tuple[NCPolynomial, ...]
    symmetry_actions: Mapping[str, Mapping[Generator, int]] = field(default_factory=dict)

    @property
    def tail_generators(self) -> FrozenSet[Generator]:
        return self.primitives - COMMUTATIVE

    def bracket(self, x: Generator, y: Generator) -> NCPolynomial:
        return self.commutator_table[(x, y)]


def _eps_vector(i: int, j: int, vec) -> NCPolynomial:
    """``i * eps_ijk vec_k`` for 0-based i, j."""
    out = NCPolynomial.zero()
    for k in range(3):
        e = levi_civita(i, j, k)
        if e:
            out = out + IMAG * e * vec[k]
    return out


def _fill(table, x, y, value):
    table[(x, y)] = value
    table[(y, x)] = -value


def _symmetry_maps():
    par = {g: PARITY_SIGN[g.family] for g in Generator}
    tr = {g: TIME_REVERSAL_SIGN[g.family] for g in Generator}
    return {"parity": par, "time_reversal": tr}


def _complete(table, primitives):
    for x in primitives:
        for y in primitives:
            table.setdefault((x, y), NCPolynomial.zero())
    for (x, y), v in list(table.items()):
        assert table[(y, x)] == -v, (x, y)
    return table


@lru_cache(maxsize=None)
def massive_relations() -> ModeRelations:
    prims = frozenset({G.H, G.W, *vector_generators("P"), *vector_generators("S"), *vector_generators("Q")})
    table: Dict[Tuple[Generator, Generator], NCPolynomial] = {}
    qs, ps, ss = vector_generators("Q"), vector_generators("P"), vector_generators("S")
    for i in range(3):
        for j in range(3):
            _fill(table, qs[i], ps[j], IMAG if i == j else NCPolynomial.zero())
            if i != j:
                _fill(table, ss[i], ss[j], _eps_vector(i, j, S))
        # [Q_i, H] = i P_i H^-1, [Q_i, W] = -i P_i H^-1 W^2
        _fill(table, qs[i], G.H, IMAG * P[i] * H_INV)
        _fill(table, qs[i], G.W, -(IMAG * P[i] * H_INV * W * W))
    ideal = (
        H * H - dot(P, P) - M * M,
        W * (H + M) - 1,
        (H + M) * W - 1,
    )
    return ModeRelations(Mode.MASSIVE, prims, _complete(table, prims), ideal, _symmetry_maps())


def vector_shell_relations() -> Tuple[NCPolynomial, NCPolynomial, NCPolynomial]:
    """``H J_i + (P x K)_i - P_i H^-1 (P.J)``; helicity replaced by ``H^-1 P.J``."""
    pk = cross(P, K)
    helicity = H_INV * dot(P, J)
    return tuple(H * J[i] + pk[i] - P[i] * helicity for i in range(3))


@lru_cache(maxsize=None)
def massless_relations() -> ModeRelations:
    prims = frozenset({G.H, *vector_generators("P"), *vector_generators("J"), *vector_generators("K")})
    table: Dict[Tuple[Generator, Generator], NCPolynomial] = {}
    js, ks, ps = vector_generators("J"), vector_generators("K"), vector_generators("P")
    for i in range(3):
        for j in range(3):
            if i != j:
                _fill(table, js[i], js[j], _eps_vector(i, j, J))
                _fill(table, ks[i], ks[j], -_eps_vector(i, j, J))
            _fill(table, js[i], ks[j], _eps_vector(i, j, K))
            _fill(table, js[i], ps[j], _eps_vector(i, j, P))
            _fill(table, ks[i], ps[j], IMAG * H if i == j else NCPolynomial.zero())
        _fill(table, ks[i], G.H, IMAG * P[i])
    ideal = (H * H - dot(P, P),) + vector_shell_relations()
    return ModeRelations(Mode.MASSLESS, prims, _complete(table, prims), ideal, _symmetry_maps())


def relations_for(mode: Mode | str) -> ModeRelations:
    mode = Mode(mode)
    return massive_relations() if mode is Mode.MASSIVE else massless_relations()
