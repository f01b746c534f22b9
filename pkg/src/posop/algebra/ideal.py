"""Membership of normal-form expressions in the mass-shell ideals.

Massive mode.  ``H^2 - P^2 - m^2`` is central in the Foldy realization and
``W (H + m) - 1`` generates, together with it, an ideal that meets every
normal word only through its commutative block.  Membership is therefore
decided exactly: for every tail and power of ``t`` the commutative
coefficient is a rational function of ``P, H, m`` which vanishes on the
shell iff, after clearing ``H``, ``H + m`` and ``m`` denominators and
using ``H^2 = P^2 + m^2``, both parts of ``A + B H`` are zero.

Massless mode.  ``H^2 - P^2`` is central as well and is handled exactly by
the rewrite ``P3^2 -> H^2 - P1^2 - P2^2`` inside the commutative block.
The remaining relations ``H J + P x K - P H^-1 (P.J)`` are not central;
membership modulo them is searched by exact linear algebra over products
``u * R_i * v`` of bounded degree.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from math import comb
from typing import Dict, Tuple

from ..errors import CutoffTooSmall
from .polynomial import Generator, NCPolynomial, word_degree
from .relations import Mode, ModeRelations, vector_shell_relations, relations_for
from .rewrite import (
    _add_into, engine_for, from_polynomial, normal_form, split_word, to_polynomial,
)
from .representation import acts_nontrivially
from .scalars import GaussianRational, ONE

DEFAULT_MARGIN = 3
DEFAULT_MAX_UNKNOWNS = 2500
# how often the search re-reduces the target to stop as soon as it is spanned
EARLY_EXIT_STRIDE = 24


class Membership(str, Enum):
    MEMBER = "Member"
    NOT_MEMBER = "NotMember"
    INCONCLUSIVE = "Inconclusive"


@dataclass(frozen=True)
class IdealResult:
    residual: NCPolynomial
    status: Membership
    unknowns: int = 0
    truncated: bool = False
    certificate: str = ""

    def __iter__(self):
        yield self.residual
        yield self.status


# ---------------------------------------------------------------------------
# massive shell
# ---------------------------------------------------------------------------

@lru_cache(maxsize=None)
def _shell_power(j: int) -> Tuple:
    """``(P1^2 + P2^2 + P3^2 + m^2)^j`` keyed by ``(m, p1, p2, p3)``."""
    out = {}
    for a, b, c in itertools.product(range(j + 1), repeat=3):
        d = j - a - b - c
        if d < 0:
            continue
        mult = comb(j, a) * comb(j - a, b) * comb(j - a - b, c)
        out[(2 * d, 2 * a, 2 * b, 2 * c)] = GaussianRational(mult)
    return tuple(out.items())


def _shell_group(entries) -> Tuple[dict, dict, Tuple[int, int, int]]:
    """Return ``(A, B, (N, M, L))`` with coefficient = H^-N W^M m^-L (A + B H)."""
    n_clear = max(0, max(-comm[0] for comm, _, _ in entries))
    w_clear = max(comm[1] for comm, _, _ in entries)
    m_clear = max(0, max(-m for _, m, _ in entries))
    # polynomial keyed by (h, m, p1, p2, p3)
    total: dict = {}
    for comm, m, c in entries:
        h, w, p1, p2, p3 = comm
        k = w_clear - w
        for r in range(k + 1):
            # (H + m)^k = sum C(k,r) H^r m^(k-r)
            key = (h + n_clear + r, m + m_clear + k - r, p1, p2, p3)
            _add_into(total, key, c * comb(k, r))
    a_part: dict = {}
    b_part: dict = {}
    for (h, m, p1, p2, p3), c in total.items():
        j, r = divmod(h, 2)
        target = b_part if r else a_part
        for (dm, d1, d2, d3), mult in _shell_power(j):
            _add_into(target, (m + dm, p1 + d1, p2 + d2, p3 + d3), c * mult)
    return a_part, b_part, (n_clear, w_clear, m_clear)


def shell_reduce_massive(expr: NCPolynomial) -> NCPolynomial:
    """Exact reduction modulo the massive shell ideal (input in normal form).

    The zero polynomial is returned iff the input lies in the ideal.
    """
    groups: Dict[Tuple, list] = {}
    for (w, m, t), c in expr.items():
        comm, tail = split_word(w)
        groups.setdefault((tail, t), []).append((comm, m, c))
    out: dict = {}
    for (tail, t), entries in sorted(groups.items()):
        a_part, b_part, (n, wpow, l) = _shell_group(entries)
        for part, hextra in ((a_part, 0), (b_part, 1)):
            for (m, p1, p2, p3), c in part.items():
                comm = (hextra - n, wpow, p1, p2, p3)
                _add_into(out, (comm, tail, m - l, t), c)
    return to_polynomial(out)


# ---------------------------------------------------------------------------
# massless shell
# ---------------------------------------------------------------------------

@lru_cache(maxsize=None)
def _reduce_p3(comm: Tuple[int, ...]) -> Tuple:
    """Rewrite ``P3^2 -> H^2 - P1^2 - P2^2`` until the P3 exponent is <= 1."""
    h, w, p1, p2, p3 = comm
    if p3 < 2:
        return ((comm, ONE),)
    out: dict = {}
    for hh, q1, q2, cc in ((h + 2, p1, p2, ONE), (h, p1 + 2, p2, -ONE), (h, p1, p2 + 2, -ONE)):
        for k, v in _reduce_p3((hh, w, q1, q2, p3 - 2)):
            _add_into(out, k, v * cc)
    return tuple(out.items())


def central_reduce_massless(elem: dict) -> dict:
    out: dict = {}
    for (comm, tail, m, t), c in elem.items():
        for comm2, c2 in _reduce_p3(comm):
            _add_into(out, (comm2, tail, m, t), c * c2)
    return out


def _dimension(comm, tail) -> int:
    return comm[0] + comm[2] + comm[3] + comm[4]


def _parity(comm, tail) -> int:
    k = sum(1 for x in tail if Generator(x).family in "PK")
    return (comm[2] + comm[3] + comm[4] + k) % 2


def _p_monos(deg):
    """P monomials of exact degree ``deg`` with P3 exponent at most one."""
    for p3 in (0, 1):
        rest = deg - p3
        if rest < 0:
            continue
        for p1 in range(rest + 1):
            yield (p1, rest - p1, p3)


def _multipliers(spare, dim, par, tail_letters):
    """Pairs ``(u, v)`` of normal words with total degree <= spare.

    ``u = H^a P^alpha tail_u`` and ``v = H^s P^beta tail_v`` with ``s`` in
    {-1, 0, 1}; ``a`` is fixed by the dimension grading (P, H carry one
    unit, J, K none) and the parity grading (P, K odd) must match.
    """
    for total in range(spare + 1):
        for du_p in range(total + 1):
            for lu in range(total - du_p + 1):
                rest = total - du_p - lu
                for dv_p in range(rest + 1):
                    lv = rest - dv_p
                    for tu in itertools.combinations_with_replacement(tail_letters, lu):
                        for tv in itertools.combinations_with_replacement(tail_letters, lv):
                            for pu in _p_monos(du_p):
                                for pv in _p_monos(dv_p):
                                    for sv in (-1, 0, 1):
                                        cu = (dim - 1 - du_p - dv_p - sv, 0) + pu
                                        cv = (sv, 0) + pv
                                        if (_parity(cu, tu) + _parity(cv, tv)) % 2 == par:
                                            yield cu, tu, cv, tv


def _rank(key):
    comm, tail = key
    return (comm[2] + comm[3] + comm[4] + len(tail), tail, comm)


class _Echelon:
    """Incremental row echelon over Q(i); the leading key is the highest-degree word."""

    def __init__(self):
        self.pivots: Dict = {}

    def reduce(self, vec: dict) -> dict:
        vec = dict(vec)
        while True:
            keys = [k for k in vec if k in self.pivots]
            if not keys:
                return vec
            k = max(keys, key=_rank)
            c = vec[k]
            for kk, v in self.pivots[k].items():
                _add_into(vec, kk, -c * v)

    def add(self, vec: dict) -> None:
        vec = self.reduce(vec)
        if not vec:
            return
        lead = max(vec, key=_rank)
        inv = vec[lead].inverse()
        self.pivots[lead] = {k: v * inv for k, v in vec.items()}


def _massless_search(target: dict, cutoff: int, target_degree: int, max_unknowns: int):
    rel = relations_for(Mode.MASSLESS)
    eng = engine_for(rel)
    relations = [central_reduce_massless(eng.normalize(r)) for r in vector_shell_relations()]
    rel_degree = max(word_degree(w) for r in vector_shell_relations() for (w, _, _) in r.terms)
    spare = cutoff - rel_degree
    residual: dict = {}
    unknowns = 0
    truncated = False
    groups: Dict[Tuple[int, int], dict] = {}
    for (comm, tail, m, t), c in target.items():
        groups.setdefault((m, t), {})[(comm, tail)] = c
    tail_letters = sorted(int(g) for g in rel.tail_generators)
    for (m, t), vec in sorted(groups.items()):
        dims = {_dimension(*k) for k in vec}
        pars = {_parity(*k) for k in vec}
        ech = _Echelon()
        budget_hit = solved = False
        if spare >= 0 and len(dims) == 1 and len(pars) == 1:
            dim, par = dims.pop(), pars.pop()
            for cu, tu, cv, tv in _multipliers(spare, dim, par, tail_letters):
                for rho in relations:
                    if unknowns >= max_unknowns:
                        budget_hit = True
                        break
                    u = {(cu, tu, 0, 0): ONE}
                    v = {(cv, tv, 0, 0): ONE}
                    prod = central_reduce_massless(eng.multiply(eng.multiply(u, rho), v))
                    ech.add({(k[0], k[1]): c for k, c in prod.items()})
                    unknowns += 1
                    if unknowns % EARLY_EXIT_STRIDE == 0 and not ech.reduce(vec):
                        solved = True
                        break
                if budget_hit or solved:
                    break
            truncated = truncated or budget_hit
        red = ech.reduce(vec)
        for (comm, tail), c in red.items():
            _add_into(residual, (comm, tail, m, t), c)
    return residual, unknowns, truncated


def ideal_reduce(expr: NCPolynomial, rel, degree_cutoff: int,
                 margin: int = DEFAULT_MARGIN, max_unknowns: int = DEFAULT_MAX_UNKNOWNS) -> IdealResult:
    """Decide membership of a normal-form ``expr`` in the mode's shell ideal."""
    rel = rel if isinstance(rel, ModeRelations) else relations_for(rel)
    deg = expr.degree()
    if degree_cutoff < deg:
        raise CutoffTooSmall(f"degree cutoff {degree_cutoff} is below expression degree {deg}")
    if rel.mode is Mode.MASSIVE:
        res = shell_reduce_massive(expr)
        status = Membership.MEMBER if res.is_zero() else Membership.NOT_MEMBER
        return IdealResult(res, status)
    central = central_reduce_massless(from_polynomial(expr))
    if not central:
        return IdealResult(NCPolynomial.zero(), Membership.MEMBER, certificate="central relation")
    reduced = to_polynomial(central)
    if acts_nontrivially(reduced):
        return IdealResult(reduced, Membership.NOT_MEMBER, certificate="zero-helicity representation")
    residual, unknowns, truncated = _massless_search(central, degree_cutoff, deg, max_unknowns)
    res = to_polynomial(residual)
    if res.is_zero():
        status = Membership.MEMBER
    elif truncated or degree_cutoff < deg + margin:
        status = Membership.INCONCLUSIVE
    else:
        status = Membership.NOT_MEMBER
    return IdealResult(res, status, unknowns, truncated, "linear search" if res.is_zero() else "")


def reduce_modulo_shell(expr: NCPolynomial, rel) -> NCPolynomial:
    """Exact reduction by the central shell relation only (both modes)."""
    rel = rel if isinstance(rel, ModeRelations) else relations_for(rel)
    nf = normal_form(expr, rel)
    if rel.mode is Mode.MASSIVE:
        return shell_reduce_massive(nf)
    return to_polynomial(central_reduce_massless(from_polynomial(nf)))
