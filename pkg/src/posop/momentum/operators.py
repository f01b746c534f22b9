"""Massless generators as finite-difference operators on momentum grids.

On zero-helicity wavefunctions:

    H = |k|,  P_i = k_i,  K_i = i (|k| d_i + k_i / (2|k|)),
    Q_i = i k_i |k|^-2 (k . grad + 1).

Derivatives are second-order central differences.  Where a neighbour is
missing (cube boundary or exclusion ball) a second-order one-sided stencil
is used, dropping to first order if only one neighbour exists.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Union

import numpy as np

from .grid import GridSpec, Wavepacket

Field = Union[np.ndarray, Wavepacket]


@dataclass(frozen=True)
class OperatorId:
    kind: str
    index: int = 0

    def __post_init__(self):
        if self.kind not in ("H", "P", "K", "Q"):
            raise ValueError(f"unknown operator {self.kind!r}")
        if self.kind == "H":
            if self.index:
                raise ValueError("H takes no component index")
        elif self.index not in (1, 2, 3):
            raise ValueError(f"{self.kind} needs a component index in 1..3")

    @classmethod
    def parse(cls, text: str) -> "OperatorId":
        m = re.fullmatch(r"\s*([HPKQ])\s*\(?\s*([123]?)\s*\)?\s*", text)
        if not m:
            raise ValueError(f"cannot parse operator {text!r}")
        return cls(m.group(1), int(m.group(2) or 0))

    def __str__(self) -> str:
        return self.kind if self.kind == "H" else f"{self.kind}{self.index}"


def _samples(psi: Field) -> np.ndarray:
    return psi.samples if isinstance(psi, Wavepacket) else psi


def _shift(a: np.ndarray, s: int, axis: int, fill) -> np.ndarray:
    """``out[i] = a[i + s]`` along ``axis``; out-of-range entries are ``fill``."""
    out = np.full_like(a, fill)
    n = a.shape[axis]
    src = [slice(None)] * a.ndim
    dst = [slice(None)] * a.ndim
    if s >= 0:
        src[axis], dst[axis] = slice(s, n), slice(0, n - s)
    else:
        src[axis], dst[axis] = slice(0, n + s), slice(-s, n)
    out[tuple(dst)] = a[tuple(src)]
    return out


def partial(psi: Field, axis: int, grid: GridSpec) -> np.ndarray:
    """Mask-aware derivative along ``axis`` (0-based)."""
    f = np.where(grid.mask, _samples(psi), 0)
    v = grid.mask
    h = grid.h
    fp1, fm1 = _shift(f, 1, axis, 0), _shift(f, -1, axis, 0)
    fp2, fm2 = _shift(f, 2, axis, 0), _shift(f, -2, axis, 0)
    vp1, vm1 = _shift(v, 1, axis, False), _shift(v, -1, axis, False)
    vp2, vm2 = _shift(v, 2, axis, False), _shift(v, -2, axis, False)
    central = vp1 & vm1
    fwd2 = ~central & vp1 & vp2
    bwd2 = ~central & ~fwd2 & vm1 & vm2
    fwd1 = ~central & ~fwd2 & ~bwd2 & vp1
    bwd1 = ~central & ~fwd2 & ~bwd2 & ~fwd1 & vm1
    out = np.zeros_like(f)
    out = np.where(central, (fp1 - fm1) / (2 * h), out)
    out = np.where(fwd2, (-3 * f + 4 * fp1 - fp2) / (2 * h), out)
    out = np.where(bwd2, (3 * f - 4 * fm1 + fm2) / (2 * h), out)
    out = np.where(fwd1, (fp1 - f) / h, out)
    out = np.where(bwd1, (f - fm1) / h, out)
    return np.where(v, out, 0)


def radial_derivative(psi: Field, grid: GridSpec) -> np.ndarray:
    """``k . grad psi``."""
    f = _samples(psi)
    return sum(grid.k[a] * partial(f, a, grid) for a in range(3))


def multiply(factor: np.ndarray, psi: Field, grid: GridSpec) -> np.ndarray:
    return np.where(grid.mask, factor * _samples(psi), 0)


def apply_operator(op: Union[OperatorId, str], psi: Field, grid: GridSpec) -> np.ndarray:
    op = OperatorId.parse(op) if isinstance(op, str) else op
    f = np.where(grid.mask, _samples(psi), 0)
    r = grid.r_safe
    if op.kind == "H":
        return multiply(r, f, grid)
    i = op.index - 1
    ki = grid.k[i]
    if op.kind == "P":
        return multiply(ki, f, grid)
    if op.kind == "K":
        return multiply(1.0, 1j * (r * partial(f, i, grid) + 0.5 * ki / r * f), grid)
    return multiply(1j * ki / r ** 2, radial_derivative(f, grid) + f, grid)


def apply_h_power(power: int, psi: Field, grid: GridSpec) -> np.ndarray:
    return multiply(grid.r_safe ** power, psi, grid)


def composed_q(i: int, psi: Field, grid: GridSpec, t: float = 0.0) -> np.ndarray:
    """``Q_i`` assembled from ``H, P, K`` in its symmetrized operator form.

    ``Q_i = 1/2 (H^-3 P_i (P.K) + (K.P) P_i H^-3) + t H^-1 P_i``; at ``t = 0``
    it coincides with the direct form away from the discretization error.
    """
    f = _samples(psi)
    ki = grid.k[i - 1]
    rinv3 = grid.r_safe ** -3
    first = sum(apply_operator(OperatorId("K", a + 1), f, grid) * grid.k[a] for a in range(3))
    first = multiply(rinv3 * ki, first, grid)
    inner = multiply(ki * rinv3, f, grid)
    second = sum(apply_operator(OperatorId("K", a + 1), multiply(grid.k[a], inner, grid), grid)
                 for a in range(3))
    out = 0.5 * (first + second)
    if t:
        out = out + multiply(t * ki / grid.r_safe, f, grid)
    return out
