"""Uncertainty tensors and the anisotropic decomposition ``A delta + B k0 k0``."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Optional, Sequence

import numpy as np

from ..errors import MomentDivergence
from .grid import GridSpec, Wavepacket, make_gaussian
from .operators import OperatorId, apply_operator

QUAD_TOL = 1e-6
DIVERGENCE_TOL = 0.5


def expectation_tensor(psi: Wavepacket) -> np.ndarray:
    """``<H^-2 P_i P_j>`` by grid quadrature."""
    g = psi.grid
    dens = np.abs(psi.samples) ** 2 / g.r_safe ** 2
    t = np.empty((3, 3))
    for i in range(3):
        for j in range(i, 3):
            t[i, j] = t[j, i] = g.integrate(dens * g.k[i] * g.k[j]).real
    return t


def _moments(kind: str, i: int, f: np.ndarray, grid: GridSpec):
    op = OperatorId(kind, i + 1)
    once = apply_operator(op, f, grid)
    twice = apply_operator(op, once, grid)
    return grid.inner(f, once), grid.inner(f, twice)


def _spread(first: complex, second: complex, label: str) -> float:
    var = second.real - abs(first) ** 2
    if not np.isfinite(var) or var < -QUAD_TOL:
        raise MomentDivergence(f"{label}: variance estimate {var:.3e} is not a variance")
    return float(np.sqrt(max(var, 0.0)))


def anisotropy_split(tensor: np.ndarray, k0) -> tuple:
    """Project onto ``delta`` and ``n n`` with ``n = k0/|k0|``; returns ``(A, B)``.

    ``B`` multiplies ``k0 k0`` itself, so it carries a ``|k0|^-2``; it is
    recorded as 0 when ``k0 = 0``.
    """
    tr = float(np.trace(tensor))
    kappa = float(np.linalg.norm(k0))
    if kappa == 0:
        return tr / 3, 0.0
    n = np.asarray(k0, float) / kappa
    nn = float(n @ tensor @ n)
    return (tr - nn) / 2, (3 * nn - tr) / 2 / kappa ** 2


@dataclass
class UncertaintyReport:
    dq: np.ndarray
    dp: np.ndarray
    bound_tensor: np.ndarray
    A: float
    B: float
    trace_check: float
    mean_q: np.ndarray = field(default_factory=lambda: np.zeros(3))
    mean_p: np.ndarray = field(default_factory=lambda: np.zeros(3))
    robertson_margin: float = 0.0
    alpha: Optional[float] = None
    k0: Optional[tuple] = None

    @property
    def products(self) -> np.ndarray:
        return np.outer(self.dq, self.dp)

    def row(self) -> dict:
        k0 = self.k0 or (float("nan"),) * 3
        out = {"alpha": self.alpha, "k0x": k0[0], "k0y": k0[1], "k0z": k0[2],
               "A": self.A, "B": self.B, "trace_check": self.trace_check}
        for i in range(3):
            out[f"dq{i + 1}"] = float(self.dq[i])
        for i in range(3):
            out[f"dp{i + 1}"] = float(self.dp[i])
        for i in range(3):
            for j in range(3):
                out[f"bound_{i + 1}{j + 1}"] = float(self.bound_tensor[i, j])
        return out


def _q_second_moment(f, grid, i):
    return _moments("Q", i, f, grid)[1].real


def uncertainty_report(psi: Wavepacket, tol: float = QUAD_TOL,
                       divergence_tol: float = DIVERGENCE_TOL,
                       check_convergence: bool = True) -> UncertaintyReport:
    g = psi.grid
    f = psi.samples
    dq, dp, mq, mp = (np.zeros(3) for _ in range(4))
    for i in range(3):
        a, b = _moments("Q", i, f, g)
        dq[i] = _spread(a, b, f"Q{i + 1}")
        mq[i] = a.real
        a, b = _moments("P", i, f, g)
        dp[i] = _spread(a, b, f"P{i + 1}")
        mp[i] = a.real
    if check_convergence:
        # the Q moments feel the exclusion ball through H^-1; doubling it must
        # not move them by more than divergence_tol
        coarse = GridSpec(g.kmax, g.n, 2 * g.eps_min)
        fc = np.where(coarse.mask, f, 0) / coarse.norm(f)
        for i in range(3):
            fine = dq[i] ** 2 + mq[i] ** 2
            other = _q_second_moment(fc, coarse, i)
            if abs(other - fine) > divergence_tol * abs(fine):
                raise MomentDivergence(
                    f"<Q{i + 1}^2> moved from {fine:.4g} to {other:.4g} when the exclusion ball doubled")
    bound = 0.5 * expectation_tensor(psi)
    k0 = psi.spec.k0 if psi.spec else None
    A, B = anisotropy_split(bound, k0 if k0 is not None else (0, 0, 0))
    products = np.outer(dq, dp)
    margin = float(np.min(products - np.abs(bound)))
    if margin < -tol:
        raise AssertionError(f"uncertainty product undershoots the bound by {-margin:.3e}")
    return UncertaintyReport(dq, dp, bound, A, B, float(np.trace(bound)), mq, mp, margin,
                             psi.spec.alpha if psi.spec else None, k0)


@dataclass
class AnisotropyRow:
    kappa: float
    A: float
    B: float
    B_kappa2: float
    trace_check: float


@dataclass
class AnisotropyLadder:
    alpha: float
    direction: tuple
    rows: List[AnisotropyRow]
    A_limit: float
    B_kappa2_limit: float
    monotone_A: bool
    monotone_B_kappa2: bool
    grid: dict

    def table(self) -> List[dict]:
        return [vars(r) for r in self.rows]


def _extrapolate(x: Sequence[float], y: Sequence[float]) -> float:
    """Polynomial fit in ``x`` through all points, evaluated at 0."""
    deg = min(len(x) - 1, 2)
    return float(np.polyval(np.polyfit(x, y, deg), 0.0))


def anisotropy_ladder(alpha: float, direction=(0.0, 0.0, 1.0),
                      scales: Sequence[float] = (0.5, 0.25, 0.125),
                      grid: Optional[GridSpec] = None) -> AnisotropyLadder:
    """``A`` and ``B kappa^2`` for ``k0 = kappa n`` along ``kappa = scale / sqrt(alpha)``.

    Both are smooth in ``kappa^2``; the limits are read off by
    extrapolating the ladder to ``kappa = 0``.
    """
    n = np.asarray(direction, float)
    n = n / np.linalg.norm(n)
    if grid is None:
        grid = GridSpec(5.0 / np.sqrt(alpha), 81)
    rows = []
    for s in scales:
        kappa = s / np.sqrt(alpha)
        psi = make_gaussian(alpha, tuple(kappa * n), grid)
        bound = 0.5 * expectation_tensor(psi)
        A, B = anisotropy_split(bound, kappa * n)
        rows.append(AnisotropyRow(kappa, A, B, B * kappa ** 2, float(np.trace(bound))))
    k2 = [r.kappa ** 2 for r in rows]
    A_lim = _extrapolate(k2, [r.A for r in rows])
    B_lim = _extrapolate(k2, [r.B_kappa2 for r in rows])

    def monotone(vals, target):
        d = [abs(v - target) for v in vals]
        return all(b <= a for a, b in zip(d, d[1:]))

    return AnisotropyLadder(alpha, tuple(n), rows, A_lim, B_lim,
                            monotone([r.A for r in rows], 1 / 6),
                            monotone([r.B_kappa2 for r in rows], 0.0), grid.describe())
