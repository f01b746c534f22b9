"""Operator-identity residuals under grid refinement."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, List, Optional, Sequence

import numpy as np

from .grid import GaussianSpec, GridSpec, Wavepacket
from .operators import OperatorId, apply_operator, composed_q


@dataclass
class ResidualReport:
    name: str
    parameter: List[float]
    residual: List[float]
    order: float
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if any(r < 0 for r in self.residual):
            raise ValueError("residual norms are nonnegative")
        if any(b >= a for a, b in zip(self.parameter, self.parameter[1:])):
            raise ValueError("parameter ladder must be strictly decreasing")

    def table(self) -> List[dict]:
        return [{"parameter": p, "residual": r, "fitted_order": self.order}
                for p, r in zip(self.parameter, self.residual)]

    @property
    def ratios(self) -> List[float]:
        return [a / b if b else float("inf") for a, b in zip(self.residual, self.residual[1:])]


def fit_order(parameter: Sequence[float], residual: Sequence[float]) -> float:
    """Least-squares slope of ``log residual`` against ``log parameter``."""
    x, y = np.log(parameter), np.log(residual)
    if not np.all(np.isfinite(y)):
        return float("nan")
    return float(np.polyfit(x, y, 1)[0])


# default refinement ladder: three halvings of h = 0.25 on [-2.5, 2.5]^3
DEFAULT_LADDER = (21, 41, 81, 161)
DEFAULT_KMAX = 2.5
DEFAULT_EPS = 0.5
# residuals are measured away from the cube faces and the exclusion ball,
# where the stencils drop order
DEFAULT_REGION = (1.0, 2.0)


def refinement_grids(ns: Sequence[int] = DEFAULT_LADDER, kmax: float = DEFAULT_KMAX,
                     eps_min: float = DEFAULT_EPS) -> List[GridSpec]:
    return [GridSpec(kmax, n, eps_min) for n in ns]


def _resample(psi, grid: GridSpec) -> np.ndarray:
    spec = psi.spec if isinstance(psi, Wavepacket) else psi
    if not isinstance(spec, GaussianSpec):
        raise ValueError("the study needs a packet with an analytic Gaussian tag")
    raw = spec.evaluate(grid, normalized=False)
    return raw / grid.norm(raw)


def _region_norm(values, grid, region) -> float:
    lo, hi = region
    sel = grid.mask & (grid.r >= lo) & (grid.r <= hi)
    return float(np.sqrt(np.sum(np.abs(values[sel]) ** 2) * grid.cell))


def _study(name, action: Callable, psi, grids, region, meta=None) -> ResidualReport:
    hs, res = [], []
    for g in grids:
        f = _resample(psi, g)
        hs.append(g.h)
        res.append(_region_norm(action(f, g), g, region) / g.norm(f))
    order = fit_order(hs, res) if all(r > 0 for r in res) else float("inf")
    info = {"grids": [g.describe() for g in grids], "region": list(region)}
    info.update(meta or {})
    return ResidualReport(name, hs, res, order, info)


def commutator_residual_study(i: int, j: int, psi, grids: Optional[Sequence[GridSpec]] = None,
                              region=DEFAULT_REGION) -> ResidualReport:
    """``||(Q_i Q_j - Q_j Q_i) psi|| / ||psi||`` per grid; the exact value is zero."""
    grids = grids or refinement_grids()
    qi, qj = OperatorId("Q", i), OperatorId("Q", j)

    def action(f, g):
        if i == j:
            return np.zeros_like(f)
        return (apply_operator(qi, apply_operator(qj, f, g), g)
                - apply_operator(qj, apply_operator(qi, f, g), g))

    return _study(f"[Q{i},Q{j}]", action, psi, grids, region, {"i": i, "j": j})


def ccr_residual_study(i: int, j: int, psi, grids: Optional[Sequence[GridSpec]] = None,
                       region=DEFAULT_REGION) -> ResidualReport:
    """``(Q_i P_j - P_j Q_i - i H^-2 P_i P_j) psi``."""
    grids = grids or refinement_grids()
    qi, pj = OperatorId("Q", i), OperatorId("P", j)

    def action(f, g):
        rhs = 1j * g.k[i - 1] * g.k[j - 1] / g.r_safe ** 2 * f
        return (apply_operator(qi, apply_operator(pj, f, g), g)
                - apply_operator(pj, apply_operator(qi, f, g), g) - np.where(g.mask, rhs, 0))

    return _study(f"[Q{i},P{j}]", action, psi, grids, region, {"i": i, "j": j})


def realization_residual_study(i: int, psi, grids: Optional[Sequence[GridSpec]] = None,
                               region=DEFAULT_REGION) -> ResidualReport:
    """Direct ``Q_i`` against ``Q_i`` composed from ``H, P, K``."""
    grids = grids or refinement_grids()
    q = OperatorId("Q", i)

    def action(f, g):
        return apply_operator(q, f, g) - composed_q(i, f, g)

    return _study(f"Q{i} direct vs composed", action, psi, grids, region, {"i": i})


def hermiticity_defect(op, phi: np.ndarray, psi: np.ndarray, grid: GridSpec) -> float:
    """``|<phi, O psi> - conj(<psi, O phi>)|``."""
    a = grid.inner(phi, apply_operator(op, psi, grid))
    b = grid.inner(psi, apply_operator(op, phi, grid))
    return float(abs(a - np.conj(b)))
