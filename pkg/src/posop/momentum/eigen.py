"""Position eigenfunctions in momentum space and their position-space profile.

With zero helicity the eigenfunction for eigenvalue ``q`` is supported on
the ray ``k || q`` with radial factor ``exp(-i |k| |q|) / |k|``.  The
direction delta is regularized by an angular bump ``g_sigma(theta)`` about
``q``, with ``theta`` the angle between ``k`` and ``q``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Sequence

import numpy as np

from ..errors import QuadratureBudgetExceeded
from .studies import ResidualReport, fit_order


# ---------------------------------------------------------------------------
# radial equation
# ---------------------------------------------------------------------------

def radial_solution(q: float, p):
    return np.exp(-1j * q * np.asarray(p)) / np.asarray(p)


def rk4(rhs, y0: complex, x0: float, x1: float, steps: int):
    """Classical fixed-step fourth-order Runge-Kutta; returns nodes and values."""
    xs = np.linspace(x0, x1, steps + 1)
    ys = np.empty(steps + 1, dtype=complex)
    ys[0] = y0
    h = (x1 - x0) / steps
    y = y0
    for n in range(steps):
        x = xs[n]
        k1 = rhs(x, y)
        k2 = rhs(x + h / 2, y + h / 2 * k1)
        k3 = rhs(x + h / 2, y + h / 2 * k2)
        k4 = rhs(x + h, y + h * k3)
        y = y + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        ys[n + 1] = y
    return xs, ys


def radial_eigenfunction_check(q: float, r_range=(0.1, 10.0),
                               steps: Sequence[int] = (2500, 5000, 10000, 20000)) -> ResidualReport:
    """Integrate ``dPhi/dP = (-i q - 1/P) Phi`` and compare with the closed form."""
    lo, hi = r_range
    if lo <= 0:
        raise ValueError("the radial range must exclude 0")
    steps = sorted(steps)

    def rhs(p, y):
        return (-1j * q - 1.0 / p) * y

    hs, errs = [], []
    for n in steps:
        xs, ys = rk4(rhs, complex(radial_solution(q, lo)), lo, hi, n)
        exact = radial_solution(q, xs)
        hs.append((hi - lo) / n)
        errs.append(float(np.max(np.abs(ys - exact) / np.abs(exact))))
    order = fit_order(hs, errs) if all(errs) else float("inf")
    return ResidualReport(f"radial q={q}", hs, errs, order,
                          {"q": q, "r_range": [lo, hi], "steps": steps, "method": "rk4"})


# ---------------------------------------------------------------------------
# regularized eigenfunction
# ---------------------------------------------------------------------------

def angular_bump(theta, sigma: float):
    """``exp(-theta^2 / 2 sigma^2)`` scaled to unit integral over the sphere."""
    return np.exp(-0.5 * (np.asarray(theta) / sigma) ** 2) / _bump_mass(sigma)


def _bump_mass(sigma: float) -> float:
    th, w = _theta_rule(sigma, 400)
    return float(2 * np.pi * np.sum(w * np.exp(-0.5 * (th / sigma) ** 2) * np.sin(th)))


def _theta_rule(sigma: float, n: int, width: float = 12.0):
    top = min(np.pi, width * sigma)
    x, w = np.polynomial.legendre.leggauss(n)
    return 0.5 * top * (x + 1), 0.5 * top * w


@dataclass(frozen=True)
class SphericalGrid:
    """Radial shell ``[r_min, r_max]`` times a Gauss-Legendre rule in the angle from ``q``."""

    r_min: float = 0.5
    r_max: float = 3.0
    n_r: int = 2001
    n_theta: int = 64

    @property
    def dr(self) -> float:
        return (self.r_max - self.r_min) / (self.n_r - 1)

    def describe(self) -> dict:
        return {"r_min": self.r_min, "r_max": self.r_max, "n_r": self.n_r, "n_theta": self.n_theta}


def _d_dr(f: np.ndarray, dr: float) -> np.ndarray:
    """Second-order differences along axis 0, one-sided at the ends."""
    out = np.empty_like(f)
    out[1:-1] = (f[2:] - f[:-2]) / (2 * dr)
    out[0] = (-3 * f[0] + 4 * f[1] - f[2]) / (2 * dr)
    out[-1] = (3 * f[-1] - 4 * f[-2] + f[-3]) / (2 * dr)
    return out


def regularized_eigenfunction(q_norm: float, sigma: float, r, theta):
    return radial_solution(q_norm, r)[:, None] * angular_bump(theta, sigma)[None, :]


def eigenfunction_residual(q, sigmas: Sequence[float] = (0.2, 0.1, 0.05, 0.02),
                           grid: SphericalGrid = SphericalGrid()) -> ResidualReport:
    """``|| Q Phi - q Phi || / || Phi ||`` (vector norm over components) per width.

    ``Q_i = i k_i |k|^-2 (k . grad + 1) = i khat_i (d_r + 1/r)`` is applied
    with finite differences in ``r``; the azimuthal integral is done in
    closed form since ``Phi`` does not depend on it.
    """
    qv = np.asarray(q, float)
    qn = float(np.linalg.norm(qv))
    if qn == 0:
        raise ValueError("|q| must be positive")
    sigmas = sorted(sigmas, reverse=True)
    r = np.linspace(grid.r_min, grid.r_max, grid.n_r)
    rw = np.full(grid.n_r, grid.dr)
    rw[[0, -1]] *= 0.5
    res, axis_err = [], []
    for s in sigmas:
        th, tw = _theta_rule(s, grid.n_theta)
        phi = regularized_eigenfunction(qn, s, r, th)
        radial = 1j * (_d_dr(phi, grid.dr) + phi / r[:, None])
        # |radial khat - q phi|^2 with khat . qhat = cos(theta)
        dens = (np.abs(radial) ** 2 + qn ** 2 * np.abs(phi) ** 2
                - 2 * qn * np.real(np.conj(radial) * phi) * np.cos(th)[None, :])
        meas = (r ** 2 * rw)[:, None] * (2 * np.pi * np.sin(th) * tw)[None, :]
        num = np.sum(dens * meas)
        den = np.sum(np.abs(phi) ** 2 * meas)
        res.append(float(np.sqrt(max(num, 0.0) / den)))
        # on the axis khat = qhat and only the radial truncation error remains
        on_axis = radial_solution(qn, r)
        axis_err.append(float(np.max(np.abs(1j * (_d_dr(on_axis, grid.dr) + on_axis / r) - qn * on_axis)
                                     / np.abs(on_axis))))
    order = fit_order(sigmas, res)
    return ResidualReport("eigenfunction", list(sigmas), res, order,
                          {"q": qv.tolist(), "grid": grid.describe(), "on_axis_relative_error": axis_err,
                           "bump": "exp(-theta^2/2 sigma^2)"})


# ---------------------------------------------------------------------------
# position-space profile
# ---------------------------------------------------------------------------

@dataclass
class PositionProfile:
    q: List[float]
    sigma: float
    damping: float
    sign: int
    longitudinal_x: List[float]
    longitudinal: List[complex]
    peak_position: float
    peak_magnitude: float
    transverse_offsets: List[float]
    transverse_values: List[complex]
    transverse_variation: float
    fwhm: float
    nodes: int
    meta: dict = field(default_factory=dict)

    def table(self) -> List[dict]:
        return [{"x_long": x, "re": v.real, "im": v.imag, "abs": abs(v)}
                for x, v in zip(self.longitudinal_x, self.longitudinal)]


def _orthonormal_frame(qhat):
    helper = np.array([1.0, 0.0, 0.0]) if abs(qhat[0]) < 0.9 else np.array([0.0, 1.0, 0.0])
    e1 = np.cross(qhat, helper)
    e1 /= np.linalg.norm(e1)
    return e1, np.cross(qhat, e1)


class _AngularRule:
    """Tensor Gauss-Legendre (theta) times periodic trapezoid (azimuth) about ``qhat``."""

    def __init__(self, qhat, sigma, n_theta, n_phi):
        th, tw = _theta_rule(sigma, n_theta)
        ph = np.arange(n_phi) * 2 * np.pi / n_phi
        e1, e2 = _orthonormal_frame(qhat)
        T, F = np.meshgrid(th, ph, indexing="ij")
        self.dirs = (np.sin(T)[..., None] * (np.cos(F)[..., None] * e1 + np.sin(F)[..., None] * e2)
                     + np.cos(T)[..., None] * qhat)
        self.weights = (angular_bump(th, sigma) * np.sin(th) * tw)[:, None] * (2 * np.pi / n_phi)
        self.size = th.size * ph.size


def _transform(rule: _AngularRule, x, q_norm, eta, sign) -> complex:
    # radial integral of exp(i P (sign khat.x - |q|) - eta P) over P > 0
    proj = rule.dirs @ np.asarray(x, float)
    return complex(np.sum(rule.weights / (eta - 1j * (sign * proj - q_norm))))


def position_space_transform(q, sigma: float, x_samples: Sequence[float],
                             transverse_offsets: Sequence[float] = (0.25, 0.5, 0.75, 1.0),
                             damping: float = 0.5, sign: int = 1,
                             rtol: float = 1e-6, max_nodes: int = 2_000_000) -> PositionProfile:
    """``F(x) = int d^3P / P  Phi_{q,sigma}(P) exp(sign i P.x - damping P)``.

    The radial integral is done in closed form, the angular one by a
    quadrature that doubles until successive values agree to ``rtol``.
    Longitudinal samples sit at ``x = s qhat``; transverse samples at
    ``x = s_peak qhat + d e`` for each offset ``d`` and four directions ``e``
    perpendicular to ``q``.
    """
    if sigma <= 0:
        raise ValueError("sigma must be positive")
    xs = np.asarray(x_samples, float)
    if not np.all(np.isfinite(xs)):
        raise ValueError("x samples must be finite")
    qv = np.asarray(q, float)
    qn = float(np.linalg.norm(qv))
    qhat = qv / qn
    e1, e2 = _orthonormal_frame(qhat)

    def evaluate(rule):
        return np.array([_transform(rule, s * qhat, qn, damping, sign) for s in xs])

    n_theta, n_phi = 32, 16
    rule = _AngularRule(qhat, sigma, n_theta, n_phi)
    prof = evaluate(rule)
    while True:
        n_theta, n_phi = 2 * n_theta, 2 * n_phi
        if n_theta * n_phi > max_nodes:
            raise QuadratureBudgetExceeded(f"angular quadrature did not settle within {max_nodes} nodes")
        rule = _AngularRule(qhat, sigma, n_theta, n_phi)
        new = evaluate(rule)
        done = np.max(np.abs(new - prof)) <= rtol * np.max(np.abs(new))
        prof = new
        if done:
            break
    mags = np.abs(prof)
    k = int(np.argmax(mags))
    peak_x, peak = float(xs[k]), float(mags[k])
    half = mags >= peak / 2
    fwhm = float(xs[half].max() - xs[half].min()) if half.sum() > 1 else 0.0
    trans = []
    for d in transverse_offsets:
        for e in (e1, -e1, e2, -e2):
            trans.append(_transform(rule, peak_x * qhat + d * e, qn, damping, sign))
    ref = prof[k]
    variation = float(max(abs(v - ref) for v in trans) / peak) if trans else 0.0
    return PositionProfile(qv.tolist(), sigma, damping, sign, xs.tolist(), prof.tolist(), peak_x, peak,
                           list(transverse_offsets), trans, variation, fwhm, rule.size,
                           {"rtol": rtol, "n_theta": n_theta, "n_phi": n_phi})
