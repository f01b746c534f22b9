"""Uniform momentum grids and Gaussian wavepackets."""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Optional, Tuple

import numpy as np
from scipy import integrate, special

from ..errors import GridTooSmall

NORM_TOL = 1e-10
CUBE_LEAK_TOL = 1e-6
BALL_LEAK_TOL = 0.05


@dataclass(frozen=True)
class GridSpec:
    """Cube ``[-kmax, kmax]^3`` with ``n`` nodes per axis and a hole around k = 0."""

    kmax: float
    n: int
    eps_min: Optional[float] = None

    def __post_init__(self):
        if self.n < 16:
            raise ValueError("need at least 16 points per axis")
        if self.kmax <= 0:
            raise ValueError("kmax must be positive")
        if self.eps_min is None:
            object.__setattr__(self, "eps_min", 2 * self.h)
        if self.eps_min < 2 * self.h * (1 - 1e-12):
            raise ValueError(f"eps_min={self.eps_min} is below 2h={2 * self.h}")

    @property
    def h(self) -> float:
        return 2 * self.kmax / (self.n - 1)

    @property
    def cell(self) -> float:
        return self.h ** 3

    @cached_property
    def axis(self) -> np.ndarray:
        return np.linspace(-self.kmax, self.kmax, self.n)

    @cached_property
    def k(self) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        return tuple(np.meshgrid(self.axis, self.axis, self.axis, indexing="ij"))

    @cached_property
    def r(self) -> np.ndarray:
        k1, k2, k3 = self.k
        return np.sqrt(k1 * k1 + k2 * k2 + k3 * k3)

    @cached_property
    def mask(self) -> np.ndarray:
        """True on nodes that take part in quadratures and stencils."""
        return self.r >= self.eps_min

    @cached_property
    def r_safe(self) -> np.ndarray:
        return np.where(self.mask, self.r, 1.0)

    def integrate(self, values: np.ndarray) -> complex:
        return np.sum(np.where(self.mask, values, 0)) * self.cell

    def inner(self, phi: np.ndarray, psi: np.ndarray) -> complex:
        """Flat-measure inner product ``<phi, psi>``."""
        return self.integrate(np.conj(phi) * psi)

    def norm(self, psi: np.ndarray) -> float:
        return float(np.sqrt(self.inner(psi, psi).real))

    def describe(self) -> dict:
        return {"kmax": self.kmax, "n": self.n, "eps_min": self.eps_min, "h": self.h}


@dataclass(frozen=True)
class GaussianSpec:
    """``S(k) = norm_const * exp(-alpha |k - k0|^2)``."""

    alpha: float
    k0: Tuple[float, float, float]
    norm_const: float = 1.0

    def evaluate(self, grid: GridSpec, normalized: bool = True) -> np.ndarray:
        k1, k2, k3 = grid.k
        a, b, c = self.k0
        vals = np.exp(-self.alpha * ((k1 - a) ** 2 + (k2 - b) ** 2 + (k3 - c) ** 2)).astype(complex)
        if normalized:
            vals *= self.norm_const
        return np.where(grid.mask, vals, 0)


@dataclass(frozen=True, eq=False)
class Wavepacket:
    samples: np.ndarray
    grid: GridSpec
    spec: Optional[GaussianSpec] = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.samples.setflags(write=False)

    @property
    def norm(self) -> float:
        return self.grid.norm(self.samples)


def cube_mass_fraction(alpha: float, k0, kmax: float) -> float:
    """Share of ``|S|^2 = exp(-2 alpha |k-k0|^2)`` inside the cube."""
    s = np.sqrt(2 * alpha)
    frac = 1.0
    for c in k0:
        frac *= 0.5 * (special.erf(s * (kmax - c)) + special.erf(s * (kmax + c)))
    return float(frac)


def ball_mass_fraction(alpha: float, k0, radius: float) -> float:
    """Share of ``|S|^2`` inside the ball ``|k| < radius`` (angular part in closed form)."""
    beta = 2 * alpha
    d = float(np.linalg.norm(k0))
    pref = (beta / np.pi) ** 1.5 * 2 * np.pi

    def radial(r):
        if d == 0 or r == 0:
            return pref * r * r * 2.0 * np.exp(-beta * (r * r + d * d))
        # exp(-beta(r^2+d^2)) * int_{-1}^{1} exp(2 beta r d u) du
        ang = (np.exp(-beta * (r - d) ** 2) - np.exp(-beta * (r + d) ** 2)) / (2 * beta * r * d)
        return pref * r * r * ang

    val, _ = integrate.quad(radial, 0.0, radius, epsabs=1e-14)
    return float(val)


def make_gaussian(alpha: float, k0, grid: GridSpec, ball_tol: float = BALL_LEAK_TOL) -> Wavepacket:
    """Normalized Gaussian packet ``S(k) ~ exp(-alpha |k - k0|^2)`` sampled on ``grid``."""
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    k0 = tuple(float(c) for c in k0)
    inside = cube_mass_fraction(alpha, k0, grid.kmax)
    if inside < 1 - CUBE_LEAK_TOL:
        raise GridTooSmall(f"packet leaks {1 - inside:.2e} of its mass past kmax={grid.kmax}")
    hole = ball_mass_fraction(alpha, k0, grid.eps_min)
    if hole > ball_tol:
        raise GridTooSmall(f"packet puts {hole:.2e} of its mass inside the exclusion ball")
    raw = GaussianSpec(alpha, k0).evaluate(grid, normalized=False)
    norm = grid.norm(raw)
    spec = GaussianSpec(alpha, k0, 1.0 / norm)
    samples = raw / norm
    if abs(grid.norm(samples) - 1) > NORM_TOL:
        raise AssertionError("normalization drifted")
    return Wavepacket(samples, grid, spec, {"cube_mass": inside, "ball_mass": hole})
