"""Classical kinematics behind the modified coordinate-momentum bracket.

Two pieces: a dynamic-translation thought experiment carried out with
explicit Lorentz event transformations, and the Poisson-type bracket
whose bivector is the projector ``p p^T / p^2``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence, Tuple

import numpy as np

from .errors import InvalidBoost, SingularMomentum

UNIT_SPEED_TOL = 1e-12


# ---------------------------------------------------------------------------
# kinematics
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Velocity:
    u: Tuple[float, float, float]
    massless: bool = False

    def __post_init__(self):
        u = tuple(float(c) for c in self.u)
        object.__setattr__(self, "u", u)
        speed = float(np.linalg.norm(u))
        if self.massless and abs(speed - 1) > UNIT_SPEED_TOL:
            raise InvalidBoost(f"a massless velocity needs |u| = 1, got {speed!r}")
        if speed > 1 + UNIT_SPEED_TOL:
            raise InvalidBoost(f"superluminal velocity |u| = {speed}")

    @classmethod
    def unit(cls, u) -> "Velocity":
        return cls(tuple(u), massless=True)

    @property
    def speed(self) -> float:
        return float(np.linalg.norm(self.u))

    def gamma(self, axis: int = 0) -> float:
        v = self.u[axis]
        if abs(v) >= 1:
            raise InvalidBoost(f"boost speed |u_{axis + 1}| = {abs(v)} is not below 1")
        return 1.0 / np.sqrt((1 - v) * (1 + v))


def boost_matrix(v: float, axis: int = 0) -> np.ndarray:
    """Lorentz boost on events ``(t, x1, x2, x3)`` into a frame moving with ``v`` along ``axis``."""
    if abs(v) >= 1:
        raise InvalidBoost(f"boost speed {v} is not below 1")
    g = 1.0 / np.sqrt((1 - v) * (1 + v))
    L = np.eye(4)
    a = axis + 1
    L[0, 0] = L[a, a] = g
    L[0, a] = L[a, 0] = -g * v
    return L


def transform_velocity(u: Sequence[float], v: float, axis: int = 0) -> np.ndarray:
    """Velocity seen from the boosted frame, via the event map of two worldline points."""
    L = boost_matrix(v, axis)
    e = L @ np.array([1.0, *u])
    return e[1:] / e[0]


@dataclass
class ExperimentResult:
    u: Tuple[float, float, float]
    t: float
    axis: int
    component: int
    epsilon: float
    delta_q: np.ndarray
    bracket_estimate: float
    closed_form: float
    meta: dict = field(default_factory=dict)

    @property
    def abs_error(self) -> float:
        return float(abs(self.delta_q[self.component] - self.closed_form))

    def to_dict(self) -> dict:
        return {"u": list(self.u), "t": self.t, "epsilon": self.epsilon,
                "delta_q": [float(x) for x in self.delta_q], "bracket_estimate": self.bracket_estimate,
                "closed_form": self.closed_form, "abs_error": self.abs_error, **self.meta}


def dynamic_translation_experiment(u: Velocity, t: float, axis: int = 0,
                                   component: Optional[int] = None) -> ExperimentResult:
    """Shift the frame along ``axis`` dynamically, ``epsilon = u_axis t``, and track the drift.

    Steps, all on explicit events:

    1. boost along ``axis`` with ``v = u_axis`` so the particle has no
       velocity component along ``axis`` in the new frame;
    2. map the worldline event at lab time ``t`` into that frame, giving
       the elapsed frame time ``t'`` and the transverse travel ``u'_b t'``;
    3. bring the travel back with the factor ``(t'/t)^2 = 1 - u_axis^2``
       (the time-dilation bookkeeping of the classical argument) and
       subtract the rigid drift ``u_b t``.

    A pure Lorentz map keeps transverse lengths, so without step 3's factor
    the drift would vanish; that value is kept in ``meta["lorentz_drift"]``.
    """
    if component is None:
        component = (axis + 1) % 3
    if component == axis:
        raise ValueError("component must differ from the boost axis")
    ua = u.u[axis]
    if ua == 0:
        raise InvalidBoost("the velocity has no component along the boost axis")
    epsilon = ua * t
    delta = np.zeros(3)
    lorentz = np.zeros(3)
    closed = -ua * ua * u.u[component] * t
    if abs(ua) >= 1:
        if not u.massless:
            raise InvalidBoost(f"|u_{axis + 1}| = {abs(ua)} leaves no frame to boost into")
        # unit speed along the axis: nothing moves transversally
        meta = {"t_prime": 0.0, "limit": True, "lorentz_drift": lorentz.tolist()}
        return ExperimentResult(u.u, t, axis, component, epsilon, delta, 0.0, closed, meta)
    L = boost_matrix(ua, axis)
    u_prime = transform_velocity(u.u, ua, axis)
    event = L @ np.array([t, *(np.asarray(u.u) * t)])
    t_prime = event[0]
    dilation = (t_prime / t) ** 2
    for b in range(3):
        if b == axis:
            continue
        travel = u_prime[b] * t_prime
        delta[b] = travel * dilation - u.u[b] * t
        lorentz[b] = (np.linalg.inv(L) @ np.array([t_prime, *(u_prime * t_prime)]))[b + 1] - u.u[b] * t
    meta = {"t_prime": float(t_prime), "u_prime": u_prime.tolist(), "limit": False,
            "lorentz_drift": lorentz.tolist()}
    return ExperimentResult(u.u, t, axis, component, epsilon, delta,
                            float(delta[component] / epsilon), closed, meta)


def unit_velocity_grid(n: int = 100, seed: int = 0) -> list:
    """Seeded unit velocities with ``|u_1|`` kept away from 0 and 1."""
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < n:
        v = rng.normal(size=3)
        v /= np.linalg.norm(v)
        if 0.05 < abs(v[0]) < 0.95:
            out.append(Velocity.unit(v))
    return out


# ---------------------------------------------------------------------------
# modified bracket
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PhaseSpacePoint:
    q: np.ndarray
    p: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "q", np.asarray(self.q, float))
        object.__setattr__(self, "p", np.asarray(self.p, float))
        if not np.linalg.norm(self.p) > 0:
            raise SingularMomentum("the bracket is singular at p = 0")


def bivector(p) -> np.ndarray:
    """``{q_i, p_j} = p_i p_j / p^2``."""
    p = np.asarray(p, float)
    n2 = float(p @ p)
    if n2 == 0:
        raise SingularMomentum("the bracket is singular at p = 0")
    return np.outer(p, p) / n2


Gradient = Callable[[np.ndarray, np.ndarray], Tuple[np.ndarray, np.ndarray]]


@dataclass(frozen=True)
class PhaseFunction:
    """Scalar ``f(q, p)`` with an optional analytic gradient ``(df/dq, df/dp)``."""

    value: Callable[[np.ndarray, np.ndarray], float]
    grad: Optional[Gradient] = None
    name: str = "f"

    def __call__(self, q, p) -> float:
        return self.value(np.asarray(q, float), np.asarray(p, float))

    def gradient(self, x: PhaseSpacePoint) -> Tuple[np.ndarray, np.ndarray]:
        if self.grad is not None:
            dq, dp = self.grad(x.q, x.p)
            return np.asarray(dq, float), np.asarray(dp, float)
        return finite_difference_gradient(self, x)


def finite_difference_gradient(f, x: PhaseSpacePoint, rel_step: float = 1e-5):
    """Central differences; the momentum step scales with ``|p|``."""
    hp = rel_step * float(np.linalg.norm(x.p))
    hq = rel_step * max(1.0, float(np.linalg.norm(x.q)))
    dq, dp = np.zeros(3), np.zeros(3)
    for i in range(3):
        e = np.zeros(3)
        e[i] = 1
        dq[i] = (f(x.q + hq * e, x.p) - f(x.q - hq * e, x.p)) / (2 * hq)
        dp[i] = (f(x.q, x.p + hp * e) - f(x.q, x.p - hp * e)) / (2 * hp)
    return dq, dp


def coordinate(i: int) -> PhaseFunction:
    e = np.eye(3)[i - 1]
    return PhaseFunction(lambda q, p: q[i - 1], lambda q, p: (e, np.zeros(3)), f"q{i}")


def momentum(i: int) -> PhaseFunction:
    e = np.eye(3)[i - 1]
    return PhaseFunction(lambda q, p: p[i - 1], lambda q, p: (np.zeros(3), e), f"p{i}")


def energy() -> PhaseFunction:
    """Massless ``H = |p|``."""
    return PhaseFunction(lambda q, p: float(np.linalg.norm(p)),
                         lambda q, p: (np.zeros(3), p / np.linalg.norm(p)), "H")


def modified_bracket(f: PhaseFunction, g: PhaseFunction, x: PhaseSpacePoint) -> float:
    """``sum_ij Pi_ij (df/dq_i dg/dp_j - dg/dq_i df/dp_j)``."""
    pi = bivector(x.p)
    fq, fp = f.gradient(x)
    gq, gp = g.gradient(x)
    return float(fq @ pi @ gp - gq @ pi @ fp)


def bracket_function(f: PhaseFunction, g: PhaseFunction) -> PhaseFunction:
    """``{f, g}`` as a phase function (gradient by finite differences)."""
    return PhaseFunction(lambda q, p: modified_bracket(f, g, PhaseSpacePoint(q, p)),
                         name=f"{{{f.name},{g.name}}}")


def jacobiator(f: PhaseFunction, g: PhaseFunction, h: PhaseFunction, x: PhaseSpacePoint) -> float:
    return (modified_bracket(f, bracket_function(g, h), x)
            + modified_bracket(g, bracket_function(h, f), x)
            + modified_bracket(h, bracket_function(f, g), x))


def random_points(n: int = 100, seed: int = 0, p_range=(0.5, 5.0)) -> list:
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(n):
        d = rng.normal(size=3)
        d /= np.linalg.norm(d)
        out.append(PhaseSpacePoint(rng.uniform(-2, 2, size=3), d * rng.uniform(*p_range)))
    return out
