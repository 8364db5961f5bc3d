"""Ground-truth plant simulators and the observation channel.

These models generate the true states of the closed loop; the controller
side (learner/goodness/optimizer) never sees them, only the observations
produced by `observe`. Rollouts of the two scenario plants go through the
selected kernel backend; anything else uses the generic RK4 here.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import backend
from .core import NoiseModel, State, as_vector

__all__ = [
    "PotentialField",
    "PointMass",
    "TriaxialQuadratic",
    "Plant",
    "DoubleIntegrator",
    "AsteroidPlant",
    "LinearPlant",
    "IntegratorConfig",
    "IntegrationDivergence",
    "deriv_double_integrator",
    "deriv_asteroid",
    "step",
    "rollout",
    "observe",
]


class IntegrationDivergence(RuntimeError):
    """Raised when the integrator produces a non-finite state."""

    def __init__(self, t: float):
        super().__init__(f"integration diverged (non-finite state) at t = {t:.6g} s")
        self.t = float(t)


class PotentialField:
    """Scalar potential V(r) whose gradient enters the dynamics as +dV/dr."""

    def value(self, r: np.ndarray) -> float:
        raise NotImplementedError

    def gradient(self, r: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    @property
    def quad(self) -> np.ndarray:
        """Quadratic-form matrix consumed by the asteroid kernel (zeros if none)."""
        return np.zeros((3, 3))

    def gradient_check(self, r, step: float = 1e-3, tol: float = 1e-6) -> None:
        """Verify the analytic gradient against central differences."""
        r = np.asarray(r, dtype=float)
        g = self.gradient(r)
        num = np.empty(3)
        for i in range(3):
            dr = np.zeros(3)
            dr[i] = step
            num[i] = (self.value(r + dr) - self.value(r - dr)) / (2 * step)
        scale = max(np.linalg.norm(g), 1e-300)
        err = np.linalg.norm(g - num) / scale
        if err > tol:
            raise ValueError(f"potential gradient self-check failed: rel err {err:.3e}")


@dataclass(frozen=True)
class PointMass(PotentialField):
    """V(r) = mu / ||r||; gradient -mu r / ||r||^3 (attractive). mu = 0 disables gravity."""

    mu: float

    def __post_init__(self):
        if not (self.mu >= 0 and np.isfinite(self.mu)):
            raise ValueError(f"mu must be >= 0, got {self.mu}")
        self.gradient_check([123.0, -45.0, 250.0])

    def value(self, r) -> float:
        rn = np.linalg.norm(r)
        if rn == 0:
            raise ZeroDivisionError("potential singular at r = 0")
        return float(self.mu / rn)

    def gradient(self, r) -> np.ndarray:
        r = np.asarray(r, dtype=float)
        rn = np.linalg.norm(r)
        if rn == 0:
            raise ZeroDivisionError("potential gradient singular at r = 0")
        return -self.mu * r / rn**3


@dataclass(frozen=True)
class TriaxialQuadratic(PotentialField):
    """Point mass plus a quadratic correction: V = mu/||r|| + r^T C r / 2."""

    mu: float
    coeff: np.ndarray

    def __post_init__(self):
        C = np.asarray(self.coeff, dtype=float)
        if C.shape != (3, 3):
            raise ValueError(f"coefficient matrix must be 3x3, got {C.shape}")
        C = 0.5 * (C + C.T)  # gradient formula assumes symmetry
        C.setflags(write=False)
        object.__setattr__(self, "coeff", C)
        if not (self.mu >= 0 and np.isfinite(self.mu)):
            raise ValueError(f"mu must be >= 0, got {self.mu}")
        self.gradient_check([123.0, -45.0, 250.0])

    def value(self, r) -> float:
        r = np.asarray(r, dtype=float)
        rn = np.linalg.norm(r)
        if rn == 0:
            raise ZeroDivisionError("potential singular at r = 0")
        return float(self.mu / rn + 0.5 * r @ self.coeff @ r)

    def gradient(self, r) -> np.ndarray:
        r = np.asarray(r, dtype=float)
        rn = np.linalg.norm(r)
        if rn == 0:
            raise ZeroDivisionError("potential gradient singular at r = 0")
        return -self.mu * r / rn**3 + self.coeff @ r

    @property
    def quad(self) -> np.ndarray:
        return self.coeff


class Plant:
    """Control-affine ground-truth dynamics x' = f(x) + sum g_i(x) u_i."""

    n: int
    m: int

    def deriv(self, x: np.ndarray, u: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def rollout(self, x0: np.ndarray, u: np.ndarray, h: float, nsteps: int) -> np.ndarray:
        """States at all nsteps+1 RK4 substeps under constant control u."""
        return _generic_rollout(self.deriv, x0, u, h, nsteps)


@dataclass(frozen=True)
class DoubleIntegrator(Plant):
    """Planar agent: positions (x1, x2), velocities (x3, x4), acceleration control."""

    n = 4
    m = 2

    def deriv(self, x, u) -> np.ndarray:
        return deriv_double_integrator(x, u)

    def rollout(self, x0, u, h, nsteps) -> np.ndarray:
        return backend.rk4_double_integrator(x0, u, h, nsteps)


@dataclass(frozen=True)
class AsteroidPlant(Plant):
    """Small-body lander in the body-fixed rotating frame.

    State (r, v) in R^6; thrust acceleration control in R^3. omega is the
    body rotation rate (rad/s) about +z; p is a constant environmental
    perturbation acceleration (zero in the bundled scenarios).
    """

    omega: float
    potential: PotentialField
    perturbation: np.ndarray = None  # type: ignore[assignment]

    n = 6
    m = 3

    def __post_init__(self):
        if self.omega < 0 or not np.isfinite(self.omega):
            raise ValueError(f"omega must be >= 0, got {self.omega}")
        p = np.zeros(3) if self.perturbation is None else as_vector(self.perturbation, "perturbation", dim=3)
        object.__setattr__(self, "perturbation", p)

    def deriv(self, x, u) -> np.ndarray:
        return deriv_asteroid(self, x, u)

    def rollout(self, x0, u, h, nsteps) -> np.ndarray:
        return backend.rk4_asteroid(
            x0, u, h, nsteps, self.omega, _mu_of(self.potential), self.potential.quad, self.perturbation
        )


def _mu_of(potential: PotentialField) -> float:
    mu = getattr(potential, "mu", None)
    if mu is None:
        raise TypeError("asteroid kernel rollout needs a point-mass-based potential")
    return float(mu)


@dataclass(frozen=True)
class LinearPlant(Plant):
    """LTI dynamics x' = A x + B u (test scaffolding and simple scenarios)."""

    A: np.ndarray
    B: np.ndarray

    def __post_init__(self):
        A = np.atleast_2d(np.asarray(self.A, dtype=float))
        B = np.atleast_2d(np.asarray(self.B, dtype=float))
        if A.shape[0] != A.shape[1]:
            raise ValueError(f"A must be square, got {A.shape}")
        if B.shape[0] != A.shape[0]:
            raise ValueError(f"B must have {A.shape[0]} rows, got {B.shape}")
        A.setflags(write=False)
        B.setflags(write=False)
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "B", B)

    @property
    def n(self) -> int:
        return self.A.shape[0]

    @property
    def m(self) -> int:
        return self.B.shape[1]

    def deriv(self, x, u) -> np.ndarray:
        return self.A @ np.asarray(x, dtype=float) + self.B @ np.asarray(u, dtype=float)


@dataclass(frozen=True)
class IntegratorConfig:
    """Fixed-step classical RK4; h must divide the observation interval."""

    h: float

    def __post_init__(self):
        if not (self.h > 0 and np.isfinite(self.h)):
            raise ValueError(f"step size must be positive, got {self.h}")

    def substeps(self, duration: float) -> int:
        k = duration / self.h
        ki = int(round(k))
        if ki < 0 or abs(k - ki) > 1e-9 * max(1.0, abs(k)):
            raise ValueError(
                f"duration {duration} is not a nonnegative multiple of step {self.h}"
            )
        return ki


def deriv_double_integrator(x, u) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    u = np.asarray(u, dtype=float)
    if x.shape != (4,) or u.shape != (2,):
        raise ValueError(f"double integrator needs n=4, m=2; got {x.shape}, {u.shape}")
    return np.array([x[2], x[3], u[0], u[1]])


def deriv_asteroid(plant: AsteroidPlant, x, u) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    u = np.asarray(u, dtype=float)
    if x.shape != (6,) or u.shape != (3,):
        raise ValueError(f"asteroid plant needs n=6, m=3; got {x.shape}, {u.shape}")
    r, v = x[:3], x[3:]
    grad = plant.potential.gradient(r)
    w = plant.omega
    p = plant.perturbation
    a = np.array(
        [
            2.0 * w * v[1] + w**2 * r[0] + grad[0] + u[0] + p[0],
            -2.0 * w * v[0] + w**2 * r[1] + grad[1] + u[1] + p[1],
            grad[2] + u[2] + p[2],
        ]
    )
    return np.concatenate([v, a])


def _generic_rollout(deriv, x0, u, h: float, nsteps: int) -> np.ndarray:
    x = np.asarray(x0, dtype=float).copy()
    out = np.empty((nsteps + 1, x.size))
    out[0] = x
    for i in range(nsteps):
        k1 = deriv(x, u)
        k2 = deriv(x + 0.5 * h * k1, u)
        k3 = deriv(x + 0.5 * h * k2, u)
        k4 = deriv(x + h * k3, u)
        x = x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        out[i + 1] = x
    return out


def step(deriv, x: State, u, cfg: IntegratorConfig, duration: float) -> State:
    """Advance the state by `duration` under constant control u (classical RK4).

    duration must be a nonnegative multiple of cfg.h so observation instants
    land exactly on integrator steps.
    """
    nsteps = cfg.substeps(duration)
    if nsteps == 0:
        return x
    block = _generic_rollout(deriv, x.x, np.asarray(u, dtype=float), cfg.h, nsteps)
    bad = ~np.all(np.isfinite(block), axis=1)
    if bad.any():
        raise IntegrationDivergence(x.t + cfg.h * int(np.argmax(bad)))
    return State(x.t + duration, block[-1])


def rollout(plant: Plant, x: State, u, cfg: IntegratorConfig, duration: float) -> np.ndarray:
    """All RK4 substep states over `duration`, via the plant's fast path."""
    nsteps = cfg.substeps(duration)
    if nsteps == 0:
        return x.x[None, :].copy()
    block = plant.rollout(x.x, np.asarray(u, dtype=float), cfg.h, nsteps)
    bad = ~np.all(np.isfinite(block), axis=1)
    if bad.any():
        raise IntegrationDivergence(x.t + cfg.h * int(np.argmax(bad)))
    return block


def observe(x_true: State, noise: NoiseModel | None, rng) -> State:
    """The sensed state: truth plus a bounded error drawn from the noise model."""
    if noise is None:
        return x_true
    if isinstance(rng, (int, np.integer)):
        rng = np.random.default_rng(int(rng))
    offset = noise.sample(rng)
    if offset.size != x_true.n:
        raise ValueError(
            f"noise dimension {offset.size} does not match state dimension {x_true.n}"
        )
    return State(x_true.t, x_true.x + offset)
