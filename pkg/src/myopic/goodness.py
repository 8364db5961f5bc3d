"""Goodness functions: mission-objective scores over (trajectory, direction) pairs.

A goodness function maps the trajectory so far and a candidate instantaneous
state derivative to an extended-real score; NegInfinity marks controls whose
predicted outcome violates a hard safety constraint. Includes the trajectory
pseudometric used by the Lipschitz machinery, the constant-acceleration
position predictor, and touchdown-time estimation against a surface model.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import backend
from .core import NEG_INFINITY, GoodnessValue, RegularityConstants, Trajectory, as_vector
from .learner import LearnedDirection
from .safety import SurfaceModel, UnsafeSet, reach_overapprox, tube_intersects

__all__ = [
    "GoodnessFn",
    "ObstacleGoodnessConfig",
    "LandingGoodnessConfig",
    "ObstacleGoodness",
    "LandingGoodness",
    "TubeGuardedGoodness",
    "TouchdownEstimate",
    "trajectory_distance",
    "predict_position",
    "estimate_tgo",
    "obstacle_goodness",
    "landing_goodness",
]


class GoodnessFn:
    """Deterministic score of (trajectory-so-far, candidate direction).

    lipschitz, when declared, is the constant L of the score with respect to
    the trajectory metric plus the direction 2-norm.
    """

    lipschitz: float | None = None

    def evaluate(self, phi: Trajectory, v: np.ndarray) -> GoodnessValue:
        raise NotImplementedError


def trajectory_distance(phi1: Trajectory, phi2: Trajectory) -> float:
    """|T1 - T2| plus the max pointwise state gap over the shared sample times."""
    if phi1.n != phi2.n:
        raise ValueError(f"trajectory dimensions differ: {phi1.n} vs {phi2.n}")
    short, long_ = (phi1, phi2) if phi1.duration <= phi2.duration else (phi2, phi1)
    idx = np.searchsorted(long_.times, short.times)
    idx = np.clip(idx, 0, len(long_) - 1)
    # Sample times must coincide: both trajectories share the observation clock.
    left = np.clip(idx - 1, 0, len(long_) - 1)
    use_left = np.abs(long_.times[left] - short.times) < np.abs(long_.times[idx] - short.times)
    idx = np.where(use_left, left, idx)
    if np.any(np.abs(long_.times[idx] - short.times) > 1e-9 * np.maximum(1.0, np.abs(short.times))):
        raise ValueError("trajectories do not share a sampling clock on their overlap")
    gaps = np.linalg.norm(short.states - long_.states[idx], axis=1)
    return abs(phi1.duration - phi2.duration) + float(gaps.max())


def predict_position(r, v, a_u, dt: float) -> np.ndarray:
    """Constant-acceleration prediction r + dt v + dt^2 a / 2."""
    if dt < 0:
        raise ValueError(f"prediction horizon must be >= 0, got {dt}")
    r = np.asarray(r, dtype=float)
    v = np.asarray(v, dtype=float)
    a_u = np.asarray(a_u, dtype=float)
    return r + dt * v + 0.5 * dt * dt * a_u


@dataclass(frozen=True)
class TouchdownEstimate:
    """Result of the surface-crossing scan: hit time, or time of closest target approach."""

    hit: bool
    t: float


def estimate_tgo(r, v, a_u, surface: SurfaceModel, t_max: float, dt_scan: float, target) -> TouchdownEstimate:
    """Scan the prediction parabola for its first surface crossing.

    A crossing is bisection-refined until the surface signed distance is
    within 1e-6 m. With no crossing by t_max the estimate reports the scan
    time minimizing the distance to `target` instead.
    """
    if t_max <= 0 or dt_scan <= 0:
        raise ValueError("t_max and dt_scan must be positive")
    kind, params = surface.kernel_params()
    hit, t = backend.touchdown_scan(
        np.asarray(r, dtype=float),
        np.asarray(v, dtype=float),
        np.asarray(a_u, dtype=float),
        kind,
        params,
        np.asarray(target, dtype=float),
        float(t_max),
        float(dt_scan),
    )
    return TouchdownEstimate(bool(hit), float(t))


@dataclass(frozen=True)
class ObstacleGoodnessConfig:
    """Planar reach-the-target score with an inverse-square obstacle repulsion.

    The score is evaluated at the position predicted predict_dt ahead under
    the candidate direction's acceleration components.
    """

    r_f: np.ndarray
    r_B: np.ndarray
    tau: float
    predict_dt: float

    def __post_init__(self):
        object.__setattr__(self, "r_f", as_vector(self.r_f, "target", dim=2))
        object.__setattr__(self, "r_B", as_vector(self.r_B, "obstacle reference", dim=2))
        if self.tau < 0:
            raise ValueError(f"tau must be >= 0, got {self.tau}")
        if self.predict_dt <= 0:
            raise ValueError(f"predict_dt must be positive, got {self.predict_dt}")


class ObstacleGoodness(GoodnessFn):
    """-||r_p - r_f||^2 - tau/||r_p - r_B||^2, NegInfinity when r_p falls in the unsafe set."""

    def __init__(self, cfg: ObstacleGoodnessConfig, unsafe: UnsafeSet, lipschitz: float | None = None):
        self.cfg = cfg
        self.unsafe = unsafe
        self.lipschitz = lipschitz

    def predicted_position(self, phi: Trajectory, v: np.ndarray) -> np.ndarray:
        x = phi.states[-1]
        if x.size != 4 or v.size != 4:
            raise ValueError("obstacle goodness expects the planar 4-state layout")
        return predict_position(x[:2], x[2:4], v[2:4], self.cfg.predict_dt)

    def evaluate(self, phi: Trajectory, v: np.ndarray) -> GoodnessValue:
        r_p = self.predicted_position(phi, v)
        if self.unsafe.contains_position(r_p):
            return NEG_INFINITY
        score = -float(np.sum((r_p - self.cfg.r_f) ** 2))
        if self.cfg.tau > 0:
            d2 = float(np.sum((r_p - self.cfg.r_B) ** 2))
            if d2 == 0.0:
                return NEG_INFINITY
            score -= self.cfg.tau / d2
        return GoodnessValue.finite(score)


@dataclass(frozen=True)
class LandingGoodnessConfig:
    """Touchdown-accuracy score with obstacle repulsion and a flight-time cap.

    collision_check_dt is the look-ahead t' - t of the hard obstacle check;
    scan_dt the touchdown-scan resolution.
    """

    r_f: np.ndarray
    r_B: np.ndarray
    R: float
    tau: float
    t_max: float
    collision_check_dt: float
    scan_dt: float

    def __post_init__(self):
        object.__setattr__(self, "r_f", as_vector(self.r_f, "landing site", dim=3))
        object.__setattr__(self, "r_B", as_vector(self.r_B, "obstacle center", dim=3))
        if self.R <= 0:
            raise ValueError(f"obstacle radius must be positive, got {self.R}")
        if self.tau < 0:
            raise ValueError(f"tau must be >= 0, got {self.tau}")
        if self.t_max <= 0:
            raise ValueError(f"t_max must be positive, got {self.t_max}")
        if self.collision_check_dt <= 0:
            raise ValueError(f"collision_check_dt must be positive, got {self.collision_check_dt}")
        if self.scan_dt <= 0:
            raise ValueError(f"scan_dt must be positive, got {self.scan_dt}")


class LandingGoodness(GoodnessFn):
    """Landing-error score: predicted touchdown miss (or closest approach) plus repulsion.

    Branches: surface hit within t_max scores the touchdown miss distance;
    otherwise the closest predicted approach to the landing site; either way
    NegInfinity when the position predicted collision_check_dt ahead is
    inside the obstacle ball.
    """

    def __init__(self, cfg: LandingGoodnessConfig, surface: SurfaceModel, lipschitz: float | None = None):
        self.cfg = cfg
        self.surface = surface
        self.lipschitz = lipschitz

    def evaluate(self, phi: Trajectory, v: np.ndarray) -> GoodnessValue:
        x = phi.states[-1]
        if x.size != 6 or v.size != 6:
            raise ValueError("landing goodness expects the 6-state (r, v) layout")
        r, vel = x[:3], x[3:6]
        a_u = v[3:6]
        cfg = self.cfg

        r_check = predict_position(r, vel, a_u, cfg.collision_check_dt)
        sep2 = float(np.sum((r_check - cfg.r_B) ** 2))
        if sep2 <= cfg.R**2:
            return NEG_INFINITY

        est = estimate_tgo(r, vel, a_u, self.surface, cfg.t_max, cfg.scan_dt, cfg.r_f)
        p = predict_position(r, vel, a_u, est.t)
        score = -float(np.sum((p - cfg.r_f) ** 2))
        if cfg.tau > 0:
            score -= cfg.tau / sep2
        return GoodnessValue.finite(score)


class TubeGuardedGoodness(GoodnessFn):
    """Reachability-guarded wrapper: NegInfinity whenever the reach tube can touch the unsafe set.

    Used when the dynamics are assumed to keep changing within a known
    Lipschitz class instead of staying locally constant; the veto covers the
    whole look-ahead window, not just its endpoint.
    """

    def __init__(
        self,
        base: GoodnessFn,
        unsafe: UnsafeSet,
        consts: RegularityConstants,
        u_max: float,
        Delta: float,
        horizon: float,
        m: int,
        steps: int = 8,
    ):
        self.base = base
        self.unsafe = unsafe
        self.consts = consts
        self.u_max = float(u_max)
        self.Delta = float(Delta)
        self.horizon = float(horizon)
        self.m = int(m)
        self.steps = int(steps)
        self.lipschitz = base.lipschitz

    def evaluate(self, phi: Trajectory, v: np.ndarray) -> GoodnessValue:
        tube = reach_overapprox(
            phi.states[-1],
            v,
            self.consts,
            self.u_max,
            self.Delta,
            self.horizon / self.steps,
            self.steps,
            m=self.m,
        )
        if tube_intersects(tube, self.unsafe):
            return NEG_INFINITY
        return self.base.evaluate(phi, v)


def obstacle_goodness(
    cfg: ObstacleGoodnessConfig,
    phi: Trajectory,
    ld: LearnedDirection,
    u,
    unsafe: UnsafeSet,
) -> GoodnessValue:
    """Score a control via the learned direction (planar obstacle scenario)."""
    return ObstacleGoodness(cfg, unsafe).evaluate(phi, ld.direction(u))


def landing_goodness(
    cfg: LandingGoodnessConfig,
    phi: Trajectory,
    ld: LearnedDirection,
    u,
    surface: SurfaceModel,
) -> GoodnessValue:
    """Score a control via the learned direction (small-body landing scenario)."""
    return LandingGoodness(cfg, surface).evaluate(phi, ld.direction(u))
