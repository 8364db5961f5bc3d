"""Local dynamics learning from probe maneuvers.

One learning cycle applies m+1 affinely independent controls u* + du_j over
consecutive epsilon-intervals and records the observed states at the interval
boundaries. The system direction under an arbitrary control u is then the
affine combination of the observed finite differences whose coefficients
reproduce u from the probe controls.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .core import LearnerConfig, as_vector

__all__ = [
    "ProbeSchedule",
    "ProbeRecord",
    "LearnedDirection",
    "make_schedule",
    "solve_lambda",
    "estimate_direction",
]

# Residual tolerance of the lambda constraints, scaled by (1 + ||u||).
LAMBDA_RESIDUAL_TOL = 1e-10


@dataclass(frozen=True)
class ProbeSchedule:
    """Base control u* plus m+1 probe deltas (du_0 = 0), applied for epsilon each."""

    base: np.ndarray
    deltas: np.ndarray
    epsilon: float

    def __post_init__(self):
        base = as_vector(self.base, "base control")
        deltas = np.asarray(self.deltas, dtype=float)
        m = base.size
        if deltas.shape != (m + 1, m):
            raise ValueError(f"deltas must have shape ({m + 1}, {m}), got {deltas.shape}")
        if np.any(deltas[0] != 0.0):
            raise ValueError("the first probe delta must be zero")
        if abs(np.linalg.det(deltas[1:] - deltas[0])) < 1e-300:
            raise ValueError("probe deltas are not affinely independent")
        deltas = deltas.copy()
        deltas.setflags(write=False)
        object.__setattr__(self, "base", base)
        object.__setattr__(self, "deltas", deltas)
        object.__setattr__(self, "epsilon", float(self.epsilon))

    @property
    def m(self) -> int:
        return self.base.size

    @property
    def controls(self) -> np.ndarray:
        """The m+1 applied controls u* + du_j, ordered by probe index."""
        return self.base + self.deltas


def make_schedule(base, cfg: LearnerConfig) -> ProbeSchedule:
    """Probe deltas du_j = delta * e_j (scaled standard basis), du_0 = 0."""
    base = as_vector(base, "base control", dim=cfg.m)
    deltas = np.zeros((cfg.m + 1, cfg.m))
    deltas[1:] = cfg.delta_probe * np.eye(cfg.m)
    return ProbeSchedule(base, deltas, cfg.epsilon)


@dataclass(frozen=True)
class ProbeRecord:
    """Observed states x_0..x_{m+1} at the boundaries of one learning cycle."""

    states: np.ndarray
    schedule: ProbeSchedule
    t0: float

    def __post_init__(self):
        states = np.asarray(self.states, dtype=float)
        m = self.schedule.m
        if states.ndim != 2 or states.shape[0] != m + 2:
            raise ValueError(
                f"need m+2 = {m + 2} observed states, got shape {states.shape}"
            )
        if not np.all(np.isfinite(states)):
            raise ValueError("probe record contains non-finite states")
        states = states.copy()
        states.setflags(write=False)
        object.__setattr__(self, "states", states)
        object.__setattr__(self, "t0", float(self.t0))

    @property
    def n(self) -> int:
        return self.states.shape[1]

    @property
    def times(self) -> np.ndarray:
        return self.t0 + self.schedule.epsilon * np.arange(self.states.shape[0])

    def shifted(self, offset) -> "ProbeRecord":
        w = as_vector(offset, "offset", dim=self.n)
        return ProbeRecord(self.states + w, self.schedule, self.t0)


class LearnedDirection:
    """Direction estimate v(u, x) derived on demand from one probe record.

    v(u) = sum_j lambda_j(u) * (x_{j+1} - x_j) / epsilon, where lambda solves
    sum lambda_j = 1 and sum lambda_j (u* + du_j) = u. The estimate is affine
    in u and reproduces the observed finite differences at the probe controls.
    """

    def __init__(self, record: ProbeRecord):
        self.record = record

    @property
    def schedule(self) -> ProbeSchedule:
        return self.record.schedule

    @property
    def anchor_state(self) -> np.ndarray:
        """The cycle state the estimate is attached to (last observed state)."""
        return self.record.states[-1]

    @cached_property
    def _constraint_matrix(self) -> np.ndarray:
        # Rows: the affine constraint sum(lambda) = 1, then u = sum lambda_j c_j.
        m = self.schedule.m
        A = np.empty((m + 1, m + 1))
        A[0] = 1.0
        A[1:] = self.schedule.controls.T
        return A

    @cached_property
    def _differences(self) -> np.ndarray:
        return np.diff(self.record.states, axis=0) / self.schedule.epsilon

    def lambdas(self, u) -> np.ndarray:
        u = as_vector(u, "query control", dim=self.schedule.m)
        rhs = np.concatenate(([1.0], u))
        try:
            lam = np.linalg.solve(self._constraint_matrix, rhs)
        except np.linalg.LinAlgError as exc:
            raise ValueError(f"probe controls are affinely dependent: {exc}") from exc
        residual = np.abs(self._constraint_matrix @ lam - rhs).max()
        if residual > LAMBDA_RESIDUAL_TOL * (1.0 + np.linalg.norm(u)):
            raise ValueError(
                f"lambda solve residual {residual:.3e} exceeds tolerance; "
                "probe schedule is numerically degenerate"
            )
        return lam

    def direction(self, u) -> np.ndarray:
        return self.lambdas(u) @ self._differences

    def directions(self, us: np.ndarray) -> np.ndarray:
        """Batched direction estimates, one row per query control."""
        us = np.atleast_2d(np.asarray(us, dtype=float))
        rhs = np.vstack([np.ones(us.shape[0]), us.T])
        lams = np.linalg.solve(self._constraint_matrix, rhs)
        return lams.T @ self._differences


def solve_lambda(schedule: ProbeSchedule, u) -> np.ndarray:
    """The unique affine-combination coefficients reproducing u from the probes."""
    m = schedule.m
    A = np.empty((m + 1, m + 1))
    A[0] = 1.0
    A[1:] = schedule.controls.T
    u = as_vector(u, "query control", dim=m)
    rhs = np.concatenate(([1.0], u))
    try:
        lam = np.linalg.solve(A, rhs)
    except np.linalg.LinAlgError as exc:
        raise ValueError(f"probe controls are affinely dependent: {exc}") from exc
    residual = np.abs(A @ lam - rhs).max()
    if residual > LAMBDA_RESIDUAL_TOL * (1.0 + np.linalg.norm(u)):
        raise ValueError(f"lambda solve residual {residual:.3e} exceeds tolerance")
    return lam


def estimate_direction(ld: LearnedDirection, u) -> np.ndarray:
    """v(u): the learned state derivative under control u (state units / s)."""
    return ld.direction(u)
