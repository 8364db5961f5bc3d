"""Shared value types: states, trajectories, control grids, extended-real scores.

Everything here is an immutable value type, safe to hand to concurrent
evaluation workers. Scores are extended reals where negative infinity is a
tag (hard-constraint violation), deliberately distinct from IEEE -inf so a
numerical overflow can never masquerade as "unsafe".
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import total_ordering

import numpy as np

__all__ = [
    "State",
    "Trajectory",
    "ControlGrid",
    "GoodnessValue",
    "NEG_INFINITY",
    "LearnerConfig",
    "RegularityConstants",
    "NoiseModel",
    "ConstantOffset",
    "BoundedUniform",
    "goodness_max",
    "enumerate_grid",
    "as_vector",
]


def as_vector(v, name: str = "vector", dim: int | None = None) -> np.ndarray:
    """Coerce to a read-only finite float64 1-D array, validating shape."""
    arr = np.asarray(v, dtype=float)
    if arr.ndim != 1 or arr.size < 1:
        raise ValueError(f"{name} must be a nonempty 1-D vector, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} has non-finite entries: {arr}")
    if dim is not None and arr.size != dim:
        raise ValueError(f"{name} must have dimension {dim}, got {arr.size}")
    arr = arr.copy()
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class State:
    """A timestamped point of the system state.

    t is in seconds; x carries problem-dependent units (positions in m,
    velocities in m/s for the bundled scenarios).
    """

    t: float
    x: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "t", float(self.t))
        object.__setattr__(self, "x", as_vector(self.x, "state"))
        if not np.isfinite(self.t) or self.t < 0:
            raise ValueError(f"state time must be finite and >= 0, got {self.t}")

    @property
    def n(self) -> int:
        return self.x.size


@dataclass(frozen=True)
class Trajectory:
    """An ordered, strictly increasing sequence of observed/true states on [0, T]."""

    times: np.ndarray
    states: np.ndarray

    def __post_init__(self):
        times = np.asarray(self.times, dtype=float).reshape(-1)
        states = np.asarray(self.states, dtype=float)
        if times.size == 0:
            raise ValueError("trajectory must be nonempty")
        if states.ndim != 2 or states.shape[0] != times.size:
            raise ValueError(
                f"states must be ({times.size}, n), got shape {states.shape}"
            )
        if np.any(np.diff(times) <= 0):
            raise ValueError("trajectory timestamps must be strictly increasing")
        if not (np.all(np.isfinite(times)) and np.all(np.isfinite(states))):
            raise ValueError("trajectory contains non-finite values")
        times = times.copy()
        states = states.copy()
        times.setflags(write=False)
        states.setflags(write=False)
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "states", states)

    @classmethod
    def from_states(cls, samples: list[State]) -> "Trajectory":
        return cls(
            np.array([s.t for s in samples]),
            np.vstack([s.x for s in samples]),
        )

    def __len__(self) -> int:
        return self.times.size

    @property
    def n(self) -> int:
        return self.states.shape[1]

    @property
    def duration(self) -> float:
        """T of the domain [0, T]."""
        return float(self.times[-1])

    @property
    def last_state(self) -> State:
        return State(self.times[-1], self.states[-1])

    def shifted(self, offset) -> "Trajectory":
        """The trajectory with every sample translated by a constant state offset."""
        w = as_vector(offset, "offset", dim=self.n)
        return Trajectory(self.times, self.states + w)


@total_ordering
@dataclass(frozen=True)
class GoodnessValue:
    """Extended-real score: Finite(value) or NegInfinity.

    NegInfinity encodes hard-constraint violation and sits strictly below
    every finite value; finite values order as reals.
    """

    is_finite: bool
    value: float = float("-inf")

    def __post_init__(self):
        if self.is_finite and not np.isfinite(self.value):
            raise ValueError(f"finite goodness requires a finite value, got {self.value}")

    @classmethod
    def finite(cls, value: float) -> "GoodnessValue":
        return cls(True, float(value))

    @classmethod
    def neg_infinity(cls) -> "GoodnessValue":
        return cls(False)

    def __lt__(self, other: "GoodnessValue") -> bool:
        if not isinstance(other, GoodnessValue):
            return NotImplemented
        if not self.is_finite:
            return other.is_finite
        if not other.is_finite:
            return False
        return self.value < other.value

    def __float__(self) -> float:
        return self.value if self.is_finite else float("-inf")

    def __repr__(self) -> str:
        return f"Finite({self.value!r})" if self.is_finite else "NegInfinity"


NEG_INFINITY = GoodnessValue.neg_infinity()


def goodness_max(a: GoodnessValue, b: GoodnessValue) -> GoodnessValue:
    """The larger of two scores; NegInfinity is the absorbing minimum."""
    return b if a < b else a


@dataclass(frozen=True)
class ControlGrid:
    """Finite box discretization of the feasible control set.

    Points are enumerated in lexicographic axis order (first axis slowest);
    this order defines argmax tie-breaking everywhere downstream.
    """

    lower: np.ndarray
    upper: np.ndarray
    counts: tuple[int, ...]
    points: np.ndarray = field(repr=False)

    @property
    def m(self) -> int:
        return self.lower.size

    def __len__(self) -> int:
        return self.points.shape[0]

    @property
    def contains_zero(self) -> bool:
        return bool(np.any(np.all(self.points == 0.0, axis=1)))

    @property
    def max_abs(self) -> float:
        """Largest per-component control magnitude on the grid (u_max of the tube bound)."""
        return float(np.max(np.abs(self.points)))


def enumerate_grid(lower, upper, counts) -> ControlGrid:
    """Evenly spaced Cartesian product grid over a control box.

    counts is a per-axis point count (>= 2 each); enumeration order is
    deterministic: lexicographic with the first axis varying slowest.
    """
    lo = as_vector(lower, "lower bounds")
    hi = as_vector(upper, "upper bounds", dim=lo.size)
    cnt = tuple(int(c) for c in np.atleast_1d(counts))
    if len(cnt) != lo.size:
        raise ValueError(f"counts must have one entry per axis ({lo.size}), got {len(cnt)}")
    if any(c < 2 for c in cnt):
        raise ValueError(f"need at least 2 points per axis, got {cnt}")
    if np.any(hi < lo):
        raise ValueError("upper bounds must be >= lower bounds")
    axes = [np.linspace(lo[i], hi[i], cnt[i]) for i in range(lo.size)]
    points = np.array(list(itertools.product(*axes)), dtype=float)
    points.setflags(write=False)
    return ControlGrid(lo, hi, cnt, points)


@dataclass(frozen=True)
class LearnerConfig:
    """Probe-cycle parameters: control dimension m, interval epsilon (s), probe size delta."""

    m: int
    epsilon: float
    delta_probe: float

    def __post_init__(self):
        if self.m < 1:
            raise ValueError(f"control dimension must be >= 1, got {self.m}")
        if not (self.epsilon > 0 and np.isfinite(self.epsilon)):
            raise ValueError(f"epsilon must be positive, got {self.epsilon}")
        if not (self.delta_probe > 0 and np.isfinite(self.delta_probe)):
            raise ValueError(f"delta_probe must be positive, got {self.delta_probe}")

    @property
    def cycle_duration(self) -> float:
        """(m+1) * epsilon: one full learning cycle."""
        return (self.m + 1) * self.epsilon


@dataclass(frozen=True)
class RegularityConstants:
    """Dynamics bound M0, dynamics Lipschitz constant M1, goodness Lipschitz constant L."""

    M0: float
    M1: float
    L: float

    def __post_init__(self):
        for name in ("M0", "M1", "L"):
            v = getattr(self, name)
            if not (v > 0 and np.isfinite(v)):
                raise ValueError(f"{name} must be positive, got {v}")


class NoiseModel:
    """Observation error model with a declared 2-norm bound on the full state."""

    bound: float

    def sample(self, rng: np.random.Generator) -> np.ndarray:
        raise NotImplementedError


@dataclass(frozen=True)
class ConstantOffset(NoiseModel):
    """Fixed additive observation error e with ||e|| <= bound."""

    e: np.ndarray
    bound: float

    def __post_init__(self):
        object.__setattr__(self, "e", as_vector(self.e, "offset e"))
        object.__setattr__(self, "bound", float(self.bound))
        if self.bound < 0:
            raise ValueError(f"declared bound must be >= 0, got {self.bound}")
        if np.linalg.norm(self.e) > self.bound + 1e-12:
            raise ValueError(
                f"||e|| = {np.linalg.norm(self.e):.6g} exceeds declared bound {self.bound:.6g}"
            )

    def sample(self, rng: np.random.Generator) -> np.ndarray:
        return self.e


@dataclass(frozen=True)
class BoundedUniform(NoiseModel):
    """Per-axis uniform error in [-h_i, h_i] with ||h|| <= bound."""

    half_widths: np.ndarray
    bound: float

    def __post_init__(self):
        object.__setattr__(self, "half_widths", as_vector(self.half_widths, "half-widths"))
        object.__setattr__(self, "bound", float(self.bound))
        if np.any(self.half_widths < 0):
            raise ValueError("half-widths must be >= 0")
        if self.bound < 0:
            raise ValueError(f"declared bound must be >= 0, got {self.bound}")
        if np.linalg.norm(self.half_widths) > self.bound + 1e-12:
            raise ValueError(
                f"||half-widths|| = {np.linalg.norm(self.half_widths):.6g} "
                f"exceeds declared bound {self.bound:.6g}"
            )

    def sample(self, rng: np.random.Generator) -> np.ndarray:
        return rng.uniform(-self.half_widths, self.half_widths)
