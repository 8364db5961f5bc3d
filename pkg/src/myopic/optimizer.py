"""Control selection: nominal argmax and robust max-min over observation-error offsets.

The robust selector scores every grid control against every hypothesis
trajectory (the observed one shifted by a constant offset within the declared
error bound), takes the per-control worst case, and picks the control whose
worst case is best. Ties break to the first point in grid enumeration order,
making decisions reproducible.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .core import ControlGrid, GoodnessValue, Trajectory, as_vector
from .goodness import GoodnessFn
from .learner import LearnedDirection

__all__ = [
    "PerturbationSet",
    "Decision",
    "EmptyGridError",
    "EmptyPerturbationSetError",
    "make_perturbation_set",
    "nominal_select",
    "robust_select",
]


class EmptyGridError(ValueError):
    pass


class EmptyPerturbationSetError(ValueError):
    pass


@dataclass(frozen=True)
class PerturbationSet:
    """Finite family of constant state offsets sampling the error ball (always incl. zero)."""

    offsets: np.ndarray
    delta: float

    def __post_init__(self):
        offsets = np.atleast_2d(np.asarray(self.offsets, dtype=float))
        if offsets.size == 0:
            raise EmptyPerturbationSetError("perturbation set must be nonempty")
        if not np.any(np.all(offsets == 0.0, axis=1)):
            raise ValueError("perturbation set must contain the zero offset")
        norms = np.linalg.norm(offsets, axis=1)
        if np.any(norms > self.delta + 1e-9 * max(1.0, self.delta)):
            raise ValueError(
                f"offset norm {norms.max():.6g} exceeds declared bound {self.delta:.6g}"
            )
        offsets = offsets.copy()
        offsets.setflags(write=False)
        object.__setattr__(self, "offsets", offsets)
        object.__setattr__(self, "delta", float(self.delta))

    def __len__(self) -> int:
        return self.offsets.shape[0]


def make_perturbation_set(Delta: float, axes, samples_per_axis: int, state_dim: int) -> PerturbationSet:
    """Evenly spaced constant offsets on the given state axes, scaled to stay in the Delta ball.

    Each listed axis takes samples_per_axis (odd, so zero is included) values
    in [-Delta/sqrt(n_axes), +Delta/sqrt(n_axes)]; other axes stay zero.
    """
    if Delta < 0:
        raise ValueError(f"Delta must be >= 0, got {Delta}")
    k = int(samples_per_axis)
    if k < 1 or k % 2 == 0:
        raise ValueError(f"samples_per_axis must be odd (zero must be included), got {k}")
    axes = [int(a) for a in axes]
    if len(axes) == 0:
        raise ValueError("need at least one perturbed axis")
    if len(set(axes)) != len(axes):
        raise ValueError(f"perturbed axes must be distinct, got {axes}")
    if any(a < 0 or a >= state_dim for a in axes):
        raise ValueError(f"axes {axes} out of range for state dimension {state_dim}")

    if Delta == 0.0 or k == 1:
        values = [0.0]
    else:
        reach = Delta / np.sqrt(len(axes))
        values = list(np.linspace(-reach, reach, k))
    rows = []
    for combo in itertools.product(values, repeat=len(axes)):
        w = np.zeros(state_dim)
        for axis, val in zip(axes, combo):
            w[axis] = val
        rows.append(w)
    return PerturbationSet(np.array(rows), Delta)


@dataclass(frozen=True)
class Decision:
    """Chosen control plus the per-control worst-case table backing the choice."""

    u: np.ndarray
    value: GoodnessValue
    index: int
    worst_values: tuple[GoodnessValue, ...]
    worst_offsets: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "u", as_vector(self.u, "chosen control"))
        if self.worst_values[self.index] != self.value:
            raise ValueError("decision value must equal its table entry")

    @property
    def worst_offset_index(self) -> int:
        """Offset index realizing the worst case of the chosen control."""
        return self.worst_offsets[self.index]


def _argmax_first(values: list[GoodnessValue]) -> int:
    best = 0
    for i in range(1, len(values)):
        if values[i] > values[best]:
            best = i
    return best


def nominal_select(
    grid: ControlGrid,
    G: GoodnessFn,
    phi_obs: Trajectory,
    ld: LearnedDirection,
) -> Decision:
    """Argmax of the goodness over the grid on the observed trajectory alone."""
    if len(grid) == 0:
        raise EmptyGridError("control grid is empty")
    vs = ld.directions(grid.points)
    values = [G.evaluate(phi_obs, vs[i]) for i in range(len(grid))]
    best = _argmax_first(values)
    return Decision(
        grid.points[best],
        values[best],
        best,
        tuple(values),
        tuple([0] * len(values)),
    )


def robust_select(
    grid: ControlGrid,
    G: GoodnessFn,
    phi_obs: Trajectory,
    ld: LearnedDirection,
    pset: PerturbationSet,
) -> Decision:
    """Max-min selection: best worst-case goodness over the offset hypotheses.

    Each offset shifts the whole observed trajectory, including the probe
    record the direction estimate is re-derived from (constant offsets cancel
    in the finite differences, so the re-derivation changes only where the
    goodness is evaluated, not the learned direction).
    """
    if len(grid) == 0:
        raise EmptyGridError("control grid is empty")
    if len(pset) == 0:
        raise EmptyPerturbationSetError("perturbation set is empty")

    n_u = len(grid)
    worst: list[GoodnessValue | None] = [None] * n_u
    worst_off = [0] * n_u
    for k, w in enumerate(pset.offsets):
        phi_w = phi_obs.shifted(w)
        ld_w = LearnedDirection(ld.record.shifted(w))
        vs = ld_w.directions(grid.points)
        for i in range(n_u):
            val = G.evaluate(phi_w, vs[i])
            if worst[i] is None or val < worst[i]:
                worst[i] = val
                worst_off[i] = k
    values = [v for v in worst if v is not None]
    best = _argmax_first(values)
    return Decision(grid.points[best], values[best], best, tuple(values), tuple(worst_off))
