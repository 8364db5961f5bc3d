"""Unsafe-set geometry, touchdown surfaces, and the reachable-tube overapproximation.

Unsafe sets constrain the position components of the state (the leading
entries); membership and distance queries on full states project onto them.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import RegularityConstants, State, as_vector

__all__ = [
    "UnsafeSet",
    "SemiDisk",
    "SphereSet",
    "SurfaceModel",
    "Plane",
    "SphereSurface",
    "Ellipsoid",
    "ReachTube",
    "contains",
    "reach_overapprox",
    "tube_intersects",
]

# Surface kind codes shared with the kernel backends.
SURFACE_PLANE = 0
SURFACE_SPHERE = 1
SURFACE_ELLIPSOID = 2


class UnsafeSet:
    """A hazardous position region; states are unsafe when their position lies in it."""

    position_dim: int

    def contains_position(self, r: np.ndarray) -> bool:
        raise NotImplementedError

    def distance_position(self, r: np.ndarray) -> float:
        """Euclidean distance from a position to the set (0 inside)."""
        raise NotImplementedError

    def _project(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float).reshape(-1)
        if x.size < self.position_dim:
            raise ValueError(
                f"state dimension {x.size} below the set's position dimension "
                f"{self.position_dim}"
            )
        return x[: self.position_dim]

    def contains_state(self, x) -> bool:
        return self.contains_position(self._project(x))

    def distance_state(self, x) -> float:
        return self.distance_position(self._project(x))


@dataclass(frozen=True)
class SemiDisk(UnsafeSet):
    """A disk intersected with a half-plane: ||r - c|| <= radius and n.r >= offset."""

    center: np.ndarray
    radius: float
    halfplane_normal: np.ndarray
    halfplane_offset: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "center", as_vector(self.center, "center", dim=2))
        object.__setattr__(
            self, "halfplane_normal", as_vector(self.halfplane_normal, "normal", dim=2)
        )
        object.__setattr__(self, "radius", float(self.radius))
        object.__setattr__(self, "halfplane_offset", float(self.halfplane_offset))
        if self.radius <= 0:
            raise ValueError(f"radius must be positive, got {self.radius}")
        nrm = np.linalg.norm(self.halfplane_normal)
        if nrm == 0:
            raise ValueError("half-plane normal must be nonzero")
        unit = self.halfplane_normal / nrm
        unit.setflags(write=False)
        object.__setattr__(self, "halfplane_normal", unit)
        object.__setattr__(self, "halfplane_offset", self.halfplane_offset / nrm)

    position_dim = 2

    def contains_position(self, r) -> bool:
        r = np.asarray(r, dtype=float)
        return bool(
            np.dot(r - self.center, self.halfplane_normal) >= self.halfplane_offset
            and np.linalg.norm(r - self.center) <= self.radius
        )

    def distance_position(self, r) -> float:
        r = np.asarray(r, dtype=float)
        q = r - self.center
        h = float(np.dot(q, self.halfplane_normal)) - self.halfplane_offset
        if h >= 0.0:
            # In the kept half-plane: distance to the disk.
            return max(0.0, float(np.linalg.norm(q)) - self.radius)
        # Below the cut: nearest point lies on the flat edge (the chord).
        along = q - (h + self.halfplane_offset) * self.halfplane_normal
        chord_half = np.sqrt(max(self.radius**2 - self.halfplane_offset**2, 0.0))
        excess = max(0.0, float(np.linalg.norm(along)) - chord_half)
        return float(np.hypot(excess, -h))


@dataclass(frozen=True)
class SphereSet(UnsafeSet):
    """A solid ball ||r - c|| <= radius."""

    center: np.ndarray
    radius: float

    def __post_init__(self):
        object.__setattr__(self, "center", as_vector(self.center, "center"))
        object.__setattr__(self, "radius", float(self.radius))
        if self.radius <= 0:
            raise ValueError(f"radius must be positive, got {self.radius}")

    @property
    def position_dim(self) -> int:
        return self.center.size

    def contains_position(self, r) -> bool:
        return bool(np.linalg.norm(np.asarray(r, dtype=float) - self.center) <= self.radius)

    def distance_position(self, r) -> float:
        return max(0.0, float(np.linalg.norm(np.asarray(r, dtype=float) - self.center)) - self.radius)


def contains(unsafe: UnsafeSet, x: State | np.ndarray) -> bool:
    """Exact membership of a state's position in the unsafe set."""
    vec = x.x if isinstance(x, State) else x
    return unsafe.contains_state(vec)


class SurfaceModel:
    """Touchdown surface with a signed distance (negative below/inside)."""

    def signed_distance(self, r: np.ndarray) -> float:
        raise NotImplementedError

    def signed_distances(self, rs: np.ndarray) -> np.ndarray:
        return np.array([self.signed_distance(r) for r in np.atleast_2d(rs)])

    def kernel_params(self) -> tuple[int, np.ndarray]:
        """(kind code, packed parameters) for the compiled/fallback scan kernels."""
        raise NotImplementedError


@dataclass(frozen=True)
class Plane(SurfaceModel):
    """Horizontal plane z = height; below the plane is negative."""

    height: float = 0.0

    def signed_distance(self, r) -> float:
        return float(np.asarray(r, dtype=float)[-1] - self.height)

    def signed_distances(self, rs) -> np.ndarray:
        return np.atleast_2d(rs)[:, -1] - self.height

    def kernel_params(self):
        return SURFACE_PLANE, np.array([self.height], dtype=float)


@dataclass(frozen=True)
class SphereSurface(SurfaceModel):
    """Sphere of given center/radius; inside is negative."""

    center: np.ndarray
    radius: float

    def __post_init__(self):
        object.__setattr__(self, "center", as_vector(self.center, "center", dim=3))
        object.__setattr__(self, "radius", float(self.radius))
        if self.radius <= 0:
            raise ValueError(f"radius must be positive, got {self.radius}")

    def signed_distance(self, r) -> float:
        return float(np.linalg.norm(np.asarray(r, dtype=float) - self.center) - self.radius)

    def signed_distances(self, rs) -> np.ndarray:
        return np.linalg.norm(np.atleast_2d(rs) - self.center, axis=1) - self.radius

    def kernel_params(self):
        return SURFACE_SPHERE, np.concatenate([self.center, [self.radius]])


@dataclass(frozen=True)
class Ellipsoid(SurfaceModel):
    """Axis-aligned ellipsoid; the signed distance is the scaled algebraic form.

    sd(r) = (||(r - c) / axes|| - 1) * min(axes): exact zero set, approximate
    magnitude away from the surface (adequate for crossing detection).
    """

    center: np.ndarray
    semi_axes: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "center", as_vector(self.center, "center", dim=3))
        object.__setattr__(self, "semi_axes", as_vector(self.semi_axes, "semi-axes", dim=3))
        if np.any(self.semi_axes <= 0):
            raise ValueError("semi-axes must be positive")

    def signed_distance(self, r) -> float:
        q = (np.asarray(r, dtype=float) - self.center) / self.semi_axes
        return float((np.linalg.norm(q) - 1.0) * np.min(self.semi_axes))

    def signed_distances(self, rs) -> np.ndarray:
        q = (np.atleast_2d(rs) - self.center) / self.semi_axes
        return (np.linalg.norm(q, axis=1) - 1.0) * np.min(self.semi_axes)

    def kernel_params(self):
        return SURFACE_ELLIPSOID, np.concatenate([self.center, self.semi_axes])


@dataclass(frozen=True)
class ReachTube:
    """Sampled overapproximation of all states reachable under unknown Lipschitz dynamics.

    centers[j] is the nominal prediction at horizon times[j]; radii[j] bounds
    the deviation of any admissible true state from it.
    """

    times: np.ndarray
    centers: np.ndarray
    radii: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.times, dtype=float)
        c = np.asarray(self.centers, dtype=float)
        rho = np.asarray(self.radii, dtype=float)
        if not (t.ndim == 1 and c.ndim == 2 and c.shape[0] == t.size and rho.shape == t.shape):
            raise ValueError("inconsistent tube arrays")
        if np.any(np.diff(rho) < -1e-12):
            raise ValueError("tube radius must be nondecreasing")
        if np.any(rho < 0):
            raise ValueError("tube radius must be nonnegative")
        for arr in (t, c, rho):
            arr.setflags(write=False)
        object.__setattr__(self, "times", t)
        object.__setattr__(self, "centers", c)
        object.__setattr__(self, "radii", rho)


def reach_overapprox(
    x_obs,
    v_est,
    consts: RegularityConstants,
    u_max: float,
    Delta: float,
    dt: float,
    steps: int,
    m: int = 1,
) -> ReachTube:
    """Gronwall-type ball growth around a constant-velocity extrapolation.

    The deviation bound at horizon s is
        rho(s) = Delta * exp(g s) + M0 (1 + m u_max) s exp(g s),
    g = M1 (1 + m u_max), seeded with the observation uncertainty Delta;
    m is the control dimension. Conservative for any dynamics within
    (M0, M1) and any control bounded per-axis by u_max.
    """
    x_obs = as_vector(x_obs, "observed state")
    v = as_vector(v_est, "estimated direction", dim=x_obs.size)
    if dt <= 0 or steps < 1:
        raise ValueError("need dt > 0 and steps >= 1")
    if Delta < 0 or u_max < 0:
        raise ValueError("Delta and u_max must be >= 0")
    if m < 1:
        raise ValueError("control dimension m must be >= 1")
    s = dt * np.arange(steps + 1)
    growth = np.exp(consts.M1 * (1.0 + m * u_max) * s)
    rho = Delta * growth + consts.M0 * (1.0 + m * u_max) * s * growth
    centers = x_obs + np.outer(s, v)
    return ReachTube(s, centers, rho)


def tube_intersects(tube: ReachTube, unsafe: UnsafeSet) -> bool:
    """Conservative intersection test: any center within its inflation radius of the set."""
    for c, rho in zip(tube.centers, tube.radii):
        if unsafe.distance_state(c) <= rho:
            return True
    return False
