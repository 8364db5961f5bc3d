"""Pure-numpy implementations of the hot kernels.

Mirrors the compiled `_kernels` extension; `myopic.backend` selects between
them at import time. Semantics must stay identical (same RK4 stage order,
same scan/bisection rules) so the two backends are interchangeable.
"""

from __future__ import annotations

import numpy as np

BACKEND_NAME = "python"

# Surface kind codes (see safety.SurfaceModel.kernel_params).
_PLANE = 0
_SPHERE = 1
_ELLIPSOID = 2

# Touchdown bisection targets |signed distance| <= this, in meters.
TOUCHDOWN_SD_TOL = 1e-6


def _deriv_di(x: np.ndarray, u: np.ndarray) -> np.ndarray:
    return np.array([x[2], x[3], u[0], u[1]])


def rk4_double_integrator(x0, u, h: float, nsteps: int) -> np.ndarray:
    """RK4 rollout of the planar double integrator; returns all nsteps+1 states."""
    out = np.empty((nsteps + 1, 4))
    out[0] = x0
    x = np.asarray(x0, dtype=float).copy()
    for i in range(nsteps):
        k1 = _deriv_di(x, u)
        k2 = _deriv_di(x + 0.5 * h * k1, u)
        k3 = _deriv_di(x + 0.5 * h * k2, u)
        k4 = _deriv_di(x + h * k3, u)
        x = x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        out[i + 1] = x
    return out


def _deriv_asteroid(x, u, omega, mu, quad, p):
    r = x[:3]
    v = x[3:]
    rn = np.linalg.norm(r)
    grad = -mu * r / rn**3 + quad @ r
    a = np.array(
        [
            2.0 * omega * v[1] + omega**2 * r[0] + grad[0] + u[0] + p[0],
            -2.0 * omega * v[0] + omega**2 * r[1] + grad[1] + u[1] + p[1],
            grad[2] + u[2] + p[2],
        ]
    )
    return np.concatenate([v, a])


def rk4_asteroid(x0, u, h: float, nsteps: int, omega: float, mu: float, quad, p) -> np.ndarray:
    """RK4 rollout of the rotating-frame small-body dynamics."""
    quad = np.asarray(quad, dtype=float)
    p = np.asarray(p, dtype=float)
    out = np.empty((nsteps + 1, 6))
    out[0] = x0
    x = np.asarray(x0, dtype=float).copy()
    for i in range(nsteps):
        k1 = _deriv_asteroid(x, u, omega, mu, quad, p)
        k2 = _deriv_asteroid(x + 0.5 * h * k1, u, omega, mu, quad, p)
        k3 = _deriv_asteroid(x + 0.5 * h * k2, u, omega, mu, quad, p)
        k4 = _deriv_asteroid(x + h * k3, u, omega, mu, quad, p)
        x = x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        out[i + 1] = x
    return out


def _signed_distance(pos: np.ndarray, kind: int, params: np.ndarray) -> float:
    if kind == _PLANE:
        return float(pos[2] - params[0])
    if kind == _SPHERE:
        return float(np.linalg.norm(pos - params[:3]) - params[3])
    if kind == _ELLIPSOID:
        q = (pos - params[:3]) / params[3:6]
        return float((np.linalg.norm(q) - 1.0) * np.min(params[3:6]))
    raise ValueError(f"unknown surface kind {kind}")


def _signed_distances(pos: np.ndarray, kind: int, params: np.ndarray) -> np.ndarray:
    if kind == _PLANE:
        return pos[:, 2] - params[0]
    if kind == _SPHERE:
        return np.linalg.norm(pos - params[:3], axis=1) - params[3]
    if kind == _ELLIPSOID:
        q = (pos - params[:3]) / params[3:6]
        return (np.linalg.norm(q, axis=1) - 1.0) * np.min(params[3:6])
    raise ValueError(f"unknown surface kind {kind}")


def touchdown_scan(r, v, a, kind: int, params, rf, t_max: float, dt: float):
    """Scan the constant-acceleration parabola for a surface crossing.

    Returns (hit, t): hit=1 with the bisection-refined crossing time, or
    hit=0 with the scan time minimizing the distance to the target rf.
    """
    r = np.asarray(r, dtype=float)
    v = np.asarray(v, dtype=float)
    a = np.asarray(a, dtype=float)
    rf = np.asarray(rf, dtype=float)
    params = np.asarray(params, dtype=float)

    n = int(np.ceil(t_max / dt - 1e-12))
    s = np.minimum(np.arange(n + 1) * dt, t_max)
    pos = r + np.outer(s, v) + 0.5 * np.outer(s * s, a)
    sd = _signed_distances(pos, kind, params)

    if sd[0] <= 0.0:
        return 1, 0.0

    below = sd <= 0.0
    if below.any():
        i = int(np.argmax(below))
        lo, hi = float(s[i - 1]), float(s[i])
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            pm = r + mid * v + 0.5 * mid * mid * a
            sm = _signed_distance(pm, kind, params)
            if abs(sm) <= TOUCHDOWN_SD_TOL:
                return 1, mid
            if sm > 0.0:
                lo = mid
            else:
                hi = mid
            if hi - lo < 1e-13:
                break
        return 1, 0.5 * (lo + hi)

    d2 = np.sum((pos - rf) ** 2, axis=1)
    return 0, float(s[int(np.argmin(d2))])
