# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled implementations of the hot kernels (RK4 rollouts, touchdown scan).

Semantics mirror `_kernels_py`; `myopic.backend` picks whichever imports.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport sqrt, fabs, ceil

cnp.import_array()

BACKEND_NAME = "compiled"

TOUCHDOWN_SD_TOL = 1e-6

cdef double _SD_TOL = 1e-6
cdef int _PLANE = 0
cdef int _SPHERE = 1
cdef int _ELLIPSOID = 2


cdef inline void _deriv_di(double* x, double* u, double* dx) nogil:
    dx[0] = x[2]
    dx[1] = x[3]
    dx[2] = u[0]
    dx[3] = u[1]


def rk4_double_integrator(object x0, object u, double h, int nsteps):
    cdef cnp.ndarray[cnp.float64_t, ndim=2] out = np.empty((nsteps + 1, 4))
    cdef cnp.ndarray[cnp.float64_t, ndim=1] x0a = np.ascontiguousarray(x0, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] ua = np.ascontiguousarray(u, dtype=np.float64)
    cdef double x[4]
    cdef double tmp[4]
    cdef double k1[4]
    cdef double k2[4]
    cdef double k3[4]
    cdef double k4[4]
    cdef double uu[2]
    cdef int i, j
    for j in range(4):
        x[j] = x0a[j]
        out[0, j] = x[j]
    uu[0] = ua[0]
    uu[1] = ua[1]
    for i in range(nsteps):
        _deriv_di(x, uu, k1)
        for j in range(4):
            tmp[j] = x[j] + 0.5 * h * k1[j]
        _deriv_di(tmp, uu, k2)
        for j in range(4):
            tmp[j] = x[j] + 0.5 * h * k2[j]
        _deriv_di(tmp, uu, k3)
        for j in range(4):
            tmp[j] = x[j] + h * k3[j]
        _deriv_di(tmp, uu, k4)
        for j in range(4):
            x[j] = x[j] + (h / 6.0) * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j])
            out[i + 1, j] = x[j]
    return out


cdef inline void _deriv_ast(double* x, double* u, double omega, double mu,
                            double* quad, double* p, double* dx) nogil:
    cdef double rn = sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2])
    cdef double rn3 = rn * rn * rn
    cdef double g0 = -mu * x[0] / rn3 + quad[0] * x[0] + quad[1] * x[1] + quad[2] * x[2]
    cdef double g1 = -mu * x[1] / rn3 + quad[3] * x[0] + quad[4] * x[1] + quad[5] * x[2]
    cdef double g2 = -mu * x[2] / rn3 + quad[6] * x[0] + quad[7] * x[1] + quad[8] * x[2]
    dx[0] = x[3]
    dx[1] = x[4]
    dx[2] = x[5]
    dx[3] = 2.0 * omega * x[4] + omega * omega * x[0] + g0 + u[0] + p[0]
    dx[4] = -2.0 * omega * x[3] + omega * omega * x[1] + g1 + u[1] + p[1]
    dx[5] = g2 + u[2] + p[2]


def rk4_asteroid(object x0, object u, double h, int nsteps,
                 double omega, double mu, object quad, object p):
    cdef cnp.ndarray[cnp.float64_t, ndim=2] out = np.empty((nsteps + 1, 6))
    cdef cnp.ndarray[cnp.float64_t, ndim=1] x0a = np.ascontiguousarray(x0, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] ua = np.ascontiguousarray(u, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] qa = np.ascontiguousarray(np.asarray(quad, dtype=np.float64).reshape(-1))
    cdef cnp.ndarray[cnp.float64_t, ndim=1] pa = np.ascontiguousarray(p, dtype=np.float64)
    cdef double x[6]
    cdef double tmp[6]
    cdef double k1[6]
    cdef double k2[6]
    cdef double k3[6]
    cdef double k4[6]
    cdef double uu[3]
    cdef double qq[9]
    cdef double pp[3]
    cdef int i, j
    for j in range(6):
        x[j] = x0a[j]
        out[0, j] = x[j]
    for j in range(3):
        uu[j] = ua[j]
        pp[j] = pa[j]
    for j in range(9):
        qq[j] = qa[j]
    for i in range(nsteps):
        _deriv_ast(x, uu, omega, mu, qq, pp, k1)
        for j in range(6):
            tmp[j] = x[j] + 0.5 * h * k1[j]
        _deriv_ast(tmp, uu, omega, mu, qq, pp, k2)
        for j in range(6):
            tmp[j] = x[j] + 0.5 * h * k2[j]
        _deriv_ast(tmp, uu, omega, mu, qq, pp, k3)
        for j in range(6):
            tmp[j] = x[j] + h * k3[j]
        _deriv_ast(tmp, uu, omega, mu, qq, pp, k4)
        for j in range(6):
            x[j] = x[j] + (h / 6.0) * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j])
            out[i + 1, j] = x[j]
    return out


cdef inline double _sd(double px, double py, double pz, int kind, double* sp) nogil:
    cdef double dx, dy, dz, q, mn
    if kind == 0:  # plane
        return pz - sp[0]
    if kind == 1:  # sphere
        dx = px - sp[0]
        dy = py - sp[1]
        dz = pz - sp[2]
        return sqrt(dx * dx + dy * dy + dz * dz) - sp[3]
    # ellipsoid
    dx = (px - sp[0]) / sp[3]
    dy = (py - sp[1]) / sp[4]
    dz = (pz - sp[2]) / sp[5]
    q = sqrt(dx * dx + dy * dy + dz * dz)
    mn = sp[3]
    if sp[4] < mn:
        mn = sp[4]
    if sp[5] < mn:
        mn = sp[5]
    return (q - 1.0) * mn


def touchdown_scan(object r, object v, object a, int kind, object params,
                   object rf, double t_max, double dt):
    cdef cnp.ndarray[cnp.float64_t, ndim=1] ra = np.ascontiguousarray(r, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] va = np.ascontiguousarray(v, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] aa = np.ascontiguousarray(a, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] fa = np.ascontiguousarray(rf, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] spa = np.ascontiguousarray(params, dtype=np.float64)
    cdef double sp[6]
    cdef int nsp = spa.shape[0]
    cdef int i
    for i in range(6):
        sp[i] = spa[i] if i < nsp else 0.0

    cdef double r0 = ra[0], r1 = ra[1], r2 = ra[2]
    cdef double v0 = va[0], v1 = va[1], v2 = va[2]
    cdef double a0 = aa[0], a1 = aa[1], a2 = aa[2]
    cdef double f0 = fa[0], f1 = fa[1], f2 = fa[2]

    cdef int n = <int>ceil(t_max / dt - 1e-12)
    cdef double s, px, py, pz, sdv, d2
    cdef double prev_s = 0.0
    cdef double best_d2, best_t
    cdef double lo, hi, mid, sm
    cdef int it

    px = r0
    py = r1
    pz = r2
    sdv = _sd(px, py, pz, kind, sp)
    if sdv <= 0.0:
        return 1, 0.0
    best_d2 = (px - f0) ** 2 + (py - f1) ** 2 + (pz - f2) ** 2
    best_t = 0.0

    for i in range(1, n + 1):
        s = i * dt
        if s > t_max:
            s = t_max
        px = r0 + s * v0 + 0.5 * s * s * a0
        py = r1 + s * v1 + 0.5 * s * s * a1
        pz = r2 + s * v2 + 0.5 * s * s * a2
        sdv = _sd(px, py, pz, kind, sp)
        if sdv <= 0.0:
            lo = prev_s
            hi = s
            for it in range(200):
                mid = 0.5 * (lo + hi)
                px = r0 + mid * v0 + 0.5 * mid * mid * a0
                py = r1 + mid * v1 + 0.5 * mid * mid * a1
                pz = r2 + mid * v2 + 0.5 * mid * mid * a2
                sm = _sd(px, py, pz, kind, sp)
                if fabs(sm) <= _SD_TOL:
                    return 1, mid
                if sm > 0.0:
                    lo = mid
                else:
                    hi = mid
                if hi - lo < 1e-13:
                    break
            return 1, 0.5 * (lo + hi)
        d2 = (px - f0) ** 2 + (py - f1) ** 2 + (pz - f2) ** 2
        if d2 < best_d2:
            best_d2 = d2
            best_t = s
        prev_s = s

    return 0, best_t
