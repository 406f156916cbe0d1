# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled integration kernels (hot loops of the five dynamical solvers).

Stage-for-stage mirror of spin_anneal.kernels_py: same RK4 structure, same
post-step maps, same divergence checks and recording points.  See that
module for the governing equations.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport cos, fabs, sin, tanh

COMPILED = True


cdef inline bint _bad(double v, double bound) noexcept nogil:
    # NaN fails the comparison, so it counts as divergent.
    return not (fabs(v) <= bound)


# ---------------------------------------------------------------------------
# vector annealer
# ---------------------------------------------------------------------------

cdef void _visa_rhs(double[:, ::1] W, double[:, ::1] x, double[::1] g,
                    double alpha, double eps, double P,
                    double[:, ::1] fx, double[::1] fg, double[::1] sq,
                    Py_ssize_t n) noexcept nogil:
    cdef Py_ssize_t i, j
    cdef double S = 0.0
    cdef double O00 = 0.0, O01 = 0.0, O02 = 0.0, O11 = 0.0, O12 = 0.0, O22 = 0.0
    cdef double a, w, c0, c1, c2, m0, m1, m2, x0, x1, x2
    for i in range(n):
        x0 = x[i, 0]; x1 = x[i, 1]; x2 = x[i, 2]
        sq[i] = x0 * x0 + x1 * x1 + x2 * x2
        S += sq[i]
        O00 += x0 * x0; O01 += x0 * x1; O02 += x0 * x2
        O11 += x1 * x1; O12 += x1 * x2; O22 += x2 * x2
    for i in range(n):
        c0 = 0.0; c1 = 0.0; c2 = 0.0
        for j in range(n):
            w = W[i, j]
            c0 += w * x[j, 0]; c1 += w * x[j, 1]; c2 += w * x[j, 2]
        x0 = x[i, 0]; x1 = x[i, 1]; x2 = x[i, 2]
        a = alpha * (g[i] - sq[i])
        fx[i, 0] = a * x0 + c0
        fx[i, 1] = a * x1 + c1
        fx[i, 2] = a * x2 + c2
        if P != 0.0:
            m0 = x0 * O00 + x1 * O01 + x2 * O02
            m1 = x0 * O01 + x1 * O11 + x2 * O12
            m2 = x0 * O02 + x1 * O12 + x2 * O22
            fx[i, 0] -= 2.0 * P * (S * x0 - m0)
            fx[i, 1] -= 2.0 * P * (S * x1 - m1)
            fx[i, 2] -= 2.0 * P * (S * x2 - m2)
        fg[i] = eps * (1.0 - sq[i])


def visa_integrate(double[:, ::1] W, double[:, ::1] x, double[::1] gamma,
                   double alpha, double eps, double[::1] p_half, double dt,
                   Py_ssize_t n_steps, double bound,
                   record_steps=None, traj=None):
    cdef Py_ssize_t n = x.shape[0]
    cdef double[:, ::1] xs = np.empty((n, 3))
    cdef double[::1] gs = np.empty(n)
    cdef double[::1] sq = np.empty(n)
    cdef double[:, ::1] k1x = np.empty((n, 3))
    cdef double[:, ::1] k2x = np.empty((n, 3))
    cdef double[:, ::1] k3x = np.empty((n, 3))
    cdef double[:, ::1] k4x = np.empty((n, 3))
    cdef double[::1] k1g = np.empty(n)
    cdef double[::1] k2g = np.empty(n)
    cdef double[::1] k3g = np.empty(n)
    cdef double[::1] k4g = np.empty(n)
    cdef long[::1] rs
    cdef double[:, ::1] tr
    cdef Py_ssize_t n_rec
    if record_steps is None:
        rs = np.empty(0, dtype=np.int64)
        tr = np.empty((0, 4 * n))
        n_rec = 0
    else:
        rs = record_steps
        tr = traj
        n_rec = rs.shape[0]
    cdef Py_ssize_t step, i, p, ptr = 0
    cdef double h = dt / 2.0, w6 = dt / 6.0
    cdef double P0, Pm, P1
    cdef bint div = 0
    with nogil:
        for step in range(n_steps):
            if ptr < n_rec and rs[ptr] == step:
                for i in range(n):
                    for p in range(3):
                        tr[ptr, 3 * i + p] = x[i, p]
                    tr[ptr, 3 * n + i] = gamma[i]
                ptr += 1
            P0 = p_half[2 * step]; Pm = p_half[2 * step + 1]; P1 = p_half[2 * step + 2]
            _visa_rhs(W, x, gamma, alpha, eps, P0, k1x, k1g, sq, n)
            for i in range(n):
                for p in range(3):
                    xs[i, p] = x[i, p] + h * k1x[i, p]
                gs[i] = gamma[i] + h * k1g[i]
            _visa_rhs(W, xs, gs, alpha, eps, Pm, k2x, k2g, sq, n)
            for i in range(n):
                for p in range(3):
                    xs[i, p] = x[i, p] + h * k2x[i, p]
                gs[i] = gamma[i] + h * k2g[i]
            _visa_rhs(W, xs, gs, alpha, eps, Pm, k3x, k3g, sq, n)
            for i in range(n):
                for p in range(3):
                    xs[i, p] = x[i, p] + dt * k3x[i, p]
                gs[i] = gamma[i] + dt * k3g[i]
            _visa_rhs(W, xs, gs, alpha, eps, P1, k4x, k4g, sq, n)
            for i in range(n):
                for p in range(3):
                    x[i, p] += w6 * (k1x[i, p] + 2.0 * k2x[i, p] + 2.0 * k3x[i, p] + k4x[i, p])
                    if _bad(x[i, p], bound):
                        div = 1
                gamma[i] += w6 * (k1g[i] + 2.0 * k2g[i] + 2.0 * k3g[i] + k4g[i])
            if div:
                break
        if not div and ptr < n_rec and rs[ptr] == n_steps:
            for i in range(n):
                for p in range(3):
                    tr[ptr, 3 * i + p] = x[i, p]
                tr[ptr, 3 * n + i] = gamma[i]
    if div:
        return 1, step + 1
    return 0, n_steps


# ---------------------------------------------------------------------------
# coherent Ising machine (plus manifold-reduction pull)
# ---------------------------------------------------------------------------

cdef void _cim_rhs(double[:, ::1] W, double[::1] x, double alpha, double p,
                   double[::1] f, Py_ssize_t n) noexcept nogil:
    cdef Py_ssize_t i, j
    cdef double c, xi
    for i in range(n):
        c = 0.0
        for j in range(n):
            c += W[i, j] * x[j]
        xi = x[i]
        f[i] = p * xi - xi * xi * xi + alpha * c


def cim_integrate(double[:, ::1] W, double[::1] x, double alpha,
                  double[::1] p_half, double delta, double floor, double dt,
                  Py_ssize_t n_steps, double bound,
                  record_steps=None, traj=None):
    cdef Py_ssize_t n = x.shape[0]
    cdef double[::1] xs = np.empty(n)
    cdef double[::1] k1 = np.empty(n)
    cdef double[::1] k2 = np.empty(n)
    cdef double[::1] k3 = np.empty(n)
    cdef double[::1] k4 = np.empty(n)
    cdef long[::1] rs
    cdef double[:, ::1] tr
    cdef Py_ssize_t n_rec
    if record_steps is None:
        rs = np.empty(0, dtype=np.int64)
        tr = np.empty((0, n))
        n_rec = 0
    else:
        rs = record_steps
        tr = traj
        n_rec = rs.shape[0]
    cdef Py_ssize_t step, i, ptr = 0
    cdef double h = dt / 2.0, w6 = dt / 6.0
    cdef double p0, pm, p1, R
    cdef bint div = 0
    with nogil:
        for step in range(n_steps):
            if ptr < n_rec and rs[ptr] == step:
                for i in range(n):
                    tr[ptr, i] = x[i]
                ptr += 1
            p0 = p_half[2 * step]; pm = p_half[2 * step + 1]; p1 = p_half[2 * step + 2]
            _cim_rhs(W, x, alpha, p0, k1, n)
            for i in range(n):
                xs[i] = x[i] + h * k1[i]
            _cim_rhs(W, xs, alpha, pm, k2, n)
            for i in range(n):
                xs[i] = x[i] + h * k2[i]
            _cim_rhs(W, xs, alpha, pm, k3, n)
            for i in range(n):
                xs[i] = x[i] + dt * k3[i]
            _cim_rhs(W, xs, alpha, p1, k4, n)
            for i in range(n):
                x[i] += w6 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i])
            if delta > 0.0:
                R = 0.0
                for i in range(n):
                    R += x[i] * x[i]
                R /= n
                for i in range(n):
                    if fabs(x[i]) > floor:
                        if x[i] >= 0.0:
                            x[i] = (1.0 - delta) * x[i] + delta * R
                        else:
                            x[i] = (1.0 - delta) * x[i] - delta * R
            for i in range(n):
                if _bad(x[i], bound):
                    div = 1
            if div:
                break
        if not div and ptr < n_rec and rs[ptr] == n_steps:
            for i in range(n):
                tr[ptr, i] = x[i]
    if div:
        return 1, step + 1
    return 0, n_steps


# ---------------------------------------------------------------------------
# momentum Hopfield-Tank
# ---------------------------------------------------------------------------

cdef void _meht_drive(double[:, ::1] W, double[::1] x, double alpha,
                      double beta, double[::1] g, double[::1] drive,
                      Py_ssize_t n) noexcept nogil:
    cdef Py_ssize_t i, j
    cdef double c
    for i in range(n):
        g[i] = tanh(x[i])
    for i in range(n):
        c = 0.0
        for j in range(n):
            c += W[i, j] * g[j]
        drive[i] = beta * x[i] + alpha * c


def meht_integrate(double[:, ::1] W, double[::1] x, double[::1] v,
                   double alpha, double mass, double damping,
                   double[::1] beta_half, bint clip, double dt,
                   Py_ssize_t n_steps, double bound,
                   record_steps=None, traj=None):
    cdef Py_ssize_t n = x.shape[0]
    cdef double[::1] xs = np.empty(n)
    cdef double[::1] vs = np.empty(n)
    cdef double[::1] g = np.empty(n)
    cdef double[::1] dr = np.empty(n)
    cdef double[::1] k1x = np.empty(n)
    cdef double[::1] k2x = np.empty(n)
    cdef double[::1] k3x = np.empty(n)
    cdef double[::1] k4x = np.empty(n)
    cdef double[::1] k1v = np.empty(n)
    cdef double[::1] k2v = np.empty(n)
    cdef double[::1] k3v = np.empty(n)
    cdef double[::1] k4v = np.empty(n)
    cdef long[::1] rs
    cdef double[:, ::1] tr
    cdef Py_ssize_t n_rec
    if record_steps is None:
        rs = np.empty(0, dtype=np.int64)
        tr = np.empty((0, 2 * n))
        n_rec = 0
    else:
        rs = record_steps
        tr = traj
        n_rec = rs.shape[0]
    cdef bint first_order = mass == 0.0
    cdef Py_ssize_t step, i, ptr = 0
    cdef double h = dt / 2.0, w6 = dt / 6.0
    cdef double b0, bm, b1
    cdef bint div = 0
    with nogil:
        for step in range(n_steps):
            if ptr < n_rec and rs[ptr] == step:
                for i in range(n):
                    tr[ptr, i] = x[i]
                    tr[ptr, n + i] = v[i]
                ptr += 1
            b0 = beta_half[2 * step]; bm = beta_half[2 * step + 1]; b1 = beta_half[2 * step + 2]
            if first_order:
                _meht_drive(W, x, alpha, b0, g, dr, n)
                for i in range(n):
                    k1x[i] = dr[i] / damping
                    xs[i] = x[i] + h * k1x[i]
                _meht_drive(W, xs, alpha, bm, g, dr, n)
                for i in range(n):
                    k2x[i] = dr[i] / damping
                    xs[i] = x[i] + h * k2x[i]
                _meht_drive(W, xs, alpha, bm, g, dr, n)
                for i in range(n):
                    k3x[i] = dr[i] / damping
                    xs[i] = x[i] + dt * k3x[i]
                _meht_drive(W, xs, alpha, b1, g, dr, n)
                for i in range(n):
                    k4x[i] = dr[i] / damping
                    x[i] += w6 * (k1x[i] + 2.0 * k2x[i] + 2.0 * k3x[i] + k4x[i])
            else:
                _meht_drive(W, x, alpha, b0, g, dr, n)
                for i in range(n):
                    k1x[i] = v[i]
                    k1v[i] = (dr[i] - damping * v[i]) / mass
                    xs[i] = x[i] + h * k1x[i]
                    vs[i] = v[i] + h * k1v[i]
                _meht_drive(W, xs, alpha, bm, g, dr, n)
                for i in range(n):
                    k2x[i] = vs[i]
                    k2v[i] = (dr[i] - damping * vs[i]) / mass
                    xs[i] = x[i] + h * k2x[i]
                    vs[i] = v[i] + h * k2v[i]
                _meht_drive(W, xs, alpha, bm, g, dr, n)
                for i in range(n):
                    k3x[i] = vs[i]
                    k3v[i] = (dr[i] - damping * vs[i]) / mass
                    xs[i] = x[i] + dt * k3x[i]
                    vs[i] = v[i] + dt * k3v[i]
                _meht_drive(W, xs, alpha, b1, g, dr, n)
                for i in range(n):
                    k4x[i] = vs[i]
                    k4v[i] = (dr[i] - damping * vs[i]) / mass
                    x[i] += w6 * (k1x[i] + 2.0 * k2x[i] + 2.0 * k3x[i] + k4x[i])
                    v[i] += w6 * (k1v[i] + 2.0 * k2v[i] + 2.0 * k3v[i] + k4v[i])
            if clip:
                for i in range(n):
                    if fabs(x[i]) > 1.0:
                        x[i] = 1.0 if x[i] >= 0.0 else -1.0
            for i in range(n):
                if _bad(x[i], bound):
                    div = 1
            if div:
                break
        if not div and ptr < n_rec and rs[ptr] == n_steps:
            for i in range(n):
                tr[ptr, i] = x[i]
                tr[ptr, n + i] = v[i]
    if div:
        return 1, step + 1
    return 0, n_steps


# ---------------------------------------------------------------------------
# spin-vector Langevin
# ---------------------------------------------------------------------------

cdef void _svl_grad(double[:, ::1] W, double[::1] theta, double A, double B,
                    double[::1] s, double[::1] out, Py_ssize_t n) noexcept nogil:
    cdef Py_ssize_t i, j
    cdef double c
    for i in range(n):
        s[i] = sin(theta[i])
    for i in range(n):
        c = 0.0
        for j in range(n):
            c += W[i, j] * s[j]
        out[i] = A * s[i] - B * cos(theta[i]) * c


def svl_integrate(double[:, ::1] W, double[::1] theta, double[::1] v,
                  double alpha, double mass, double damping,
                  double[::1] a_half, double[::1] b_half, noise, double dt,
                  Py_ssize_t n_steps, double bound,
                  record_steps=None, traj=None):
    cdef Py_ssize_t n = theta.shape[0]
    cdef double[::1] s = np.empty(n)
    cdef double[::1] gr = np.empty(n)
    cdef double[::1] t2 = np.empty(n)
    cdef double[::1] t3 = np.empty(n)
    cdef double[::1] t4 = np.empty(n)
    cdef double[::1] v2 = np.empty(n)
    cdef double[::1] v3 = np.empty(n)
    cdef double[::1] v4 = np.empty(n)
    cdef double[::1] k1v = np.empty(n)
    cdef double[::1] k2v = np.empty(n)
    cdef double[::1] k3v = np.empty(n)
    cdef double[::1] k4v = np.empty(n)
    cdef long[::1] rs
    cdef double[:, ::1] tr
    cdef Py_ssize_t n_rec
    if record_steps is None:
        rs = np.empty(0, dtype=np.int64)
        tr = np.empty((0, 2 * n))
        n_rec = 0
    else:
        rs = record_steps
        tr = traj
        n_rec = rs.shape[0]
    cdef bint has_noise = noise is not None
    cdef double[:, ::1] xi
    if has_noise:
        xi = noise
    else:
        xi = np.empty((0, n))
    cdef Py_ssize_t step, i, ptr = 0
    cdef double h = dt / 2.0, w6 = dt / 6.0
    cdef double A0, Am, A1, B0, Bm, B1
    cdef bint div = 0
    with nogil:
        for step in range(n_steps):
            if ptr < n_rec and rs[ptr] == step:
                for i in range(n):
                    tr[ptr, i] = theta[i]
                    tr[ptr, n + i] = v[i]
                ptr += 1
            A0 = a_half[2 * step]; Am = a_half[2 * step + 1]; A1 = a_half[2 * step + 2]
            B0 = b_half[2 * step]; Bm = b_half[2 * step + 1]; B1 = b_half[2 * step + 2]
            if has_noise:
                _svl_grad(W, theta, A0, B0, s, gr, n)
                for i in range(n):
                    theta[i] += dt * v[i]
                    v[i] += dt * (-(damping * v[i] + alpha * gr[i]) / mass) + xi[step, i] / mass
            else:
                _svl_grad(W, theta, A0, B0, s, gr, n)
                for i in range(n):
                    k1v[i] = -(damping * v[i] + alpha * gr[i]) / mass
                    t2[i] = theta[i] + h * v[i]
                    v2[i] = v[i] + h * k1v[i]
                _svl_grad(W, t2, Am, Bm, s, gr, n)
                for i in range(n):
                    k2v[i] = -(damping * v2[i] + alpha * gr[i]) / mass
                    t3[i] = theta[i] + h * v2[i]
                    v3[i] = v[i] + h * k2v[i]
                _svl_grad(W, t3, Am, Bm, s, gr, n)
                for i in range(n):
                    k3v[i] = -(damping * v3[i] + alpha * gr[i]) / mass
                    t4[i] = theta[i] + dt * v3[i]
                    v4[i] = v[i] + dt * k3v[i]
                _svl_grad(W, t4, A1, B1, s, gr, n)
                for i in range(n):
                    k4v[i] = -(damping * v4[i] + alpha * gr[i]) / mass
                    theta[i] += w6 * (v[i] + 2.0 * v2[i] + 2.0 * v3[i] + v4[i])
                    v[i] += w6 * (k1v[i] + 2.0 * k2v[i] + 2.0 * k3v[i] + k4v[i])
            for i in range(n):
                if _bad(v[i], bound):
                    div = 1
            if div:
                break
        if not div and ptr < n_rec and rs[ptr] == n_steps:
            for i in range(n):
                tr[ptr, i] = theta[i]
                tr[ptr, n + i] = v[i]
    if div:
        return 1, step + 1
    return 0, n_steps
