"""Compiled stepping kernels (hot loops).

Semantics match ``flockvi._pyloops`` exactly; that module is the readable
reference. Everything here works on flat agent-major float64 arrays.
"""

import numpy as np

COMPILED = True


cdef inline void _gamma_flat(const double[::1] pos, const long[::1] tails, const long[::1] heads,
                             const double[::1] d2, Py_ssize_t n, double[::1] out) noexcept:
    cdef Py_ssize_t e, a, i, j
    cdef double g, r
    for a in range(out.shape[0]):
        out[a] = 0.0
    for e in range(tails.shape[0]):
        i = tails[e]
        j = heads[e]
        g = 0.0
        for a in range(n):
            r = pos[i * n + a] - pos[j * n + a]
            g += r * r
        g -= d2[e]
        for a in range(n):
            r = pos[i * n + a] - pos[j * n + a]
            out[i * n + a] += g * r
            out[j * n + a] -= g * r


cdef inline void _blockmul(const double[:, ::1] mat, const double[::1] vec, Py_ssize_t s,
                           Py_ssize_t n, double[::1] out) noexcept:
    # out = (mat (x) I_n) vec, i.e. the s x s matrix applied per coordinate axis
    cdef Py_ssize_t i, j, a
    cdef double acc
    for i in range(s):
        for a in range(n):
            acc = 0.0
            for j in range(s):
                acc += mat[i, j] * vec[j * n + a]
            out[i * n + a] = acc


cdef inline void _accel_flat(const double[::1] pos, const double[::1] vel, const double[:, ::1] lap,
                             const long[::1] tails, const long[::1] heads, const double[::1] d2,
                             Py_ssize_t s, Py_ssize_t n, double damping, double potential,
                             double[::1] gbuf, double[::1] out) noexcept:
    cdef Py_ssize_t i, j, a
    cdef double acc
    _gamma_flat(pos, tails, heads, d2, n, gbuf)
    for i in range(s):
        for a in range(n):
            acc = 0.0
            for j in range(s):
                acc += lap[i, j] * vel[j * n + a]
            out[i * n + a] = -potential * gbuf[i * n + a] - damping * acc


def vi_run(const double[::1] q0, const double[::1] q1, const double[:, ::1] inv_a,
           const double[:, ::1] mat_b,
           double beta, const long[::1] tails, const long[::1] heads, const double[::1] d2,
           Py_ssize_t nsteps, Py_ssize_t every,
           double[:, ::1] rec_q, double[:, ::1] rec_qn):
    cdef Py_ssize_t s = inv_a.shape[0]
    cdef Py_ssize_t ns = q0.shape[0]
    cdef Py_ssize_t n = ns // s
    cdef Py_ssize_t k, a, row
    cdef double[::1] prev = np.array(q0, dtype=np.float64)
    cdef double[::1] curr = np.array(q1, dtype=np.float64)
    cdef double[::1] nxt = np.empty(ns, dtype=np.float64)
    cdef double[::1] gbuf = np.empty(ns, dtype=np.float64)
    cdef double[::1] rhs = np.empty(ns, dtype=np.float64)
    cdef double[::1] tmp
    for a in range(ns):
        rec_q[0, a] = prev[a]
        rec_qn[0, a] = curr[a]
    row = 1
    for k in range(1, nsteps + 1):
        _gamma_flat(curr, tails, heads, d2, n, gbuf)
        _blockmul(mat_b, prev, s, n, rhs)
        for a in range(ns):
            rhs[a] = 2.0 * curr[a] - rhs[a] - beta * gbuf[a]
        _blockmul(inv_a, rhs, s, n, nxt)
        tmp = prev
        prev = curr
        curr = nxt
        nxt = tmp
        if k % every == 0 or k == nsteps:
            for a in range(ns):
                rec_q[row, a] = prev[a]
                rec_qn[row, a] = curr[a]
            row += 1


def euler_run(const double[::1] q0, const double[::1] v0, const double[:, ::1] lap,
              const long[::1] tails, const long[::1] heads, const double[::1] d2,
              double h, Py_ssize_t nsteps, Py_ssize_t every,
              double damping, double potential,
              double[:, ::1] rec_q, double[:, ::1] rec_v):
    cdef Py_ssize_t s = lap.shape[0]
    cdef Py_ssize_t ns = q0.shape[0]
    cdef Py_ssize_t n = ns // s
    cdef Py_ssize_t k, a, row
    cdef double[::1] pos = np.array(q0, dtype=np.float64)
    cdef double[::1] vel = np.array(v0, dtype=np.float64)
    cdef double[::1] acc = np.empty(ns, dtype=np.float64)
    cdef double[::1] gbuf = np.empty(ns, dtype=np.float64)
    for a in range(ns):
        rec_q[0, a] = pos[a]
        rec_v[0, a] = vel[a]
    row = 1
    for k in range(1, nsteps + 1):
        _accel_flat(pos, vel, lap, tails, heads, d2, s, n, damping, potential, gbuf, acc)
        for a in range(ns):
            pos[a] += h * vel[a]
            vel[a] += h * acc[a]
        if k % every == 0 or k == nsteps:
            for a in range(ns):
                rec_q[row, a] = pos[a]
                rec_v[row, a] = vel[a]
            row += 1


def rk4_run(const double[::1] q0, const double[::1] v0, const double[:, ::1] lap,
            const long[::1] tails, const long[::1] heads, const double[::1] d2,
            double h, Py_ssize_t nsteps, Py_ssize_t every,
            double damping, double potential,
            double[:, ::1] rec_q, double[:, ::1] rec_v):
    cdef Py_ssize_t s = lap.shape[0]
    cdef Py_ssize_t ns = q0.shape[0]
    cdef Py_ssize_t n = ns // s
    cdef Py_ssize_t k, a, row
    cdef double[::1] pos = np.array(q0, dtype=np.float64)
    cdef double[::1] vel = np.array(v0, dtype=np.float64)
    cdef double[::1] gbuf = np.empty(ns, dtype=np.float64)
    cdef double[::1] qs = np.empty(ns, dtype=np.float64)
    cdef double[::1] k1v = np.empty(ns, dtype=np.float64)
    cdef double[::1] k2q = np.empty(ns, dtype=np.float64)
    cdef double[::1] k2v = np.empty(ns, dtype=np.float64)
    cdef double[::1] k3q = np.empty(ns, dtype=np.float64)
    cdef double[::1] k3v = np.empty(ns, dtype=np.float64)
    cdef double[::1] k4q = np.empty(ns, dtype=np.float64)
    cdef double[::1] k4v = np.empty(ns, dtype=np.float64)
    for a in range(ns):
        rec_q[0, a] = pos[a]
        rec_v[0, a] = vel[a]
    row = 1
    for k in range(1, nsteps + 1):
        # stage 1: slopes at (pos, vel); the q-slope of each stage equals its velocity
        _accel_flat(pos, vel, lap, tails, heads, d2, s, n, damping, potential, gbuf, k1v)
        # stage 2
        for a in range(ns):
            k2q[a] = vel[a] + 0.5 * h * k1v[a]
            qs[a] = pos[a] + 0.5 * h * vel[a]
        _accel_flat(qs, k2q, lap, tails, heads, d2, s, n, damping, potential, gbuf, k2v)
        # stage 3
        for a in range(ns):
            k3q[a] = vel[a] + 0.5 * h * k2v[a]
            qs[a] = pos[a] + 0.5 * h * k2q[a]
        _accel_flat(qs, k3q, lap, tails, heads, d2, s, n, damping, potential, gbuf, k3v)
        # stage 4
        for a in range(ns):
            k4q[a] = vel[a] + h * k3v[a]
            qs[a] = pos[a] + h * k3q[a]
        _accel_flat(qs, k4q, lap, tails, heads, d2, s, n, damping, potential, gbuf, k4v)
        for a in range(ns):
            pos[a] += (h / 6.0) * (vel[a] + 2.0 * k2q[a] + 2.0 * k3q[a] + k4q[a])
            vel[a] += (h / 6.0) * (k1v[a] + 2.0 * k2v[a] + 2.0 * k3v[a] + k4v[a])
        if k % every == 0 or k == nsteps:
            for a in range(ns):
                rec_q[row, a] = pos[a]
                rec_v[row, a] = vel[a]
            row += 1
