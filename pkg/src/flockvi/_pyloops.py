"""Pure-numpy stepping kernels (fallback backend).

Signatures mirror the compiled kernels in ``_fastloops``; callers go
through ``flockvi.backend`` and never import this module directly.
All inputs are float64 and C-contiguous; ``rec_*`` output arrays are
preallocated by the caller with one row per recorded step (step 0, every
``record_every``-th step, and the final step).
"""

from __future__ import annotations

import numpy as np

COMPILED = False


def _gamma_blocks(pos, tails, heads, d2):
    rel = pos[tails] - pos[heads]
    gam = np.einsum("ed,ed->e", rel, rel) - d2
    contrib = gam[:, None] * rel
    out = np.zeros_like(pos)
    np.add.at(out, tails, contrib)
    np.subtract.at(out, heads, contrib)
    return out


def _recorded(k, nsteps, every):
    return k % every == 0 or k == nsteps


def vi_run(q0, q1, inv_a, mat_b, beta, tails, heads, d2, nsteps, every, rec_q, rec_qn):
    """Two-step variational update: (I + aL) q_{k+1} = 2 q_k - (I - aL) q_{k-1} - b Gamma(q_k).

    ``inv_a`` is the precomputed inverse of (I_s + a L) and ``mat_b`` is
    (I_s - a L); the (n s)-dimensional solve factors into s-dimensional
    solves applied per coordinate axis. Records the pair (q_k, q_{k+1})
    per recorded step, so one extra step beyond ``nsteps`` is evaluated.
    """
    s = inv_a.shape[0]
    prev = q0.reshape(s, -1).copy()
    curr = q1.reshape(s, -1).copy()
    rec_q[0] = prev.reshape(-1)
    rec_qn[0] = curr.reshape(-1)
    row = 1
    for k in range(1, nsteps + 1):
        rhs = 2.0 * curr - mat_b @ prev - beta * _gamma_blocks(curr, tails, heads, d2)
        prev, curr = curr, inv_a @ rhs
        if _recorded(k, nsteps, every):
            rec_q[row] = prev.reshape(-1)
            rec_qn[row] = curr.reshape(-1)
            row += 1


def _accel(pos, vel, lap, tails, heads, d2, damping, potential):
    return -potential * _gamma_blocks(pos, tails, heads, d2) - damping * (lap @ vel)


def euler_run(q0, v0, lap, tails, heads, d2, h, nsteps, every, damping, potential, rec_q, rec_v):
    """Explicit Euler on the first-order form: q += h v; v += h a(q, v)."""
    s = lap.shape[0]
    pos = q0.reshape(s, -1).copy()
    vel = v0.reshape(s, -1).copy()
    rec_q[0] = pos.reshape(-1)
    rec_v[0] = vel.reshape(-1)
    row = 1
    for k in range(1, nsteps + 1):
        acc = _accel(pos, vel, lap, tails, heads, d2, damping, potential)
        pos = pos + h * vel
        vel = vel + h * acc
        if _recorded(k, nsteps, every):
            rec_q[row] = pos.reshape(-1)
            rec_v[row] = vel.reshape(-1)
            row += 1


def rk4_run(q0, v0, lap, tails, heads, d2, h, nsteps, every, damping, potential, rec_q, rec_v):
    """Classical 4th-order one-step method on the first-order form."""
    s = lap.shape[0]
    pos = q0.reshape(s, -1).copy()
    vel = v0.reshape(s, -1).copy()
    rec_q[0] = pos.reshape(-1)
    rec_v[0] = vel.reshape(-1)
    row = 1
    for k in range(1, nsteps + 1):
        k1q = vel
        k1v = _accel(pos, vel, lap, tails, heads, d2, damping, potential)
        k2q = vel + 0.5 * h * k1v
        k2v = _accel(pos + 0.5 * h * k1q, k2q, lap, tails, heads, d2, damping, potential)
        k3q = vel + 0.5 * h * k2v
        k3v = _accel(pos + 0.5 * h * k2q, k3q, lap, tails, heads, d2, damping, potential)
        k4q = vel + h * k3v
        k4v = _accel(pos + h * k3q, k4q, lap, tails, heads, d2, damping, potential)
        pos = pos + (h / 6.0) * (k1q + 2.0 * k2q + 2.0 * k3q + k4q)
        vel = vel + (h / 6.0) * (k1v + 2.0 * k2v + 2.0 * k3v + k4v)
        if _recorded(k, nsteps, every):
            rec_q[row] = pos.reshape(-1)
            rec_v[row] = vel.reshape(-1)
            row += 1
