"""Per-step diagnostics: discrete energies, shape errors, consensus metrics.

All step diagnostics derive from a pair of consecutive configurations
(q_k, q_{k+1}); the discrete velocity convention is the forward
difference (q_{k+1} - q_k) / h throughout.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .graph import FormationGraph, neighbors


@dataclass(frozen=True)
class StepDiagnostics:
    """Diagnostics of one recorded step."""

    time: float
    per_agent_discrete_energy: np.ndarray
    total_discrete_energy: float
    edge_errors: np.ndarray
    velocity_disagreement: float
    momentum: np.ndarray


@dataclass(frozen=True)
class TrajectoryDiagnostics:
    """Columnar diagnostics over all recorded steps of a run."""

    energies: np.ndarray       # (rows, s)
    total_energy: np.ndarray   # (rows,)
    edge_errors: np.ndarray    # (rows, |E|)
    disagreement: np.ndarray   # (rows,)
    momentum: np.ndarray       # (rows, n)


def discrete_energy(agent: int, q_k: np.ndarray, q_next: np.ndarray,
                    graph: FormationGraph, h: float) -> float:
    """Trapezoidal discrete energy of one agent over the step [t_k, t_k + h]:

        (1/2h) ||q_{k+1}^i - q_k^i||^2
            + (h/4) sum over neighbors of (||q_k^i - q_k^j||^2 - d_ij^2)^2.

    Note this scales as h times the continuous energy; divide by h to
    compare against ``dynamics.agent_energy``.
    """
    s = graph.agent_count
    pos = np.asarray(q_k, dtype=np.float64).reshape(s, -1)
    nxt = np.asarray(q_next, dtype=np.float64).reshape(s, -1)
    i = agent - 1
    delta = nxt[i] - pos[i]
    kinetic = float(delta @ delta) / (2.0 * h)
    potential = 0.0
    for j in neighbors(graph, agent):
        dij = next(d for a, b, d in graph.edges if {a, b} == {agent, j})
        rel = pos[i] - pos[j - 1]
        g = float(rel @ rel) - dij * dij
        potential += (h / 4.0) * g * g
    return kinetic + potential


def edge_errors(q: np.ndarray, graph: FormationGraph) -> np.ndarray:
    """Signed distance errors ||q_i - q_j|| - d_ij per edge, in graph edge order."""
    pos = np.asarray(q, dtype=np.float64).reshape(graph.agent_count, -1)
    rel = pos[graph.tails] - pos[graph.heads]
    return np.sqrt(np.einsum("ed,ed->e", rel, rel)) - graph.lengths


def velocity_disagreement(v: np.ndarray, agent_count: int) -> float:
    """Max pairwise velocity difference; zero certifies exact consensus."""
    vel = np.asarray(v, dtype=np.float64).reshape(agent_count, -1)
    diff = vel[:, None, :] - vel[None, :, :]
    return float(np.sqrt(np.einsum("ijd,ijd->ij", diff, diff).max()))


def momentum(q_k: np.ndarray, q_next: np.ndarray, h: float, agent_count: int) -> np.ndarray:
    """Total linear momentum of the step: (1/h) sum over agents of (q_{k+1}^i - q_k^i)."""
    delta = (np.asarray(q_next, dtype=np.float64) - np.asarray(q_k, dtype=np.float64))
    return delta.reshape(agent_count, -1).sum(axis=0) / h


def trajectory_diagnostics(rec_q: np.ndarray, rec_qn: np.ndarray,
                           graph: FormationGraph, h: float) -> TrajectoryDiagnostics:
    """Vectorized diagnostics for a whole recorded trajectory.

    ``rec_q`` holds q_k per row and ``rec_qn`` the configuration one step
    later, so the energies follow the same forward-difference convention
    as ``discrete_energy``.
    """
    s = graph.agent_count
    rows = rec_q.shape[0]
    pos = rec_q.reshape(rows, s, -1)
    nxt = rec_qn.reshape(rows, s, -1)

    rel = pos[:, graph.tails, :] - pos[:, graph.heads, :]
    norm2 = np.einsum("red,red->re", rel, rel)
    gam = norm2 - graph.lengths * graph.lengths

    delta = nxt - pos
    kinetic = np.einsum("rid,rid->ri", delta, delta) / (2.0 * h)
    incident = np.abs(graph.incidence)  # (s, |E|): 1 where the edge touches the agent
    energies = kinetic + (h / 4.0) * (gam * gam) @ incident.T
    total = energies.sum(axis=1)

    errors = np.sqrt(norm2) - graph.lengths

    vel = delta / h
    diff = vel[:, :, None, :] - vel[:, None, :, :]
    disagreement = np.sqrt(np.einsum("rijd,rijd->rij", diff, diff).max(axis=(1, 2)))

    mom = delta.sum(axis=1) / h
    return TrajectoryDiagnostics(
        energies=energies,
        total_energy=total,
        edge_errors=errors,
        disagreement=disagreement,
        momentum=mom,
    )


def energy_decay_slope(times: np.ndarray, total_energy: np.ndarray) -> float:
    """Fitted slope of ln(total energy) vs time over the actively-decaying stretch.

    The window starts after the first 1% of steps (startup transient) and
    ends where the energy first comes within a factor 2 of its final
    value, i.e. before the consensus plateau dominates the fit. Returns
    nan when the energy is not strictly positive on the window.
    """
    m = len(times)
    if m < 3:
        return float("nan")
    k1 = max(1, m // 100)
    tail = np.nonzero(total_energy[k1:] <= 2.0 * total_energy[-1])[0]
    k2 = (k1 + int(tail[0])) if len(tail) else (m - 1)
    if k2 - k1 < 2:
        k2 = m - 1
    window = slice(k1, k2 + 1)
    e = total_energy[window]
    if np.any(e <= 0.0):
        return float("nan")
    t = times[window]
    x = t - t.mean()
    y = np.log(e)
    return float((x @ (y - y.mean())) / (x @ x))
