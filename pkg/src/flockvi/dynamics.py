"""Continuous-time model: quartic edge potentials plus velocity-consensus damping.

Stacked vectors are agent-major: the coordinates of agent 1 come first,
then agent 2, and so on, so a configuration of s agents in R^n is a flat
array of length n*s. The model is, per agent i,

    a_i = - sum_{j in N_i} [ G_ij (q_i - q_j) + (v_i - v_j) ]

with G_ij = ||q_i - q_j||^2 - d_ij^2, i.e. in stacked form
a = -grad V(q) - (L (x) I_n) v. This is dissipative: the total energy
decays at rate v^T (L (x) I_n) v >= 0 until velocity consensus is reached.
"""

from __future__ import annotations

import numpy as np

from .graph import FormationGraph, neighbors


def _as_blocks(q: np.ndarray, graph: FormationGraph) -> np.ndarray:
    """Views a stacked vector as an (s, n) block matrix, validating shape."""
    q = np.asarray(q, dtype=np.float64)
    if q.ndim != 1 or q.size % graph.agent_count != 0 or q.size == 0:
        raise ValueError(
            f"stacked vector of length {q.size} does not split over {graph.agent_count} agents"
        )
    return q.reshape(graph.agent_count, -1)


def pair_potential(qi, qj, dij: float) -> float:
    """Edge potential 1/4 (||qi - qj||^2 - dij^2)^2, zero at the desired distance."""
    rel = np.asarray(qi, dtype=np.float64) - np.asarray(qj, dtype=np.float64)
    g = float(rel @ rel) - dij * dij
    return 0.25 * g * g


def pair_gradient(qi, qj, dij: float) -> np.ndarray:
    """Gradient of pair_potential with respect to qi: G_ij (qi - qj)."""
    rel = np.asarray(qi, dtype=np.float64) - np.asarray(qj, dtype=np.float64)
    g = float(rel @ rel) - dij * dij
    return g * rel


def stacked_gamma(q: np.ndarray, graph: FormationGraph) -> np.ndarray:
    """Stacked gradient of the total potential sum over edges of V_ij.

    Each edge contributes +G_ij (q_i - q_j) to its tail block and the
    negated vector to its head block, so the blocks sum to zero
    (action equals reaction) up to rounding.
    """
    pos = _as_blocks(q, graph)
    rel = pos[graph.tails] - pos[graph.heads]
    gam = np.einsum("ed,ed->e", rel, rel) - graph.lengths * graph.lengths
    contrib = gam[:, None] * rel
    out = np.zeros_like(pos)
    np.add.at(out, graph.tails, contrib)
    np.subtract.at(out, graph.heads, contrib)
    return out.reshape(-1)


def accelerations(q: np.ndarray, v: np.ndarray, graph: FormationGraph) -> np.ndarray:
    """Stacked accelerations -grad V(q) - (L (x) I_n) v of the forced dynamics."""
    pos = _as_blocks(q, graph)
    vel = _as_blocks(v, graph)
    if vel.shape != pos.shape:
        raise ValueError(f"position shape {pos.shape} != velocity shape {vel.shape}")
    return -stacked_gamma(q, graph) - (graph.laplacian @ vel).reshape(-1)


def agent_energy(agent: int, q: np.ndarray, v: np.ndarray, graph: FormationGraph) -> float:
    """Energy of one agent: 1/2 ||v_i||^2 + 1/2 sum over neighbors of V_ij."""
    pos = _as_blocks(q, graph)
    vel = _as_blocks(v, graph)
    i = agent - 1
    kinetic = 0.5 * float(vel[i] @ vel[i])
    potential = 0.0
    for j in neighbors(graph, agent):
        dij = next(d for a, b, d in graph.edges if {a, b} == {agent, j})
        potential += 0.5 * pair_potential(pos[i], pos[j - 1], dij)
    return kinetic + potential


def total_energy(q: np.ndarray, v: np.ndarray, graph: FormationGraph) -> float:
    """Sum of agent_energy over all agents: kinetic energy plus one V_ij per edge."""
    return sum(agent_energy(i, q, v, graph) for i in range(1, graph.agent_count + 1))
