"""Formation graph: an undirected, distance-labelled agent graph.

Agents are numbered 1..s. Each edge (i, j, d_ij) carries the desired
distance d_ij > 0 between its endpoints. The graph owns the incidence
matrix B (s x |E|, one +1 and one -1 per column) and the Laplacian
L = B B^T used by the consensus dynamics.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

import numpy as np


class GraphError(ValueError):
    """Base class for formation-graph validation failures."""


class SelfLoopError(GraphError):
    pass


class DuplicateEdgeError(GraphError):
    pass


class AgentIndexError(GraphError):
    pass


class NonPositiveDistanceError(GraphError):
    pass


class DisconnectedGraphError(GraphError):
    pass


@dataclass(frozen=True, eq=False)
class FormationGraph:
    """Validated, immutable formation graph.

    Edge orientation is normalized to tail = smaller agent index so the
    incidence matrix is deterministic (the Laplacian L = B B^T does not
    depend on orientation). All arrays are read-only; instances can be
    shared freely across concurrent simulation runs.

    Attributes:
        agent_count: number of agents s.
        edges: tuple of (i, j, d_ij) with 1 <= i < j <= s, in input order.
        incidence: (s, |E|) array with +1 at the tail, -1 at the head.
        laplacian: (s, s) array, equals incidence @ incidence.T.
        tails, heads: 0-based endpoint indices per edge (kernel layout).
        lengths: desired distance per edge.
    """

    agent_count: int
    edges: tuple[tuple[int, int, float], ...]
    incidence: np.ndarray
    laplacian: np.ndarray
    tails: np.ndarray
    heads: np.ndarray
    lengths: np.ndarray

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    def __repr__(self) -> str:
        return f"FormationGraph(agents={self.agent_count}, edges={self.edge_count})"


def _check_connected(agent_count: int, tails: np.ndarray, heads: np.ndarray) -> bool:
    """Breadth-first reachability from agent 0 over undirected edges."""
    if agent_count <= 1:
        return True
    adj: list[list[int]] = [[] for _ in range(agent_count)]
    for a, b in zip(tails, heads):
        adj[a].append(b)
        adj[b].append(a)
    seen = [False] * agent_count
    seen[0] = True
    queue = deque([0])
    count = 1
    while queue:
        u = queue.popleft()
        for w in adj[u]:
            if not seen[w]:
                seen[w] = True
                count += 1
                queue.append(w)
    return count == agent_count


def build_graph(agent_count: int, edges) -> FormationGraph:
    """Builds and validates a FormationGraph.

    Args:
        agent_count: number of agents s >= 1.
        edges: iterable of (i, j, d_ij) with 1-based agent indices and
            d_ij > 0. Pairs are normalized so the tail is the smaller index.

    Raises:
        SelfLoopError, DuplicateEdgeError, AgentIndexError,
        NonPositiveDistanceError, DisconnectedGraphError.
    """
    if not isinstance(agent_count, (int, np.integer)) or agent_count < 1:
        raise AgentIndexError(f"agent_count must be a positive integer, got {agent_count!r}")
    norm: list[tuple[int, int, float]] = []
    seen: set[tuple[int, int]] = set()
    for edge in edges:
        i, j, d = edge
        i, j = int(i), int(j)
        if i == j:
            raise SelfLoopError(f"edge ({i}, {j}) is a self loop")
        if not (1 <= i <= agent_count) or not (1 <= j <= agent_count):
            raise AgentIndexError(
                f"edge ({i}, {j}) references an agent outside 1..{agent_count}"
            )
        if i > j:
            i, j = j, i
        if (i, j) in seen:
            raise DuplicateEdgeError(f"duplicate edge ({i}, {j})")
        seen.add((i, j))
        d = float(d)
        if not d > 0.0:
            raise NonPositiveDistanceError(f"edge ({i}, {j}) has non-positive distance {d}")
        norm.append((i, j, d))

    tails = np.array([i - 1 for i, _, _ in norm], dtype=np.int64)
    heads = np.array([j - 1 for _, j, _ in norm], dtype=np.int64)
    lengths = np.array([d for _, _, d in norm], dtype=np.float64)

    if not _check_connected(agent_count, tails, heads):
        raise DisconnectedGraphError(
            f"graph with {agent_count} agents and {len(norm)} edges is not connected"
        )

    incidence = np.zeros((agent_count, len(norm)), dtype=np.float64)
    for k, (a, b) in enumerate(zip(tails, heads)):
        incidence[a, k] = 1.0
        incidence[b, k] = -1.0
    laplacian = incidence @ incidence.T

    for arr in (incidence, laplacian, tails, heads, lengths):
        arr.setflags(write=False)

    return FormationGraph(
        agent_count=int(agent_count),
        edges=tuple(norm),
        incidence=incidence,
        laplacian=laplacian,
        tails=tails,
        heads=heads,
        lengths=lengths,
    )


def inflated_laplacian(graph: FormationGraph, dim: int) -> np.ndarray:
    """Kronecker product L (x) I_dim acting on agent-major stacked vectors."""
    if dim < 1:
        raise ValueError(f"dim must be positive, got {dim}")
    return np.kron(graph.laplacian, np.eye(dim))


def neighbors(graph: FormationGraph, agent: int) -> set[int]:
    """Set of 1-based agent indices adjacent to ``agent``."""
    if not (1 <= agent <= graph.agent_count):
        raise AgentIndexError(f"agent {agent} outside 1..{graph.agent_count}")
    out: set[int] = set()
    for i, j, _ in graph.edges:
        if i == agent:
            out.add(j)
        elif j == agent:
            out.add(i)
    return out
