"""Scenario documents, built-in presets, and trajectory serialization.

Scenario files are single JSON objects in strict mode: unknown keys are
rejected, initial conditions are flat agent-major lists ([x1, y1, x2,
y2, ...] in the plane), and agent indices are 1-based. CSV output is
RFC-4180 style with full-precision floats (shortest representation that
round-trips), so identical runs serialize to identical bytes.
"""

from __future__ import annotations

import io
import json
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from .diagnostics import StepDiagnostics
from .graph import FormationGraph, GraphError, build_graph

INTEGRATORS = ("variational", "euler", "rk4")
VARIANTS = ("paper", "consistent")

_SCENARIO_FIELDS = (
    "dim", "agent_count", "edges", "initial_positions", "initial_velocities",
    "h", "steps", "integrator", "variant", "record_every",
)


class ScenarioError(ValueError):
    """Scenario document failed to parse or validate."""


class UnknownPresetError(ScenarioError):
    pass


@dataclass(frozen=True)
class Scenario:
    """Validated simulation setup; immutable and hashable.

    Initial conditions are stored as plain tuples so scenarios compare by
    value and survive a serialize/load round trip exactly.
    """

    dim: int
    agent_count: int
    edges: tuple[tuple[int, int, float], ...]
    initial_positions: tuple[float, ...]
    initial_velocities: tuple[float, ...]
    h: float
    steps: int
    integrator: str = "variational"
    variant: str = "paper"
    record_every: int = 1

    def __post_init__(self):
        if not isinstance(self.dim, int) or self.dim < 1:
            raise ScenarioError(f"dim: must be a positive integer, got {self.dim!r}")
        if not isinstance(self.agent_count, int) or self.agent_count < 1:
            raise ScenarioError(
                f"agent_count: must be a positive integer, got {self.agent_count!r}"
            )
        if not (isinstance(self.h, (int, float)) and self.h > 0):
            raise ScenarioError(f"h: must be a positive number, got {self.h!r}")
        if not isinstance(self.steps, int) or self.steps < 0:
            raise ScenarioError(f"steps: must be a non-negative integer, got {self.steps!r}")
        if not isinstance(self.record_every, int) or self.record_every < 1:
            raise ScenarioError(
                f"record_every: must be a positive integer, got {self.record_every!r}"
            )
        if self.integrator not in INTEGRATORS:
            raise ScenarioError(
                f"integrator: {self.integrator!r} not one of {INTEGRATORS}"
            )
        if self.variant not in VARIANTS:
            raise ScenarioError(f"variant: {self.variant!r} not one of {VARIANTS}")
        ns = self.dim * self.agent_count
        if len(self.initial_positions) != ns:
            raise ScenarioError(
                f"initial_positions: expected {ns} values "
                f"(dim*agent_count), got {len(self.initial_positions)}"
            )
        if len(self.initial_velocities) != ns:
            raise ScenarioError(
                f"initial_velocities: expected {ns} values "
                f"(dim*agent_count), got {len(self.initial_velocities)}"
            )
        self.graph()  # edge validation (self loops, duplicates, connectivity)

    def graph(self) -> FormationGraph:
        return build_graph(self.agent_count, self.edges)

    @property
    def q0(self) -> np.ndarray:
        return np.array(self.initial_positions, dtype=np.float64)

    @property
    def v0(self) -> np.ndarray:
        return np.array(self.initial_velocities, dtype=np.float64)

    @property
    def horizon(self) -> float:
        return self.steps * self.h

    def override(self, **kwargs) -> "Scenario":
        """Copy with replaced fields (validates the result)."""
        return replace(self, **kwargs)


@dataclass(frozen=True)
class TrajectoryRecord:
    """Recorded trajectory plus per-step diagnostics, columnar.

    Row k corresponds to recorded step index times[k] / h. Velocities
    follow the forward-difference convention of the discrete flow.
    """

    scenario: Scenario
    times: np.ndarray
    positions: np.ndarray      # (rows, dim*agent_count)
    velocities: np.ndarray
    energies: np.ndarray       # (rows, agent_count)
    total_energy: np.ndarray
    edge_errors: np.ndarray    # (rows, |E|)
    disagreement: np.ndarray
    momentum: np.ndarray       # (rows, dim)

    @property
    def rows(self) -> int:
        return len(self.times)

    def step_diagnostics(self, row: int) -> StepDiagnostics:
        return StepDiagnostics(
            time=float(self.times[row]),
            per_agent_discrete_energy=self.energies[row],
            total_discrete_energy=float(self.total_energy[row]),
            edge_errors=self.edge_errors[row],
            velocity_disagreement=float(self.disagreement[row]),
            momentum=self.momentum[row],
        )


def _normalize_edges(raw) -> tuple[tuple[int, int, float], ...]:
    out = []
    for e in raw:
        if len(e) != 3:
            raise ScenarioError(f"edges: each edge needs (i, j, d_ij), got {e!r}")
        out.append((int(e[0]), int(e[1]), float(e[2])))
    return tuple(out)


def load_scenario(text: str) -> Scenario:
    """Parses and validates a scenario JSON document (strict keys)."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioError(
            f"parse error at line {exc.lineno}, column {exc.colno}: {exc.msg}"
        ) from exc
    if not isinstance(doc, dict):
        raise ScenarioError("document: expected a JSON object")
    unknown = set(doc) - set(_SCENARIO_FIELDS)
    if unknown:
        raise ScenarioError(f"unknown fields: {', '.join(sorted(unknown))}")
    required = ("dim", "agent_count", "edges", "initial_positions",
                "initial_velocities", "h", "steps")
    missing = [k for k in required if k not in doc]
    if missing:
        raise ScenarioError(f"missing fields: {', '.join(missing)}")
    try:
        return Scenario(
            dim=int(doc["dim"]),
            agent_count=int(doc["agent_count"]),
            edges=_normalize_edges(doc["edges"]),
            initial_positions=tuple(float(x) for x in doc["initial_positions"]),
            initial_velocities=tuple(float(x) for x in doc["initial_velocities"]),
            h=float(doc["h"]),
            steps=int(doc["steps"]),
            integrator=doc.get("integrator", "variational"),
            variant=doc.get("variant", "paper"),
            record_every=int(doc.get("record_every", 1)),
        )
    except (ScenarioError, GraphError):
        raise
    except (TypeError, ValueError) as exc:
        raise ScenarioError(str(exc)) from exc


def load_scenario_file(path) -> Scenario:
    return load_scenario(Path(path).read_text(encoding="utf-8"))


def serialize_scenario(scenario: Scenario) -> str:
    """Canonical JSON for a scenario; load_scenario inverts it exactly."""
    doc = {
        "dim": scenario.dim,
        "agent_count": scenario.agent_count,
        "edges": [[i, j, d] for i, j, d in scenario.edges],
        "initial_positions": list(scenario.initial_positions),
        "initial_velocities": list(scenario.initial_velocities),
        "h": scenario.h,
        "steps": scenario.steps,
        "integrator": scenario.integrator,
        "variant": scenario.variant,
        "record_every": scenario.record_every,
    }
    return json.dumps(doc, indent=2) + "\n"


_TRIANGLE_EDGES = ((1, 2, 10.0), (2, 3, 10.0), (1, 3, 10.0))
_TRIANGLE_Q0 = (5.03, -6.56, 2.02, 2.22, -2.33, 12.28)
_TRIANGLE_V0 = (2.80, -2.90, 0.19, 2.07, -0.67, 1.67)

_PRESETS = {
    # Three planar agents steered to an equilateral triangle of side 10
    # while reaching velocity consensus; T = 30.
    "paper-triangle-h005": Scenario(
        dim=2, agent_count=3, edges=_TRIANGLE_EDGES,
        initial_positions=_TRIANGLE_Q0, initial_velocities=_TRIANGLE_V0,
        h=0.005, steps=6000, integrator="variational", variant="paper",
        record_every=1,
    ),
    # Same setup at the fine step where explicit Euler becomes adequate.
    "paper-triangle-h00005": Scenario(
        dim=2, agent_count=3, edges=_TRIANGLE_EDGES,
        initial_positions=_TRIANGLE_Q0, initial_velocities=_TRIANGLE_V0,
        h=0.00005, steps=600000, integrator="variational", variant="paper",
        record_every=1000,
    ),
    # Gently perturbed side-2 triangle; smooth regime where every
    # integrator sits on its asymptotic order over h in [0.0025, 0.02].
    # Used by convergence-order studies; T = 1.
    "triangle-soft": Scenario(
        dim=2, agent_count=3,
        edges=((1, 2, 2.0), (2, 3, 2.0), (1, 3, 2.0)),
        initial_positions=(0.05, -0.03, 2.04, 0.02, 0.98, 1.76),
        initial_velocities=(0.15, -0.10, -0.12, 0.08, 0.05, 0.11),
        h=0.005, steps=200, integrator="variational", variant="consistent",
        record_every=1,
    ),
}


def preset_names() -> tuple[str, ...]:
    return tuple(sorted(_PRESETS))


def preset(name: str) -> Scenario:
    """Returns a built-in scenario by name."""
    try:
        return _PRESETS[name]
    except KeyError:
        raise UnknownPresetError(
            f"unknown preset {name!r}; available: {', '.join(preset_names())}"
        ) from None


def _axis_names(dim: int) -> list[str]:
    if dim <= 3:
        return list("xyz"[:dim])
    return [f"c{a}" for a in range(dim)]


def csv_header(scenario: Scenario) -> list[str]:
    """Column names of the trajectory CSV for a scenario's shape."""
    axes = _axis_names(scenario.dim)
    cols = ["t"]
    cols += [f"q{i}_{a}" for i in range(1, scenario.agent_count + 1) for a in axes]
    cols += [f"Ed_{i}" for i in range(1, scenario.agent_count + 1)]
    cols += ["Ed_total"]
    cols += [f"err_{i}_{j}" for i, j, _ in scenario.graph().edges]
    cols += ["disagreement"]
    cols += [f"p_{a}" for a in axes]
    # second energy readout: E^d / h compares directly with the continuous energy
    cols += [f"Ed_over_h_{i}" for i in range(1, scenario.agent_count + 1)]
    cols += ["Ed_over_h_total"]
    return cols


def _fmt(x: float) -> str:
    return repr(float(x))


class _CountingSink:
    """Wraps a text sink, counting UTF-8 bytes written."""

    def __init__(self, sink):
        self._sink = sink
        self.bytes_written = 0

    def write(self, text: str) -> None:
        self._sink.write(text)
        self.bytes_written += len(text.encode("utf-8"))


def write_csv(record: TrajectoryRecord, sink) -> int:
    """Writes the trajectory CSV; returns the number of bytes written.

    ``sink`` is a path or a text file object. One row per recorded step;
    float cells use the shortest representation that parses back to the
    identical double, so re-reading reproduces stored values bit-exactly.
    """
    if isinstance(sink, (str, Path)):
        with open(sink, "w", encoding="utf-8", newline="") as fh:
            return write_csv(record, fh)
    out = _CountingSink(sink)
    sc = record.scenario
    h = sc.h
    out.write(",".join(csv_header(sc)) + "\r\n")
    for r in range(record.rows):
        cells = [_fmt(record.times[r])]
        cells += [_fmt(x) for x in record.positions[r]]
        cells += [_fmt(x) for x in record.energies[r]]
        cells.append(_fmt(record.total_energy[r]))
        cells += [_fmt(x) for x in record.edge_errors[r]]
        cells.append(_fmt(record.disagreement[r]))
        cells += [_fmt(x) for x in record.momentum[r]]
        cells += [_fmt(x / h) for x in record.energies[r]]
        cells.append(_fmt(record.total_energy[r] / h))
        out.write(",".join(cells) + "\r\n")
    return out.bytes_written


def read_csv(source) -> tuple[list[str], np.ndarray]:
    """Reads a trajectory CSV back into (header, float matrix)."""
    if isinstance(source, (str, Path)):
        with open(source, "r", encoding="utf-8", newline="") as fh:
            return read_csv(fh)
    import csv as _csv

    reader = _csv.reader(source)
    header = next(reader)
    data = [[float(cell) for cell in row] for row in reader if row]
    return header, np.array(data, dtype=np.float64)


def energy_csv_text(record: TrajectoryRecord) -> str:
    """Compact energy-only CSV (time, per-agent E^d, total, total/h)."""
    sc = record.scenario
    buf = io.StringIO()
    cols = ["t"] + [f"Ed_{i}" for i in range(1, sc.agent_count + 1)]
    cols += ["Ed_total", "Ed_over_h_total"]
    buf.write(",".join(cols) + "\r\n")
    for r in range(record.rows):
        cells = [_fmt(record.times[r])]
        cells += [_fmt(x) for x in record.energies[r]]
        cells.append(_fmt(record.total_energy[r]))
        cells.append(_fmt(record.total_energy[r] / sc.h))
        buf.write(",".join(cells) + "\r\n")
    return buf.getvalue()
