"""Verification oracles: reference trajectories, convergence orders, residual audits.

The reference integrator is the classical 4th-order one-step method at a
much finer step (h/100 by default), aligned so its samples land exactly
on the coarse recording times. Convergence-order studies fit the log-log
slope of terminal position error against the reference; the paper-variant
scheme is measured against the modified system it actually integrates
(doubled damping, halved potential force).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import backend, diagnostics
from .integrators import discrete_el_residual, recorded_steps, run, variant_target_scales
from .scenario import Scenario, TrajectoryRecord


@dataclass(frozen=True)
class ConvergenceReport:
    """Terminal-error convergence study over a decreasing step-size grid."""

    integrator: str
    variant: str | None
    step_sizes: tuple[float, ...]
    errors: tuple[float, ...]
    slope: float
    slope_halfwidth: float

    def __post_init__(self):
        if len(self.step_sizes) < 3:
            raise ValueError("need at least 3 step sizes")
        if any(b >= a for a, b in zip(self.step_sizes, self.step_sizes[1:])):
            raise ValueError("step sizes must be strictly decreasing")

    def label(self) -> str:
        if self.integrator == "variational":
            return f"variational({self.variant})"
        return self.integrator

    def to_text(self) -> str:
        lines = [f"integrator: {self.label()}"]
        lines.append(f"fitted slope: {self.slope:.3f} +- {self.slope_halfwidth:.3f}")
        lines.append("h, terminal_error")
        for h, e in zip(self.step_sizes, self.errors):
            lines.append(f"{h:g}, {e:.6e}")
        return "\n".join(lines)

    def to_csv(self) -> str:
        rows = ["h,terminal_error"]
        rows += [f"{h!r},{e!r}" for h, e in zip(self.step_sizes, self.errors)]
        return "\r\n".join(rows) + "\r\n"


def _rk4_reference_states(
    scenario: Scenario,
    h_ref: float,
    damping: float,
    potential: float,
    record_every_steps: int,
    backend_name: str | None = None,
) -> tuple[np.ndarray, np.ndarray]:
    """Raw rk4 states (positions, velocities) at the scenario's recorded steps."""
    graph = scenario.graph()
    kern = backend.kernels(backend_name)
    ratio_f = scenario.h / h_ref
    ratio = round(ratio_f)
    if ratio < 1 or abs(ratio_f - ratio) > 1e-12 * ratio:
        raise ValueError(
            f"h={scenario.h} is not an integer multiple of h_ref={h_ref}"
        )
    nsteps = scenario.steps * ratio
    every = record_every_steps * ratio
    ks = recorded_steps(nsteps, every)
    rec_q = np.empty((len(ks), scenario.dim * scenario.agent_count))
    rec_v = np.empty_like(rec_q)
    d2 = np.ascontiguousarray(graph.lengths * graph.lengths)
    kern.rk4_run(
        np.ascontiguousarray(scenario.q0), np.ascontiguousarray(scenario.v0),
        np.ascontiguousarray(graph.laplacian), graph.tails, graph.heads, d2,
        h_ref, nsteps, every, damping, potential, rec_q, rec_v,
    )
    return rec_q, rec_v


def reference_solution(
    scenario: Scenario,
    h_ref: float | None = None,
    *,
    damping_scale: float = 1.0,
    potential_scale: float = 1.0,
    backend_name: str | None = None,
) -> TrajectoryRecord:
    """High-accuracy rk4 trajectory sampled at the scenario's recording times.

    ``h_ref`` defaults to h/100 and must divide h exactly (within 1e-12)
    with h/h_ref >= 10. The optional scales select the modified system
    q'' = -damping L-bar q' - potential Gamma(q) targeted by the
    paper-coefficient variant.
    """
    if h_ref is None:
        h_ref = scenario.h / 100.0
    if h_ref > scenario.h / 10.0 + 1e-15 * scenario.h:
        raise ValueError(f"h_ref={h_ref} must be at most h/10={scenario.h / 10}")
    rec_q, rec_v = _rk4_reference_states(
        scenario, h_ref, damping_scale, potential_scale,
        scenario.record_every, backend_name,
    )
    graph = scenario.graph()
    ks = recorded_steps(scenario.steps, scenario.record_every)
    times = ks.astype(np.float64) * scenario.h
    rec_qn = rec_q + scenario.h * rec_v
    diag = diagnostics.trajectory_diagnostics(rec_q, rec_qn, graph, scenario.h)
    return TrajectoryRecord(
        scenario=scenario,
        times=times,
        positions=rec_q,
        velocities=rec_v,
        energies=diag.energies,
        total_energy=diag.total_energy,
        edge_errors=diag.edge_errors,
        disagreement=diag.disagreement,
        momentum=diag.momentum,
    )


def _fit_loglog(hs: np.ndarray, errs: np.ndarray) -> tuple[float, float]:
    x = np.log(hs)
    y = np.log(errs)
    xc = x - x.mean()
    slope = float((xc @ (y - y.mean())) / (xc @ xc))
    intercept = y.mean() - slope * x.mean()
    resid = y - (slope * x + intercept)
    m = len(hs)
    if m > 2:
        sigma2 = float(resid @ resid) / (m - 2)
        halfwidth = float(np.sqrt(sigma2 / (xc @ xc)))
    else:
        halfwidth = 0.0
    return slope, halfwidth


def convergence_order(
    integrator: str,
    variant: str | None,
    scenario: Scenario,
    step_sizes,
    *,
    horizon: float = 1.0,
    h_ref_factor: int = 100,
    backend_name: str | None = None,
) -> ConvergenceReport:
    """Fits the global order of an integrator over a step-size grid.

    Each run covers the common ``horizon`` from the scenario's initial
    conditions; the error is the Euclidean norm of the terminal stacked
    position against the reference solution of the integrator's target
    system. Variational runs use the second-order startup so the startup
    error does not mask the scheme's order.
    """
    hs = sorted(set(float(h) for h in step_sizes), reverse=True)
    if len(hs) < 3:
        raise ValueError("need at least 3 distinct step sizes")
    for h in hs:
        n = round(horizon / h)
        if n < 1 or abs(n * h - horizon) > 1e-9 * max(1.0, horizon):
            raise ValueError(f"step size {h} does not divide the horizon {horizon}")

    if integrator == "variational":
        if variant is None:
            variant = scenario.variant
        damping, potential = variant_target_scales(variant)
    else:
        damping, potential = 1.0, 1.0

    h_min = hs[-1]
    n_min = round(horizon / h_min)
    ref_scenario = scenario.override(
        h=h_min, steps=n_min, record_every=n_min, integrator="rk4"
    )
    ref_q, _ = _rk4_reference_states(
        ref_scenario, h_min / h_ref_factor, damping, potential, n_min, backend_name
    )
    terminal_ref = ref_q[-1]

    errors = []
    for h in hs:
        n = round(horizon / h)
        scen = scenario.override(
            h=h, steps=n, record_every=n, integrator=integrator,
            variant=variant if variant is not None else scenario.variant,
        )
        startup = "taylor2" if integrator == "variational" else "velocity"
        rec = run(scen, startup=startup, backend_name=backend_name)
        err = float(np.linalg.norm(rec.positions[-1] - terminal_ref))
        if not err > 0.0:
            raise ValueError(f"degenerate zero error at h={h}")
        errors.append(err)

    slope, halfwidth = _fit_loglog(np.array(hs), np.array(errors))
    return ConvergenceReport(
        integrator=integrator,
        variant=variant if integrator == "variational" else None,
        step_sizes=tuple(hs),
        errors=tuple(errors),
        slope=slope,
        slope_halfwidth=halfwidth,
    )


def residual_audit(
    scenario: Scenario,
    variant: str | None = None,
    *,
    backend_name: str | None = None,
) -> tuple[np.ndarray, np.ndarray]:
    """Max-abs discrete stationarity residual per interior step of a run.

    Runs the variational integrator (recording every step) and evaluates
    ``integrators.discrete_el_residual`` on each consecutive position
    triple. Returns (times, residual) over steps 1..N-1.
    """
    scen = scenario.override(
        integrator="variational",
        variant=variant if variant is not None else scenario.variant,
        record_every=1,
    )
    rec = run(scen, backend_name=backend_name)
    graph = scen.graph()
    pos = rec.positions
    n_rows = pos.shape[0]
    if n_rows < 3:
        return np.empty(0), np.empty(0)
    resid = np.empty(n_rows - 2)
    for k in range(1, n_rows - 1):
        r = discrete_el_residual(pos[k - 1], pos[k], pos[k + 1], graph, scen.h)
        resid[k - 1] = np.abs(r).max()
    return rec.times[1:-1], resid


def trajectory_deviation(record: TrajectoryRecord, other: TrajectoryRecord) -> float:
    """Max-abs position discrepancy between two records at shared times."""
    m = min(record.rows, other.rows)
    return float(np.abs(record.positions[:m] - other.positions[:m]).max())


def energy_deviation(record: TrajectoryRecord, other: TrajectoryRecord) -> float:
    """Max-abs total discrete-energy discrepancy at shared times."""
    m = min(record.rows, other.rows)
    return float(np.abs(record.total_energy[:m] - other.total_energy[:m]).max())
