"""Wall-clock benchmarks of the stepping kernels.

Timings cover the stepping loop only: graph construction, stepper
factorization, and record assembly happen outside the timed region, so
the variational number is the marginal per-step cost after precompute.
"""

from __future__ import annotations

import time

import numpy as np

from . import backend
from .integrators import bootstrap, precompute_stepper
from .scenario import Scenario


def time_per_step(
    scenario: Scenario,
    integrator: str,
    steps: int,
    *,
    variant: str | None = None,
    backend_name: str | None = None,
    repeats: int = 3,
) -> float:
    """Best-of-``repeats`` seconds per step for one integrator."""
    if steps < 1:
        raise ValueError(f"steps must be >= 1, got {steps}")
    graph = scenario.graph()
    kern = backend.kernels(backend_name)
    q0 = np.ascontiguousarray(scenario.q0)
    v0 = np.ascontiguousarray(scenario.v0)
    d2 = np.ascontiguousarray(graph.lengths * graph.lengths)
    lap = np.ascontiguousarray(graph.laplacian)
    rec_a = np.empty((2, q0.size))
    rec_b = np.empty((2, q0.size))

    if integrator == "variational":
        stepper = precompute_stepper(graph, scenario.h, variant or scenario.variant)
        pair = bootstrap(q0, v0, scenario.h)
        inv_a = np.ascontiguousarray(stepper.inv_a)
        mat_b = np.ascontiguousarray(stepper.mat_b)
        q1 = np.ascontiguousarray(pair.q_curr)

        def call(n):
            kern.vi_run(q0, q1, inv_a, mat_b, stepper.beta,
                        graph.tails, graph.heads, d2, n, n, rec_a, rec_b)
    elif integrator in ("euler", "rk4"):
        runner = kern.euler_run if integrator == "euler" else kern.rk4_run

        def call(n):
            runner(q0, v0, lap, graph.tails, graph.heads, d2,
                   scenario.h, n, n, 1.0, 1.0, rec_a, rec_b)
    else:
        raise ValueError(f"unknown integrator {integrator!r}")

    call(min(steps, 128))  # warmup
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        call(steps)
        best = min(best, time.perf_counter() - t0)
    return best / steps


def bench_integrators(
    scenario: Scenario,
    steps: int,
    *,
    backend_name: str | None = None,
    integrators=("variational", "euler", "rk4"),
    repeats: int = 3,
) -> list[dict]:
    """Per-step timings for several integrators on one backend."""
    name = backend_name or backend.backend_name()
    rows = []
    for integ in integrators:
        sec = time_per_step(scenario, integ, steps,
                            backend_name=backend_name, repeats=repeats)
        rows.append({
            "integrator": integ,
            "backend": name,
            "ns_per_step": sec * 1e9,
            "steps_per_sec": 1.0 / sec,
        })
    return rows


def bench_backends(scenario: Scenario, steps: int, *, repeats: int = 3) -> list[dict]:
    """Compares every available backend on the same scenario."""
    rows = []
    for name in backend.available_backends():
        rows.extend(bench_integrators(scenario, steps, backend_name=name, repeats=repeats))
    return rows


def format_table(rows: list[dict]) -> str:
    header = f"{'integrator':<14}{'backend':<10}{'ns/step':>12}{'steps/sec':>14}"
    lines = [header, "-" * len(header)]
    for r in rows:
        lines.append(
            f"{r['integrator']:<14}{r['backend']:<10}"
            f"{r['ns_per_step']:>12.1f}{r['steps_per_sec']:>14.0f}"
        )
    return "\n".join(lines)
