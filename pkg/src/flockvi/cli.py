"""Command-line interface.

Subcommands:
    run          simulate one scenario, write trajectory CSV (and SVG plots)
    compare      variational vs explicit Euler on the same scenario
    convergence  fitted convergence orders over a step-size grid
    bench        per-step timings of the integrators

Exit codes: 0 success, 2 usage error, 3 scenario/graph validation error,
4 I/O error.
"""

from __future__ import annotations

import argparse
import sys
import time
from pathlib import Path

import numpy as np

from . import backend, bench, verification
from .graph import GraphError
from .integrators import run as run_scenario
from .scenario import (
    Scenario,
    ScenarioError,
    UnknownPresetError,
    energy_csv_text,
    load_scenario_file,
    preset,
    preset_names,
    write_csv,
)
from .svg import PlotStyle, emit_svg

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_SCENARIO = 3
EXIT_IO = 4


class _UsageError(Exception):
    pass


def _add_scenario_args(sp: argparse.ArgumentParser, *, output: bool = True) -> None:
    sp.add_argument("--preset", help=f"built-in scenario ({', '.join(preset_names())})")
    sp.add_argument("--scenario", help="scenario JSON file")
    sp.add_argument("--integrator", choices=("variational", "euler", "rk4"))
    sp.add_argument("--variant", choices=("paper", "consistent"))
    sp.add_argument("--steps", type=int)
    sp.add_argument("--h", type=float)
    sp.add_argument("--record-every", type=int, dest="record_every")
    if output:
        sp.add_argument("--out", default="out", help="output directory (default: out)")
        sp.add_argument("--svg", action="store_true", help="also emit SVG plots")


def _load_scenario(args) -> Scenario:
    if bool(args.preset) == bool(args.scenario):
        raise _UsageError("exactly one of --preset or --scenario is required")
    sc = preset(args.preset) if args.preset else load_scenario_file(args.scenario)
    overrides = {}
    for name in ("integrator", "variant", "steps", "h", "record_every"):
        value = getattr(args, name, None)
        if value is not None:
            overrides[name] = value
    return sc.override(**overrides) if overrides else sc


def _outdir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _plot_name_suffix(sc: Scenario) -> str:
    if sc.integrator == "variational":
        return f"{sc.integrator}_{sc.variant}"
    return sc.integrator


def _trajectory_series(record):
    sc = record.scenario
    pos = record.positions.reshape(record.rows, sc.agent_count, sc.dim)
    return [
        (f"agent {i + 1}", pos[:, i, 0], pos[:, i, 1])
        for i in range(sc.agent_count)
    ]


def _energy_series(record):
    sc = record.scenario
    series = [
        (f"E_d agent {i + 1}", record.times, record.energies[:, i])
        for i in range(sc.agent_count)
    ]
    series.append(("E_d total", record.times, record.total_energy))
    return series


def _write_plots(record, out: Path, label: str) -> list[Path]:
    paths = []
    traj = out / f"plot_trajectories_{label}.svg"
    emit_svg(
        _trajectory_series(record),
        PlotStyle(title=f"agent trajectories ({label})", x_label="x", y_label="y",
                  markers=True),
        traj,
    )
    paths.append(traj)
    energy = out / f"plot_energy_{label}.svg"
    emit_svg(
        _energy_series(record),
        PlotStyle(title=f"discrete energy ({label})", x_label="t", y_label="E_d"),
        energy,
    )
    paths.append(energy)
    return paths


def cmd_run(args) -> int:
    sc = _load_scenario(args)
    out = _outdir(args)
    t0 = time.perf_counter()
    record = run_scenario(sc)
    wall = time.perf_counter() - t0
    csv_path = out / f"trajectory_{sc.integrator}.csv"
    write_csv(record, csv_path)
    (out / f"energy_{sc.integrator}.csv").write_text(energy_csv_text(record), encoding="utf-8")
    written = [csv_path]
    if args.svg:
        written += _write_plots(record, out, _plot_name_suffix(sc))

    e0, eN = record.total_energy[0], record.total_energy[-1]
    ratio = eN / e0 if e0 > 0 else float("nan")
    steps_per_sec = sc.steps / wall if wall > 0 and sc.steps else float("nan")
    print(f"{'integrator':<22}{sc.integrator}"
          + (f" ({sc.variant})" if sc.integrator == "variational" else ""))
    print(f"{'backend':<22}{backend.backend_name()}")
    print(f"{'steps':<22}{sc.steps} (h={sc.h:g}, T={sc.horizon:g})")
    with np.printoptions(precision=3):
        print(f"{'final edge errors':<22}{record.edge_errors[-1]}")
    print(f"{'final disagreement':<22}{record.disagreement[-1]:.3e}")
    print(f"{'energy final/initial':<22}{ratio:.3e}")
    print(f"{'wall time':<22}{wall:.3f} s ({steps_per_sec:,.0f} steps/s)")
    for p in written:
        print(f"{'wrote':<22}{p}")
    return EXIT_OK


def cmd_compare(args) -> int:
    sc = _load_scenario(args)
    out = _outdir(args)
    vi_sc = sc.override(integrator="variational")
    eu_sc = sc.override(integrator="euler")
    vi_rec = run_scenario(vi_sc)
    eu_rec = run_scenario(eu_sc)
    ref = verification.reference_solution(vi_sc)

    vi_dev = verification.trajectory_deviation(vi_rec, ref)
    eu_dev = verification.trajectory_deviation(eu_rec, ref)
    cross = verification.trajectory_deviation(vi_rec, eu_rec)
    vi_edev = verification.energy_deviation(vi_rec, ref)
    eu_edev = verification.energy_deviation(eu_rec, ref)

    labels = {"variational": _plot_name_suffix(vi_sc), "euler": "euler"}
    for rec, name in ((vi_rec, "variational"), (eu_rec, "euler")):
        write_csv(rec, out / f"trajectory_{name}.csv")
        (out / f"energy_{name}.csv").write_text(energy_csv_text(rec), encoding="utf-8")
        if args.svg:
            _write_plots(rec, out, labels[name])

    lines = [
        f"scenario: h={sc.h:g}, steps={sc.steps}, T={sc.horizon:g}, "
        f"variant={vi_sc.variant}",
        f"max position deviation vs reference: variational {vi_dev:.6e}",
        f"max position deviation vs reference: euler       {eu_dev:.6e}",
        f"max position discrepancy variational vs euler:   {cross:.6e}",
        f"max energy deviation vs reference: variational   {vi_edev:.6e}",
        f"max energy deviation vs reference: euler         {eu_edev:.6e}",
    ]
    report = "\n".join(lines) + "\n"
    (out / "report.txt").write_text(report, encoding="utf-8")
    print(report, end="")
    return EXIT_OK


def cmd_convergence(args) -> int:
    sc = _load_scenario(args)
    out = _outdir(args)
    grid = args.grid
    if len(set(grid)) < 3:
        raise _UsageError("--grid needs at least 3 distinct step sizes")
    if args.integrator:
        requested = [(args.integrator, args.variant)]
    else:
        requested = [("euler", None), ("variational", args.variant or sc.variant)]
    reports = []
    t0 = time.perf_counter()
    for integ, variant in requested:
        reports.append(
            verification.convergence_order(integ, variant, sc, grid, horizon=args.horizon)
        )
    wall = time.perf_counter() - t0

    lines = [f"{'integrator':<26}{'slope':>8}{'+-':>8}   errors (largest h first)"]
    for rep in reports:
        errs = ", ".join(f"{e:.3e}" for e in rep.errors)
        lines.append(f"{rep.label():<26}{rep.slope:>8.3f}{rep.slope_halfwidth:>8.3f}   {errs}")
    lines.append(f"grid: {', '.join(f'{h:g}' for h in reports[0].step_sizes)}; "
                 f"horizon T={args.horizon:g}; wall {wall:.2f} s")
    text = "\n".join(lines) + "\n"
    (out / "report.txt").write_text(text, encoding="utf-8")
    for rep in reports:
        (out / f"convergence_{rep.label()}.csv").write_text(rep.to_csv(), encoding="utf-8")
    print(text, end="")
    return EXIT_OK


def cmd_bench(args) -> int:
    sc = _load_scenario(args)
    if args.steps is None:
        args_steps = 200_000
    else:
        args_steps = args.steps
    if args_steps < 1:
        raise _UsageError("--steps must be at least 1 for bench")
    if args.backend == "both":
        rows = bench.bench_backends(sc, args_steps)
    else:
        rows = bench.bench_integrators(sc, args_steps, backend_name=args.backend)
    print(bench.format_table(rows))
    by_key = {(r["integrator"], r["backend"]): r["ns_per_step"] for r in rows}
    for bk in sorted(set(r["backend"] for r in rows)):
        vi = by_key.get(("variational", bk))
        eu = by_key.get(("euler", bk))
        rk = by_key.get(("rk4", bk))
        if vi and eu and rk:
            print(f"[{bk}] variational/euler = {vi / eu:.2f}x, "
                  f"variational/rk4 = {vi / rk:.2f}x")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="flockvi",
        description="Distance-based formation control with flocking: "
                    "forced variational integrator, baselines, diagnostics.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("run", help="simulate a scenario")
    _add_scenario_args(sp)
    sp.set_defaults(func=cmd_run)

    sp = sub.add_parser("compare", help="variational vs explicit Euler")
    _add_scenario_args(sp)
    sp.set_defaults(func=cmd_compare)

    sp = sub.add_parser("convergence", help="convergence-order study")
    _add_scenario_args(sp)
    sp.add_argument("--grid", type=float, nargs="+",
                    default=[0.02, 0.01, 0.005, 0.0025],
                    help="step sizes (default: 0.02 0.01 0.005 0.0025)")
    sp.add_argument("--horizon", type=float, default=1.0,
                    help="common horizon T (default: 1.0)")
    sp.set_defaults(func=cmd_convergence)

    sp = sub.add_parser("bench", help="per-step timings")
    _add_scenario_args(sp, output=False)
    sp.add_argument("--backend", choices=("compiled", "python", "both"))
    sp.set_defaults(func=cmd_bench)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    try:
        return args.func(args)
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except UnknownPresetError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ScenarioError, GraphError) as exc:
        print(f"scenario error: {exc}", file=sys.stderr)
        return EXIT_SCENARIO
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO


def console_entry() -> None:
    sys.exit(main())
