"""Command-line entry point.

Subcommands: run (one scenario to CSV/metrics/SVG), sweep (metrics per
grid point), feasibility (parameter search report), figures (bundled
lane-change and corner demonstration plots).

Exit codes: 0 success, 1 usage or parse error, 2 validation error,
3 run failure, 4 empty feasible set.
"""

from __future__ import annotations

import argparse
import dataclasses
import math
import os
import sys

from . import analysis, scenario_io, sim, svgplot
from .control import PlannerParams
from .errors import PlannerError, ScenarioFormatError, ScenarioValidationError
from .refline import ReferenceLine
from .sim import Scenario
from .vehicle import VehicleGeometry, VehicleState

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_VALIDATION = 2
EXIT_RUN_FAILURE = 3
EXIT_EMPTY_FEASIBLE = 4


class _Parser(argparse.ArgumentParser):
    """argparse reports usage errors with exit code 2; we reserve 2 for
    scenario validation, so remap to 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _fmt(value) -> str:
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _metrics_lines(record: sim.RunRecord) -> list[str]:
    lines = [f"completed = {record.completed}"]
    if record.failure_reason:
        lines.append(f"failure_reason = {record.failure_reason}")
    for field in dataclasses.fields(record.metrics):
        lines.append(f"{field.name} = {_fmt(getattr(record.metrics, field.name))}")
    return lines


def _select_runner(scenario: Scenario):
    if scenario.abort_time is not None:
        return sim.run_abort
    if scenario.lane_change_offset is None and any(
        seg.curvature != 0 for seg in scenario.track.segments
    ):
        return sim.run_corner
    return sim.run


def _scenario_stem(path: str) -> str:
    return os.path.splitext(os.path.basename(path))[0]


def cmd_run(args) -> int:
    try:
        scenario, output = scenario_io.load(args.scenario, args.set or [])
    except (OSError, ScenarioFormatError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ScenarioValidationError as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION

    record = _select_runner(scenario)(scenario)

    out_dir = args.out or output.directory
    os.makedirs(out_dir, exist_ok=True)
    stem = _scenario_stem(args.scenario)
    if output.emit_csv:
        sim.write_csv(os.path.join(out_dir, f"{stem}.csv"), record.samples)
    with open(os.path.join(out_dir, f"{stem}_metrics.txt"), "w") as fh:
        fh.write("\n".join(_metrics_lines(record)) + "\n")
    if output.emit_svg and record.samples:
        series = [(stem, [(s.t, s.d_lateral) for s in record.samples])]
        svg = svgplot.line_chart(series, stem, "t [s]", "lateral deviation [m]")
        with open(os.path.join(out_dir, f"{stem}.svg"), "w") as fh:
            fh.write(svg)

    for line in _metrics_lines(record):
        print(line)
    if not record.completed:
        print(f"run failed: {record.failure_reason}", file=sys.stderr)
        return EXIT_RUN_FAILURE
    return EXIT_OK


def _parse_grid(items: list[str]) -> dict[str, list[float]]:
    axes: dict[str, list[float]] = {}
    for item in items:
        if "=" not in item:
            raise ValueError(f"grid axis {item!r} is not of the form key=v1,v2,...")
        key, _, rest = item.partition("=")
        key = key.strip()
        if not key or key in axes:
            raise ValueError(f"bad or duplicate grid axis {item!r}")
        try:
            axes[key] = [float(v) for v in rest.split(",") if v.strip()]
        except ValueError:
            raise ValueError(f"grid axis {item!r} has a non-numeric value")
        if not axes[key]:
            raise ValueError(f"grid axis {item!r} has no values")
    return axes


def cmd_sweep(args) -> int:
    try:
        axes = _parse_grid(args.grid)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        scenario, output = scenario_io.load(args.scenario, args.set or [])
    except (OSError, ScenarioFormatError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ScenarioValidationError as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION

    try:
        results = sim.sweep(scenario, axes)
    except (ValueError, KeyError) as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION

    out_dir = args.out or output.directory
    os.makedirs(out_dir, exist_ok=True)
    keys = sorted(axes)
    metric_names = [f.name for f in dataclasses.fields(sim.RunMetrics)]
    path = os.path.join(out_dir, f"{_scenario_stem(args.scenario)}_sweep.csv")
    with open(path, "w") as fh:
        fh.write(",".join(keys + metric_names + ["completed"]) + "\n")
        for overrides, record in results:
            row = [_fmt(overrides[k]) for k in keys]
            row += [_fmt(getattr(record.metrics, n)) for n in metric_names]
            row.append(str(record.completed))
            fh.write(",".join(row) + "\n")
    print(f"wrote {len(results)} rows to {path}")
    if any(not record.completed for _, record in results):
        return EXIT_RUN_FAILURE
    return EXIT_OK


def _report_lines(report: analysis.FeasibilityReport) -> list[str]:
    p = report.params
    lines = [
        "SET "
        f"k={p.k!r} lambda0={p.lambda0!r} gamma={p.gamma!r} lam={p.lam!r} "
        f"delta_d0={p.delta_d0!r} alpha={p.alpha!r} "
        f"ratio={report.predicted_curvature_ratio!r}"
    ]
    for check in report.checks:
        if not check.applicable:
            lines.append(f"  {check.name}: not applicable")
            continue
        for row in check.rows:
            verdict = "PASS" if row.satisfied else "FAIL"
            lines.append(
                f"  {check.name}.{row.name}: {row.lhs!r} {row.comparator} "
                f"{row.rhs!r} {verdict}"
            )
    return lines


def cmd_feasibility(args) -> int:
    try:
        axes = _parse_grid(args.grid)
        for name in ("gamma", "lambda0", "k"):
            if name not in axes:
                raise ValueError(f"missing grid axis {name!r}")
        unknown = set(axes) - {"gamma", "lambda0", "k"}
        if unknown:
            raise ValueError(f"unknown grid axes {sorted(unknown)}")
        if args.v <= 0 or args.lane_width <= 0:
            raise ValueError("v and lane width must be positive")
        reports = analysis.find_feasible(
            v=args.v,
            lane_width=args.lane_width,
            kappa0=args.kappa0,
            c1=args.c1,
            c2=args.c2,
            c3=args.c3,
            gamma_grid=axes["gamma"],
            lambda0_grid=axes["lambda0"],
            k_grid=axes["k"],
            alpha=args.alpha,
        )
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    for report in reports:
        for line in _report_lines(report):
            print(line)
    print(f"feasible sets: {len(reports)}")
    if not reports:
        return EXIT_EMPTY_FEASIBLE
    return EXIT_OK


def _lane_change_scenario(k: float) -> Scenario:
    track = ReferenceLine.from_pieces(0.0, 0.0, 0.0, [("line", 200.0)])
    params = PlannerParams.build(k=k, lam=1.0, lambda0=0.5, lane_width=3.5, v_s=1.0)
    # tight actuator limits: the high-gain case saturates and oscillates
    geometry = VehicleGeometry(l_f=1.5, l_r=1.5, delta_max=0.6, u_max=0.6)
    return Scenario(
        track=track,
        geometry=geometry,
        params=params,
        initial_state=VehicleState(0.0, 0.0, 0.0, 0.0),
        duration=10.0,
        lane_change_offset=3.5,
    )


def _corner_scenarios() -> tuple[Scenario, Scenario]:
    kappa0 = 0.01
    track = ReferenceLine.from_pieces(
        0.0, 0.0, 0.0, [("arc", 2.0 * math.pi / kappa0, kappa0)]
    )
    k, lambda0, alpha, gamma = 0.12, 0.5, 0.5, 0.995
    two_point = PlannerParams.build(
        k=k,
        lam=(lambda0 / k) ** 2,
        lambda0=lambda0,
        alpha=alpha,
        delta_d0=gamma / (alpha * k),
        c3=1.0,
        v_s=1.0,
    )
    one_point = PlannerParams.build(
        k=k, lam=(lambda0 / k) ** 2, lambda0=lambda0, v_s=1.0
    )
    geometry = VehicleGeometry(l_f=1.5, l_r=1.5)
    common = dict(
        track=track,
        geometry=geometry,
        initial_state=VehicleState(0.0, 0.0, 0.0, 0.0),
        duration=300.0,
        h=5e-3,
    )
    return (
        Scenario(params=two_point, **common),
        Scenario(params=one_point, **common),
    )


def cmd_figures(args) -> int:
    try:
        os.makedirs(args.out, exist_ok=True)
        lateral_series, rate_series = [], []
        for k in (0.5, 1.0, 1.5):
            record = sim.run(_lane_change_scenario(k))
            if not record.completed:
                print(f"run failed: {record.failure_reason}", file=sys.stderr)
                return EXIT_RUN_FAILURE
            # plot the offset from the original lane, matching a lane at y=0
            pts_lat = [(s.t, s.y) for s in record.samples]
            pts_rate = [(s.t, s.d_lateral_rate) for s in record.samples]
            lateral_series.append((f"k={k:g}", pts_lat))
            rate_series.append((f"k={k:g}", pts_rate))
        two_point, one_point = (sim.run_corner(s) for s in _corner_scenarios())
        for record in (two_point, one_point):
            if not record.completed:
                print(f"run failed: {record.failure_reason}", file=sys.stderr)
                return EXIT_RUN_FAILURE
        arc_pts = []
        track = two_point.scenario.track
        last_station = two_point.samples[-1].t * two_point.scenario.params.v_s
        n = 400
        for i in range(n + 1):
            f = track.point_at(last_station * i / n)
            arc_pts.append(f.position)
        path_pts = [(s.x, s.y) for s in two_point.samples]

        outputs = {
            "lane_change_lateral.svg": svgplot.line_chart(
                lateral_series,
                "Lane change: lateral position",
                "t [s]",
                "y [m]",
            ),
            "lane_change_lateral_rate.svg": svgplot.line_chart(
                rate_series,
                "Lane change: lateral deviation rate",
                "t [s]",
                "dy/dt [m/s]",
            ),
            "corner_path.svg": svgplot.line_chart(
                [("lane center", arc_pts), ("vehicle path", path_pts)],
                "Corner tracking: vehicle path vs lane",
                "x [m]",
                "y [m]",
            ),
        }
        for name, svg in outputs.items():
            with open(os.path.join(args.out, name), "w") as fh:
                fh.write(svg)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUN_FAILURE
    except PlannerError as exc:
        print(f"run failed: {exc}", file=sys.stderr)
        return EXIT_RUN_FAILURE
    print(f"wrote {len(outputs)} figures to {args.out}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="lanesteer", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="simulate one scenario file")
    p_run.add_argument("--scenario", required=True)
    p_run.add_argument("--set", action="append", metavar="SECTION.KEY=VALUE")
    p_run.add_argument("--out", default=None)
    p_run.set_defaults(func=cmd_run)

    p_sweep = sub.add_parser("sweep", help="metrics over a parameter grid")
    p_sweep.add_argument("--scenario", required=True)
    p_sweep.add_argument("--set", action="append", metavar="SECTION.KEY=VALUE")
    p_sweep.add_argument("--grid", action="append", required=True,
                         metavar="KEY=V1,V2,...")
    p_sweep.add_argument("--out", default=None)
    p_sweep.set_defaults(func=cmd_sweep)

    p_feas = sub.add_parser("feasibility", help="search the parameter space")
    p_feas.add_argument("--v", type=float, required=True)
    p_feas.add_argument("--lane-width", type=float, required=True)
    p_feas.add_argument("--kappa0", type=float, required=True)
    p_feas.add_argument("--c1", type=float, default=math.inf)
    p_feas.add_argument("--c2", type=float, default=math.inf)
    p_feas.add_argument("--c3", type=float, default=math.inf)
    p_feas.add_argument("--alpha", type=float, default=0.5)
    p_feas.add_argument("--grid", action="append", required=True,
                        metavar="KEY=V1,V2,...")
    p_feas.set_defaults(func=cmd_feasibility)

    p_fig = sub.add_parser("figures", help="emit the demonstration plots")
    p_fig.add_argument("--out", required=True)
    p_fig.set_defaults(func=cmd_figures)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
