"""Deterministic closed-loop simulator and run metrics.

A scenario couples a reference line, a vehicle, and planner parameters.
Lane changes are realized by swapping the target to a parallel offset
track (so the initial error is exactly -k * offset), and an abort swaps
the target back at a given time.  Integration is fixed-step RK4 with the
wheel-rate command held over each control period; everything is seed-free
and bit-reproducible.
"""

from __future__ import annotations

import csv
import dataclasses
import itertools
import math
from dataclasses import dataclass

from . import control as ctl
from . import vehicle as veh
from .control import ControlSample, PlannerParams
from .errors import PlannerError
from .refline import ReferenceLine, wrap_angle
from .vehicle import VehicleGeometry, VehicleState

CSV_COLUMNS = (
    "t", "x", "y", "psi", "delta", "beta", "theta_v", "theta_n", "theta_f",
    "e", "d_lateral", "d_lateral_rate", "u_s", "u_c", "u_applied", "v",
    "kappa_e_inst",
)

# sub-threshold lateral rates are treated as zero by the sign-change counter
_RATE_DEADBAND = 1e-3

_STEADY_AGREE_TOL = 1e-2


@dataclass(frozen=True)
class Scenario:
    track: ReferenceLine
    geometry: VehicleGeometry
    params: PlannerParams
    initial_state: VehicleState
    duration: float  # s
    h: float = 1e-3  # s, integration step
    control_divisor: int = 10  # control period = control_divisor * h
    lane_change_offset: float | None = None  # m, +normal direction
    abort_time: float | None = None  # s, swap target back to track

    def __post_init__(self):
        if self.duration <= 0:
            raise ValueError("duration must be positive")
        if self.h <= 0:
            raise ValueError("integration step must be positive")
        if self.control_divisor < 1:
            raise ValueError("control divisor must be at least 1")
        if self.abort_time is not None:
            if self.lane_change_offset is None:
                raise ValueError("abort_time requires a lane-change offset")
            if not 0 <= self.abort_time < self.duration:
                raise ValueError("abort_time must lie in [0, duration)")

    def target_at(self, t: float) -> ReferenceLine:
        """Track the controller follows at time t."""
        if self.lane_change_offset is None:
            return self.track
        if self.abort_time is not None and t >= self.abort_time:
            return self.track
        return self.track.parallel_offset(self.lane_change_offset)


@dataclass(frozen=True)
class Sample:
    """One CSV row; field order matches CSV_COLUMNS."""

    t: float
    x: float
    y: float
    psi: float
    delta: float
    beta: float
    theta_v: float
    theta_n: float
    theta_f: float
    e: float
    d_lateral: float
    d_lateral_rate: float
    u_s: float
    u_c: float
    u_applied: float
    v: float
    kappa_e_inst: float


@dataclass(frozen=True)
class RunMetrics:
    peak_abs_dtheta: float
    peak_abs_dtheta_dot: float
    final_lateral: float  # m, displacement from the original track (+normal)
    settle_time: float
    lateral_rate_sign_changes: int
    mean_steady_curvature: float  # 1/m, mean kappa_e over the steady window
    steady_lateral: float  # m, mean signed lateral (vs current target)
    steady_converged: bool
    saturation_fraction: float


@dataclass(frozen=True)
class RunRecord:
    scenario: Scenario
    samples: tuple[Sample, ...]
    metrics: RunMetrics
    completed: bool
    failure_reason: str | None = None


def _make_sample(
    t: float,
    geom: VehicleGeometry,
    state: VehicleState,
    cs: ControlSample,
) -> Sample:
    beta = veh.slip_angle(geom, state.delta)
    theta_v = wrap_angle(state.psi + beta)
    dtheta = wrap_angle(theta_v - cs.theta_n)
    kappa_e = veh.omega(geom, state, cs.v, cs.u_applied) / cs.v
    return Sample(
        t=t,
        x=state.x,
        y=state.y,
        psi=state.psi,
        delta=state.delta,
        beta=beta,
        theta_v=theta_v,
        theta_n=cs.theta_n,
        theta_f=cs.theta_f,
        e=cs.e,
        d_lateral=cs.lateral,
        d_lateral_rate=-cs.v * math.sin(dtheta),
        u_s=cs.u_s,
        u_c=cs.u_c,
        u_applied=cs.u_applied,
        v=cs.v,
        kappa_e_inst=kappa_e,
    )


def run(scenario: Scenario) -> RunRecord:
    """Integrate the closed loop and collect one sample per control period.

    Planner or integration errors terminate the run early; the partial
    record is returned with completed = False and the reason attached.
    """
    geom, params = scenario.geometry, scenario.params
    state = scenario.initial_state
    period = scenario.control_divisor * scenario.h
    n_periods = round(scenario.duration / period)
    samples: list[Sample] = []
    completed, reason = True, None
    # the target track only changes at abort_time; build each variant once
    initial_target = scenario.target_at(0.0)
    final_target = (
        scenario.target_at(scenario.abort_time)
        if scenario.abort_time is not None
        else initial_target
    )
    for i in range(n_periods + 1):
        t = i * period
        target = (
            final_target
            if scenario.abort_time is not None and t >= scenario.abort_time
            else initial_target
        )
        try:
            cs = ctl.plan_step(target, geom, state, params)
        except PlannerError as exc:
            completed, reason = False, f"{type(exc).__name__}: {exc}"
            break
        samples.append(_make_sample(t, geom, state, cs))
        if i == n_periods:
            break
        try:
            for _ in range(scenario.control_divisor):
                state = veh.step(geom, state, cs.v, cs.u_applied, scenario.h)
        except PlannerError as exc:
            completed, reason = False, f"{type(exc).__name__}: {exc}"
            break
    metrics = metrics_from_samples(scenario, samples)
    return RunRecord(
        scenario=scenario,
        samples=tuple(samples),
        metrics=metrics,
        completed=completed,
        failure_reason=reason,
    )


def run_abort(scenario: Scenario) -> RunRecord:
    """Lane change aborted mid-maneuver (target swapped back)."""
    if scenario.abort_time is None:
        raise ValueError("scenario has no abort_time")
    return run(scenario)


def run_corner(scenario: Scenario) -> RunRecord:
    """Constant-curvature tracking run; rely on the steady-window metrics."""
    return run(scenario)


def _steady_window_mean(values: list[float]) -> tuple[float, bool]:
    """Mean over the last 25% of samples, with a convergence certificate:
    the last-25% and last-10% means must agree within 1% (relative to the
    larger magnitude, absolute below 1e-9)."""
    n = len(values)
    if n < 8:
        return math.nan, False
    w25 = values[-max(2, n // 4):]
    w10 = values[-max(2, n // 10):]
    m25 = sum(w25) / len(w25)
    m10 = sum(w10) / len(w10)
    scale = max(abs(m25), abs(m10))
    converged = abs(m25 - m10) <= max(_STEADY_AGREE_TOL * scale, 1e-9)
    return m25, converged


def _count_sign_changes(rates: list[float]) -> int:
    peak = max((abs(r) for r in rates), default=0.0)
    if peak == 0.0:
        return 0
    threshold = _RATE_DEADBAND * peak
    signs = [1 if r > 0 else -1 for r in rates if abs(r) > threshold]
    return sum(1 for a, b in zip(signs, signs[1:]) if a != b)


def metrics_from_samples(scenario: Scenario, samples) -> RunMetrics:
    """Summary metrics from recorded rows.

    Works identically on in-memory samples and CSV-parsed rows; everything
    not stored in the row (lane curvature at the shadow point, the offset
    from the original track) is recovered by re-projecting (x, y).
    """
    if not samples:
        return RunMetrics(
            peak_abs_dtheta=math.nan,
            peak_abs_dtheta_dot=math.nan,
            final_lateral=math.nan,
            settle_time=math.nan,
            lateral_rate_sign_changes=0,
            mean_steady_curvature=math.nan,
            steady_lateral=math.nan,
            steady_converged=False,
            saturation_fraction=math.nan,
        )
    params = scenario.params
    dthetas, dtheta_dots, laterals, rates = [], [], [], []
    saturated = 0
    for row in samples:
        dtheta = wrap_angle(row.theta_v - row.theta_n)
        dthetas.append(dtheta)
        target = scenario.target_at(row.t)
        kappa_n = target.project((row.x, row.y)).frame.curvature
        # theta_dot_n = v_s * kappa_n since the shadow advances at v_s
        dtheta_dots.append(row.kappa_e_inst * row.v - params.v_s * kappa_n)
        laterals.append(row.d_lateral)
        rates.append(row.d_lateral_rate)
        if abs((row.u_s + row.u_c) - row.u_applied) > 1e-12:
            saturated += 1
    last = samples[-1]
    origin_shadow = scenario.track.project((last.x, last.y))
    final_lateral = -origin_shadow.signed_lateral

    steady_lat, conv_lat = _steady_window_mean(laterals)
    steady_kap, conv_kap = _steady_window_mean([r.kappa_e_inst for r in samples])

    steady_val = laterals[-1]
    threshold = max(0.01 * abs(laterals[0]), 1e-9)
    settle_idx = len(samples) - 1
    for i in range(len(samples) - 1, -1, -1):
        if abs(laterals[i] - steady_val) < threshold:
            settle_idx = i
        else:
            break
    settle_time = samples[settle_idx].t

    return RunMetrics(
        peak_abs_dtheta=max(abs(d) for d in dthetas),
        peak_abs_dtheta_dot=max(abs(d) for d in dtheta_dots),
        final_lateral=final_lateral,
        settle_time=settle_time,
        lateral_rate_sign_changes=_count_sign_changes(rates),
        mean_steady_curvature=steady_kap,
        steady_lateral=steady_lat,
        steady_converged=conv_lat and conv_kap,
        saturation_fraction=saturated / len(samples),
    )


# scenario-file key names (units encoded) -> dataclass field names
_PLANNER_KEYS = {
    "k_per_m": "k",
    "lambda_s2": "lam",
    "lambda0": "lambda0",
    "alpha": "alpha",
    "delta_d0_m": "delta_d0",
    "c1_rad": "c1",
    "c2_rad_per_s": "c2",
    "c3_m": "c3",
    "lane_width_m": "lane_width",
    "v_s_m_per_s": "v_s",
}
_VEHICLE_KEYS = {
    "l_f_m": "l_f",
    "l_r_m": "l_r",
    "delta_max_rad": "delta_max",
    "u_max_rad_per_s": "u_max",
}
_SIM_KEYS = {
    "duration_s": "duration",
    "h_s": "h",
    "control_divisor": "control_divisor",
    "abort_time_s": "abort_time",
    "lane_change_offset_m": "lane_change_offset",
}


def apply_override(scenario: Scenario, key: str, value: float) -> Scenario:
    """New scenario with one dotted-key parameter replaced.

    Keys use the scenario-file vocabulary (units in the name), e.g.
    planner.k_per_m, vehicle.l_f_m, sim.duration_s.  Replacing a planner
    field rederives gamma.
    """
    section, _, field = key.partition(".")
    if section == "planner":
        if field not in _PLANNER_KEYS:
            raise KeyError(f"unknown planner parameter {field!r}")
        p = scenario.params
        kwargs = {
            f.name: getattr(p, f.name)
            for f in dataclasses.fields(p)
            if f.name != "gamma"
        }
        kwargs[_PLANNER_KEYS[field]] = value
        return dataclasses.replace(scenario, params=PlannerParams.build(**kwargs))
    if section == "vehicle":
        if field not in _VEHICLE_KEYS:
            raise KeyError(f"unknown vehicle parameter {field!r}")
        return dataclasses.replace(
            scenario,
            geometry=dataclasses.replace(
                scenario.geometry, **{_VEHICLE_KEYS[field]: value}
            ),
        )
    if section == "sim":
        if field not in _SIM_KEYS:
            raise KeyError(f"unknown sim parameter {field!r}")
        if field == "control_divisor":
            value = int(value)
        return dataclasses.replace(scenario, **{_SIM_KEYS[field]: value})
    raise KeyError(f"unknown override section {section!r}")


def sweep(scenario: Scenario, axes: dict[str, list[float]]) -> list[tuple[dict, RunRecord]]:
    """Independent runs over the cartesian product of the axis values.

    Results are keyed and ordered by the grid coordinates, so they do not
    depend on evaluation order.  Individual run failures are recorded in
    their RunRecord; the sweep continues.
    """
    if not axes:
        raise ValueError("sweep needs at least one axis")
    for key, values in axes.items():
        if not values:
            raise ValueError(f"axis {key!r} has no values")
        if len(set(values)) != len(values):
            raise ValueError(f"axis {key!r} has duplicate values")
    keys = sorted(axes)
    results = []
    for combo in itertools.product(*(axes[k] for k in keys)):
        overrides = dict(zip(keys, combo))
        sc = scenario
        for key, value in overrides.items():
            sc = apply_override(sc, key, value)
        results.append((overrides, run(sc)))
    return results


def write_csv(path, samples) -> None:
    """Emit samples with full round-trip float precision."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_COLUMNS)
        for row in samples:
            writer.writerow([repr(getattr(row, col)) for col in CSV_COLUMNS])


def read_csv(path) -> list[Sample]:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if tuple(header) != CSV_COLUMNS:
            raise ValueError(f"unexpected CSV header {header}")
        return [Sample(*(float(v) for v in row)) for row in reader]
