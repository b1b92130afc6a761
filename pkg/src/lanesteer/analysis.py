"""Closed-form predictions and parameter feasibility checks.

Everything here is algebra on the planner parameters: linearized
lane-change transients with their peak bounds, the oscillation-avoidance
tie between k, lambda and lambda0, the corner-cutting parameter window,
and a grid search combining all of it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .control import PlannerParams

GAMMA_LOWER = (math.sqrt(5.0) - 1.0) / 2.0

_TIE_TOL = 1e-9


@dataclass(frozen=True)
class CheckRow:
    name: str
    lhs: float
    comparator: str
    rhs: float
    satisfied: bool


@dataclass(frozen=True)
class CheckResult:
    name: str
    rows: tuple[CheckRow, ...]
    satisfied: bool
    applicable: bool = True


@dataclass(frozen=True)
class LinearizedPrediction:
    """Linearized lane-change transient and its analytic peak magnitudes."""

    e0: float
    lam: float
    lambda0: float
    samples: tuple[tuple[float, float, float], ...]  # (t, dtheta, dtheta_dot)
    peak_dtheta: float
    peak_dtheta_dot: float
    peak_time_dtheta: float
    peak_time_dtheta_dot: float


@dataclass(frozen=True)
class FeasibilityReport:
    params: PlannerParams
    checks: tuple[CheckResult, ...]
    feasible: bool
    predicted_curvature_ratio: float = field(default=math.nan)


def dtheta_solution(t: float, e0: float, lam: float, lambda0: float) -> float:
    """Orientation-difference transient for a lane change started aligned."""
    a = 1.0 / math.sqrt(lam)
    return (e0 / (1.0 - lambda0)) * (math.exp(-a * t) - math.exp(-lambda0 * a * t))


def dtheta_dot_solution(t: float, e0: float, lam: float, lambda0: float) -> float:
    """Time derivative of the orientation-difference transient."""
    a = 1.0 / math.sqrt(lam)
    return (
        -(e0 / (math.sqrt(lam) * (1.0 - lambda0)))
        * (math.exp(-a * t) - lambda0 * math.exp(-lambda0 * a * t))
    )


def predict_lane_change(
    e0: float, lam: float, lambda0: float, num_samples: int = 2001
) -> LinearizedPrediction:
    """Evaluate the closed-form lane-change transient on a uniform grid.

    Peak magnitudes are the interior extrema, located analytically from
    the log-ratio of the two decay rates (not by sampling).  Note the
    rate magnitude at t = 0 is |e0|/sqrt(lam), which exceeds the
    interior extremum for every lambda0 in (0, 1).
    """
    if not 0 < lambda0 < 1:
        raise ValueError("lambda0 must lie in (0, 1)")
    if lam <= 0:
        raise ValueError("lambda must be positive")
    sq = math.sqrt(lam)
    horizon = 10.0 * sq / lambda0
    samples = []
    for i in range(num_samples):
        t = horizon * i / (num_samples - 1)
        samples.append(
            (t, dtheta_solution(t, e0, lam, lambda0), dtheta_dot_solution(t, e0, lam, lambda0))
        )
    t_peak = sq * math.log(lambda0) / (lambda0 - 1.0)
    t_peak_dot = 2.0 * t_peak
    peak = (abs(e0) / lambda0) * math.exp(math.log(lambda0) / (1.0 - lambda0))
    peak_dot = (abs(e0) / (lambda0 * sq)) * math.exp(
        2.0 * math.log(lambda0) / (1.0 - lambda0)
    )
    return LinearizedPrediction(
        e0=e0,
        lam=lam,
        lambda0=lambda0,
        samples=tuple(samples),
        peak_dtheta=peak,
        peak_dtheta_dot=peak_dot,
        peak_time_dtheta=t_peak,
        peak_time_dtheta_dot=t_peak_dot,
    )


def check_oscillation(params: PlannerParams, v: float) -> CheckResult:
    """Fast/slow mode split: k v sqrt(lam) must equal lambda0 in (0, 1)."""
    tie = params.k * v * math.sqrt(params.lam)
    rows = (
        CheckRow("lambda0_range", params.lambda0, "in (0, 1)", 1.0,
                 0.0 < params.lambda0 < 1.0),
        CheckRow("mode_split_tie", tie, "==", params.lambda0,
                 abs(tie - params.lambda0) < _TIE_TOL),
    )
    return CheckResult("oscillation", rows, all(r.satisfied for r in rows))


def check_abort_safety(params: PlannerParams, v: float) -> CheckResult:
    """Peak orientation-difference bounds for an abortable lane change.

    Uses |e0| = k * W.  The returned rows report both limit branches
    individually so the binding one is visible.
    """
    lam0, sq, w = params.lambda0, math.sqrt(params.lam), params.lane_width
    lhs = (1.0 / sq) * math.exp(math.log(lam0) / (1.0 - lam0))
    rhs1 = params.c1 * v / w
    rhs2 = math.sqrt(params.c2 * v / w)
    rows = (
        CheckRow("abort_peak_vs_c1", lhs, "<=", rhs1, lhs <= rhs1),
        CheckRow("abort_peak_vs_c2", lhs, "<=", rhs2, lhs <= rhs2),
    )
    return CheckResult("abort_safety", rows, all(r.satisfied for r in rows))


def implied_abort_peaks(params: PlannerParams) -> tuple[float, float]:
    """Interior-extremum magnitudes of the orientation difference and its
    rate for a full lane change (|e0| = k * W)."""
    e0 = params.k * params.lane_width
    pred = predict_lane_change(e0, params.lam, params.lambda0, num_samples=2)
    return pred.peak_dtheta, pred.peak_dtheta_dot


def check_corner_cutting(params: PlannerParams, kappa0: float) -> CheckResult:
    """Parameter window from the constant-curvature corner analysis.

    Not applicable (vacuously satisfied) on a straight lane.
    """
    if kappa0 == 0:
        return CheckResult("corner_cutting", (), satisfied=True, applicable=False)
    gamma = params.gamma
    ak0 = abs(kappa0)
    k_lower = max(ak0 * math.sqrt(1.0 + gamma), math.sqrt(gamma * ak0 / params.c3))
    k_upper = (
        ak0 / math.sqrt(1.0 / gamma - 1.0) if 0 < gamma < 1 else math.nan
    )
    steady = abs(params.alpha * params.delta_d0 * kappa0 / params.k)
    rows = (
        CheckRow("gamma_range", gamma, "in", GAMMA_LOWER,
                 GAMMA_LOWER < gamma < 1.0),
        CheckRow("k_above_lower", k_lower, "<", params.k, k_lower < params.k),
        CheckRow("k_below_upper", params.k, "<", k_upper,
                 bool(params.k < k_upper) if not math.isnan(k_upper) else False),
        CheckRow("steady_lateral_bound", steady, "<", params.c3,
                 steady < params.c3),
    )
    return CheckResult("corner_cutting", rows, all(r.satisfied for r in rows))


def predict_curvature_ratio(params: PlannerParams, kappa0: float) -> float:
    """Trajectory-to-lane curvature ratio from the linearized corner analysis."""
    denom = 1.0 - params.alpha * params.delta_d0 * kappa0 ** 2 / params.k
    if abs(denom) < 1e-12:
        raise ValueError("speed-ratio denominator vanishes for these parameters")
    vs_over_v = 1.0 / denom
    return vs_over_v * (1.0 - params.gamma / vs_over_v)


def predict_steady_lateral(params: PlannerParams, kappa0: float) -> float:
    """Steady-state lateral deviation on a constant-curvature corner."""
    return -params.alpha * params.delta_d0 * kappa0 / params.k


def find_feasible(
    v: float,
    lane_width: float,
    kappa0: float,
    c1: float,
    c2: float,
    c3: float,
    gamma_grid,
    lambda0_grid,
    k_grid,
    alpha: float = 0.5,
) -> list[FeasibilityReport]:
    """Grid search over (gamma, lambda0, k) for parameter sets passing all
    checks.

    lambda and delta_d0 are derived per grid point: lam = (lambda0/(k v))^2
    and delta_d0 = gamma / (alpha k).  Results are sorted by predicted
    curvature ratio, then by grid coordinates, so the ordering is
    deterministic regardless of evaluation order.
    """
    if v <= 0 or lane_width <= 0:
        raise ValueError("v and lane width must be positive")
    if alpha <= 0 or alpha >= 1:
        raise ValueError("alpha must lie in (0, 1) for the search")
    if not gamma_grid or not lambda0_grid or not k_grid:
        raise ValueError("all grid axes must be non-empty")
    reports = []
    for gamma in gamma_grid:
        for lambda0 in lambda0_grid:
            for k in k_grid:
                if not (0 < lambda0 < 1) or k <= 0 or gamma <= 0:
                    continue
                lam = (lambda0 / (k * v)) ** 2
                delta_d0 = gamma / (alpha * k)
                params = PlannerParams(
                    k=k,
                    lam=lam,
                    lambda0=lambda0,
                    alpha=alpha,
                    delta_d0=delta_d0,
                    gamma=alpha * k * delta_d0,
                    c1=c1,
                    c2=c2,
                    c3=c3,
                    lane_width=lane_width,
                    v_s=v,
                )
                checks = (
                    check_oscillation(params, v),
                    check_abort_safety(params, v),
                    check_corner_cutting(params, kappa0),
                )
                if not all(c.satisfied for c in checks):
                    continue
                reports.append(
                    FeasibilityReport(
                        params=params,
                        checks=checks,
                        feasible=True,
                        predicted_curvature_ratio=predict_curvature_ratio(
                            params, kappa0
                        ),
                    )
                )
    reports.sort(
        key=lambda r: (
            r.predicted_curvature_ratio,
            r.params.gamma,
            r.params.lambda0,
            r.params.k,
        )
    )
    return reports
