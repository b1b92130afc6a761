import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from lanesteer import analysis
from lanesteer.control import PlannerParams

lambda0s = st.floats(0.05, 0.95)
lams = st.floats(0.1, 25.0)


def corner_params(k=0.12, lambda0=0.5, gamma=0.995, alpha=0.5, v=1.0, **kw):
    return PlannerParams.build(
        k=k,
        lam=(lambda0 / (k * v)) ** 2,
        lambda0=lambda0,
        alpha=alpha,
        delta_d0=gamma / (alpha * k),
        v_s=v,
        **kw,
    )


class TestPredictLaneChange:
    def test_zero_initial_error(self):
        pred = analysis.predict_lane_change(0.0, 1.0, 0.5)
        assert pred.peak_dtheta == 0.0
        assert all(d == 0.0 and r == 0.0 for _, d, r in pred.samples)

    def test_starts_at_zero(self):
        pred = analysis.predict_lane_change(-1.75, 1.0, 0.5)
        assert pred.samples[0][1] == 0.0

    @given(st.floats(-2, 2).filter(lambda e: abs(e) > 1e-6), lams, lambda0s)
    def test_peak_formulas_match_series(self, e0, lam, lambda0):
        pred = analysis.predict_lane_change(e0, lam, lambda0, num_samples=20001)
        grid_peak = max(abs(d) for _, d, _ in pred.samples)
        assert pred.peak_dtheta == pytest.approx(grid_peak, rel=1e-4)
        # the rate's interior extremum; exclude the t = 0 boundary value
        grid_peak_dot = max(abs(r) for t, _, r in pred.samples if t > pred.peak_time_dtheta)
        assert pred.peak_dtheta_dot == pytest.approx(grid_peak_dot, rel=1e-3)

    def test_known_peak_value(self):
        # lambda0 = 1/2: peak = 2 |e0| exp(2 ln(1/2)) = |e0| / 2
        pred = analysis.predict_lane_change(1.0, 1.0, 0.5)
        assert pred.peak_dtheta == pytest.approx(0.5)
        assert pred.peak_time_dtheta == pytest.approx(2.0 * math.log(2.0))

    @given(lams, lambda0s)
    def test_unique_interior_extremum(self, lam, lambda0):
        pred = analysis.predict_lane_change(1.0, lam, lambda0, num_samples=4001)
        dthetas = [d for _, d, _ in pred.samples]
        diffs = np.diff(dthetas)
        signs = np.sign(diffs[np.abs(diffs) > 1e-15])
        flips = np.count_nonzero(np.diff(signs))
        assert flips == 1

    def test_lambda0_domain(self):
        with pytest.raises(ValueError):
            analysis.predict_lane_change(1.0, 1.0, 1.0)

    def test_derivative_consistency(self):
        # dtheta_dot really is the time derivative of dtheta
        e0, lam, lambda0 = -0.8, 2.0, 0.4
        for t in (0.1, 0.5, 1.7, 4.0):
            eps = 1e-6
            fd = (
                analysis.dtheta_solution(t + eps, e0, lam, lambda0)
                - analysis.dtheta_solution(t - eps, e0, lam, lambda0)
            ) / (2 * eps)
            assert analysis.dtheta_dot_solution(t, e0, lam, lambda0) == pytest.approx(
                fd, rel=1e-6
            )


class TestCheckOscillation:
    def test_consistent_params_pass(self):
        p = PlannerParams.build(k=0.5, lam=1.0, lambda0=0.5)
        assert analysis.check_oscillation(p, v=1.0).satisfied

    def test_fails_at_other_speed(self):
        # the tie k v sqrt(lam) = lambda0 is speed-specific
        p = PlannerParams.build(k=0.5, lam=1.0, lambda0=0.5)
        res = analysis.check_oscillation(p, v=2.0)
        assert not res.satisfied

    def test_row_values_reported(self):
        p = PlannerParams.build(k=0.5, lam=1.0, lambda0=0.5)
        res = analysis.check_oscillation(p, v=1.0)
        tie = next(r for r in res.rows if r.name == "mode_split_tie")
        assert tie.lhs == pytest.approx(0.5)
        assert tie.rhs == pytest.approx(0.5)


class TestCheckAbortSafety:
    def test_infinite_limits_always_pass(self):
        p = PlannerParams.build(k=0.5, lam=1.0, lambda0=0.5)
        assert analysis.check_abort_safety(p, v=1.0).satisfied

    def test_closed_form_value(self):
        # lambda = 1, lambda0 = 1/2: lhs = exp(-2 ln 2) = 1/4
        p = PlannerParams.build(k=0.5, lam=1.0, lambda0=0.5, c1=1.0, c2=1.0)
        res = analysis.check_abort_safety(p, v=1.0)
        assert res.rows[0].lhs == pytest.approx(0.25)
        # min{1/3.5, sqrt(1/3.5)} = 0.2857 >= 0.25: passes
        assert res.satisfied

    def test_tight_c1_fails(self):
        p = PlannerParams.build(k=0.5, lam=1.0, lambda0=0.5, c1=0.5, c2=1.0)
        res = analysis.check_abort_safety(p, v=1.0)
        c1_row = next(r for r in res.rows if r.name == "abort_peak_vs_c1")
        assert not c1_row.satisfied
        assert not res.satisfied

    def test_lhs_cross_checks_peak_formula(self):
        # the bound's lhs rescales to the lane-change peak with e0 = k W:
        # peak = lhs * e0 * sqrt(lam) / lambda0
        p = PlannerParams.build(k=0.4, lam=2.0, lambda0=0.7, lane_width=3.5)
        res = analysis.check_abort_safety(p, v=1.0)
        peak, _ = analysis.implied_abort_peaks(p)
        e0 = p.k * p.lane_width
        assert peak == pytest.approx(
            res.rows[0].lhs * e0 * math.sqrt(p.lam) / p.lambda0, rel=1e-12
        )


class TestCheckCornerCutting:
    def test_straight_lane_not_applicable(self):
        p = corner_params()
        res = analysis.check_corner_cutting(p, 0.0)
        assert not res.applicable
        assert res.satisfied

    def test_golden_ratio_bound_exact(self):
        assert analysis.GAMMA_LOWER == (math.sqrt(5.0) - 1.0) / 2.0

    def test_gamma_below_bound_fails(self):
        p = corner_params(gamma=0.5)
        res = analysis.check_corner_cutting(p, 0.01)
        row = next(r for r in res.rows if r.name == "gamma_range")
        assert not row.satisfied

    def test_window_values(self):
        # gamma = 0.8, kappa0 = 0.01, C3 = 1: upper bound 0.01/sqrt(0.25) = 0.02,
        # lower bound max{0.01 sqrt(1.8), sqrt(0.008)} = 0.0894: empty window
        p = corner_params(gamma=0.8, k=0.12, c3=1.0)
        res = analysis.check_corner_cutting(p, 0.01)
        upper = next(r for r in res.rows if r.name == "k_below_upper")
        lower = next(r for r in res.rows if r.name == "k_above_lower")
        assert upper.rhs == pytest.approx(0.02)
        assert lower.lhs == pytest.approx(max(0.01 * math.sqrt(1.8), math.sqrt(0.008)))
        assert lower.lhs > upper.rhs

    def test_feasible_set_passes(self):
        p = corner_params(gamma=0.995, k=0.12, c3=1.0)
        assert analysis.check_corner_cutting(p, 0.01).satisfied


class TestPredictions:
    def test_one_point_ratio_is_one(self):
        p = PlannerParams.build(k=0.12, lam=(0.5 / 0.12) ** 2, lambda0=0.5)
        assert analysis.predict_curvature_ratio(p, 0.01) == pytest.approx(1.0)
        assert analysis.predict_steady_lateral(p, 0.01) == 0.0

    def test_two_point_ratio_below_one(self):
        p = corner_params()
        ratio = analysis.predict_curvature_ratio(p, 0.01)
        assert 0.0 < ratio < 1.0

    def test_steady_lateral_formula(self):
        p = corner_params()
        expected = -p.alpha * p.delta_d0 * 0.01 / p.k
        assert analysis.predict_steady_lateral(p, 0.01) == pytest.approx(expected)

    def test_straight_lane_steady_zero(self):
        assert analysis.predict_steady_lateral(corner_params(), 0.0) == 0.0


class TestFindFeasible:
    GRID = dict(
        gamma_grid=[0.7, 0.995],
        lambda0_grid=[0.3, 0.5],
        k_grid=[0.05, 0.12],
    )

    def test_relaxed_limits_reduce_to_lambda0(self):
        # straight lane and infinite limits: every grid point passes
        reports = analysis.find_feasible(
            1.0, 3.5, 0.0, math.inf, math.inf, math.inf, **self.GRID
        )
        assert len(reports) == 8
        assert all(r.feasible for r in reports)

    def test_reports_self_consistent(self):
        reports = analysis.find_feasible(
            1.0, 3.5, 0.01, 0.3, 0.3, 1.0, **self.GRID
        )
        for rep in reports:
            assert analysis.check_oscillation(rep.params, 1.0).satisfied
            assert analysis.check_abort_safety(rep.params, 1.0).satisfied
            assert analysis.check_corner_cutting(rep.params, 0.01).satisfied

    def test_sorted_by_ratio(self):
        reports = analysis.find_feasible(
            1.0, 3.5, 0.0, math.inf, math.inf, math.inf, **self.GRID
        )
        ratios = [r.predicted_curvature_ratio for r in reports]
        assert ratios == sorted(ratios)

    def test_monotone_relaxation(self):
        tight = analysis.find_feasible(1.0, 3.5, 0.01, 0.2, 0.2, 0.5, **self.GRID)
        loose = analysis.find_feasible(1.0, 3.5, 0.01, 0.4, 0.4, 1.0, **self.GRID)
        tight_keys = {(r.params.gamma, r.params.lambda0, r.params.k) for r in tight}
        loose_keys = {(r.params.gamma, r.params.lambda0, r.params.k) for r in loose}
        assert tight_keys <= loose_keys

    def test_empty_grid_rejected(self):
        with pytest.raises(ValueError):
            analysis.find_feasible(
                1.0, 3.5, 0.01, 0.3, 0.3, 1.0,
                gamma_grid=[], lambda0_grid=[0.5], k_grid=[0.1],
            )

    def test_no_feasible_point_is_empty_list(self):
        reports = analysis.find_feasible(
            1.0, 3.5, 0.01, 0.3, 0.3, 1.0,
            gamma_grid=[0.3], lambda0_grid=[0.5], k_grid=[0.1],
        )
        assert reports == []


class TestEigenvalues:
    def test_linearized_modes(self):
        # small-signal dynamics of (e, lateral): de/dt = -e/sqrt(lam),
        # dlat/dt = -(e + k v lat) ... eigenvalues {-1/sqrt(lam), -k v}
        k, lam, v = 0.5, 1.0, 1.0
        a = np.array([[-1.0 / math.sqrt(lam), 0.0], [1.0, -k * v]])
        eig = sorted(np.linalg.eigvals(a).real)
        assert eig[0] == pytest.approx(-1.0 / math.sqrt(lam))
        assert eig[1] == pytest.approx(-k * v)
        # characteristic polynomial coefficients
        assert -np.trace(a) == pytest.approx(1.0 / math.sqrt(lam) + k * v)
        assert np.linalg.det(a) == pytest.approx(k * v / math.sqrt(lam))
