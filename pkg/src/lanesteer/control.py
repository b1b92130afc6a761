"""Error state, speed coupling, and the stabilizing + optimal steering law.

The controller drives a sliding-surface error

    e = (theta_v - theta_target) - k * lateral

to zero, where theta_target blends the shadow-point orientation with a
look-ahead way-point orientation.  The front-wheel rate is decomposed as
u = u_s + u_c: u_s cancels the known kinematics so that de/dt equals the
gain times u_c, and u_c is the scalar LQR feedback -e/sqrt(lambda).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from . import vehicle as veh
from .errors import GeometryDegenerateError, ShadowRegularityError
from .refline import ReferenceLine, wrap_angle
from .vehicle import VehicleGeometry, VehicleState

# minimum alignment <x_s, x_v> before the speed coupling is declared degenerate
EPS_ALIGN = 0.1

_GAMMA_TOL = 1e-12


@dataclass(frozen=True)
class PlannerParams:
    """Planner gains and safety limits.

    gamma is stored redundantly and must equal alpha * k * delta_d0.
    """

    k: float  # 1/m, manifold gain
    lam: float  # s^2, LQR balance
    lambda0: float  # dimensionless, = k * v_s * sqrt(lam) by design
    alpha: float  # two-point blend weight
    delta_d0: float  # m, look-ahead distance
    gamma: float  # = alpha * k * delta_d0
    c1: float = math.inf  # rad, orientation-difference bound
    c2: float = math.inf  # rad/s, orientation-rate bound
    c3: float = math.inf  # m, steady lateral-deviation bound
    lane_width: float = 3.5  # m
    v_s: float = 1.0  # m/s, constant speed plan along the line

    def __post_init__(self):
        if self.k <= 0:
            raise ValueError("k must be positive")
        if self.lam <= 0:
            raise ValueError("lambda must be positive")
        if not 0 < self.lambda0 < 1:
            raise ValueError("lambda0 must lie in (0, 1)")
        if not 0 <= self.alpha < 1:
            raise ValueError("alpha must lie in [0, 1)")
        if self.delta_d0 < 0:
            raise ValueError("delta_d0 must be nonnegative")
        if self.lane_width <= 0:
            raise ValueError("lane width must be positive")
        if self.v_s <= 0:
            raise ValueError("v_s must be positive")
        if self.c1 <= 0 or self.c2 <= 0 or self.c3 <= 0:
            raise ValueError("safety bounds must be positive")
        if abs(self.gamma - self.alpha * self.k * self.delta_d0) > _GAMMA_TOL:
            raise ValueError("gamma inconsistent with alpha * k * delta_d0")

    @classmethod
    def build(cls, k, lam, lambda0, alpha=0.0, delta_d0=0.0, **kwargs):
        """Construct with gamma derived from the other fields."""
        return cls(
            k=k,
            lam=lam,
            lambda0=lambda0,
            alpha=alpha,
            delta_d0=delta_d0,
            gamma=alpha * k * delta_d0,
            **kwargs,
        )


@dataclass(frozen=True)
class ControlSample:
    """Everything one control evaluation produced, for logging."""

    e: float
    theta_n: float
    theta_f: float
    delta_theta: float  # theta_v - theta_n, wrapped
    lateral: float  # <y_s, r>
    v: float
    u_s: float
    u_c: float
    u: float  # u_s + u_c, before saturation
    u_applied: float
    theta_dot_ref: float  # rate of the blended target orientation
    station: float
    kappa_n: float


def error_one_point(theta_v: float, theta_n: float, lateral: float, k: float) -> float:
    """One-point sliding-surface error."""
    return wrap_angle(theta_v - theta_n) - k * lateral


def error_two_point(
    theta_v: float,
    theta_n: float,
    theta_f: float,
    lateral: float,
    k: float,
    alpha: float,
) -> float:
    """Two-point error with the blended near/far target orientation.

    The blend is computed on the wrapped near-to-far difference so the
    result is insensitive to branch cuts; alpha = 0 reduces exactly to
    the one-point error.
    """
    blend = theta_n + alpha * wrap_angle(theta_f - theta_n)
    return wrap_angle(theta_v - blend) - k * lateral


def vehicle_speed(v_s: float, lateral_term: float, alignment: float) -> float:
    """Vehicle speed that keeps the ray to the shadow point orthogonal.

    lateral_term is <r, y_s> * kappa; alignment is <x_s, x_v>.
    """
    if alignment <= EPS_ALIGN:
        raise GeometryDegenerateError(
            f"vehicle near-perpendicular to the line (alignment {alignment:.3f})"
        )
    numerator = 1.0 + lateral_term
    if numerator <= 0:
        raise ShadowRegularityError(
            "vehicle at or beyond the center of curvature of the shadow point"
        )
    return v_s * numerator / alignment


def stabilizing_control(
    geom: VehicleGeometry,
    state: VehicleState,
    v: float,
    theta_dot_ref: float,
    delta_theta: float,
    k: float,
) -> float:
    """Feed-forward part of the wheel rate.

    Cancels the slip-angle kinematics, tracks the target orientation
    rate, and cancels the lateral-rate coupling k*v*sin(delta_theta).
    delta_theta must be the unblended theta_v - theta_n: the lateral
    deviation evolves with the shadow-point orientation regardless of
    the look-ahead blend, and using the blended difference here would
    leave a residual in the error dynamics on curved lanes.
    """
    beta = veh.slip_angle(geom, state.delta)
    g = veh.steering_gain(geom, state.delta)
    return (
        -(v / geom.l_r) * math.sin(beta)
        + theta_dot_ref
        - k * v * math.sin(delta_theta)
    ) / g


def optimal_correction(e: float, lam: float, geom: VehicleGeometry, delta: float) -> float:
    """LQR feedback part of the wheel rate: u_c = -e / (g(delta) * sqrt(lam))."""
    if lam <= 0:
        raise ValueError("lambda must be positive")
    return -e / (veh.steering_gain(geom, delta) * math.sqrt(lam))


def plan_step(
    line: ReferenceLine,
    geom: VehicleGeometry,
    state: VehicleState,
    params: PlannerParams,
) -> ControlSample:
    """One full control evaluation: project, look ahead, couple the speed,
    form the error, and emit the saturated wheel-rate command."""
    frame_v = veh.frame_of(geom, state)
    shadow = line.project(frame_v.position)
    near = shadow.frame
    far = line.lookahead(near.station, params.delta_d0)

    theta_v = frame_v.velocity_orientation
    delta_theta = wrap_angle(theta_v - near.orientation)
    alignment = math.cos(delta_theta)
    v = vehicle_speed(params.v_s, shadow.signed_lateral * near.curvature, alignment)

    e = error_two_point(
        theta_v,
        near.orientation,
        far.orientation,
        shadow.signed_lateral,
        params.k,
        params.alpha,
    )
    theta_dot_ref = (
        (1.0 - params.alpha) * params.v_s * near.curvature
        + params.alpha * params.v_s * far.curvature
    )
    u_s = stabilizing_control(geom, state, v, theta_dot_ref, delta_theta, params.k)
    u_c = optimal_correction(e, params.lam, geom, state.delta)
    u = u_s + u_c
    u_applied = min(max(u, -geom.u_max), geom.u_max)
    return ControlSample(
        e=e,
        theta_n=near.orientation,
        theta_f=far.orientation,
        delta_theta=delta_theta,
        lateral=shadow.signed_lateral,
        v=v,
        u_s=u_s,
        u_c=u_c,
        u=u,
        u_applied=u_applied,
        theta_dot_ref=theta_dot_ref,
        station=near.station,
        kappa_n=near.curvature,
    )
