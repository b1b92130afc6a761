"""Kinematic bicycle model: slip angle, actuation gain, RK4 stepping.

State is (x, y, psi, delta) with the front-wheel rate as the input; the
slip angle beta is always derived from delta, never stored.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import NumericBlowupError, SteeringDomainError
from .refline import wrap_angle


@dataclass(frozen=True)
class VehicleGeometry:
    """Axle distances from the center of gravity, plus actuator limits."""

    l_f: float
    l_r: float
    delta_max: float = 0.6  # rad
    u_max: float = 1.0  # rad/s

    def __post_init__(self):
        if not (self.l_f > 0 and self.l_r > 0):
            raise ValueError("axle distances must be positive")
        if not (0 < self.delta_max < math.pi / 2):
            raise ValueError("delta_max must be in (0, pi/2)")
        if self.u_max <= 0:
            raise ValueError("u_max must be positive")


@dataclass(frozen=True)
class VehicleState:
    x: float
    y: float
    psi: float
    delta: float


@dataclass(frozen=True)
class VehicleFrame:
    position: tuple[float, float]
    tangent: tuple[float, float]
    normal: tuple[float, float]
    velocity_orientation: float


def _check_delta(delta: float) -> None:
    if not abs(delta) < math.pi / 2:
        raise SteeringDomainError(f"front-wheel angle {delta} outside (-pi/2, pi/2)")


def slip_angle(geom: VehicleGeometry, delta: float) -> float:
    """Slip angle of the center of gravity for a given front-wheel angle."""
    _check_delta(delta)
    return math.atan(geom.l_r * math.tan(delta) / (geom.l_f + geom.l_r))


def steering_gain(geom: VehicleGeometry, delta: float) -> float:
    """d(beta)/d(delta): how fast the slip angle responds to the wheel angle.

    Strictly positive on the domain, so the velocity orientation is always
    controllable through the front wheel.
    """
    _check_delta(delta)
    ratio = geom.l_r / (geom.l_f + geom.l_r)
    t = geom.l_r * math.tan(delta) / (geom.l_f + geom.l_r)
    return ratio / ((1.0 + t * t) * math.cos(delta) ** 2)


def omega(geom: VehicleGeometry, state: VehicleState, v: float, u: float) -> float:
    """Angular velocity of the velocity orientation psi + beta."""
    beta = slip_angle(geom, state.delta)
    return (v / geom.l_r) * math.sin(beta) + steering_gain(geom, state.delta) * u


def derivatives(
    geom: VehicleGeometry, state: VehicleState, v: float, u: float
) -> tuple[float, float, float, float]:
    """Time derivative (xdot, ydot, psidot, deltadot) of the bicycle model."""
    beta = slip_angle(geom, state.delta)
    heading = state.psi + beta
    return (
        v * math.cos(heading),
        v * math.sin(heading),
        (v / geom.l_r) * math.sin(beta),
        u,
    )


def step(
    geom: VehicleGeometry, state: VehicleState, v: float, u: float, h: float
) -> VehicleState:
    """One classical RK4 step; delta is clamped to the actuator range and
    psi re-wrapped afterwards."""
    if h <= 0:
        raise ValueError("step size must be positive")
    ratio = geom.l_r / (geom.l_f + geom.l_r)
    v_lr = v / geom.l_r
    half_pi = math.pi / 2

    def f(psi, delta):
        if not abs(delta) < half_pi:
            raise SteeringDomainError(
                f"front-wheel angle {delta} outside (-pi/2, pi/2)"
            )
        beta = math.atan(ratio * math.tan(delta))
        heading = psi + beta
        return (
            v * math.cos(heading),
            v * math.sin(heading),
            v_lr * math.sin(beta),
        )

    x0, y0, psi0, d0 = state.x, state.y, state.psi, state.delta
    ax1, ay1, ap1 = f(psi0, d0)
    ax2, ay2, ap2 = f(psi0 + 0.5 * h * ap1, d0 + 0.5 * h * u)
    ax3, ay3, ap3 = f(psi0 + 0.5 * h * ap2, d0 + 0.5 * h * u)
    ax4, ay4, ap4 = f(psi0 + h * ap3, d0 + h * u)
    h6 = h / 6.0
    x = x0 + h6 * (ax1 + 2.0 * (ax2 + ax3) + ax4)
    y = y0 + h6 * (ay1 + 2.0 * (ay2 + ay3) + ay4)
    psi = psi0 + h6 * (ap1 + 2.0 * (ap2 + ap3) + ap4)
    delta = d0 + h * u
    delta = min(max(delta, -geom.delta_max), geom.delta_max)
    psi = wrap_angle(psi)
    if not (math.isfinite(x) and math.isfinite(y) and math.isfinite(psi)):
        raise NumericBlowupError("integration produced a non-finite state")
    return VehicleState(x, y, psi, delta)


def frame_of(geom: VehicleGeometry, state: VehicleState) -> VehicleFrame:
    """Orthonormal frame attached to the velocity direction of the vehicle."""
    theta_v = wrap_angle(state.psi + slip_angle(geom, state.delta))
    c, s = math.cos(theta_v), math.sin(theta_v)
    return VehicleFrame(
        position=(state.x, state.y),
        tangent=(c, s),
        normal=(-s, c),
        velocity_orientation=theta_v,
    )
