"""Piecewise line/arc reference lines and their geometric queries.

A reference line is an arc-length parameterized chain of straight segments
and circular arcs with G1 continuity at the junctions.  All queries
(frame lookup, closest-point projection, look-ahead) are closed-form per
primitive; there is no numerical iteration anywhere in this module.

Conventions:
  * the normal completes a right-handed frame with the tangent
    (normal = tangent rotated +90 degrees);
  * signed lateral deviation is <normal, shadow - vehicle>, so a vehicle
    left of the line (on the +normal side) has a negative value;
  * curvature is signed: positive turns left (counter-clockwise).
"""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass

from .errors import (
    ArcCenterSingularityError,
    ProjectionAmbiguityError,
    StationRangeError,
)

TAU = math.tau

# junction continuity tolerances (position / orientation)
_G1_POS_TOL = 1e-9
_G1_ANG_TOL = 1e-9

# two minimizers closer in distance than this, but at distinct feet,
# make the projection ambiguous
_AMBIGUITY_TOL = 1e-6

_ORTHO_TOL = 1e-8


def wrap_angle(a: float) -> float:
    """Wrap an angle to (-pi, pi]."""
    a = math.remainder(a, TAU)
    if a <= -math.pi:
        a += TAU
    return a


@dataclass(frozen=True)
class FramePoint:
    """Curve frame at one station: position, unit tangent/normal, heading, curvature."""

    position: tuple[float, float]
    tangent: tuple[float, float]
    normal: tuple[float, float]
    orientation: float
    curvature: float
    station: float


@dataclass(frozen=True)
class ShadowResult:
    """Closest-point projection of a vehicle position onto the line."""

    frame: FramePoint
    signed_lateral: float
    distance: float


@dataclass(frozen=True)
class StraightSegment:
    x0: float
    y0: float
    heading: float
    length: float

    @property
    def curvature(self) -> float:
        return 0.0

    def start_pose(self):
        return self.x0, self.y0, self.heading

    def end_pose(self):
        return (
            self.x0 + self.length * math.cos(self.heading),
            self.y0 + self.length * math.sin(self.heading),
            self.heading,
        )

    def frame_at(self, s: float, station: float) -> FramePoint:
        c, sn = math.cos(self.heading), math.sin(self.heading)
        return FramePoint(
            position=(self.x0 + s * c, self.y0 + s * sn),
            tangent=(c, sn),
            normal=(-sn, c),
            orientation=wrap_angle(self.heading),
            curvature=0.0,
            station=station,
        )

    def closest(self, px: float, py: float):
        c, sn = math.cos(self.heading), math.sin(self.heading)
        t = (px - self.x0) * c + (py - self.y0) * sn
        t = min(max(t, 0.0), self.length)
        fx, fy = self.x0 + t * c, self.y0 + t * sn
        return [(t, math.hypot(px - fx, py - fy), fx, fy)]

    def offset(self, d: float) -> "StraightSegment":
        c, sn = math.cos(self.heading), math.sin(self.heading)
        return StraightSegment(self.x0 - d * sn, self.y0 + d * c, self.heading, self.length)


@dataclass(frozen=True)
class ArcSegment:
    cx: float
    cy: float
    radius: float
    start_angle: float  # angle of the start point as seen from the center
    sweep: float  # signed, radians; positive = counter-clockwise

    @property
    def turn(self) -> float:
        return 1.0 if self.sweep >= 0 else -1.0

    @property
    def curvature(self) -> float:
        return self.turn / self.radius

    @property
    def length(self) -> float:
        return self.radius * abs(self.sweep)

    def _angle_at(self, s: float) -> float:
        return self.start_angle + self.turn * s / self.radius

    def start_pose(self):
        f = self.frame_at(0.0, 0.0)
        return f.position[0], f.position[1], f.orientation

    def end_pose(self):
        f = self.frame_at(self.length, 0.0)
        return f.position[0], f.position[1], f.orientation

    def frame_at(self, s: float, station: float) -> FramePoint:
        phi = self._angle_at(s)
        cp, sp = math.cos(phi), math.sin(phi)
        theta = wrap_angle(phi + self.turn * math.pi / 2.0)
        ct, st = math.cos(theta), math.sin(theta)
        return FramePoint(
            position=(self.cx + self.radius * cp, self.cy + self.radius * sp),
            tangent=(ct, st),
            normal=(-st, ct),
            orientation=theta,
            curvature=self.curvature,
            station=station,
        )

    def closest(self, px: float, py: float):
        dx, dy = px - self.cx, py - self.cy
        d = math.hypot(dx, dy)
        if d < 1e-9:
            raise ArcCenterSingularityError(
                "projection query exactly at an arc center"
            )
        phi = math.atan2(dy, dx)
        a = (self.turn * (phi - self.start_angle)) % TAU
        if a <= abs(self.sweep):
            s = a * self.radius
            fx = self.cx + self.radius * dx / d
            fy = self.cy + self.radius * dy / d
            return [(s, abs(d - self.radius), fx, fy)]
        # radial foot falls outside the sweep: endpoints are the candidates
        out = []
        for s in (0.0, self.length):
            f = self.frame_at(s, 0.0)
            fx, fy = f.position
            out.append((s, math.hypot(px - fx, py - fy), fx, fy))
        return out

    def offset(self, d: float) -> "ArcSegment":
        new_radius = self.radius - self.turn * d
        if new_radius <= 1e-9:
            raise ValueError("parallel offset collapses an arc segment")
        return ArcSegment(self.cx, self.cy, new_radius, self.start_angle, self.sweep)


Segment = StraightSegment | ArcSegment


class ReferenceLine:
    """Arc-length parameterized chain of straight and circular-arc segments."""

    def __init__(self, segments: list[Segment]):
        if not segments:
            raise ValueError("reference line needs at least one segment")
        for prev, nxt in zip(segments, segments[1:]):
            ex, ey, eh = prev.end_pose()
            sx, sy, sh = nxt.start_pose()
            if math.hypot(ex - sx, ey - sy) > _G1_POS_TOL:
                raise ValueError("segments are not position-continuous")
            if abs(wrap_angle(eh - sh)) > _G1_ANG_TOL:
                raise ValueError("segments are not orientation-continuous")
        self.segments = list(segments)
        self._starts = [0.0]
        for seg in self.segments:
            self._starts.append(self._starts[-1] + seg.length)
        self.total_length = self._starts[-1]

    @classmethod
    def from_pieces(
        cls,
        start_x: float,
        start_y: float,
        start_heading: float,
        pieces: list[tuple],
    ) -> "ReferenceLine":
        """Build a chain from ("line", length) / ("arc", length, curvature) pieces."""
        x, y, h = start_x, start_y, start_heading
        segments: list[Segment] = []
        for piece in pieces:
            kind = piece[0]
            if kind == "line":
                (_, length) = piece
                if length <= 0:
                    raise ValueError("segment length must be positive")
                seg = StraightSegment(x, y, h, length)
            elif kind == "arc":
                (_, length, kappa) = piece
                if length <= 0:
                    raise ValueError("segment length must be positive")
                if kappa == 0:
                    raise ValueError("arc curvature must be nonzero")
                turn = 1.0 if kappa > 0 else -1.0
                radius = 1.0 / abs(kappa)
                nx, ny = -math.sin(h), math.cos(h)
                cx, cy = x + turn * radius * nx, y + turn * radius * ny
                start_angle = math.atan2(y - cy, x - cx)
                seg = ArcSegment(cx, cy, radius, start_angle, kappa * length)
            else:
                raise ValueError(f"unknown segment kind {kind!r}")
            segments.append(seg)
            x, y, h = seg.end_pose()
        return cls(segments)

    def _locate(self, s: float) -> tuple[Segment, float]:
        """Segment owning station s, left-closed: a junction belongs to the
        segment that starts there."""
        i = bisect.bisect_right(self._starts, s) - 1
        i = min(i, len(self.segments) - 1)
        return self.segments[i], s - self._starts[i]

    def point_at(self, s: float) -> FramePoint:
        if not (-1e-12 <= s <= self.total_length + 1e-12):
            raise StationRangeError(
                f"station {s} outside [0, {self.total_length}]"
            )
        s = min(max(s, 0.0), self.total_length)
        seg, local = self._locate(s)
        return seg.frame_at(local, s)

    def lookahead(self, shadow_station: float, delta_d0: float) -> FramePoint:
        if delta_d0 < 0:
            raise ValueError("look-ahead distance must be nonnegative")
        s = shadow_station + delta_d0
        if s > self.total_length + 1e-12:
            raise StationRangeError(
                f"look-ahead station {s} beyond line end {self.total_length}"
            )
        return self.point_at(s)

    def project(self, position: tuple[float, float]) -> ShadowResult:
        px, py = position
        candidates = []  # (distance, global_station, fx, fy)
        for seg, s0 in zip(self.segments, self._starts):
            for local, dist, fx, fy in seg.closest(px, py):
                candidates.append((dist, s0 + local, fx, fy))
        best = min(candidates)
        bd, bs, bx, by = best
        for dist, s, fx, fy in candidates:
            if s == bs:
                continue
            if dist - bd < _AMBIGUITY_TOL and math.hypot(fx - bx, fy - by) > _AMBIGUITY_TOL:
                raise ProjectionAmbiguityError(
                    f"two closest points at stations {bs:.6f} and {s:.6f}"
                )
        frame = self.point_at(bs)
        rx, ry = frame.position[0] - px, frame.position[1] - py
        tangential = rx * frame.tangent[0] + ry * frame.tangent[1]
        if abs(tangential) > _ORTHO_TOL * max(1.0, bd):
            # foot clamped to the track end: the ray is no longer normal
            raise StationRangeError(
                "closest point clamped to the line end; vehicle outside the "
                "projection domain"
            )
        lateral = rx * frame.normal[0] + ry * frame.normal[1]
        return ShadowResult(frame=frame, signed_lateral=lateral, distance=bd)

    def parallel_offset(self, d: float) -> "ReferenceLine":
        """Parallel track at offset d along the +normal direction."""
        return ReferenceLine([seg.offset(d) for seg in self.segments])
