"""Planar primitives: points, segments, implicit lines and the predicates
the tracker and the simulator are built on.

Lines are kept in canonical implicit form ``a*x + b*y + c = 0`` with
``a**2 + b**2 == 1`` and the first nonzero of ``(a, b)`` positive, so that
``eval_line`` is a signed perpendicular distance and two constructions of
the same line compare equal.
"""

import math
from typing import NamedTuple

import numpy as np

EPS_PT = 1e-9


class Point2(NamedTuple):
    x: float
    y: float


class Segment(NamedTuple):
    a: Point2
    b: Point2

    @property
    def length(self) -> float:
        return math.hypot(self.b.x - self.a.x, self.b.y - self.a.y)

    def reversed(self) -> "Segment":
        return Segment(self.b, self.a)


class Line2(NamedTuple):
    a: float
    b: float
    c: float


class TimedPoint(NamedTuple):
    p: Point2
    t: float


class CoincidentPointsError(ValueError):
    pass


def _canonical(a, b, c):
    norm = math.hypot(a, b)
    if norm == 0.0:
        raise CoincidentPointsError("line normal is zero")
    a, b, c = a / norm, b / norm, c / norm
    if a < 0.0 or (a == 0.0 and b < 0.0):
        a, b, c = -a, -b, -c
    # strip negative zeros so equal lines are bit-identical
    return Line2(a + 0.0, b + 0.0, c + 0.0)


def line_through(p, q) -> Line2:
    """Line through two points, in canonical form.

    The result does not depend on argument order: the points are sorted
    before the coefficients are computed.
    """
    if math.hypot(q[0] - p[0], q[1] - p[1]) <= EPS_PT:
        raise CoincidentPointsError(f"points {tuple(p)} and {tuple(q)} coincide")
    if (q[0], q[1]) < (p[0], p[1]):
        p, q = q, p
    a = q[1] - p[1]
    b = p[0] - q[0]
    c = -(a * p[0] + b * p[1])
    return _canonical(a, b, c)


def line_from_normal(point, normal) -> Line2:
    """Line through ``point`` whose normal vector is ``normal``."""
    a, b = float(normal[0]), float(normal[1])
    return _canonical(a, b, -(a * point[0] + b * point[1]))


def eval_line(line: Line2, p) -> float:
    return line.a * p[0] + line.b * p[1] + line.c


def project_onto(line: Line2, p) -> Point2:
    d = eval_line(line, p)
    return Point2(p[0] - d * line.a, p[1] - d * line.b)


def _snap(v):
    return 0.0 if abs(v) <= EPS_PT else v


def intersects(line: Line2, s: Segment) -> bool:
    """Sign-product test: the endpoints lie on opposite sides or on the line.

    Signed distances within ``EPS_PT`` of zero are treated as exactly on the
    line, so a line built through a segment endpoint always intersects it.
    """
    return _snap(eval_line(line, s.a)) * _snap(eval_line(line, s.b)) <= 0.0


def point_segment_distance(p, s: Segment) -> float:
    ax, ay = s.a
    dx, dy = s.b[0] - ax, s.b[1] - ay
    den = dx * dx + dy * dy
    if den == 0.0:
        return math.hypot(p[0] - ax, p[1] - ay)
    u = ((p[0] - ax) * dx + (p[1] - ay) * dy) / den
    u = min(1.0, max(0.0, u))
    return math.hypot(p[0] - (ax + u * dx), p[1] - (ay + u * dy))


def square_intersects_segment(center, half_width: float, s: Segment) -> bool:
    """Axis-aligned square vs segment, by separating axes (x, y, segment normal)."""
    if half_width < 0:
        raise ValueError("half_width must be nonnegative")
    if half_width == 0:
        return point_segment_distance(center, s) <= EPS_PT
    cx, cy = center
    w = half_width + EPS_PT
    (ax, ay), (bx, by) = s
    if min(ax, bx) > cx + w or max(ax, bx) < cx - w:
        return False
    if min(ay, by) > cy + w or max(ay, by) < cy - w:
        return False
    nx, ny = ay - by, bx - ax
    return abs(nx * (ax - cx) + ny * (ay - cy)) <= w * (abs(nx) + abs(ny))


def squares_hit_segments(centers, half_width, seg_a, seg_b):
    """Vectorised ``square_intersects_segment``.

    centers: (S, 2) square centres; seg_a, seg_b: (N, 2) endpoints.
    Returns an (S, N) boolean array.
    """
    centers = np.asarray(centers, dtype=float)
    seg_a = np.asarray(seg_a, dtype=float)
    seg_b = np.asarray(seg_b, dtype=float)
    cx = centers[:, 0:1]
    cy = centers[:, 1:2]
    if half_width == 0:
        d = seg_b - seg_a
        den = (d * d).sum(axis=1)
        safe = np.where(den > 0, den, 1.0)
        u = ((cx - seg_a[:, 0]) * d[:, 0] + (cy - seg_a[:, 1]) * d[:, 1]) / safe
        u = np.clip(np.where(den > 0, u, 0.0), 0.0, 1.0)
        px = seg_a[:, 0] + u * d[:, 0]
        py = seg_a[:, 1] + u * d[:, 1]
        return np.hypot(cx - px, cy - py) <= EPS_PT
    w = half_width + EPS_PT
    lo_x = np.minimum(seg_a[:, 0], seg_b[:, 0])
    hi_x = np.maximum(seg_a[:, 0], seg_b[:, 0])
    lo_y = np.minimum(seg_a[:, 1], seg_b[:, 1])
    hi_y = np.maximum(seg_a[:, 1], seg_b[:, 1])
    hit = (lo_x <= cx + w) & (hi_x >= cx - w) & (lo_y <= cy + w) & (hi_y >= cy - w)
    nx = seg_a[:, 1] - seg_b[:, 1]
    ny = seg_b[:, 0] - seg_a[:, 0]
    sep = np.abs(nx * (seg_a[:, 0] - cx) + ny * (seg_a[:, 1] - cy))
    return hit & (sep <= w * (np.abs(nx) + np.abs(ny)))


def lines_intersect_segments(lines, seg_a, seg_b):
    """Vectorised ``intersects``: (C, 3) line coefficients against N segments
    -> (C, N) boolean matrix."""
    lines = np.asarray(lines, dtype=float).reshape(-1, 3)
    seg_a = np.asarray(seg_a, dtype=float).reshape(-1, 2)
    seg_b = np.asarray(seg_b, dtype=float).reshape(-1, 2)
    fa = lines[:, :2] @ seg_a.T + lines[:, 2:3]
    fb = lines[:, :2] @ seg_b.T + lines[:, 2:3]
    fa[np.abs(fa) <= EPS_PT] = 0.0
    fb[np.abs(fb) <= EPS_PT] = 0.0
    return fa * fb <= 0.0


def line_segment_distance(line: Line2, s: Segment) -> float:
    """Distance between an infinite line and a segment (0 if they cross)."""
    fa, fb = eval_line(line, s.a), eval_line(line, s.b)
    if fa * fb <= 0.0:
        return 0.0
    return min(abs(fa), abs(fb))
