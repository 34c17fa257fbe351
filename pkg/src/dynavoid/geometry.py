"""Planar primitives: points, segments, circles, tangents and avoidance corners.

Everything here is a pure function over immutable values. Distances are in
meters and angles in radians, measured counterclockwise from the +x axis.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

EPS = 1e-9
# Tangent-line intersections farther than this from the circle center are
# treated as parallel.
MAX_CORNER_DISTANCE = 1e3


class GeometryError(ValueError):
    pass


class PointInsideCircle(GeometryError):
    pass


class DegenerateTangent(GeometryError):
    pass


@dataclass(frozen=True, slots=True)
class Point2:
    x: float
    y: float

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise ValueError(f"non-finite point ({self.x}, {self.y})")

    def __add__(self, other: Point2) -> Point2:
        return Point2(self.x + other.x, self.y + other.y)

    def __sub__(self, other: Point2) -> Point2:
        return Point2(self.x - other.x, self.y - other.y)

    def __mul__(self, k: float) -> Point2:
        return Point2(self.x * k, self.y * k)

    __rmul__ = __mul__

    def dot(self, other: Point2) -> float:
        return self.x * other.x + self.y * other.y

    def cross(self, other: Point2) -> float:
        return self.x * other.y - self.y * other.x

    def norm(self) -> float:
        return math.hypot(self.x, self.y)

    def as_tuple(self) -> tuple[float, float]:
        return (self.x, self.y)


@dataclass(frozen=True, slots=True)
class Segment2:
    a: Point2
    b: Point2

    def __post_init__(self):
        if not distance(self.a, self.b) > 0.0:
            raise GeometryError("degenerate segment: endpoints coincide")

    @property
    def length(self) -> float:
        return distance(self.a, self.b)


@dataclass(frozen=True, slots=True)
class Circle2:
    center: Point2
    radius: float

    def __post_init__(self):
        if not self.radius > 0.0:
            raise GeometryError(f"circle radius must be positive, got {self.radius}")


@dataclass(frozen=True)
class AvoidancePath:
    """Polyline robot -> corner(s) -> target hugging one side of a circle.

    ``side`` is ``"left"`` when the path passes the circle on its left, i.e.
    the circle stays on the traveller's right.
    """

    side: str
    vertices: tuple[Point2, ...]
    length: float

    @property
    def corner(self) -> Point2:
        return self.vertices[1]


def distance(p: Point2, q: Point2) -> float:
    return math.hypot(p.x - q.x, p.y - q.y)


def bearing(frm: Point2, to: Point2) -> float:
    return math.atan2(to.y - frm.y, to.x - frm.x)


def wrap_angle(a: float) -> float:
    """Map an angle into (-pi, pi]."""
    a = math.remainder(a, math.tau)
    if a <= -math.pi:
        a += math.tau
    return a


def unit(angle: float) -> Point2:
    return Point2(math.cos(angle), math.sin(angle))


def closest_point_on_segment(p: Point2, s: Segment2) -> tuple[float, Point2]:
    """Return ``(distance, closest_point)`` from ``p`` to segment ``s``."""
    dx = s.b.x - s.a.x
    dy = s.b.y - s.a.y
    u = ((p.x - s.a.x) * dx + (p.y - s.a.y) * dy) / (dx * dx + dy * dy)
    if u <= 0.0:
        q = s.a
    elif u >= 1.0:
        q = s.b
    else:
        q = Point2(s.a.x + u * dx, s.a.y + u * dy)
    return distance(p, q), q


def distance_point_segment(p: Point2, s: Segment2) -> float:
    return closest_point_on_segment(p, s)[0]


def segment_circle_intersects(s: Segment2, c: Circle2) -> bool:
    return distance_point_segment(c.center, s) <= c.radius


def tangent_points(p: Point2, c: Circle2) -> tuple[Point2, Point2]:
    """Tangent points on ``c`` of the two lines through external point ``p``.

    Returned as ``(left, right)`` as seen from ``p`` looking at the center.
    """
    d = distance(p, c.center)
    if abs(d - c.radius) <= EPS:
        raise DegenerateTangent(f"point lies on the circle (distance {d!r}, radius {c.radius!r})")
    if d < c.radius:
        raise PointInsideCircle(f"point is inside the circle (distance {d!r}, radius {c.radius!r})")
    to_p = bearing(c.center, p)
    alpha = math.acos(c.radius / d)
    left = c.center + c.radius * unit(to_p - alpha)
    right = c.center + c.radius * unit(to_p + alpha)
    return left, right


def _corners(c: Circle2, robot: Point2, t_robot: Point2, t_target: Point2) -> list[Point2]:
    """Corner(s) joining the tangent line at ``t_robot`` to the one at ``t_target``.

    Normally the single intersection of the two tangent lines. When they are
    (nearly) parallel the intersection runs off to infinity; the arc ahead of
    the robot is then wrapped by a short tangent polyline instead. Every edge
    is tangent to ``c``, so no edge enters the circle.
    """
    a_robot = bearing(c.center, t_robot)
    a_target = bearing(c.center, t_target)
    delta = wrap_angle(a_target - a_robot)
    if abs(delta) < math.pi:
        radius = c.radius / math.cos(delta / 2.0)
        if radius <= MAX_CORNER_DISTANCE:
            return [c.center + radius * unit(a_robot + delta / 2.0)]

    direction = 1 if (t_robot - c.center).cross(t_robot - robot) > 0.0 else -1
    sweep = (direction * (a_target - a_robot)) % math.tau
    pieces = max(2, math.ceil(sweep / (2.0 * math.pi / 3.0)))
    half = sweep / (2.0 * pieces)
    radius = c.radius / math.cos(half)
    return [
        c.center + radius * unit(a_robot + direction * (2 * j + 1) * half)
        for j in range(pieces)
    ]


def _polyline_length(vertices) -> float:
    return sum(distance(a, b) for a, b in zip(vertices, vertices[1:]))


def avoidance_corners(robot: Point2, target: Point2, c: Circle2) -> tuple[AvoidancePath, AvoidancePath]:
    """Two tangent detours from ``robot`` to ``target`` around ``c``.

    Each detour is made of the robot-side tangent and the target-side tangent
    lying on the same side of the circle, joined at their intersection
    (the corner). Returns ``(left, right)``.

    Raises PointInsideCircle / DegenerateTangent if either endpoint is not
    strictly outside ``c``.
    """
    robot_left, robot_right = tangent_points(robot, c)
    target_left, target_right = tangent_points(target, c)

    paths = []
    for side, t_robot, t_target in (("left", robot_left, target_right), ("right", robot_right, target_left)):
        vertices = (robot, *_corners(c, robot, t_robot, t_target), target)
        paths.append(AvoidancePath(side, vertices, _polyline_length(vertices)))
    return paths[0], paths[1]
