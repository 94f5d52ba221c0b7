"""Structural analyses of configurations around the origin.

Everything here is a pure function of an immutable configuration: grouping
points by the origin-centered line or circle they sit on, finding the
popular line/circle, maximal wedges, well-spaced subsets of a ray, density
classification of consecutive radius ratios, and the bucket-projection
check that turns circle-times-line cross products into per-interval counts.

Origin handling: the origin has no direction, so it is excluded from line
groups, rays and wedges; among circles it forms its own radius-0 group,
flagged degenerate.  Ratio comparisons in exact mode are done on squared
radii against b^2, avoiding square roots.
"""

from __future__ import annotations

import math
import warnings
from bisect import bisect_left, bisect_right
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .counting import default_quantum, grid_reduce
from .errors import DomainError, UsageError
from .geometry import Configuration, Mode, Point, Scalar, dot

import numpy as np

DIRECTION_TOLERANCE = 1e-12  # radians; approx-mode line grouping
_ANGLE_EPS = 1e-12  # closed-endpoint slack for wedge membership
_CIRCLE_REL_TOL = 1e-9  # "on a common circle" slack for bucket reports


@dataclass(frozen=True)
class Direction:
    """A line through the origin.

    Exact mode: primitive integer vector (dx, dy), canonicalized to dx > 0
    or (dx = 0, dy > 0), so both rays of a line share one key.  Approx mode:
    the quantized cell of the angle in [0, pi); dx/dy are None.
    """

    dx: int | None
    dy: int | None
    key: int | None
    angle: float

    def sort_value(self):
        if self.dx is not None:
            if self.dx == 0:
                return (1, Fraction(0))
            return (0, Fraction(self.dy, self.dx))
        return (0, self.angle)


def exact_direction(p: Point) -> Direction:
    x, y = p.x, p.y
    dxn = x.numerator * y.denominator
    dyn = y.numerator * x.denominator
    g = math.gcd(dxn, dyn)
    dx, dy = dxn // g, dyn // g
    if dx < 0 or (dx == 0 and dy < 0):
        dx, dy = -dx, -dy
    angle = math.atan2(dy, dx)
    if angle < 0:
        angle += math.pi
    return Direction(dx=dx, dy=dy, key=None, angle=angle)


def approx_direction(p: Point, tolerance: float = DIRECTION_TOLERANCE) -> Direction:
    theta = math.atan2(p.y, p.x) % math.pi
    key = round(theta / tolerance)
    if key == round(math.pi / tolerance):
        key = 0  # angles straddling pi wrap onto the x-axis cell
    return Direction(dx=None, dy=None, key=key, angle=key * tolerance)


def direction_of(p: Point, tolerance: float = DIRECTION_TOLERANCE) -> Direction:
    if p.is_origin:
        raise DomainError("the origin has no direction")
    if p.mode is Mode.EXACT:
        return exact_direction(p)
    return approx_direction(p, tolerance)


def _along(direction: Direction, p: Point) -> Scalar:
    """Signed coordinate of p along the direction (monotone along the line)."""
    if direction.dx is not None:
        return p.x * direction.dx + p.y * direction.dy
    return float(p.x) * math.cos(direction.angle) + float(p.y) * math.sin(direction.angle)


@dataclass(frozen=True)
class LineGroup:
    """All configuration points on one supporting line, both rays."""

    direction: Direction
    members: tuple[Point, ...]  # sorted by signed coordinate along direction

    @property
    def size(self) -> int:
        return len(self.members)


@dataclass(frozen=True)
class CircleGroup:
    """All configuration points on one supporting circle (shared radius^2)."""

    radius2: Scalar
    members: tuple[Point, ...]

    @property
    def size(self) -> int:
        return len(self.members)

    @property
    def is_origin(self) -> bool:
        return self.radius2 == 0


def supporting_lines(
    config: Configuration, tolerance: float = DIRECTION_TOLERANCE
) -> list[LineGroup]:
    """Partition the non-origin points by the line through the origin they
    lie on; groups sorted by size descending, then canonical direction."""
    buckets: dict = {}
    for p in config.points:
        if p.is_origin:
            continue
        d = direction_of(p, tolerance)
        buckets.setdefault((d.dx, d.dy, d.key), (d, []))[1].append(p)
    groups = [
        LineGroup(direction=d, members=tuple(sorted(pts, key=lambda p: _along(d, p))))
        for d, pts in buckets.values()
    ]
    groups.sort(key=lambda g: (-g.size, g.direction.sort_value()))
    return groups


def min_direction_gap(groups: Sequence[LineGroup]) -> float | None:
    """Smallest angular gap between distinct line groups (mod pi).

    Diagnostic for the approx-mode grouping tolerance: a gap approaching
    the tolerance means two groups may really be one line.
    """
    if len(groups) < 2:
        return None
    angles = sorted(g.direction.angle for g in groups)
    gaps = [b - a for a, b in zip(angles, angles[1:])]
    gaps.append(angles[0] + math.pi - angles[-1])
    return min(gaps)


def supporting_circles(config: Configuration, quantization=None) -> list[CircleGroup]:
    """Partition all points by squared radius (exact key, or grid cell in
    approx mode).  The origin, if present, forms a flagged radius-0 group.
    Groups sorted by size descending, then radius^2 ascending."""
    pts = config.points
    groups: list[CircleGroup] = []
    if config.mode is Mode.EXACT:
        if quantization not in (None, "exact"):
            raise UsageError("exact configurations group circles exactly")
        buckets: dict = {}
        for p in pts:
            buckets.setdefault(p.radius2, []).append(p)
        groups = [CircleGroup(r2, tuple(ps)) for r2, ps in buckets.items()]
    else:
        if quantization is None:
            quantum = default_quantum(pts)
        else:
            quantum = float(quantization)
            if not quantum > 0:
                raise UsageError(f"grid quantum must be positive, got {quantum}")
        cells: dict = {}
        for p in pts:
            r2 = p.radius2
            cells.setdefault(round(r2 / quantum), []).append((r2, p))
        for entries in cells.values():
            rep = min(r2 for r2, _ in entries)
            groups.append(CircleGroup(rep, tuple(p for _, p in entries)))
    groups.sort(key=lambda g: (-g.size, g.radius2))
    return groups


def popular_line(config: Configuration, tolerance: float = DIRECTION_TOLERANCE) -> LineGroup:
    """The largest line group; ties broken by canonical direction order.
    Its size is at least (non-origin count) / (number of groups)."""
    groups = supporting_lines(config, tolerance)
    if not groups:
        raise DomainError("no non-origin points: popular line undefined")
    return groups[0]


def popular_circle(config: Configuration, quantization=None) -> CircleGroup:
    """The largest non-degenerate circle group; ties go to smaller radius^2."""
    groups = [g for g in supporting_circles(config, quantization) if not g.is_origin]
    if not groups:
        raise DomainError("no non-origin points: popular circle undefined")
    return groups[0]


# ---------------------------------------------------------------------------
# rays and well-spacedness


@dataclass(frozen=True)
class RayPoints:
    """The points of one supporting line on one side of the origin."""

    direction: Direction
    side: int  # +1 or -1 relative to the canonical direction vector
    members: tuple[Point, ...]  # sorted by increasing distance from the origin

    @property
    def size(self) -> int:
        return len(self.members)

    @property
    def ratios(self) -> tuple[float, ...]:
        """Consecutive |p_i| / |p_{i+1}|, each in (0, 1); approximate."""
        rs = [math.sqrt(float(p.radius2)) for p in self.members]
        return tuple(lo / hi for lo, hi in zip(rs, rs[1:]))


def rays_of(group: LineGroup) -> list[RayPoints]:
    """Split a line group into its (at most two) nonempty rays."""
    pos = [p for p in group.members if _along(group.direction, p) > 0]
    neg = [p for p in group.members if _along(group.direction, p) < 0]
    out = []
    for side, pts in ((1, pos), (-1, neg)):
        if pts:
            pts.sort(key=lambda p: p.radius2)
            out.append(RayPoints(group.direction, side, tuple(pts)))
    return out


def popular_ray(group: LineGroup) -> RayPoints:
    """The more populated side of a line; ties go to the positive side."""
    rs = rays_of(group)
    if not rs:
        raise DomainError("empty line group has no rays")
    return max(rs, key=lambda r: (r.size, r.side))


def ray_from_points(points: Sequence[Point], tolerance: float = DIRECTION_TOLERANCE) -> RayPoints:
    """Build a RayPoints from points that must already share one ray."""
    pts = list(points)
    if not pts:
        raise UsageError("a ray needs at least one point")
    d = direction_of(pts[0], tolerance)
    sides = set()
    for p in pts:
        if p.is_origin:
            raise UsageError("the origin lies on no ray")
        dp = direction_of(p, tolerance)
        if (dp.dx, dp.dy, dp.key) != (d.dx, d.dy, d.key):
            raise UsageError(f"point {p} is not on the line of {pts[0]}")
        sides.add(1 if _along(d, p) > 0 else -1)
    if len(sides) > 1:
        raise UsageError("points lie on both sides of the origin")
    pts.sort(key=lambda p: p.radius2)
    return RayPoints(d, sides.pop(), tuple(pts))


def _ratio_vs_b(r2_lo: Scalar, r2_hi: Scalar, b) -> int:
    """Sign of (|p|/|q| - b) for radii^2 r2_lo <= r2_hi: -1 below, 0 equal, +1 above.

    Exact mode compares r2_lo/r2_hi against b^2 in rationals; approx mode
    compares square roots in doubles.
    """
    if isinstance(r2_lo, Fraction) and isinstance(r2_hi, Fraction):
        b = Fraction(b) if not isinstance(b, Fraction) else b
        lhs = r2_lo * b.denominator**2
        rhs = r2_hi * b.numerator**2
        return (lhs > rhs) - (lhs < rhs)
    ratio = math.sqrt(float(r2_lo) / float(r2_hi))
    bf = float(b)
    return (ratio > bf) - (ratio < bf)


def _check_b(b) -> None:
    bf = float(b)
    if not 0.0 < bf < 1.0:
        raise UsageError(f"b must be in (0, 1), got {b}")


def is_well_spaced_pair(p: Point, q: Point, b) -> bool:
    """True iff the smaller radius is under b times the larger, strictly.

    p and q must be non-origin, collinear with the origin and on the same
    ray; b in (0, 1).
    """
    _check_b(b)
    if p.is_origin or q.is_origin:
        raise UsageError("well-spacedness is defined for non-origin points")
    dp = direction_of(p)
    dq = direction_of(q)
    if (dp.dx, dp.dy, dp.key) != (dq.dx, dq.dy, dq.key):
        raise UsageError(f"{p} and {q} are not collinear with the origin")
    if not (_along(dp, p) > 0) == (_along(dq, q) > 0):
        raise UsageError(f"{p} and {q} lie on opposite rays")
    r2p, r2q = p.radius2, q.radius2
    if r2p > r2q:
        r2p, r2q = r2q, r2p
    return _ratio_vs_b(r2p, r2q, b) < 0


def is_well_spaced(ray: RayPoints, b) -> bool:
    """Every consecutive pair of the ray is well-spaced; vacuous for size <= 1."""
    _check_b(b)
    for lo, hi in zip(ray.members, ray.members[1:]):
        if _ratio_vs_b(lo.radius2, hi.radius2, b) >= 0:
            return False
    return True


def extract_max_well_spaced(
    ray: RayPoints, b
) -> tuple[RayPoints, tuple[tuple[Point, Point], ...]]:
    """Greedy maximal well-spaced subset S of a ray, plus witness pairs.

    Walk outward from the innermost point, keeping the next point whenever
    its ratio to the last kept point is strictly below b.  For a chain
    constraint this earliest-fit greedy is also maximum-cardinality.  Each
    rejected point t is paired with the consecutive neighbor of t in the
    full ray (preceding if it violates, else following) whose ratio with t
    is >= b; the list of these (neighbor, t) pairs is returned alongside S.
    """
    _check_b(b)
    members = ray.members
    if not members:
        raise UsageError("cannot extract from an empty ray")
    kept = [members[0]]
    rejected: list[int] = []
    for idx in range(1, len(members)):
        q = members[idx]
        if _ratio_vs_b(kept[-1].radius2, q.radius2, b) < 0:
            kept.append(q)
        else:
            rejected.append(idx)
    t_pairs: list[tuple[Point, Point]] = []
    for idx in rejected:
        t = members[idx]
        prev = members[idx - 1]
        if _ratio_vs_b(prev.radius2, t.radius2, b) >= 0:
            t_pairs.append((prev, t))
            continue
        nxt = members[idx + 1] if idx + 1 < len(members) else None
        if nxt is not None and _ratio_vs_b(t.radius2, nxt.radius2, b) >= 0:
            t_pairs.append((nxt, t))
        else:  # cannot happen for greedy rejections; guard for safety
            raise AssertionError(f"rejected point {t} has no violating neighbor")
    subset = RayPoints(ray.direction, ray.side, tuple(kept))
    return subset, tuple(t_pairs)


# ---------------------------------------------------------------------------
# density reports


@dataclass(frozen=True)
class DensityReport:
    """Classification of consecutive radius ratios along one ray."""

    direction: Direction
    side: int
    ell: int  # number of points on the ray
    close_pairs: int  # ratio in (b, 1)
    spaced_pairs: int  # ratio < b
    boundary_pairs: int  # ratio = b exactly
    b: float
    c: float
    n_ambient: int
    threshold: float  # c * sqrt(n_ambient)
    is_b_dense: bool


def density_report(ray: RayPoints, b, c: float = 1.0, n_ambient: int | None = None) -> DensityReport:
    """Count close / spaced / boundary consecutive pairs of the ray.

    ``is_b_dense`` holds when close_pairs >= c * sqrt(n_ambient); n_ambient
    defaults to the ray size when no ambient configuration size is given.
    """
    _check_b(b)
    n_amb = ray.size if n_ambient is None else n_ambient
    close = spaced = boundary = 0
    for lo, hi in zip(ray.members, ray.members[1:]):
        cls = _ratio_vs_b(lo.radius2, hi.radius2, b)
        if cls > 0:
            close += 1
        elif cls < 0:
            spaced += 1
        else:
            boundary += 1
    threshold = float(c) * math.sqrt(n_amb)
    return DensityReport(
        direction=ray.direction,
        side=ray.side,
        ell=ray.size,
        close_pairs=close,
        spaced_pairs=spaced,
        boundary_pairs=boundary,
        b=float(b),
        c=float(c),
        n_ambient=n_amb,
        threshold=threshold,
        is_b_dense=close >= threshold,
    )


def iterate_dense_lines(
    config: Configuration, b, c: float = 1.0, rounds: int = 1
) -> list[DensityReport]:
    """Repeatedly report on the popular line's popular ray, then delete it.

    Stops after ``rounds`` reports or when no non-origin points remain.  The
    ambient size n stays the original configuration size for every round.
    """
    if rounds < 1:
        raise UsageError(f"rounds must be >= 1, got {rounds}")
    n_ambient = config.n
    remaining = list(config.points)
    reports: list[DensityReport] = []
    for _ in range(rounds):
        current = Configuration(remaining)
        groups = supporting_lines(current)
        if not groups:
            break
        ray = popular_ray(groups[0])
        reports.append(density_report(ray, b, c, n_ambient))
        removed = {(p.x, p.y) for p in ray.members}
        remaining = [p for p in remaining if (p.x, p.y) not in removed]
    return reports


# ---------------------------------------------------------------------------
# wedges


def max_wedge(config: Configuration, b) -> tuple[float, tuple[Point, ...]]:
    """The densest closed wedge of angular width arccos(b).

    Sweeps start angles over the point angles themselves (some optimal wedge
    has a point on its left edge), returning the smallest maximizing start
    angle and the member points in configuration order.  Guarantees
    len(members) >= ceil(arccos(b)/(2 pi) * n') by averaging, n' counting
    non-origin points.  Origin points are skipped with a warning.
    """
    _check_b(b)
    pts = [p for p in config.points if not p.is_origin]
    if len(pts) < config.n:
        warnings.warn("max_wedge ignores origin points", stacklevel=2)
    if not pts:
        raise DomainError("max_wedge needs at least one non-origin point")
    width = math.acos(float(b))
    angles = sorted(set(p.angle % (2.0 * math.pi) for p in pts))
    arr = angles

    def count_from(theta: float) -> int:
        hi = theta + width
        lo_idx = bisect_left(arr, theta - _ANGLE_EPS)
        if hi < 2.0 * math.pi:
            return bisect_right(arr, hi + _ANGLE_EPS) - lo_idx
        return (len(arr) - lo_idx) + bisect_right(arr, hi - 2.0 * math.pi + _ANGLE_EPS)

    best_theta = arr[0]
    best_count = count_from(arr[0])
    for theta in arr[1:]:
        c = count_from(theta)
        if c > best_count:
            best_theta, best_count = theta, c
    members = []
    for p in config.points:
        if p.is_origin:
            continue
        rel = (p.angle - best_theta) % (2.0 * math.pi)
        if rel <= width + _ANGLE_EPS or rel >= 2.0 * math.pi - _ANGLE_EPS:
            members.append(p)
    return best_theta, tuple(members)


# ---------------------------------------------------------------------------
# bucket projections


@dataclass(frozen=True)
class BucketReport:
    """Distinct cross-product projections per radius bucket.

    Radii are normalized so the circle is the unit circle.  Bucket i is the
    half-open interval (edges[i], edges[i+1]]; counts are of distinct real
    parts of circle-times-line complex dot products in each bucket.
    k = arccos(ratio bound)/(2 pi) is the proportionality constant; the
    per-bucket pass threshold is floor(k*N/2), since the open sector of
    width arccos(bound) can exclude both of its endpoint points at finite N
    (an equispaced circle provably lands at least kN - 1 >= floor(kN/2)
    distinct projections in each bucket once kN >= 2).
    """

    edges: tuple[float, ...]  # 0, r_1, ..., r_M (normalized)
    counts: tuple[int, ...]
    k: float
    threshold: int  # floor(k * N / 2)
    passes: tuple[bool, ...]
    total_distinct_cross: int
    quantum: float | None


def bucket_projection_report(
    circle_points: Sequence[Point],
    line_points,
    ratio_bound=None,
    quantization=None,
) -> BucketReport:
    """Count distinct projections of circle x line dot products per bucket.

    ``circle_points`` must share one origin-centered circle; ``line_points``
    (a RayPoints or point sequence) must sit on one ray with radii, after
    normalizing the circle to radius 1, at least 1 and strictly increasing.
    ``ratio_bound`` overrides the k constant: pass the well-spacedness b, or
    1/r for a geometric line; by default the largest observed consecutive
    radius ratio is used.
    """
    C = tuple(circle_points)
    if not C:
        raise UsageError("the circle family must be nonempty")
    if isinstance(line_points, RayPoints):
        ray = line_points
    else:
        ray = ray_from_points(tuple(line_points))
    r2c = float(C[0].radius2)
    if r2c <= 0:
        raise UsageError("circle points must be non-origin")
    for p in C:
        if abs(float(p.radius2) - r2c) > _CIRCLE_REL_TOL * max(1.0, r2c):
            raise UsageError(f"{p} is not on the common circle (radius^2 {r2c:g})")
    radius_c = math.sqrt(r2c)
    norm_radii = [math.sqrt(float(p.radius2)) / radius_c for p in ray.members]
    for lo, hi in zip(norm_radii, norm_radii[1:]):
        if hi <= lo:
            raise UsageError("line radii must be strictly increasing")
    if norm_radii[0] < 1.0 - _CIRCLE_REL_TOL:
        raise UsageError(
            f"line radii must not be inside the circle; got {norm_radii[0]:g} < 1"
        )
    if ratio_bound is not None:
        bound = float(ratio_bound)
        if not 0.0 < bound < 1.0:
            raise UsageError(f"ratio bound must be in (0, 1), got {ratio_bound}")
    elif len(norm_radii) >= 2:
        bound = max(lo / hi for lo, hi in zip(norm_radii, norm_radii[1:]))
    else:
        bound = 0.0  # single line point: k degenerates to 1/4 turn
    k = math.acos(bound) / (2.0 * math.pi)
    threshold = math.floor(k * len(C) / 2.0)

    # distinct normalized cross products c.l / radius_c^2
    mode = C[0].mode
    if mode is Mode.EXACT and ray.members[0].mode is Mode.EXACT:
        r2c_exact = C[0].radius2
        vals = sorted({dot(c, l) / r2c_exact for c in C for l in ray.members})
        values = [float(v) for v in vals]
        quantum = None
    else:
        xc = np.array([float(p.x) for p in C]) / radius_c
        yc = np.array([float(p.y) for p in C]) / radius_c
        xl = np.array([float(p.x) for p in ray.members]) / radius_c
        yl = np.array([float(p.y) for p in ray.members]) / radius_c
        cross = xc[:, None] * xl[None, :] + yc[:, None] * yl[None, :]
        if quantization is None:
            quantum = 1e-9 * max(1.0, float(np.max(np.abs(cross))))
        else:
            quantum = float(quantization)
            if not quantum > 0:
                raise UsageError(f"grid quantum must be positive, got {quantum}")
        best: dict[int, float] = {}
        grid_reduce(best, cross.ravel(), quantum)
        values = sorted(best.values())

    edges = [0.0] + norm_radii
    counts = [0] * (len(edges) - 1)
    for v in values:
        # bucket i is (edges[i], edges[i+1]]: a projection exactly onto a
        # line radius belongs to the bucket it closes
        if v <= 0.0 or v > edges[-1]:
            continue
        counts[bisect_left(edges, v) - 1] += 1
    passes = tuple(cnt >= threshold for cnt in counts)
    return BucketReport(
        edges=tuple(edges),
        counts=tuple(counts),
        k=k,
        threshold=threshold,
        passes=passes,
        total_distinct_cross=len(values),
        quantum=quantum,
    )


def bucket_pipeline(
    config: Configuration, ratio_bound=None, quantization=None
) -> BucketReport:
    """Bucket report for a whole configuration.

    Takes the popular circle as the circle family and, among the remaining
    points, the popular line's popular ray (keeping only members outside or
    on the circle) as the line family.
    """
    circle = popular_circle(config)
    circle_keys = {(p.x, p.y) for p in circle.members}
    rest = [p for p in config.points if (p.x, p.y) not in circle_keys and not p.is_origin]
    if not rest:
        raise UsageError("no points left outside the popular circle")
    ray = popular_ray(popular_line(Configuration(rest)))
    r2c = float(circle.members[0].radius2)
    outside = [
        p for p in ray.members
        if float(p.radius2) >= r2c * (1.0 - _CIRCLE_REL_TOL)
    ]
    if not outside:
        raise UsageError("the popular ray has no points outside the popular circle")
    line_ray = RayPoints(ray.direction, ray.side, tuple(outside))
    return bucket_projection_report(circle.members, line_ray, ratio_bound, quantization)
