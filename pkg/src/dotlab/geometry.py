"""Numeric kernel: scalar modes, points, configurations, dot products.

Scalars live in one of two homogeneous modes.  Exact mode uses
``fractions.Fraction`` (arbitrary-precision reduced rationals), so counts
derived from exact configurations are indisputable.  Approx mode uses
double-precision floats, which is what circle constructions need
(cos 2*pi*k/n is irrational).  A value never changes mode silently; mixing
modes inside one operation is a usage error.

Angles are always approximate, even for exact points: only comparisons and
wedge membership consume them, and no exactness is ever claimed for them.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Union

from .errors import DomainError, UsageError

Scalar = Union[Fraction, float]


class Mode(enum.Enum):
    EXACT = "exact"
    APPROX = "approx"


def scalar_mode(value: Scalar) -> Mode:
    if isinstance(value, Fraction):
        return Mode.EXACT
    if isinstance(value, float):
        return Mode.APPROX
    raise UsageError(f"not a scalar: {value!r} (use Fraction or float)")


def as_scalar(value, mode: Mode) -> Scalar:
    """Coerce ``value`` into the given mode.

    Exact mode accepts ints, Fractions and strings like ``"3/5"`` or
    ``"0.75"`` (parsed exactly); floats are rejected to avoid smuggling
    binary-rounded values into exact arithmetic.  Approx mode accepts any
    real number or numeric string.
    """
    if mode is Mode.EXACT:
        if isinstance(value, float):
            raise UsageError(
                f"refusing to coerce float {value!r} into exact mode; "
                "pass a Fraction, int, or string"
            )
        try:
            return Fraction(value)
        except (ValueError, TypeError, ZeroDivisionError) as exc:
            raise UsageError(f"cannot parse exact scalar from {value!r}") from exc
    try:
        out = float(value)
    except (ValueError, TypeError) as exc:
        raise UsageError(f"cannot parse approx scalar from {value!r}") from exc
    if not math.isfinite(out):
        raise UsageError(f"approx scalar must be finite, got {out!r}")
    return out


def _check_coordinate(value: Scalar) -> Scalar:
    if isinstance(value, float):
        if not math.isfinite(value):
            raise UsageError(f"coordinate must be finite, got {value!r}")
        if value == 0.0:
            return 0.0  # normalize -0.0 so equal points dedup identically
    return value


@dataclass(frozen=True)
class Point:
    """A planar point; both coordinates share one scalar mode."""

    x: Scalar
    y: Scalar

    def __post_init__(self) -> None:
        mx, my = scalar_mode(self.x), scalar_mode(self.y)
        if mx is not my:
            raise UsageError(f"mixed-mode point ({self.x!r}, {self.y!r})")
        object.__setattr__(self, "x", _check_coordinate(self.x))
        object.__setattr__(self, "y", _check_coordinate(self.y))

    @property
    def mode(self) -> Mode:
        return scalar_mode(self.x)

    @property
    def radius2(self) -> Scalar:
        """Squared distance from the origin, in the point's own mode."""
        return self.x * self.x + self.y * self.y

    @property
    def angle(self) -> float:
        """atan2(y, x) in (-pi, pi]; approximate in both modes, 0.0 at the origin."""
        a = math.atan2(float(self.y), float(self.x))
        if a == -math.pi:
            a = math.pi
        return a

    @property
    def is_origin(self) -> bool:
        return self.x == 0 and self.y == 0

    def to_approx(self) -> "Point":
        if self.mode is Mode.APPROX:
            return self
        return Point(float(self.x), float(self.y))

    def __str__(self) -> str:
        return f"({self.x}, {self.y})"


@dataclass(frozen=True)
class Configuration:
    """An ordered set of pairwise-distinct points in one shared mode.

    Immutable after construction; safe to share between threads.
    """

    points: tuple[Point, ...]

    def __init__(self, points: Iterable[Point]):
        pts = tuple(points)
        object.__setattr__(self, "points", pts)
        if pts:
            mode = pts[0].mode
            for p in pts:
                if p.mode is not mode:
                    raise UsageError("configuration mixes exact and approx points")
            seen: set[tuple[Scalar, Scalar]] = set()
            for p in pts:
                key = (p.x, p.y)
                if key in seen:
                    raise UsageError(f"duplicate point {p}")
                seen.add(key)

    @property
    def mode(self) -> Mode:
        if not self.points:
            return Mode.EXACT
        return self.points[0].mode

    @property
    def n(self) -> int:
        return len(self.points)

    def __len__(self) -> int:
        return len(self.points)

    def __iter__(self) -> Iterator[Point]:
        return iter(self.points)

    def __getitem__(self, i: int) -> Point:
        return self.points[i]

    def to_approx(self) -> "Configuration":
        """Double-precision copy.  Raises if rounding collapses two points."""
        if self.mode is Mode.APPROX:
            return self
        return Configuration(p.to_approx() for p in self.points)

    @classmethod
    def from_xy(cls, pairs: Iterable[tuple], mode: Mode) -> "Configuration":
        return cls(Point(as_scalar(x, mode), as_scalar(y, mode)) for x, y in pairs)


def _require_same_mode(p: Point, q: Point) -> None:
    if p.mode is not q.mode:
        raise UsageError(f"mode mismatch: {p} is {p.mode.value}, {q} is {q.mode.value}")


def dot(p: Point, q: Point) -> Scalar:
    """Euclidean dot product p.q in the points' shared mode."""
    _require_same_mode(p, q)
    return p.x * q.x + p.y * q.y


@dataclass(frozen=True)
class ComplexDot:
    """|p||q| e^{i(arg p - arg q)}: modulus/angle form whose real part is p.q.

    All fields are double precision regardless of the input mode.
    """

    re: float
    im: float
    modulus: float
    angle: float


def complex_dot(p: Point, q: Point) -> ComplexDot:
    """Complex dot product of two non-origin points.

    The real part agrees with dot(p, q) up to double rounding (~1e-9
    relative); the origin is rejected because its argument is undefined.
    """
    _require_same_mode(p, q)
    if p.is_origin or q.is_origin:
        raise DomainError("complex dot product is undefined at the origin")
    modulus = math.sqrt(float(p.radius2) * float(q.radius2))
    angle = p.angle - q.angle
    return ComplexDot(
        re=modulus * math.cos(angle),
        im=modulus * math.sin(angle),
        modulus=modulus,
        angle=angle,
    )


_UNIT_TOL = 1e-12


def rotate(config: Configuration, c: Scalar, s: Scalar) -> Configuration:
    """Rotate every point by the unit vector (c, s): (x,y) -> (cx-sy, sx+cy).

    In exact mode (c, s) must be a rational point on the unit circle, e.g.
    (3/5, 4/5), so the rotation preserves all dot products bit-exactly.
    """
    if config.mode is Mode.EXACT:
        c, s = as_scalar(c, Mode.EXACT), as_scalar(s, Mode.EXACT)
        if c * c + s * s != 1:
            raise UsageError(f"({c}, {s}) is not on the unit circle")
    else:
        c, s = float(c), float(s)
        if abs(c * c + s * s - 1.0) > _UNIT_TOL:
            raise UsageError(f"({c}, {s}) is not on the unit circle (tol {_UNIT_TOL})")
    return Configuration(
        Point(c * p.x - s * p.y, s * p.x + c * p.y) for p in config.points
    )


def scale(config: Configuration, s: Scalar) -> Configuration:
    """Scale every point by s != 0; every dot product is multiplied by s^2."""
    s = as_scalar(s, config.mode)
    if s == 0:
        raise UsageError("scale factor 0 collapses all points to the origin")
    return Configuration(Point(s * p.x, s * p.y) for p in config.points)
