"""Deterministic constructors for every point family used in experiments.

All generators are pure: identical parameters produce identical
configurations, so golden counts recorded in tests are stable.  The random
family uses an explicitly specified PRNG (splitmix64-seeded xoshiro256**,
see Xoshiro256StarStar) rather than the stdlib so that sequences are part
of this package's contract.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import UsageError
from .geometry import Configuration, Mode, Point, Scalar, as_scalar

_MASK64 = (1 << 64) - 1


class Xoshiro256StarStar:
    """xoshiro256** 1.0 (Blackman & Vigna), seeded via splitmix64.

    The four 64-bit state words are the first four outputs of splitmix64
    applied to the user seed.  ``next_u64`` implements the reference
    update: result = rotl(s1 * 5, 7) * 9; t = s1 << 17; s2 ^= s0;
    s3 ^= s1; s1 ^= s2; s0 ^= s3; s2 ^= t; s3 = rotl(s3, 45).
    """

    def __init__(self, seed: int):
        state = []
        z = seed & _MASK64
        for _ in range(4):
            z = (z + 0x9E3779B97F4A7C15) & _MASK64
            w = z
            w = ((w ^ (w >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
            w = ((w ^ (w >> 27)) * 0x94D049BB133111EB) & _MASK64
            state.append(w ^ (w >> 31))
        self._s = state

    @staticmethod
    def _rotl(x: int, k: int) -> int:
        return ((x << k) | (x >> (64 - k))) & _MASK64

    def next_u64(self) -> int:
        s0, s1, s2, s3 = self._s
        result = (self._rotl((s1 * 5) & _MASK64, 7) * 9) & _MASK64
        t = (s1 << 17) & _MASK64
        s2 ^= s0
        s3 ^= s1
        s1 ^= s2
        s0 ^= s3
        s2 ^= t
        s3 = self._rotl(s3, 45)
        self._s = [s0, s1, s2, s3]
        return result

    def uniform(self) -> float:
        """A double in [0, 1) with 53 random bits."""
        return (self.next_u64() >> 11) * (1.0 / (1 << 53))

    def below(self, bound: int) -> int:
        """Unbiased integer in [0, bound)."""
        if bound <= 0:
            raise UsageError(f"bound must be positive, got {bound}")
        limit = (1 << 64) - ((1 << 64) % bound)
        while True:
            u = self.next_u64()
            if u < limit:
                return u % bound

    def randint(self, lo: int, hi: int) -> int:
        """Unbiased integer in [lo, hi] inclusive."""
        return lo + self.below(hi - lo + 1)


def _require_count(n: int, name: str = "n") -> int:
    if not isinstance(n, int) or n < 1:
        raise UsageError(f"{name} must be an integer >= 1, got {n!r}")
    return n


def gen_geometric_line(a: Scalar, r: Scalar, n: int, mode: Mode = Mode.EXACT) -> Configuration:
    """Points (a*r^k, 0), k = 0..n-1: a geometric progression on the x-axis."""
    _require_count(n)
    a = as_scalar(a, mode)
    r = as_scalar(r, mode)
    if a == 0:
        raise UsageError("a = 0 puts every point at the origin")
    if r <= 0 or r == 1:
        raise UsageError(f"ratio must be positive and != 1, got {r}")
    pts = []
    x = a
    zero = as_scalar(0, mode)
    for _ in range(n):
        pts.append(Point(x, zero))
        x = x * r
    return Configuration(pts)


def gen_arithmetic_line(a: Scalar, d: Scalar, n: int, mode: Mode = Mode.EXACT) -> Configuration:
    """Points (a + k*d, 0), k = 0..n-1; rejects any point landing on the origin."""
    _require_count(n)
    a = as_scalar(a, mode)
    d = as_scalar(d, mode)
    if d == 0:
        raise UsageError("step d must be nonzero")
    pts = []
    zero = as_scalar(0, mode)
    for k in range(n):
        x = a + k * d
        if x == 0:
            raise UsageError(f"term {k} of the progression is the origin")
        pts.append(Point(x, zero))
    return Configuration(pts)


def gen_equally_spaced_circle(n: int, radius: float = 1.0, phase: float = 0.0) -> Configuration:
    """n points equally spaced on the origin-centered circle of the given radius.

    Always approx mode.  ``phase`` rotates the whole family; tests use it to
    break axis-alignment degeneracies.
    """
    _require_count(n)
    radius = float(radius)
    if radius <= 0:
        raise UsageError(f"radius must be positive, got {radius}")
    step = 2.0 * math.pi / n
    return Configuration(
        Point(radius * math.cos(phase + step * k), radius * math.sin(phase + step * k))
        for k in range(n)
    )


def circle_plus_line_parts(
    N: int, M: int, r: float, a: float
) -> tuple[tuple[Point, ...], tuple[Point, ...]]:
    """The two halves of the circle+line family, before taking the union."""
    circle = tuple(gen_equally_spaced_circle(_require_count(N, "N")).points)
    line = tuple(gen_geometric_line(a, r, _require_count(M, "M"), mode=Mode.APPROX).points)
    return circle, line


def gen_circle_plus_line(N: int, M: int, r: float, a: float) -> Configuration:
    """Union of N equispaced unit-circle points and M geometric line points.

    r > 1 and a > 0 keep the line marching out along the positive x-axis;
    a coincidence between a circle point and a line point is an error.
    """
    r = float(r)
    a = float(a)
    if r <= 1:
        raise UsageError(f"line ratio must be > 1, got {r}")
    if a <= 0:
        raise UsageError(f"line start must be positive, got {a}")
    circle, line = circle_plus_line_parts(N, M, r, a)
    seen = {(p.x, p.y) for p in circle}
    for p in line:
        if (p.x, p.y) in seen:
            raise UsageError(f"line point {p} coincides with a circle point")
    return Configuration(circle + line)


def sector_circle_plus_line_parts(
    N: int, radii: Sequence[Scalar], b: float
) -> tuple[tuple[Point, ...], tuple[Point, ...]]:
    """Circle points bunched in the sector (0, arccos b] plus one line ray.

    The N unit-circle points sit at angles (j+1) * arccos(b) / N; keeping
    angle 0 out of the family means every projection later lands strictly
    inside its bucket instead of on the boundary.  Consecutive line radii
    must satisfy radii[i]/radii[i+1] < b (well-spaced).
    """
    _require_count(N, "N")
    b = float(b)
    if not 0.0 < b < 1.0:
        raise UsageError(f"b must be in (0, 1), got {b}")
    rs = [float(x) for x in radii]
    if not rs:
        raise UsageError("radii must be nonempty")
    if rs[0] <= 0:
        raise UsageError(f"radii must be positive, got {rs[0]}")
    for lo, hi in zip(rs, rs[1:]):
        if hi <= lo:
            raise UsageError(f"radii must be strictly increasing, got {lo} then {hi}")
        if lo / hi >= b:
            raise UsageError(
                f"consecutive radii {lo}, {hi} have ratio {lo / hi:.6g} >= b = {b}"
            )
    width = math.acos(b)
    circle = tuple(
        Point(math.cos(width * (j + 1) / N), math.sin(width * (j + 1) / N))
        for j in range(N)
    )
    line = tuple(Point(x, 0.0) for x in rs)
    return circle, line


def gen_sector_circle_plus_line(N: int, radii: Sequence[Scalar], b: float) -> Configuration:
    circle, line = sector_circle_plus_line_parts(N, radii, b)
    return Configuration(circle + line)


def gen_polar_lattice(m: int, k: int, r: float) -> Configuration:
    """m*k points: k equispaced rays crossed with radii r^0..r^{m-1}."""
    _require_count(m, "m")
    _require_count(k, "k")
    r = float(r)
    if r <= 1:
        raise UsageError(f"radial ratio must be > 1, got {r}")
    pts = []
    for i in range(m):
        rad = r**i
        for j in range(k):
            theta = 2.0 * math.pi * j / k
            pts.append(Point(rad * math.cos(theta), rad * math.sin(theta)))
    return Configuration(pts)


_EXACT_GRID = 4096  # denominator for exact-mode random coordinates


def gen_random_disk(
    n: int, seed: int, radius: Scalar = 1, mode: Mode = Mode.APPROX
) -> Configuration:
    """n distinct points uniform in the closed disk of the given radius.

    Deterministic for fixed (n, seed, radius, mode).  Approx mode rejection-
    samples doubles from the bounding square; exact mode samples rational
    coordinates radius * i/4096 with i in [-4096, 4096], so coordinates stay
    small enough for fast exact arithmetic.  Duplicates are resampled.
    """
    _require_count(n)
    rng = Xoshiro256StarStar(seed)
    pts: list[Point] = []
    seen: set[tuple[Scalar, Scalar]] = set()
    if mode is Mode.APPROX:
        radius = float(radius)
        if radius <= 0:
            raise UsageError(f"radius must be positive, got {radius}")
        while len(pts) < n:
            x = (2.0 * rng.uniform() - 1.0) * radius
            y = (2.0 * rng.uniform() - 1.0) * radius
            if x * x + y * y > radius * radius or (x, y) in seen:
                continue
            seen.add((x, y))
            pts.append(Point(x, y))
    else:
        radius = as_scalar(radius, Mode.EXACT)
        if radius <= 0:
            raise UsageError(f"radius must be positive, got {radius}")
        r2 = radius * radius
        while len(pts) < n:
            x = radius * Fraction(rng.randint(-_EXACT_GRID, _EXACT_GRID), _EXACT_GRID)
            y = radius * Fraction(rng.randint(-_EXACT_GRID, _EXACT_GRID), _EXACT_GRID)
            if x * x + y * y > r2 or (x, y) in seen:
                continue
            seen.add((x, y))
            pts.append(Point(x, y))
    return Configuration(pts)


_KINDS = (
    "geometric-line",
    "arithmetic-line",
    "circle",
    "circle-plus-line",
    "sector-circle-plus-line",
    "polar-lattice",
    "random-disk",
)


@dataclass(frozen=True)
class GeneratorSpec:
    """A declarative recipe for one configuration; used by the CLI and harness."""

    kind: str
    params: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.kind not in _KINDS:
            raise UsageError(f"unknown generator kind {self.kind!r}; choose from {_KINDS}")
        if ("seed" in self.params) != (self.kind == "random-disk"):
            raise UsageError("seed is required for random-disk and forbidden otherwise")

    def build(self) -> Configuration:
        p = dict(self.params)
        kind = self.kind
        try:
            if kind == "geometric-line":
                mode = Mode(p.pop("mode", "exact"))
                config = gen_geometric_line(p.pop("a"), p.pop("r"), p.pop("n"), mode=mode)
            elif kind == "arithmetic-line":
                mode = Mode(p.pop("mode", "exact"))
                config = gen_arithmetic_line(p.pop("a"), p.pop("d"), p.pop("n"), mode=mode)
            elif kind == "circle":
                config = gen_equally_spaced_circle(
                    p.pop("n"), p.pop("R", 1.0), p.pop("phase", 0.0)
                )
            elif kind == "circle-plus-line":
                config = gen_circle_plus_line(p.pop("N"), p.pop("M"), p.pop("r"), p.pop("a"))
            elif kind == "sector-circle-plus-line":
                config = gen_sector_circle_plus_line(p.pop("N"), p.pop("radii"), p.pop("b"))
            elif kind == "polar-lattice":
                config = gen_polar_lattice(p.pop("m"), p.pop("k"), p.pop("r"))
            elif kind == "random-disk":
                mode = Mode(p.pop("mode", "approx"))
                config = gen_random_disk(p.pop("n"), p.pop("seed"), p.pop("R", 1.0), mode=mode)
            else:
                raise AssertionError(kind)
        except KeyError as exc:
            raise UsageError(f"{kind} requires parameter {exc.args[0]!r}") from exc
        if p:
            raise UsageError(f"{kind} does not take parameters {sorted(p)}")
        return config
