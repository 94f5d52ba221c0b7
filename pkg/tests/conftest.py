from fractions import Fraction

import pytest

from dotlab.generators import Xoshiro256StarStar, gen_random_disk
from dotlab.geometry import Configuration, Mode, Point


def random_exact_config(seed: int, max_n: int = 60, min_n: int = 1) -> Configuration:
    """A deterministic random exact configuration with 1 <= n <= max_n."""
    rng = Xoshiro256StarStar(seed)
    n = rng.randint(min_n, max_n)
    return gen_random_disk(n, seed=rng.next_u64(), mode=Mode.EXACT)


def random_ray_points(seed: int, max_len: int = 15, denominator: int = 32) -> list[Point]:
    """Distinct positive x-axis points, sorted by radius."""
    rng = Xoshiro256StarStar(seed)
    n = rng.randint(1, max_len)
    xs: set[Fraction] = set()
    while len(xs) < n:
        xs.add(Fraction(rng.randint(1, denominator * 8), denominator))
    return [Point(x, Fraction(0)) for x in sorted(xs)]


@pytest.fixture
def exact_square() -> Configuration:
    return Configuration.from_xy([(1, 0), (0, 1), (-1, 0), (0, -1)], Mode.EXACT)
