"""Acceptance suite: one test per criterion, each printing a pass/fail line.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the per-criterion
lines.  Tolerances and thresholds are pinned here, not configurable.
"""

import json
import math
import time
from contextlib import contextmanager
from fractions import Fraction

import pytest

from dotlab.cli import main as cli_main
from dotlab.counting import brute_force_oracle, distinct_dot_products
from dotlab.generators import (
    Xoshiro256StarStar,
    circle_plus_line_parts,
    gen_arithmetic_line,
    gen_circle_plus_line,
    gen_equally_spaced_circle,
    gen_geometric_line,
    gen_polar_lattice,
    gen_random_disk,
    gen_sector_circle_plus_line,
    sector_circle_plus_line_parts,
)
from dotlab.geometry import Configuration, Mode, Point, rotate, scale
from dotlab.harness import (
    ExperimentSpec,
    density_pipeline_config,
    random_positive_ray,
    run_scaling,
    verify_suite,
)
from dotlab.structure import (
    bucket_projection_report,
    extract_max_well_spaced,
    max_wedge,
    ray_from_points,
    supporting_circles,
)

from test_structure import exhaustive_max_well_spaced


@contextmanager
def criterion(num: int, description: str):
    try:
        yield
    except BaseException:
        print(f"ACCEPTANCE {num:2d}: FAIL - {description}")
        raise
    print(f"ACCEPTANCE {num:2d}: PASS - {description}")


def test_criterion_01_geometric_line_exact_counts():
    with criterion(1, "geometric-line |D| = 2n-1 exactly; n=5000 under 60 s"):
        ratios = (Fraction(2), Fraction(3, 2), Fraction(1, 3))
        starts = (Fraction(1), Fraction(7, 3))
        for n in (10, 100, 1000, 5000):
            for r in ratios:
                for a in starts:
                    config = gen_geometric_line(a, r, n)
                    start = time.perf_counter()
                    card = distinct_dot_products(config, "exact").cardinality
                    elapsed = time.perf_counter() - start
                    assert card == 2 * n - 1, (n, r, a, card)
                    if n == 5000:
                        assert elapsed < 60.0, (n, r, a, elapsed)


def test_criterion_02_circle_counts():
    with criterion(2, "equally spaced circle |D| = floor(n/2)+1 at quantum 1e-9"):
        for n in (8, 100, 1000):
            config = gen_equally_spaced_circle(n, 1.0, 0.0)
            assert distinct_dot_products(config, 1e-9).cardinality == n // 2 + 1
        for n in (9, 101):
            config = gen_equally_spaced_circle(n, 1.0, 0.0)
            assert distinct_dot_products(config, 1e-9).cardinality == n // 2 + 1


def test_criterion_03_oracle_equivalence():
    with criterion(3, "500 random exact configurations agree with the oracle"):
        rng = Xoshiro256StarStar(30000)
        for i in range(500):
            n = rng.randint(1, 200)
            config = gen_random_disk(n, seed=rng.next_u64(), mode=Mode.EXACT)
            fast = distinct_dot_products(config, "exact")
            oracle = brute_force_oracle(config)
            assert fast.cardinality == oracle.cardinality, (i, n)
            assert fast.values == oracle.values, (i, n)


def test_criterion_04_invariance():
    with criterion(4, "rotation (3/5,4/5) and scale 7/2 preserve cardinality"):
        rng = Xoshiro256StarStar(40000)
        for _ in range(100):
            n = rng.randint(1, 60)
            config = gen_random_disk(n, seed=rng.next_u64(), mode=Mode.EXACT)
            base = distinct_dot_products(config).cardinality
            rotated = rotate(config, Fraction(3, 5), Fraction(4, 5))
            scaled = scale(config, Fraction(7, 2))
            assert distinct_dot_products(rotated).cardinality == base
            assert distinct_dot_products(scaled).cardinality == base


def test_criterion_05_line_lower_bound():
    with criterion(5, "200 random one-ray configurations have |D| >= 2n-1"):
        rng = Xoshiro256StarStar(50000)
        for _ in range(200):
            n = rng.randint(1, 100)
            config = random_positive_ray(n, seed=rng.next_u64())
            card = distinct_dot_products(config, "exact").cardinality
            assert card >= 2 * n - 1, (n, card)


def test_criterion_06_supporting_circle_bound():
    with criterion(6, "number of supporting circles never exceeds |D|"):
        catalog = [
            gen_geometric_line(1, 2, 30),
            gen_geometric_line(Fraction(7, 3), Fraction(3, 2), 20),
            gen_arithmetic_line(1, 1, 40),
            gen_equally_spaced_circle(24, 1.0, 0.0),
            gen_equally_spaced_circle(17, 2.5, 0.3),
            gen_circle_plus_line(12, 4, 2.0, 2.0),
            gen_sector_circle_plus_line(5, [1, 3, 7, 15, 31], 0.5),
            gen_polar_lattice(3, 4, 2.0),
            gen_random_disk(80, seed=1),
            gen_random_disk(50, seed=2, mode=Mode.EXACT),
            density_pipeline_config(ray_count=30, off_ray=120, seed=3),
        ]
        for config in catalog:
            circle_groups = [
                g for g in supporting_circles(config) if not g.is_origin
            ]
            card = distinct_dot_products(config).cardinality
            assert len(circle_groups) <= card, (config.n, len(circle_groups), card)


def test_criterion_07_bucket_bound():
    with criterion(7, "24-point circle vs {2..64}: buckets B_1..B_5 >= 2, total >= 10"):
        circle, line = circle_plus_line_parts(24, 6, 2.0, 2.0)
        start = time.perf_counter()
        report = bucket_projection_report(circle, line, ratio_bound=0.5)
        elapsed = time.perf_counter() - start
        assert report.threshold == 2  # floor(kN) with the spec constant k = 1/12
        for i in range(1, 6):
            assert report.counts[i] >= 2, (i, report.counts)
        assert report.total_distinct_cross >= 10
        assert elapsed < 1.0


def test_criterion_08_sector_lemma():
    with criterion(8, "sector construction projects all N=5 points into every bucket"):
        circle, line = sector_circle_plus_line_parts(5, [1, 3, 7, 15, 31], 0.5)
        report = bucket_projection_report(circle, line)
        assert report.counts == (5, 5, 5, 5, 5)


def test_criterion_09_wedge_bound():
    with criterion(9, "max wedge holds ceil(arccos(b)/2pi * n) on 100 random configs"):
        rng = Xoshiro256StarStar(90000)
        for _ in range(100):
            n = rng.randint(1, 100)
            config = gen_random_disk(n, seed=rng.next_u64())
            non_origin = sum(1 for p in config.points if not p.is_origin)
            if non_origin == 0:
                continue
            for b in (0.3, 0.7, 0.9):
                _, members = max_wedge(config, b)
                bound = math.ceil(math.acos(b) / (2.0 * math.pi) * non_origin)
                assert len(members) >= bound, (n, b, len(members), bound)


def test_criterion_10_greedy_extraction():
    with criterion(10, "greedy well-spaced subset is exact and maximum-cardinality"):
        ray = ray_from_points([Point(Fraction(k), Fraction(0)) for k in range(1, 9)])
        subset, _ = extract_max_well_spaced(ray, Fraction(1, 2))
        assert [p.x for p in subset.members] == [1, 3, 7]
        rng = Xoshiro256StarStar(100000)
        b = Fraction(1, 2)
        for _ in range(200):
            length = rng.randint(1, 15)
            xs: set[Fraction] = set()
            while len(xs) < length:
                xs.add(Fraction(rng.randint(1, 512), 32))
            points = [Point(x, Fraction(0)) for x in sorted(xs)]
            subset, _ = extract_max_well_spaced(ray_from_points(points), b)
            assert subset.size == exhaustive_max_well_spaced(points, b)


def test_criterion_11_density_pipeline():
    with criterion(11, "popular ray of the 10^4 configuration is 0.9-dense"):
        start = time.perf_counter()
        config = density_pipeline_config(ray_count=100, off_ray=9900, seed=404)
        assert config.n == 10_000
        report = verify_suite(
            "density_pipeline", config=config, b=0.9, c=0.9, expected_close=99
        )
        elapsed = time.perf_counter() - start
        assert report.passed
        assert report.details["close_pairs"] == 99
        assert report.details["close_pairs"] >= math.sqrt(config.n) - 1
        assert report.details["is_b_dense"]
        assert elapsed < 120.0


def test_criterion_12_scaling_exponents():
    with criterion(12, "alpha in [0.93, 1.01], residual < 0.02 for line and circle"):
        ns = tuple(2**k for k in range(7, 14))
        line = run_scaling(
            ExperimentSpec(
                kind="geometric-line",
                params={"a": "1", "r": "2"},
                n_list=ns,
                quantization="exact",
            )
        )
        assert 0.93 <= line.alpha <= 1.01, line.alpha
        assert line.residual < 0.02, line.residual
        circle = run_scaling(
            ExperimentSpec(kind="circle", params={}, n_list=ns, quantization=1e-9)
        )
        assert 0.93 <= circle.alpha <= 1.01, circle.alpha
        assert circle.residual < 0.02, circle.residual


def test_criterion_13_reproducibility(tmp_path):
    with criterion(13, "identical commands write byte-identical report files"):
        # scaling: csv + structured report + plot data
        csv = str(tmp_path / "rows.csv")
        rep = str(tmp_path / "rep.json")
        plot = str(tmp_path / "plot.dat")
        args = [
            "scaling", "--kind", "geometric-line", "--param", "a=1",
            "--param", "r=2", "--n-list", "128,256,512",
            "--quantization", "exact", "--csv", csv, "--report", rep,
            "--plot-data", plot,
        ]
        assert cli_main(list(args)) == 0
        first = [open(f, "rb").read() for f in (csv, rep, plot)]
        assert cli_main(list(args)) == 0
        assert [open(f, "rb").read() for f in (csv, rep, plot)] == first

        # count: structured report file
        pts = str(tmp_path / "pts.txt")
        assert cli_main(["generate", "--kind", "circle", "--n", "100",
                         "-o", pts]) == 0
        out1 = str(tmp_path / "count1.json")
        out2 = str(tmp_path / "count2.json")
        assert cli_main(["count", pts, "--quantum", "1e-9", "--values",
                         "--format", "structured", "-o", out1]) == 0
        assert cli_main(["count", pts, "--quantum", "1e-9", "--values",
                         "--format", "structured", "-o", out2]) == 0
        assert open(out1, "rb").read() == open(out2, "rb").read()
        assert json.load(open(out1))["cardinality"] == 51

        # verify: structured suite report
        v1 = str(tmp_path / "v1.json")
        v2 = str(tmp_path / "v2.json")
        for out in (v1, v2):
            assert cli_main(["verify", "--suite", "bucket_bound",
                             "--format", "structured", "-o", out]) == 0
        assert open(v1, "rb").read() == open(v2, "rb").read()
