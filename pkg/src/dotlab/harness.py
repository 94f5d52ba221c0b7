"""Scaling sweeps, log-log slope fits, and bundled verification suites.

A sweep generates one configuration per n, counts its distinct dot
products (or circle-times-line cross products), and fits an exponent by
ordinary least squares on (ln n, ln count).  Wall time is measured per row
for the operator's benefit but is never written into report files, so
identical inputs reproduce byte-identical outputs.
"""

from __future__ import annotations

import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .counting import distinct_dot_products, projection_values
from .errors import UsageError
from .generators import (
    GeneratorSpec,
    Xoshiro256StarStar,
    circle_plus_line_parts,
    gen_equally_spaced_circle,
    gen_random_disk,
)
from .geometry import Configuration, Mode, Point
from .structure import (
    bucket_projection_report,
    density_report,
    max_wedge,
    popular_line,
    popular_ray,
    supporting_circles,
    supporting_lines,
)

_COUNT_PARAMS = ("n", "N", "M", "m", "k", "seed")
_EVAL_NAMES = {"sqrt": math.sqrt, "log": math.log, "log2": math.log2}


def eval_param(name: str, raw, n: int):
    """Resolve one generator parameter for sweep size n.

    Count-like parameters may be arithmetic expressions in n (for example
    ``sqrt(n)`` or ``n**0.25``) and are rounded to integers; other
    parameters pass through so exact scalars like ``7/3`` stay exact.
    """
    if name in _COUNT_PARAMS:
        if isinstance(raw, int):
            return raw
        value = eval(str(raw), {"__builtins__": {}}, {"n": n, **_EVAL_NAMES})
        return int(round(value))
    return raw


@dataclass(frozen=True)
class ExperimentSpec:
    """Declarative description of one n-sweep."""

    kind: str
    params: dict = field(default_factory=dict)
    n_list: tuple[int, ...] = ()
    quantization: object = None  # None = per-mode default, "exact", or quantum
    metric: str = "distinct"  # or "cross" (circle-plus-line only)
    analyses: tuple[str, ...] = ()
    seed: int = 0
    outputs: dict = field(default_factory=dict)  # csv / report / plot_data paths

    def __post_init__(self) -> None:
        ns = tuple(int(n) for n in self.n_list)
        object.__setattr__(self, "n_list", ns)
        if len(ns) < 2:
            raise UsageError("n_list needs at least 2 entries for slope fitting")
        if any(b <= a for a, b in zip(ns, ns[1:])):
            raise UsageError(f"n_list must be strictly increasing, got {ns}")
        if self.metric not in ("distinct", "cross"):
            raise UsageError(f"metric must be 'distinct' or 'cross', got {self.metric!r}")
        if self.metric == "cross" and self.kind != "circle-plus-line":
            raise UsageError("the cross metric is defined for circle-plus-line sweeps")
        unknown = set(self.analyses) - {"lines", "circles"}
        if unknown:
            raise UsageError(f"unknown analyses {sorted(unknown)}")

    def generator_spec(self, n: int) -> GeneratorSpec:
        params = {k: eval_param(k, v, n) for k, v in self.params.items()}
        if self.kind in ("geometric-line", "arithmetic-line", "circle") and "n" not in params:
            params["n"] = n
        if self.kind == "random-disk":
            params.setdefault("seed", self.seed)
            params.setdefault("n", n)
        return GeneratorSpec(self.kind, params)


@dataclass(frozen=True)
class ScalingRow:
    n: int
    count: int
    wall_time: float  # seconds; diagnostic only, excluded from report files
    attachments: dict


@dataclass(frozen=True)
class ScalingReport:
    rows: tuple[ScalingRow, ...]
    alpha: float
    residual: float


def fit_slope(rows: Sequence[tuple[int, int]]) -> tuple[float, float]:
    """OLS slope of ln(count) against ln(n), with the RMS fit residual."""
    if len(rows) < 2:
        raise UsageError("slope fitting needs at least 2 rows")
    ns = np.array([float(n) for n, _ in rows])
    cs = np.array([float(c) for _, c in rows])
    if np.any(cs < 1) or np.any(ns <= 0):
        raise UsageError("all n must be positive and all counts >= 1")
    if len(set(ns.tolist())) < 2:
        raise UsageError("slope is undefined with a single distinct n")
    x = np.log(ns)
    y = np.log(cs)
    xbar = x.mean()
    ybar = y.mean()
    slope = float(np.sum((x - xbar) * (y - ybar)) / np.sum((x - xbar) ** 2))
    intercept = ybar - slope * xbar
    resid = y - (intercept + slope * x)
    return slope, float(np.sqrt(np.mean(resid**2)))


def _run_row(spec: ExperimentSpec, n: int) -> ScalingRow:
    start = time.perf_counter()
    gen = spec.generator_spec(n)
    if spec.metric == "cross":
        params = gen.params
        circle, line = circle_plus_line_parts(
            params["N"], params["M"], float(params["r"]), float(params["a"])
        )
        quant = None if spec.quantization in (None, "auto") else spec.quantization
        count = projection_values(circle, line, quant).cardinality
        config = None
    else:
        config = gen.build()
        quant = None if spec.quantization in (None, "auto") else spec.quantization
        count = distinct_dot_products(config, quant).cardinality
    attachments: dict = {}
    if config is not None and "lines" in spec.analyses:
        groups = supporting_lines(config)
        attachments["line_groups"] = len(groups)
        attachments["popular_line_size"] = groups[0].size if groups else 0
    if config is not None and "circles" in spec.analyses:
        groups = supporting_circles(config)
        attachments["circle_groups"] = len(groups)
        attachments["popular_circle_size"] = groups[0].size if groups else 0
    return ScalingRow(
        n=n, count=count, wall_time=time.perf_counter() - start, attachments=attachments
    )


def _run_row_args(args) -> ScalingRow:
    return _run_row(*args)


def run_scaling(spec: ExperimentSpec, threads: int = 1) -> ScalingReport:
    """Generate, count and analyze each n of the sweep, then fit the slope.

    Rows may run in parallel; assembly is always ordered by n, so the
    report does not depend on scheduling.
    """
    if threads > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            rows = list(pool.map(_run_row_args, [(spec, n) for n in spec.n_list]))
    else:
        rows = [_run_row(spec, n) for n in spec.n_list]
    rows.sort(key=lambda r: r.n)
    alpha, residual = fit_slope([(r.n, r.count) for r in rows])
    return ScalingReport(rows=tuple(rows), alpha=alpha, residual=residual)


# ---------------------------------------------------------------------------
# verification suites


@dataclass(frozen=True)
class Check:
    label: str
    passed: bool
    margin: float  # >= 0 means the inequality held with this slack


@dataclass(frozen=True)
class SuiteReport:
    suite: str
    passed: bool
    checks: tuple[Check, ...]
    details: dict


def _report(suite: str, checks: list[Check], details: dict) -> SuiteReport:
    return SuiteReport(
        suite=suite,
        passed=all(c.passed for c in checks),
        checks=tuple(checks),
        details=details,
    )


def random_positive_ray(n: int, seed: int, denominator: int = 64) -> Configuration:
    """n distinct random positive rationals on the x-axis (exact mode)."""
    rng = Xoshiro256StarStar(seed)
    xs: set[Fraction] = set()
    while len(xs) < n:
        xs.add(Fraction(rng.randint(1, denominator * 16), denominator))
    zero = Fraction(0)
    return Configuration(Point(x, zero) for x in sorted(xs))


def verify_line_lower(configs: Sequence[Configuration] | None = None,
                      count: int = 200, max_n: int = 100, seed: int = 2024) -> SuiteReport:
    """Any n distinct points on one ray make at least 2n-1 dot products."""
    if configs is None:
        rng = Xoshiro256StarStar(seed)
        configs = [
            random_positive_ray(rng.randint(1, max_n), seed=rng.next_u64())
            for _ in range(count)
        ]
    checks = []
    for i, config in enumerate(configs):
        if config.mode is not Mode.EXACT:
            raise UsageError("line_lower verifies exact configurations")
        card = distinct_dot_products(config, "exact").cardinality
        bound = 2 * config.n - 1
        checks.append(Check(f"config[{i}] n={config.n}", card >= bound, card - bound))
    return _report("line_lower", checks, {"configs": len(checks)})


def verify_circle_count(n: int, quantum: float = 1e-9, phase: float = 0.0) -> SuiteReport:
    """|D| of n equispaced circle points equals floor(n/2) + 1."""
    config = gen_equally_spaced_circle(n, 1.0, phase)
    card = distinct_dot_products(config, quantum).cardinality
    expected = n // 2 + 1
    checks = [Check(f"|D| = {expected}", card == expected, card - expected)]
    return _report("circle_count", checks, {"n": n, "cardinality": card,
                                            "expected": expected})


def verify_bucket_bound(N: int = 24, M: int = 6, r: float = 2.0, a: float = 2.0) -> SuiteReport:
    """Each bucket past the innermost gets >= floor(kN/2) distinct projections,
    k = arccos(1/r)/(2 pi), and the cross total reaches that bound times M-1."""
    circle, line = circle_plus_line_parts(N, M, r, a)
    report = bucket_projection_report(circle, line, ratio_bound=1.0 / r)
    checks = []
    for i in range(1, len(report.counts)):
        checks.append(
            Check(
                f"bucket B_{i} >= {report.threshold}",
                report.counts[i] >= report.threshold,
                report.counts[i] - report.threshold,
            )
        )
    total_bound = report.threshold * (M - 1)
    checks.append(
        Check(
            f"total distinct cross >= {total_bound}",
            report.total_distinct_cross >= total_bound,
            report.total_distinct_cross - total_bound,
        )
    )
    return _report(
        "bucket_bound",
        checks,
        {
            "N": N,
            "M": M,
            "r": r,
            "k": report.k,
            "threshold": report.threshold,
            "counts": list(report.counts),
            "total_distinct_cross": report.total_distinct_cross,
        },
    )


def verify_wedge_bound(configs: Sequence[Configuration] | None = None,
                       b_values: Sequence[float] = (0.3, 0.7, 0.9),
                       count: int = 100, max_n: int = 100, seed: int = 77) -> SuiteReport:
    """max_wedge captures at least ceil(arccos(b)/(2 pi) * n') points."""
    if configs is None:
        rng = Xoshiro256StarStar(seed)
        configs = [
            gen_random_disk(rng.randint(1, max_n), seed=rng.next_u64())
            for _ in range(count)
        ]
    checks = []
    for i, config in enumerate(configs):
        non_origin = sum(1 for p in config.points if not p.is_origin)
        if non_origin == 0:
            continue
        for b in b_values:
            _, members = max_wedge(config, b)
            bound = math.ceil(math.acos(b) / (2.0 * math.pi) * non_origin)
            checks.append(
                Check(f"config[{i}] b={b}", len(members) >= bound, len(members) - bound)
            )
    return _report("wedge_bound", checks, {"configs": len(configs), "b_values": list(b_values)})


def density_pipeline_config(
    ray_count: int = 100, off_ray: int = 9900, seed: int = 404, d=Fraction(1)
) -> Configuration:
    """An arithmetic ray {10..(10+ray_count-1)} * d plus random off-axis points."""
    ray = [Point(Fraction(10 + k) * d, Fraction(0)) for k in range(ray_count)]
    rng = Xoshiro256StarStar(seed)
    pts = list(ray)
    seen = {(p.x, p.y) for p in pts}
    grid = 4096
    while len(pts) < ray_count + off_ray:
        x = Fraction(rng.randint(-grid, grid), grid) * 120
        y = Fraction(rng.randint(-grid, grid), grid) * 120
        if y == 0 or (x, y) in seen:
            continue
        seen.add((x, y))
        pts.append(Point(x, y))
    return Configuration(pts)


def verify_density_pipeline(
    config: Configuration | None = None,
    b: float = 0.9,
    c: float = 0.9,
    expected_close: int | None = None,
) -> SuiteReport:
    """The popular ray's density report flags b-density above c*sqrt(n)."""
    if config is None:
        config = density_pipeline_config()
    ray = popular_ray(popular_line(config))
    rep = density_report(ray, b, c, n_ambient=config.n)
    checks = [
        Check(
            f"close_pairs >= {rep.threshold:g}",
            rep.close_pairs >= rep.threshold,
            rep.close_pairs - rep.threshold,
        ),
        Check("is_b_dense", rep.is_b_dense, 1.0 if rep.is_b_dense else -1.0),
    ]
    if expected_close is not None:
        checks.append(
            Check(
                f"close_pairs == {expected_close}",
                rep.close_pairs == expected_close,
                rep.close_pairs - expected_close,
            )
        )
    details = {
        "n": config.n,
        "ray_size": rep.ell,
        "close_pairs": rep.close_pairs,
        "spaced_pairs": rep.spaced_pairs,
        "boundary_pairs": rep.boundary_pairs,
        "threshold": rep.threshold,
        "is_b_dense": rep.is_b_dense,
    }
    return _report("density_pipeline", checks, details)


_SUITES = {
    "line_lower": verify_line_lower,
    "circle_count": verify_circle_count,
    "bucket_bound": verify_bucket_bound,
    "wedge_bound": verify_wedge_bound,
    "density_pipeline": verify_density_pipeline,
}


def verify_suite(which: str, **kwargs) -> SuiteReport:
    """Run one named verification suite and report pass/fail with margins."""
    try:
        fn = _SUITES[which]
    except KeyError:
        raise UsageError(
            f"unknown suite {which!r}; choose from {sorted(_SUITES)}"
        ) from None
    return fn(**kwargs)


# ---------------------------------------------------------------------------
# experiment config files: "key = value" lines, '#' comments


_OUTPUT_KEYS = ("csv", "report", "plot_data")


def parse_experiment_config(text: str, source: str = "<config>") -> ExperimentSpec:
    kind = None
    params: dict = {}
    fields: dict = {
        "n_list": (),
        "quantization": None,
        "metric": "distinct",
        "analyses": (),
        "seed": 0,
        "outputs": {},
    }
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{source}:{lineno}: expected 'key = value', got {line!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if key == "kind":
            kind = value
        elif key.startswith("param."):
            params[key[len("param."):]] = value
        elif key == "n_list":
            fields["n_list"] = tuple(int(tok) for tok in value.replace(",", " ").split())
        elif key == "quantization":
            if value == "auto":
                fields["quantization"] = None
            elif value == "exact":
                fields["quantization"] = "exact"
            else:
                fields["quantization"] = float(value)
        elif key == "metric":
            fields["metric"] = value
        elif key == "analyses":
            fields["analyses"] = tuple(value.replace(",", " ").split())
        elif key == "seed":
            fields["seed"] = int(value)
        elif key in _OUTPUT_KEYS:
            fields["outputs"][key] = value
        else:
            raise UsageError(f"{source}:{lineno}: unknown config key {key!r}")
    if kind is None:
        raise UsageError(f"{source}: missing 'kind ='")
    return ExperimentSpec(kind=kind, params=params, **fields)


def format_experiment_config(spec: ExperimentSpec) -> str:
    """Canonical config text; re-ingesting it reproduces the run exactly."""
    if spec.quantization is None:
        quant = "auto"
    elif spec.quantization == "exact":
        quant = "exact"
    else:
        quant = repr(float(spec.quantization))
    lines = [
        f"kind = {spec.kind}",
        f"metric = {spec.metric}",
        f"quantization = {quant}",
        f"seed = {spec.seed}",
        "n_list = " + " ".join(str(n) for n in spec.n_list),
    ]
    if spec.analyses:
        lines.append("analyses = " + " ".join(spec.analyses))
    for key in sorted(spec.params):
        lines.append(f"param.{key} = {spec.params[key]}")
    for key in _OUTPUT_KEYS:
        if spec.outputs.get(key):
            lines.append(f"{key} = {spec.outputs[key]}")
    return "\n".join(lines) + "\n"
