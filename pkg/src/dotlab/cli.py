"""Command-line entry point: generate / count / analyze / scaling / verify.

Exit codes: 0 success, 1 a mathematical verification failed, 2 usage error.
Reports go to stdout (or -o FILE); diagnostics and timings go to stderr.
Structured output is JSON with sorted keys, so identical inputs always
produce byte-identical report files.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from dataclasses import replace
from fractions import Fraction

from .counting import distinct_dot_products, per_point_fertility, projection_values
from .errors import UsageError
from .generators import GeneratorSpec
from .geometry import Configuration, Mode
from .harness import (
    ExperimentSpec,
    format_experiment_config,
    parse_experiment_config,
    run_scaling,
    verify_suite,
)
from .pointfile import dumps_points, format_scalar, load_points
from .structure import (
    bucket_pipeline,
    density_report,
    iterate_dense_lines,
    max_wedge,
    min_direction_gap,
    popular_line,
    popular_ray,
    supporting_circles,
    supporting_lines,
)


def _jsonable(obj):
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, Mode):
        return obj.value
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return {f.name: _jsonable(getattr(obj, f.name)) for f in dataclasses.fields(obj)}
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if obj is None or isinstance(obj, (bool, int, float, str)):
        return obj
    return str(obj)


def _emit(report: dict, args) -> None:
    if args.format == "structured":
        text = json.dumps(_jsonable(report), sort_keys=True, indent=2) + "\n"
    else:
        lines = []
        for key, value in report.items():
            if isinstance(value, (dict, list, tuple)):
                value = json.dumps(_jsonable(value), sort_keys=True)
            lines.append(f"{key}: {value}")
        text = "\n".join(lines) + "\n"
    if getattr(args, "output", None):
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------------------
# generate


def _generate_comment(kind: str, params: dict) -> str:
    parts = [f"dotlab generate --kind {kind}"]
    for key in sorted(params):
        value = params[key]
        if key == "radii":
            value = ",".join(str(v) for v in value)
        parts.append(f"--{key} {value}")
    return " ".join(parts)


def cmd_generate(args) -> int:
    params: dict = {}
    for name in ("a", "r", "d", "R"):
        value = getattr(args, name)
        if value is not None:
            params[name] = value
    for name in ("n", "N", "M", "m", "k", "seed"):
        value = getattr(args, name)
        if value is not None:
            params[name] = value
    for name in ("b", "phase"):
        value = getattr(args, name)
        if value is not None:
            params[name] = value
    if args.radii is not None:
        params["radii"] = [tok for tok in args.radii.split(",") if tok]
    if args.mode is not None:
        params["mode"] = args.mode
    config = GeneratorSpec(args.kind, params).build()
    text = dumps_points(config, comment=_generate_comment(args.kind, params))
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


# ---------------------------------------------------------------------------
# count


def _resolve_cli_quantization(args, config: Configuration):
    """Translate --exact/--quantum flags; exact files are evaluated in
    double precision when a grid quantum is requested explicitly."""
    if args.exact and args.quantum is not None:
        raise UsageError("--exact and --quantum are mutually exclusive")
    if args.exact:
        return "exact", config
    if args.quantum is not None:
        if args.quantum <= 0:
            raise UsageError("--quantum must be positive")
        if config.mode is Mode.EXACT:
            config = config.to_approx()
        return args.quantum, config
    return None, config


def cmd_count(args) -> int:
    if args.cross:
        first = load_points(args.cross[0])
        second = load_points(args.cross[1])
        if args.file:
            raise UsageError("--cross replaces the positional points file")
        quant, first = _resolve_cli_quantization(args, first)
        if args.quantum is not None:
            second = second.to_approx()
        dps = projection_values(first.points, second.points, quant)
        report = {"inputs": list(args.cross), "pairs": "cross"}
    else:
        if not args.file:
            raise UsageError("a points file (or --cross A B) is required")
        config = load_points(args.file)
        if config.n == 0:
            raise UsageError(f"{args.file}: no points")
        quant, config = _resolve_cli_quantization(args, config)
        dps = distinct_dot_products(config, quant)
        report = {"inputs": [args.file], "pairs": "all"}
    report.update(
        cardinality=dps.cardinality,
        quantization="exact" if dps.quantum is None else dps.quantum,
        pairs_examined=dps.pairs_examined,
        min_gap=dps.min_gap,
    )
    if args.values:
        report["values"] = [format_scalar(v) for v in dps.values]
    if args.per_point:
        if args.cross:
            raise UsageError("--per-point applies to a single configuration")
        fert = per_point_fertility(config, quant)
        report["fertility_minimum"] = fert.minimum
        report["fertility"] = [list(entry) for entry in fert.per_point]
    _emit(report, args)
    return 0


# ---------------------------------------------------------------------------
# analyze


def _direction_dict(direction) -> dict:
    return {"dx": direction.dx, "dy": direction.dy, "angle": direction.angle}


def cmd_analyze(args) -> int:
    config = load_points(args.file)
    report: dict = {"input": args.file, "n": config.n, "mode": config.mode.value}
    origin_count = sum(1 for p in config.points if p.is_origin)
    if args.lines:
        groups = supporting_lines(config)
        report["lines"] = {
            "group_count": len(groups),
            "origin_points": origin_count,
            "popular_size": groups[0].size if groups else 0,
            "min_angular_gap": min_direction_gap(groups),
            "groups": [
                {"direction": _direction_dict(g.direction), "size": g.size}
                for g in groups
            ],
        }
    if args.circles:
        groups = supporting_circles(config, args.quantum)
        report["circles"] = {
            "group_count": len(groups),
            "popular_size": max(
                (g.size for g in groups if not g.is_origin), default=0
            ),
            "groups": [
                {"radius2": _jsonable(g.radius2), "size": g.size, "origin": g.is_origin}
                for g in groups
            ],
        }
    if args.wedge is not None:
        theta, members = max_wedge(config, args.wedge)
        report["wedge"] = {"b": args.wedge, "theta": theta, "size": len(members)}
    if args.density is not None:
        b, c = args.density
        ray = popular_ray(popular_line(config))
        report["density"] = _jsonable(density_report(ray, b, c, n_ambient=config.n))
    if args.iterate is not None:
        if args.density is None:
            raise UsageError("--iterate needs --density B C for its parameters")
        b, c = args.density
        report["iterated_density"] = [
            _jsonable(r) for r in iterate_dense_lines(config, b, c, rounds=args.iterate)
        ]
    if args.buckets:
        report["buckets"] = _jsonable(bucket_pipeline(config, quantization=args.quantum))
    if len(report) == 3:
        raise UsageError(
            "choose at least one analysis: --lines --circles --wedge "
            "--density --buckets --iterate"
        )
    _emit(report, args)
    return 0


# ---------------------------------------------------------------------------
# scaling


def _spec_from_args(args) -> ExperimentSpec:
    if args.config:
        with open(args.config, "r", encoding="utf-8") as fh:
            spec = parse_experiment_config(fh.read(), source=args.config)
    else:
        if not args.kind or not args.n_list:
            raise UsageError("either --config FILE or both --kind and --n-list")
        params = {}
        for item in args.param or ():
            if "=" not in item:
                raise UsageError(f"--param expects key=value, got {item!r}")
            key, value = item.split("=", 1)
            params[key.strip()] = value.strip()
        if args.quantization in (None, "auto"):
            quant = None
        elif args.quantization == "exact":
            quant = "exact"
        else:
            quant = float(args.quantization)
        spec = ExperimentSpec(
            kind=args.kind,
            params=params,
            n_list=tuple(int(tok) for tok in args.n_list.replace(",", " ").split()),
            quantization=quant,
            metric=args.metric,
            analyses=tuple((args.analyses or "").replace(",", " ").split()),
            seed=args.seed,
        )
    outputs = dict(spec.outputs)
    for key, flag in (("csv", args.csv), ("report", args.report),
                      ("plot_data", args.plot_data)):
        if flag:
            outputs[key] = flag
    return replace(spec, outputs=outputs)


def cmd_scaling(args) -> int:
    spec = _spec_from_args(args)
    echo = format_experiment_config(spec)
    sys.stdout.write(echo)
    if args.echo_config:
        with open(args.echo_config, "w", encoding="utf-8") as fh:
            fh.write(echo)
    report = run_scaling(spec, threads=args.threads)
    for row in report.rows:
        print(f"n={row.n} count={row.count} wall={row.wall_time:.3f}s", file=sys.stderr)
    sys.stdout.write(f"alpha = {report.alpha!r}\n")
    sys.stdout.write(f"residual = {report.residual!r}\n")
    if spec.outputs.get("csv"):
        with open(spec.outputs["csv"], "w", encoding="utf-8") as fh:
            fh.write("n,count\n")
            for row in report.rows:
                fh.write(f"{row.n},{row.count}\n")
    if spec.outputs.get("plot_data"):
        with open(spec.outputs["plot_data"], "w", encoding="utf-8") as fh:
            for row in report.rows:
                fh.write(f"{row.n} {row.count}\n")
    if spec.outputs.get("report"):
        payload = {
            "config": echo,
            "rows": [
                {"n": row.n, "count": row.count, "attachments": row.attachments}
                for row in report.rows
            ],
            "alpha": report.alpha,
            "residual": report.residual,
        }
        with open(spec.outputs["report"], "w", encoding="utf-8") as fh:
            fh.write(json.dumps(_jsonable(payload), sort_keys=True, indent=2) + "\n")
    return 0


# ---------------------------------------------------------------------------
# verify


_SUITE_FLAGS = {
    "line_lower": ("count", "max_n", "seed"),
    "circle_count": ("n", "quantum", "phase"),
    "bucket_bound": ("N", "M", "r", "a"),
    "wedge_bound": ("count", "max_n", "seed", "b"),
    "density_pipeline": ("b", "c"),
}


def cmd_verify(args) -> int:
    if args.suite not in _SUITE_FLAGS:
        raise UsageError(f"unknown suite {args.suite!r}; choose from {sorted(_SUITE_FLAGS)}")
    kwargs = {}
    for name in _SUITE_FLAGS[args.suite]:
        value = getattr(args, name)
        if value is None:
            continue
        if args.suite == "wedge_bound" and name == "b":
            kwargs["b_values"] = (value,)
        elif args.suite == "bucket_bound" and name in ("r", "a"):
            kwargs[name] = float(value)
        else:
            kwargs[name] = value
    if args.suite == "circle_count" and "n" not in kwargs:
        raise UsageError("circle_count requires --n")
    report = verify_suite(args.suite, **kwargs)
    if args.format == "structured":
        _emit(
            {
                "suite": report.suite,
                "passed": report.passed,
                "checks": [_jsonable(c) for c in report.checks],
                "details": report.details,
            },
            args,
        )
    else:
        lines = []
        for key, value in report.details.items():
            lines.append(f"{key}: {_jsonable(value)}")
        fails = [c for c in report.checks if not c.passed]
        lines.append(f"checks: {len(report.checks)} ({len(fails)} failed)")
        for c in fails[:20]:
            lines.append(f"FAIL {c.label} margin={c.margin:g}")
        lines.append(f"suite {report.suite}: {'PASS' if report.passed else 'FAIL'}")
        text = "\n".join(lines) + "\n"
        if args.output:
            with open(args.output, "w", encoding="utf-8") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)
    return 0 if report.passed else 1


# ---------------------------------------------------------------------------
# parser


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dotlab",
        description="Construct point configurations, count their distinct dot "
        "products, and run the structural analyses and scaling sweeps.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_gen = sub.add_parser("generate", help="construct a point family and write a points file")
    p_gen.add_argument("--kind", required=True)
    p_gen.add_argument("--mode", choices=("exact", "approx"))
    for flag in ("--a", "--r", "--d", "--R"):
        p_gen.add_argument(flag)
    for flag in ("--n", "--N", "--M", "--m", "--k", "--seed"):
        p_gen.add_argument(flag, type=int)
    p_gen.add_argument("--b", type=float)
    p_gen.add_argument("--phase", type=float)
    p_gen.add_argument("--radii", help="comma-separated line radii")
    p_gen.add_argument("-o", "--output")
    p_gen.set_defaults(func=cmd_generate)

    p_count = sub.add_parser("count", help="count distinct dot products of a points file")
    p_count.add_argument("file", nargs="?")
    p_count.add_argument("--exact", action="store_true")
    p_count.add_argument("--quantum", type=float)
    p_count.add_argument("--per-point", dest="per_point", action="store_true")
    p_count.add_argument("--cross", nargs=2, metavar=("A", "B"))
    p_count.add_argument("--values", action="store_true")
    p_count.add_argument("--format", choices=("text", "structured"), default="text")
    p_count.add_argument("-o", "--output")
    p_count.set_defaults(func=cmd_count)

    p_an = sub.add_parser("analyze", help="structural analyses of a points file")
    p_an.add_argument("file")
    p_an.add_argument("--lines", action="store_true")
    p_an.add_argument("--circles", action="store_true")
    p_an.add_argument("--wedge", type=float, metavar="B")
    p_an.add_argument("--density", nargs=2, type=float, metavar=("B", "C"))
    p_an.add_argument("--buckets", action="store_true")
    p_an.add_argument("--iterate", type=int, metavar="ROUNDS")
    p_an.add_argument("--quantum", type=float)
    p_an.add_argument("--format", choices=("text", "structured"), default="text")
    p_an.add_argument("-o", "--output")
    p_an.set_defaults(func=cmd_analyze)

    p_sc = sub.add_parser("scaling", help="run an n-sweep and fit the scaling exponent")
    p_sc.add_argument("--config", help="experiment config file")
    p_sc.add_argument("--kind")
    p_sc.add_argument("--param", action="append", metavar="KEY=VALUE")
    p_sc.add_argument("--n-list", dest="n_list")
    p_sc.add_argument("--quantization", help="exact | auto | quantum")
    p_sc.add_argument("--metric", choices=("distinct", "cross"), default="distinct")
    p_sc.add_argument("--analyses", help="comma-separated: lines,circles")
    p_sc.add_argument("--seed", type=int, default=0)
    p_sc.add_argument("--csv")
    p_sc.add_argument("--report")
    p_sc.add_argument("--plot-data", dest="plot_data")
    p_sc.add_argument("--echo-config", dest="echo_config")
    p_sc.add_argument("--threads", type=int, default=1)
    p_sc.set_defaults(func=cmd_scaling)

    p_ver = sub.add_parser("verify", help="run a named verification suite")
    p_ver.add_argument("--suite", required=True)
    p_ver.add_argument("--n", type=int)
    p_ver.add_argument("--quantum", type=float)
    p_ver.add_argument("--phase", type=float)
    p_ver.add_argument("--count", type=int)
    p_ver.add_argument("--max-n", dest="max_n", type=int)
    p_ver.add_argument("--seed", type=int)
    p_ver.add_argument("--N", type=int)
    p_ver.add_argument("--M", type=int)
    p_ver.add_argument("--r")
    p_ver.add_argument("--a")
    p_ver.add_argument("--b", type=float)
    p_ver.add_argument("--c", type=float)
    p_ver.add_argument("--format", choices=("text", "structured"), default="text")
    p_ver.add_argument("-o", "--output")
    p_ver.set_defaults(func=cmd_verify)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 2
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
