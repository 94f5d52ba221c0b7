"""Reading and writing the shared points file format.

Format: a required header line ``#mode exact`` or ``#mode approx``, then one
point per line as two whitespace-separated coordinates.  Exact coordinates
are written ``num/den`` (or a bare integer); approx coordinates are decimal
literals.  Blank lines and other ``#`` comments are ignored.  Writing is
deterministic, so save -> load -> save round-trips byte-identically.
"""

from __future__ import annotations

import io
from fractions import Fraction
from typing import TextIO

from .errors import UsageError
from .geometry import Configuration, Mode, Point

_HEADER_PREFIX = "#mode"


def _parse_exact(token: str) -> Fraction:
    try:
        return Fraction(token)
    except (ValueError, ZeroDivisionError) as exc:
        raise UsageError(f"bad exact coordinate {token!r}") from exc


def _parse_approx(token: str) -> float:
    try:
        return float(token)
    except ValueError as exc:
        raise UsageError(f"bad approx coordinate {token!r}") from exc


def read_points(stream: TextIO, source: str = "<stream>") -> Configuration:
    mode: Mode | None = None
    points: list[Point] = []
    for lineno, raw in enumerate(stream, start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            fields = line.split()
            if fields[0] == _HEADER_PREFIX:
                if len(fields) != 2 or fields[1] not in ("exact", "approx"):
                    raise UsageError(f"{source}:{lineno}: malformed {_HEADER_PREFIX} header")
                if mode is not None:
                    raise UsageError(f"{source}:{lineno}: duplicate {_HEADER_PREFIX} header")
                mode = Mode(fields[1])
            continue
        if mode is None:
            raise UsageError(
                f"{source}:{lineno}: point data before the required "
                f"'{_HEADER_PREFIX} exact|approx' header"
            )
        fields = line.split()
        if len(fields) != 2:
            raise UsageError(f"{source}:{lineno}: expected 'x y', got {line!r}")
        if mode is Mode.EXACT:
            points.append(Point(_parse_exact(fields[0]), _parse_exact(fields[1])))
        else:
            points.append(Point(_parse_approx(fields[0]), _parse_approx(fields[1])))
    if mode is None:
        raise UsageError(f"{source}: missing '{_HEADER_PREFIX} exact|approx' header")
    return Configuration(points)


def load_points(path: str) -> Configuration:
    with open(path, "r", encoding="utf-8") as fh:
        return read_points(fh, source=path)


def format_scalar(value) -> str:
    if isinstance(value, Fraction):
        return str(value)  # "3" or "3/4"
    return repr(float(value))  # shortest round-trip decimal


def write_points(config: Configuration, stream: TextIO, comment: str | None = None) -> None:
    stream.write(f"{_HEADER_PREFIX} {config.mode.value}\n")
    if comment:
        for line in comment.splitlines():
            stream.write(f"# {line}\n")
    for p in config.points:
        stream.write(f"{format_scalar(p.x)} {format_scalar(p.y)}\n")


def save_points(config: Configuration, path: str, comment: str | None = None) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        write_points(config, fh, comment=comment)


def dumps_points(config: Configuration, comment: str | None = None) -> str:
    buf = io.StringIO()
    write_points(config, buf, comment=comment)
    return buf.getvalue()
