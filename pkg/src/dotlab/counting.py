"""Distinct dot-product counting: the deduplicated set D(P) and friends.

Three dedup strategies, all with identical observable semantics:

* exact, points collinear through the origin: dot products are products
  t_i * t_j of the signed line parameters (times a constant), so each value
  is keyed by a small exponent vector over a pairwise-coprime integer basis.
  This makes the paper's n = 5000+ line families countable in seconds where
  naive big-rational products would take minutes.
* exact, general position: dot products as scaled big integers
  (coordinates premultiplied by the common denominator), deduped in a set.
* approx: grid quantization with quantum q; two values are equal iff
  round(v/q) coincide.  The kept representative per cell is the minimum
  observed value, so chunked or reordered enumeration merges to an
  identical result.

Self-pairs p.p are always included: D(P) quantifies over all ordered pairs
and the circle-counting argument leans on p.p equaling the squared radius.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import gmpy2
import numpy as np

from .errors import UsageError
from .geometry import Configuration, Mode, Point, Scalar, dot

DEFAULT_RELATIVE_QUANTUM = 1e-9

_EXACT = "exact"
_BASIS_CAP = 64  # beyond this the exponent-vector path stops paying off
_GRID_CHUNK = 2_000_000  # target pair-products per numpy chunk
_MAX_KEY = 4.0e18  # |v|/q beyond this would overflow the int64 grid key


@dataclass(frozen=True)
class DotProductSet:
    """Sorted distinct dot-product values plus quantization metadata.

    ``quantum`` is None for exact dedup, else the grid cell width.  Grid
    values are the minimum observed member of each occupied cell.
    ``pairs_examined`` counts ordered pairs (n^2) even though enumeration
    exploits commutativity.  ``min_gap`` is the smallest difference between
    consecutive distinct values, as a diagnostic for quantum choice.
    """

    values: tuple[Scalar, ...]
    quantum: float | None
    pairs_examined: int
    min_gap: float | None

    @property
    def cardinality(self) -> int:
        return len(self.values)

    def __contains__(self, value) -> bool:
        return value in self.values


def default_quantum(config_or_points) -> float:
    """1e-9 * max(1, max |p.q|); the max is the largest squared radius."""
    pts = list(config_or_points)
    if not pts:
        return DEFAULT_RELATIVE_QUANTUM
    rmax2 = max(float(p.radius2) for p in pts)
    return DEFAULT_RELATIVE_QUANTUM * max(1.0, rmax2)


def _min_gap(sorted_values: Sequence) -> float | None:
    if len(sorted_values) < 2:
        return None
    best = None
    for a, b in zip(sorted_values, sorted_values[1:]):
        gap = b - a
        if best is None or gap < best:
            best = gap
    try:
        return float(best)
    except OverflowError:
        return math.inf


def _resolve_quantization(mode: Mode, quantization, pts) -> float | None:
    """Map the user-facing quantization argument to a quantum (None = exact)."""
    if quantization is None:
        if mode is Mode.EXACT:
            return None
        return default_quantum(pts)
    if quantization == _EXACT:
        if mode is Mode.APPROX:
            raise UsageError("exact dedup requires an exact-mode configuration")
        return None
    try:
        q = float(quantization)
    except (TypeError, ValueError) as exc:
        raise UsageError(f"quantization must be 'exact' or a positive number, "
                         f"got {quantization!r}") from exc
    if not (q > 0.0) or not math.isfinite(q):
        raise UsageError(f"grid quantum must be positive and finite, got {q}")
    if mode is Mode.EXACT:
        raise UsageError(
            "grid dedup on an exact configuration is ambiguous; call "
            ".to_approx() first if double evaluation is intended"
        )
    return q


# ---------------------------------------------------------------------------
# exact dedup: coprime basis machinery for the collinear fast path


def coprime_basis(values: Iterable[int]) -> list[int]:
    """Pairwise-coprime integers > 1 generating every input multiplicatively.

    Factor-refinement: each pending value is first stripped of whole powers
    of existing basis elements, then any remaining shared content g = gcd
    splits the offending basis element.  Every split lowers the total log by
    log g, so this terminates.
    """
    basis: list[gmpy2.mpz] = []
    stack = [gmpy2.mpz(v) for v in sorted({int(v) for v in values}, reverse=True) if v > 1]
    while stack:
        v = stack.pop()
        i = 0
        while v > 1 and i < len(basis):
            b = basis[i]
            if gmpy2.gcd(v, b) > 1:
                v = gmpy2.remove(v, b)[0]
            else:
                i += 1
                continue
            g = gmpy2.gcd(v, b)
            if g > 1:
                basis.pop(i)
                stack.extend(x for x in (g, b // g) if x > 1)
                stack.append(v)
                v = gmpy2.mpz(1)
        if v > 1:
            basis.append(v)
    return sorted(int(b) for b in basis)


def _exponents_over_basis(value: int, basis: Sequence[int]) -> list[int] | None:
    """Exponent of each basis element in ``value``; None if not fully covered."""
    v = gmpy2.mpz(value)
    exps = []
    for b in basis:
        if v % b == 0:
            v, e = gmpy2.remove(v, b)
            exps.append(int(e))
        else:
            exps.append(0)
    return exps if v == 1 else None


def _collinear_params(points: Sequence[Point]):
    """(t values, squared direction norm) when P lies on one line through the
    origin in exact mode, with p_i = t_i * (dx, dy); otherwise None."""
    anchor = next((p for p in points if not p.is_origin), None)
    if anchor is None:
        return None
    dx_f, dy_f = anchor.x, anchor.y
    dxn = dx_f.numerator * dy_f.denominator
    dyn = dy_f.numerator * dx_f.denominator
    g = math.gcd(dxn, dyn)
    dx, dy = dxn // g, dyn // g
    if dx < 0 or (dx == 0 and dy < 0):
        dx, dy = -dx, -dy
    for p in points:
        if p.x * dy != p.y * dx:
            return None
    if dx != 0:
        ts = [p.x / dx for p in points]
    else:
        ts = [p.y / dy for p in points]
    return ts, Fraction(dx * dx + dy * dy)


def _pair_key_dedup(E: np.ndarray) -> set[bytes]:
    """Distinct keys of E[i] + E[j] over all i <= j, with sign-parity column 0."""
    m = E.shape[0]
    width = E.shape[1] * E.dtype.itemsize
    seen: set[bytes] = set()
    for i in range(m):
        S = E[i] + E[i:]
        S[:, 0] &= 1
        buf = np.ascontiguousarray(S).tobytes()
        seen.update(buf[k : k + width] for k in range(0, len(buf), width))
    return seen


def _count_exact_collinear(points: Sequence[Point]) -> tuple | None:
    params = _collinear_params(points)
    if params is None:
        return None
    ts, dir2 = params
    nonzero = [t for t in ts if t != 0]
    has_zero = len(nonzero) < len(ts)
    if not nonzero:
        return ((Fraction(0),) if has_zero else tuple(),)
    parts: set[int] = set()
    for t in nonzero:
        parts.add(abs(t.numerator))
        parts.add(t.denominator)
    basis = coprime_basis(parts)
    if len(basis) > _BASIS_CAP:
        return None
    E = np.zeros((len(nonzero), 1 + len(basis)), dtype=np.int32)
    for i, t in enumerate(nonzero):
        E[i, 0] = 1 if t < 0 else 0
        num = _exponents_over_basis(abs(t.numerator), basis)
        den = _exponents_over_basis(t.denominator, basis)
        if num is None or den is None:
            return None
        for j in range(len(basis)):
            E[i, 1 + j] = num[j] - den[j]
    if np.abs(E).max(initial=0) > (1 << 30) - 1:
        return None
    keys = _pair_key_dedup(E)
    values: list[Fraction] = [Fraction(0)] if has_zero else []
    for key in keys:
        vec = np.frombuffer(key, dtype=np.int32)
        num = 1
        den = 1
        for b, e in zip(basis, vec[1:]):
            e = int(e)
            if e > 0:
                num *= b**e
            elif e < 0:
                den *= b ** (-e)
        val = Fraction(num, den) * dir2
        values.append(-val if vec[0] & 1 else val)
    values.sort()
    return (tuple(values),)


def _count_exact_brute(points: Sequence[Point]) -> tuple[Fraction, ...]:
    denom = 1
    for p in points:
        denom = math.lcm(denom, p.x.denominator, p.y.denominator)
    L = gmpy2.mpz(denom)
    X = [gmpy2.mpz(p.x.numerator) * (L // p.x.denominator) for p in points]
    Y = [gmpy2.mpz(p.y.numerator) * (L // p.y.denominator) for p in points]
    n = len(points)
    seen: set = set()
    for i in range(n):
        xi = X[i]
        yi = Y[i]
        seen.update(xi * X[j] + yi * Y[j] for j in range(i, n))
    L2 = denom * denom
    return tuple(sorted(Fraction(int(v), L2) for v in seen))


def _count_exact(points: Sequence[Point]) -> tuple[Fraction, ...]:
    fast = _count_exact_collinear(points)
    if fast is not None:
        return fast[0]
    return _count_exact_brute(points)


# ---------------------------------------------------------------------------
# grid dedup


def grid_reduce(best: dict[int, float], flat_values: np.ndarray, quantum: float) -> None:
    """Merge one chunk of values into the key -> min-representative map."""
    keys = np.rint(flat_values / quantum)
    order = np.lexsort((flat_values, keys))
    ks = keys[order]
    vs = flat_values[order]
    first = np.empty(len(ks), dtype=bool)
    if len(ks):
        first[0] = True
        np.not_equal(ks[1:], ks[:-1], out=first[1:])
    for k, v in zip(ks[first].astype(np.int64).tolist(), vs[first].tolist()):
        cur = best.get(k)
        if cur is None or v < cur:
            best[k] = v


def _grid_guard(max_abs: float, quantum: float) -> None:
    if max_abs / quantum > _MAX_KEY:
        raise UsageError(
            f"quantum {quantum:g} is too small for values up to {max_abs:g}; "
            "grid keys would overflow"
        )


def _count_grid(points: Sequence[Point], quantum: float) -> tuple[float, ...]:
    n = len(points)
    if n == 0:
        return ()
    xs = np.array([p.x for p in points], dtype=np.float64)
    ys = np.array([p.y for p in points], dtype=np.float64)
    _grid_guard(float(np.max(xs * xs + ys * ys)), quantum)
    best: dict[int, float] = {}
    rows = max(1, _GRID_CHUNK // n)
    for lo in range(0, n, rows):
        hi = min(lo + rows, n)
        block = xs[lo:hi, None] * xs[None, :] + ys[lo:hi, None] * ys[None, :]
        grid_reduce(best, block.ravel(), quantum)
    return tuple(sorted(best.values()))


# ---------------------------------------------------------------------------
# public operations


def distinct_dot_products(config: Configuration, quantization=None) -> DotProductSet:
    """All-pairs deduplicated dot products of ``config``.

    ``quantization`` is ``"exact"`` (exact configurations only), a positive
    grid quantum (approx only), or None to pick the mode's default: exact
    dedup, or a grid of 1e-9 * max(1, max |value|).
    """
    pts = config.points
    quantum = _resolve_quantization(config.mode, quantization, pts)
    if quantum is None:
        values: tuple = _count_exact(pts)
    else:
        values = _count_grid(pts, quantum)
    return DotProductSet(
        values=values,
        quantum=quantum,
        pairs_examined=len(pts) * len(pts),
        min_gap=_min_gap(values),
    )


def brute_force_oracle(config: Configuration) -> DotProductSet:
    """Independent exact counter: list all n^2 products, sort, count runs.

    Shares no dedup code with distinct_dot_products on purpose; used as the
    differential-testing oracle for the optimized paths.
    """
    if config.mode is Mode.APPROX:
        raise UsageError("the brute-force oracle only accepts exact configurations")
    pts = config.points
    products = [p.x * q.x + p.y * q.y for p in pts for q in pts]
    products.sort()
    values: list[Fraction] = []
    for v in products:
        if not values or v > values[-1]:
            values.append(v)
    return DotProductSet(
        values=tuple(values),
        quantum=None,
        pairs_examined=len(pts) * len(pts),
        min_gap=_min_gap(values),
    )


@dataclass(frozen=True)
class FertilityReport:
    """How many distinct dot products each single point creates."""

    per_point: tuple[tuple[int, int], ...]  # (point index, distinct count)
    minimum: int


def per_point_fertility(config: Configuration, quantization=None) -> FertilityReport:
    """Distinct |{p.q : q in P}| for each p, under the same dedup rules."""
    pts = config.points
    if not pts:
        raise UsageError("fertility of an empty configuration is undefined")
    quantum = _resolve_quantization(config.mode, quantization, pts)
    counts: list[tuple[int, int]] = []
    if quantum is None:
        for i, p in enumerate(pts):
            counts.append((i, len({p.x * q.x + p.y * q.y for q in pts})))
    else:
        xs = np.array([p.x for p in pts], dtype=np.float64)
        ys = np.array([p.y for p in pts], dtype=np.float64)
        _grid_guard(float(np.max(xs * xs + ys * ys)), quantum)
        for i in range(len(pts)):
            row = xs[i] * xs + ys[i] * ys
            keys = np.unique(np.rint(row / quantum).astype(np.int64))
            counts.append((i, int(len(keys))))
    return FertilityReport(
        per_point=tuple(counts), minimum=min(c for _, c in counts)
    )


def _as_points(group) -> tuple[Point, ...]:
    if isinstance(group, Configuration):
        return group.points
    return tuple(group)


def projection_values(side_a, side_b, quantization=None) -> DotProductSet:
    """Deduplicated cross dot products {a.b : a in A, b in B} only.

    The default grid quantum is 1e-9 * max(1, max |a.b|), i.e. relative to
    the cross values actually examined, not the full all-pairs range.
    """
    A = _as_points(side_a)
    B = _as_points(side_b)
    if not A or not B:
        raise UsageError("both point families must be nonempty")
    mode = A[0].mode
    for p in (*A, *B):
        if p.mode is not mode:
            raise UsageError("cross families must share one scalar mode")
    if mode is Mode.EXACT and quantization in (None, _EXACT):
        values: tuple = tuple(sorted({dot(a, b) for a in A for b in B}))
        quantum = None
    else:
        if mode is Mode.EXACT:
            raise UsageError(
                "grid dedup on exact points is ambiguous; convert to approx first"
            )
        xa = np.array([p.x for p in A], dtype=np.float64)
        ya = np.array([p.y for p in A], dtype=np.float64)
        xb = np.array([p.x for p in B], dtype=np.float64)
        yb = np.array([p.y for p in B], dtype=np.float64)
        cross = xa[:, None] * xb[None, :] + ya[:, None] * yb[None, :]
        max_abs = float(np.max(np.abs(cross)))
        if quantization is None:
            quantum = DEFAULT_RELATIVE_QUANTUM * max(1.0, max_abs)
        else:
            quantum = _resolve_quantization(mode, quantization, (*A, *B))
        _grid_guard(max_abs, quantum)
        best: dict[int, float] = {}
        grid_reduce(best, cross.ravel(), quantum)
        values = tuple(sorted(best.values()))
    return DotProductSet(
        values=values,
        quantum=quantum,
        pairs_examined=len(A) * len(B),
        min_gap=_min_gap(values),
    )
