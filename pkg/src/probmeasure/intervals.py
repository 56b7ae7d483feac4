"""Finite disjoint unions of semi-open intervals ``(a, b]`` and their lengths.

The collection of such unions is closed under union, intersection and
complement, so every operation here returns another canonical
:class:`IntervalUnion`.  Unbounded pieces are limited to ``(-inf, b]`` and
``(a, +inf)``.
"""

from __future__ import annotations

import bisect
import math
from typing import Iterable, Iterator, NamedTuple

import numpy as np

__all__ = [
    "SemiOpenInterval",
    "IntervalUnion",
    "InfiniteLengthError",
    "MalformedIntervalError",
    "normalize",
    "union",
    "intersect",
    "complement",
    "difference",
    "length_under",
    "prefix_lengths",
]

NEG_INF = -math.inf
POS_INF = math.inf


class MalformedIntervalError(ValueError):
    pass


class InfiniteLengthError(ArithmeticError):
    """Raised when a set of infinite length is measured (not an overflow)."""


class SemiOpenInterval(NamedTuple):
    """The interval ``(lower, upper]``; ``upper == inf`` means ``(lower, inf)``."""

    lower: float
    upper: float

    @classmethod
    def checked(cls, lower, upper) -> "SemiOpenInterval":
        lower = _endpoint(lower)
        upper = _endpoint(upper)
        if lower == POS_INF:
            raise MalformedIntervalError(f"lower endpoint cannot be +inf: ({lower}, {upper}]")
        if upper == NEG_INF:
            raise MalformedIntervalError(f"upper endpoint cannot be -inf: ({lower}, {upper}]")
        if not lower < upper:
            raise MalformedIntervalError(f"empty or reversed interval ({lower}, {upper}]: need lower < upper")
        return cls(lower, upper)

    @property
    def bounded(self) -> bool:
        return math.isfinite(self.lower) and math.isfinite(self.upper)

    def __contains__(self, x) -> bool:
        return self.lower < x <= self.upper


def _endpoint(v) -> float:
    if isinstance(v, str):
        key = v.strip().lower()
        if key in ("-inf", "-infinity"):
            return NEG_INF
        if key in ("+inf", "inf", "+infinity", "infinity"):
            return POS_INF
        raise MalformedIntervalError(f"unrecognised endpoint {v!r}")
    f = float(v)
    if math.isnan(f):
        raise MalformedIntervalError("NaN endpoint")
    return f


def _endpoint_json(v: float):
    if v == NEG_INF:
        return "-inf"
    if v == POS_INF:
        return "+inf"
    return v


class IntervalUnion:
    """Canonical union: sorted, pairwise disjoint, non-adjacent pieces.

    Build instances with :func:`normalize` (or :meth:`of`); the constructor
    trusts its input.
    """

    __slots__ = ("intervals",)

    def __init__(self, intervals: tuple = ()):
        self.intervals: tuple[SemiOpenInterval, ...] = intervals

    @classmethod
    def of(cls, *pairs) -> "IntervalUnion":
        return normalize(pairs)

    @classmethod
    def empty(cls) -> "IntervalUnion":
        return cls(())

    @classmethod
    def real_line(cls) -> "IntervalUnion":
        return cls((SemiOpenInterval(NEG_INF, POS_INF),))

    def __iter__(self) -> Iterator[SemiOpenInterval]:
        return iter(self.intervals)

    def __len__(self) -> int:
        return len(self.intervals)

    def __bool__(self) -> bool:
        return bool(self.intervals)

    def __eq__(self, other) -> bool:
        if not isinstance(other, IntervalUnion):
            return NotImplemented
        return self.intervals == other.intervals

    def __hash__(self) -> int:
        return hash(self.intervals)

    def __repr__(self) -> str:
        if not self.intervals:
            return "IntervalUnion(∅)"
        body = " ∪ ".join(f"({a:g}, {b:g}]" if b != POS_INF else f"({a:g}, ∞)" for a, b in self.intervals)
        return f"IntervalUnion({body})"

    def __or__(self, other: "IntervalUnion") -> "IntervalUnion":
        return union(self, other)

    def __and__(self, other: "IntervalUnion") -> "IntervalUnion":
        return intersect(self, other)

    def __sub__(self, other: "IntervalUnion") -> "IntervalUnion":
        return difference(self, other)

    def __invert__(self) -> "IntervalUnion":
        return complement(self)

    @property
    def bounded(self) -> bool:
        return all(iv.bounded for iv in self.intervals)

    def contains(self, x):
        """Membership test; accepts a scalar or an array of points."""
        if np.ndim(x) == 0:
            i = bisect.bisect_left(self._lowers(), x) - 1
            return i >= 0 and x <= self.intervals[i].upper
        x = np.asarray(x, dtype=float)
        if not self.intervals:
            return np.zeros(x.shape, dtype=bool)
        lo = np.array(self._lowers())
        hi = np.array([iv.upper for iv in self.intervals])
        i = np.searchsorted(lo, x, side="left") - 1
        ok = i >= 0
        out = np.zeros(x.shape, dtype=bool)
        out[ok] = x[ok] <= hi[i[ok]]
        return out

    def __contains__(self, x) -> bool:
        return bool(self.contains(x))

    def _lowers(self) -> list[float]:
        return [iv.lower for iv in self.intervals]

    def issubset(self, other: "IntervalUnion") -> bool:
        return difference(self, other) == IntervalUnion.empty()

    def isdisjoint(self, other: "IntervalUnion") -> bool:
        return not intersect(self, other)

    def affine_image(self, shift: float, scale: float) -> "IntervalUnion":
        """The set ``{shift + scale*t : t in self}`` for ``scale > 0``."""
        if not scale > 0:
            raise ValueError("scale must be positive to keep the (a, b] orientation")
        return IntervalUnion(
            tuple(SemiOpenInterval(shift + scale * a, shift + scale * b) for a, b in self.intervals)
        )

    def endpoints(self) -> list[float]:
        pts: list[float] = []
        for a, b in self.intervals:
            pts.extend(v for v in (a, b) if math.isfinite(v))
        return pts

    def to_json(self) -> list:
        return [[_endpoint_json(a), _endpoint_json(b)] for a, b in self.intervals]

    @classmethod
    def from_json(cls, data) -> "IntervalUnion":
        if not isinstance(data, list):
            raise MalformedIntervalError("interval union must be a JSON array of [lower, upper] pairs")
        pairs = []
        for k, item in enumerate(data):
            if not isinstance(item, (list, tuple)) or len(item) != 2:
                raise MalformedIntervalError(f"element {k} is not a two-element [lower, upper] pair")
            pairs.append((item[0], item[1]))
        return normalize(pairs)


def normalize(raw: Iterable) -> IntervalUnion:
    """Sort, validate and merge overlapping or touching pieces."""
    pieces = sorted(
        iv if isinstance(iv, SemiOpenInterval) and iv.lower < iv.upper else SemiOpenInterval.checked(*iv)
        for iv in raw
    )
    merged: list[SemiOpenInterval] = []
    for iv in pieces:
        if merged and iv.lower <= merged[-1].upper:
            last = merged[-1]
            if iv.upper > last.upper:
                merged[-1] = SemiOpenInterval(last.lower, iv.upper)
        else:
            merged.append(iv)
    return IntervalUnion(tuple(merged))


def union(A: IntervalUnion, B: IntervalUnion) -> IntervalUnion:
    return normalize(A.intervals + B.intervals)


def intersect(A: IntervalUnion, B: IntervalUnion) -> IntervalUnion:
    out: list[SemiOpenInterval] = []
    a, b = A.intervals, B.intervals
    i = j = 0
    while i < len(a) and j < len(b):
        lo = max(a[i].lower, b[j].lower)
        hi = min(a[i].upper, b[j].upper)
        if lo < hi:
            out.append(SemiOpenInterval(lo, hi))
        if a[i].upper < b[j].upper:
            i += 1
        else:
            j += 1
    # canonical inputs cannot produce touching output pieces
    return IntervalUnion(tuple(out))


def complement(A: IntervalUnion) -> IntervalUnion:
    """Complement within the real line."""
    out: list[SemiOpenInterval] = []
    prev = NEG_INF
    for lo, hi in A.intervals:
        if lo > prev:
            out.append(SemiOpenInterval(prev, lo))
        prev = hi
    if prev < POS_INF:
        out.append(SemiOpenInterval(prev, POS_INF))
    return IntervalUnion(tuple(out))


def difference(A: IntervalUnion, B: IntervalUnion) -> IntervalUnion:
    return intersect(A, complement(B))


def length_under(F, B: IntervalUnion) -> float:
    """``sum F(b_i) - F(a_i)`` over the pieces of ``B``.

    ``F=None`` is the identity (ordinary length).  ``F`` may also be a
    distribution object exposing ``cdf`` or any monotone callable; its values
    at ``±inf`` are taken as the limits and must be finite.
    """
    if F is None:
        total = 0.0
        for a, b in B.intervals:
            if not (math.isfinite(a) and math.isfinite(b)):
                raise InfiniteLengthError(f"piece ({a}, {b}] has infinite length")
            total += b - a
        return total
    fn = F.cdf if hasattr(F, "cdf") else F
    total = 0.0
    for a, b in B.intervals:
        fb = float(fn(b))
        fa = float(fn(a))
        if not (math.isfinite(fa) and math.isfinite(fb)):
            raise InfiniteLengthError(f"F has no finite limit at an endpoint of ({a}, {b}]")
        total += fb - fa
    return total


def prefix_lengths(F, pieces: Iterable, cap: int) -> list[float]:
    """Running lengths of the first 1..cap pieces of a disjoint sequence.

    Countable additivity is checked as the limit of these partial sums.
    Pieces are validated to be pairwise disjoint.
    """
    seen = IntervalUnion.empty()
    sums: list[float] = []
    total = 0.0
    for k, raw in enumerate(pieces):
        if k >= cap:
            break
        piece = normalize([raw])
        if not seen.isdisjoint(piece):
            raise ValueError(f"piece {k} overlaps earlier pieces")
        seen = union(seen, piece)
        total += length_under(F, piece)
        sums.append(total)
    return sums
