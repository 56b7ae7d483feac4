"""Simple functions and Lebesgue integrals on finite or interval-based spaces.

Two kinds of measure space are supported:

* :class:`FiniteMeasureSpace` -- finitely many labelled atoms with weights;
  every function is simple and integrals are exact weighted sums.
* :class:`LengthSpace` -- the length induced by a distribution function (or
  plain length) on an :class:`~probmeasure.intervals.IntervalUnion` domain.
  Simple functions here take constant values on interval unions, or on the
  tagged null set :data:`RATIONALS` and its complement.

"Almost everywhere" on a finite space means "on every atom of positive
weight".
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Callable, Hashable, Iterable, Optional, Sequence, Union

import numpy as np

from .intervals import IntervalUnion, InfiniteLengthError, intersect, length_under, normalize, union
from .stieltjes import riemann_integral

__all__ = [
    "FiniteMeasureSpace",
    "LengthSpace",
    "NullSet",
    "CoNullSet",
    "RATIONALS",
    "IRRATIONALS",
    "SimpleFunction",
    "FunctionSequence",
    "ConvergenceReport",
    "StaircaseResult",
    "integrate_simple",
    "integrate_function",
    "pos_neg_split",
    "approximate_by_simple",
    "mct_check",
    "dct_check",
    "measure_from_density",
    "unbounded_integrable_demo",
    "sup_simple_integral",
    "ae_leq",
]


@dataclass(frozen=True)
class NullSet:
    """A set of length zero that is tagged rather than enumerated."""

    name: str

    def complement(self) -> "CoNullSet":
        return CoNullSet(self)


@dataclass(frozen=True)
class CoNullSet:
    null: NullSet


RATIONALS = NullSet("Q")
IRRATIONALS = CoNullSet(RATIONALS)

SetLike = Union[frozenset, IntervalUnion, NullSet, CoNullSet]


@dataclass(frozen=True, eq=False)
class FiniteMeasureSpace:
    atoms: tuple
    weights: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        atoms = tuple(self.atoms)
        if w.shape != (len(atoms),):
            raise ValueError("one weight per atom")
        if np.any(w < 0) or not np.all(np.isfinite(w)):
            raise ValueError("weights must be finite and non-negative")
        if len(set(atoms)) != len(atoms):
            raise ValueError("atom labels must be distinct")
        w.setflags(write=False)
        object.__setattr__(self, "atoms", atoms)
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "_index", {a: i for i, a in enumerate(atoms)})

    @classmethod
    def counting(cls, atoms: Iterable[Hashable]) -> "FiniteMeasureSpace":
        atoms = tuple(atoms)
        return cls(atoms, np.ones(len(atoms)))

    @classmethod
    def grid(cls, lo: float, hi: float, n: int) -> "FiniteMeasureSpace":
        """Cell midpoints of ``n`` equal cells of ``[lo, hi]``, each weighted by its length."""
        h = (hi - lo) / n
        return cls(tuple((lo + h * (np.arange(n) + 0.5)).tolist()), np.full(n, h))

    def _mask(self, subset) -> np.ndarray:
        if subset is None:
            return np.ones(len(self.atoms), dtype=bool)
        mask = np.zeros(len(self.atoms), dtype=bool)
        for a in subset:
            if a not in self._index:
                raise KeyError(f"{a!r} is not an atom of this space")
            mask[self._index[a]] = True
        return mask

    def measure(self, subset=None) -> float:
        return math.fsum(self.weights[self._mask(subset)])

    def values(self, f) -> np.ndarray:
        return np.array([float(f(a)) for a in self.atoms])

    def positive_atoms(self) -> tuple:
        return tuple(a for a, w in zip(self.atoms, self.weights) if w > 0)


@dataclass(frozen=True, eq=False)
class LengthSpace:
    """Length under ``F`` (``None`` = ordinary length) restricted to ``domain``."""

    F: object = None
    domain: IntervalUnion = field(default_factory=IntervalUnion.real_line)

    def measure(self, A: SetLike) -> float:
        if isinstance(A, NullSet):
            if self.F is not None and getattr(self.F, "discontinuities", ()):
                raise ValueError("a tagged null set is only null for a continuous length")
            return 0.0
        if isinstance(A, CoNullSet):
            return length_under(self.F, self.domain)
        if isinstance(A, IntervalUnion):
            return length_under(self.F, intersect(A, self.domain))
        raise TypeError(f"cannot measure {A!r} in a length space")

    def probes(self, n: int = 4096) -> np.ndarray:
        """Cell midpoints of a uniform grid on each bounded piece of the domain."""
        pts = []
        for lo, hi in self.domain:
            if not (math.isfinite(lo) and math.isfinite(hi)):
                lo, hi = max(lo, -50.0), min(hi, 50.0)
            h = (hi - lo) / n
            pts.append(lo + h * (np.arange(n) + 0.5))
        return np.concatenate(pts) if pts else np.empty(0)


def _intersect_sets(A: SetLike, B: SetLike) -> SetLike:
    if B is None:
        return A
    if isinstance(A, frozenset) or isinstance(B, frozenset):
        return frozenset(A) & frozenset(B)
    if isinstance(A, NullSet) or isinstance(B, NullSet):
        return A if isinstance(A, NullSet) else B
    if isinstance(A, CoNullSet):
        return B
    if isinstance(B, CoNullSet):
        return A
    return intersect(A, B)


def _disjoint(A: SetLike, B: SetLike) -> bool:
    if isinstance(A, frozenset) and isinstance(B, frozenset):
        return not (A & B)
    if isinstance(A, IntervalUnion) and isinstance(B, IntervalUnion):
        return not intersect(A, B)
    if isinstance(A, NullSet) and isinstance(B, CoNullSet):
        return B.null == A
    if isinstance(B, NullSet) and isinstance(A, CoNullSet):
        return A.null == B
    return False


def _member(A: SetLike, x) -> bool:
    if isinstance(A, frozenset):
        return x in A
    if isinstance(A, IntervalUnion):
        return bool(A.contains(x))
    # probes are taken off the null set
    return isinstance(A, CoNullSet)


class SimpleFunction:
    """``sum a_i * 1_{A_i}`` with pairwise disjoint sets ``A_i``."""

    def __init__(self, pieces: Iterable[tuple[float, SetLike]]):
        norm = []
        for value, A in pieces:
            if isinstance(A, (set, list, tuple)) and not isinstance(A, IntervalUnion):
                A = frozenset(A)
            norm.append((float(value), A))
        atom_sets = [A for _, A in norm if isinstance(A, frozenset)]
        if sum(map(len, atom_sets)) != len(frozenset().union(*atom_sets)):
            raise ValueError("atom pieces overlap")
        others = [(i, A) for i, (_, A) in enumerate(norm) if not isinstance(A, frozenset)]
        for (i, A), (j, B) in itertools.combinations(others, 2):
            if not _disjoint(A, B):
                raise ValueError(f"pieces {i} and {j} overlap")
        if atom_sets and others:
            raise ValueError("atom pieces cannot be mixed with interval or tagged pieces")
        self.pieces: tuple = tuple(norm)
        self._lookup: Optional[dict] = None

    def __repr__(self) -> str:
        return f"SimpleFunction({list(self.pieces)!r})"

    def __call__(self, x):
        if np.ndim(x):
            return np.array([self(v) for v in np.ravel(x)]).reshape(np.shape(x))
        if self._lookup is None:
            self._lookup = {a: v for v, A in self.pieces if isinstance(A, frozenset) for a in A}
        try:
            if x in self._lookup:
                return self._lookup[x]
        except TypeError:
            pass
        for value, A in self.pieces:
            if not isinstance(A, frozenset) and _member(A, x):
                return value
        return 0.0

    @property
    def range(self) -> set:
        return {v for v, _ in self.pieces} | {0.0}

    def map_values(self, g: Callable[[float], float]) -> "SimpleFunction":
        """``g`` applied to each value; ``g(0)`` must be 0 off the pieces."""
        return SimpleFunction((g(v), A) for v, A in self.pieces if g(v) != 0.0)

    def __neg__(self) -> "SimpleFunction":
        return self.map_values(lambda v: -v)


def _as_measure(mu):
    if isinstance(mu, (FiniteMeasureSpace, LengthSpace)):
        return mu
    return LengthSpace(mu)


def integrate_simple(s: SimpleFunction, mu, B: Optional[SetLike] = None) -> float:
    """``sum a_i * mu(B ∩ A_i)``, exact up to floating-point summation."""
    space = _as_measure(mu)
    if isinstance(B, (set, list, tuple)):
        B = frozenset(B)
    terms = []
    for value, A in s.pieces:
        if value == 0.0:
            continue
        piece = _intersect_sets(A, B)
        terms.append(value * space.measure(piece))
    return math.fsum(terms)


def integrate_function(f, space: FiniteMeasureSpace, B=None) -> float:
    """Integral of any function over a finite space (every function is simple there)."""
    mask = space._mask(B)
    vals = space.values(f)
    return math.fsum(vals[mask] * space.weights[mask])


def pos_neg_split(f):
    """Return ``(f⁺, f⁻)`` with ``f = f⁺ - f⁻`` and ``|f| = f⁺ + f⁻``."""
    if isinstance(f, SimpleFunction):
        return f.map_values(lambda v: max(v, 0.0)), f.map_values(lambda v: max(-v, 0.0))
    return (lambda x: np.maximum(f(x), 0.0)), (lambda x: np.maximum(-np.asarray(f(x)), 0.0))


def approximate_by_simple(f, space: FiniteMeasureSpace, n: int) -> SimpleFunction:
    """Dyadic approximation ``min(n, floor(2^n f) / 2^n)``, non-decreasing in ``n``."""
    if n < 1:
        raise ValueError("level must be at least 1")
    vals = space.values(f)
    if np.any(vals < 0) or np.any(np.isnan(vals)):
        raise ValueError("approximate_by_simple needs a non-negative function")
    scale = 2.0**n
    with np.errstate(invalid="ignore"):
        levels = np.where(np.isinf(vals), n, np.minimum(n, np.floor(vals * scale) / scale))
    groups: dict[float, list] = {}
    for atom, v in zip(space.atoms, levels):
        if v != 0.0:
            groups.setdefault(float(v), []).append(atom)
    return SimpleFunction((v, frozenset(atoms)) for v, atoms in sorted(groups.items()))


def sup_simple_integral(f, space: FiniteMeasureSpace, depth: int) -> float:
    """``sup ∫s`` over every simple ``0 <= s <= f`` with values on the ``2^-depth`` grid.

    Brute force: all admissible value vectors are enumerated, which is only
    sensible for a handful of atoms.
    """
    vals = space.values(f)
    if np.any(vals < 0):
        raise ValueError("f must be non-negative")
    step = 2.0**-depth
    best = np.zeros(1)
    for v, w in zip(vals, space.weights):
        choices = np.arange(int(math.floor(v / step)) + 1) * step
        best = np.add.outer(best, choices * w).ravel()
    return float(best.max())


def ae_leq(f, g, space: FiniteMeasureSpace) -> bool:
    """``f <= g`` on every atom of positive weight."""
    pos = space.weights > 0
    return bool(np.all(space.values(f)[pos] <= space.values(g)[pos]))


# ---------------------------------------------------------------------------
# convergence theorems at desk scale


@dataclass
class FunctionSequence:
    """Terms ``term(n)`` for ``n`` in ``schedule`` with a declared pointwise limit."""

    term: Callable[[int], object]
    limit: object
    schedule: Sequence[int] = tuple(range(1, 21))
    monotone: bool = False
    dominator: Optional[object] = None


@dataclass
class ConvergenceReport:
    theorem: str
    n: list
    integral_n: list
    gap_n: list
    limit_integral: float
    hypotheses_ok: bool
    failures: list
    converged: bool
    dominator_integral: Optional[float] = None

    @property
    def final_gap(self) -> float:
        return self.gap_n[-1]

    def to_json(self) -> dict:
        return {
            "theorem": self.theorem,
            "n": list(self.n),
            "integral_n": list(self.integral_n),
            "gap_n": list(self.gap_n),
            "limit_integral": self.limit_integral,
            "hypotheses_ok": self.hypotheses_ok,
            "failures": list(self.failures),
            "converged": self.converged,
            "dominator_integral": self.dominator_integral,
        }


def _integral(fn, space) -> float:
    if isinstance(space, FiniteMeasureSpace):
        return integrate_function(fn, space)
    if not isinstance(fn, SimpleFunction):
        raise TypeError("on a length space the terms must be SimpleFunction instances")
    return integrate_simple(fn, space)


def _probe_points(space):
    if isinstance(space, FiniteMeasureSpace):
        return list(space.positive_atoms())
    return space.probes().tolist()


def _on(fn, pts) -> np.ndarray:
    return np.array([float(fn(x)) for x in pts])


def _pointwise_failure(seq: FunctionSequence, pts, last_vals, tol: float) -> Optional[str]:
    target = _on(seq.limit, pts)
    err = np.abs(last_vals - target)
    bad = err > tol * (1.0 + np.abs(target))
    if np.any(bad):
        i = int(np.argmax(bad))
        return f"declared limit not reached at probe {pts[i]!r}: term {last_vals[i]!r} vs limit {target[i]!r}"
    return None


def _run(seq: FunctionSequence, space, theorem: str, failures: dict, tol: float):
    pts = _probe_points(space)
    ns, ints, gaps = [], [], []
    limit_int = _integral(seq.limit, space)
    prev = None
    g = _on(seq.dominator, pts) if (theorem == "dominated_convergence" and seq.dominator is not None) else None
    for n in seq.schedule:
        fn = seq.term(n)
        vals = _on(fn, pts)
        if theorem == "monotone_convergence":
            if np.any(vals < 0):
                failures.setdefault("negative", f"term n={n} is negative somewhere")
            if prev is not None and np.any(vals < prev - 1e-15):
                i = int(np.argmax(vals < prev - 1e-15))
                failures.setdefault(
                    "monotone", f"not monotone at n={n}, probe {float(pts[i])!r}: {prev[i]:g} -> {vals[i]:g}"
                )
        if g is not None and np.any(np.abs(vals) > g + 1e-15):
            i = int(np.argmax(np.abs(vals) > g + 1e-15))
            failures.setdefault("dominated", f"|f_{n}| exceeds the dominator at probe {float(pts[i])!r}")
        prev = vals
        I = _integral(fn, space)
        ns.append(int(n))
        ints.append(I)
        gaps.append(abs(I - limit_int))
    msg = _pointwise_failure(seq, pts, prev, tol)
    if msg:
        failures["pointwise"] = msg
    return ns, ints, gaps, limit_int


def mct_check(seq: FunctionSequence, space, tol: float = 1e-6) -> ConvergenceReport:
    """Integrals of a monotone non-negative sequence against the integral of its limit.

    Violated hypotheses are listed in ``failures``; they do not count
    against the theorem.
    """
    failures: dict[str, str] = {}
    ns, ints, gaps, limit_int = _run(seq, space, "monotone_convergence", failures, tol)
    if any(b < a - 1e-12 for a, b in zip(ints, ints[1:])):
        failures["integrals"] = "integral sequence is not non-decreasing"
    return ConvergenceReport(
        "monotone_convergence", ns, ints, gaps, limit_int, not failures, list(failures.values()), gaps[-1] <= tol
    )


def _envelope_integral(terms: list, space: LengthSpace) -> float:
    """Exact ``∫ max_n |f_n|`` for interval-valued simple functions."""
    cuts = set()
    for s in terms:
        for _, A in s.pieces:
            if not isinstance(A, IntervalUnion):
                raise TypeError("envelope needs interval pieces")
            cuts.update(A.endpoints())
    cuts = sorted(cuts)
    total = []
    for lo, hi in zip(cuts[:-1], cuts[1:]):
        mid = 0.5 * (lo + hi)
        top = max(abs(s(mid)) for s in terms)
        if top:
            total.append(top * space.measure(normalize([(lo, hi)])))
    return math.fsum(total)


def _callable_integral_trend(g, space: LengthSpace) -> tuple[float, bool]:
    """Integral of ``g`` over shrinking truncations of each bounded domain piece.

    Cuts are placed geometrically towards both ends so that an end-point
    singularity is resolved piece by piece.
    """
    totals = []
    for k in range(4, 44, 4):
        parts = []
        for lo, hi in space.domain:
            if not (math.isfinite(lo) and math.isfinite(hi)):
                return math.inf, False
            d = hi - lo
            cuts = sorted({lo + d * 2.0**-j for j in range(1, k + 1)} | {hi - d * 2.0**-j for j in range(1, k + 1)})
            for a, b in zip(cuts[:-1], cuts[1:]):
                parts.append(riemann_integral(g, a, b, tol=1e-10, max_level=16).value)
        totals.append(math.fsum(parts))
    inc = np.abs(np.diff(totals))
    if inc[-1] <= 1e-12 * max(1.0, abs(totals[-1])):
        return totals[-1], True
    # increments must shrink geometrically; constant or growing ones mean divergence
    return totals[-1], bool(inc[-1] <= 0.75 * inc[-2] and inc[-2] <= 0.75 * inc[-3])


def dct_check(seq: FunctionSequence, space, tol: float = 1e-6) -> ConvergenceReport:
    """Dominated convergence at desk scale.

    With ``seq.dominator`` set, domination is checked on the probes and the
    dominator's integral is checked for finiteness.  Without one, the least
    dominator over the schedule (the running envelope) is used; its integral
    growing along the schedule means no integrable dominator exists.
    """
    failures: dict[str, str] = {}
    ns, ints, gaps, limit_int = _run(seq, space, "dominated_convergence", failures, tol)
    dom_int: Optional[float] = None
    if seq.dominator is not None:
        g = seq.dominator
        if isinstance(space, FiniteMeasureSpace):
            dom_int = integrate_function(g, space)
        elif isinstance(g, SimpleFunction):
            try:
                dom_int = integrate_simple(g, space)
            except InfiniteLengthError:
                dom_int = math.inf
        else:
            dom_int, finite = _callable_integral_trend(g, space)
            if not finite:
                failures["integrable"] = (
                    f"dominator not shown to be integrable (truncated integrals do not settle, last {dom_int:.4g})"
                )
        if dom_int is not None and not math.isfinite(dom_int):
            failures["integrable"] = "dominator has infinite integral"
    elif isinstance(space, LengthSpace):
        terms = [seq.term(n) for n in seq.schedule]
        env = [_envelope_integral(terms[: i + 1], space) for i in range(len(terms))]
        dom_int = env[-1]
        inc = np.diff(env)
        if inc.size >= 3 and inc[-1] > 1e-9 and inc[-1] >= 0.5 * inc[-2]:
            failures["integrable"] = (
                f"no integrable dominator: the envelope integral keeps growing ({env[0]:.4g} -> {env[-1]:.4g})"
            )
    else:
        dom_int = integrate_function(lambda x: max(abs(float(seq.term(n)(x))) for n in seq.schedule), space)
    return ConvergenceReport(
        "dominated_convergence", ns, ints, gaps, limit_int, not failures, list(failures.values()),
        gaps[-1] <= tol, dom_int,
    )


def measure_from_density(f, mu: FiniteMeasureSpace) -> FiniteMeasureSpace:
    """The measure ``B -> ∫_B f dmu`` as a new weighting of the same atoms."""
    vals = mu.values(f)
    if np.any(vals < 0):
        raise ValueError("density must be non-negative")
    w = vals * mu.weights
    if not np.all(np.isfinite(w)):
        raise ValueError("density must have a finite integral")
    return FiniteMeasureSpace(mu.atoms, w)


@dataclass
class StaircaseResult:
    n_terms: int
    value: float
    tail_bound: float
    sup_value: float

    def to_json(self) -> dict:
        return {"n_terms": self.n_terms, "value": self.value, "tail_bound": self.tail_bound, "sup_value": self.sup_value}


def staircase_function(N: int) -> SimpleFunction:
    """Value ``n`` on ``(n, n + 1/(n+1)^3]`` for ``n = 1..N``, zero elsewhere."""
    return SimpleFunction((float(n), normalize([(n, n + 1.0 / (n + 1) ** 3)])) for n in range(1, N + 1))


def unbounded_integrable_demo(N: int = 1000) -> StaircaseResult:
    """Partial integral of the unbounded staircase and a bound on what is missing.

    The missing part is ``sum_{n>N} n/(n+1)^3 <= sum_{m>=N+2} 1/m^2 <= 1/(N+1)``.
    """
    if N < 1:
        raise ValueError("need at least one step")
    value = math.fsum(n / (n + 1) ** 3 for n in range(1, N + 1))
    return StaircaseResult(N, value, 1.0 / (N + 1), float(N))
