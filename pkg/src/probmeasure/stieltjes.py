"""Riemann and Riemann-Stieltjes integration by upper, lower and tagged sums.

``integrate`` refines a partition until ``U(P) - L(P)`` drops below the
requested tolerance.  The infimum and supremum of the integrand on each cell
are estimated from equally spaced probes (endpoints and midpoint included)
plus any declared extrema, so they can be fooled by adversarial integrands.
Integrands that know their exact bounds may expose
``interval_bounds(lo, hi) -> (inf, sup)`` instead.

Jump points of the integrator are pinned as permanent partition points.
Purely atomic integrators skip refinement altogether and sum
``f(x) * jump(x)`` over the atoms in ``(a, b]``.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Callable, Iterable, Optional, Sequence

import numpy as np
from scipy import optimize

__all__ = [
    "Partition",
    "IntegrationResult",
    "MonotoneFunction",
    "RationalIndicator",
    "IntegrationError",
    "NonIntegrableError",
    "UnboundedIntegrandError",
    "as_integrator",
    "identity",
    "step_function",
    "floor_function",
    "lower_sum",
    "upper_sum",
    "rs_sum",
    "integrate",
    "integrate_jump",
    "integration_by_parts_residual",
    "change_of_variables",
    "finite_sum_as_integral",
    "euler_summation",
    "riemann_integral",
    "reduce_to_riemann",
]

DEFAULT_PROBES = 17
DEFAULT_TOL = 1e-9
MIXED_TOL = 1e-6


class IntegrationError(ArithmeticError):
    def __init__(self, message: str, result: "IntegrationResult | None" = None):
        super().__init__(message)
        self.result = result


class NonIntegrableError(IntegrationError):
    pass


class UnboundedIntegrandError(IntegrationError):
    def __init__(self, message: str, cell: tuple[float, float]):
        super().__init__(message)
        self.cell = cell


# ---------------------------------------------------------------------------
# partitions and integrators


@dataclass(frozen=True)
class Partition:
    points: np.ndarray
    tags: Optional[np.ndarray] = None

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim != 1 or pts.size < 2:
            raise ValueError("a partition needs at least two points")
        if np.any(np.diff(pts) <= 0):
            raise ValueError("partition points must be strictly increasing")
        object.__setattr__(self, "points", pts)
        if self.tags is not None:
            t = np.asarray(self.tags, dtype=float)
            if t.shape != (pts.size - 1,):
                raise ValueError("need exactly one tag per cell")
            if np.any(t < pts[:-1]) or np.any(t > pts[1:]):
                raise ValueError("every tag must lie in its own cell")
            object.__setattr__(self, "tags", t)

    @classmethod
    def uniform(cls, a: float, b: float, n: int) -> "Partition":
        return cls(np.linspace(a, b, n + 1))

    @property
    def norm(self) -> float:
        return float(np.max(np.diff(self.points)))

    @property
    def n_cells(self) -> int:
        return self.points.size - 1

    def with_midpoint_tags(self) -> "Partition":
        return Partition(self.points, 0.5 * (self.points[:-1] + self.points[1:]))

    def refine(self, extra: Iterable[float]) -> "Partition":
        """Union with extra points inside ``[a, b]``; tags are dropped."""
        a, b = self.points[0], self.points[-1]
        extra = np.asarray([x for x in extra if a <= x <= b], dtype=float)
        return Partition(np.union1d(self.points, extra))

    def bisect(self, cells: Sequence[int]) -> "Partition":
        cells = np.asarray(cells, dtype=int)
        mids = 0.5 * (self.points[cells] + self.points[cells + 1])
        return Partition(np.union1d(self.points, mids))

    def issubset(self, other: "Partition") -> bool:
        return bool(np.all(np.isin(self.points, other.points)))


class MonotoneFunction:
    """A non-decreasing integrator built from a callable.

    ``left`` gives left limits (defaults to ``fn`` itself, i.e. continuity),
    ``jumps`` lists jump locations or is a callable ``(a, b) -> locations``.
    ``pure_jump`` marks step integrators that are constant between jumps.
    """

    def __init__(
        self,
        fn: Callable,
        left: Optional[Callable] = None,
        jumps: Sequence[float] | Callable = (),
        pure_jump: bool = False,
    ):
        self.fn = fn
        self.left = left if left is not None else fn
        self._jumps = jumps
        self.pure_jump = pure_jump

    def __call__(self, x):
        return self.cdf(x)

    def cdf(self, x):
        return _evaluate(self.fn, x)

    def cdf_left(self, x):
        return _evaluate(self.left, x)

    def jump(self, x) -> float:
        return float(self.cdf(x) - self.cdf_left(x))

    def discontinuities_in(self, a: float, b: float) -> list[float]:
        if callable(self._jumps):
            return sorted(self._jumps(a, b))
        return [c for c in self._jumps if a <= c <= b]

    @property
    def is_discrete(self) -> bool:
        return self.pure_jump

    def __add__(self, other) -> "MonotoneFunction":
        other = as_integrator(other)
        return MonotoneFunction(
            lambda x: self.cdf(x) + other.cdf(x),
            lambda x: self.cdf_left(x) + other.cdf_left(x),
            lambda a, b: sorted(set(self.discontinuities_in(a, b)) | set(other.discontinuities_in(a, b))),
            pure_jump=self.is_discrete and other.is_discrete,
        )

    def __radd__(self, other):
        return as_integrator(other) + self


def as_integrator(F):
    """Wrap ``None`` (identity), a law, or a plain callable as an integrator."""
    if F is None:
        return identity()
    if hasattr(F, "cdf") and hasattr(F, "discontinuities_in"):
        return F
    if callable(F):
        return MonotoneFunction(F)
    raise TypeError(f"cannot use {F!r} as an integrator")


def identity() -> MonotoneFunction:
    return MonotoneFunction(lambda x: np.asarray(x, dtype=float) if np.ndim(x) else float(x))


def step_function(c: float, before: float, after: float) -> MonotoneFunction:
    """Right-continuous step: ``before`` on ``x < c``, ``after`` on ``x >= c``."""
    if after < before:
        raise ValueError("step must be non-decreasing")

    def fn(x):
        return np.where(np.asarray(x) >= c, after, before) if np.ndim(x) else (after if x >= c else before)

    def left(x):
        return np.where(np.asarray(x) > c, after, before) if np.ndim(x) else (after if x > c else before)

    return MonotoneFunction(fn, left, (c,), pure_jump=True)


def floor_function() -> MonotoneFunction:
    """The greatest-integer function ``[x]``, with unit jumps at the integers."""

    def left(x):
        return np.ceil(np.asarray(x, dtype=float)) - 1.0 if np.ndim(x) else float(math.ceil(x) - 1)

    def jumps(a, b):
        return [float(k) for k in range(math.ceil(a), math.floor(b) + 1)]

    return MonotoneFunction(
        lambda x: np.floor(np.asarray(x, dtype=float)) if np.ndim(x) else float(math.floor(x)),
        left, jumps, pure_jump=True,
    )


class RationalIndicator:
    """Indicator of the rationals on the real line.

    Every cell of positive length holds both rationals and irrationals, so
    its exact bounds are 0 and 1.  Floating-point inputs are all rationals,
    hence evaluation returns 1.
    """

    def __call__(self, x):
        return np.ones_like(np.asarray(x, dtype=float)) if np.ndim(x) else 1.0

    def interval_bounds(self, lo, hi):
        lo = np.asarray(lo, dtype=float)
        return np.zeros_like(lo), np.ones_like(lo)


def _evaluate(fn: Callable, x):
    if np.ndim(x) == 0:
        return float(fn(x))
    x = np.asarray(x, dtype=float)
    try:
        out = np.asarray(fn(x), dtype=float)
        if out.shape == x.shape:
            return out
        if out.ndim == 0:
            return np.full(x.shape, float(out))
    except (TypeError, ValueError):
        pass
    return np.vectorize(lambda v: float(fn(v)), otypes=[float])(x)


# ---------------------------------------------------------------------------
# sums


def _weights(F, points: np.ndarray) -> np.ndarray:
    vals = np.asarray(F.cdf(points), dtype=float)
    w = np.diff(vals)
    scale = 1.0 + float(np.max(np.abs(vals)))
    if np.any(w < -1e-12 * scale):
        i = int(np.argmin(w))
        raise ValueError(f"integrator decreases on [{points[i]}, {points[i + 1]}]")
    return w


def _cell_bounds(f, points: np.ndarray, probes: int, extrema: Sequence[float]) -> tuple[np.ndarray, np.ndarray]:
    lo, hi = points[:-1], points[1:]
    if hasattr(f, "interval_bounds"):
        m, M = f.interval_bounds(lo, hi)
        return np.asarray(m, dtype=float), np.asarray(M, dtype=float)
    t = np.linspace(0.0, 1.0, probes)
    grid = lo[:, None] + (hi - lo)[:, None] * t[None, :]
    grid[:, -1] = hi
    vals = _evaluate(f, grid)
    if not np.all(np.isfinite(vals)):
        bad = int(np.nonzero(~np.all(np.isfinite(vals), axis=1))[0][0])
        raise UnboundedIntegrandError(
            f"integrand is not finite on [{lo[bad]}, {hi[bad]}]", (float(lo[bad]), float(hi[bad]))
        )
    m = vals.min(axis=1)
    M = vals.max(axis=1)
    if len(extrema):
        ex = np.asarray([e for e in extrema if points[0] <= e <= points[-1]], dtype=float)
        if ex.size:
            fe = _evaluate(f, ex)
            # an extremum on a shared endpoint belongs to both neighbouring cells
            for side in ("left", "right"):
                idx = np.clip(np.searchsorted(points, ex, side=side) - 1, 0, lo.size - 1)
                np.minimum.at(m, idx, fe)
                np.maximum.at(M, idx, fe)
    return m, M


def lower_sum(f, F, P: Partition, probes: int = DEFAULT_PROBES, f_extrema: Sequence[float] = ()) -> float:
    Fi = as_integrator(F)
    m, _ = _cell_bounds(f, P.points, probes, f_extrema)
    return float(np.sum(m * _weights(Fi, P.points)))


def upper_sum(f, F, P: Partition, probes: int = DEFAULT_PROBES, f_extrema: Sequence[float] = ()) -> float:
    Fi = as_integrator(F)
    _, M = _cell_bounds(f, P.points, probes, f_extrema)
    return float(np.sum(M * _weights(Fi, P.points)))


def rs_sum(f, F, P: Partition) -> float:
    """Tagged sum ``sum f(t_i) (F(x_i) - F(x_{i-1}))``; ``P`` must carry tags."""
    if P.tags is None:
        raise ValueError("rs_sum needs a tagged partition (see Partition.with_midpoint_tags)")
    Fi = as_integrator(F)
    return float(np.sum(_evaluate(f, P.tags) * _weights(Fi, P.points)))


# ---------------------------------------------------------------------------
# integration


@dataclass
class IntegrationResult:
    value: float
    lower: float
    upper: float
    gap: float
    refinements: int
    converged: bool

    def to_json(self) -> dict:
        return asdict(self)

    def __neg__(self) -> "IntegrationResult":
        return IntegrationResult(-self.value, -self.upper, -self.lower, self.gap, self.refinements, self.converged)

    def __add__(self, other: "IntegrationResult") -> "IntegrationResult":
        return IntegrationResult(
            self.value + other.value, self.lower + other.lower, self.upper + other.upper,
            self.gap + other.gap, self.refinements + other.refinements, self.converged and other.converged,
        )


def _exact(value: float) -> IntegrationResult:
    return IntegrationResult(value, value, value, 0.0, 0, True)


def integrate(
    f,
    F,
    a: float,
    b: float,
    tol: float = DEFAULT_TOL,
    max_refinements: int = 60,
    *,
    n_initial: int = 16,
    probes: int = DEFAULT_PROBES,
    f_extrema: Sequence[float] = (),
    f_discontinuities: Sequence[float] = (),
    max_cells: int = 2**18,
) -> IntegrationResult:
    """Integrate ``f`` against the monotone ``F`` over ``[a, b]``.

    ``f_discontinuities`` lists the points where ``f`` fails to be
    left-continuous; such a point coinciding with a jump of ``F`` makes the
    integral undefined and raises :class:`NonIntegrableError`.

    Each refinement round bisects the cells carrying the largest share of
    ``U - L`` (together at least half of it).  The reported ``value`` is the
    midpoint-tagged sum of the final partition, which always lies in
    ``[lower, upper]``.
    """
    if not tol > 0:
        raise ValueError("tolerance must be positive")
    if a == b:
        return _exact(0.0)
    if a > b:
        return -integrate(
            f, F, b, a, tol, max_refinements, n_initial=n_initial, probes=probes,
            f_extrema=f_extrema, f_discontinuities=f_discontinuities, max_cells=max_cells,
        )
    Fi = as_integrator(F)
    jumps = [c for c in Fi.discontinuities_in(a, b) if a < c <= b]
    shared = sorted(set(jumps) & {float(d) for d in f_discontinuities})
    if shared:
        raise NonIntegrableError(f"integrand and integrator are both discontinuous at {shared}")

    if Fi.is_discrete:
        return _exact(math.fsum(float(f(c)) * Fi.jump(c) for c in jumps))

    if probes < 3 or probes % 2 == 0:
        raise ValueError("probes must be odd and at least 3 so the midpoint is sampled")
    P = Partition.uniform(a, b, n_initial).refine(jumps)
    rounds = 0
    while True:
        pts = P.points
        w = _weights(Fi, pts)
        m, M = _cell_bounds(f, pts, probes, f_extrema)
        contrib = (M - m) * w
        L = float(np.sum(m * w))
        U = float(np.sum(M * w))
        gap = float(np.sum(contrib))
        mids = 0.5 * (pts[:-1] + pts[1:])
        S = float(np.sum(_evaluate(f, mids) * w))
        S = min(max(S, L), U)
        if gap < tol:
            return IntegrationResult(S, L, U, gap, rounds, True)
        if rounds >= max_refinements or P.n_cells >= max_cells:
            return IntegrationResult(S, L, U, gap, rounds, False)
        order = np.argsort(contrib)[::-1]
        share = np.cumsum(contrib[order])
        k = int(np.searchsorted(share, 0.5 * gap)) + 1
        k = min(k, max_cells - P.n_cells) if P.n_cells < max_cells else 1
        chosen = order[: max(k, 1)]
        chosen = chosen[pts[chosen + 1] - pts[chosen] > 4 * np.spacing(np.abs(pts[chosen]) + 1.0)]
        if chosen.size == 0:
            return IntegrationResult(S, L, U, gap, rounds, False)
        P = P.bisect(chosen)
        rounds += 1


def integrate_jump(f, F, c: float, a: float, b: float, probes: int = 257) -> float:
    """``f(c) * (F(c+) - F(c-))`` for an integrator constant on [a, c) and on (c, b]."""
    if not a < c < b:
        raise ValueError("need a < c < b")
    Fn = F.cdf if hasattr(F, "cdf") else F
    left = np.linspace(a, c, probes)[:-1]
    right = np.linspace(c, b, probes)[1:]
    fl = np.asarray(_evaluate(Fn, left))
    fr = np.asarray(_evaluate(Fn, right))
    # probes hugging c from both sides
    near = np.array([c - (c - a) * 2.0**-k for k in range(1, 40)])
    near_r = np.array([c + (b - c) * 2.0**-k for k in range(1, 40)])
    fl = np.concatenate([fl, _evaluate(Fn, near)])
    fr = np.concatenate([fr, _evaluate(Fn, near_r)])
    if np.ptp(fl) > 0 or np.ptp(fr) > 0:
        raise ValueError("integrator is not a two-piece step around c")
    return float(f(c)) * float(fr[0] - fl[0])


def _turning_points(f, a: float, b: float, grid: int = 4097) -> list[float]:
    x = np.linspace(a, b, grid)
    y = _evaluate(f, x)
    d = np.sign(np.diff(y))
    # carry the previous direction across flat steps
    for i in range(1, d.size):
        if d[i] == 0:
            d[i] = d[i - 1]
    turns = []
    for i in np.nonzero(d[1:] * d[:-1] < 0)[0]:
        lo, hi = x[i], x[i + 2]
        sign = 1.0 if d[i] < 0 else -1.0  # a minimum when the function was falling
        res = optimize.minimize_scalar(
            lambda t: sign * float(f(t)), bounds=(lo, hi), method="bounded", options={"xatol": 1e-13}
        )
        turns.append(float(res.x))
    return turns


def integrate_against(F_integrand, g, a: float, b: float, tol: float, turning_points=None, **kw) -> IntegrationResult:
    """``∫ F dg`` for a continuous ``g`` that is piecewise monotone on ``[a, b]``."""
    if turning_points is None:
        turning_points = _turning_points(g, a, b)
    cuts = [a] + sorted(t for t in turning_points if a < t < b) + [b]
    total = _exact(0.0)
    ga = lambda x: _evaluate(g, x)
    for lo, hi in zip(cuts[:-1], cuts[1:]):
        if hi <= lo:
            continue
        piece_tol = tol * (hi - lo) / (b - a)
        if float(g(hi)) >= float(g(lo)):
            r = integrate(F_integrand, MonotoneFunction(ga), lo, hi, piece_tol, **kw)
        else:
            r = -integrate(F_integrand, MonotoneFunction(lambda x: -ga(x)), lo, hi, piece_tol, **kw)
        total = total + r
    return total


def integration_by_parts_residual(f, F, a: float, b: float, tol: float = 1e-4, **kw) -> float:
    """``|∫f dF + ∫F df - (F(b) f(b) - F(a) f(a))|``.

    ``f`` may change direction; it is split into monotone pieces at its
    turning points before being used as an integrator.
    """
    Fi = as_integrator(F)
    first = integrate(f, Fi, a, b, tol, **kw)
    second = integrate_against(Fi.cdf, f, a, b, tol, **kw)
    for name, r in (("∫f dF", first), ("∫F df", second)):
        if not r.converged:
            raise IntegrationError(f"{name} did not converge (gap {r.gap:.3g})", r)
    boundary = float(Fi.cdf(b)) * float(f(b)) - float(Fi.cdf(a)) * float(f(a))
    return abs(first.value + second.value - boundary)


def change_of_variables(f, F, g: Callable, c: float, d: float, tol: float = 1e-6, probes: int = 1025, **kw) -> float:
    """``∫_c^d f(g(x)) dF(g(x))``, checked against ``∫_{g(c)}^{g(d)} f dF``.

    Raises :class:`IntegrationError` when the two sides differ by more than
    the sum of their ``U - L`` gaps.
    """
    xs = np.linspace(c, d, probes)
    gs = _evaluate(g, xs)
    steps = np.diff(gs)
    if not (np.all(steps > 0) or np.all(steps < 0)):
        raise ValueError("g is not strictly monotone on [c, d]")
    increasing = bool(steps[0] > 0)
    Fi = as_integrator(F)
    lo_g, hi_g = sorted((float(g(c)), float(g(d))))

    def preimages(x0, x1):
        out = []
        for j in Fi.discontinuities_in(lo_g, hi_g):
            if j in (float(g(c)), float(g(d))):
                out.append(c if j == float(g(c)) else d)
                continue
            out.append(optimize.brentq(lambda t: float(g(t)) - j, c, d, xtol=1e-15))
        return [p for p in out if x0 <= p <= x1]

    sign = 1.0 if increasing else -1.0
    G = MonotoneFunction(lambda x: sign * _evaluate(Fi.cdf, _evaluate(g, x)), jumps=preimages)
    h = lambda x: _evaluate(f, _evaluate(g, x))
    lhs = integrate(h, G, c, d, tol, **kw)
    if not increasing:
        lhs = -lhs
    rhs = integrate(f, Fi, float(g(c)), float(g(d)), tol, **kw)
    if abs(lhs.value - rhs.value) > lhs.gap + rhs.gap + 1e-12:
        raise IntegrationError(
            f"change of variables mismatch: {lhs.value!r} vs {rhs.value!r} (gaps {lhs.gap:.3g}, {rhs.gap:.3g})"
        )
    return lhs.value


def finite_sum_as_integral(a_seq: Sequence[float]) -> float:
    """``sum a_k`` computed as ``∫_0^n f d[x]`` with ``f = a_k`` on ``(k-1, k]``."""
    coeffs = np.asarray(a_seq, dtype=float)
    n = coeffs.size
    if n < 1:
        raise ValueError("need at least one term")
    table = np.concatenate([[0.0], coeffs])

    def f(x):
        k = np.clip(np.ceil(np.asarray(x, dtype=float)).astype(int), 0, n)
        return table[k] if np.ndim(x) else float(table[k])

    return integrate(f, floor_function(), 0.0, float(n)).value


# ---------------------------------------------------------------------------
# Riemann integrals


@dataclass
class RiemannResult:
    value: float
    error: float
    levels: int


def _romberg(f, a: float, b: float, tol: float, min_level: int, max_level: int) -> RiemannResult:
    h = b - a
    fa, fb = _evaluate(f, np.array([a, b]))
    prev_row = [0.5 * h * (fa + fb)]
    estimate, err = prev_row[0], math.inf
    for k in range(1, max_level + 1):
        h *= 0.5
        new_x = a + h * (2 * np.arange(2 ** (k - 1)) + 1)
        trap = 0.5 * prev_row[0] + h * math.fsum(_evaluate(f, new_x))
        row = [trap]
        for j in range(1, k + 1):
            row.append(row[j - 1] + (row[j - 1] - prev_row[j - 1]) / (4**j - 1))
        err = abs(row[-1] - prev_row[-1])
        estimate = row[-1]
        if k >= min_level and err <= tol * max(1.0, abs(estimate)):
            return RiemannResult(estimate, err, k)
        prev_row = row
    return RiemannResult(estimate, err, max_level)


def riemann_integral(
    f, a: float, b: float, breakpoints: Iterable[float] = (), tol: float = 1e-12,
    min_level: int = 5, max_level: int = 22,
) -> RiemannResult:
    """Riemann integral by Richardson extrapolation of trapezoid sums.

    The integrand need only be smooth between ``breakpoints``; each smooth
    piece is handled separately.
    """
    if a == b:
        return RiemannResult(0.0, 0.0, 0)
    if a > b:
        r = riemann_integral(f, b, a, breakpoints, tol, min_level, max_level)
        return RiemannResult(-r.value, r.error, r.levels)
    cuts = [a] + sorted(p for p in set(breakpoints) if a < p < b) + [b]
    parts = [_romberg(f, lo, hi, tol, min_level, max_level) for lo, hi in zip(cuts[:-1], cuts[1:])]
    return RiemannResult(
        math.fsum(p.value for p in parts), math.fsum(p.error for p in parts), max(p.levels for p in parts)
    )


def euler_summation(f, f_prime, a: float, b: float, tol: float = 1e-13) -> float:
    """Right-hand side of Euler's summation formula for ``sum_{a<n<=b} f(n)``."""
    if a > b:
        raise ValueError("need a <= b")
    cuts = [a] + [float(k) for k in range(math.floor(a) + 1, math.ceil(b))] + [b]
    main = riemann_integral(f, a, b, breakpoints=cuts, tol=tol)
    saw = []
    for lo, hi in zip(cuts[:-1], cuts[1:]):
        # on each unit cell x - [x] is the smooth x - k, including its right end
        k = math.floor(lo)
        saw.append(_romberg(lambda x, k=k: _evaluate(f_prime, x) * (x - k), lo, hi, tol, 5, 22).value)
    return (
        main.value + math.fsum(saw)
        + float(f(a)) * (a - math.floor(a)) - float(f(b)) * (b - math.floor(b))
    )


def reduce_to_riemann(f, F, F_prime, a: float, b: float, tol: float = 1e-12, breakpoints=()) -> float:
    """``∫ f dF`` for continuously differentiable ``F`` as ``∫ f F' dx``."""
    return riemann_integral(lambda x: _evaluate(f, x) * _evaluate(F_prime, x), a, b, breakpoints, tol).value
