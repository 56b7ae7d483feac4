"""Classical probability inequalities, each checked against a reference value.

Every check returns a :class:`VerificationReport` holding the analytic bound,
the reference probability (or expectation) it should dominate, and how that
reference was obtained: ``exact`` (closed-form CDF values or complete
enumeration of a finite outcome space) or ``monte_carlo`` (seeded sampling
with a three-standard-error allowance).

A check whose hypotheses are not met raises :class:`HypothesisError`;
:func:`run_suite` records such cases with status ``hypothesis_failure``.
"""

from __future__ import annotations

import csv
import io
import itertools
import json
import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np
from scipy import optimize, special

from .distributions import Continuous, Discrete, DistributionFunction, Mixed, discrete, from_spec
from .expectation import (
    TRUNCATION,
    NonIntegrableLawError,
    absolute_moment,
    expect,
    expect_of_function,
    moment,
    variance,
)

__all__ = [
    "VerificationReport",
    "HypothesisError",
    "JointLaw",
    "ConvexityResult",
    "SllnReport",
    "INEQUALITY_IDS",
    "FUNCTIONS",
    "markov",
    "generalized_markov",
    "chebyshev",
    "convexity_check",
    "jensen",
    "hoeffding_bound",
    "hoeffding_verify",
    "hoeffding_lemma_check",
    "g_function",
    "g_second_derivative",
    "g_function_check",
    "cauchy_schwarz_check",
    "normal_tail",
    "normal_tail_bound",
    "slln_demo",
    "levy_check",
    "holder_check",
    "minkowski_check",
    "default_grid",
    "run_case",
    "run_suite",
    "reports_to_jsonl",
    "reports_to_csv",
    "summarize",
    "case_seed",
]

INEQUALITY_IDS = (
    "markov",
    "generalized_markov",
    "chebyshev",
    "jensen",
    "hoeffding",
    "hoeffding_lemma",
    "g_function",
    "cauchy_schwarz",
    "normal_tail",
    "slln",
    "levy",
    "holder",
    "minkowski",
)

EXACT_LIMIT = 2**20
MIN_TRIALS = 10_000
# absolute allowance for rounding in exactly computed references
ROUNDING = 1e-12
# allowance for expectation-type inequalities, relative to max(1, |bound|)
MOMENT_TOL = 1e-10

CSV_COLUMNS = ("inequality_id", "bound", "reference", "slack", "pass")


class HypothesisError(ValueError):
    """The inequality's hypotheses do not hold for the supplied case."""


@dataclass
class VerificationReport:
    inequality_id: str
    analytic_bound: float
    reference_probability: float
    mode: str
    sample_count: int = 0
    seed: Optional[int] = None
    statistical_slack: float = 0.0
    tolerance: float = 0.0
    passed: bool = False
    margin: float = 0.0
    vacuous: bool = False
    status: str = "pass"
    metadata: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "inequality_id": self.inequality_id,
            "analytic_bound": self.analytic_bound,
            "reference_probability": self.reference_probability,
            "mode": self.mode,
            "sample_count": self.sample_count,
            "seed": self.seed,
            "statistical_slack": self.statistical_slack,
            "tolerance": self.tolerance,
            "pass": self.passed,
            "margin": self.margin,
            "vacuous": self.vacuous,
            "status": self.status,
            "metadata": self.metadata,
        }


def _report(
    ineq: str, bound: float, ref: float, mode: str = "exact", *, n_samples: int = 0, seed=None,
    slack: float = 0.0, tol: float = ROUNDING, probability: bool = True, **meta,
) -> VerificationReport:
    bound, ref = float(bound), float(ref)
    margin = bound + slack + tol - ref
    ok = bool(margin >= 0)
    return VerificationReport(
        ineq, bound, ref, mode, int(n_samples), seed, float(slack), float(tol), ok, margin,
        bool(probability and bound > 1.0), "pass" if ok else "fail", meta,
    )


def _slack(p_hat: float, n: int) -> float:
    return 3.0 * math.sqrt(max(p_hat * (1.0 - p_hat), 0.0) / n)


def _law(spec) -> DistributionFunction:
    return spec if isinstance(spec, DistributionFunction) else from_spec(spec)


def _check_trials(trials: int):
    if trials < MIN_TRIALS:
        raise ValueError(f"Monte Carlo mode needs at least {MIN_TRIALS} trials, got {trials}")


def _sample(law: DistributionFunction, trials: int, seed: int) -> np.ndarray:
    _check_trials(trials)
    if seed is None:
        raise ValueError("a seed is required for Monte Carlo mode")
    return law.sample(trials, seed)


def _probe_points(law: DistributionFunction) -> np.ndarray:
    if isinstance(law, Discrete):
        return law.support
    if isinstance(law, Mixed):
        return np.concatenate([law.discrete_part.support, _probe_points(law.continuous_part)])
    lo, hi = TRUNCATION.get(law.family, law.support_range(1e-12))
    return np.linspace(max(lo, law.lower), min(hi, law.upper), 4001)


def _vec(g: Callable, x: np.ndarray) -> np.ndarray:
    try:
        out = np.asarray(g(x), dtype=float)
        if out.shape == x.shape:
            return out
    except (TypeError, ValueError):
        pass
    return np.array([float(g(v)) for v in x])


def _upper_tail(law: DistributionFunction, a: float) -> float:
    """``P(X > a)``."""
    return 1.0 - float(law.cdf(a))


def _has_negative_mass(law: DistributionFunction) -> bool:
    return float(law.cdf_left(0.0)) > 0.0


# ---------------------------------------------------------------------------
# Markov family


def markov(X, a: float, mode: str = "exact", *, absolute: bool = False, trials: int = 100_000,
           seed: Optional[int] = None) -> VerificationReport:
    """``P(X > a) <= E(X)/a``, or ``P(|X| > a) <= E|X|/a`` with ``absolute=True``."""
    law = _law(X)
    if not a > 0:
        raise HypothesisError("Markov's inequality needs a > 0")
    if not absolute and _has_negative_mass(law):
        raise HypothesisError("law puts mass below 0; use the |X| form")
    m = absolute_moment(law, 1.0).value if absolute else expect(law).value
    bound = m / a
    ineq = "markov"
    if mode == "exact":
        ref = _upper_tail(law, a) + (float(law.cdf_left(-a)) if absolute else 0.0)
        return _report(ineq, bound, ref, form="abs" if absolute else "plain")
    x = _sample(law, trials, seed)
    p = float(np.mean((np.abs(x) if absolute else x) > a))
    return _report(ineq, bound, p, "monte_carlo", n_samples=trials, seed=seed, slack=_slack(p, trials), tol=0.0,
                   form="abs" if absolute else "plain")


def _level_set_probability(law: Continuous, g: Callable, a: float) -> float:
    """``P(g(X) > a)`` for a continuous law, from the sign changes of ``g - a``."""
    lo, hi = TRUNCATION.get(law.family, law.support_range(1e-15))
    lo, hi = max(lo, law.lower), min(hi, law.upper)
    xs = np.linspace(lo, hi, 20001)
    h = _vec(g, xs) - a
    above = h > 0
    total = 0.0
    i = 0
    roots = lambda j: optimize.brentq(lambda t: float(g(t)) - a, xs[j], xs[j + 1], xtol=1e-14)
    while i < xs.size:
        if not above[i]:
            i += 1
            continue
        j = i
        while j + 1 < xs.size and above[j + 1]:
            j += 1
        left = -math.inf if i == 0 else roots(i - 1)
        right = math.inf if j == xs.size - 1 else roots(j)
        if i == 0 and law.lower > -math.inf:
            left = law.lower
        total += float(law.cdf(right)) - float(law.cdf(left))
        i = j + 1
    return total


def generalized_markov(g: Callable, X, a: float, mode: str = "exact", *, trials: int = 100_000,
                       seed: Optional[int] = None, name: str = "g") -> VerificationReport:
    """``P(g(X) > a) <= E(g(X))/a`` for non-negative ``g``."""
    law = _law(X)
    if not a > 0:
        raise HypothesisError("generalized Markov needs a > 0")
    probes = _probe_points(law)
    if np.any(_vec(g, probes) < 0):
        raise HypothesisError(f"{name} takes negative values on the support")
    bound = expect_of_function(g, law).value / a
    if mode == "exact":
        if isinstance(law, Discrete):
            ref = math.fsum(law.masses[_vec(g, law.support) > a])
        elif isinstance(law, Continuous):
            ref = _level_set_probability(law, g, a)
        else:
            d = math.fsum(law.discrete_part.masses[_vec(g, law.discrete_part.support) > a])
            ref = law.w * d + (1 - law.w) * _level_set_probability(law.continuous_part, g, a)
        return _report("generalized_markov", bound, ref, g=name, a=a)
    x = _sample(law, trials, seed)
    p = float(np.mean(_vec(g, x) > a))
    return _report("generalized_markov", bound, p, "monte_carlo", n_samples=trials, seed=seed,
                   slack=_slack(p, trials), tol=0.0, g=name, a=a)


def chebyshev(X, eps: float, mode: str = "exact", *, trials: int = 100_000,
              seed: Optional[int] = None) -> VerificationReport:
    """``P(|X - E(X)| > eps) <= Var(X)/eps^2``."""
    law = _law(X)
    if not eps > 0:
        raise HypothesisError("Chebyshev's inequality needs eps > 0")
    mu = expect(law).value
    bound = variance(law).value / eps**2
    if mode == "exact":
        ref = _upper_tail(law, mu + eps) + float(law.cdf_left(mu - eps))
        return _report("chebyshev", bound, ref, eps=eps)
    x = _sample(law, trials, seed)
    p = float(np.mean(np.abs(x - mu) > eps))
    return _report("chebyshev", bound, p, "monte_carlo", n_samples=trials, seed=seed, slack=_slack(p, trials),
                   tol=0.0, eps=eps)


# ---------------------------------------------------------------------------
# convexity and Jensen


@dataclass
class ConvexityResult:
    convex: bool
    certificate: Optional[dict] = None

    def __bool__(self) -> bool:
        return self.convex


def convexity_check(psi: Callable, lo: float, hi: float, n: int = 65, n_t: int = 9) -> ConvexityResult:
    """Probe ``psi(t x + (1-t) y) <= t psi(x) + (1-t) psi(y)`` on a grid of triples.

    The grid has ``n`` points on ``[lo, hi]`` (endpoints included); ``t``
    ranges over ``n_t`` equally spaced interior values plus 1/2.  The first
    violation beyond a ``1e-12`` relative slack is returned as a certificate.
    """
    if n < 3:
        raise ValueError("convexity grid needs at least 3 points")
    if not lo < hi:
        raise ValueError("need lo < hi")
    xs = np.linspace(lo, hi, n)
    ts = np.union1d(np.arange(1, n_t + 1) / (n_t + 1), [0.5])
    fx = _vec(psi, xs)
    X, Y = np.meshgrid(xs, xs, indexing="ij")
    FX, FY = np.meshgrid(fx, fx, indexing="ij")
    for t in ts:
        z = (t * X + (1 - t) * Y).ravel()
        lhs = _vec(psi, z).reshape(X.shape)
        rhs = t * FX + (1 - t) * FY
        bad = lhs > rhs + 1e-12 * np.maximum(1.0, np.abs(rhs))
        if np.any(bad):
            i, j = np.unravel_index(int(np.argmax(bad)), bad.shape)
            return ConvexityResult(False, {
                "x": float(xs[i]), "y": float(xs[j]), "t": float(t),
                "lhs": float(lhs[i, j]), "rhs": float(rhs[i, j]),
            })
    return ConvexityResult(True)


def _support_interval(law: DistributionFunction) -> tuple[float, float]:
    pts = _probe_points(law)
    lo, hi = float(np.min(pts)), float(np.max(pts))
    if lo == hi:
        lo, hi = lo - 1.0, hi + 1.0
    return lo, hi


def jensen(psi: Callable, X, mode: str = "exact", *, name: str = "psi") -> VerificationReport:
    """``psi(E X) <= E psi(X)``: bound side ``E psi(X)``, reference side ``psi(E X)``."""
    law = _law(X)
    lo, hi = _support_interval(law)
    conv = convexity_check(psi, lo, hi)
    if not conv:
        raise HypothesisError(f"{name} is not convex on [{lo:g}, {hi:g}]: {conv.certificate}")
    mean = expect(law).value
    rhs = expect_of_function(psi, law).value
    lhs = float(psi(mean))
    return _report("jensen", rhs, lhs, mode, tol=MOMENT_TOL * max(1.0, abs(rhs)), probability=False, psi=name)


# ---------------------------------------------------------------------------
# Hoeffding


def _ranges(n: int, ranges) -> list[tuple[float, float]]:
    if ranges is None or len(ranges) == 0:
        raise ValueError("at least one (a, b) range is required")
    if len(ranges) == 2 and all(isinstance(v, (int, float)) for v in ranges):
        ranges = [tuple(ranges)] * n
    ranges = [(float(a), float(b)) for a, b in ranges]
    if len(ranges) != n:
        raise ValueError(f"n = {n} but {len(ranges)} ranges were given")
    for a, b in ranges:
        if not b > a:
            raise ValueError(f"range ({a}, {b}) needs b > a")
    return ranges


def hoeffding_bound(variant: str, n: int, eps: float, ranges, form: str = "sum") -> float:
    """Hoeffding bounds for ``P(sum (X_i - E X_i) > n eps)``.

    ``v1``: ``exp(-n^2 eps^2 / (2 S))``; ``v2``: ``exp(-2 n^2 eps^2 / S)`` with
    ``S = sum (b_i - a_i)^2``.  ``form="mean_two_sided"`` gives the bound on
    ``P(|mean - E X_1| > eps)`` for identical ranges: twice the one-sided
    bound.
    """
    if variant not in ("v1", "v2"):
        raise ValueError("variant must be 'v1' or 'v2'")
    if eps < 0:
        raise ValueError("eps must be non-negative")
    rs = _ranges(n, ranges)
    S = math.fsum((b - a) ** 2 for a, b in rs)
    c = 0.5 if variant == "v1" else 2.0
    one = math.exp(-c * n * n * eps * eps / S)
    if form == "sum":
        return one
    if form == "mean_two_sided":
        return 2.0 * one
    raise ValueError(f"unknown form {form!r}")


_PRINTED_HOEFFDING = {
    "v1": "P(| X̄ − E(X₁)| nε) ≤ e^{−nε²/(2(b−a)²)}",
    "v2": "P(| X̄ − E(X₁)| nε) ≤ 2e^{−2nε²/(b−a)²}",
}


def _sum_distribution(laws: Sequence[Discrete]) -> tuple[np.ndarray, np.ndarray]:
    """Values and masses of ``X_1 + ... + X_n`` by enumerating every outcome."""
    vals, ms = np.zeros(1), np.ones(1)
    for law in laws:
        vals = np.add.outer(vals, law.support).ravel()
        ms = np.multiply.outer(ms, law.masses).ravel()
    return vals, ms


def hoeffding_verify(variant: str, laws: Sequence, eps: float, trials: int = 100_000,
                     seed: Optional[int] = None, ranges=None, form: str = "sum") -> VerificationReport:
    """Compare ``P(sum (X_i - E X_i) > n eps)`` (or the two-sided mean form) with the bound."""
    laws = [_law(s) for s in laws]
    n = len(laws)
    if n == 0:
        raise ValueError("need at least one variable")
    if not eps > 0:
        raise HypothesisError("Hoeffding's inequality needs eps > 0")
    if ranges is None:
        ranges = [_support_interval_strict(L) for L in laws]
    rs = _ranges(n, ranges)
    for i, (L, (a, b)) in enumerate(zip(laws, rs)):
        lo, hi = _support_interval_strict(L)
        if lo < a or hi > b:
            raise HypothesisError(f"variable {i} has support [{lo:g}, {hi:g}] outside its range [{a:g}, {b:g}]")
    if form == "mean_two_sided" and len(set(rs)) != 1:
        raise HypothesisError("the mean form needs identical ranges")
    bound = hoeffding_bound(variant, n, eps, rs, form)
    mu = math.fsum(expect(L).value for L in laws)
    thr = n * eps
    guard = 1e-12 * max(1.0, thr)
    meta = {"variant": variant, "form": form, "n": n, "eps": eps}
    if form == "mean_two_sided":
        meta["printed_statement"] = _PRINTED_HOEFFDING[variant]
    outcomes = math.prod(len(L.support) if isinstance(L, Discrete) else math.inf for L in laws)
    if outcomes <= EXACT_LIMIT:
        vals, ms = _sum_distribution(laws)
        dev = vals - mu
        hit = np.abs(dev) > thr + guard if form == "mean_two_sided" else dev > thr + guard
        ref = math.fsum(ms[hit])
        return _report("hoeffding", bound, ref, **meta)
    _check_trials(trials)
    if seed is None:
        raise ValueError("a seed is required for Monte Carlo mode")
    rng = np.random.default_rng(seed)
    total = np.zeros(trials)
    for L in laws:
        total += L._sample(rng, trials)
    dev = total - mu
    hit = np.abs(dev) > thr + guard if form == "mean_two_sided" else dev > thr + guard
    p = float(np.mean(hit))
    return _report("hoeffding", bound, p, "monte_carlo", n_samples=trials, seed=seed, slack=_slack(p, trials),
                   tol=0.0, **meta)


def _support_interval_strict(law: DistributionFunction) -> tuple[float, float]:
    if isinstance(law, Discrete):
        if law.truncated:
            raise HypothesisError("a truncated law has no declared bounded support")
        return float(law.support[0]), float(law.support[-1])
    if isinstance(law, Continuous) and math.isfinite(law.lower) and math.isfinite(law.upper):
        return law.lower, law.upper
    raise HypothesisError(f"{law!r} is not bounded")


def hoeffding_lemma_check(X, s: float, a: Optional[float] = None, b: Optional[float] = None) -> VerificationReport:
    """``E e^{sX} <= e^{s^2 (b-a)^2 / 8}`` for a mean-zero discrete law on ``[a, b]``."""
    law = _law(X)
    if not isinstance(law, Discrete) or law.truncated:
        raise HypothesisError("the lemma check needs a finite discrete law")
    if not s > 0:
        raise HypothesisError("s must be positive")
    lo, hi = float(law.support[0]), float(law.support[-1])
    a = lo if a is None else float(a)
    b = hi if b is None else float(b)
    if lo < a or hi > b:
        raise HypothesisError(f"support [{lo:g}, {hi:g}] escapes [{a:g}, {b:g}]")
    mean = math.fsum(law.support * law.masses)
    if abs(mean) > 1e-12:
        raise HypothesisError(f"mean is {mean!r}, not 0")
    lhs = math.fsum(np.exp(s * law.support) * law.masses)
    bound = math.exp(s * s * (b - a) ** 2 / 8.0)
    return _report("hoeffding_lemma", bound, lhs, tol=ROUNDING, probability=False, s=s, a=a, b=b)


def g_function(u, theta: float):
    """``g(u) = -theta u + log(1 - theta + theta e^u)``."""
    u = np.asarray(u, dtype=float)
    return -theta * u + np.log1p(theta * np.expm1(u))


def g_second_derivative(u, theta: float):
    u = np.asarray(u, dtype=float)
    eu = np.exp(u)
    return theta * eu * (1 - theta) / (1 - theta + theta * eu) ** 2


def g_function_check(theta: float, u_grid=None) -> VerificationReport:
    """``g(0) = 0``, ``g'(0) = 0`` and ``g'' <= 1/4`` on a grid of ``u``."""
    if not 0.0 < theta < 1.0:
        raise HypothesisError("theta must lie in (0, 1)")
    if u_grid is None:
        u_grid = np.round(np.arange(-500, 501) * 0.01, 12)
    u_grid = np.asarray(u_grid, dtype=float)
    g0 = float(g_function(0.0, theta))
    h = 1e-5
    d0 = float((g_function(h, theta) - g_function(-h, theta)) / (2 * h))
    gpp = g_second_derivative(u_grid, theta)
    k = int(np.argmax(gpp))
    rep = _report(
        "g_function", 0.25, float(gpp[k]), tol=1e-10, probability=False,
        theta=theta, g0=g0, g_prime_0=d0, argmax_u=float(u_grid[k]),
        printed_statement="g(u) = -θu + log(1 - θ + θe^4)",
    )
    if g0 != 0.0 or abs(d0) > 1e-6:
        rep.passed = False
        rep.status = "fail"
    return rep


# ---------------------------------------------------------------------------
# joint laws and moment inequalities


@dataclass(frozen=True, eq=False)
class JointLaw:
    """Finitely many outcomes ``(x, y)`` with masses."""

    outcomes: np.ndarray
    masses: np.ndarray

    def __post_init__(self):
        o = np.asarray(self.outcomes, dtype=float).reshape(-1, 2)
        m = np.asarray(self.masses, dtype=float)
        if m.shape != (o.shape[0],):
            raise ValueError("one mass per outcome")
        if np.any(m < 0) or abs(math.fsum(m) - 1.0) > 1e-12:
            raise ValueError("masses must be non-negative and sum to 1")
        object.__setattr__(self, "outcomes", o)
        object.__setattr__(self, "masses", m)

    @classmethod
    def independent(cls, X, Y) -> "JointLaw":
        X, Y = _law(X), _law(Y)
        for L in (X, Y):
            if not isinstance(L, Discrete) or L.truncated:
                raise ValueError("independent products need finite discrete laws")
        xs, ys = np.meshgrid(X.support, Y.support, indexing="ij")
        ms = np.multiply.outer(X.masses, Y.masses)
        return cls(np.column_stack([xs.ravel(), ys.ravel()]), ms.ravel())

    @classmethod
    def from_spec(cls, spec) -> "JointLaw":
        if isinstance(spec, JointLaw):
            return spec
        if "independent" in spec:
            X, Y = spec["independent"]
            return cls.independent(
                X if isinstance(X, DistributionFunction) else from_spec(X, "joint.independent[0]"),
                Y if isinstance(Y, DistributionFunction) else from_spec(Y, "joint.independent[1]"),
            )
        return cls(np.asarray(spec["outcomes"], dtype=float), np.asarray(spec["masses"], dtype=float))

    def expect(self, fn: Callable) -> float:
        return math.fsum(fn(self.outcomes[:, 0], self.outcomes[:, 1]) * self.masses)

    def norm(self, fn: Callable, p: float) -> float:
        return self.expect(lambda x, y: np.abs(fn(x, y)) ** p) ** (1.0 / p)


def cauchy_schwarz_check(X, Y=None, mode: str = "exact") -> VerificationReport:
    """``(E|XY|)^2 <= E(X^2) E(Y^2)``; with ``Y`` omitted, ``(E X)^2 <= E(X^2)``.

    ``X`` may be a :class:`JointLaw` (then ``Y`` must be omitted) or a law.
    """
    meta = {"printed_statement": "E(X^2) <= (E(X))^2", "printed_direction_reversed": True}
    if isinstance(X, JointLaw) or (isinstance(X, dict) and ("outcomes" in X or "independent" in X)):
        J = JointLaw.from_spec(X)
        lhs = J.expect(lambda x, y: np.abs(x * y)) ** 2
        rhs = J.expect(lambda x, y: x * x) * J.expect(lambda x, y: y * y)
        meta["implemented"] = "(E|XY|)^2 <= E(X^2) E(Y^2)"
    elif Y is not None:
        return cauchy_schwarz_check(JointLaw.independent(X, Y), mode=mode)
    else:
        law = _law(X)
        lhs = expect(law).value ** 2
        rhs = moment(law, 2).value
        meta["implemented"] = "(E X)^2 <= E(X^2)"
    return _report("cauchy_schwarz", rhs, lhs, mode, tol=MOMENT_TOL * max(1.0, abs(rhs)), probability=False, **meta)


def _conjugate(p: float, q: Optional[float]) -> float:
    if not 1.0 < p < math.inf:
        raise HypothesisError("Hölder needs 1 < p < inf")
    if q is None:
        return p / (p - 1.0)
    if abs(1.0 / p + 1.0 / q - 1.0) >= 1e-12:
        raise HypothesisError(f"p = {p}, q = {q} are not conjugate exponents")
    return float(q)


def holder_check(joint, p: float, q: Optional[float] = None, mode: str = "exact") -> VerificationReport:
    """``E|XY| <= ||X||_p ||Y||_q`` for conjugate ``p, q``."""
    q = _conjugate(p, q)
    J = JointLaw.from_spec(joint)
    lhs = J.expect(lambda x, y: np.abs(x * y))
    rhs = J.norm(lambda x, y: x, p) * J.norm(lambda x, y: y, q)
    return _report("holder", rhs, lhs, mode, tol=MOMENT_TOL * max(1.0, abs(rhs)), probability=False, p=p, q=q)


def minkowski_check(joint, p: float, mode: str = "exact") -> VerificationReport:
    """``||X + Y||_p <= ||X||_p + ||Y||_p`` for ``p >= 1``."""
    if not 1.0 <= p < math.inf:
        raise HypothesisError("Minkowski needs 1 <= p < inf")
    J = JointLaw.from_spec(joint)
    lhs = J.norm(lambda x, y: x + y, p)
    rhs = J.norm(lambda x, y: x, p) + J.norm(lambda x, y: y, p)
    return _report("minkowski", rhs, lhs, mode, tol=MOMENT_TOL * max(1.0, abs(rhs)), probability=False, p=p)


# ---------------------------------------------------------------------------
# normal tails


def normal_tail_bound(eps: float, form: str = "one_sided", n: int = 1) -> float:
    c = 1.0 / (eps * math.sqrt(2 * math.pi))
    if form == "one_sided":
        return c * math.exp(-0.5 * eps * eps)
    if form == "two_sided":
        return 2 * c * math.exp(-0.5 * eps * eps)
    if form == "mean_n":
        return 2.0 / (eps * math.sqrt(2 * n * math.pi)) * math.exp(-0.5 * n * eps * eps)
    raise ValueError(f"unknown form {form!r}")


def normal_tail(eps: float, form: str = "one_sided", n: int = 1) -> VerificationReport:
    """Mills-ratio bounds for standard normal tails against ``1 - Φ``."""
    if not eps > 0:
        raise HypothesisError("eps must be positive")
    if form == "mean_n" and n < 1:
        raise HypothesisError("n must be a positive integer")
    bound = normal_tail_bound(eps, form, n)
    if form == "one_sided":
        ref = float(special.ndtr(-eps))
    elif form == "two_sided":
        ref = 2.0 * float(special.ndtr(-eps))
    else:
        ref = 2.0 * float(special.ndtr(-math.sqrt(n) * eps))
    return _report("normal_tail", bound, ref, tol=0.0, form=form, n=n, eps=eps)


# ---------------------------------------------------------------------------
# strong law and Lévy


@dataclass
class SllnReport:
    p: float
    seed: int
    delta: float
    n: list
    means: list
    envelope: list
    inside: bool

    def to_json(self) -> dict:
        return {
            "p": self.p, "seed": self.seed, "delta": self.delta, "n": self.n,
            "means": self.means, "envelope": self.envelope, "inside": self.inside,
        }


def hoeffding_envelope(n, delta: float = 1e-6):
    """``sqrt(log(2/delta) / (2n))``: half-width of the two-sided Hoeffding band."""
    return np.sqrt(math.log(2.0 / delta) / (2.0 * np.asarray(n, dtype=float)))


def slln_demo(p: float, n_schedule: Sequence[int], seed: int, delta: float = 1e-6) -> SllnReport:
    """Running means of ``X_i = 1{U_i < p}`` along ``n_schedule``."""
    if not 0.0 < p < 1.0:
        raise HypothesisError("p must lie in (0, 1)")
    sched = [int(n) for n in n_schedule]
    if not sched or min(sched) < 1:
        raise ValueError("schedule entries must be positive")
    rng = np.random.default_rng(seed)
    x = rng.random(max(sched)) < p
    csum = np.cumsum(x)
    means = [float(csum[n - 1] / n) for n in sched]
    env = hoeffding_envelope(sched, delta).tolist()
    inside = all(abs(m - p) < e for m, e in zip(means, env))
    return SllnReport(p, seed, delta, sched, means, env, inside)


def _slln_report(p: float, n_schedule, seed: int, delta: float = 1e-6) -> VerificationReport:
    r = slln_demo(p, n_schedule, seed, delta)
    ratio = max(abs(m - p) / e for m, e in zip(r.means, r.envelope))
    rep = _report("slln", 1.0, ratio, "monte_carlo", n_samples=max(r.n), seed=seed, tol=0.0, probability=False,
                  p=p, delta=delta, final_mean=r.means[-1], final_envelope=r.envelope[-1])
    return rep


def _convolve_power(law: Discrete, k: int) -> Discrete:
    vals, ms = _sum_distribution([law] * k)
    return discrete(vals, ms)


def _median_mid(law: Discrete) -> float:
    lo, hi = law.median_interval()
    return 0.5 * (lo + hi)


def levy_check(X, n: int, eps: float, mode: str = "exact", trials: int = 100_000,
               seed: Optional[int] = None) -> VerificationReport:
    """``P(max_j (S_j - m(S_j - S_n)) >= eps) <= 2 P(S_n >= eps)`` for i.i.d. steps."""
    law = _law(X)
    if not eps > 0:
        raise HypothesisError("eps must be positive")
    if n < 1:
        raise HypothesisError("n must be positive")
    meta = {"n": n, "eps": eps, "printed_statement": "P{max_j (S_j - m(S_j - S_n)) <= ε} <= 2P(S_n >= ε)"}
    guard = 1e-12 * max(1.0, eps)
    if mode == "exact":
        if not isinstance(law, Discrete) or law.truncated or law.support.size**n > EXACT_LIMIT:
            raise ValueError("exact Lévy check needs a finite discrete law with at most 2^20 paths")
        # m(S_j - S_n) is the median of minus a sum of n - j steps
        med = np.zeros(n)
        for j in range(1, n):
            Sk = _convolve_power(law, n - j)
            med[j - 1] = -_median_mid(Sk) if Sk.support.size > 1 else -float(Sk.support[0])
        idx = np.array(list(itertools.product(range(law.support.size), repeat=n)), dtype=np.intp)
        steps = law.support[idx]
        prob = np.prod(law.masses[idx], axis=1)
        S = np.cumsum(steps, axis=1)
        event = np.max(S - med, axis=1) >= eps - guard
        ref = math.fsum(prob[event])
        bound = 2.0 * math.fsum(prob[S[:, -1] >= eps - guard])
        return _report("levy", bound, ref, medians=med.tolist(), **meta)
    _check_trials(trials)
    if seed is None:
        raise ValueError("a seed is required for Monte Carlo mode")
    # median pre-pass on its own stream
    pre = np.random.default_rng(seed + 1)
    steps = np.column_stack([law._sample(pre, trials) for _ in range(n)])
    S = np.cumsum(steps, axis=1)
    med = np.median(S - S[:, -1:], axis=0)
    rng = np.random.default_rng(seed)
    steps = np.column_stack([law._sample(rng, trials) for _ in range(n)])
    S = np.cumsum(steps, axis=1)
    pa = float(np.mean(np.max(S - med, axis=1) >= eps - guard))
    ps = float(np.mean(S[:, -1] >= eps - guard))
    slack = _slack(pa, trials) + 2.0 * _slack(ps, trials)
    return _report("levy", 2.0 * ps, pa, "monte_carlo", n_samples=trials, seed=seed, slack=slack, tol=0.0,
                   medians=med.tolist(), **meta)


# ---------------------------------------------------------------------------
# suite

FUNCTIONS: dict[str, Callable] = {
    "identity": lambda x: np.asarray(x, dtype=float),
    "square": lambda x: np.square(x),
    "abs": lambda x: np.abs(x),
    "abs_cube": lambda x: np.abs(x) ** 3,
    "exp": lambda x: np.exp(x),
    "affine": lambda x: 2.0 * np.asarray(x, dtype=float) + 1.0,
    "const0": lambda x: np.zeros_like(np.asarray(x, dtype=float)),
    "const1": lambda x: np.ones_like(np.asarray(x, dtype=float)),
    "sin": lambda x: np.sin(x),
    "neg_square": lambda x: -np.square(x),
}


def _fn(name: str) -> Callable:
    if name not in FUNCTIONS:
        raise ValueError(f"unknown function {name!r}; known: {sorted(FUNCTIONS)}")
    return FUNCTIONS[name]


def case_seed(seed: int, case_index: int) -> int:
    """Per-case seed derived only from ``(seed, case_index)``."""
    return int(np.random.SeedSequence([int(seed), int(case_index)]).generate_state(1)[0])


def _mc(case: dict) -> dict:
    return {"trials": int(case.get("trials", 100_000)), "seed": case.get("seed")}


def run_case(case: dict) -> VerificationReport:
    """Evaluate one case description (see README for the schema)."""
    iid = case.get("inequality_id")
    mode = case.get("mode", "exact")
    if iid == "markov":
        return markov(case["law"], float(case["a"]), mode, absolute=bool(case.get("absolute", False)), **_mc(case))
    if iid == "generalized_markov":
        return generalized_markov(_fn(case["g"]), case["law"], float(case["a"]), mode, name=case["g"], **_mc(case))
    if iid == "chebyshev":
        return chebyshev(case["law"], float(case["eps"]), mode, **_mc(case))
    if iid == "jensen":
        return jensen(_fn(case["psi"]), case["law"], name=case["psi"])
    if iid == "hoeffding":
        laws = case.get("laws") or [case["law"]] * int(case["n"])
        return hoeffding_verify(case.get("variant", "v2"), laws, float(case["eps"]), ranges=case.get("ranges"),
                                form=case.get("form", "sum"), **_mc(case))
    if iid == "hoeffding_lemma":
        return hoeffding_lemma_check(case["law"], float(case["s"]), case.get("a"), case.get("b"))
    if iid == "g_function":
        grid = None
        if "u_min" in case:
            k = int(round((case["u_max"] - case["u_min"]) / case["u_step"]))
            grid = case["u_min"] + case["u_step"] * np.arange(k + 1)
        return g_function_check(float(case["theta"]), grid)
    if iid == "cauchy_schwarz":
        if "joint" in case:
            return cauchy_schwarz_check(JointLaw.from_spec(case["joint"]))
        return cauchy_schwarz_check(case["law"])
    if iid == "normal_tail":
        return normal_tail(float(case["eps"]), case.get("form", "one_sided"), int(case.get("n", 1)))
    if iid == "slln":
        return _slln_report(float(case["p"]), case["n_schedule"], int(case["seed"]), float(case.get("delta", 1e-6)))
    if iid == "levy":
        return levy_check(case["law"], int(case["n"]), float(case["eps"]), mode, **_mc(case))
    if iid == "holder":
        return holder_check(case["joint"], float(case["p"]), case.get("q"))
    if iid == "minkowski":
        return minkowski_check(case["joint"], float(case["p"]))
    raise ValueError(f"unknown inequality_id {iid!r}")


def _failed(case: dict, status: str, exc: Exception) -> VerificationReport:
    return VerificationReport(
        str(case.get("inequality_id")), math.nan, math.nan, case.get("mode", "exact"),
        seed=case.get("seed"), passed=False, status=status, metadata={"error": str(exc)},
    )


def run_suite(config) -> list[VerificationReport]:
    """Run every case in order; a failing case is recorded and the suite continues."""
    reports = []
    for case in config:
        try:
            rep = run_case(case)
        except (HypothesisError, NonIntegrableLawError) as exc:
            rep = _failed(case, "hypothesis_failure", exc)
        except Exception as exc:  # recorded per case by contract
            rep = _failed(case, "error", exc)
        rep.metadata.setdefault("case", case.get("name", case.get("inequality_id")))
        reports.append(rep)
    return reports


def summarize(reports: Sequence[VerificationReport]) -> dict:
    out = {"total": len(reports), "pass": 0, "fail": 0, "hypothesis_failure": 0, "error": 0}
    for r in reports:
        out[r.status] = out.get(r.status, 0) + 1
    out["exact"] = sum(r.mode == "exact" for r in reports)
    out["monte_carlo"] = sum(r.mode == "monte_carlo" for r in reports)
    return out


def _clean(x):
    if isinstance(x, float) and not math.isfinite(x):
        return None if math.isnan(x) else ("+inf" if x > 0 else "-inf")
    if isinstance(x, dict):
        return {k: _clean(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_clean(v) for v in x]
    if isinstance(x, np.generic):
        return _clean(x.item())
    return x


def reports_to_jsonl(reports: Sequence[VerificationReport]) -> str:
    return "".join(json.dumps(_clean(r.to_json()), sort_keys=False) + "\n" for r in reports)


def reports_to_csv(reports: Sequence[VerificationReport]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in reports:
        w.writerow([r.inequality_id, repr(r.analytic_bound), repr(r.reference_probability),
                    repr(r.statistical_slack), "true" if r.passed else "false"])
    return buf.getvalue()


# default grid ---------------------------------------------------------------

_BERN = lambda p: {"family": "bernoulli", "p": p}
_RADEMACHER = {"family": "discrete", "points": [-1.0, 1.0], "masses": [0.5, 0.5]}


def default_grid(seed: int = 42) -> list[dict]:
    """The shipped case grid: every inequality id, exact and Monte Carlo modes."""
    cases: list[dict] = []
    nonneg = [
        {"family": "exponential1"}, _BERN(0.3), _BERN(0.5), {"family": "binomial", "n": 10, "p": 0.3},
        {"family": "poisson", "lambda": 2.5}, {"family": "point_mass", "c": 0.0},
        {"family": "discrete", "points": [0, 1, 4, 9], "masses": [0.1, 0.2, 0.3, 0.4]},
    ]
    signed = [{"family": "normal01"}, _RADEMACHER, {"family": "discrete", "points": [-2, 0.5, 3], "masses": [0.2, 0.5, 0.3]}]
    for law in nonneg:
        for a in (0.5, 1.0, 2.0, 4.0):
            cases.append({"inequality_id": "markov", "law": law, "a": a})
    for law in signed:
        for a in (0.5, 1.5):
            cases.append({"inequality_id": "markov", "law": law, "a": a, "absolute": True})
    for law, a in ((nonneg[0], 2.0), (nonneg[3], 4.0), (signed[0], 1.0)):
        cases.append({"inequality_id": "markov", "law": law, "a": a, "absolute": law is signed[0],
                      "mode": "monte_carlo", "trials": 20_000})
    for g in ("square", "abs", "exp", "const0"):
        for law in (nonneg[0], signed[0], signed[2], nonneg[3]):
            if g == "exp" and law is nonneg[0]:
                continue  # E e^X is infinite for the exponential law
            for a in (1.0, 4.0):
                cases.append({"inequality_id": "generalized_markov", "law": law, "g": g, "a": a})
    cases.append({"inequality_id": "generalized_markov", "law": nonneg[0], "g": "square", "a": 4.0,
                  "mode": "monte_carlo", "trials": 20_000})
    for law in nonneg[:5] + signed:
        for eps in (0.4, 1.0, 2.0):
            cases.append({"inequality_id": "chebyshev", "law": law, "eps": eps})
    cases.append({"inequality_id": "chebyshev", "law": signed[0], "eps": 2.0, "mode": "monte_carlo", "trials": 20_000})
    for psi in ("square", "exp", "affine", "abs", "abs_cube"):
        for law in (_BERN(0.3), signed[0], nonneg[0], signed[2], {"family": "point_mass", "c": 1.5}):
            if psi == "exp" and law is nonneg[0]:
                continue
            cases.append({"inequality_id": "jensen", "law": law, "psi": psi})
    for variant in ("v1", "v2"):
        for n, eps in ((1, 0.4), (4, 0.2), (10, 0.1), (12, 0.3)):
            cases.append({"inequality_id": "hoeffding", "variant": variant, "law": _BERN(0.5), "n": n, "eps": eps})
        cases.append({"inequality_id": "hoeffding", "variant": variant, "law": _BERN(0.5), "n": 12, "eps": 0.2,
                      "form": "mean_two_sided"})
        cases.append({"inequality_id": "hoeffding", "variant": variant,
                      "laws": [_BERN(0.2), _BERN(0.7), signed[2], _RADEMACHER], "eps": 0.3})
        cases.append({"inequality_id": "hoeffding", "variant": variant, "law": _BERN(0.5), "n": 50, "eps": 0.2,
                      "mode": "monte_carlo", "trials": 100_000})
        cases.append({"inequality_id": "hoeffding", "variant": variant, "law": _BERN(0.5), "n": 100, "eps": 0.1,
                      "form": "mean_two_sided", "mode": "monte_carlo", "trials": 20_000})
    lemma_laws = [
        _RADEMACHER,
        {"family": "discrete", "points": [-2.0, 3.0], "masses": [0.6, 0.4]},
        {"family": "discrete", "points": [-1.0, 0.0, 2.0], "masses": [0.5, 0.25, 0.25]},
    ]
    for law in lemma_laws:
        for s in (0.1, 0.5, 1.0, 2.0, 5.0):
            cases.append({"inequality_id": "hoeffding_lemma", "law": law, "s": s})
    for theta in (0.1, 0.3, 0.5, 0.7, 0.9):
        cases.append({"inequality_id": "g_function", "theta": theta, "u_min": -5.0, "u_max": 5.0, "u_step": 0.01})
    for law in (_BERN(0.5), signed[0], nonneg[0], {"family": "point_mass", "c": 2.0}, signed[2]):
        cases.append({"inequality_id": "cauchy_schwarz", "law": law})
    joints = [
        {"independent": [_RADEMACHER, _RADEMACHER]},
        {"independent": [_BERN(0.5), _BERN(0.5)]},
        {"independent": [signed[2], _BERN(0.3)]},
        {"outcomes": [[1, 1], [-1, 1], [2, -1], [0, 3]], "masses": [0.4, 0.3, 0.2, 0.1]},
        {"outcomes": [[1, 1], [-1, 1]], "masses": [0.5, 0.5]},
    ]
    for j in joints:
        cases.append({"inequality_id": "cauchy_schwarz", "joint": j})
    for form, n in (("one_sided", 1), ("two_sided", 1), ("mean_n", 4), ("mean_n", 10)):
        for eps in (0.5, 1.0, 1.5, 2.0, 3.0):
            cases.append({"inequality_id": "normal_tail", "eps": eps, "form": form, "n": n})
    for p in (0.5, 0.1, 0.9):
        cases.append({"inequality_id": "slln", "p": p, "n_schedule": [10, 100, 1000, 10_000], "mode": "monte_carlo"})
    for n, eps in ((1, 1.0), (5, 2.0), (10, 3.0), (10, 1.0)):
        cases.append({"inequality_id": "levy", "law": _RADEMACHER, "n": n, "eps": eps})
    cases.append({"inequality_id": "levy", "law": signed[2], "n": 6, "eps": 2.0})
    cases.append({"inequality_id": "levy", "law": {"family": "normal01"}, "n": 20, "eps": 3.0,
                  "mode": "monte_carlo", "trials": 100_000})
    for j in joints:
        for p in (1.5, 2.0, 3.0):
            cases.append({"inequality_id": "holder", "joint": j, "p": p})
        for p in (1.0, 2.0, 3.0):
            cases.append({"inequality_id": "minkowski", "joint": j, "p": p})
    for i, c in enumerate(cases):
        c.setdefault("mode", "exact")
        if c["mode"] == "monte_carlo":
            c["seed"] = case_seed(seed, i)
        c["name"] = f"{c['inequality_id']}-{i:03d}"
    return cases
