"""Expectations, moments and L_p norms computed through the law of a variable.

A random variable is represented only by its distribution function; every
expectation is an integral against that function.  Discrete laws are summed
atom by atom, continuous laws with a density are reduced to a Riemann integral
on a truncated range, and mixtures are combined linearly.  Each result carries
an estimate of what the truncation left out.
"""

from __future__ import annotations

import itertools
import math
import warnings
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from scipy import special

from .distributions import Continuous, Discrete, DistributionFunction, Mixed
from .stieltjes import integrate, riemann_integral

__all__ = [
    "RandomVariable",
    "MomentResult",
    "IntegrabilityReport",
    "NonIntegrableLawError",
    "CancellationWarning",
    "expect",
    "expect_closed_form",
    "expect_of_function",
    "moment",
    "absolute_moment",
    "variance",
    "lp_norm",
    "affine_check",
    "is_integrable",
    "vanishes_on_all_events",
    "TRUNCATION",
]

METHODS = ("closed_form", "stieltjes", "enumeration")

# truncation ranges for the continuous standard families, and how far out the
# numerical tail estimate reaches (the densities underflow beyond that)
TRUNCATION = {"normal01": (-10.0, 10.0), "exponential1": (0.0, 40.0)}
_FAR = {"normal01": (-40.0, 40.0), "exponential1": (0.0, 800.0)}


class NonIntegrableLawError(ArithmeticError):
    pass


class CancellationWarning(RuntimeWarning):
    pass


@dataclass(frozen=True)
class RandomVariable:
    law: DistributionFunction
    label: str = "X"


@dataclass(frozen=True)
class MomentResult:
    order: float
    value: float
    method: str
    truncation_error: float = 0.0

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"unknown method {self.method!r}")
        if not self.truncation_error >= 0:
            raise ValueError("truncation error must be non-negative")

    def to_json(self) -> dict:
        return {
            "order": self.order,
            "value": self.value,
            "method": self.method,
            "truncation_error": self.truncation_error,
        }


def _law(X) -> DistributionFunction:
    return X.law if isinstance(X, RandomVariable) else X


def _vec(g: Callable, x: np.ndarray) -> np.ndarray:
    try:
        out = np.asarray(g(x), dtype=float)
        if out.shape == x.shape:
            return out
    except (TypeError, ValueError):
        pass
    return np.array([float(g(v)) for v in x])


# ---------------------------------------------------------------------------
# tails


def _poisson_tail(law: Discrete, h: Callable) -> float:
    lam = law.params["lambda"]
    K = int(law.support[-1])
    j = np.arange(K + 1, K + 401, dtype=float)
    pmf = np.exp(j * math.log(lam) - lam - special.gammaln(j + 1))
    return math.fsum(np.abs(_vec(h, j)) * pmf)


def _discrete_tail(law: Discrete, h: Callable) -> float:
    if not law.truncated or law.tail_mass == 0.0:
        return 0.0
    if law.family == "poisson":
        return _poisson_tail(law, h)
    # the location of the missing mass is unknown
    return math.inf


def _continuous_tail(law: Continuous, h: Callable, lo: float, hi: float) -> float:
    far = _FAR.get(law.family)
    if far is None:
        return 0.0 if (lo <= law.lower and hi >= law.upper) else math.inf

    def integrand(x):
        v = np.abs(_vec(h, x)) * law.density(x)
        return np.where(np.isnan(v), np.inf, v)

    with np.errstate(all="ignore"):
        return _tail_parts(integrand, far, lo, hi)


def _tail_parts(integrand, far, lo, hi) -> float:
    parts = []
    if far[0] < lo:
        parts.append(riemann_integral(integrand, far[0], lo, tol=1e-10, max_level=16).value)
    if hi < far[1]:
        parts.append(riemann_integral(integrand, hi, far[1], tol=1e-10, max_level=16).value)
    return math.fsum(parts)


def _abs_power_tail(law: Continuous, p: float) -> Optional[float]:
    """Exact ``∫ |x|^p dF`` outside the truncation range for the standard families."""
    if law.family == "exponential1":
        T = TRUNCATION["exponential1"][1]
        return float(special.gamma(p + 1) * special.gammaincc(p + 1, T))
    if law.family == "normal01":
        T = TRUNCATION["normal01"][1]
        a = (p + 1) / 2
        return float(2 ** (p / 2) * special.gamma(a) * special.gammaincc(a, T * T / 2) / math.sqrt(math.pi))
    return None


# ---------------------------------------------------------------------------
# core integrals


def _discrete_expect(law: Discrete, g: Callable, order, tail_h: Optional[Callable] = None) -> MomentResult:
    vals = _vec(g, law.support)
    value = math.fsum(vals * law.masses)
    tail = _discrete_tail(law, tail_h or g)
    return MomentResult(order, value, "enumeration", tail)


def _continuous_range(law: Continuous) -> tuple[float, float]:
    if law.family in TRUNCATION:
        return TRUNCATION[law.family]
    lo, hi = law.support_range(1e-15)
    return max(lo, law.lower), min(hi, law.upper)


def _continuous_expect(law: Continuous, g: Callable, order, tol: float, tail: Optional[float] = None) -> MomentResult:
    lo, hi = _continuous_range(law)
    if law.density is not None:
        f = lambda x: _vec(g, x) * law.density(x)
        bps = [0.0] if lo < 0.0 < hi else []
        value = riemann_integral(f, lo, hi, breakpoints=bps, tol=min(tol, 1e-12)).value
    else:
        res = integrate(g, law, lo, hi, tol=tol)
        value = res.value
    if tail is None:
        tail = _continuous_tail(law, g, lo, hi)
        if not (math.isfinite(tail) and tail <= 1e-6 * max(1.0, abs(value))):
            raise NonIntegrableLawError(
                f"the integrand is not negligible beyond the truncation range [{lo:g}, {hi:g}] "
                f"(tail estimate {tail:.3g}); the expectation may diverge"
            )
    return MomentResult(order, value, "stieltjes", tail)


def _expect_g(law, g: Callable, order, tol: float, abs_power: Optional[float] = None) -> MomentResult:
    if isinstance(law, Discrete):
        return _discrete_expect(law, g, order)
    if isinstance(law, Continuous):
        tail = _abs_power_tail(law, abs_power) if abs_power is not None else None
        return _continuous_expect(law, g, order, tol, tail)
    if isinstance(law, Mixed):
        d = _discrete_expect(law.discrete_part, g, order)
        tail = _abs_power_tail(law.continuous_part, abs_power) if abs_power is not None else None
        c = _continuous_expect(law.continuous_part, g, order, tol, tail)
        w = law.w
        return MomentResult(
            order, w * d.value + (1 - w) * c.value, "stieltjes",
            w * d.truncation_error + (1 - w) * c.truncation_error,
        )
    raise TypeError(f"unsupported law {law!r}")


def _require_integrable(law, power: float):
    rep = is_integrable(law, power=power)
    if not rep.integrable:
        raise NonIntegrableLawError(f"E|X|^{power:g} is not finite: {rep.diagnostic}")


def expect(X, tol: float = 1e-9) -> MomentResult:
    """``E(X) = ∫ x dF(x)``."""
    law = _law(X)
    _require_integrable(law, 1.0)
    return _expect_g(law, lambda x: x, 1, tol, abs_power=1.0)


def moment(X, k: int, tol: float = 1e-9) -> MomentResult:
    """``E(X^k)`` for a positive integer ``k``."""
    if int(k) != k or k < 1:
        raise ValueError("moment order must be a positive integer")
    k = int(k)
    law = _law(X)
    _require_integrable(law, float(k))
    return _expect_g(law, lambda x: np.power(x, k), k, tol, abs_power=float(k))


def absolute_moment(X, p: float, tol: float = 1e-9) -> MomentResult:
    """``E|X|^p`` for real ``p > 0``."""
    if not p > 0:
        raise ValueError("p must be positive")
    law = _law(X)
    _require_integrable(law, float(p))
    return _expect_g(law, lambda x: np.power(np.abs(x), p), p, tol, abs_power=float(p))


def variance(X, tol: float = 1e-9) -> MomentResult:
    """``m2 - m1^2``; warns when the two terms agree to more than 8 digits."""
    m1 = moment(X, 1, tol)
    m2 = moment(X, 2, tol)
    sq = m1.value * m1.value
    if m2.value != 0.0 and abs(m2.value - sq) <= 1e-8 * abs(m2.value):
        warnings.warn("variance: m2 and m1^2 agree to more than 8 digits", CancellationWarning, stacklevel=2)
    err = m2.truncation_error + 2 * abs(m1.value) * m1.truncation_error
    return MomentResult(2, max(m2.value - sq, 0.0), m2.method, err)


def lp_norm(X, p: float, tol: float = 1e-9) -> MomentResult:
    """``(E|X|^p)^(1/p)`` for ``p >= 1``."""
    if not p >= 1:
        raise ValueError("L_p norm needs p >= 1")
    m = absolute_moment(X, p, tol)
    value = m.value ** (1.0 / p)
    err = 0.0
    if m.truncation_error:
        err = (m.value + m.truncation_error) ** (1.0 / p) - value
    return MomentResult(p, value, m.method, err)


def expect_of_function(g: Callable, X, tol: float = 1e-9) -> MomentResult:
    """``E g(X) = ∫ g(x) dF(x)``; exact atom sums for discrete laws."""
    law = _law(X)
    return _expect_g(law, g, 1, tol)


_CLOSED = {
    "bernoulli": lambda prm: 1.0 - prm["p"],
    "binomial": lambda prm: prm["n"] * prm["p"],
    "poisson": lambda prm: float(prm["lambda"]),
    "normal01": lambda prm: 0.0,
    "exponential1": lambda prm: 1.0,
}


def expect_closed_form(fam) -> MomentResult:
    """Closed-form mean of a standard family (law object or JSON spec)."""
    if isinstance(fam, RandomVariable):
        fam = fam.law
    if isinstance(fam, DistributionFunction):
        name, params = fam.family, getattr(fam, "params", {})
    else:
        name, params = str(fam["family"]).lower(), dict(fam)
        if name == "poisson" and "lambda" not in params and "lam" in params:
            params["lambda"] = params["lam"]
    if name not in _CLOSED:
        raise ValueError(f"no closed form for family {name!r}")
    return MomentResult(1, float(_CLOSED[name](params)), "closed_form", 0.0)


def affine_check(X, a: float, b: float, tol: float = 1e-9) -> float:
    """``|E(aX + b) - (a E(X) + b)|`` with the left side computed directly."""
    lhs = expect_of_function(lambda x: a * np.asarray(x, dtype=float) + b, X, tol).value
    return abs(lhs - (a * expect(X, tol).value + b))


def vanishes_on_all_events(X, atol: float = 0.0) -> bool:
    """``E(X 1_A) = 0`` for every set ``A`` of atoms of a finite discrete law."""
    law = _law(X)
    if not isinstance(law, Discrete) or law.truncated:
        raise TypeError("only finite discrete laws have an enumerable event field")
    if law.support.size > 20:
        raise ValueError("too many atoms to enumerate every event")
    contrib = law.support * law.masses
    for r in range(1, contrib.size + 1):
        for idx in itertools.combinations(range(contrib.size), r):
            if abs(math.fsum(contrib[list(idx)])) > atol:
                return False
    return True


# ---------------------------------------------------------------------------
# integrability


@dataclass
class IntegrabilityReport:
    integrable: bool
    diagnostic: str
    tail_mass: float
    levels: list
    partial_integrals: list

    def __bool__(self) -> bool:
        return self.integrable

    def to_json(self) -> dict:
        return {
            "integrable": self.integrable,
            "diagnostic": self.diagnostic,
            "tail_mass": self.tail_mass,
            "levels": list(self.levels),
            "partial_integrals": list(self.partial_integrals),
        }


def _judge(levels: list, partial: list, tail_mass: float, exhausted_note: str) -> IntegrabilityReport:
    inc = np.diff([0.0] + list(partial))
    scale = max(1.0, abs(partial[-1]))
    if len(inc) >= 2 and inc[-1] <= 1e-12 * scale:
        return IntegrabilityReport(True, "truncated integrals have stopped growing", tail_mass, levels, partial)
    nz = inc[inc > 0]
    if len(nz) >= 3:
        r1, r2 = nz[-2] / nz[-3], nz[-1] / nz[-2]
        if r1 <= 0.75 and r2 <= 0.75:
            return IntegrabilityReport(True, "increments shrink geometrically", tail_mass, levels, partial)
        if r1 >= 1.0 and r2 >= 1.0:
            return IntegrabilityReport(
                False, f"divergent trend: increments do not shrink beyond |x| = {levels[-3]:g}",
                tail_mass, levels, partial,
            )
    return IntegrabilityReport(False, f"budget exhausted ({exhausted_note})", tail_mass, levels, partial)


def is_integrable(X, budget: int = 40, power: float = 1.0) -> IntegrabilityReport:
    """Whether ``E|X|^power`` is finite, judged from truncated integrals.

    Finite discrete laws and the standard families are integrable outright.
    Otherwise ``∫_{|x|<=T} |x|^power dF`` is tracked over doubling ``T``
    (at most ``budget`` doublings) and its increments are inspected.
    """
    law = _law(X)
    if isinstance(law, Mixed):
        d = is_integrable(law.discrete_part, budget, power)
        c = is_integrable(law.continuous_part, budget, power)
        if not d:
            return d
        return c
    if isinstance(law, Discrete):
        if not law.truncated or law.family == "poisson":
            note = "finite support" if not law.truncated else "standard family with exact tail mass"
            return IntegrabilityReport(True, note, law.tail_mass, [], [])
        a = np.abs(law.support)
        top = float(a.max())
        T = float(a[a > 0].min()) if np.any(a > 0) else 1.0
        levels, partial = [], []
        w = np.power(a, power) * law.masses
        for _ in range(budget):
            levels.append(T)
            partial.append(math.fsum(w[a <= T]))
            if T >= top:
                break
            T *= 2.0
        return _judge(levels, partial, law.tail_mass, "support ends before the trend settles")
    if isinstance(law, Continuous):
        if law.family in TRUNCATION:
            return IntegrabilityReport(True, "standard family: all moments finite", 0.0, [], [])
        if law.density is None:
            return IntegrabilityReport(False, "budget exhausted (no density to probe)", 0.0, [], [])
        h = lambda x: np.power(np.abs(x), power) * law.density(x)

        def piece(lo, hi):
            lo, hi = max(lo, law.lower), min(hi, law.upper)
            return riemann_integral(h, lo, hi, tol=1e-10, max_level=16).value if lo < hi else 0.0

        levels, partial = [1.0], [piece(-1.0, 1.0)]
        T = 1.0
        for _ in range(budget):
            T *= 2.0
            partial.append(partial[-1] + piece(T / 2, T) + piece(-T, -T / 2))
            levels.append(T)
        return _judge(levels, partial, 0.0, f"|x| up to {levels[-1]:g}")
    raise TypeError(f"unsupported law {law!r}")
