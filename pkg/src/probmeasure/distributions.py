"""Distribution functions: evaluation, left limits, jumps and sampling.

Three representations cover everything the package needs:

* :class:`Discrete` -- finitely many atoms (Bernoulli, Binomial, truncated
  Poisson, point masses, empirical CDFs, user tables);
* :class:`Continuous` -- a continuous CDF given as a callable, optionally with a
  density and a quantile function;
* :class:`Mixed` -- ``w * discrete + (1 - w) * continuous``.

All of them are immutable.  ``cdf`` and ``cdf_left`` accept scalars or numpy
arrays.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np
from scipy import special

from .intervals import IntervalUnion, length_under

__all__ = [
    "DistributionFunction",
    "Discrete",
    "Continuous",
    "Mixed",
    "DistributionSpecError",
    "bernoulli",
    "binomial",
    "poisson",
    "normal01",
    "exponential1",
    "point_mass",
    "discrete",
    "mixed",
    "empirical_cdf",
    "kolmogorov_distance",
    "from_spec",
    "BRACKETS",
]

MASS_TOL = 1e-12
POISSON_TAIL = 1e-13
BRACKETS = ("(a,b]", "(a,b)", "[a,b)", "[a,b]")


class DistributionSpecError(ValueError):
    pass


def _scalar_or_array(x, fn):
    arr = np.asarray(x, dtype=float)
    out = fn(np.atleast_1d(arr))
    if arr.ndim == 0:
        return float(out[0])
    return out.reshape(arr.shape)


class DistributionFunction:
    """Common interface.  Subclasses implement the private vectorised hooks."""

    family: Optional[str] = None
    params: dict

    def cdf(self, x):
        return _scalar_or_array(x, self._cdf)

    def cdf_left(self, x):
        return _scalar_or_array(x, self._cdf_left)

    def __call__(self, x):
        return self.cdf(x)

    def jump(self, x) -> float:
        return 0.0

    @property
    def discontinuities(self) -> tuple:
        return ()

    def discontinuities_in(self, a: float, b: float) -> list[float]:
        """Registered jump locations inside the closed interval ``[a, b]``."""
        return [c for c in self.discontinuities if a <= c <= b]

    @property
    def is_discrete(self) -> bool:
        return False

    @property
    def truncation_error(self) -> float:
        """Probability mass lost to truncation (0 for exact laws)."""
        return 0.0

    def prob_interval(self, bracket: str, a: float, b: float) -> float:
        """P of an interval with the given bracket shape, e.g. ``"[a,b)"``."""
        if a > b:
            raise ValueError(f"need a <= b, got a={a}, b={b}")
        key = bracket.replace(" ", "")
        if key == "(a,b]":
            return max(self.cdf(b) - self.cdf(a), 0.0)
        if key == "(a,b)":
            return max(self.cdf_left(b) - self.cdf(a), 0.0)
        if key == "[a,b)":
            return max(self.cdf_left(b) - self.cdf_left(a), 0.0)
        if key == "[a,b]":
            return max(self.cdf(b) - self.cdf_left(a), 0.0)
        raise ValueError(f"unknown bracket {bracket!r}; expected one of {BRACKETS}")

    def prob(self, B: IntervalUnion) -> float:
        return length_under(self, B)

    def quantile(self, u):
        """Generalised inverse ``inf{x : F(x) >= u}``."""
        return _scalar_or_array(u, self._quantile)

    def median(self) -> float:
        return float(self.quantile(0.5))

    def median_interval(self) -> tuple[float, float]:
        """Every point of this closed interval is a median."""
        lo = self.median()
        hi = _bisect_upper(self, 0.5, lo)
        return lo, hi

    def support_and_mass(self) -> list[tuple[float, float]]:
        raise TypeError(f"{type(self).__name__} is not purely discrete")

    def sample(self, n: int, seed: int) -> np.ndarray:
        if n < 1:
            raise ValueError("sample size must be at least 1")
        rng = np.random.default_rng(seed)
        return self._sample(rng, n)

    def _sample(self, rng: np.random.Generator, n: int) -> np.ndarray:
        return self.quantile(rng.random(n))

    def support_range(self, eps: float = 1e-15) -> tuple[float, float]:
        """An interval carrying all but ``2*eps`` of the mass."""
        return float(self.quantile(eps)), float(self.quantile(1.0 - eps))

    def to_spec(self) -> dict:
        return {"family": self.family, **self.params}

    def _quantile(self, u: np.ndarray) -> np.ndarray:
        return np.array([_bisect_quantile(self, float(v)) for v in u])


def _bracket(F: DistributionFunction, u: float) -> tuple[float, float]:
    lo, hi = -1.0, 1.0
    while F.cdf(lo) >= u and lo > -1e300:
        lo *= 2.0
    while F.cdf(hi) < u and hi < 1e300:
        hi *= 2.0
    return lo, hi


def _bisect_quantile(F: DistributionFunction, u: float) -> float:
    if u <= 0.0:
        return -math.inf
    if u > 1.0:
        return math.inf
    lo, hi = _bracket(F, u)
    # invariant: F(lo) < u <= F(hi)
    for _ in range(2000):
        mid = 0.5 * (lo + hi)
        if mid == lo or mid == hi:
            break
        if F.cdf(mid) >= u:
            hi = mid
        else:
            lo = mid
    for c in F.discontinuities:
        if lo <= c <= hi:
            return c
    return hi


def _bisect_upper(F: DistributionFunction, u: float, start: float) -> float:
    """``sup{x : F(x-) <= u}`` searched to the right of ``start``."""
    if F.cdf(start) > u:
        return start
    lo, hi = start, max(abs(start), 1.0) * 2 + 1
    while F.cdf_left(hi) <= u and hi < 1e300:
        hi = hi * 2 + 1
    for _ in range(2000):
        mid = 0.5 * (lo + hi)
        if mid == lo or mid == hi:
            break
        if F.cdf_left(mid) <= u:
            lo = mid
        else:
            hi = mid
    for c in F.discontinuities:
        if lo <= c <= hi:
            return c
    return lo


@dataclass(frozen=True, eq=False)
class Discrete(DistributionFunction):
    """Finitely many atoms; ``support`` strictly ascending, ``masses`` positive."""

    support: np.ndarray
    masses: np.ndarray
    family: Optional[str] = "discrete"
    params: dict = field(default_factory=dict)
    tail_mass: float = 0.0
    truncated: bool = False

    def __post_init__(self):
        s = np.asarray(self.support, dtype=float)
        m = np.asarray(self.masses, dtype=float)
        if s.ndim != 1 or s.shape != m.shape or s.size == 0:
            raise DistributionSpecError("support and masses must be equal-length non-empty 1-d sequences")
        if not np.all(np.isfinite(s)):
            raise DistributionSpecError("support points must be finite")
        if np.any(np.diff(s) <= 0):
            raise DistributionSpecError("support must be strictly ascending")
        if np.any(m <= 0):
            raise DistributionSpecError("masses must be positive")
        total = math.fsum(m)
        if abs(total + self.tail_mass - 1.0) > MASS_TOL:
            raise DistributionSpecError(f"masses sum to {total!r}, not 1 (tolerance {MASS_TOL})")
        s.setflags(write=False)
        m.setflags(write=False)
        cum = np.cumsum(m)
        cum.setflags(write=False)
        object.__setattr__(self, "support", s)
        object.__setattr__(self, "masses", m)
        object.__setattr__(self, "_cum", cum)

    def __repr__(self) -> str:
        if self.family != "discrete":
            args = ", ".join(f"{k}={v}" for k, v in self.params.items())
            return f"{self.family}({args})"
        return f"Discrete(support={self.support.tolist()}, masses={self.masses.tolist()})"

    def _cdf(self, x):
        idx = np.searchsorted(self.support, x, side="right") - 1
        out = np.where(idx >= 0, self._cum[np.clip(idx, 0, None)], 0.0)
        # the last atom carries the rounding residue so that F(max) is exactly the total
        return np.where(idx == self.support.size - 1, 1.0 - self.tail_mass, out)

    def _cdf_left(self, x):
        idx = np.searchsorted(self.support, x, side="left") - 1
        out = np.where(idx >= 0, self._cum[np.clip(idx, 0, None)], 0.0)
        return np.where(idx == self.support.size - 1, 1.0 - self.tail_mass, out)

    def jump(self, x) -> float:
        i = int(np.searchsorted(self.support, x))
        if i < self.support.size and self.support[i] == x:
            return float(self.masses[i])
        return 0.0

    @property
    def discontinuities(self) -> tuple:
        return tuple(self.support.tolist())

    @property
    def is_discrete(self) -> bool:
        return True

    @property
    def truncation_error(self) -> float:
        return self.tail_mass

    def support_and_mass(self) -> list[tuple[float, float]]:
        return list(zip(self.support.tolist(), self.masses.tolist()))

    def _quantile(self, u):
        u = np.asarray(u, dtype=float)
        idx = np.searchsorted(self._cum, u, side="left")
        idx = np.clip(idx, 0, self.support.size - 1)
        out = self.support[idx]
        out = np.where(u <= 0, -np.inf, out)
        return np.where(u > 1, np.inf, out)

    def median_interval(self) -> tuple[float, float]:
        lo = self.median()
        i = int(np.searchsorted(self.support, lo))
        # if F(lo) == 1/2 exactly, every point up to the next atom is a median
        if self._cum[i] == 0.5 and i + 1 < self.support.size:
            return lo, float(self.support[i + 1])
        return lo, lo

    def _sample(self, rng, n):
        return self.support[np.clip(np.searchsorted(self._cum, rng.random(n), side="right"), 0, self.support.size - 1)]

    def support_range(self, eps: float = 0.0) -> tuple[float, float]:
        return float(self.support[0]), float(self.support[-1])

    def to_spec(self) -> dict:
        if self.family == "discrete":
            spec = {"family": "discrete", "points": self.support.tolist(), "masses": self.masses.tolist()}
            if self.truncated:
                spec["truncated"] = True
            return spec
        return {"family": self.family, **self.params}


@dataclass(frozen=True, eq=False)
class Continuous(DistributionFunction):
    """Continuous CDF supplied as a callable; left limits equal the CDF."""

    cdf_fn: Callable
    density: Optional[Callable] = None
    quantile_fn: Optional[Callable] = None
    sampler: Optional[Callable] = None
    family: Optional[str] = "continuous"
    params: dict = field(default_factory=dict)
    lower: float = -math.inf
    upper: float = math.inf

    def __repr__(self) -> str:
        return f"{self.family}()"

    def _cdf(self, x):
        return _apply(self.cdf_fn, x)

    def _cdf_left(self, x):
        return _apply(self.cdf_fn, x)

    def _quantile(self, u):
        if self.quantile_fn is None:
            return super()._quantile(u)
        return _apply(self.quantile_fn, u)

    def _sample(self, rng, n):
        if self.sampler is not None:
            return np.asarray(self.sampler(rng, n), dtype=float)
        return self.quantile(rng.random(n))


def _apply(fn: Callable, x: np.ndarray) -> np.ndarray:
    try:
        out = np.asarray(fn(x), dtype=float)
        if out.shape == x.shape:
            return out
        if out.ndim == 0:
            return np.full(x.shape, float(out))
    except (TypeError, ValueError):
        pass
    return np.array([float(fn(v)) for v in x.ravel()]).reshape(x.shape)


@dataclass(frozen=True, eq=False)
class Mixed(DistributionFunction):
    """``w * discrete + (1 - w) * continuous`` with ``0 < w < 1``."""

    w: float
    discrete_part: Discrete
    continuous_part: Continuous
    family: Optional[str] = "mixed"
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if not 0.0 < self.w < 1.0:
            raise DistributionSpecError("mixing weight w must lie in (0, 1)")
        if not self.discrete_part.is_discrete:
            raise DistributionSpecError("first component of a mixture must be discrete")

    def __repr__(self) -> str:
        return f"Mixed(w={self.w}, {self.discrete_part!r}, {self.continuous_part!r})"

    def _cdf(self, x):
        return self.w * self.discrete_part._cdf(x) + (1 - self.w) * self.continuous_part._cdf(x)

    def _cdf_left(self, x):
        return self.w * self.discrete_part._cdf_left(x) + (1 - self.w) * self.continuous_part._cdf_left(x)

    def jump(self, x) -> float:
        return self.w * self.discrete_part.jump(x)

    @property
    def discontinuities(self) -> tuple:
        return self.discrete_part.discontinuities

    @property
    def truncation_error(self) -> float:
        return self.w * self.discrete_part.truncation_error

    def _sample(self, rng, n):
        pick = rng.random(n) < self.w
        d = self.discrete_part._sample(rng, n)
        c = self.continuous_part._sample(rng, n)
        return np.where(pick, d, c)

    def support_range(self, eps: float = 1e-15) -> tuple[float, float]:
        dlo, dhi = self.discrete_part.support_range()
        clo, chi = self.continuous_part.support_range(eps)
        return min(dlo, clo), max(dhi, chi)

    def to_spec(self) -> dict:
        return {
            "family": "mixed",
            "w": self.w,
            "discrete": self.discrete_part.to_spec(),
            "continuous": self.continuous_part.to_spec(),
        }


# ---------------------------------------------------------------------------
# standard families


def bernoulli(p: float) -> Discrete:
    """F = 0 below 0, p on [0, 1), 1 from 1 on: mass p at 0 and 1 - p at 1."""
    if not 0.0 < p < 1.0:
        raise DistributionSpecError("Bernoulli parameter must satisfy 0 < p < 1")
    return Discrete(np.array([0.0, 1.0]), np.array([p, 1.0 - p]), family="bernoulli", params={"p": p})


def _binomial_masses(n: int, p: float) -> np.ndarray:
    k = np.arange(n + 1)
    logpmf = (
        special.gammaln(n + 1) - special.gammaln(k + 1) - special.gammaln(n - k + 1)
        + k * math.log(p) + (n - k) * math.log1p(-p)
    )
    return np.exp(logpmf)


def binomial(n: int, p: float) -> Discrete:
    if int(n) != n or n < 1:
        raise DistributionSpecError("Binomial n must be a positive integer")
    if not 0.0 < p < 1.0:
        raise DistributionSpecError("Binomial p must satisfy 0 < p < 1")
    n = int(n)
    if n <= 60:
        m = np.array([math.comb(n, k) * p**k * (1 - p) ** (n - k) for k in range(n + 1)])
    else:
        m = _binomial_masses(n, p)
    keep = m > 0
    m = m[keep]
    m = m / math.fsum(m) if abs(math.fsum(m) - 1) > MASS_TOL else m
    return Discrete(np.arange(n + 1, dtype=float)[keep], m, family="binomial", params={"n": n, "p": p})


def poisson(lam: float, tail: float = POISSON_TAIL) -> Discrete:
    """Poisson truncated at the first K with P(X > K) < ``tail``; not renormalised."""
    if not lam > 0:
        raise DistributionSpecError("Poisson rate must be positive")
    if not 0 < tail <= 1e-12:
        raise DistributionSpecError("truncation tail must lie in (0, 1e-12]")
    K = int(lam)
    while special.pdtrc(K, lam) >= tail:
        K += 1
    k = np.arange(K + 1)
    logpmf = k * math.log(lam) - lam - special.gammaln(k + 1)
    m = np.exp(logpmf)
    keep = m > 0
    deficit = float(special.pdtrc(K, lam))
    return Discrete(
        k[keep].astype(float), m[keep], family="poisson", params={"lambda": lam},
        tail_mass=deficit, truncated=True,
    )


def normal01() -> Continuous:
    return Continuous(
        cdf_fn=special.ndtr,
        density=lambda x: np.exp(-0.5 * np.square(x)) / math.sqrt(2 * math.pi),
        quantile_fn=special.ndtri,
        sampler=lambda rng, n: rng.standard_normal(n),
        family="normal01",
    )


def _exp_cdf(x):
    x = np.asarray(x, dtype=float)
    return np.where(x > 0, -np.expm1(-np.maximum(x, 0.0)), 0.0)


def _exp_density(x):
    x = np.asarray(x, dtype=float)
    return np.where(x >= 0, np.exp(-np.maximum(x, 0.0)), 0.0)


def _exp_quantile(u):
    u = np.asarray(u, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        q = -np.log1p(-u)
    q = np.where(u <= 0, -np.inf, q)
    return np.where(u > 1, np.inf, q)


def exponential1() -> Continuous:
    return Continuous(
        cdf_fn=_exp_cdf,
        density=_exp_density,
        quantile_fn=_exp_quantile,
        sampler=lambda rng, n: rng.standard_exponential(n),
        family="exponential1",
        lower=0.0,
    )


def point_mass(c: float) -> Discrete:
    return Discrete(np.array([float(c)]), np.array([1.0]))


def discrete(points: Sequence[float], masses: Sequence[float], truncated: bool = False) -> Discrete:
    """User table of atoms; unsorted input is sorted and repeated points merged."""
    pts = np.asarray(points, dtype=float)
    ms = np.asarray(masses, dtype=float)
    if pts.shape != ms.shape:
        raise DistributionSpecError("points and masses must have the same length")
    uniq, inv = np.unique(pts, return_inverse=True)
    merged = np.zeros(uniq.size)
    np.add.at(merged, inv, ms)
    tail = 0.0
    if truncated:
        tail = max(0.0, 1.0 - math.fsum(merged))
    return Discrete(uniq, merged, tail_mass=tail, truncated=truncated)


def mixed(w: float, discrete_part: Discrete, continuous_part: Continuous) -> Mixed:
    return Mixed(w, discrete_part, continuous_part)


def empirical_cdf(sample: Sequence[float]) -> Discrete:
    """Equal masses 1/N on the sample values (ties accumulate)."""
    x = np.asarray(sample, dtype=float).ravel()
    if x.size == 0:
        raise ValueError("empirical CDF of an empty sample")
    uniq, counts = np.unique(x, return_counts=True)
    return Discrete(uniq, counts / x.size, family="empirical", params={"n": int(x.size)})


def kolmogorov_distance(sample: Sequence[float], F: DistributionFunction) -> float:
    """``sup_x |F_N(x) - F(x)|`` evaluated exactly at every jump of either function."""
    emp = empirical_cdf(sample)
    pts = np.union1d(emp.support, np.asarray(F.discontinuities, dtype=float))
    right = np.abs(emp.cdf(pts) - F.cdf(pts))
    left = np.abs(emp.cdf_left(pts) - F.cdf_left(pts))
    return float(max(right.max(), left.max()))


# ---------------------------------------------------------------------------
# JSON specs


def _require(spec: dict, key: str, where: str):
    if key not in spec:
        raise DistributionSpecError(f"{where}: missing field {key!r}")
    return spec[key]


def from_spec(spec: dict, where: str = "dist") -> DistributionFunction:
    """Build a law from its JSON description (see README for the schema)."""
    if not isinstance(spec, dict):
        raise DistributionSpecError(f"{where}: distribution spec must be a JSON object")
    fam = str(_require(spec, "family", where)).lower()
    try:
        if fam == "bernoulli":
            return bernoulli(float(_require(spec, "p", where)))
        if fam == "binomial":
            return binomial(int(_require(spec, "n", where)), float(_require(spec, "p", where)))
        if fam == "poisson":
            return poisson(float(_require(spec, "lambda", where)))
        if fam == "normal01":
            return normal01()
        if fam == "exponential1":
            return exponential1()
        if fam in ("discrete", "point_mass"):
            if fam == "point_mass":
                return point_mass(float(_require(spec, "c", where)))
            return discrete(
                _require(spec, "points", where), _require(spec, "masses", where),
                truncated=bool(spec.get("truncated", False)),
            )
        if fam == "mixed":
            d = from_spec(_require(spec, "discrete", where), f"{where}.discrete")
            c = from_spec(_require(spec, "continuous", where), f"{where}.continuous")
            if not isinstance(d, Discrete):
                raise DistributionSpecError(f"{where}.discrete: must be a discrete family")
            if not isinstance(c, Continuous):
                raise DistributionSpecError(f"{where}.continuous: must be a continuous family")
            return mixed(float(_require(spec, "w", where)), d, c)
    except DistributionSpecError as exc:
        if str(exc).startswith(where):
            raise
        raise DistributionSpecError(f"{where}: {exc}") from None
    except (TypeError, ValueError) as exc:
        raise DistributionSpecError(f"{where}: {exc}") from None
    raise DistributionSpecError(f"{where}: unknown family {fam!r}")
