"""Acceptance criteria, one test each.

Every test prints a single ``ACCEPTANCE <k> PASS|FAIL`` line (visible with
``pytest -v -s`` or in the captured output of a failure) and then asserts.
Run just this file with ``pytest tests/test_acceptance.py -v -s``.
"""

import math
import time
from fractions import Fraction

import mpmath
import numpy as np
import pytest
from numpy.polynomial import Polynomial

from probmeasure import distributions as D
from probmeasure import inequalities as ineq
from probmeasure.cli import dct_counterexample_sequence, mct_counterexample_sequence
from probmeasure.expectation import expect, expect_closed_form
from probmeasure.intervals import IntervalUnion, complement, intersect, length_under, normalize, union
from probmeasure.lebesgue import (
    FiniteMeasureSpace,
    LengthSpace,
    SimpleFunction,
    approximate_by_simple,
    dct_check,
    integrate_function,
    integrate_simple,
    mct_check,
    sup_simple_integral,
)
from probmeasure.stieltjes import (
    MonotoneFunction,
    euler_summation,
    finite_sum_as_integral,
    integrate,
    integration_by_parts_residual,
    step_function,
)


@pytest.fixture
def report(capsys):
    def emit(k: int, ok: bool, detail: str, elapsed: float):
        with capsys.disabled():
            print(f"\nACCEPTANCE {k:>2} {'PASS' if ok else 'FAIL'} ({elapsed:.2f} s): {detail}")
        assert ok, detail

    return emit


# 1 -------------------------------------------------------------------------


def test_criterion_01_closed_form_expectations(report):
    t0 = time.perf_counter()
    cases = [
        (D.bernoulli(0.3), 0.7, 1e-9),
        (D.binomial(10, 0.3), 3.0, 1e-9),
        (D.poisson(2.5), 2.5, 1e-6),
        (D.normal01(), 0.0, 1e-4),
        (D.exponential1(), 1.0, 1e-4),
    ]
    worst, ok = [], True
    for law, truth, tol in cases:
        got = expect(law).value
        closed = expect_closed_form(law).value
        err = max(abs(got - closed), abs(got - truth))
        ok &= closed == truth and err <= tol
        worst.append(f"{law.family}:{err:.1e}")
    elapsed = time.perf_counter() - t0
    report(1, ok and elapsed < 5, ", ".join(worst), elapsed)


# 2 -------------------------------------------------------------------------


def test_criterion_02_jump_theorem(report):
    t0 = time.perf_counter()
    rng = np.random.default_rng(2)
    # 0 on [0, 1/2), 1 on [1/2, 1]
    step = step_function(0.5, 0.0, 1.0)
    # same step, but not marked as pure jump, so the refinement loop runs
    step_general = step + MonotoneFunction(lambda x: np.zeros_like(np.asarray(x, dtype=float)))
    worst = 0.0
    for _ in range(50):
        c = rng.uniform(-3, 3, 5)

        def f(x, c=c):
            x = np.asarray(x, dtype=float)
            return c[0] * np.sin(c[1] * x) + c[2] * np.cos(c[3] * x) + c[4] * x**2

        truth = float(f(0.5))
        for F in (step, step_general):
            r = integrate(f, F, 0.0, 1.0)
            worst = max(worst, abs(r.value - truth))
    elapsed = time.perf_counter() - t0
    report(2, worst <= 1e-9 and elapsed < 5, f"max |∫f dF - f(1/2)| = {worst:.2e}", elapsed)


# 3 -------------------------------------------------------------------------


def _smooth_monotone(kind: int, k: float):
    if kind == 0:
        return lambda x: (np.exp(k * np.asarray(x)) - 1.0) / math.expm1(k)
    if kind == 1:
        return lambda x: np.asarray(x) + k * np.asarray(x) ** 3
    return lambda x: np.arctan(k * np.asarray(x))


def test_criterion_03_integration_by_parts(report):
    t0 = time.perf_counter()
    rng = np.random.default_rng(3)
    worst = 0.0
    for i in range(100):
        deg = int(rng.integers(0, 5))
        f = Polynomial(rng.uniform(-2, 2, deg + 1))
        F = MonotoneFunction(_smooth_monotone(i % 3, float(rng.uniform(0.2, 3.0))))
        worst = max(worst, integration_by_parts_residual(f, F, 0.0, 1.0))
    elapsed = time.perf_counter() - t0
    report(3, worst < 1e-6 and elapsed < 30, f"max residual {worst:.2e} over 100 pairs", elapsed)


# 4 -------------------------------------------------------------------------


def test_criterion_04_euler_and_finite_sums(report):
    t0 = time.perf_counter()
    rng = np.random.default_rng(4)
    worst = 0.0
    for _ in range(40):
        f = Polynomial(rng.integers(-5, 6, int(rng.integers(1, 5))).astype(float))
        direct = math.fsum(f(n) for n in range(1, 21))
        got = euler_summation(f, f.deriv(), 0.0, 20.0)
        worst = max(worst, abs(got - direct))
    exact = 0
    for _ in range(1000):
        a = rng.normal(size=int(rng.integers(1, 40)))
        exact += finite_sum_as_integral(a) == math.fsum(a)
    elapsed = time.perf_counter() - t0
    ok = worst <= 1e-9 and exact == 1000 and elapsed < 10
    report(4, ok, f"euler max error {worst:.2e}; finite sums exact {exact}/1000", elapsed)


# 5 -------------------------------------------------------------------------


def test_criterion_05_inequality_suite(report):
    t0 = time.perf_counter()
    grid = ineq.default_grid(seed=42)
    reps = ineq.run_suite(grid)
    elapsed = time.perf_counter() - t0
    ids = {r.inequality_id for r in reps}
    failures = [r for r in reps if not r.passed]
    exact = [r for r in reps if r.mode == "exact"]
    exact_ok = all(r.statistical_slack == 0.0 and r.passed for r in exact)
    ok = len(reps) >= 200 and ids == set(ineq.INEQUALITY_IDS) and not failures and exact_ok and elapsed < 60
    # reruns with the same seed are identical
    ok &= ineq.reports_to_csv(ineq.run_suite(ineq.default_grid(seed=42))) == ineq.reports_to_csv(reps)
    detail = (f"{len(reps)} cases, {len(ids)}/{len(ineq.INEQUALITY_IDS)} ids, "
              f"{len(exact)} exact, {len(failures)} violations")
    report(5, ok, detail, elapsed)


# 6 -------------------------------------------------------------------------


def test_criterion_06_hoeffding_lemma(report):
    t0 = time.perf_counter()
    rng = np.random.default_rng(6)
    s_grid = (0.05, 0.25, 0.5, 1.0, 2.0, 4.0)
    checks = fails = 0
    worst = -math.inf
    for _ in range(1000):
        k = int(rng.integers(2, 7))
        pts = np.sort(rng.uniform(-2, 2, k))
        masses = rng.dirichlet(np.ones(k))
        pts = pts - math.fsum(pts * masses)
        pts = np.unique(pts)
        if pts.size != k:
            continue
        law = D.discrete(pts.tolist(), masses.tolist())
        a, b = float(pts[0]) - rng.uniform(0, 0.5), float(pts[-1]) + rng.uniform(0, 0.5)
        for s in s_grid:
            r = ineq.hoeffding_lemma_check(law, s, a, b)
            # independent oracle: plain enumeration
            lhs = float(np.sum(masses * np.exp(s * pts)))
            rhs = math.exp(s * s * (b - a) ** 2 / 8)
            checks += 1
            fails += (not r.passed) or lhs > rhs + 1e-12
            worst = max(worst, r.reference_probability / r.analytic_bound)
    elapsed = time.perf_counter() - t0
    ok = checks >= 5000 and fails == 0 and elapsed < 10
    report(6, ok, f"{checks} checks, {fails} failures, max ratio {worst:.4f}", elapsed)


# 7 -------------------------------------------------------------------------


def test_criterion_07_g_second_derivative(report):
    t0 = time.perf_counter()
    u = np.round(np.arange(-500, 501) * 0.01, 12)
    thetas = [round(0.1 * k, 10) for k in range(1, 10)]
    reps = [ineq.g_function_check(th, u) for th in thetas]
    best = max(reps, key=lambda r: r.reference_probability)
    at_half = reps[4]
    ok = (
        all(r.passed and r.reference_probability <= 0.25 + 1e-10 for r in reps)
        and best is at_half
        and at_half.metadata["argmax_u"] == 0.0
        and abs(at_half.reference_probability - 0.25) <= 1e-12
    )
    elapsed = time.perf_counter() - t0
    detail = f"max g'' = {best.reference_probability!r} at theta={best.metadata['theta']}, u={best.metadata['argmax_u']}"
    report(7, ok, detail, elapsed)


# 8 -------------------------------------------------------------------------


_GRID = np.arange(-44, 45) / 2.0  # endpoints, midpoints, and points outside the range


def _random_pairs(rng):
    k = int(rng.integers(0, 5))
    ends = rng.integers(-20, 21, size=(k, 2))
    ends = ends[ends[:, 0] != ends[:, 1]]
    return np.sort(ends, axis=1).astype(float)


def _oracle(pairs):
    if pairs.size == 0:
        return np.zeros(_GRID.size, dtype=bool)
    return np.any((pairs[:, :1] < _GRID) & (_GRID <= pairs[:, 1:]), axis=0)


def _measure_oracle(mask_half):
    # length of a union of integer-endpoint intervals: count covered half-unit cells (x-1/2, x]
    return 0.5 * int(np.count_nonzero(mask_half))


def test_criterion_08_interval_algebra(report):
    t0 = time.perf_counter()
    rng = np.random.default_rng(8)
    n_cases, failures = 100_000, 0
    for _ in range(n_cases):
        pa, pb = _random_pairs(rng), _random_pairs(rng)
        A, B = normalize(pa), normalize(pb)
        U, I, C = union(A, B), intersect(A, B), complement(A)
        ma, mb = _oracle(pa), _oracle(pb)
        good = (
            normalize(list(A)) == A
            and np.array_equal(U.contains(_GRID), ma | mb)
            and np.array_equal(I.contains(_GRID), ma & mb)
            and np.array_equal(C.contains(_GRID), ~ma)
            and length_under(None, U) + length_under(None, I) == length_under(None, A) + length_under(None, B)
            and length_under(None, I) <= length_under(None, A) <= length_under(None, U)
            and length_under(None, A) == _measure_oracle(ma)
        )
        failures += not good
    elapsed = time.perf_counter() - t0
    report(8, failures == 0 and elapsed < 30, f"{n_cases} cases, {failures} failures", elapsed)


# 9 -------------------------------------------------------------------------


def test_criterion_09_simple_function_integrals(report):
    t0 = time.perf_counter()
    rng = np.random.default_rng(9)
    mismatches = 0
    for _ in range(10_000):
        n_atoms = int(rng.integers(1, 12))
        atoms = list(range(n_atoms))
        # dyadic weights and integer values keep every sum exact in floating point
        weights = rng.integers(0, 17, n_atoms) / 8.0
        space = FiniteMeasureSpace(tuple(atoms), weights)
        labels = rng.integers(0, 4, n_atoms)  # 0 means "in no piece"
        values = rng.integers(-10, 11, 4).astype(float)
        pieces = [(values[j], {a for a in atoms if labels[a] == j}) for j in range(1, 4)]
        s = SimpleFunction([(v, A) for v, A in pieces if A])
        B = {a for a in atoms if rng.random() < 0.6}
        got = integrate_simple(s, space, B)
        brute = sum(
            (Fraction(float(values[labels[a]])) * Fraction(float(weights[a])) for a in B if labels[a]),
            Fraction(0),
        )
        mismatches += got != brute
    sup_fail = 0
    for _ in range(100):
        n_atoms = int(rng.integers(1, 4))
        depth = int(rng.integers(3, 7))
        d0 = int(rng.integers(0, depth + 1))
        vals = rng.integers(0, 2 * 2**d0 + 1, n_atoms) / 2.0**d0
        w = rng.integers(1, 9, n_atoms) / 4.0
        space = FiniteMeasureSpace(tuple(range(n_atoms)), w)
        f = lambda a, vals=vals: float(vals[a])
        exact = float(sum(Fraction(float(v)) * Fraction(float(x)) for v, x in zip(vals, w)))
        sup = sup_simple_integral(f, space, depth)
        dyadic = integrate_simple(approximate_by_simple(f, space, depth), space)
        sup_fail += not (sup == exact == dyadic == integrate_function(f, space))
    elapsed = time.perf_counter() - t0
    ok = mismatches == 0 and sup_fail == 0
    report(9, ok, f"10000 cases, {mismatches} mismatches; sup form {100 - sup_fail}/100", elapsed)


# 10 ------------------------------------------------------------------------


def test_criterion_10_convergence_counterexamples(report):
    t0 = time.perf_counter()
    unit = LengthSpace(None, normalize([(0.0, 1.0)]))
    dct = dct_check(dct_counterexample_sequence(), unit)
    mct = mct_check(mct_counterexample_sequence(), unit)
    ok = (
        abs(dct.integral_n[-1] - 2.0) <= 1e-6
        and dct.limit_integral == 1.0
        and abs(dct.final_gap - 1.0) <= 1e-6
        and not dct.hypotheses_ok
        and all(v == 1.0 for v in mct.integral_n)
        and mct.limit_integral == 0.0
        and not mct.hypotheses_ok
    )
    elapsed = time.perf_counter() - t0
    detail = (f"staircase: lim ∫f_n ≈ {dct.integral_n[-1]:.8f} vs ∫f = {dct.limit_integral}, gap {dct.final_gap:.8f}; "
              f"n·1(0,1/n]: ∫f_n = 1 (all {len(mct.n)}), ∫f = {mct.limit_integral}")
    report(10, ok, detail, elapsed)


# 11 ------------------------------------------------------------------------


def test_criterion_11_slln(report):
    t0 = time.perf_counter()
    r = ineq.slln_demo(0.5, [10, 100, 1000, 10_000], seed=20240607)
    dev = abs(r.means[-1] - 0.5)
    env = float(ineq.hoeffding_envelope(10_000, 1e-6))
    ok = dev < 0.0269 and 0.0269 < env < 0.0270
    elapsed = time.perf_counter() - t0
    report(11, ok, f"|mean - 0.5| = {dev:.5f} < 0.0269 (envelope {env:.5f})", elapsed)


# 12 ------------------------------------------------------------------------


def _normal_tail_oracle(eps: float) -> float:
    mpmath.mp.dps = 30
    dens = lambda t: mpmath.exp(-t * t / 2) / mpmath.sqrt(2 * mpmath.pi)
    return float(mpmath.quad(dens, [eps, mpmath.inf]))


def test_criterion_12_normal_tail(report):
    t0 = time.perf_counter()
    ok, parts = True, []
    for eps in (1.0, 1.5, 2.0, 3.0):
        oracle = _normal_tail_oracle(eps)
        bound = ineq.normal_tail_bound(eps)
        r = ineq.normal_tail(eps)
        ok &= r.passed and oracle <= bound and abs(r.reference_probability - oracle) <= 1e-15
        parts.append(f"ε={eps:g}: {oracle:.5g} ≤ {bound:.5g}")
    ok &= f"{_normal_tail_oracle(2.0):.4g}" == "0.02275" and f"{ineq.normal_tail_bound(2.0):.4g}" == "0.027"
    ok &= round(ineq.normal_tail_bound(2.0), 5) == 0.02700
    elapsed = time.perf_counter() - t0
    report(12, ok, "; ".join(parts), elapsed)


if __name__ == "__main__":
    import sys

    sys.exit(pytest.main([__file__, "-v", "-s"]))
