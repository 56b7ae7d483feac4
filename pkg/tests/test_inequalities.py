import csv
import io
import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from probmeasure import distributions as D
from probmeasure import inequalities as I

RADEMACHER = D.discrete([-1.0, 1.0], [0.5, 0.5])


def test_markov_exponential():
    r = I.markov(D.exponential1(), 2.0)
    assert r.analytic_bound == pytest.approx(0.5, abs=1e-9)
    assert r.reference_probability == pytest.approx(math.exp(-2), rel=1e-14)
    assert r.passed and not r.vacuous and r.mode == "exact" and r.statistical_slack == 0.0


def test_markov_needs_nonnegative_law_or_abs_form():
    with pytest.raises(I.HypothesisError):
        I.markov(D.normal01(), 1.0)
    r = I.markov(D.normal01(), 1.0, absolute=True)
    assert r.reference_probability == pytest.approx(2 * D.normal01().cdf(-1.0), rel=1e-14)
    assert r.analytic_bound == pytest.approx(math.sqrt(2 / math.pi), rel=1e-8)
    with pytest.raises(I.HypothesisError):
        I.markov(D.exponential1(), 0.0)


def test_generalized_markov_continuous_level_sets():
    # P(X² > 1) for a standard normal, bound E X² / 1
    r = I.generalized_markov(np.square, D.normal01(), 1.0, name="square")
    assert r.reference_probability == pytest.approx(2 * D.normal01().cdf(-1.0), rel=1e-10)
    assert r.analytic_bound == pytest.approx(1.0, abs=1e-8)
    with pytest.raises(I.HypothesisError):
        I.generalized_markov(np.sin, D.normal01(), 0.5)


def test_chebyshev_can_be_vacuous():
    r = I.chebyshev(D.bernoulli(0.5), 0.4)
    assert r.analytic_bound == pytest.approx(1.5625)
    assert r.reference_probability == 1.0
    assert r.vacuous and r.passed


def test_convexity_check():
    assert I.convexity_check(np.square, -3, 3)
    res = I.convexity_check(np.sin, 0, 3)
    assert not res and res.certificate is not None


def test_jensen():
    r = I.jensen(np.square, D.normal01(), name="square")
    assert r.passed and r.analytic_bound == pytest.approx(1.0, abs=1e-8)
    with pytest.raises(I.HypothesisError):
        I.jensen(np.sin, D.normal01(), name="sin")


def test_hoeffding_bounds_closed_form():
    assert I.hoeffding_bound("v2", 100, 0.1, (0, 1), form="mean_two_sided") == pytest.approx(2 * math.exp(-2))
    assert I.hoeffding_bound("v1", 4, 0.5, (0, 1)) == pytest.approx(math.exp(-16 * 0.25 / 8))
    assert I.hoeffding_bound("v2", 2, 0.5, [(0, 1), (0, 3)]) == pytest.approx(math.exp(-2 * 4 * 0.25 / 10))
    with pytest.raises(ValueError):
        I.hoeffding_bound("v3", 2, 0.5, (0, 1))
    with pytest.raises(ValueError):
        I.hoeffding_bound("v1", 3, 0.5, [(0, 1), (0, 1)])


def test_hoeffding_exact_binomial_tail():
    r = I.hoeffding_verify("v2", [D.bernoulli(0.5)] * 10, 0.1)
    # P(S - 5 > 1) = P(S >= 7)
    assert r.reference_probability == pytest.approx(sum(math.comb(10, k) for k in range(7, 11)) / 1024, rel=1e-14)
    assert r.analytic_bound == pytest.approx(math.exp(-0.2))
    assert r.mode == "exact" and r.passed
    mean_form = I.hoeffding_verify("v1", [D.bernoulli(0.5)] * 12, 0.2, form="mean_two_sided")
    assert "printed_statement" in mean_form.metadata


def test_hoeffding_monte_carlo_is_seeded_and_reports_slack():
    laws = [D.bernoulli(0.5)] * 30
    a = I.hoeffding_verify("v2", laws, 0.15, trials=10_000, seed=7)
    b = I.hoeffding_verify("v2", laws, 0.15, trials=10_000, seed=7)
    assert a.mode == "monte_carlo" and a.to_json() == b.to_json()
    p = a.reference_probability
    assert a.statistical_slack == pytest.approx(3 * math.sqrt(p * (1 - p) / 10_000))
    with pytest.raises(ValueError):
        I.hoeffding_verify("v2", laws, 0.15, trials=10_000)
    with pytest.raises(ValueError):
        I.hoeffding_verify("v2", laws, 0.15, trials=100, seed=1)


def test_hoeffding_rejects_unbounded_or_out_of_range():
    with pytest.raises(I.HypothesisError):
        I.hoeffding_verify("v2", [D.normal01()], 0.1)
    with pytest.raises(I.HypothesisError):
        I.hoeffding_verify("v2", [D.bernoulli(0.5)], 0.1, ranges=[(0.2, 1.0)])


def test_hoeffding_lemma_rademacher():
    r = I.hoeffding_lemma_check(RADEMACHER, 1.0)
    assert r.reference_probability == pytest.approx(math.cosh(1.0), rel=1e-15)
    assert r.analytic_bound == pytest.approx(math.exp(0.5), rel=1e-15)
    with pytest.raises(I.HypothesisError):
        I.hoeffding_lemma_check(D.bernoulli(0.5), 1.0)


def test_g_function_derivative_matches_finite_differences():
    u = np.linspace(-4, 4, 81)
    h = 1e-4
    for theta in (0.2, 0.5, 0.8):
        fd = (I.g_function(u + h, theta) - 2 * I.g_function(u, theta) + I.g_function(u - h, theta)) / h**2
        assert np.allclose(I.g_second_derivative(u, theta), fd, atol=1e-6)
    r = I.g_function_check(0.5)
    assert r.reference_probability == 0.25 and r.metadata["g0"] == 0.0
    assert "e^4" in r.metadata["printed_statement"]


def test_cauchy_schwarz_corrected_direction():
    r = I.cauchy_schwarz_check(D.exponential1())
    # (E X)² = 1 <= E X² = 2
    assert r.reference_probability == pytest.approx(1.0, abs=1e-8)
    assert r.analytic_bound == pytest.approx(2.0, abs=1e-8)
    assert r.passed and r.metadata["printed_direction_reversed"]
    eq = I.cauchy_schwarz_check({"outcomes": [[1, 1], [-1, 1]], "masses": [0.5, 0.5]})
    assert eq.passed and eq.margin >= 0


def test_holder_and_minkowski_examples():
    bern = D.bernoulli(0.5)
    h = I.holder_check({"independent": [bern, bern]}, 2.0)
    assert h.reference_probability == pytest.approx(0.25) and h.analytic_bound == pytest.approx(0.5)
    m = I.minkowski_check(I.JointLaw.independent(RADEMACHER, RADEMACHER), 2.0)
    assert m.reference_probability == pytest.approx(math.sqrt(2)) and m.analytic_bound == pytest.approx(2.0)
    with pytest.raises(I.HypothesisError):
        I.holder_check({"independent": [bern, bern]}, 2.0, 3.0)
    with pytest.raises(I.HypothesisError):
        I.minkowski_check({"independent": [bern, bern]}, 0.5)


def test_normal_tail_examples():
    r = I.normal_tail(2.0)
    assert f"{r.reference_probability:.4g}" == "0.02275"
    assert round(r.analytic_bound, 5) == 0.02700
    two = I.normal_tail(2.0, "two_sided")
    assert two.reference_probability == pytest.approx(2 * r.reference_probability)
    mean = I.normal_tail(0.5, "mean_n", 4)
    assert mean.reference_probability == pytest.approx(2 * D.normal01().cdf(-1.0), rel=1e-14)
    with pytest.raises(I.HypothesisError):
        I.normal_tail(0.0)


def test_slln_demo_is_reproducible():
    a = I.slln_demo(0.5, [10, 100, 1000, 10_000], seed=3)
    b = I.slln_demo(0.5, [10, 100, 1000, 10_000], seed=3)
    assert a.to_json() == b.to_json()
    assert a.inside
    assert a.envelope[-1] == pytest.approx(math.sqrt(math.log(2e6) / 2e4))


def test_levy_exact_rademacher_is_tight():
    r = I.levy_check(RADEMACHER, 10, 3.0)
    # 2 P(S_10 >= 3) = 2 P(S_10 >= 4) for a simple random walk
    oracle = 2 * sum(math.comb(10, k) for k in range(7, 11)) / 1024
    assert r.analytic_bound == pytest.approx(oracle, rel=1e-15)
    assert r.reference_probability == pytest.approx(0.34375, rel=1e-15)
    assert r.passed


def test_levy_monte_carlo():
    r = I.levy_check(D.normal01(), 8, 1.5, mode="monte_carlo", trials=20_000, seed=11)
    assert r.passed and r.statistical_slack > 0
    with pytest.raises(ValueError):
        I.levy_check(D.normal01(), 8, 1.5)


def test_suite_records_failures_and_continues():
    cases = [
        {"inequality_id": "markov", "law": {"family": "normal01"}, "a": 1.0},
        {"inequality_id": "unknown"},
        {"inequality_id": "normal_tail", "eps": 1.0},
    ]
    reps = I.run_suite(cases)
    assert [r.status for r in reps] == ["hypothesis_failure", "error", "pass"]
    summary = I.summarize(reps)
    assert summary["total"] == 3 and summary["pass"] == 1


def test_csv_and_jsonl_output():
    reps = I.run_suite([{"inequality_id": "normal_tail", "eps": 2.0}, {"inequality_id": "bogus"}])
    rows = list(csv.reader(io.StringIO(I.reports_to_csv(reps))))
    assert tuple(rows[0]) == I.CSV_COLUMNS
    assert rows[1][4] == "true" and rows[2][4] == "false"
    assert float(rows[1][1]) == reps[0].analytic_bound
    lines = [json.loads(x) for x in I.reports_to_jsonl(reps).splitlines()]
    assert lines[0]["pass"] is True and lines[1]["analytic_bound"] is None


def test_case_seeds_depend_only_on_seed_and_index():
    assert I.case_seed(42, 3) == I.case_seed(42, 3)
    assert I.case_seed(42, 3) != I.case_seed(42, 4)
    assert I.case_seed(42, 3) != I.case_seed(43, 3)


def test_default_grid_shape():
    grid = I.default_grid()
    assert len(grid) >= 200
    assert {c["inequality_id"] for c in grid} == set(I.INEQUALITY_IDS)


# ---------------------------------------------------------------------------
# invariants on random finite laws


@st.composite
def finite_law(draw, lo=-20, hi=20):
    n = draw(st.integers(1, 6))
    pts = draw(st.lists(st.integers(lo, hi), min_size=n, max_size=n, unique=True))
    raw = draw(st.lists(st.integers(1, 20), min_size=n, max_size=n))
    tot = sum(raw)
    return D.discrete([p / 4 for p in pts], [r / tot for r in raw])


@settings(max_examples=200, deadline=None)
@given(finite_law(lo=0), st.floats(0.05, 6))
def test_markov_holds_on_finite_laws(law, a):
    r = I.markov(law, a)
    oracle = sum(m for x, m in zip(law.support, law.masses) if x > a)
    assert r.reference_probability == pytest.approx(oracle, abs=1e-15)
    assert r.passed


@pytest.mark.filterwarnings("ignore::probmeasure.expectation.CancellationWarning")
@settings(max_examples=200, deadline=None)
@given(finite_law(), st.floats(0.05, 6))
def test_chebyshev_holds_on_finite_laws(law, eps):
    assert I.chebyshev(law, eps).passed


@settings(max_examples=150, deadline=None)
@given(finite_law(), st.sampled_from(["square", "abs", "abs_cube", "affine", "exp"]))
def test_jensen_holds_for_convex_functions(law, psi):
    assert I.jensen(I.FUNCTIONS[psi], law, name=psi).passed


@settings(max_examples=150, deadline=None)
@given(finite_law(), finite_law(), st.floats(1.1, 6))
def test_holder_and_minkowski_hold(X, Y, p):
    J = I.JointLaw.independent(X, Y)
    assert I.holder_check(J, p).passed
    assert I.minkowski_check(J, p).passed
    assert I.cauchy_schwarz_check(J).passed


@settings(max_examples=100, deadline=None)
@given(finite_law(), st.integers(1, 6), st.floats(0.01, 1.5))
def test_hoeffding_holds_exactly(law, n, eps):
    if law.support.size == 1:
        return
    for variant in ("v1", "v2"):
        assert I.hoeffding_verify(variant, [law] * n, eps).passed
