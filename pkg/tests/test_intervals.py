import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from probmeasure.distributions import exponential1, normal01
from probmeasure.intervals import (
    InfiniteLengthError,
    IntervalUnion,
    MalformedIntervalError,
    SemiOpenInterval,
    complement,
    difference,
    intersect,
    length_under,
    normalize,
    prefix_lengths,
    union,
)

INF = math.inf


def test_normalize_merges_overlap_and_touching():
    assert normalize([(0, 2), (1, 3)]) == IntervalUnion.of((0, 3))
    assert normalize([(0, 1), (1, 2)]) == IntervalUnion.of((0, 2))
    assert normalize([(2, 3), (0, 1)]).to_json() == [[0.0, 1.0], [2.0, 3.0]]


def test_reversed_or_empty_interval_is_rejected():
    with pytest.raises(MalformedIntervalError):
        normalize([(1, 1)])
    with pytest.raises(MalformedIntervalError):
        normalize([(3, 2)])
    with pytest.raises(MalformedIntervalError):
        SemiOpenInterval.checked(INF, 2)
    with pytest.raises(MalformedIntervalError):
        SemiOpenInterval.checked(0, -INF)


def test_semi_open_membership():
    A = IntervalUnion.of((0, 1))
    assert 1 in A
    assert 0 not in A
    assert 0.5 in A


def test_complement_of_unit_interval():
    assert complement(IntervalUnion.of((0, 1))).to_json() == [["-inf", 0.0], [1.0, "+inf"]]
    assert complement(IntervalUnion.empty()) == IntervalUnion.real_line()
    assert complement(IntervalUnion.real_line()) == IntervalUnion.empty()


def test_length_identity_and_infinite_length():
    assert length_under(None, IntervalUnion.of((0, 1), (2, 4))) == 3.0
    with pytest.raises(InfiniteLengthError):
        length_under(None, IntervalUnion.of((0, INF)))


def test_length_under_distribution():
    assert length_under(normal01(), IntervalUnion.of(("-inf", 0))) == pytest.approx(0.5, abs=1e-15)
    assert length_under(exponential1(), IntervalUnion.real_line()) == 1.0
    # difference of exponential CDF values, worked by hand
    expected = math.exp(-1) - math.exp(-2)
    assert length_under(exponential1(), IntervalUnion.of((1, 2))) == pytest.approx(expected, rel=1e-14)


def test_json_round_trip_and_bad_json():
    A = IntervalUnion.of(("-inf", -1), (0, 2), (5, "+inf"))
    assert IntervalUnion.from_json(A.to_json()) == A
    with pytest.raises(MalformedIntervalError):
        IntervalUnion.from_json([[0, 1, 2]])
    with pytest.raises(MalformedIntervalError):
        IntervalUnion.from_json({"a": 1})


def test_affine_image():
    A = IntervalUnion.of((0, 1), (2, 3))
    assert A.affine_image(1.0, 2.0) == IntervalUnion.of((1, 3), (5, 7))
    with pytest.raises(ValueError):
        A.affine_image(0.0, -1.0)


def test_prefix_lengths_countable_additivity():
    # (1/(k+1), 1/k] tile (0, 1]; partial sums 1 - 1/(n+1)
    sums = prefix_lengths(None, ((1 / (k + 1), 1 / k) for k in range(1, 10_000)), 2000)
    assert sums[-1] == pytest.approx(1 - 1 / 2001, abs=1e-12)
    with pytest.raises(ValueError):
        prefix_lengths(None, [(0, 2), (1, 3)], 5)


# ---------------------------------------------------------------------------
# properties with an exact rational oracle

endpoint = st.integers(-20, 20)
pair = st.tuples(endpoint, endpoint).filter(lambda p: p[0] != p[1]).map(lambda p: (min(p), max(p)))
union_st = st.lists(pair, max_size=6).map(normalize)


def member_oracle(pairs, x):
    return any(a < x <= b for a, b in pairs)


def grid():
    # endpoints, midpoints and points just beyond the range
    return [Fraction(k, 2) for k in range(-44, 45)]


@settings(max_examples=300, deadline=None)
@given(union_st, union_st)
def test_operations_agree_with_pointwise_oracle(A, B):
    pa, pb = list(A), list(B)
    U, I, D, C = union(A, B), intersect(A, B), difference(A, B), complement(A)
    for x in grid():
        xf = float(x)
        inA, inB = member_oracle(pa, x), member_oracle(pb, x)
        assert (xf in U) == (inA or inB)
        assert (xf in I) == (inA and inB)
        assert (xf in D) == (inA and not inB)
        assert (xf in C) == (not inA)


@settings(max_examples=300, deadline=None)
@given(union_st, union_st)
def test_additivity_and_monotonicity(A, B):
    # λ(A ∪ B) + λ(A ∩ B) = λ(A) + λ(B); A ∩ B ⊆ A
    lhs = length_under(None, union(A, B)) + length_under(None, intersect(A, B))
    assert lhs == length_under(None, A) + length_under(None, B)
    assert length_under(None, intersect(A, B)) <= length_under(None, A)
    assert intersect(A, B).issubset(A)


@settings(max_examples=300, deadline=None)
@given(st.lists(pair, max_size=8))
def test_normalize_is_canonical_and_idempotent(pairs):
    N = normalize(pairs)
    assert normalize(list(N)) == N
    ivs = list(N)
    for (a0, b0), (a1, b1) in zip(ivs, ivs[1:]):
        assert b0 < a1
    assert normalize(reversed(pairs)) == N


@settings(max_examples=200, deadline=None)
@given(union_st, union_st)
def test_de_morgan_and_involution(A, B):
    assert complement(complement(A)) == A
    assert complement(union(A, B)) == intersect(complement(A), complement(B))
    assert complement(intersect(A, B)) == union(complement(A), complement(B))


def test_array_membership_matches_scalar():
    A = IntervalUnion.of((-3, -1), (0, 2), (4, INF))
    xs = np.linspace(-5, 6, 221)
    assert A.contains(xs).tolist() == [x in A for x in xs]
