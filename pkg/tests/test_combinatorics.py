import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from levygauss import combinatorics as comb

from _oracles import (
    cycle_index_brute,
    cycle_index_exp_series,
    hermite_rodrigues,
    involutions_brute,
    poly_eval,
    set_partitions,
)

rationals = st.fractions(min_value=-5, max_value=5, max_denominator=7)


@pytest.mark.parametrize("n, count", [(0, 1), (1, 1), (2, 2), (3, 4), (4, 10), (5, 26), (6, 76)])
def test_involution_counts(n, count):
    assert len(comb.enumerate_involutions(n)) == count
    assert comb.involution_count(n) == count


@pytest.mark.parametrize("n", range(8))
def test_involutions_match_brute_force(n):
    assert sorted(comb.enumerate_involutions(n)) == involutions_brute(n)


def test_involution_recurrence():
    I = [comb.involution_count(n) for n in range(12)]
    assert all(I[n] == I[n - 1] + (n - 1) * I[n - 2] for n in range(2, 12))


def test_empty_involution():
    assert comb.enumerate_involutions(0) == [()]


def test_cap_enforced():
    with pytest.raises(comb.SizeLimitError):
        comb.enumerate_involutions(11)
    with pytest.raises(comb.SizeLimitError):
        comb.enumerate_permutations(9)
    with pytest.raises(comb.SizeLimitError):
        comb.enumerate_partitions_le2(range(11))


@pytest.mark.parametrize("g, ctype", [
    ((0, 1, 2), (3, 0, 0)),
    ((1, 2, 0), (0, 0, 1)),
    ((1, 0, 2, 3), (2, 1, 0, 0)),
    ((), ()),
])
def test_cycle_type_examples(g, ctype):
    assert comb.cycle_type(g) == ctype


def test_cycle_type_rejects_non_permutation():
    with pytest.raises(ValueError):
        comb.cycle_type((0, 0, 1))


def test_compose_applies_right_factor_first():
    g, h = (1, 2, 0), (1, 0, 2)
    assert comb.compose(g, h) == (2, 1, 0)


@given(st.permutations(list(range(7))))
def test_cycle_type_weights_sum_to_degree(perm):
    g = tuple(perm)
    c = comb.cycle_type(g)
    assert sum((k + 1) * ck for k, ck in enumerate(c)) == len(g)
    assert comb.num_cycles(g) == sum(c)


def test_cycle_index_examples():
    assert comb.augmented_cycle_index(3, [1, 1, 1]) == 6
    assert comb.augmented_cycle_index(3, [2, -1, 0]) == 2
    # Hermite at a=1, x=2 via the Rodrigues oracle
    assert poly_eval(hermite_rodrigues(3, 1), Fraction(2)) == 2


@given(rationals, st.fractions(min_value=Fraction(1, 5), max_value=4, max_denominator=5))
def test_cycle_index_degree2_charlier_form(x, a):
    assert comb.augmented_cycle_index(2, [x - a, -x]) == x * x - (2 * a + 1) * x + a * a


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 8), st.lists(rationals, min_size=8, max_size=8))
def test_cycle_index_methods_agree(n, t):
    e = comb.augmented_cycle_index(n, t, "enumerate")
    assert e == comb.augmented_cycle_index(n, t, "recurrence")
    if n <= 6:
        assert e == cycle_index_brute(n, t)


@settings(max_examples=15, deadline=None)
@given(st.lists(rationals, min_size=10, max_size=10))
def test_cycle_index_exponential_formula(t):
    series = cycle_index_exp_series(t, 10)
    assert [comb.augmented_cycle_index(n, t, "recurrence") for n in range(11)] == series


def test_cycle_index_needs_enough_variables():
    with pytest.raises(ValueError):
        comb.augmented_cycle_index(3, [1, 1])


def test_partitions_le2_examples():
    assert len(comb.enumerate_partitions_le2(["x", "y", "z"])) == 4
    assert comb.enumerate_partitions_le2([]) == [comb.PartitionLe2((), ())]
    assert len(comb.enumerate_partitions_le2(range(4))) == 10


@pytest.mark.parametrize("n", range(9))
def test_partitions_le2_match_filtered_set_partitions(n):
    got = {frozenset(frozenset(b) for b in p.blocks()) for p in comb.enumerate_partitions_le2(range(n))}
    want = {frozenset(frozenset(b) for b in p) for p in set_partitions(range(n)) if all(len(b) <= 2 for b in p)}
    assert got == want
    assert len(comb.enumerate_partitions_le2(range(n))) == len(got)  # no duplicates
    assert len(got) == len(comb.enumerate_involutions(n))


def test_involution_partition_bijection():
    images = {comb.involution_to_partition(g) for g in comb.enumerate_involutions(6)}
    assert len(images) == comb.involution_count(6)


def test_cycle_type_census_totals():
    for n in range(1, 8):
        census = comb.cycle_type_census(n)
        assert sum(c for _, c in census) == math.factorial(n)
