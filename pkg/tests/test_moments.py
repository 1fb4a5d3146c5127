from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from mintermkit import (DomainError, GraphSpec, first_moment, gen_graph, gen_random_mixed,
                        gen_single, is_tame, measure, paley_zygmund_bound, second_moment)
from mintermkit.moments import tame_second_moment_cap

from conftest import brute_moments, fam_of

F = Fraction


def test_f1_moments(f1):
    rep = second_moment(f1, F(1, 2))
    assert (rep.first, rep.second) == (F(1, 2), F(3, 4))
    assert (rep.diagonal, rep.overlapping, rep.disjoint) == (F(1, 2), F(1, 4), 0)
    assert rep.pz_bound == F(1, 3) <= measure(f1, F(1, 2))
    assert paley_zygmund_bound(f1, F(1, 4)) == F(1, 10) <= F(7, 64)


def test_single_minterm_is_tight():
    fam = gen_single(5, 3)
    p = F(1, 3)
    rep = second_moment(fam, p)
    assert rep.second == rep.first == p ** 3
    assert rep.pz_bound == measure(fam, p)


def test_disjoint_singletons():
    fam = fam_of(2, (0,), (1,))
    p = F(2, 7)
    rep = second_moment(fam, p)
    assert rep.second == 2 * p + 2 * p ** 2
    assert rep.disjoint == 2 * p ** 2 <= rep.first ** 2


def test_k4_first_moment():
    fam = gen_graph(GraphSpec(6, "k4"))
    assert first_moment(fam, F(1, 3)) == 15 * F(1, 3) ** 6


def test_zero_first_moment():
    with pytest.raises(DomainError):
        paley_zygmund_bound(fam_of(2), F(1, 2))


families = st.builds(gen_random_mixed, st.integers(4, 9), st.integers(1, 4),
                     st.integers(1, 7), st.integers(0, 10 ** 6))
probs = st.fractions(min_value=F(1, 50), max_value=F(49, 50), max_denominator=50)


@settings(max_examples=60, deadline=None)
@given(families, probs)
def test_moment_invariants(fam, p):
    rep = second_moment(fam, p)
    assert (rep.first, rep.second) == brute_moments(fam, p)
    assert rep.second == rep.diagonal + rep.overlapping + rep.disjoint
    assert rep.disjoint <= rep.first ** 2
    mu = measure(fam, p)
    assert rep.pz_bound <= mu <= rep.first


@settings(max_examples=60, deadline=None)
@given(families, probs)
def test_tame_second_moment_cap(fam, p):
    if is_tame(fam, p).tame:
        assert second_moment(fam, p).second <= tame_second_moment_cap(fam, p)
