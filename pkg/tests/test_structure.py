from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from mintermkit import (DomainError, MintermFamily, PreconditionError, decompose,
                        first_moment, gen_all_k_subsets, gen_random_mixed, gen_single,
                        gen_singletons, gen_star, halving_check, is_tame, measure,
                        tame_lower_bound, tame_transfer_check, verify_tame_approximation)
from mintermkit.family import mask_of, supplements

F = Fraction


def test_tameness_examples(f1):
    assert is_tame(f1, F(1, 4)).tame
    rep = is_tame(f1, F(1, 2))
    assert not rep.tame and rep.witness == (mask_of((1,)), 1, 2)
    assert is_tame(gen_single(6, 4), F(9, 10)).tame
    assert is_tame(gen_singletons(10), F(1, 2)).tame
    with pytest.raises(DomainError):
        is_tame(f1, 1)


def test_tameness_counts_empty_set():
    # three singletons: N^1(empty) has 3 members, which reaches 1/p = 2
    fam = MintermFamily(5, (mask_of((0,)), mask_of((1,)), mask_of((2,)), mask_of((3, 4))))
    rep = is_tame(fam, F(1, 2))
    assert not rep.tame and rep.witness == (0, 1, 3)


def test_tame_lower_bound(f1):
    assert tame_lower_bound(f1, F(1, 4)) == F(1, 64) <= F(7, 64)
    assert tame_lower_bound(gen_singletons(10), F(1, 20)) == F(1, 4)
    with pytest.raises(PreconditionError) as exc:
        tame_lower_bound(f1, F(1, 2))
    assert exc.value.witness.witness[1] == 1


def test_decompose_star(s9):
    out = decompose(s9, F(1, 2))
    assert out.case == "tame_approximation" and out.m == 1
    assert out.subfamily.sets() == [(0,)]
    assert out.subfamily_measure == F(1, 2) >= out.mu / 4
    assert len(supplements(out.witness, mask_of((0,)), 1)) == 8
    assert verify_tame_approximation(s9, out.subfamily, 1, F(1, 4), out.witness).ok


def test_decompose_case_one(f1):
    out = decompose(gen_single(4, 4), F(1, 2))
    assert out.case == "tame_subfamily" and out.subfamily == gen_single(4, 4)
    out = decompose(f1, F(1, 4))
    assert out.case == "tame_subfamily"
    assert out.stages == ((),) and out.chain[-1] == f1


def test_verify_approximation_rejections(f1):
    res = verify_tame_approximation(f1, MintermFamily(3, (mask_of((1,)),)), 1, F(2, 5), f1)
    assert not res.ok and res.violations[0]["kind"] == "too_few_supplements"
    with pytest.raises(PreconditionError):
        verify_tame_approximation(f1, f1, 2, F(1, 2), f1)
    with pytest.raises(PreconditionError):
        verify_tame_approximation(f1, f1, 1, F(1, 2), MintermFamily(3, (mask_of((0, 2)),)))


def test_halving_examples(f1, s9):
    h = halving_check(f1, F(1, 2))
    assert h.structural.lhs == F(7, 64) and h.structural.rhs == F(3, 512) and h.passed
    h = halving_check(s9, F(1, 2))
    assert h.structural.lhs == F(1, 4) * (1 - F(3, 4) ** 8)
    single = halving_check(gen_single(5, 3), F(2, 3))
    assert single.power.margin == 0


def test_transfer_examples(f1, s9):
    t = tame_transfer_check(f1, F(1, 2))
    assert t.tame_clause.applicable
    assert (t.tame_clause.lhs, t.tame_clause.rhs) == (F(7, 64), F(3, 256))
    t = tame_transfer_check(s9, F(1, 2))
    assert t.approximation_clause.applicable and t.passed
    assert t.approximation_clause.rhs == F(1, 4)


def test_approximation_clause_counterexample():
    # singletons of [5] form a tame 1-approximation of the 2-sets of [5] at r = 1/4
    # (each singleton has 4 supplements, 4 >= 1/r), yet mu_r(A) < mu_r(B)/2.
    fam = gen_all_k_subsets(5, 2)
    b = gen_singletons(5)
    r = F(1, 4)
    assert verify_tame_approximation(fam, b, 1, r, fam).ok
    t = tame_transfer_check(fam, r, (b, 1, fam))
    assert t.approximation_clause.applicable and not t.approximation_clause.passed
    assert t.approximation_clause.lhs == F(47, 128)
    assert t.approximation_clause.rhs == (1 - F(3, 4) ** 5) / 2


families = st.builds(gen_random_mixed, st.integers(4, 10), st.integers(1, 4),
                     st.integers(1, 7), st.integers(0, 10 ** 6))
probs = st.sampled_from([F(i, 10) for i in range(1, 10)])


@settings(max_examples=60, deadline=None)
@given(families, probs)
def test_decomposition_certificates(fam, p):
    out = decompose(fam, p)
    chain = out.chain
    assert all(set(b.minterms) <= set(a.minterms) for a, b in zip(chain, chain[1:]))
    if out.case == "tame_subfamily":
        assert is_tame(out.subfamily, p / 2, k=fam.k).tame
        assert 2 * out.subfamily_measure >= out.mu
    else:
        assert verify_tame_approximation(fam, out.subfamily, out.m, p / 2, out.witness).ok
        assert out.subfamily_measure * 2 ** (out.m + 1) >= out.mu


@settings(max_examples=60, deadline=None)
@given(families, probs)
def test_tame_bound_and_halving(fam, p):
    if is_tame(fam, p).tame:
        assert tame_lower_bound(fam, p) <= measure(fam, p)
        k = max(fam.k, 1)
        assert tame_lower_bound(fam, p) == min(first_moment(fam, p), 1) / (k * 2 ** k)
    assert halving_check(fam, p).passed
