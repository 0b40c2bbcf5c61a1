from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from screenlab.beliefs import (
    BeliefFamily,
    MarginalBelief,
    check_monotone_supports,
    check_reverse_bayes,
    check_wariness,
    condition,
    enumerate_belief_families,
    hazard_sum_identity_check,
    is_log_concave,
    log_concave_weights,
    newly_counted_tail,
    rank_map,
    support_assignment_problems,
    virtual_cost,
)

F = Fraction
EX1 = MarginalBelief.from_mapping((1, 4), {1: "0.05", 2: "0.15", 3: "0.3", 4: "0.5"})


def test_from_mapping_fills_zeros_and_validates():
    p = MarginalBelief.from_mapping((1, 5), {4: "89/91", 5: "2/91"})
    assert p.probs == (0, 0, 0, F(89, 91), F(2, 91))
    assert p.supported == (4, 5) and p.support == (4, 5)
    with pytest.raises(ValueError):
        MarginalBelief.from_mapping((1, 2), {1: "1/2", 2: "1/3"})
    with pytest.raises(ValueError):
        MarginalBelief.from_mapping((2, 3), {1: "1"})


def test_log_concavity_counts_zeros():
    assert is_log_concave(EX1)
    gapped = MarginalBelief.from_mapping((1, 3), {1: "1/2", 3: "1/2"})
    assert not is_log_concave(gapped)
    assert gapped.support is None
    assert is_log_concave(MarginalBelief.from_mapping((1, 3), {3: "1"}))


def test_virtual_costs_of_example():
    assert [virtual_cost(EX1, j) for j in (1, 2, 3, 4)] == [1, F(7, 3), F(11, 3), F(5)]
    with pytest.raises(ValueError):
        virtual_cost(MarginalBelief.from_mapping((1, 2), {2: "1"}), 1)


def test_wariness_three_type_cases():
    # aware of the two cheapest types; the full message adds the costliest one
    only_new = MarginalBelief.from_mapping((1, 3), {3: "1"})
    old_only = MarginalBelief.from_mapping((1, 3), {1: "1/2", 2: "1/2"})
    assert check_wariness(only_new, (1, 2))
    assert not check_wariness(old_only, (1, 2))
    assert check_wariness(MarginalBelief.from_mapping((1, 2), {2: "1"}), (1, 2))


def test_monotone_supports_examples():
    small = MarginalBelief.from_mapping((1, 2), {2: "1"})
    big = MarginalBelief.from_mapping((1, 3), {1: "1"})
    assert not check_monotone_supports([small, big])
    ok_big = MarginalBelief.from_mapping((1, 3), {2: "1/2", 3: "1/2"})
    assert check_monotone_supports({(1, 2): small, (1, 3): ok_big})


def test_conditioning_and_reverse_bayes():
    full = MarginalBelief.from_mapping((1, 5), {1: "1/10", 2: "2/10", 3: "3/10", 4: "3/10", 5: "1/10"})
    part = condition(full, (2, 4))
    assert part.probs == (F(1, 4), F(3, 8), F(3, 8))
    assert check_reverse_bayes(full, part)
    assert hazard_sum_identity_check(full, part)
    skew = MarginalBelief.from_mapping((2, 4), {2: "1/3", 3: "1/3", 4: "1/3"})
    assert not check_reverse_bayes(full, skew)
    with pytest.raises(ValueError):
        hazard_sum_identity_check(full, skew)


def test_rank_map_aligns_from_the_top():
    assert rank_map((2, 4), (1, 5)) == {1: 2, 2: 3, 3: 4}
    assert rank_map((1, 3), (1, 3)) == {1: 1, 2: 2, 3: 3}


def test_newly_counted_tail_is_the_virtual_cost_gap():
    big = MarginalBelief.from_weights((1, 4), (1, 4), [1, 2, 3, 2])
    small = condition(big, (3, 4))
    for j in (3, 4):
        assert virtual_cost(big, j) - virtual_cost(small, j) == newly_counted_tail(big, small, j)


def test_support_assignment_problems():
    assert support_assignment_problems({(1, 2): (1, 2), (1, 3): (2, 3)}, (1, 2)) == []
    probs = support_assignment_problems({(1, 2): (1, 2), (1, 3): (1, 2)}, (1, 2))
    assert any("newly disclosed highest" in x for x in probs)


def test_enumerated_families_pass_every_restriction():
    msgs = [(1, 2), (1, 3)]
    fams = list(enumerate_belief_families(msgs, (1, 2), {(1, 2): (1, 2), (1, 3): (1, 3)}, 2))
    # brute-force count of weight vectors in {1,2}^3 with w2^2 >= w1*w3
    expected = sum(1 for a in (1, 2) for b in (1, 2) for c in (1, 2) if b * b >= a * c)
    assert len(fams) == expected == 5
    uniform = [f for f in fams if set(w for _, w in f.weights) == {1}]
    assert len(uniform) == 1
    for f in fams:
        assert isinstance(f, BeliefFamily)
        assert all(is_log_concave(p) for p in f.members.values())
        assert check_reverse_bayes(f[(1, 2)], f[(1, 3)])
        assert check_monotone_supports(f)
        assert check_wariness(f[(1, 3)], (1, 2))


def test_infeasible_assignment_is_rejected():
    with pytest.raises(ValueError):
        list(enumerate_belief_families([(1, 3)], (1, 2), {(1, 3): (1, 2)}, 2))


weights = st.lists(st.integers(1, 9), min_size=1, max_size=7)


@given(weights)
def test_log_concave_implies_contiguous_support(ws):
    m = len(ws)
    p = MarginalBelief.from_weights((1, m + 2), (2, m + 1), ws)
    if is_log_concave(p):
        s = p.supported
        assert list(s) == list(range(s[0], s[-1] + 1))


@given(weights, st.data())
def test_conditioning_keeps_log_concavity_and_ratios(ws, data):
    m = len(ws)
    if not log_concave_weights(ws):
        return
    full = MarginalBelief.from_weights((1, m), (1, m), ws)
    lo = data.draw(st.integers(1, m))
    hi = data.draw(st.integers(lo, m))
    part = condition(full, (lo, hi))
    assert is_log_concave(part)
    assert check_reverse_bayes(full, part)
    assert hazard_sum_identity_check(full, part)


@given(weights)
def test_virtual_cost_increases_under_log_concavity(ws):
    m = len(ws)
    if not log_concave_weights(ws):
        return
    p = MarginalBelief.from_weights((1, m), (1, m), ws)
    costs = [virtual_cost(p, j) for j in range(1, m + 1)]
    assert all(b - a >= 1 for a, b in zip(costs, costs[1:]))
