from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from screenlab.game import (
    PrincipalEntry,
    agent_message_payoff,
    enumerate_messages,
    exists_full_support_rationalizing_belief,
    forced_disclosure_types,
    initial_agent_sets,
    outcome_summary,
    principal_universe,
    run_rationalizability,
    support_assignments,
    costly_type_disclosure_violations,
    hidden_type_silence_violations,
)
from screenlab.menus import optimal_menu
from screenlab.model import Contract
from screenlab.scenario import EXAMPLE1, THREE_TYPE_HIGH, THREE_TYPE_LOW, scenario_from_dict, target

F = Fraction


@pytest.fixture(scope="module")
def high_state():
    return run_rationalizability(target("three-type-high"))


@pytest.fixture(scope="module")
def low_state():
    return run_rationalizability(target("three-type-low"))


def test_message_counts():
    assert enumerate_messages(target("three-type-high")).messages == ((1, 2), (1, 3))
    assert enumerate_messages(target("example1")).messages == ((1, 4), (1, 5))
    d = dict(THREE_TYPE_LOW, m=5, b=49, theta_p={"min_index": 3, "max_index": 4})
    lat = enumerate_messages(scenario_from_dict(d))
    assert len(lat.messages) == (2 + 1) * (1 + 1)
    assert lat.sub((2, 4)) == ((2, 4), (3, 4))


def test_level_two_supports_for_the_full_message():
    lat = enumerate_messages(target("three-type-high"))
    supports = {a[(1, 3)] for a in support_assignments(lat)}
    assert supports == {(1, 3), (2, 3), (3, 3)}


def test_payoffs_of_the_example_entries():
    s = target("example1")
    theta = s.types.theta(1)
    sol = optimal_menu(s.belief, s.v, s.types)
    entry = PrincipalEntry((1, 4), (1, 4), s.belief, sol)
    assert agent_message_payoff(theta, (1, 4), entry) == F("278.98")
    full = s.extra_families[0][(1, 5)]
    entry_full = PrincipalEntry((1, 5), (4, 5), full, optimal_menu(full, s.v, s.types))
    assert agent_message_payoff(theta, (1, 5), entry_full) == F("277.92")
    with pytest.raises(ValueError):
        agent_message_payoff(theta, (1, 5), entry)


def test_rationalizing_belief_certificates():
    assert exists_full_support_rationalizing_belief(0, [[5, 3]])
    assert not exists_full_support_rationalizing_belief(0, [[3, 5]])
    assert exists_full_support_rationalizing_belief(0, [[2, 0], [0, 1]])
    # only a belief with a zero weight would make the first message optimal
    assert not exists_full_support_rationalizing_belief(0, [[1, 1], [0, 1]])
    # each alternative needs more than half the weight on a different row
    assert not exists_full_support_rationalizing_belief(0, [[0, -1, 2], [0, 2, -1]])
    assert exists_full_support_rationalizing_belief(0, [[0, -1, 1], [0, 1, -1]])


small = st.integers(-5, 5)


@settings(max_examples=200, deadline=None)
@given(st.lists(st.tuples(small, small), min_size=1, max_size=3))
def test_two_row_tables_against_interval_oracle(alts):
    """With two rows the belief is (x, 1-x), 0 < x < 1; each alternative cuts a closed half-line."""
    rows = [[0] + [-a for a, _ in alts], [0] + [-b for _, b in alts]]
    feasible = True
    lower, upper = [], []  # closed bounds on x
    for a, b in alts:
        # candidate (payoff 0) is weakly better: x*a + (1-x)*b >= 0
        k = a - b
        if k == 0:
            feasible &= b >= 0
        elif k > 0:
            lower.append(F(-b, k))
        else:
            upper.append(F(-b, k))
    lo, hi = max(lower, default=None), min(upper, default=None)
    if lo is not None and lo >= 1 or hi is not None and hi <= 0:
        feasible = False
    if lo is not None and hi is not None and lo > hi:
        feasible = False
    assert exists_full_support_rationalizing_belief(0, rows) == feasible


def test_forced_types_in_the_initial_sets():
    lat = enumerate_messages(target("three-type-high"))
    agent = initial_agent_sets(lat)
    assert forced_disclosure_types(agent, (1, 2)) == {1, 2}
    assert forced_disclosure_types(agent, (1, 3)) == frozenset()


def test_high_fixture_narrative(high_state):
    st_ = high_state
    assert st_.converged and st_.level == 7
    snap3, snap4, snap5 = st_.history[3], st_.history[4], st_.history[5]
    assert snap3.forced[(1, 3)] == {2, 3}
    assert snap3.agent[(1, (1, 3))] == {(1, 2), (1, 3)}
    assert (3, 3) in st_.history[3].supports[(1, 3)]
    assert (3, 3) not in snap4.supports[(1, 3)]
    assert snap5.forced[(1, 3)] == {1, 2, 3}
    assert st_.principal.supports((1, 3)) == [(1, 3)]
    assert costly_type_disclosure_violations(st_) == []


def test_low_fixture_narrative(low_state):
    st_ = low_state
    assert st_.converged and st_.level == 6
    snap4 = st_.history[4]
    assert snap4.supports[(1, 3)] == ((1, 1),)
    (entry,) = [e for e in st_.principal.entries((1, 3))]
    assert entry.menu == {Contract(49, 49)}  # first best for the cheapest type
    assert hidden_type_silence_violations(st_) == []
    rows = [r for r in outcome_summary(st_) if r.type_index == 1]
    assert rows and all(r.bunching and r.designed_for == (2,) for r in rows)


@pytest.mark.parametrize("base, check", [(THREE_TYPE_HIGH, costly_type_disclosure_violations),
                                         (THREE_TYPE_LOW, hidden_type_silence_violations)])
def test_fixture_verdicts_survive_another_value_function(base, check):
    d = dict(base, b=99, value_function=EXAMPLE1["value_function"])
    st_ = run_rationalizability(scenario_from_dict(d))
    assert st_.converged
    assert check(st_) == []


def test_example_level_three_keeps_non_disclosure():
    st_ = run_rationalizability(target("example1"), level_cap=3)
    assert (1, 4) in st_.agent[(1, (1, 5))]


def test_universe_rejects_bad_fixture_family():
    d = dict(EXAMPLE1)
    d["belief_families"] = [[
        {"message": {"min_index": 1, "max_index": 4}, "probs": {"1": "0.25", "2": "0.25", "3": "0.25", "4": "0.25"}},
        {"message": {"min_index": 1, "max_index": 5}, "probs": {"3": "1/4", "4": "1/2", "5": "1/4"}},
    ]]
    s = scenario_from_dict(d)
    with pytest.raises(ValueError, match="reverse Bayesian"):
        principal_universe(s, enumerate_messages(s))


# A low-side scenario where a type below the aware range keeps an intermediate
# message alive: nobody inside that message sends it after level 3, so the
# principal's belief there is unconstrained and a generous menu survives.
COUNTEREXAMPLE = {
    "gamma": 58, "m": 3, "b": 48,
    "value_function": {"quadratic": {"a": "267/26", "c": "1/10"}},
    "theta_p": {"min_index": 3, "max_index": 3},
    "weight_denominator": 3, "level_cap": 12,
}


def test_intermediate_message_counterexample():
    st_ = run_rationalizability(scenario_from_dict(COUNTEREXAMPLE))
    assert st_.converged
    assert st_.agent[(1, (1, 3))] == {(2, 3), (3, 3)}
    assert st_.agent[(2, (2, 3))] == {(3, 3)}  # nobody in [2,3] sends it
    menus = [e.menu for e in st_.principal.entries((2, 3))]
    assert {Contract(35, 105), Contract(41, 117)} in menus
    theta1 = st_.scenario.types.theta(1)
    # hand arithmetic: 117 - 41*57/58 against 108 - 36*57/58
    assert max(c.t - theta1 * c.q for c in [Contract(35, 105), Contract(41, 117)]) == F(4449, 58)
    (aware,) = st_.principal.entries((3, 3))
    assert aware.menu == {Contract(36, 108)}
    assert 108 - theta1 * 36 == F(4212, 58)
    assert hidden_type_silence_violations(st_) == ["type 1 in tree [1,3] may send [(2, 3), (3, 3)]"]
