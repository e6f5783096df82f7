import itertools
import random
from math import comb

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hackability.environments import build_two_state
from hackability.errors import CapExceeded, DimensionMismatch, SetMismatch
from hackability.mdp import RewardTable, enumerate_deterministic_policies, rationalizing_reward
from hackability.ordering import (
    NOT_SIMPLIFICATION,
    SIMPLIFICATION,
    TRIVIAL_SIMPLIFICATION,
    PolicyOrdering,
    PolicySet,
    check_hackable,
    check_simplification,
    enumerate_coarsenings,
    enumerate_strict_orders,
    enumerate_weak_orders,
    fubini,
    is_equivalent,
    is_trivial,
    ordering_from_reward,
    parse_ordering,
    reverse,
)

ranks = st.integers(1, 5).flatmap(lambda n: st.tuples(st.lists(st.integers(0, 3), min_size=n, max_size=n),
                                                      st.lists(st.integers(0, 3), min_size=n, max_size=n)))


@pytest.fixture(scope="module")
def two_state():
    mdp = build_two_state()
    return mdp, PolicySet.from_policies(mdp, enumerate_deterministic_policies(mdp))


def fubini_recursive(n):
    a = [1]
    for m in range(1, n + 1):
        a.append(sum(comb(m, k) * a[m - k] for k in range(1, m + 1)))
    return a[n]


def test_fubini_oracle():
    for n in range(0, 9):
        assert fubini(n) == fubini_recursive(n)
    assert fubini(3) == 13 and fubini(4) == 75


def test_weak_order_enumeration_is_exhaustive_and_unique():
    for n in range(1, 6):
        orders = list(enumerate_weak_orders(n))
        assert len(orders) == len(set(orders)) == fubini_recursive(n)
    assert len(list(enumerate_strict_orders(4))) == 24
    with pytest.raises(CapExceeded):
        list(enumerate_weak_orders(8))


def test_ordering_from_reward_example(two_state):
    _, pset = two_state
    o = ordering_from_reward(RewardTable.from_matrix([[0, 3], [2, 1]]), pset)
    names = pset.names
    assert o.label(names) == "00=01<11<10"
    assert o.values == (1, 1, 5, 3)
    assert is_trivial(ordering_from_reward(RewardTable.zeros(4), pset))
    with pytest.raises(DimensionMismatch):
        ordering_from_reward(RewardTable.zeros(3), pset)


def test_rationalizing_reward_puts_policy_on_top(two_state):
    mdp, pset = two_state
    o = ordering_from_reward(rationalizing_reward(mdp, pset.policies[2]), pset)
    assert o.classes[-1] == (2,)


def test_parse_label_round_trip(two_state):
    names = two_state[1].names
    for o in enumerate_weak_orders(4):
        assert parse_ordering(o.label(names), names) == o
        assert parse_ordering(o.label(names, prefix="pi"), names, prefix="pi") == o


def test_trivial_and_equivalent():
    a, b = PolicyOrdering.build([[0], [1]]), PolicyOrdering.build([[1], [0]])
    assert is_trivial(PolicyOrdering.trivial(4)) and not is_trivial(a)
    assert is_equivalent(a, a) and not is_equivalent(a, b)
    assert not is_equivalent(PolicyOrdering.trivial(2), a)
    with pytest.raises(SetMismatch):
        is_equivalent(a, PolicyOrdering.trivial(3))


def test_invalid_partition():
    with pytest.raises(ValueError):
        PolicyOrdering.build([[0], [2]])


@settings(max_examples=300, deadline=None)
@given(ranks)
def test_hackable_matches_definition(pair):
    r1, r2 = pair
    o1, o2 = PolicyOrdering.from_ranks(r1), PolicyOrdering.from_ranks(r2)
    n = len(r1)
    expected = any(r1[i] < r1[j] and r2[i] > r2[j] for i in range(n) for j in range(n))
    w = check_hackable(o1, o2)
    assert (w is not None) == expected
    if w:
        assert r1[w.pi_index] < r1[w.pi_prime_index] and r2[w.pi_index] > r2[w.pi_prime_index]
    # symmetry of the relation
    assert (check_hackable(o2, o1) is None) == (w is None)


@settings(max_examples=300, deadline=None)
@given(ranks)
def test_simplification_matches_implication_form(pair):
    r1, r2 = pair
    o1, o2 = PolicyOrdering.from_ranks(r1), PolicyOrdering.from_ranks(r2)
    idx = range(len(r1))
    monotone = all(r2[i] <= r2[j] for i in idx for j in idx if r1[i] <= r1[j])
    collapses = any(r1[i] < r1[j] and r2[i] == r2[j] for i in idx for j in idx)
    verdict = check_simplification(o1, o2)
    assert (verdict != NOT_SIMPLIFICATION) == (monotone and collapses)
    if verdict != NOT_SIMPLIFICATION:
        assert (verdict == TRIVIAL_SIMPLIFICATION) == (len(set(r2)) == 1)
        # a simplification is never hackable with its source
        assert check_hackable(o1, o2) is None


def test_simplification_examples(two_state):
    names = two_state[1].names
    o1 = parse_ordering("00<01<11<10", names)
    assert check_simplification(o1, parse_ordering("00=01<11<10", names)) == SIMPLIFICATION
    assert check_simplification(o1, PolicyOrdering.trivial(4)) == TRIVIAL_SIMPLIFICATION
    a, b = PolicyOrdering.build([[0], [1]]), PolicyOrdering.build([[1], [0]])
    assert check_simplification(a, b) == NOT_SIMPLIFICATION
    # refinement is not a simplification
    assert check_simplification(parse_ordering("00=01<11<10", names), o1) == NOT_SIMPLIFICATION


def test_hackable_vs_trivial_never():
    for o in enumerate_weak_orders(4):
        assert check_hackable(o, PolicyOrdering.trivial(4)) is None


def test_coarsenings():
    four = PolicyOrdering.build([[0], [1], [2], [3]])
    cs = enumerate_coarsenings(four)
    assert len(cs) == 7 and cs[-1] == PolicyOrdering.trivial(4)
    assert all(check_simplification(four, c) != NOT_SIMPLIFICATION for c in cs)
    assert enumerate_coarsenings(PolicyOrdering.build([[0], [1]])) == [PolicyOrdering.trivial(2)]
    assert enumerate_coarsenings(PolicyOrdering.trivial(3)) == []
    # every simplification of a strict order is one of its coarsenings
    sims = [o for o in enumerate_weak_orders(4) if check_simplification(four, o) != NOT_SIMPLIFICATION]
    assert set(sims) == set(cs)


def test_reverse():
    o = PolicyOrdering.build([[0], [1], [2]])
    assert reverse(o) == PolicyOrdering.build([[2], [1], [0]])
    assert reverse(PolicyOrdering.trivial(3)) == PolicyOrdering.trivial(3)


def test_negated_reward_reverses(two_state):
    _, pset = two_state
    rng = random.Random(3)
    for _ in range(50):
        r = RewardTable.from_matrix([[rng.randint(-3, 3) for _ in range(2)] for _ in range(2)])
        assert ordering_from_reward(-r, pset) == reverse(ordering_from_reward(r, pset))
