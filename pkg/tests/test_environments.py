import random
from fractions import Fraction

import pytest

from hackability.environments import (
    CleaningSpec,
    build_cleaning_bandit,
    build_hallway,
    build_random_mdp,
    build_two_state,
    cleaning_hackability_condition,
    room_subsets,
)
from hackability.errors import CapExceeded
from hackability.mdp import enumerate_deterministic_policies, mdp_violations, occupancy
from hackability.ordering import check_hackable, ordering_from_reward


def J_by_name(spec):
    mdp, pset, true, proxy = build_cleaning_bandit(spec)
    return dict(zip(pset.names, pset.returns(true))), dict(zip(pset.names, pset.returns(proxy)))


def test_two_state_occupancy():
    mdp = build_two_state()
    pols = enumerate_deterministic_policies(mdp)
    assert len(pols) == 4 and not mdp_violations(mdp)
    assert occupancy(mdp, pols[0]).counts == (Fraction(3, 2), 0, Fraction(1, 2), 0)


def test_cleaning_returns_are_room_sums():
    true, _ = J_by_name(CleaningSpec.build([1, 2, 3], [0, 0, 0]))
    assert true["101"] == 4  # attic + kitchen
    assert true["000"] == 0
    assert J_by_name(CleaningSpec.build([1, 1, 1], [1, 1, 1]))[0]["111"] == 3


def test_cleaning_condition_examples():
    s1, s2 = cleaning_hackability_condition(CleaningSpec.build([1, 1, 1], [1, 0, 0]))
    # proxy prefers S2 = {attic}, true reward prefers S1 = {bedroom, kitchen}
    assert (s1, s2) == ((0, 1, 1), (1, 0, 0))
    assert cleaning_hackability_condition(CleaningSpec.build([1, "1.5", 2], [1, 1, 1])) is None
    assert cleaning_hackability_condition(CleaningSpec.build([2, 1, 3], [2, 1, 3])) is None


def test_cleaning_caps_and_validation():
    with pytest.raises(CapExceeded):
        build_cleaning_bandit(CleaningSpec.build([1] * 4, [1] * 4), cap=3)
    with pytest.raises(CapExceeded):
        cleaning_hackability_condition(CleaningSpec.build([1] * 13, [1] * 13))
    with pytest.raises(ValueError):
        CleaningSpec.build([1, -1], [1, 1])
    with pytest.raises(ValueError):
        CleaningSpec.build([1], [1, 1])


def test_bandit_consistency_and_cube():
    rng = random.Random(5)
    for _ in range(150):
        n = rng.randint(1, 3)
        spec = CleaningSpec.build([rng.randint(0, 3) for _ in range(n)], [rng.randint(0, 3) for _ in range(n)])
        mdp, pset, true, proxy = build_cleaning_bandit(spec)
        o_true, o_proxy = ordering_from_reward(true, pset), ordering_from_reward(proxy, pset)
        assert (check_hackable(o_true, o_proxy) is None) == (cleaning_hackability_condition(spec) is None)
        subsets = room_subsets(n)
        jt = pset.returns(true)
        for i, a in enumerate(subsets):
            # one-step return equals the direct subset sum
            assert jt[i] == sum(r for r, b in zip(spec.room_rewards_true, a) if b)
            for j, b in enumerate(subsets):
                if all(x <= y for x, y in zip(a, b)):
                    assert jt[i] <= jt[j]


def test_random_mdp_is_reproducible_and_valid():
    a = build_random_mdp(3, 2, seed=42)
    assert a == build_random_mdp(3, 2, seed=42)
    assert a.discount in (Fraction(1, 2), Fraction(3, 4), Fraction(9, 10))
    for seed in range(40):
        m = build_random_mdp(1 + seed % 4, 2 + seed % 2, seed)
        assert not mdp_violations(m)
        for per_state in m.transition:
            for row in per_state:
                assert sum(row) == 1 and all(p.denominator <= 64 for p in row)
    with pytest.raises(CapExceeded):
        build_random_mdp(13, 2, 0)


def test_hallway():
    h = build_hallway(2)
    assert h.num_states == 2 and not mdp_violations(h)
    # outward moves at the ends stay put
    left, right = 0, 1
    assert h.transition[0][left] == (1, 0)
    assert h.transition[1][right] == (0, 1)
    with pytest.raises(ValueError):
        build_hallway(1)
    assert build_hallway(5, stay=True).num_actions == 3
