import random
import warnings
from fractions import Fraction as Fr

import pytest

from hackability.environments import build_random_mdp, build_two_state
from hackability.errors import (
    DimensionMismatch,
    DiscountOutOfRange,
    NonStochasticRow,
    TooFewActions,
    UnreachableState,
)
from hackability.mdp import (
    MdpSpec,
    PotentialFunction,
    RewardTable,
    ShapingWarning,
    StationaryPolicy,
    enumerate_deterministic_policies,
    marginalize_reward,
    mdp_violations,
    occupancy,
    policy_return,
    rationalizing_reward,
    shape_reward,
    validate_mdp,
)
from instances import random_policy

R_EX = RewardTable.from_matrix([[0, 3], [2, 1]])


def det(mdp, acts):
    return StationaryPolicy.deterministic(acts, mdp.num_actions)


def truncated_series(mdp, policy, steps=400):
    """Float oracle: sum_t gamma^t Pr(S_t = s, A_t = a), truncated."""
    n_s, n_a = mdp.num_states, mdp.num_actions
    g = float(mdp.discount)
    dist = [float(p) for p in mdp.initial]
    out = [0.0] * (n_s * n_a)
    gt = 1.0
    for _ in range(steps):
        nxt = [0.0] * n_s
        for s in range(n_s):
            for a in range(n_a):
                pa = dist[s] * float(policy.action_probs[s][a])
                out[s * n_a + a] += gt * pa
                for s2 in range(n_s):
                    nxt[s2] += pa * float(mdp.transition[s][a][s2])
        dist = nxt
        gt *= g
    return out


def test_two_state_valid():
    mdp = build_two_state()
    assert mdp.discount == Fr(1, 2) and mdp.initial == (Fr(1, 2), Fr(1, 2))
    assert mdp_violations(mdp) == []


def test_non_stochastic_row():
    with pytest.raises(NonStochasticRow):
        validate_mdp(MdpSpec.build([[[1, 0], ["9/10", 0]], [[1, 0], [0, 1]]], [1, 0], "1/2"))


def test_unreachable_state():
    chain = [[[1, 0, 0], [0, 1, 0]], [[1, 0, 0], [0, 1, 0]], [[0, 0, 1], [0, 0, 1]]]
    with pytest.raises(UnreachableState):
        validate_mdp(MdpSpec.build(chain, [1, 0, 0], "1/2"))


def test_discount_and_action_checks_collect_all():
    raw = MdpSpec.build([[[1]]], [1], 1)
    with pytest.raises(TooFewActions) as info:
        validate_mdp(raw)
    assert len(info.value.violations) == 2
    assert [type(v) for v in mdp_violations(raw)] == [TooFewActions, DiscountOutOfRange]


def test_occupancy_examples():
    mdp = build_two_state()
    assert occupancy(mdp, det(mdp, [0, 0])).counts == (Fr(3, 2), 0, Fr(1, 2), 0)
    assert occupancy(mdp, det(mdp, [1, 0])).counts == (0, 1, 1, 0)


def test_occupancy_matches_truncated_series_and_normalizes():
    rng = random.Random(7)
    for seed in range(25):
        mdp = build_random_mdp(rng.randint(1, 4), rng.randint(2, 3), seed)
        pol = random_policy(rng, mdp.num_states, mdp.num_actions, denominator=5)
        occ = occupancy(mdp, pol)
        assert sum(occ.counts) == 1 / (1 - mdp.discount)
        assert all(c >= 0 for c in occ.counts)
        for exact, approx in zip(occ.counts, truncated_series(mdp, pol)):
            assert abs(float(exact) - approx) < 1e-9


def test_policy_return_examples():
    mdp = build_two_state()
    assert policy_return(R_EX, occupancy(mdp, det(mdp, [1, 0]))) == 5
    assert policy_return(R_EX, occupancy(mdp, det(mdp, [0, 0]))) == 1
    assert policy_return(RewardTable.zeros(4), occupancy(mdp, det(mdp, [0, 1]))) == 0
    with pytest.raises(DimensionMismatch):
        policy_return(RewardTable.zeros(3), occupancy(mdp, det(mdp, [0, 1])))


def test_marginalize():
    mdp = build_two_state()
    const = [[[5, 5], [7, 7]], [[1, 1], [2, 2]]]
    assert marginalize_reward(mdp, const).values == (5, 7, 1, 2)
    by_next = [[[0, 1], [0, 1]], [[0, 1], [0, 1]]]
    assert marginalize_reward(mdp, by_next).values == (0, 1, 0, 1)
    uniform = validate_mdp(MdpSpec.build([[["1/2", "1/2"], [1, 0]], [[1, 0], [0, 1]]], [1, 0], "1/2"))
    assert marginalize_reward(uniform, [[[1, 3], [0, 0]], [[0, 0], [0, 0]]]).values[0] == 2
    with pytest.raises(DimensionMismatch):
        marginalize_reward(mdp, [[[1]]])


def test_shaping_example():
    mdp = build_two_state()
    shaped = shape_reward(mdp, RewardTable.zeros(4), PotentialFunction.build([1, -1]))
    assert shaped.values == (Fr(-1, 2), Fr(-3, 2), Fr(3, 2), Fr(1, 2))
    for pol in enumerate_deterministic_policies(mdp):
        assert policy_return(shaped, occupancy(mdp, pol)) == 0


def test_shaping_zero_potential_and_warning():
    mdp = build_two_state()
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        assert shape_reward(mdp, R_EX, PotentialFunction.build([0, 0])) == R_EX
    with pytest.warns(ShapingWarning):
        shaped = shape_reward(mdp, R_EX, PotentialFunction.build([1, 1]))
    # returns shift by exactly -E_I[phi]
    pol = det(mdp, [0, 1])
    assert policy_return(shaped, occupancy(mdp, pol)) == policy_return(R_EX, occupancy(mdp, pol)) - 1


def test_rationalizing_reward_two_state():
    mdp = build_two_state()
    r = rationalizing_reward(mdp, det(mdp, [1, 0]))
    assert r.values == (-1, 0, 0, -1)
    returns = {p.name: policy_return(r, occupancy(mdp, p)) for p in enumerate_deterministic_policies(mdp)}
    assert returns["10"] == 0 and all(v < 0 for k, v in returns.items() if k != "10")


def test_rationalizing_uniform_is_zero():
    mdp = build_two_state()
    half = [Fr(1, 2), Fr(1, 2)]
    assert rationalizing_reward(mdp, StationaryPolicy.build([half, half])).values == (0, 0, 0, 0)


def test_rationalizing_unique_argmax_random():
    for seed in range(15):
        mdp = build_random_mdp(2 + seed % 2, 2 + seed % 2, seed)
        pols = enumerate_deterministic_policies(mdp)
        target = pols[seed % len(pols)]
        r = rationalizing_reward(mdp, target)
        vals = [policy_return(r, occupancy(mdp, p)) for p in pols]
        best = max(vals)
        # unique up to occupancy: choices in states pi never visits are invisible
        same_occ = [p for p in pols if occupancy(mdp, p) == occupancy(mdp, target)]
        assert [p for p, v in zip(pols, vals) if v == best] == same_occ
        assert target in same_occ


def test_enumerate_deterministic():
    mdp = build_two_state()
    assert [p.name for p in enumerate_deterministic_policies(mdp)] == ["00", "01", "10", "11"]
    assert len(enumerate_deterministic_policies(build_random_mdp(1, 3, 0))) == 3
    assert len(enumerate_deterministic_policies(build_random_mdp(3, 2, 0))) == 8


def test_policy_validation():
    with pytest.raises(ValueError):
        StationaryPolicy.build([[Fr(1, 2), Fr(1, 3)]])
    pol = StationaryPolicy.deterministic([1, 0], 2)
    assert pol.deterministic_flag and pol.actions == (1, 0)
    assert pol.embedding() == (0, 1, 1, 0)
