"""Seeded random (mdp, policy set) instances shared by property and acceptance tests."""

from __future__ import annotations

import random
from fractions import Fraction

from hackability.environments import build_random_mdp
from hackability.mdp import RewardTable, StationaryPolicy, enumerate_deterministic_policies
from hackability.ordering import PolicySet


def random_policy(rng: random.Random, n_s: int, n_a: int, denominator: int = 4) -> StationaryPolicy:
    rows = []
    for _ in range(n_s):
        cuts = sorted(rng.randint(0, denominator) for _ in range(n_a - 1))
        parts = [b - a for a, b in zip([0] + cuts, cuts + [denominator])]
        rows.append([Fraction(p, denominator) for p in parts])
    return StationaryPolicy.build(rows)


def random_instance(seed: int):
    """|S| in 1..3, |A| in 2..3, |pset| in 1..5, deterministic and stochastic policies mixed."""
    rng = random.Random(seed)
    n_s, n_a = rng.randint(1, 3), rng.randint(2, 3)
    mdp = build_random_mdp(n_s, n_a, seed=rng.randrange(10**9))
    k = rng.randint(1, 5)
    dets = enumerate_deterministic_policies(mdp)
    policies = []
    for i in range(k):
        if rng.random() < 0.6:
            p = rng.choice(dets)
        else:
            p = random_policy(rng, n_s, n_a)
        policies.append(StationaryPolicy(p.action_probs, name=f"p{i}"))
    return mdp, PolicySet.from_policies(mdp, policies), rng


def random_reward(rng: random.Random, size: int, lo: int = -5, hi: int = 5) -> RewardTable:
    return RewardTable(tuple(Fraction(rng.randint(lo, hi)) for _ in range(size)))
