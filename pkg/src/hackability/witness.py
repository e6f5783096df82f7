"""Empirical hackability probes over sampled stochastic policies.

On policy sets with volume (all stationary policies, epsilon-suboptimal ones,
delta-deterministic ones) two non-trivial rewards are either equivalent or
hackable. These helpers look for the hacking pair by rational sampling plus a
small hill-climb. A returned witness is always exact; failing to find one is
a reproducible negative result tied to (seed, budget), not a proof.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from . import linalg
from .errors import FilterTooTight
from .mdp import (
    DEFAULT_POLICY_CAP,
    MdpSpec,
    RewardTable,
    StationaryPolicy,
    enumerate_deterministic_policies,
    occupancy,
    policy_return,
)
from .ordering import HackabilityWitness

ALL = "all"
EPS_SUBOPTIMAL = "eps_suboptimal"
DELTA_DETERMINISTIC = "delta_deterministic"

DEFAULT_DENOMINATOR = 1000
MAX_REJECTIONS_PER_SAMPLE = 50
REFINE_POOL = 200


@dataclass(frozen=True)
class SearchBudget:
    num_samples: int = 10_000
    num_refinement_steps: int = 100
    seed: int = 0

    def __post_init__(self):
        if self.num_samples < 1 or self.num_refinement_steps < 0 or self.seed < 0:
            raise ValueError("budget entries must be positive")


@dataclass(frozen=True)
class PolicyFilter:
    kind: str = ALL
    eps: Fraction | None = None
    wrt: RewardTable | None = field(default=None, repr=False)
    delta: Fraction | None = None

    def __post_init__(self):
        if self.kind == EPS_SUBOPTIMAL:
            if self.eps is None or self.eps <= 0 or self.wrt is None:
                raise ValueError("eps_suboptimal needs eps > 0 and a reward")
        elif self.kind == DELTA_DETERMINISTIC:
            if self.delta is None or not 0 <= self.delta < 1:
                raise ValueError("delta_deterministic needs 0 <= delta < 1")
        elif self.kind != ALL:
            raise ValueError(f"unknown filter kind {self.kind!r}")

    @classmethod
    def eps_suboptimal(cls, eps, wrt: RewardTable) -> "PolicyFilter":
        return cls(EPS_SUBOPTIMAL, eps=linalg.to_rational(eps), wrt=wrt)

    @classmethod
    def delta_deterministic(cls, delta) -> "PolicyFilter":
        return cls(DELTA_DETERMINISTIC, delta=linalg.to_rational(delta))

    def describe(self) -> str:
        if self.kind == EPS_SUBOPTIMAL:
            return f"eps_suboptimal({linalg.format_rational(self.eps)})"
        if self.kind == DELTA_DETERMINISTIC:
            return f"delta_deterministic({linalg.format_rational(self.delta)})"
        return ALL


def optimal_value(mdp: MdpSpec, reward: RewardTable, cap: int = DEFAULT_POLICY_CAP) -> Fraction:
    """max J over deterministic stationary policies (attains the optimum)."""
    return max(policy_return(reward, occupancy(mdp, p)) for p in enumerate_deterministic_policies(mdp, cap))


def is_eps_suboptimal(mdp, reward, policy, eps, cap: int = DEFAULT_POLICY_CAP, optimum=None) -> bool:
    eps = linalg.to_rational(eps)
    if eps <= 0:
        raise ValueError("eps must be positive")
    if optimum is None:
        optimum = optimal_value(mdp, reward, cap)
    return policy_return(reward, occupancy(mdp, policy)) >= optimum - eps


def is_delta_deterministic(policy: StationaryPolicy, delta) -> bool:
    delta = linalg.to_rational(delta)
    if not 0 <= delta < 1:
        raise ValueError("delta must lie in [0, 1)")
    return all(max(row) >= delta for row in policy.action_probs)


def _random_row(rng: random.Random, k: int, denominator: int) -> tuple[Fraction, ...]:
    """Uniform over {n / denominator : n integer >= 0, sum n = denominator} (stars and bars)."""
    bars = sorted(rng.sample(range(denominator + k - 1), k - 1))
    edges = [-1] + bars + [denominator + k - 1]
    return tuple(Fraction(b - a - 1, denominator) for a, b in zip(edges, edges[1:]))


class _Sampler:
    def __init__(self, mdp, pfilter, seed, denominator):
        self.mdp = mdp
        self.filter = pfilter
        self.rng = random.Random(seed)
        self.denominator = denominator
        self.optimum = optimal_value(mdp, pfilter.wrt) if pfilter.kind == EPS_SUBOPTIMAL else None

    def accepts(self, policy) -> bool:
        f = self.filter
        if f.kind == DELTA_DETERMINISTIC:
            return is_delta_deterministic(policy, f.delta)
        if f.kind == EPS_SUBOPTIMAL:
            return is_eps_suboptimal(self.mdp, f.wrt, policy, f.eps, optimum=self.optimum)
        return True

    def _row(self):
        k = self.mdp.num_actions
        if self.filter.kind == DELTA_DETERMINISTIC:
            # per-state rejection keeps the product distribution uniform on the filtered set
            for _ in range(MAX_REJECTIONS_PER_SAMPLE):
                row = _random_row(self.rng, k, self.denominator)
                if max(row) >= self.filter.delta:
                    return row
            raise FilterTooTight(f"{self.filter.describe()} rejected {MAX_REJECTIONS_PER_SAMPLE} rows in a row")
        return _random_row(self.rng, k, self.denominator)

    def draw(self) -> StationaryPolicy:
        for _ in range(MAX_REJECTIONS_PER_SAMPLE):
            pol = StationaryPolicy(tuple(self._row() for _ in range(self.mdp.num_states)))
            if self.accepts(pol):
                return pol
        raise FilterTooTight(f"{self.filter.describe()} rejected {MAX_REJECTIONS_PER_SAMPLE} policies in a row")


def sample_policies(
    mdp: MdpSpec,
    pfilter: PolicyFilter = PolicyFilter(),
    budget: SearchBudget = SearchBudget(),
    denominator: int = DEFAULT_DENOMINATOR,
) -> list[StationaryPolicy]:
    sampler = _Sampler(mdp, pfilter, budget.seed, denominator)
    return [sampler.draw() for _ in range(budget.num_samples)]


@dataclass(frozen=True)
class SampledWitness(HackabilityWitness):
    """Indices refer to the sample stream (-1 for policies produced by refinement)."""

    pi: StationaryPolicy | None = None
    pi_prime: StationaryPolicy | None = None
    refined: bool = False

    def verify(self, mdp: MdpSpec, r1: RewardTable, r2: RewardTable) -> bool:
        f, g = occupancy(mdp, self.pi), occupancy(mdp, self.pi_prime)
        return policy_return(r1, f) < policy_return(r1, g) and policy_return(r2, f) > policy_return(r2, g)


def _has_witness(points: Sequence[tuple[Fraction, Fraction]]) -> bool:
    """Is there i, j with a_i < a_j and b_i > b_j? O(n log n) sweep."""
    order = sorted(range(len(points)), key=lambda i: points[i][0])
    best_below = None  # max b among strictly smaller a
    k = 0
    while k < len(order):
        a = points[order[k]][0]
        group = []
        while k < len(order) and points[order[k]][0] == a:
            group.append(points[order[k]][1])
            k += 1
        if best_below is not None and min(group) < best_below:
            return True
        mg = max(group)
        best_below = mg if best_below is None else max(best_below, mg)
    return False


def _orient(i, j, points):
    """Order (i, j) so that J1 increases and J2 decreases, or None."""
    (a1, b1), (a2, b2) = points[i], points[j]
    if a1 < a2 and b1 > b2:
        return i, j
    if a2 < a1 and b2 > b1:
        return j, i
    return None


def _margin(p, q):
    """min(J1(q) - J1(p), J2(p) - J2(q)); positive iff (p, q) is a witness."""
    return min(q[0] - p[0], p[1] - q[1])


def search_hackability_witness(
    mdp: MdpSpec,
    r1: RewardTable,
    r2: RewardTable,
    pfilter: PolicyFilter = PolicyFilter(),
    budget: SearchBudget = SearchBudget(),
    denominator: int = DEFAULT_DENOMINATOR,
) -> SampledWitness | None:
    """The sampled pair that completes earliest in the stream, else a refined pair.

    Among samples the chosen witness is the one minimizing the index of its
    later member, so a larger budget under the same seed returns the same pair.
    """
    witness, _, _ = _search(mdp, r1, r2, pfilter, budget, denominator)
    return witness


def _search(mdp, r1, r2, pfilter, budget, denominator):
    sampler = _Sampler(mdp, pfilter, budget.seed, denominator)
    policies, points = [], []

    def J(pol):
        f = occupancy(mdp, pol)
        return policy_return(r1, f), policy_return(r2, f)

    checked = 0
    step = 16
    while checked < budget.num_samples:
        target = min(budget.num_samples, max(step, checked * 2))
        while len(policies) < target:
            pol = sampler.draw()
            policies.append(pol)
            points.append(J(pol))
        if _has_witness(points):
            lo, hi = checked, len(points)  # prefix hi has a witness, prefix lo does not
            while hi - lo > 1:
                mid = (lo + hi) // 2
                if _has_witness(points[:mid]):
                    hi = mid
                else:
                    lo = mid
            m = hi - 1
            for j in range(m):
                pair = _orient(j, m, points)
                if pair:
                    p, q = pair
                    w = SampledWitness(
                        p, q, (points[p][0], points[q][0]), (points[p][1], points[q][1]), policies[p], policies[q]
                    )
                    return w, policies, points
        checked = len(points)

    if budget.num_refinement_steps:
        w = _refine(mdp, r1, r2, sampler, policies[:REFINE_POOL], points[:REFINE_POOL], budget.num_refinement_steps, J)
        if w is not None:
            return w, policies, points
    return None, policies, points


def _perturbations(policy: StationaryPolicy, step: Fraction):
    rows = policy.action_probs
    for s, row in enumerate(rows):
        for a in range(len(row)):
            if row[a] == 0:
                continue
            amount = min(step, row[a])
            for b in range(len(row)):
                if b == a:
                    continue
                new = list(row)
                new[a] -= amount
                new[b] += amount
                yield StationaryPolicy(rows[:s] + (tuple(new),) + rows[s + 1 :])


def _refine(mdp, r1, r2, sampler, policies, points, steps, J):
    """Deterministic hill-climb on the witness margin from the best sampled pair."""
    if len(policies) < 2:
        return None
    best = None
    for i, p in enumerate(points):
        for j, q in enumerate(points):
            if i != j:
                m = _margin(p, q)
                if best is None or m > best[0]:
                    best = (m, i, j)
    margin, i, j = best
    pair = [policies[i], policies[j]]
    vals = [points[i], points[j]]
    k = 2
    for _ in range(steps):
        step = Fraction(1, k)
        improved = None
        for side in (0, 1):
            for cand in _perturbations(pair[side], step):
                if not sampler.accepts(cand):
                    continue
                v = J(cand)
                trial = [v, vals[1]] if side == 0 else [vals[0], v]
                m = _margin(trial[0], trial[1])
                if m > margin and (improved is None or m > improved[0]):
                    improved = (m, side, cand, v)
        if improved is None:
            k *= 2
            continue
        margin, side, cand, v = improved
        pair[side], vals[side] = cand, v
        if margin > 0:
            p, q = pair
            return SampledWitness(-1, -1, (vals[0][0], vals[1][0]), (vals[0][1], vals[1][1]), p, q, refined=True)
    return None


@dataclass(frozen=True)
class ProbeReport:
    seed: int
    budget: SearchBudget
    filter: str
    witness: SampledWitness | None
    orderings_agree_on_sample: bool
    samples_checked: int


def _same_weak_order(a: Sequence[Fraction], b: Sequence[Fraction]) -> bool:
    order = sorted(range(len(a)), key=lambda i: (a[i], b[i]))
    for x, y in zip(order, order[1:]):
        ca, cb = a[x] < a[y], b[x] < b[y]
        if ca != cb:
            return False
    # consecutive pairs cover every pair because both sequences are then sorted alike
    return True


def equivalence_probe(
    mdp: MdpSpec,
    r1: RewardTable,
    r2: RewardTable,
    pfilter: PolicyFilter = PolicyFilter(),
    budget: SearchBudget = SearchBudget(),
    denominator: int = DEFAULT_DENOMINATOR,
) -> ProbeReport:
    witness, _, points = _search(mdp, r1, r2, pfilter, budget, denominator)
    agree = False
    if witness is None:
        agree = _same_weak_order([p[0] for p in points], [p[1] for p in points])
    return ProbeReport(budget.seed, budget, pfilter.describe(), witness, agree, len(points))


def flow_matrix(mdp: MdpSpec) -> list[list[Fraction]]:
    """M with M @ F(pi) == initial for every stationary policy (Bellman flow)."""
    rows = []
    for s2 in range(mdp.num_states):
        row = []
        for s in range(mdp.num_states):
            for a in range(mdp.num_actions):
                row.append((1 if s == s2 else 0) - mdp.discount * mdp.transition[s][a][s2])
        rows.append(row)
    return rows


def reward_direction(mdp: MdpSpec, reward: RewardTable) -> tuple[Fraction, ...]:
    """Orthogonal projection of R onto the directions occupancies can move in.

    The removed component (rows of the flow matrix) is exactly potential
    shaping, which shifts every return by the same constant.
    """
    M = flow_matrix(mdp)
    gram = [[linalg.dot(a, b) for b in M] for a in M]
    y = linalg.solve(gram, linalg.matvec(M, reward.values))
    correction = [sum((y[i] * M[i][k] for i in range(len(M))), Fraction(0)) for k in range(mdp.size)]
    return tuple(r - c for r, c in zip(reward.values, correction))


def trivial_on_all_policies(mdp: MdpSpec, reward: RewardTable) -> bool:
    return linalg.is_zero(reward_direction(mdp, reward))


def equivalent_on_all_policies(mdp: MdpSpec, r1: RewardTable, r2: RewardTable) -> bool:
    """Same ordering of every stationary policy: the projected rewards are
    positive multiples of each other (or both zero)."""
    d1, d2 = reward_direction(mdp, r1), reward_direction(mdp, r2)
    z1, z2 = linalg.is_zero(d1), linalg.is_zero(d2)
    if z1 or z2:
        return z1 and z2
    k = next(i for i, v in enumerate(d1) if v != 0)
    c = d2[k] / d1[k]
    return c > 0 and all(b == c * a for a, b in zip(d1, d2))
