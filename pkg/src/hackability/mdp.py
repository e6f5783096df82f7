"""Rewardless MDPs, stationary policies, visit counts and reward constructions.

Every scalar is a ``Fraction``. Occupancy and reward vectors are flat tuples
indexed by ``s * num_actions + a``.
"""

from __future__ import annotations

import itertools
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from . import linalg
from .errors import (
    CapExceeded,
    DimensionMismatch,
    DiscountOutOfRange,
    MdpValidationError,
    NonStochasticRow,
    TooFewActions,
    UnreachableState,
)

DEFAULT_POLICY_CAP = 10**6

ZERO = Fraction(0)
ONE = Fraction(1)


@dataclass(frozen=True)
class MdpSpec:
    """(S, A, T, I, gamma) with ``transition[s][a][s']`` and ``initial[s]``."""

    num_states: int
    num_actions: int
    transition: tuple[tuple[tuple[Fraction, ...], ...], ...]
    initial: tuple[Fraction, ...]
    discount: Fraction
    state_names: tuple[str, ...] | None = None
    action_names: tuple[str, ...] | None = None

    @classmethod
    def build(cls, transition, initial, discount, state_names=None, action_names=None):
        trans = tuple(tuple(linalg.vec(row) for row in per_state) for per_state in transition)
        n_s = len(trans)
        n_a = len(trans[0]) if trans else 0
        return cls(
            num_states=n_s,
            num_actions=n_a,
            transition=trans,
            initial=linalg.vec(initial),
            discount=linalg.to_rational(discount),
            state_names=tuple(state_names) if state_names is not None else None,
            action_names=tuple(action_names) if action_names is not None else None,
        )

    @property
    def size(self) -> int:
        return self.num_states * self.num_actions

    def index(self, s: int, a: int) -> int:
        return s * self.num_actions + a


@dataclass(frozen=True)
class ValidatedMdp(MdpSpec):
    """An ``MdpSpec`` that passed ``validate_mdp``. Only build via that function."""


def mdp_violations(raw: MdpSpec) -> list[MdpValidationError]:
    problems: list[MdpValidationError] = []
    n_s, n_a = raw.num_states, raw.num_actions
    if n_a < 2:
        problems.append(TooFewActions(f"need at least 2 actions, got {n_a}"))
    if not 0 <= raw.discount < 1:
        problems.append(DiscountOutOfRange(f"discount must lie in [0, 1), got {raw.discount}"))
    if len(raw.transition) != n_s or len(raw.initial) != n_s:
        problems.append(NonStochasticRow("transition/initial do not match num_states"))
        return problems
    for s, per_state in enumerate(raw.transition):
        if len(per_state) != n_a:
            problems.append(NonStochasticRow(f"state {s} has {len(per_state)} action rows, expected {n_a}"))
            continue
        for a, row in enumerate(per_state):
            if len(row) != n_s or any(p < 0 for p in row) or sum(row) != 1:
                problems.append(NonStochasticRow(f"T(.|{s},{a}) is not a distribution: sum={sum(row)}"))
    if any(p < 0 for p in raw.initial) or sum(raw.initial) != 1:
        problems.append(NonStochasticRow(f"initial distribution sums to {sum(raw.initial)}"))
    if problems:
        return problems

    seen = {s for s, p in enumerate(raw.initial) if p > 0}
    frontier = list(seen)
    while frontier:
        s = frontier.pop()
        for row in raw.transition[s]:
            for s2, p in enumerate(row):
                if p > 0 and s2 not in seen:
                    seen.add(s2)
                    frontier.append(s2)
    for s in range(n_s):
        if s not in seen:
            problems.append(UnreachableState(f"state {s} is unreachable"))
    return problems


def validate_mdp(raw: MdpSpec) -> ValidatedMdp:
    """Check the standing assumptions; raise the first violation's error type.

    The raised error's ``violations`` attribute holds the full list.
    """
    if isinstance(raw, ValidatedMdp):
        return raw
    problems = mdp_violations(raw)
    if problems:
        first = problems[0]
        raise type(first)(str(first), [str(p) for p in problems])
    return ValidatedMdp(**{f: getattr(raw, f) for f in raw.__dataclass_fields__})


@dataclass(frozen=True)
class StationaryPolicy:
    action_probs: tuple[tuple[Fraction, ...], ...]
    name: str | None = field(default=None, compare=False)

    def __post_init__(self):
        for s, row in enumerate(self.action_probs):
            if any(p < 0 for p in row) or sum(row) != 1:
                raise ValueError(f"policy row {s} is not a distribution")

    @classmethod
    def build(cls, probs, name=None) -> "StationaryPolicy":
        return cls(tuple(linalg.vec(r) for r in probs), name)

    @classmethod
    def deterministic(cls, actions: Sequence[int], num_actions: int, name=None) -> "StationaryPolicy":
        rows = tuple(tuple(ONE if a == b else ZERO for b in range(num_actions)) for a in actions)
        return cls(rows, name)

    @property
    def deterministic_flag(self) -> bool:
        return all(max(row) == 1 for row in self.action_probs)

    @property
    def actions(self) -> tuple[int, ...] | None:
        """The chosen action per state, for deterministic policies."""
        if not self.deterministic_flag:
            return None
        return tuple(row.index(ONE) for row in self.action_probs)

    def embedding(self) -> tuple[Fraction, ...]:
        """G(pi): the flattened action-probability table."""
        return tuple(p for row in self.action_probs for p in row)


@dataclass(frozen=True)
class OccupancyVector:
    counts: tuple[Fraction, ...]

    def __len__(self):
        return len(self.counts)

    def __getitem__(self, i):
        return self.counts[i]


@dataclass(frozen=True)
class RewardTable:
    values: tuple[Fraction, ...]
    source: tuple[tuple[tuple[Fraction, ...], ...], ...] | None = field(default=None, compare=False)

    @classmethod
    def from_matrix(cls, matrix) -> "RewardTable":
        """From ``matrix[s][a]``."""
        return cls(tuple(linalg.to_rational(v) for row in matrix for v in row))

    @classmethod
    def zeros(cls, size: int) -> "RewardTable":
        return cls((ZERO,) * size)

    def as_matrix(self, num_actions: int) -> list[list[Fraction]]:
        v = self.values
        return [list(v[i : i + num_actions]) for i in range(0, len(v), num_actions)]

    def __neg__(self):
        return RewardTable(tuple(-v for v in self.values))

    def __add__(self, other):
        return RewardTable(linalg.add(self.values, other.values))

    def __mul__(self, c):
        return RewardTable(linalg.scale(c, self.values))

    __rmul__ = __mul__


@dataclass(frozen=True)
class PotentialFunction:
    phi: tuple[Fraction, ...]

    @classmethod
    def build(cls, values) -> "PotentialFunction":
        return cls(linalg.vec(values))


def _check_policy(mdp: MdpSpec, policy: StationaryPolicy):
    rows = policy.action_probs
    if len(rows) != mdp.num_states or any(len(r) != mdp.num_actions for r in rows):
        raise DimensionMismatch(
            f"policy is {len(rows)}x{len(rows[0]) if rows else 0}, mdp is {mdp.num_states}x{mdp.num_actions}"
        )


def state_transition_matrix(mdp: MdpSpec, policy: StationaryPolicy) -> list[list[Fraction]]:
    """P_pi[s][s'] = sum_a pi(a|s) T(s'|s,a)."""
    _check_policy(mdp, policy)
    n = mdp.num_states
    P = [[ZERO] * n for _ in range(n)]
    for s in range(n):
        for a, pa in enumerate(policy.action_probs[s]):
            if pa:
                row = mdp.transition[s][a]
                for s2 in range(n):
                    if row[s2]:
                        P[s][s2] += pa * row[s2]
    return P


def state_occupancy(mdp: MdpSpec, policy: StationaryPolicy) -> tuple[Fraction, ...]:
    """Discounted state visits w solving (I - gamma P^T) w = initial."""
    P = state_transition_matrix(mdp, policy)
    n = mdp.num_states
    g = mdp.discount
    system = [[(ONE if i == j else ZERO) - g * P[j][i] for j in range(n)] for i in range(n)]
    return linalg.solve(system, mdp.initial)


def occupancy(mdp: MdpSpec, policy: StationaryPolicy) -> OccupancyVector:
    w = state_occupancy(mdp, policy)
    counts = tuple(w[s] * p for s in range(mdp.num_states) for p in policy.action_probs[s])
    return OccupancyVector(counts)


def policy_return(reward: RewardTable, occ: OccupancyVector) -> Fraction:
    if len(reward.values) != len(occ.counts):
        raise DimensionMismatch(f"reward has {len(reward.values)} entries, occupancy {len(occ.counts)}")
    return linalg.dot(reward.values, occ.counts)


def marginalize_reward(mdp: MdpSpec, three_index) -> RewardTable:
    """R(s,a) = sum_s' T(s'|s,a) R(s,a,s')."""
    table = tuple(tuple(linalg.vec(row) for row in per_state) for per_state in three_index)
    if len(table) != mdp.num_states or any(
        len(per_state) != mdp.num_actions or any(len(row) != mdp.num_states for row in per_state)
        for per_state in table
    ):
        raise DimensionMismatch("three-index reward must be |S| x |A| x |S|")
    values = tuple(
        linalg.dot(mdp.transition[s][a], table[s][a]) for s in range(mdp.num_states) for a in range(mdp.num_actions)
    )
    return RewardTable(values, source=table)


class ShapingWarning(UserWarning):
    """The potential has nonzero initial expectation; returns shift by that amount."""


def shape_reward(mdp: MdpSpec, reward: RewardTable, phi: PotentialFunction) -> RewardTable:
    """R'(s,a) = R(s,a) + gamma E[phi(S')] - phi(s).

    Emits ``ShapingWarning`` when E_I[phi] != 0; values are still returned.
    """
    if len(reward.values) != mdp.size or len(phi.phi) != mdp.num_states:
        raise DimensionMismatch("reward/potential do not match the mdp")
    g = mdp.discount
    out = []
    for s in range(mdp.num_states):
        for a in range(mdp.num_actions):
            expected = linalg.dot(mdp.transition[s][a], phi.phi)
            out.append(reward.values[mdp.index(s, a)] + g * expected - phi.phi[s])
    if linalg.dot(mdp.initial, phi.phi) != 0:
        warnings.warn("E_I[phi] != 0: policy returns are shifted by -E_I[phi]", ShapingWarning, stacklevel=2)
    return RewardTable(tuple(out))


def shaping_preserves_returns(mdp: MdpSpec, phi: PotentialFunction) -> bool:
    return linalg.dot(mdp.initial, phi.phi) == 0


def rationalizing_reward(mdp: MdpSpec, policy: StationaryPolicy) -> RewardTable:
    """0 on actions in the policy's support, -1 elsewhere (independent of s')."""
    _check_policy(mdp, policy)
    three = [
        [[ZERO if policy.action_probs[s][a] > 0 else -ONE] * mdp.num_states for a in range(mdp.num_actions)]
        for s in range(mdp.num_states)
    ]
    return marginalize_reward(mdp, three)


def deterministic_policy_name(mdp: MdpSpec, actions: Sequence[int]) -> str:
    if mdp.action_names is not None:
        return "".join(mdp.action_names[a] for a in actions)
    sep = "" if mdp.num_actions <= 10 else ","
    return sep.join(str(a) for a in actions)


def enumerate_deterministic_policies(mdp: MdpSpec, cap: int = DEFAULT_POLICY_CAP) -> list[StationaryPolicy]:
    """All |A|^|S| deterministic policies, lexicographic in the action tuple."""
    count = mdp.num_actions**mdp.num_states
    if count > cap:
        raise CapExceeded(f"{count} deterministic policies exceed cap {cap}")
    return [
        StationaryPolicy.deterministic(acts, mdp.num_actions, deterministic_policy_name(mdp, acts))
        for acts in itertools.product(range(mdp.num_actions), repeat=mdp.num_states)
    ]
