"""Concrete environments: the two-state example, the cleaning robot, random
instances, hallways and the five-state line used for the Gaussian/step pair."""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from . import linalg
from .errors import CapExceeded
from .mdp import MdpSpec, RewardTable, StationaryPolicy, ValidatedMdp, validate_mdp
from .ordering import PolicySet

DEFAULT_ROOM_CAP = 12
DEFAULT_SIZE_CAP = 12
ROOM_NAMES = ("attic", "bedroom", "kitchen")
RANDOM_DISCOUNTS = (Fraction(1, 2), Fraction(3, 4), Fraction(9, 10))

ONE = Fraction(1)
ZERO = Fraction(0)


def build_two_state() -> ValidatedMdp:
    """S = A = {0, 1}, T(s, a) = a, uniform start, gamma = 1/2."""
    transition = [[[1, 0], [0, 1]], [[1, 0], [0, 1]]]
    return validate_mdp(
        MdpSpec.build(transition, ["1/2", "1/2"], "1/2", state_names=("0", "1"), action_names=("0", "1"))
    )


@dataclass(frozen=True)
class CleaningSpec:
    room_rewards_true: tuple[Fraction, ...]
    room_rewards_proxy: tuple[Fraction, ...]

    def __post_init__(self):
        if len(self.room_rewards_true) != len(self.room_rewards_proxy):
            raise ValueError("true and proxy room rewards differ in length")
        if any(r < 0 for r in self.room_rewards_true + self.room_rewards_proxy):
            raise ValueError("room rewards must be non-negative")

    @classmethod
    def build(cls, true, proxy) -> "CleaningSpec":
        return cls(linalg.vec(true), linalg.vec(proxy))

    @property
    def num_rooms(self) -> int:
        return len(self.room_rewards_true)


def room_subsets(n: int) -> list[tuple[int, ...]]:
    """0/1 vectors in lexicographic order; entry i says whether room i is cleaned."""
    return list(itertools.product((0, 1), repeat=n))


def subset_name(bits: Sequence[int]) -> str:
    return "".join(str(b) for b in bits)


def _check_rooms(n, cap):
    if n > cap:
        raise CapExceeded(f"{n} rooms exceed cap {cap}")
    if n < 1:
        raise ValueError("need at least one room")


def build_cleaning_bandit(spec: CleaningSpec, cap: int = DEFAULT_ROOM_CAP):
    """One-step encoding: from ``start`` every action (a room subset) moves to
    an absorbing ``done`` state. All reward sits on the first step, so
    J(pi_S) is exactly the sum of the cleaned rooms' rewards.

    Returns (mdp, policy set, true reward, proxy reward).
    """
    n = spec.num_rooms
    _check_rooms(n, cap)
    subsets = room_subsets(n)
    k = len(subsets)
    to_done = [0, 1]
    mdp = validate_mdp(
        MdpSpec.build(
            [[to_done] * k, [to_done] * k],
            [1, 0],
            "1/2",
            state_names=("start", "done"),
            action_names=tuple(subset_name(b) for b in subsets),
        )
    )
    pset = subset_bandit_policies(mdp)

    def table(rooms):
        first = [sum((r for r, b in zip(rooms, bits) if b), ZERO) for bits in subsets]
        return RewardTable(tuple(first) + (ZERO,) * k)

    return mdp, pset, table(spec.room_rewards_true), table(spec.room_rewards_proxy)


def subset_bandit_policies(mdp: MdpSpec) -> PolicySet:
    """Policies that vary the action in state 0 only (action 0 everywhere else)."""
    policies = []
    for a in range(mdp.num_actions):
        acts = [a] + [0] * (mdp.num_states - 1)
        name = mdp.action_names[a] if mdp.action_names is not None else str(a)
        policies.append(StationaryPolicy.deterministic(acts, mdp.num_actions, name))
    return PolicySet.from_policies(mdp, policies)


def cleaning_hackability_condition(spec: CleaningSpec, cap: int = DEFAULT_ROOM_CAP):
    """First (S1, S2) with proxy(S1) < proxy(S2) and true(S1) > true(S2), or None.

    Works on room sums directly, without building an MDP.
    """
    _check_rooms(spec.num_rooms, cap)
    subsets = room_subsets(spec.num_rooms)

    def total(rooms, bits):
        return sum((r for r, b in zip(rooms, bits) if b), ZERO)

    sums = [(total(spec.room_rewards_true, b), total(spec.room_rewards_proxy, b)) for b in subsets]
    for (t1, p1), s1 in zip(sums, subsets):
        for (t2, p2), s2 in zip(sums, subsets):
            if p1 < p2 and t1 > t2:
                return s1, s2
    return None


def _random_distribution(rng: random.Random, n: int, support: Sequence[int], denominator: int) -> list[Fraction]:
    """Integer composition of ``denominator`` over ``support``, every part >= 1."""
    k = len(support)
    cuts = sorted(rng.sample(range(1, denominator), k - 1))
    parts = [b - a for a, b in zip([0] + cuts, cuts + [denominator])]
    out = [ZERO] * n
    for s, p in zip(support, parts):
        out[s] = Fraction(p, denominator)
    return out


def build_random_mdp(
    num_states: int,
    num_actions: int,
    seed: int,
    density: float = 0.6,
    denominator: int = 64,
    cap: int = DEFAULT_SIZE_CAP,
) -> ValidatedMdp:
    """Reproducible random instance with rational rows (denominator <= 64).

    ``density`` is the chance that a successor enters a row's support. States
    left unreachable are repaired by adding them to a reachable row.
    """
    if num_states > cap or num_actions > cap:
        raise CapExceeded(f"random mdp size {num_states}x{num_actions} exceeds cap {cap}")
    if num_states < 1 or num_actions < 2:
        raise ValueError("need >= 1 state and >= 2 actions")
    rng = random.Random(seed)
    n = num_states
    denominator = max(denominator, n + 1)
    supports = []
    for s in range(n):
        per_state = []
        for a in range(num_actions):
            sup = [s2 for s2 in range(n) if rng.random() < density]
            if not sup:
                sup = [rng.randrange(n)]
            per_state.append(sup)
        supports.append(per_state)
    start = sorted(rng.sample(range(n), rng.randint(1, n)))

    # repair: hook each unreachable state into a row of a reachable one
    def reachable():
        seen, todo = set(start), list(start)
        while todo:
            s = todo.pop()
            for sup in supports[s]:
                for s2 in sup:
                    if s2 not in seen:
                        seen.add(s2)
                        todo.append(s2)
        return seen

    seen = reachable()
    while len(seen) < n:
        target = min(set(range(n)) - seen)
        src = rng.choice(sorted(seen))
        a = rng.randrange(num_actions)
        supports[src][a] = sorted(set(supports[src][a]) | {target})
        seen = reachable()

    transition = [[_random_distribution(rng, n, sup, denominator) for sup in per_state] for per_state in supports]
    initial = _random_distribution(rng, n, start, denominator)
    gamma = rng.choice(RANDOM_DISCOUNTS)
    return validate_mdp(MdpSpec.build(transition, initial, gamma))


def build_hallway(length: int, stay: bool = False, start: int | None = None, discount="9/10") -> ValidatedMdp:
    """Chain of ``length`` cells; actions left/right (plus stay). Moving off
    either end leaves the agent where it is. Starts in ``start`` (default: the
    middle cell)."""
    if length < 2:
        raise ValueError("a hallway needs at least 2 cells")
    moves = [-1, 0, 1] if stay else [-1, 1]
    names = ("left", "stay", "right") if stay else ("left", "right")
    if start is None:
        start = length // 2
    transition = []
    for s in range(length):
        per_state = []
        for mv in moves:
            row = [0] * length
            row[min(max(s + mv, 0), length - 1)] = 1
            per_state.append(row)
        transition.append(per_state)
    initial = [1 if s == start else 0 for s in range(length)]
    return validate_mdp(
        MdpSpec.build(transition, initial, discount, state_names=tuple(str(s) for s in range(length)), action_names=names)
    )


# Five cells 0..4 with A, B, C = 1, 2, 3. The bump peaks at cell 4 and is
# convex around B; the step switches on at B.
LINE_BUMP = (Fraction(3, 10000),) + tuple(Fraction(v, 1000) for v in (11, 135, 607, 1000))
LINE_STEP = (ZERO, ZERO, ONE, ONE, ONE)
LINE_A, LINE_B, LINE_C = 1, 2, 3


def build_line_example():
    """The Gaussian-vs-step pair on a five-state line with left/stay/right.

    Returns (mdp, bump reward, step reward, pi_mix, pi_stay): ``pi_mix`` leaves
    B for A or C with probability 1/2 each and then stays; ``pi_stay`` stays
    at B. Rewards depend only on the current state.
    """
    mdp = build_hallway(5, stay=True, start=LINE_B, discount="9/10")
    bump = RewardTable(tuple(v for v in LINE_BUMP for _ in range(3)))
    step = RewardTable(tuple(v for v in LINE_STEP for _ in range(3)))
    stay = [ZERO, ONE, ZERO]
    mix_rows = [stay] * 5
    mix_rows[LINE_B] = [Fraction(1, 2), ZERO, Fraction(1, 2)]
    pi_mix = StationaryPolicy.build(mix_rows, name="mix(A,C)")
    pi_stay = StationaryPolicy.build([stay] * 5, name="stay(B)")
    return mdp, bump, step, pi_mix, pi_stay
