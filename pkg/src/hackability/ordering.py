"""Total preorders over finite policy sets and the relations between them.

An ordering is stored as an ordered partition of policy indices, lowest value
first, with indices ascending inside each class. That canonical form makes
orderings hashable and lets every relation be decided without reward values.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from math import comb, factorial
from typing import Iterator, Sequence

from . import linalg
from .errors import CapExceeded, DimensionMismatch, SetMismatch
from .mdp import MdpSpec, OccupancyVector, RewardTable, StationaryPolicy, occupancy, policy_return

DEFAULT_FUBINI_CAP = 47293  # Fubini(7)
DEFAULT_COARSENING_CAP = 20  # classes

NOT_SIMPLIFICATION = "not_simplification"
SIMPLIFICATION = "simplification"
TRIVIAL_SIMPLIFICATION = "trivial_simplification"


@dataclass(frozen=True)
class PolicySet:
    policies: tuple[StationaryPolicy, ...]
    occupancies: tuple[OccupancyVector, ...]

    def __post_init__(self):
        if not self.policies or len(self.policies) != len(self.occupancies):
            raise ValueError("a policy set needs >= 1 policy and one occupancy per policy")

    @classmethod
    def from_policies(cls, mdp: MdpSpec, policies: Sequence[StationaryPolicy]) -> "PolicySet":
        policies = tuple(policies)
        return cls(policies, tuple(occupancy(mdp, p) for p in policies))

    def __len__(self):
        return len(self.policies)

    @property
    def dim(self) -> int:
        return len(self.occupancies[0])

    @cached_property
    def names(self) -> tuple[str, ...]:
        return tuple(p.name if p.name is not None else str(i) for i, p in enumerate(self.policies))

    def returns(self, reward: RewardTable) -> tuple[Fraction, ...]:
        return tuple(policy_return(reward, f) for f in self.occupancies)

    def distinct_occupancies(self) -> int:
        return len({f.counts for f in self.occupancies})

    @cached_property
    def difference_coordinates(self) -> tuple[tuple[tuple[Fraction, ...], ...], tuple[tuple[Fraction, ...], ...]]:
        """(basis, coords): a basis of span{F(pi_i) - F(pi_0)} and each policy's coordinates in it."""
        base = self.occupancies[0].counts
        diffs = [linalg.sub(f.counts, base) for f in self.occupancies]
        basis = tuple(diffs[i] for i in linalg.independent_subset(diffs))
        coords = tuple(linalg.coordinates(basis, d) for d in diffs)
        return basis, coords


@dataclass(frozen=True)
class PolicyOrdering:
    classes: tuple[tuple[int, ...], ...]
    source: RewardTable | None = field(default=None, compare=False, repr=False)
    values: tuple[Fraction, ...] | None = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        canon = tuple(tuple(sorted(c)) for c in self.classes)
        object.__setattr__(self, "classes", canon)
        flat = [i for c in canon for i in c]
        if any(not c for c in canon) or sorted(flat) != list(range(len(flat))):
            raise ValueError(f"classes do not partition 0..n-1: {self.classes}")

    @classmethod
    def build(cls, classes) -> "PolicyOrdering":
        return cls(tuple(tuple(c) for c in classes))

    @classmethod
    def trivial(cls, n: int) -> "PolicyOrdering":
        return cls((tuple(range(n)),))

    @classmethod
    def from_ranks(cls, ranks: Sequence[int]) -> "PolicyOrdering":
        levels = sorted(set(ranks))
        return cls(tuple(tuple(i for i, r in enumerate(ranks) if r == lv) for lv in levels))

    @property
    def n(self) -> int:
        return sum(len(c) for c in self.classes)

    @property
    def num_classes(self) -> int:
        return len(self.classes)

    @cached_property
    def ranks(self) -> tuple[int, ...]:
        r = [0] * self.n
        for k, c in enumerate(self.classes):
            for i in c:
                r[i] = k
        return tuple(r)

    def sort_key(self):
        return (len(self.classes), self.classes)

    def label(self, names: Sequence[str] | None = None, prefix: str = "") -> str:
        """Compact text like ``00=01<11<10``."""
        name = (lambda i: prefix + names[i]) if names is not None else (lambda i: prefix + str(i))
        return "<".join("=".join(name(i) for i in c) for c in self.classes)

    def to_list(self) -> list[list[int]]:
        return [list(c) for c in self.classes]


def parse_ordering(text: str, names: Sequence[str], prefix: str = "") -> PolicyOrdering:
    """Inverse of ``PolicyOrdering.label``; whitespace and a name prefix are ignored."""
    lookup = {n: i for i, n in enumerate(names)}
    text = text.replace(" ", "")
    classes = []
    for chunk in text.split("<"):
        members = []
        for tok in chunk.split("="):
            if prefix and tok.startswith(prefix):
                tok = tok[len(prefix) :]
            members.append(lookup[tok])
        classes.append(members)
    return PolicyOrdering.build(classes)


def _same_set(o1: PolicyOrdering, o2: PolicyOrdering):
    if o1.n != o2.n:
        raise SetMismatch(f"orderings over {o1.n} and {o2.n} policies")


def ordering_from_reward(reward: RewardTable, pset: PolicySet) -> PolicyOrdering:
    if len(reward.values) != pset.dim:
        raise DimensionMismatch(f"reward has {len(reward.values)} entries, policy set dimension is {pset.dim}")
    values = pset.returns(reward)
    levels = sorted(set(values))
    classes = tuple(tuple(i for i, v in enumerate(values) if v == lv) for lv in levels)
    return PolicyOrdering(classes, source=reward, values=values)


def is_trivial(ordering: PolicyOrdering) -> bool:
    return len(ordering.classes) == 1


def is_equivalent(o1: PolicyOrdering, o2: PolicyOrdering) -> bool:
    _same_set(o1, o2)
    return o1.classes == o2.classes


@dataclass(frozen=True)
class HackabilityWitness:
    """J1(pi) < J1(pi') and J2(pi) > J2(pi')."""

    pi_index: int
    pi_prime_index: int
    j1_pair: tuple[Fraction, Fraction] | None = None
    j2_pair: tuple[Fraction, Fraction] | None = None


def check_hackable(o1: PolicyOrdering, o2: PolicyOrdering) -> HackabilityWitness | None:
    """Lexicographically first (i, j) ranked one way by o1 and the other way by o2."""
    _same_set(o1, o2)
    r1, r2 = o1.ranks, o2.ranks
    n = o1.n
    for i in range(n):
        for j in range(n):
            if r1[i] < r1[j] and r2[i] > r2[j]:
                j1 = (o1.values[i], o1.values[j]) if o1.values is not None else None
                j2 = (o2.values[i], o2.values[j]) if o2.values is not None else None
                return HackabilityWitness(i, j, j1, j2)
    return None


def check_simplification(o1: PolicyOrdering, o2: PolicyOrdering) -> str:
    """Is o2 a simplification of o1?"""
    _same_set(o1, o2)
    r1, r2 = o1.ranks, o2.ranks
    collapsed = False
    for i, j in itertools.combinations(range(o1.n), 2):
        a, b = r1[i], r1[j]
        c, d = r2[i], r2[j]
        if a == b:
            if c != d:
                return NOT_SIMPLIFICATION
        elif (a < b and c > d) or (a > b and c < d):
            return NOT_SIMPLIFICATION
        elif c == d:
            collapsed = True
    if not collapsed:
        return NOT_SIMPLIFICATION
    return TRIVIAL_SIMPLIFICATION if is_trivial(o2) else SIMPLIFICATION


def enumerate_coarsenings(o1: PolicyOrdering, cap: int = DEFAULT_COARSENING_CAP) -> list[PolicyOrdering]:
    """Every proper merge of consecutive classes, finest first; the trivial one is last."""
    m = len(o1.classes)
    if m > cap:
        raise CapExceeded(f"{m} classes exceed coarsening cap {cap}")
    out = []
    # keep[g] says whether the gap between class g and g+1 stays strict
    for keep in itertools.product((True, False), repeat=m - 1):
        if all(keep):
            continue
        classes, current = [], list(o1.classes[0])
        for g, k in enumerate(keep):
            if k:
                classes.append(current)
                current = list(o1.classes[g + 1])
            else:
                current.extend(o1.classes[g + 1])
        classes.append(current)
        out.append(PolicyOrdering.build(classes))
    return out


def fubini(n: int) -> int:
    """Number of weak orders on n items, sum_k k! S(n, k)."""
    total = 0
    for k in range(n + 1):
        # Stirling numbers of the second kind via inclusion-exclusion
        s = sum((-1) ** j * comb(k, j) * (k - j) ** n for j in range(k + 1)) // factorial(k)
        total += factorial(k) * s
    return total


def _weak_orders(items: tuple[int, ...]) -> Iterator[list[tuple[int, ...]]]:
    if not items:
        yield []
        return
    for k in range(1, len(items) + 1):
        for first in itertools.combinations(items, k):
            rest = tuple(i for i in items if i not in first)
            for tail in _weak_orders(rest):
                yield [first] + tail


def enumerate_weak_orders(n: int, cap: int = DEFAULT_FUBINI_CAP) -> Iterator[PolicyOrdering]:
    """Every ordered set partition of range(n) exactly once."""
    if n < 1:
        raise ValueError("need at least one item")
    count = fubini(n)
    if count > cap:
        raise CapExceeded(f"Fubini({n}) = {count} exceeds cap {cap}")
    for classes in _weak_orders(tuple(range(n))):
        yield PolicyOrdering(tuple(classes))


def enumerate_strict_orders(n: int, cap: int = DEFAULT_FUBINI_CAP) -> Iterator[PolicyOrdering]:
    count = factorial(n)
    if count > cap:
        raise CapExceeded(f"{n}! = {count} exceeds cap {cap}")
    for perm in itertools.permutations(range(n)):
        yield PolicyOrdering(tuple((i,) for i in perm))


def reverse(ordering: PolicyOrdering) -> PolicyOrdering:
    return PolicyOrdering(tuple(reversed(ordering.classes)))
