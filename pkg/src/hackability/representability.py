"""Which policy orderings can a Markov reward realize on a finite policy set?

Strict feasibility of {R : <R, F(pi') - F(pi)> > 0 for consecutive classes,
<R, F(pi) - F(rep)> = 0 within classes} is decided by the auxiliary LP

    maximize t  s.t.  <R, d_i> >= t,  <R, e_j> = 0,  -1 <= R <= 1

solved exactly: the ordering is representable iff the optimum is positive.
When it is not, the LP duals give a Gordan certificate.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from math import factorial
from typing import Sequence

from . import linalg
from .errors import (
    CapExceeded,
    NoDistinctOccupancies,
    NotRepresentable,
    NoUnhackableNonEquivalent,
    SetMismatch,
)
from .mdp import RewardTable
from .ordering import (
    DEFAULT_COARSENING_CAP,
    DEFAULT_FUBINI_CAP,
    PolicyOrdering,
    PolicySet,
    check_hackable,
    enumerate_coarsenings,
    enumerate_strict_orders,
    enumerate_weak_orders,
    fubini,
    is_equivalent,
    is_trivial,
    ordering_from_reward,
    reverse,
)
from .simplex import DEFAULT_MAX_ITER, OPTIMAL, linprog_exact

REPRESENTABLE = "representable"
NOT_REPRESENTABLE = "not_representable"

ONE = Fraction(1)


@dataclass(frozen=True)
class Certificate:
    """sum(lambdas[i] * strict[i]) == sum(mus[j] * equal[j]), lambdas >= 0 and not all zero."""

    strict_vectors: tuple[tuple[Fraction, ...], ...]
    equality_vectors: tuple[tuple[Fraction, ...], ...]
    lambdas: tuple[Fraction, ...]
    mus: tuple[Fraction, ...]

    def is_valid(self) -> bool:
        if any(v < 0 for v in self.lambdas) or not any(self.lambdas):
            return False
        width = len(self.strict_vectors[0])
        lhs = [Fraction(0)] * width
        for lam, d in zip(self.lambdas, self.strict_vectors):
            lhs = [x + lam * y for x, y in zip(lhs, d)]
        rhs = [Fraction(0)] * width
        for mu, e in zip(self.mus, self.equality_vectors):
            rhs = [x + mu * y for x, y in zip(rhs, e)]
        return lhs == rhs


@dataclass(frozen=True)
class RepresentabilityResult:
    verdict: str
    witness: RewardTable | None = None
    certificate: Certificate | None = None
    margin: Fraction | None = None

    @property
    def representable(self) -> bool:
        return self.verdict == REPRESENTABLE


@dataclass(frozen=True)
class SimplificationExistence:
    """Rank test for a non-trivial simplification.

    ``dim_F`` is the affine dimension of the occupancy set (the rank of the
    differences to one member). ``rank_F`` is the plain linear rank, reported
    for reference; it always equals ``dim_F + 1`` because visit counts sum to
    ``1/(1-gamma)`` and so never span the origin.
    """

    exists: bool
    dim_Z: int
    dim_F: int
    rank_F: int
    partition_sizes: tuple[int, ...]


def constraint_vectors(pset: PolicySet, ordering: PolicyOrdering, vectors=None):
    """Strict (consecutive-class) and equality (within-class) difference vectors."""
    if vectors is None:
        vectors = [f.counts for f in pset.occupancies]
    reps = [c[0] for c in ordering.classes]
    strict = [linalg.sub(vectors[b], vectors[a]) for a, b in zip(reps, reps[1:])]
    equal = [linalg.sub(vectors[i], vectors[c[0]]) for c in ordering.classes for i in c[1:]]
    return strict, equal


def _solve_margin_lp(strict, equal, width, max_iter):
    """max t over u = R + 1 in [0, 2]^width, t >= 0."""
    ones = [ONE] * width
    A_ub, b_ub = [], []
    for d in strict:
        A_ub.append([-x for x in d] + [ONE])
        b_ub.append(-linalg.dot(d, ones))
    for k in range(width):
        row = [Fraction(0)] * (width + 1)
        row[k] = ONE
        A_ub.append(row)
        b_ub.append(Fraction(2))
    A_eq = [list(e) + [Fraction(0)] for e in equal]
    b_eq = [linalg.dot(e, ones) for e in equal]
    c = [Fraction(0)] * width + [ONE]
    return linprog_exact(c, A_ub, b_ub, A_eq, b_eq, max_iter=max_iter)


def check_representable(
    pset: PolicySet,
    ordering: PolicyOrdering,
    reduced: bool = True,
    max_iter: int = DEFAULT_MAX_ITER,
    cache: dict | None = None,
) -> RepresentabilityResult:
    """Decide whether some reward realizes ``ordering`` exactly on ``pset``.

    With ``reduced`` (the default) the LP runs in coordinates of the span of
    occupancy differences rather than over the full |S||A| reward vector;
    the verdict is the same, the program is smaller. The witness is mapped
    back to a full reward table either way.
    """
    if ordering.n != len(pset):
        raise SetMismatch(f"ordering over {ordering.n} policies, set has {len(pset)}")
    if cache is not None and ordering in cache:
        return cache[ordering]
    result = _check(pset, ordering, reduced, max_iter)
    if cache is not None:
        cache[ordering] = result
    return result


def _check(pset, ordering, reduced, max_iter):
    if is_trivial(ordering):
        return RepresentabilityResult(REPRESENTABLE, witness=RewardTable.zeros(pset.dim), margin=Fraction(0))

    full_strict, full_equal = constraint_vectors(pset, ordering)
    if reduced:
        basis, coords = pset.difference_coordinates
        strict, equal = constraint_vectors(pset, ordering, coords)
        width = len(basis)
    else:
        strict, equal = full_strict, full_equal
        width = pset.dim

    if any(linalg.is_zero(d) for d in strict) or width == 0:
        # a zero strict vector is its own certificate
        k = next(i for i, d in enumerate(strict) if linalg.is_zero(d)) if width else 0
        lambdas = tuple(ONE if i == k else Fraction(0) for i in range(len(strict)))
        cert = Certificate(tuple(full_strict), tuple(full_equal), lambdas, (Fraction(0),) * len(full_equal))
        if not cert.is_valid():
            cert = _lp_certificate(full_strict, full_equal, pset.dim, max_iter)
        return RepresentabilityResult(NOT_REPRESENTABLE, certificate=cert, margin=Fraction(0))

    res = _solve_margin_lp(strict, equal, width, max_iter)
    assert res.status == OPTIMAL, res.status  # R = 0, t = 0 is always feasible and t is bounded
    margin = res.objective
    if margin > 0:
        point = [u - 1 for u in res.x[:width]]
        if reduced:
            witness = _reward_from_coordinates(basis, point)
        else:
            witness = RewardTable(tuple(point))
        return RepresentabilityResult(REPRESENTABLE, witness=witness, margin=margin)

    n_strict = len(strict)
    cert = Certificate(tuple(full_strict), tuple(full_equal), res.y_ub[:n_strict], res.y_eq)
    if not cert.is_valid():  # pragma: no cover - would indicate a simplex bug
        raise AssertionError("dual multipliers do not form an infeasibility certificate")
    return RepresentabilityResult(NOT_REPRESENTABLE, certificate=cert, margin=margin)


def _lp_certificate(strict, equal, width, max_iter):
    res = _solve_margin_lp(strict, equal, width, max_iter)
    return Certificate(tuple(strict), tuple(equal), res.y_ub[: len(strict)], res.y_eq)


def _reward_from_coordinates(basis, point) -> RewardTable:
    """Any R with <R, basis[i]> == point[i]: R = sum_j w_j basis[j], Gram @ w = point."""
    gram = [[linalg.dot(a, b) for b in basis] for a in basis]
    w = linalg.solve(gram, point)
    width = len(basis[0])
    values = [Fraction(0)] * width
    for wj, b in zip(w, basis):
        if wj:
            values = [x + wj * y for x, y in zip(values, b)]
    return RewardTable(tuple(values))


def rank_of_vectors(vecs: Sequence[Sequence[Fraction]]) -> int:
    return linalg.rank([list(v) for v in vecs])


def simplification_exists(
    pset: PolicySet,
    ordering: PolicyOrdering,
    representatives: Sequence[int] | None = None,
    verify: bool = False,
) -> SimplificationExistence:
    """Rank test: a non-trivial simplification exists iff dim(Z) <= dim(F) - 2.

    ``representatives`` picks the member of each class that gets subtracted;
    by default the lowest index. ``verify`` first checks that the ordering is
    representable and raises ``NotRepresentable`` otherwise.
    """
    if ordering.n != len(pset):
        raise SetMismatch(f"ordering over {ordering.n} policies, set has {len(pset)}")
    if verify and not check_representable(pset, ordering).representable:
        raise NotRepresentable(ordering.label(pset.names))
    F = [f.counts for f in pset.occupancies]
    if representatives is None:
        representatives = [c[0] for c in ordering.classes]
    Z = []
    for c, rep in zip(ordering.classes, representatives):
        if rep not in c:
            raise ValueError(f"representative {rep} is not in class {c}")
        Z.extend(linalg.sub(F[i], F[rep]) for i in c)
    dim_Z = rank_of_vectors(Z)
    rank_F = rank_of_vectors(F)
    dim_F = rank_of_vectors([linalg.sub(f, F[0]) for f in F])
    return SimplificationExistence(
        exists=dim_Z <= dim_F - 2,
        dim_Z=dim_Z,
        dim_F=dim_F,
        rank_F=rank_F,
        partition_sizes=tuple(len(c) for c in ordering.classes),
    )


def _check_chunk(args):
    pset, orderings, reduced = args
    return [check_representable(pset, o, reduced=reduced) for o in orderings]


def enumerate_representable_orderings(
    pset: PolicySet,
    strict_only: bool = False,
    cap: int = DEFAULT_FUBINI_CAP,
    jobs: int = 1,
    cache: dict | None = None,
) -> list[tuple[PolicyOrdering, RewardTable]]:
    """Every representable (weak or strict) ordering with one witness each.

    Output order follows the candidate enumeration and is independent of ``jobs``.
    """
    n = len(pset)
    total = factorial(n) if strict_only else fubini(n)
    if total > cap:
        raise CapExceeded(f"{total} candidate orderings exceed cap {cap}")
    gen = enumerate_strict_orders(n, cap) if strict_only else enumerate_weak_orders(n, cap)
    candidates = list(gen)
    if jobs > 1 and len(candidates) > 64:
        size = -(-len(candidates) // (jobs * 4))
        chunks = [candidates[i : i + size] for i in range(0, len(candidates), size)]
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = [r for part in pool.map(_check_chunk, [(pset, c, True) for c in chunks]) for r in part]
        if cache is not None:
            cache.update(zip(candidates, results))
    else:
        results = [check_representable(pset, o, cache=cache) for o in candidates]
    return [(o, r.witness) for o, r in zip(candidates, results) if r.representable]


def find_representable_simplifications(
    pset: PolicySet,
    ordering: PolicyOrdering,
    include_trivial: bool = False,
    cap: int = DEFAULT_COARSENING_CAP,
    cache: dict | None = None,
) -> list[tuple[PolicyOrdering, RewardTable]]:
    """Representable proper coarsenings of ``ordering``.

    The all-equal coarsening is always representable by the zero reward, so
    it is left out unless ``include_trivial``; the remaining list is non-empty
    exactly when ``simplification_exists`` says so.
    """
    if ordering.n != len(pset):
        raise SetMismatch(f"ordering over {ordering.n} policies, set has {len(pset)}")
    out = []
    for cand in enumerate_coarsenings(ordering, cap):
        if is_trivial(cand) and not include_trivial:
            continue
        res = check_representable(pset, cand, cache=cache)
        if res.representable:
            out.append((cand, res.witness))
    return out


def reward_negation_duality(ordering: PolicyOrdering) -> PolicyOrdering:
    """The ordering induced by -R when ``ordering`` is induced by R."""
    return reverse(ordering)


def find_unhackable_noneq(
    pset: PolicySet,
    r1: RewardTable,
    cap: int = DEFAULT_FUBINI_CAP,
    cache: dict | None = None,
) -> tuple[RewardTable, PolicyOrdering]:
    """A non-trivial reward that is unhackable with ``r1`` yet not equivalent to it.

    Tries, in order: any non-trivial reward (if r1 is trivial); a representable
    non-trivial coarsening of r1's ordering; a small perturbation of r1 that
    splits a tie between policies with different visit counts; finally every
    representable weak order. The last step only matters for collinear
    occupancy sets, where no such reward exists and
    ``NoUnhackableNonEquivalent`` is raised.
    """
    if pset.distinct_occupancies() < 2:
        raise NoDistinctOccupancies("every policy in the set has the same visit counts")
    o1 = ordering_from_reward(r1, pset)
    F = [f.counts for f in pset.occupancies]

    candidate = None
    if is_trivial(o1):
        i, j = _distinct_pair(F, range(len(F)))
        candidate = RewardTable(linalg.sub(F[j], F[i]))
    if candidate is None:
        found = find_representable_simplifications(pset, o1, cache=cache)
        if found:
            candidate = found[0][1]
    if candidate is None:
        candidate = _split_tie(pset, r1, o1)
    if candidate is None:
        if fubini(len(pset)) > cap:
            raise CapExceeded(f"exhaustive fallback over Fubini({len(pset)}) orderings exceeds cap {cap}")
        for o2, witness in enumerate_representable_orderings(pset, cap=cap, cache=cache):
            if not is_trivial(o2) and not is_equivalent(o1, o2) and check_hackable(o1, o2) is None:
                candidate = witness
                break
    if candidate is None:
        raise NoUnhackableNonEquivalent(
            f"no representable ordering is unhackable with and non-equivalent to {o1.label(pset.names)}"
        )

    o2 = ordering_from_reward(candidate, pset)
    assert not is_trivial(o2) and not is_equivalent(o1, o2) and check_hackable(o1, o2) is None
    return candidate, o2


def _distinct_pair(F, indices):
    indices = list(indices)
    for a in indices:
        for b in indices:
            if F[a] != F[b]:
                return a, b
    return None


def _split_tie(pset, r1, o1):
    """R1 + eps * (F(b) - F(a)) for a tied pair a, b with F(a) != F(b)."""
    F = [f.counts for f in pset.occupancies]
    pair = None
    for c in o1.classes:
        pair = _distinct_pair(F, c)
        if pair:
            break
    if pair is None:
        return None
    a, b = pair
    direction = linalg.sub(F[b], F[a])
    shift = [linalg.dot(direction, f) for f in F]
    spread = max(abs(v) for v in shift)
    values = o1.values
    gap = min(values[c2[0]] - values[c1[0]] for c1, c2 in zip(o1.classes, o1.classes[1:]))
    eps = gap / (4 * spread)
    return RewardTable(linalg.add(r1.values, linalg.scale(eps, direction)))
