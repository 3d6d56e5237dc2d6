"""Lorenz-dominating allocations with priority tie-breaking.

Priorities enter only through an integer potential over bundle-size
profiles,

    pi(A) = sum_i (n*|A_i| + rank(i))^2     (rank 1 = highest priority),

whose welfare-constrained minimum characterizes the Lorenz-dominating
allocation with ties broken toward higher-priority agents.  The module
provides four routes to it:

  * `compute_lorenz_dominating`: matroid-intersection path; starts from a
    maximum common independent set and repeatedly adopts a feasible
    one-item transfer (agent i gains, agent k loses) that lowers the
    potential, checked via capped intersection re-solves;
  * `additive_balanced`: fast path for additive demand-set reports via
    strong/weak transfers along a reachability graph;
  * `greedy_welfare`: prefix-greedy oracle for the welfare function
    (each agent in priority order gets the most items preservable);
  * `enumerate_optimal`: exhaustive oracle over all non-redundant
    allocations for desk-scale instances.

All four are pure functions of immutable inputs.  Whenever feasible
one-item transfers exist between a welfare-maximal allocation and a
lower-potential one, the local search cannot stall, so the loop in
`compute_lorenz_dominating` terminates at the global minimum-potential
profile; the enumeration oracle re-verifies this on every desk-scale test.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Sequence

from .errors import CapabilityError, ValidationError
from .intersection import max_common_independent
from .matroid import FreeOver, ItemSet, MatroidSpec
from .model import Allocation, Instance, PriorityOrder, check_priority, identity_priority
from .valuation import evaluate

ENUMERATION_MAX_AGENTS = 4
ENUMERATION_MAX_ITEMS = 6


def potential(profile: Sequence[int], sigma: PriorityOrder) -> int:
    """pi = sum over agents of (n*bundle_size + priority_rank)^2, exact."""
    n = len(profile)
    sigma = check_priority(sigma, n)
    if any(s < 0 for s in profile):
        raise ValidationError("profile sizes must be >= 0")
    total = 0
    for rank0, agent in enumerate(sigma):
        total += (n * profile[agent] + rank0 + 1) ** 2
    return total


class LorenzRelation(enum.Enum):
    DOMINATES = "dominates"
    DOMINATED = "dominated"
    EQUAL = "equal"
    INCOMPARABLE = "incomparable"


def lorenz_compare(u: Sequence[Fraction], v: Sequence[Fraction]) -> LorenzRelation:
    """Prefix-sum comparison of two ascending-sorted utility vectors."""
    if len(u) != len(v):
        raise ValidationError("sorted utility vectors must have equal length")
    ge = le = True
    pu = pv = Fraction(0)
    for a, b in zip(u, v):
        pu += a
        pv += b
        if pu < pv:
            ge = False
        if pu > pv:
            le = False
    if ge and le:
        return LorenzRelation.EQUAL
    if ge:
        return LorenzRelation.DOMINATES
    if le:
        return LorenzRelation.DOMINATED
    return LorenzRelation.INCOMPARABLE


def _permute_to_rank_order(reports, sigma):
    """Reports sorted by priority (rank order), plus the inverse mapping."""
    ordered = [reports[agent] for agent in sigma]
    return ordered


def _unpermute(bundles_by_rank, sigma, m, n):
    bundles = [frozenset()] * n
    for rank0, agent in enumerate(sigma):
        bundles[agent] = bundles_by_rank[rank0]
    return Allocation(tuple(bundles), m, non_redundant=True)


def compute_lorenz_dominating(
    reports: Sequence[MatroidSpec], m: int, sigma: PriorityOrder | None = None
) -> Allocation:
    """The welfare-maximizing non-redundant allocation of minimum potential.

    Stage 1 solves the unconstrained intersection for maximum welfare.
    Stage 2 scans ordered agent pairs (i gains one item, k loses one) whose
    target profile lowers the potential, re-solving the capped intersection
    to test feasibility; among feasible candidates the one with the
    smallest resulting potential is adopted (ties by priority-rank pair).
    The loop stops when no candidate is feasible; the potential is a
    positive integer and strictly decreases, so at most O(m^2 n^2) rounds
    occur.
    """
    n = len(reports)
    sigma = identity_priority(n) if sigma is None else check_priority(sigma, n)
    ordered = _permute_to_rank_order(reports, sigma)
    bundles = _lorenz_rank_ordered(ordered, m)
    return _unpermute(bundles, sigma, m, n)


def _lorenz_rank_ordered(matroids: Sequence[MatroidSpec], m: int) -> list[ItemSet]:
    """Minimum-potential welfare-max bundles for agents already in rank order."""
    n = len(matroids)
    identity = identity_priority(n)
    alloc = max_common_independent(matroids, m)
    bundles = list(alloc.bundles)
    profile = [len(b) for b in bundles]
    current_pot = potential(profile, identity)

    max_rounds = (n * (m + 2)) ** 2 + 1
    for _ in range(max_rounds):
        candidates = []
        for i in range(n):
            for k in range(n):
                if i == k or profile[k] == 0:
                    continue
                delta = (
                    (n * (profile[i] + 1) + i + 1) ** 2
                    - (n * profile[i] + i + 1) ** 2
                    + (n * (profile[k] - 1) + k + 1) ** 2
                    - (n * profile[k] + k + 1) ** 2
                )
                if delta < 0:
                    candidates.append((current_pot + delta, i, k))
        candidates.sort()
        adopted = False
        for new_pot, i, k in candidates:
            targets = list(profile)
            targets[i] += 1
            targets[k] -= 1
            attempt = max_common_independent(matroids, m, caps=targets)
            if attempt.total_items() == sum(targets):
                bundles = list(attempt.bundles)
                profile = targets
                current_pot = new_pot
                adopted = True
                break
        if not adopted:
            return bundles
    raise AssertionError("potential descent failed to terminate")  # pragma: no cover


def greedy_welfare(
    reports: Sequence[MatroidSpec], m: int, sigma: PriorityOrder | None = None
) -> Allocation:
    """Prefix-greedy allocation: each agent in priority order gets the most
    items compatible with preserving all earlier agents' counts.

    The resulting prefix sums equal the maximum welfare attainable by each
    priority prefix, making this an independent oracle for the welfare
    function over agent sets.
    """
    n = len(reports)
    sigma = identity_priority(n) if sigma is None else check_priority(sigma, n)
    ordered = _permute_to_rank_order(reports, sigma)
    universe = frozenset(range(m))

    targets: list[int] = []
    for j in range(n):
        hi = min(m, ordered[j].rank(universe))
        lo = 0
        # feasibility is monotone in the target (drop an item), so bisect
        while lo < hi:
            mid = (lo + hi + 1) // 2
            caps = targets + [mid] + [0] * (n - j - 1)
            got = max_common_independent(ordered, m, caps=caps)
            if got.total_items() == sum(caps):
                lo = mid
            else:
                hi = mid - 1
        targets.append(lo)

    final = max_common_independent(ordered, m, caps=targets)
    assert final.total_items() == sum(targets)
    return _unpermute(list(final.bundles), sigma, m, n)


def additive_balanced(
    demands: Sequence[ItemSet], m: int, sigma: PriorityOrder | None = None
) -> Allocation:
    """Fast path for additive demand-set reports.

    Starts from any reasonable welfare-maximizing allocation (every
    demanded item to its highest-priority demander) and applies transfers
    along the reachability graph (edge u→v when u holds an item v demands)
    until neither kind applies:

      * strong transfer: the loser holds at least two items more than the
        gainer;
      * weak transfer: exactly one more, but the loser has lower priority.

    Both lower the potential, so the loop terminates; the final profile is
    the minimum-potential welfare-maximizing one, matching
    `compute_lorenz_dominating` on the same reports.
    """
    n = len(demands)
    sigma = identity_priority(n) if sigma is None else check_priority(sigma, n)
    demands = [frozenset(d) for d in demands]
    for d in demands:
        if not all(0 <= a < m for a in d):
            raise ValidationError("demand outside item universe")
    ordered = [demands[agent] for agent in sigma]

    bundles: list[set[int]] = [set() for _ in range(n)]
    for item in range(m):
        for rank0 in range(n):
            if item in ordered[rank0]:
                bundles[rank0].add(item)
                break

    guard = (n * (m + 2)) ** 2 + 1
    for _ in range(guard):
        transfer = _best_transfer(bundles, ordered, n)
        if transfer is None:
            out = [frozenset(b) for b in bundles]
            return _unpermute(out, sigma, m, n)
        path = transfer
        # move each edge's item simultaneously; labels come from distinct
        # bundles so sequential application is safe
        for (u, v, item) in path:
            bundles[u].discard(item)
            bundles[v].add(item)
    raise AssertionError("transfer descent failed to terminate")  # pragma: no cover


def _best_transfer(bundles, demands, n):
    """Smallest-potential strong/weak transfer as a list of (u, v, item) moves."""
    sizes = [len(b) for b in bundles]
    # reachability via BFS from each potential loser
    reach_paths: dict[int, dict[int, list[tuple[int, int, int]]]] = {}
    for s in range(n):
        paths: dict[int, list[tuple[int, int, int]]] = {s: []}
        frontier = [s]
        while frontier:
            nxt = []
            for u in frontier:
                for v in range(n):
                    if v in paths or v == u:
                        continue
                    common = bundles[u] & demands[v]
                    if common:
                        paths[v] = paths[u] + [(u, v, min(common))]
                        nxt.append(v)
            frontier = nxt
        reach_paths[s] = paths

    candidates = []
    for s in range(n):
        for t, path in reach_paths[s].items():
            if t == s:
                continue
            strong = sizes[s] >= sizes[t] + 2
            weak = sizes[s] == sizes[t] + 1 and s > t  # s has lower priority
            if not (strong or weak):
                continue
            delta = (
                (n * (sizes[t] + 1) + t + 1) ** 2
                - (n * sizes[t] + t + 1) ** 2
                + (n * (sizes[s] - 1) + s + 1) ** 2
                - (n * sizes[s] + s + 1) ** 2
            )
            candidates.append((delta, t, s, path))
    if not candidates:
        return None
    candidates.sort(key=lambda c: (c[0], c[1], c[2]))
    return candidates[0][3]


@dataclass(frozen=True)
class EnumerationResult:
    """Exhaustive scan of the non-redundant allocations of an instance."""

    allocations: tuple[Allocation, ...]
    vectors: tuple[tuple[Fraction, ...], ...]
    max_welfare: Fraction
    pareto: tuple[int, ...]
    lorenz_dominating: tuple[int, ...]
    min_potential: tuple[int, ...]
    min_potential_value: int | None

    def lorenz_vectors(self) -> tuple[tuple[Fraction, ...], ...]:
        return tuple(self.vectors[i] for i in self.lorenz_dominating)

    def min_potential_vectors(self) -> set[tuple[Fraction, ...]]:
        return {self.vectors[i] for i in self.min_potential}


def enumerate_optimal(
    instance: Instance,
    sigma: PriorityOrder | None = None,
    max_agents: int = ENUMERATION_MAX_AGENTS,
    max_items: int = ENUMERATION_MAX_ITEMS,
) -> EnumerationResult:
    """Enumerate every non-redundant allocation and its utility vector.

    Returns the Pareto set, the Lorenz-dominating set (possibly empty), and
    the minimum-potential set among welfare-maximizing allocations.  An
    allocation is Lorenz dominating iff its prefix-sum vector equals the
    pointwise maximum over all allocations.
    """
    n, m = instance.n, instance.m
    if n > max_agents or m > max_items:
        raise CapabilityError(
            f"enumeration cap exceeded: n={n} (max {max_agents}), m={m} (max {max_items})"
        )
    sigma = instance.priority_or_default() if sigma is None else check_priority(sigma, n)

    value_tables = []
    nonred_tables = []
    for spec in instance.valuations:
        vals = [Fraction(0)] * (1 << m)
        for mask in range(1 << m):
            vals[mask] = evaluate(spec, _mask_to_set(mask), m)
        nonred = [True] * (1 << m)
        for mask in range(1 << m):
            v = vals[mask]
            rest = mask
            ok = True
            while rest:
                bit = rest & -rest
                if vals[mask ^ bit] >= v:
                    ok = False
                    break
                rest ^= bit
            nonred[mask] = ok
        value_tables.append(vals)
        nonred_tables.append(nonred)

    allocations: list[Allocation] = []
    vectors: list[tuple[Fraction, ...]] = []
    profiles: list[tuple[int, ...]] = []
    for assignment in product(range(n + 1), repeat=m):
        masks = [0] * n
        for item, owner in enumerate(assignment):
            if owner < n:
                masks[owner] |= 1 << item
        if not all(nonred_tables[v][masks[v]] for v in range(n)):
            continue
        bundles = tuple(_mask_to_set(masks[v]) for v in range(n))
        vec = tuple(value_tables[v][masks[v]] for v in range(n))
        allocations.append(Allocation(bundles, m, non_redundant=True))
        vectors.append(vec)
        profiles.append(tuple(len(b) for b in bundles))

    welfares = [sum(vec) for vec in vectors]
    max_welfare = max(welfares)

    prefix_vectors = [_prefix_sums(sorted(vec)) for vec in vectors]
    best_prefix = tuple(
        max(pv[k] for pv in prefix_vectors) for k in range(n)
    )
    lorenz_idx = tuple(
        i for i, pv in enumerate(prefix_vectors) if tuple(pv) == best_prefix
    )

    welfare_max_idx = [i for i, w in enumerate(welfares) if w == max_welfare]
    pots = {i: potential(profiles[i], sigma) for i in welfare_max_idx}
    min_pot = min(pots.values()) if pots else None
    min_pot_idx = tuple(i for i in welfare_max_idx if pots[i] == min_pot)

    pareto_idx = _pareto_filter(vectors)

    return EnumerationResult(
        allocations=tuple(allocations),
        vectors=tuple(vectors),
        max_welfare=max_welfare,
        pareto=pareto_idx,
        lorenz_dominating=lorenz_idx,
        min_potential=min_pot_idx,
        min_potential_value=min_pot,
    )


def _mask_to_set(mask: int) -> ItemSet:
    out = []
    i = 0
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return frozenset(out)


def _prefix_sums(sorted_vec):
    out = []
    acc = Fraction(0)
    for x in sorted_vec:
        acc += x
        out.append(acc)
    return out


def _pareto_filter(vectors) -> tuple[int, ...]:
    """Indices of allocations whose utility vector is Pareto-undominated."""
    distinct: dict[tuple, None] = {}
    for vec in vectors:
        distinct.setdefault(vec)
    frontier: list[tuple] = []
    for vec in distinct:
        dominated = False
        for other in distinct:
            if other == vec:
                continue
            if all(o >= s for o, s in zip(other, vec)) and any(
                o > s for o, s in zip(other, vec)
            ):
                dominated = True
                break
        if not dominated:
            frontier.append(vec)
    frontier_set = set(frontier)
    return tuple(i for i, vec in enumerate(vectors) if vec in frontier_set)


def zero_report() -> MatroidSpec:
    """The identically-zero matroid rank function (replacement for bad reports)."""
    return FreeOver(frozenset())
