"""The allocation mechanisms: PE, RPE, M^X, and the randomized held-out
mechanism for ε-leveled demand reports.

PE (prioritized egalitarian): sanitize reports (anything that is not a
valid matroid rank function is replaced by the identically-zero one), then
return the non-redundant Lorenz-dominating allocation for the priority
order, via the potential-minimizing solver.  Truthful for matroid-rank
valuations; the harness re-verifies this exhaustively at desk scale.

RPE: PE under a uniformly random priority order.  Exact mode enumerates
all n! orders as an outcome distribution; sampled mode draws one order
from a seeded PRNG.

M^X: one or two held-out items are granted sequentially to their
highest-priority demanders, the first winner dropping to lowest priority
before the second item is placed.

Held-out randomized mechanism: report demand sets only; hold out a random
ordered list X of one or two items (every ordered outcome has probability
exactly 1/m^2; re-derived and asserted below); run PE on the remaining
items under a random order sigma and M^X on X under reverse(sigma).
Requires eps < 1/(n*m^3), which makes the guaranteed held-out gain of a
truthful report outweigh any eps-scale composition gains from lying.
"""

from __future__ import annotations

import math
import random
from fractions import Fraction
from itertools import permutations
from typing import Sequence

from .errors import CapabilityError, ValidationError
from .lorenz import additive_balanced, compute_lorenz_dominating, zero_report
from .matroid import FreeOver, ItemSet, MatroidSpec, validate_matroid
from .model import (
    Allocation,
    Atom,
    OutcomeDistribution,
    PriorityOrder,
    check_priority,
)
from .valuation import (
    AdditiveDichotomous,
    EpsLeveled,
    MatroidValuation,
    ValuationSpec,
    evaluate,
)

RPE_EXACT_MAX_AGENTS = 6


def sanitize_reports(
    reports: Sequence[ValuationSpec | MatroidSpec], m: int
) -> tuple[list[MatroidSpec], list[bool]]:
    """Map each report to a matroid rank function, or to the zero MRF.

    Returns (matroids, replaced) where replaced[v] marks reports that were
    illegal for PE (not a matroid / not a dichotomous-submodular class) and
    were substituted by the identically-zero valuation.
    """
    matroids: list[MatroidSpec] = []
    replaced: list[bool] = []
    for rep in reports:
        if isinstance(rep, AdditiveDichotomous):
            matroids.append(FreeOver(rep.demand))
            replaced.append(False)
        elif isinstance(rep, MatroidValuation):
            rep = rep.matroid
            ok = validate_matroid(rep).valid
            matroids.append(rep if ok else zero_report())
            replaced.append(not ok)
        elif isinstance(rep, MatroidSpec):
            ok = validate_matroid(rep).valid
            matroids.append(rep if ok else zero_report())
            replaced.append(not ok)
        elif isinstance(rep, frozenset) or isinstance(rep, set):
            matroids.append(FreeOver(frozenset(rep)))
            replaced.append(False)
        else:
            matroids.append(zero_report())
            replaced.append(True)
    for spec in matroids:
        bad = [a for a in spec.support() if a >= m]
        if bad:
            raise ValidationError(f"report mentions items outside the universe: {sorted(bad)}")
    return matroids, replaced


def run_pe(
    reports: Sequence[ValuationSpec | MatroidSpec],
    m: int,
    sigma: PriorityOrder | None = None,
) -> Allocation:
    """Prioritized egalitarian mechanism on the given reports."""
    matroids, _ = sanitize_reports(reports, m)
    if all(isinstance(spec, FreeOver) for spec in matroids):
        return additive_balanced([spec.demand for spec in matroids], m, sigma)
    return compute_lorenz_dominating(matroids, m, sigma)


def run_rpe(
    reports: Sequence[ValuationSpec | MatroidSpec],
    m: int,
    mode: str = "exact",
    seed: int | None = None,
    max_agents: int = RPE_EXACT_MAX_AGENTS,
) -> OutcomeDistribution | Allocation:
    """PE under uniformly random priorities.

    Exact mode returns all n! atoms of weight 1/n!; sampled mode runs a
    single draw from `random.Random(seed)`.
    """
    n = len(reports)
    if mode == "exact":
        if n > max_agents:
            raise CapabilityError(
                f"exact mode enumerates n! priority orders; n={n} exceeds cap {max_agents}"
            )
        weight = Fraction(1, math.factorial(n))
        atoms = []
        for sigma in permutations(range(n)):
            alloc = run_pe(reports, m, sigma)
            atoms.append(Atom(weight=weight, allocation=alloc, priority=sigma))
        return OutcomeDistribution(tuple(atoms))
    if mode == "sampled":
        return sample_rpe(reports, m, seed)[0]
    raise ValidationError(f"unknown mode {mode!r}; expected 'exact' or 'sampled'")


def sample_rpe(
    reports: Sequence[ValuationSpec | MatroidSpec], m: int, seed: int | None = None
) -> tuple[Allocation, PriorityOrder]:
    """One seeded draw of the random-priority mechanism, with its trace."""
    rng = random.Random(seed)
    sigma = list(range(len(reports)))
    rng.shuffle(sigma)
    sigma = tuple(sigma)
    return run_pe(reports, m, sigma), sigma


def run_mx(
    held_out: Sequence[int],
    sigma: PriorityOrder,
    reports_on_x: Sequence[ItemSet],
    m: int,
) -> Allocation:
    """Sequential held-out allocation with priority demotion.

    The first item goes to its highest-priority demander (if any), who then
    drops to lowest priority; the second item (if present) goes to its
    highest-priority demander under the updated order.  Items demanded by
    nobody stay unallocated.
    """
    held_out = tuple(held_out)
    if len(held_out) not in (1, 2) or len(set(held_out)) != len(held_out):
        raise ValidationError("held-out list must hold 1 or 2 distinct items")
    n = len(reports_on_x)
    sigma = check_priority(sigma, n)
    xset = frozenset(held_out)
    reports = [frozenset(r) for r in reports_on_x]
    for r in reports:
        if not r <= xset:
            raise ValidationError("held-out reports must be subsets of the held-out list")

    bundles: list[set[int]] = [set() for _ in range(n)]
    order = list(sigma)
    first = held_out[0]
    for agent in order:
        if first in reports[agent]:
            bundles[agent].add(first)
            order.remove(agent)
            order.append(agent)
            break
    if len(held_out) > 1:
        second = held_out[1]
        for agent in order:
            if second in reports[agent]:
                bundles[agent].add(second)
                break
    return Allocation(tuple(frozenset(b) for b in bundles), m, non_redundant=True)


def held_out_outcomes(m: int) -> list[tuple[tuple[int, ...], Fraction]]:
    """All ordered held-out outcomes with their exact probabilities.

    Drawing x uniformly, then keeping |X| = 1 with probability 1/m and
    otherwise drawing y ≠ x uniformly gives
        P[(x,)]  = 1/m * 1/m           = 1/m^2,
        P[(x,y)] = 1/m * (m-1)/m * 1/(m-1) = 1/m^2,
    so all m^2 ordered outcomes are equally likely.  Asserted here because
    exact mode relies on it.
    """
    if m < 1:
        raise ValidationError("at least one item required")
    single_keep = Fraction(1, m)
    outcomes: list[tuple[tuple[int, ...], Fraction]] = []
    for x in range(m):
        outcomes.append(((x,), Fraction(1, m) * single_keep))
        for y in range(m):
            if y != x:
                outcomes.append(
                    ((x, y), Fraction(1, m) * (1 - single_keep) * Fraction(1, m - 1))
                )
    uniform = Fraction(1, m * m)
    assert all(w == uniform for _, w in outcomes)
    assert sum(w for _, w in outcomes) == 1
    assert len(outcomes) == m * m
    return outcomes


def _check_meps_inputs(demands, n, m, eps):
    eps = Fraction(eps)
    if m < 1:
        raise ValidationError("at least one item required")
    if eps >= Fraction(1, n * m**3):
        raise ValidationError(
            f"eps must be below 1/(n*m^3) = 1/{n * m**3}; got {eps}"
        )
    clean = []
    for d in demands:
        d = frozenset(d)
        bad = [a for a in d if not (0 <= a < m)]
        if bad:
            raise ValidationError(f"demand report outside the item universe: {sorted(bad)}")
        clean.append(d)
    return clean, eps


def _meps_realization(
    demands: Sequence[ItemSet], m: int, held_out: tuple[int, ...], sigma: PriorityOrder
) -> Allocation:
    """One realization: PE on demands∖X under sigma, M^X on X under reverse(sigma)."""
    xset = frozenset(held_out)
    pe_alloc = additive_balanced([d - xset for d in demands], m, sigma)
    mx_alloc = run_mx(held_out, tuple(reversed(sigma)), [d & xset for d in demands], m)
    merged = tuple(b | x for b, x in zip(pe_alloc.bundles, mx_alloc.bundles))
    return Allocation(merged, m, non_redundant=True)


def run_meps(
    demands: Sequence[ItemSet],
    m: int,
    eps,
    mode: str = "exact",
    seed: int | None = None,
) -> OutcomeDistribution | Allocation:
    """Randomized held-out mechanism for ε-leveled demand-set reports.

    Exact mode enumerates all m^2 held-out outcomes times n! priority
    orders (atom weight 1/(m^2 n!)); sampled mode draws (X, sigma) from a
    seeded PRNG in a fixed, documented order: first item, keep-single test,
    optional second item, then the priority shuffle.
    """
    n = len(demands)
    demands, eps = _check_meps_inputs(demands, n, m, eps)

    if mode == "exact":
        atoms = []
        perm_weight = Fraction(1, math.factorial(n))
        for held_out, x_weight in held_out_outcomes(m):
            for sigma in permutations(range(n)):
                alloc = _meps_realization(demands, m, held_out, sigma)
                atoms.append(
                    Atom(
                        weight=x_weight * perm_weight,
                        allocation=alloc,
                        priority=sigma,
                        held_out=held_out,
                    )
                )
        return OutcomeDistribution(tuple(atoms))
    if mode == "sampled":
        return sample_meps(demands, m, eps, seed)[0]
    raise ValidationError(f"unknown mode {mode!r}; expected 'exact' or 'sampled'")


def sample_meps(
    demands: Sequence[ItemSet], m: int, eps, seed: int | None = None
) -> tuple[Allocation, tuple[int, ...], PriorityOrder]:
    """One seeded draw of the held-out mechanism, with its (X, sigma) trace.

    Draw order is fixed: first item, keep-single test, optional second
    item, then the priority shuffle; identical seeds give identical traces.
    """
    n = len(demands)
    demands, eps = _check_meps_inputs(demands, n, m, eps)
    rng = random.Random(seed)
    x = rng.randrange(m)
    if rng.randrange(m) > 0:  # probability (m-1)/m; never fires at m = 1
        y = rng.randrange(m - 1)
        if y >= x:
            y += 1
        held_out: tuple[int, ...] = (x, y)
    else:
        held_out = (x,)
    order = list(range(n))
    rng.shuffle(order)
    sigma = tuple(order)
    return _meps_realization(demands, m, held_out, sigma), held_out, sigma


def expected_utilities(
    dist: OutcomeDistribution, valuations: Sequence[ValuationSpec]
) -> tuple[Fraction, ...]:
    """Exact per-agent expectation of the true valuations over the atoms."""
    n = len(valuations)
    totals = [Fraction(0)] * n
    for atom in dist.atoms:
        for v in range(n):
            totals[v] += atom.weight * evaluate(
                valuations[v], atom.allocation.bundles[v], atom.allocation.m
            )
    return tuple(totals)


def floor_reports(instance_valuations: Sequence[ValuationSpec]) -> list[ValuationSpec]:
    """Demand-set (floored) reports corresponding to truthful agents."""
    out: list[ValuationSpec] = []
    for spec in instance_valuations:
        if isinstance(spec, EpsLeveled):
            out.append(AdditiveDichotomous(spec.demand()))
        else:
            out.append(spec)
    return out
