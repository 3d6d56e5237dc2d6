"""Fairness and efficiency auditors over concrete allocations and exact
outcome distributions.

Every verdict is computed in exact arithmetic and every failing verdict
carries a checkable witness.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Sequence

from .errors import CapabilityError, PreconditionError, ValidationError
from .lorenz import enumerate_optimal, lorenz_compare, LorenzRelation, potential
from .model import Allocation, Instance, OutcomeDistribution, PriorityOrder
from .valuation import AdditiveDichotomous, ValuationSpec, evaluate, support

MAXIMIN_MAX_ITEMS = 10
MAXIMIN_MAX_AGENTS = 4


@dataclass(frozen=True)
class EnvyWitness:
    envier: int
    envied: int
    item: int | None
    own_value: Fraction
    required: Fraction


@dataclass(frozen=True)
class BoundWitness:
    agent: int
    bound: Fraction
    actual: Fraction


@dataclass(frozen=True)
class TailWitness:
    envier: int
    envied: int
    threshold: Fraction
    own_tail: Fraction
    other_tail: Fraction


@dataclass(frozen=True)
class Verdict:
    holds: bool
    witness: object | None = None

    def __bool__(self) -> bool:
        return self.holds


@dataclass(frozen=True)
class FairnessReport:
    entries: tuple[tuple[str, Verdict], ...]

    def verdict(self, name: str) -> Verdict:
        for key, v in self.entries:
            if key == name:
                return v
        raise KeyError(name)

    def holds(self, name: str) -> bool:
        return self.verdict(name).holds

    @property
    def all_hold(self) -> bool:
        return all(v.holds for _, v in self.entries)


def _alpha_value(alpha) -> Fraction:
    alpha = Fraction(alpha)
    if not (0 < alpha <= 1):
        raise PreconditionError(f"alpha must lie in (0, 1], got {alpha}")
    return alpha


def check_envy(
    allocation: Allocation,
    valuations: Sequence[ValuationSpec],
    mode: str = "EFX",
    alpha=1,
) -> FairnessReport:
    """α-EF / α-EF1 / α-EFX verdict with an envy witness on failure.

    EF:  f_i(A_i) >= α f_i(A_j) for all pairs.
    EF1: some item of A_j can be removed to kill the (α-scaled) envy.
    EFX: every item of A_j can be.
    """
    if mode not in ("EF", "EF1", "EFX"):
        raise ValidationError(f"unknown envy mode {mode!r}")
    alpha = _alpha_value(alpha)
    n = allocation.n
    m = allocation.m
    for i in range(n):
        own = evaluate(valuations[i], allocation.bundles[i], m)
        for j in range(n):
            if i == j:
                continue
            other = allocation.bundles[j]
            if mode == "EF":
                req = alpha * evaluate(valuations[i], other, m)
                if own < req:
                    w = EnvyWitness(i, j, None, own, req)
                    return FairnessReport(((mode, Verdict(False, w)),))
            elif mode == "EF1":
                if not other:
                    continue
                best = min(
                    evaluate(valuations[i], other - {a}, m) for a in sorted(other)
                )
                if own < alpha * best:
                    w = EnvyWitness(i, j, None, own, alpha * best)
                    return FairnessReport(((mode, Verdict(False, w)),))
            else:  # EFX
                for a in sorted(other):
                    req = alpha * evaluate(valuations[i], other - {a}, m)
                    if own < req:
                        w = EnvyWitness(i, j, a, own, req)
                        return FairnessReport(((mode, Verdict(False, w)),))
    return FairnessReport(((mode, Verdict(True)),))


def maximin_share(
    valuation: ValuationSpec,
    n: int,
    m: int,
    max_items: int = MAXIMIN_MAX_ITEMS,
    max_agents: int = MAXIMIN_MAX_AGENTS,
) -> Fraction:
    """Best guaranteed minimum bundle value over own partitions into n parts.

    Additive-dichotomous valuations use the closed form floor(|D| / n);
    everything else is brute-forced over ordered partitions (the first item
    of the universe is pinned to part 0, as parts are exchangeable).
    """
    if n < 1:
        raise PreconditionError("n must be >= 1")
    if isinstance(valuation, AdditiveDichotomous):
        return Fraction(len(valuation.demand) // n)
    if n == 1:
        return evaluate(valuation, frozenset(range(m)), m)
    return _maximin_brute(valuation, n, m, max_items, max_agents)


def _maximin_brute(valuation, n, m, max_items, max_agents) -> Fraction:
    if m > max_items or n > max_agents:
        raise CapabilityError(
            f"maximin brute force capped at m<={max_items}, n<={max_agents}; "
            f"got m={m}, n={n}"
        )
    relevant = sorted(support(valuation) & frozenset(range(m)))
    if not relevant:
        return Fraction(0)
    values = {}
    for mask in range(1 << len(relevant)):
        items = frozenset(relevant[i] for i in range(len(relevant)) if mask >> i & 1)
        values[mask] = evaluate(valuation, items, m)
    best = Fraction(0)
    # part labels are exchangeable: pin the first item to part 0
    for assign in product(range(n), repeat=len(relevant) - 1):
        masks = [0] * n
        masks[0] |= 1
        for i, part in enumerate(assign):
            masks[part] |= 1 << (i + 1)
        worst = min(values[mk] for mk in masks)
        if worst > best:
            best = worst
    return best


@dataclass(frozen=True)
class EfficiencyMetrics:
    welfare: Fraction
    nsw: Fraction
    sum_squares: Fraction
    sorted_vector: tuple[Fraction, ...]
    potential: int


def nsw_key(vector: Sequence[Fraction]) -> tuple[int, Fraction]:
    """Comparison key for Nash social welfare in exact arithmetic.

    Zero factors compare by count first (fewer zeros is better), then by
    the product of the nonzero entries; this matches the lex-min ordering
    whenever plain products tie at zero.
    """
    nonzero = [x for x in vector if x != 0]
    prod = Fraction(1)
    for x in nonzero:
        prod *= x
    return (len(nonzero), prod)


def efficiency_metrics(
    allocation: Allocation,
    valuations: Sequence[ValuationSpec],
    sigma: PriorityOrder,
) -> EfficiencyMetrics:
    utils = allocation.utilities(valuations)
    prod = Fraction(1)
    for u in utils:
        prod *= u
    return EfficiencyMetrics(
        welfare=sum(utils, Fraction(0)),
        nsw=prod,
        sum_squares=sum((u * u for u in utils), Fraction(0)),
        sorted_vector=tuple(sorted(utils)),
        potential=potential(allocation.profile(), sigma),
    )


def check_lorenz_dominating(allocation: Allocation, instance: Instance) -> FairnessReport:
    """Does the allocation Lorenz-dominate every allocation of the instance?

    Enumeration-backed; capability-capped like `enumerate_optimal`.
    """
    result = enumerate_optimal(instance)
    own_sorted = tuple(sorted(allocation.utilities(instance.valuations)))
    for idx, vec in enumerate(result.vectors):
        rel = lorenz_compare(own_sorted, tuple(sorted(vec)))
        if rel in (LorenzRelation.DOMINATED, LorenzRelation.INCOMPARABLE):
            witness = (result.allocations[idx].bundles, tuple(sorted(vec)))
            return FairnessReport((("lorenz_dominating", Verdict(False, witness)),))
    return FairnessReport((("lorenz_dominating", Verdict(True)),))


def check_stochastic_ef(
    dist: OutcomeDistribution, valuations: Sequence[ValuationSpec]
) -> FairnessReport:
    """Stochastic envy-freeness plus the ex-ante EF and proportionality checks.

    For each agent pair (i, j) and every achievable value t of f_i over the
    atoms (tails are step functions, so these thresholds are complete):
    Pr[f_i(A_i) >= t] must weakly exceed Pr[f_i(A_j) >= t], exactly.
    """
    n = len(valuations)
    if not dist.atoms:
        raise ValidationError("empty distribution")
    m = dist.atoms[0].allocation.m

    own_vals: list[list[Fraction]] = [[] for _ in range(n)]
    cross_vals: dict[tuple[int, int], list[Fraction]] = {}
    weights = [atom.weight for atom in dist.atoms]
    for atom in dist.atoms:
        for i in range(n):
            own_vals[i].append(evaluate(valuations[i], atom.allocation.bundles[i], m))
    for i in range(n):
        for j in range(n):
            if i != j:
                cross_vals[(i, j)] = [
                    evaluate(valuations[i], atom.allocation.bundles[j], m)
                    for atom in dist.atoms
                ]

    stochastic = Verdict(True)
    for i in range(n):
        if not stochastic.holds:
            break
        for j in range(n):
            if i == j:
                continue
            other = cross_vals[(i, j)]
            thresholds = sorted(set(own_vals[i]) | set(other))
            for t in thresholds:
                if t <= 0:
                    continue
                own_tail = sum(
                    (w for w, val in zip(weights, own_vals[i]) if val >= t), Fraction(0)
                )
                other_tail = sum(
                    (w for w, val in zip(weights, other) if val >= t), Fraction(0)
                )
                if own_tail < other_tail:
                    stochastic = Verdict(False, TailWitness(i, j, t, own_tail, other_tail))
                    break
            if not stochastic.holds:
                break

    expectations = [
        sum((w * val for w, val in zip(weights, own_vals[i])), Fraction(0))
        for i in range(n)
    ]
    ex_ante_ef = Verdict(True)
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            cross_exp = sum(
                (w * val for w, val in zip(weights, cross_vals[(i, j)])), Fraction(0)
            )
            if expectations[i] < cross_exp:
                ex_ante_ef = Verdict(False, BoundWitness(i, cross_exp, expectations[i]))
                break
        if not ex_ante_ef.holds:
            break

    ex_ante_prop = Verdict(True)
    for i in range(n):
        share = evaluate(valuations[i], frozenset(range(m)), m) / n
        if expectations[i] < share:
            ex_ante_prop = Verdict(False, BoundWitness(i, share, expectations[i]))
            break

    return FairnessReport(
        (
            ("stochastic_ef", stochastic),
            ("ex_ante_ef", ex_ante_ef),
            ("ex_ante_proportional", ex_ante_prop),
        )
    )


def check_maximin_fair(
    allocation: Allocation,
    valuations: Sequence[ValuationSpec],
    alpha=1,
    max_items: int = MAXIMIN_MAX_ITEMS,
    max_agents: int = MAXIMIN_MAX_AGENTS,
) -> FairnessReport:
    """Every agent receives at least α times her maximin share."""
    alpha = _alpha_value(alpha)
    n = allocation.n
    for i in range(n):
        share = maximin_share(valuations[i], n, allocation.m, max_items, max_agents)
        got = evaluate(valuations[i], allocation.bundles[i], allocation.m)
        if got < alpha * share:
            w = BoundWitness(i, alpha * share, got)
            return FairnessReport((("maximin", Verdict(False, w)),))
    return FairnessReport((("maximin", Verdict(True)),))
