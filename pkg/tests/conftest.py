"""Shared instance generators and brute-force oracles for the test suite."""

from __future__ import annotations

import itertools
import random
from fractions import Fraction

from egalloc.matroid import (
    Explicit,
    FreeOver,
    MatroidSpec,
    Partition,
    Restricted,
    Truncated,
    Uniform,
)
from egalloc.model import Instance
from egalloc.valuation import AdditiveDichotomous, MatroidValuation


def rand_subset(rng: random.Random, m: int, p: float = 0.6) -> frozenset[int]:
    return frozenset(a for a in range(m) if rng.random() < p)


def rand_structured_matroid(rng: random.Random, m: int, depth: int = 0) -> MatroidSpec:
    kind = rng.choice(["free", "uniform", "partition", "truncated", "restricted"])
    if kind == "free" or depth >= 2:
        return FreeOver(rand_subset(rng, m))
    if kind == "uniform":
        return Uniform(rand_subset(rng, m), rng.randint(0, m))
    if kind == "partition":
        pool = list(range(m))
        rng.shuffle(pool)
        blocks = []
        while pool:
            k = rng.randint(1, min(3, len(pool)))
            blocks.append((frozenset(pool[:k]), rng.randint(0, 2)))
            pool = pool[k:]
        return Partition(tuple(blocks))
    if kind == "truncated":
        return Truncated(rand_structured_matroid(rng, m, depth + 1), rng.randint(0, m))
    return Restricted(rand_structured_matroid(rng, m, depth + 1), rand_subset(rng, m))


def rand_explicit_matroid(rng: random.Random, m: int) -> Explicit:
    """A genuinely valid matroid in explicit form (closure of a structured one)."""
    base = rand_structured_matroid(rng, m)
    family = [
        frozenset(s)
        for k in range(m + 1)
        for s in itertools.combinations(range(m), k)
        if base.is_independent(frozenset(s))
    ]
    return Explicit(frozenset(family))


def rand_matroid(rng: random.Random, m: int) -> MatroidSpec:
    if rng.random() < 0.25:
        return rand_explicit_matroid(rng, m)
    return rand_structured_matroid(rng, m)


def brute_max_common(matroids, m, caps=None) -> int:
    """Exhaustive maximum total size over cap-respecting independent allocations."""
    n = len(matroids)
    best = 0
    for assign in itertools.product(range(n + 1), repeat=m):
        bundles = [frozenset(i for i, o in enumerate(assign) if o == v) for v in range(n)]
        if caps is not None and any(
            caps[v] is not None and len(bundles[v]) > caps[v] for v in range(n)
        ):
            continue
        if all(matroids[v].is_independent(bundles[v]) for v in range(n)):
            best = max(best, sum(len(b) for b in bundles))
    return best


def additive_instance(demands, priority=None, epsilon=Fraction(0)) -> Instance:
    n = len(demands)
    m = max((max(d) + 1 for d in demands if d), default=1)
    return Instance(
        item_names=tuple(f"i{j}" for j in range(m)),
        agent_names=tuple(f"a{j}" for j in range(n)),
        valuations=tuple(AdditiveDichotomous(frozenset(d)) for d in demands),
        epsilon=epsilon,
        priority=priority,
    )


def matroid_instance(matroids, m, priority=None) -> Instance:
    n = len(matroids)
    return Instance(
        item_names=tuple(f"i{j}" for j in range(m)),
        agent_names=tuple(f"a{j}" for j in range(n)),
        valuations=tuple(MatroidValuation(x) for x in matroids),
        priority=priority,
    )


def all_demand_profiles(n: int, m: int):
    """Every n-tuple of demand subsets of {0..m-1}."""
    subsets = [
        frozenset(s) for k in range(m + 1) for s in itertools.combinations(range(m), k)
    ]
    return itertools.product(subsets, repeat=n)
