"""Matroid rank oracles, combinators, and an exhaustive axiom validator.

A matroid is described by a structured, immutable spec.  Structured tags
(free, uniform, partition, truncation, restriction) are matroids by
construction; Explicit families are normalized to their downward closure
and may fail the exchange axiom, which `validate_matroid` detects with a
witness pair.  Rank functions here are the substrate for matroid-rank
valuations: rank is always submodular with 0/1 marginals when the spec is
a genuine matroid.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Iterable

from .errors import CapabilityError, PreconditionError, ValidationError

ItemSet = frozenset[int]

#: Largest Explicit-family universe the exhaustive validator will scan.
EXPLICIT_VALIDATION_CAP = 12


def _freeze(items: Iterable[int]) -> ItemSet:
    out = frozenset(items)
    for a in out:
        if not isinstance(a, int) or isinstance(a, bool) or a < 0:
            raise ValidationError(f"item ids must be non-negative integers, got {a!r}")
    return out


@dataclass(frozen=True)
class Violation:
    """One violated matroid/valuation constraint plus a checkable witness."""

    constraint: str
    witness: tuple


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[Violation, ...] = ()

    @property
    def valid(self) -> bool:
        return not self.violations

    def __bool__(self) -> bool:
        return self.valid


class MatroidSpec:
    """Base class; concrete specs implement rank/is_independent/support."""

    __slots__ = ()

    def rank(self, s: ItemSet) -> int:
        raise NotImplementedError

    def is_independent(self, s: ItemSet) -> bool:
        return self.rank(s) == len(s)

    def support(self) -> ItemSet:
        """Items of positive singleton rank (non-loops)."""
        raise NotImplementedError


@dataclass(frozen=True)
class FreeOver(MatroidSpec):
    """rank(S) = |S ∩ demand|; every demanded item is independent of the rest."""

    demand: ItemSet

    def __post_init__(self):
        object.__setattr__(self, "demand", _freeze(self.demand))

    def rank(self, s):
        return len(s & self.demand)

    def is_independent(self, s):
        return s <= self.demand

    def support(self):
        return self.demand


@dataclass(frozen=True)
class Uniform(MatroidSpec):
    """rank(S) = min(cap, |S ∩ demand|)."""

    demand: ItemSet
    cap: int

    def __post_init__(self):
        object.__setattr__(self, "demand", _freeze(self.demand))
        if self.cap < 0:
            raise ValidationError("uniform matroid cap must be >= 0")

    def rank(self, s):
        return min(self.cap, len(s & self.demand))

    def is_independent(self, s):
        return s <= self.demand and len(s) <= self.cap

    def support(self):
        return self.demand if self.cap >= 1 else frozenset()


@dataclass(frozen=True)
class Partition(MatroidSpec):
    """Disjoint blocks with per-block caps: rank(S) = Σ min(cap_b, |S ∩ block_b|)."""

    blocks: tuple[tuple[ItemSet, int], ...]

    def __post_init__(self):
        frozen = tuple((_freeze(b), int(c)) for b, c in self.blocks)
        object.__setattr__(self, "blocks", frozen)
        seen: set[int] = set()
        for block, cap in frozen:
            if cap < 0:
                raise ValidationError("partition matroid caps must be >= 0")
            if seen & block:
                raise ValidationError(
                    f"partition matroid blocks overlap on items {sorted(seen & block)}"
                )
            seen |= block

    def rank(self, s):
        return sum(min(cap, len(s & block)) for block, cap in self.blocks)

    def is_independent(self, s):
        covered = frozenset().union(*(b for b, _ in self.blocks)) if self.blocks else frozenset()
        if not s <= covered:
            return False
        return all(len(s & block) <= cap for block, cap in self.blocks)

    def support(self):
        out: set[int] = set()
        for block, cap in self.blocks:
            if cap >= 1:
                out |= block
        return frozenset(out)


@dataclass(frozen=True)
class Explicit(MatroidSpec):
    """An explicitly listed independence family, closed downward at construction.

    Inputs usually list only the maximal independent sets; the closure is
    taken here.  The result need not satisfy the exchange axiom; use
    `validate_matroid` before trusting it as a matroid.
    """

    family: frozenset[ItemSet]

    def __post_init__(self):
        given = [_freeze(t) for t in self.family]
        if not given:
            raise ValidationError("explicit independence family must be nonempty")
        closed: set[ItemSet] = set()
        for t in given:
            if t in closed:
                continue
            # downward closure: all subsets of every listed set
            items = sorted(t)
            for k in range(len(items) + 1):
                for sub in combinations(items, k):
                    closed.add(frozenset(sub))
        object.__setattr__(self, "family", frozenset(closed))

    def universe(self) -> ItemSet:
        return frozenset().union(*self.family)

    def rank(self, s):
        return max(len(t) for t in self.family if t <= s)

    def is_independent(self, s):
        return s in self.family

    def support(self):
        return frozenset(a for a in self.universe() if frozenset((a,)) in self.family)


@dataclass(frozen=True)
class Truncated(MatroidSpec):
    """rank(S) = min(limit, inner.rank(S))."""

    inner: MatroidSpec
    limit: int

    def __post_init__(self):
        if self.limit < 0:
            raise ValidationError("truncation limit must be >= 0")

    def rank(self, s):
        return min(self.limit, self.inner.rank(s))

    def is_independent(self, s):
        return len(s) <= self.limit and self.inner.is_independent(s)

    def support(self):
        return self.inner.support() if self.limit >= 1 else frozenset()


@dataclass(frozen=True)
class Restricted(MatroidSpec):
    """rank(S) = inner.rank(S ∩ demand)."""

    inner: MatroidSpec
    demand: ItemSet

    def __post_init__(self):
        object.__setattr__(self, "demand", _freeze(self.demand))

    def rank(self, s):
        return self.inner.rank(s & self.demand)

    def is_independent(self, s):
        return s <= self.demand and self.inner.is_independent(s)

    def support(self):
        return self.inner.support() & self.demand


ZERO_MATROID = FreeOver(frozenset())


def exchange_candidate(spec: MatroidSpec, s: ItemSet, t: ItemSet) -> int:
    """Return the smallest x ∈ t∖s with s ∪ {x} independent.

    Requires s, t independent with |s| < |t|.  For a genuine matroid such
    an x always exists; if none does, the spec is not a matroid.
    """
    if not (spec.is_independent(s) and spec.is_independent(t)):
        raise PreconditionError("exchange_candidate requires independent sets")
    if len(s) >= len(t):
        raise PreconditionError("exchange_candidate requires |s| < |t|")
    for x in sorted(t - s):
        if spec.is_independent(s | {x}):
            return x
    raise ValidationError(
        f"exchange property fails for s={sorted(s)}, t={sorted(t)}; not a matroid"
    )


def _validate_explicit(spec: Explicit, cap: int) -> list[Violation]:
    universe = spec.universe()
    if len(universe) > cap:
        raise CapabilityError(
            f"explicit family over {len(universe)} items exceeds the exhaustive "
            f"validation cap of {cap}"
        )
    out: list[Violation] = []
    fam = spec.family
    if frozenset() not in fam:
        out.append(Violation("contains-empty-set", ()))
    for t in fam:
        for x in t:
            if t - {x} not in fam:
                out.append(Violation("downward-closed", (tuple(sorted(t)), x)))
    # Consecutive sizes suffice for downward-closed families: for |T| > |S|+1
    # drop elements of T\S until the sizes are adjacent.
    by_size: dict[int, list[ItemSet]] = {}
    for t in fam:
        by_size.setdefault(len(t), []).append(t)
    for k in sorted(by_size):
        if k + 1 not in by_size:
            continue
        for s in by_size[k]:
            for t in by_size[k + 1]:
                if not any(s | {x} in fam for x in t - s):
                    out.append(
                        Violation("exchange", (tuple(sorted(s)), tuple(sorted(t))))
                    )
    return out


def validate_matroid(spec: MatroidSpec, cap: int = EXPLICIT_VALIDATION_CAP) -> ValidationReport:
    """Check the matroid axioms.

    Structured tags are valid by construction and only their components are
    (recursively) checked; Explicit families get the exhaustive
    downward-closure and exchange scan, capped at `cap` universe items.
    """
    violations: list[Violation] = []
    if isinstance(spec, Explicit):
        violations += _validate_explicit(spec, cap)
    elif isinstance(spec, (Truncated, Restricted)):
        violations += list(validate_matroid(spec.inner, cap).violations)
    elif not isinstance(spec, (FreeOver, Uniform, Partition)):
        violations.append(Violation("unknown-matroid-tag", (type(spec).__name__,)))
    return ValidationReport(tuple(violations))


def brute_force_rank(spec: MatroidSpec, s: ItemSet) -> int:
    """Size of the largest independent subset of s, by subset enumeration.

    Independent oracle for rank(); exponential in |s|.
    """
    items = sorted(s)
    best = 0
    for k in range(len(items), 0, -1):
        if k <= best:
            break
        for sub in combinations(items, k):
            if spec.is_independent(frozenset(sub)):
                best = k
                break
    return best
