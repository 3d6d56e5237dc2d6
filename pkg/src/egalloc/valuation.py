"""Valuation classes: additive-dichotomous, matroid-rank, ε-leveled, XOS.

All values are exact rationals (`fractions.Fraction`); floats are rejected
at construction.  Undesired items have value exactly 0; negative values
are rejected, since the mechanisms never allocate zero-marginal items and
non-positive values would behave identically.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from numbers import Rational
from typing import Iterable, Mapping

from .errors import PreconditionError, ValidationError
from .matroid import (
    ItemSet,
    MatroidSpec,
    ValidationReport,
    Violation,
    _freeze,
    validate_matroid,
)

Value = Fraction


def as_value(x) -> Fraction:
    """Coerce an exact numeric (int/Fraction/'p/q' string) to Fraction.

    Floats are refused: mechanism comparisons hinge on differences of order
    eps/(n*m^2), far below float noise.
    """
    if isinstance(x, bool) or isinstance(x, float):
        raise ValidationError(f"exact rational required, got {x!r}; floats are rejected")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, Fraction):
        return x
    if isinstance(x, Rational):
        return Fraction(x)
    if isinstance(x, str):
        try:
            return Fraction(x)
        except (ValueError, ZeroDivisionError) as exc:
            raise ValidationError(f"bad rational literal {x!r}: {exc}") from None
    raise ValidationError(f"exact rational required, got {type(x).__name__}")


class ValuationSpec:
    """Base class for all valuation descriptions."""

    __slots__ = ()


@dataclass(frozen=True)
class AdditiveDichotomous(ValuationSpec):
    """f(S) = |S ∩ demand|."""

    demand: ItemSet

    def __post_init__(self):
        object.__setattr__(self, "demand", _freeze(self.demand))


@dataclass(frozen=True)
class MatroidValuation(ValuationSpec):
    """f(S) = rank of S in the wrapped matroid."""

    matroid: MatroidSpec


@dataclass(frozen=True)
class EpsLeveled(ValuationSpec):
    """Additive with each listed item worth 0 or a value in [1, 1+ε]."""

    values: tuple[tuple[int, Fraction], ...]

    def __init__(self, values: Mapping[int, object] | Iterable[tuple[int, object]]):
        pairs = sorted(dict(values).items())
        norm = []
        for item, raw in pairs:
            if not isinstance(item, int) or isinstance(item, bool) or item < 0:
                raise ValidationError(f"item ids must be non-negative integers, got {item!r}")
            val = as_value(raw)
            if val < 0:
                raise ValidationError(
                    f"item {item} has negative value {val}; undesired items must be "
                    "worth exactly 0 (zero-marginal items are never allocated, so "
                    "non-positive values would behave identically)"
                )
            norm.append((item, val))
        object.__setattr__(self, "values", tuple(norm))

    @cached_property
    def value_map(self) -> dict[int, Fraction]:
        return dict(self.values)

    def demand(self) -> ItemSet:
        return frozenset(a for a, v in self.values if v > 0)


@dataclass(frozen=True)
class XosFamily(ValuationSpec):
    """f(S) = max over family sets T of |T ∩ S| (dichotomous XOS)."""

    family: tuple[ItemSet, ...]

    def __post_init__(self):
        frozen = tuple(_freeze(t) for t in self.family)
        if not frozen:
            raise ValidationError("XOS family must be nonempty")
        object.__setattr__(self, "family", frozen)


def support(spec: ValuationSpec) -> ItemSet:
    """Items with positive singleton value."""
    if isinstance(spec, AdditiveDichotomous):
        return spec.demand
    if isinstance(spec, MatroidValuation):
        return spec.matroid.support()
    if isinstance(spec, EpsLeveled):
        return spec.demand()
    if isinstance(spec, XosFamily):
        return frozenset().union(*spec.family)
    raise ValidationError(f"unknown valuation tag {type(spec).__name__}")


def _check_universe(s: ItemSet, m: int | None) -> None:
    if m is not None:
        bad = [a for a in s if a >= m]
        if bad:
            raise ValidationError(f"item index out of range: {sorted(bad)} (universe size {m})")


def evaluate(spec: ValuationSpec, s: ItemSet, m: int | None = None) -> Fraction:
    """f(S).  Normalized (f(∅)=0) and non-decreasing for every tag."""
    s = frozenset(s)
    _check_universe(s, m)
    if isinstance(spec, AdditiveDichotomous):
        return Fraction(len(s & spec.demand))
    if isinstance(spec, MatroidValuation):
        return Fraction(spec.matroid.rank(s))
    if isinstance(spec, EpsLeveled):
        vm = spec.value_map
        return sum((vm[a] for a in s if a in vm), Fraction(0))
    if isinstance(spec, XosFamily):
        return Fraction(max(len(t & s) for t in spec.family))
    raise ValidationError(f"unknown valuation tag {type(spec).__name__}")


def marginal(spec: ValuationSpec, s: ItemSet, a: int, m: int | None = None) -> Fraction:
    """f(a | S) = f(S ∪ {a}) − f(S); requires a ∉ S."""
    s = frozenset(s)
    if a in s:
        raise PreconditionError(f"marginal requires a ∉ S, got a={a} in S")
    return evaluate(spec, s | {a}, m) - evaluate(spec, s, m)


def validate(spec: ValuationSpec, eps, m: int) -> ValidationReport:
    """Check the valuation against its class constraints for the given ε and universe.

    Never raises for constraint violations; the report lists each one with a
    witness.
    """
    eps = as_value(eps)
    violations: list[Violation] = []

    def check_items(items: ItemSet, where: str):
        bad = sorted(a for a in items if a >= m)
        if bad:
            violations.append(Violation("item-in-universe", (where, tuple(bad))))

    if isinstance(spec, AdditiveDichotomous):
        check_items(spec.demand, "demand")
    elif isinstance(spec, MatroidValuation):
        check_items(spec.matroid.support(), "matroid support")
        violations += list(validate_matroid(spec.matroid).violations)
    elif isinstance(spec, EpsLeveled):
        check_items(frozenset(a for a, _ in spec.values), "values")
        for item, val in spec.values:
            if val != 0 and not (1 <= val <= 1 + eps):
                violations.append(Violation("value-in-eps-band", (item, str(val))))
    elif isinstance(spec, XosFamily):
        for t in spec.family:
            check_items(t, "family")
    else:
        violations.append(Violation("unknown-valuation-tag", (type(spec).__name__,)))
    return ValidationReport(tuple(violations))


def floor_round(spec: ValuationSpec, eps=Fraction(0), m: int | None = None) -> ValuationSpec:
    """Round the valuation down to the nearest integer on every set.

    For an ε-dichotomous valuation with ε < 1/m the floor is dichotomous
    and satisfies f(S) ≤ (1+ε)·f̂(S); for ε-leveled input the result is the
    additive-dichotomous valuation over the items of nonzero value.
    Dichotomous specs are their own floor (idempotent at ε = 0).
    """
    eps = as_value(eps)
    if isinstance(spec, (AdditiveDichotomous, MatroidValuation, XosFamily)):
        return spec
    if isinstance(spec, EpsLeveled):
        if m is None:
            raise ValidationError("floor_round of an ε-leveled valuation needs the universe size m")
        if eps >= Fraction(1, m):
            raise ValidationError(
                f"floor rounding requires eps < 1/m; got eps={eps} with m={m}"
            )
        report = validate(spec, eps, m)
        if not report.valid:
            raise ValidationError(f"not ε-leveled for eps={eps}: {report.violations[0]}")
        return AdditiveDichotomous(spec.demand())
    raise ValidationError(f"unknown valuation tag {type(spec).__name__}")
