import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import rand_matroid
from egalloc.errors import PreconditionError, ValidationError
from egalloc.matroid import Explicit, Uniform
from egalloc.valuation import (
    AdditiveDichotomous,
    EpsLeveled,
    MatroidValuation,
    XosFamily,
    evaluate,
    floor_round,
    marginal,
    validate,
)

F = frozenset


def test_evaluate_examples():
    add = AdditiveDichotomous(F({0, 2}))
    assert evaluate(add, F({0, 1, 2})) == 2
    assert evaluate(add, F()) == 0
    lev = EpsLeveled({0: Fraction(10001, 10000), 1: Fraction(10002, 10000)})
    assert evaluate(lev, F({0, 1})) == Fraction(20003, 10000)
    assert evaluate(lev, F()) == 0
    xos = XosFamily((F({0, 1}), F({2})))
    assert evaluate(xos, F({0, 2})) == 1
    assert evaluate(xos, F({0, 1, 2})) == 2


def test_evaluate_range_check():
    with pytest.raises(ValidationError):
        evaluate(AdditiveDichotomous(F({0})), F({5}), m=3)


def test_marginal_examples():
    uni = MatroidValuation(Uniform(F({0, 1}), 1))
    assert marginal(uni, F({0}), 1) == 0
    assert marginal(AdditiveDichotomous(F({0})), F(), 0) == 1
    lev = EpsLeveled({0: Fraction(10001, 10000), 1: Fraction(10002, 10000)})
    assert marginal(lev, F({0}), 1) == Fraction(10002, 10000)
    with pytest.raises(PreconditionError):
        marginal(lev, F({0}), 0)


def test_floor_round_examples():
    lev = EpsLeveled({0: 1, 1: Fraction(10003, 10000)})
    floored = floor_round(lev, Fraction(1, 100), m=2)
    assert floored == AdditiveDichotomous(F({0, 1}))
    add = AdditiveDichotomous(F({3}))
    assert floor_round(add) is add
    # floor of the evaluated sum matches evaluating the floor
    assert evaluate(floored, F({0, 1})) == 2
    raw = evaluate(lev, F({0, 1}))
    assert raw == Fraction(20003, 10000)
    assert int(raw) == 2


def test_floor_round_eps_bound():
    lev = EpsLeveled({0: 1})
    with pytest.raises(ValidationError):
        floor_round(lev, Fraction(1, 2), m=2)
    with pytest.raises(ValidationError):
        floor_round(lev, Fraction(1, 100))  # m required


def test_floor_pointwise_and_obs_bound():
    rng = random.Random(3)
    for _ in range(40):
        m = rng.randint(1, 8)
        eps = Fraction(1, m + rng.randint(1, 5))
        if eps >= Fraction(1, m):
            eps = Fraction(1, m + 1)
        values = {}
        for a in range(m):
            r = rng.random()
            if r < 0.4:
                values[a] = Fraction(0)
            else:
                values[a] = 1 + eps * Fraction(rng.randint(0, 4), 4)
        lev = EpsLeveled(values)
        hat = floor_round(lev, eps, m=m)
        for mask in range(1 << m):
            s = F(i for i in range(m) if mask >> i & 1)
            raw = evaluate(lev, s)
            low = evaluate(hat, s)
            assert low == Fraction(int(raw))  # floor identity
            assert raw <= (1 + eps) * low or low == 0 and raw == 0
            if low == 0:
                assert raw == 0  # eps < 1/m forbids fractional-only mass


def test_floor_round_idempotent():
    lev = EpsLeveled({0: 1, 2: Fraction(101, 100)})
    once = floor_round(lev, Fraction(1, 50), m=4)
    assert floor_round(once, Fraction(1, 50), m=4) == once


def test_validate_examples():
    bad = EpsLeveled({0: Fraction(1, 2)})
    report = validate(bad, Fraction(1, 100), m=1)
    assert not report.valid
    assert report.violations[0].witness[0] == 0
    assert validate(AdditiveDichotomous(F({0})), 0, m=2).valid
    nonmatroid = MatroidValuation(Explicit(F({F({0}), F({1, 2})})))
    rep = validate(nonmatroid, 0, m=3)
    assert not rep.valid


def test_negative_and_float_values_rejected():
    with pytest.raises(ValidationError):
        EpsLeveled({0: Fraction(-1)})
    with pytest.raises(ValidationError):
        EpsLeveled({0: 1.5})


def test_xos_family_nonempty():
    with pytest.raises(ValidationError):
        XosFamily(())


@given(st.data())
@settings(max_examples=60, deadline=None)
def test_monotone_chain(data):
    rng = random.Random(data.draw(st.integers(0, 10**6)))
    m = data.draw(st.integers(1, 6))
    kind = data.draw(st.sampled_from(["add", "matroid", "eps", "xos"]))
    if kind == "add":
        spec = AdditiveDichotomous(F(a for a in range(m) if rng.random() < 0.5))
    elif kind == "matroid":
        spec = MatroidValuation(rand_matroid(rng, m))
    elif kind == "eps":
        spec = EpsLeveled(
            {a: Fraction(0) if rng.random() < 0.5 else 1 + Fraction(rng.randint(0, 3), 100)
             for a in range(m)}
        )
    else:
        spec = XosFamily(
            tuple(F(a for a in range(m) if rng.random() < 0.5) for _ in range(3)) or (F(),)
        )
    items = list(range(m))
    rng.shuffle(items)
    cut1, cut2 = sorted((rng.randint(0, m), rng.randint(0, m)))
    small, large = F(items[:cut1]), F(items[:cut2])
    assert evaluate(spec, F()) == 0
    assert 0 <= evaluate(spec, small) <= evaluate(spec, large)


def test_matroid_marginals_dichotomous_and_submodular():
    rng = random.Random(31)
    for _ in range(12):
        m = rng.randint(1, 6)
        spec = MatroidValuation(rand_matroid(rng, m))
        subsets = [F(i for i in range(m) if mask >> i & 1) for mask in range(1 << m)]
        for s in subsets:
            for t in subsets:
                if not s <= t:
                    continue
                for a in range(m):
                    if a in t:
                        continue
                    ms = marginal(spec, s, a)
                    mt = marginal(spec, t, a)
                    assert ms in (0, 1) and mt in (0, 1)
                    assert ms >= mt
