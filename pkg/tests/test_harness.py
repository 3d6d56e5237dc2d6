import random
from fractions import Fraction

import pytest

from conftest import additive_instance, matroid_instance, rand_explicit_matroid
from egalloc.errors import ValidationError
from egalloc.harness import (
    AllDemandSubsets,
    ExplicitDeviations,
    FIXTURES,
    RestrictedMrfLibrary,
    fuzz_truthfulness,
    run_fixture,
)
from egalloc.model import Instance
from egalloc.valuation import AdditiveDichotomous, EpsLeveled

F = frozenset


def two_item_leveled_instance(eps=Fraction(1, 20)) -> Instance:
    # items L, H; the lower-priority agent strictly prefers H
    return Instance(
        item_names=("L", "H"),
        agent_names=("p1", "p2"),
        valuations=(
            EpsLeveled({0: 1, 1: 1}),
            EpsLeveled({0: 1, 1: 1 + eps}),
        ),
        epsilon=eps,
    )


def test_pe_truthful_on_contested_pair_instance():
    inst = additive_instance([F({0, 1})] * 3)
    res = fuzz_truthfulness("pe", inst, 2, AllDemandSubsets())
    assert res.truthful
    assert res.truthful_utility == 0  # lowest priority loses either way


def test_floor_pe_manipulable_on_leveled_instance():
    inst = two_item_leveled_instance()
    res = fuzz_truthfulness("pe", inst, 1, AllDemandSubsets())
    assert not res.truthful
    assert res.best_report == AdditiveDichotomous(F({1}))  # report H only
    assert res.gain == Fraction(1, 20)


def test_meps_truthful_in_expectation_on_leveled_instance():
    inst = two_item_leveled_instance()  # eps = 1/20 < 1/(2*8)
    for deviator in range(2):
        res = fuzz_truthfulness("meps", inst, deviator, AllDemandSubsets(), mode="expectation")
        assert res.truthful


def test_rpe_expectation_truthful_smoke():
    inst = additive_instance([F({0, 1}), F({0})])
    res = fuzz_truthfulness("rpe", inst, 0, AllDemandSubsets(), mode="expectation")
    assert res.truthful


def test_mrf_library_deviations_unprofitable():
    rng = random.Random(2718)
    for _ in range(6):
        m = rng.randint(2, 4)
        n = rng.randint(2, 3)
        mats = [rand_explicit_matroid(rng, m) for _ in range(n)]
        inst = matroid_instance(mats, m)
        for deviator in range(n):
            res = fuzz_truthfulness("pe", inst, deviator, RestrictedMrfLibrary())
            assert res.truthful, (mats, deviator, res)


def test_explicit_deviation_space():
    inst = additive_instance([F({0, 1})] * 2)
    space = ExplicitDeviations(
        (AdditiveDichotomous(F({0, 1})), AdditiveDichotomous(F({0})))
    )
    res = fuzz_truthfulness("pe", inst, 1, space)
    assert res.truthful


def test_fuzz_mode_validation():
    inst = additive_instance([F({0})])
    with pytest.raises(ValidationError):
        fuzz_truthfulness("pe", inst, 0, AllDemandSubsets(), mode="expectation")
    with pytest.raises(ValidationError):
        fuzz_truthfulness("meps", inst, 0, AllDemandSubsets(), mode="expost")
    with pytest.raises(ValidationError):
        fuzz_truthfulness("nope", inst, 0, AllDemandSubsets())
    with pytest.raises(ValidationError):
        fuzz_truthfulness("pe", inst, 5, AllDemandSubsets())


def test_library_requires_matroid_truth():
    inst = additive_instance([F({0})])
    with pytest.raises(ValidationError):
        fuzz_truthfulness("pe", inst, 0, RestrictedMrfLibrary())


def test_library_contains_truth():
    from egalloc.harness import _deviation_reports
    from egalloc.matroid import FreeOver
    from egalloc.valuation import evaluate

    inst = matroid_instance([FreeOver(F({0, 1}))], 2)
    reports = _deviation_reports(RestrictedMrfLibrary(), inst, 0)
    truth = inst.valuations[0]
    masks = [F(), F({0}), F({1}), F({0, 1})]
    assert any(
        all(evaluate(r, s, 2) == evaluate(truth, s, 2) for s in masks) for r in reports
    )


@pytest.mark.parametrize("fid", sorted(FIXTURES))
def test_fixture_gallery(fid):
    result = run_fixture(fid)
    mismatches = {
        k: (v, result.computed.get(k))
        for k, v in result.claimed.items()
        if result.computed.get(k) != v
    }
    assert result.passed, mismatches


def test_unknown_fixture():
    with pytest.raises(ValidationError):
        run_fixture("F99")
