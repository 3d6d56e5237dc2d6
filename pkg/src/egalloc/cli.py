"""Command-line surface.

Subcommands: solve, audit, distribution, fuzz, fixture, enumerate.
Exit codes: 0 ok / property holds; 1 property fails (witness printed);
2 usage or validation error; 3 capability cap exceeded.
Documents go to stdout, diagnostics to stderr.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from fractions import Fraction
from pathlib import Path

from . import io as docio
from .audit import check_envy, check_maximin_fair, efficiency_metrics
from .errors import CapabilityError, EgallocError, ValidationError
from .harness import (
    AllDemandSubsets,
    RestrictedMrfLibrary,
    fuzz_truthfulness,
    run_fixture,
)
from .lorenz import additive_balanced, enumerate_optimal
from .matroid import FreeOver
from .mechanisms import (
    floor_reports,
    run_meps,
    run_pe,
    run_rpe,
    sample_meps,
    sample_rpe,
    sanitize_reports,
)
from .model import Allocation, Instance
from .valuation import AdditiveDichotomous, EpsLeveled, support

EXIT_OK = 0
EXIT_PROPERTY_FAILS = 1
EXIT_USAGE = 2
EXIT_CAPABILITY = 3


def _load_instance(path: str) -> Instance:
    return docio.parse_instance(Path(path).read_text())


def _parse_priority_flag(flag: str | None, inst: Instance):
    if flag is None:
        return inst.priority_or_default()
    names = [x for x in flag.split(",") if x]
    if sorted(names) != sorted(inst.agent_names):
        raise ValidationError("--priority must list every agent name exactly once")
    return tuple(inst.agent_names.index(x) for x in names)


def _emit(doc) -> None:
    json.dump(doc, sys.stdout, indent=2)
    sys.stdout.write("\n")


def _jsonable(obj):
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, frozenset):
        return sorted(obj)
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return {k: _jsonable(v) for k, v in dataclasses.asdict(obj).items()}
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    return obj


def _result_document(inst: Instance, alloc: Allocation, sigma, mechanism: str) -> dict:
    metrics = efficiency_metrics(alloc, inst.valuations, sigma)
    audit = {
        mode: _jsonable(check_envy(alloc, inst.valuations, mode).entries[0][1])
        for mode in ("EF", "EF1", "EFX")
    }
    doc = {
        "mechanism": mechanism,
        "priority": [inst.agent_names[a] for a in sigma],
        **docio.allocation_document(alloc, inst),
        "utilities": {
            name: str(u)
            for name, u in zip(inst.agent_names, alloc.utilities(inst.valuations))
        },
        "sorted_utilities": [str(u) for u in metrics.sorted_vector],
        "potential": str(metrics.potential),
        "welfare": str(metrics.welfare),
        "nash_welfare": str(metrics.nsw),
        "audit": audit,
    }
    return doc


def _meps_demands(inst: Instance):
    for spec in inst.valuations:
        if not isinstance(spec, (AdditiveDichotomous, EpsLeveled)):
            raise ValidationError(
                "the held-out mechanism takes demand-set reports; matroid/xos "
                "valuations are not supported"
            )
    return [support(v) for v in inst.valuations]


def _cmd_solve(args) -> int:
    inst = _load_instance(args.infile)
    sigma = _parse_priority_flag(args.priority, inst)
    mech = args.mech
    if mech == "pe":
        alloc = run_pe(floor_reports(inst.valuations), inst.m, sigma)
        _emit(_result_document(inst, alloc, sigma, "pe"))
        return EXIT_OK
    if mech == "balanced":
        matroids, _ = sanitize_reports(floor_reports(inst.valuations), inst.m)
        if not all(isinstance(spec, FreeOver) for spec in matroids):
            raise ValidationError("--mech balanced needs additive demand-set reports")
        alloc = additive_balanced([spec.demand for spec in matroids], inst.m, sigma)
        _emit(_result_document(inst, alloc, sigma, "balanced"))
        return EXIT_OK
    if mech == "rpe":
        if args.exact:
            dist = run_rpe(floor_reports(inst.valuations), inst.m, mode="exact")
            _emit({"mechanism": "rpe", **docio.distribution_document(dist, inst)})
        else:
            alloc, sigma = sample_rpe(
                floor_reports(inst.valuations), inst.m, seed=args.seed
            )
            doc = _result_document(inst, alloc, sigma, "rpe")
            doc["seed"] = args.seed
            _emit(doc)
        return EXIT_OK
    if mech == "meps":
        demands = _meps_demands(inst)
        if args.exact:
            dist = run_meps(demands, inst.m, inst.epsilon, mode="exact")
            _emit({"mechanism": "meps", **docio.distribution_document(dist, inst)})
        else:
            alloc, held_out, sigma = sample_meps(
                demands, inst.m, inst.epsilon, seed=args.seed
            )
            doc = _result_document(inst, alloc, sigma, "meps")
            doc["seed"] = args.seed
            doc["held_out"] = [inst.item_names[a] for a in held_out]
            _emit(doc)
        return EXIT_OK
    raise ValidationError(f"unknown mechanism {mech!r}")


def _cmd_audit(args) -> int:
    inst = _load_instance(args.infile)
    alloc = docio.parse_allocation(Path(args.alloc).read_text(), inst)
    alpha = Fraction(args.alpha) if args.alpha else Fraction(1)
    entries = {}
    ok = True
    for mode in ("EF", "EF1", "EFX"):
        rep = check_envy(alloc, inst.valuations, mode, alpha)
        entries[mode] = _jsonable(rep.entries[0][1])
        if mode in ("EF1", "EFX") and not rep.all_hold:
            ok = False
    try:
        mm = check_maximin_fair(alloc, inst.valuations, alpha)
        entries["maximin"] = _jsonable(mm.entries[0][1])
        if not mm.all_hold:
            ok = False
    except CapabilityError as exc:
        entries["maximin"] = {"holds": None, "skipped": str(exc)}
    sigma = inst.priority_or_default()
    metrics = efficiency_metrics(alloc, inst.valuations, sigma)
    _emit(
        {
            "alpha": str(alpha),
            "properties": entries,
            "welfare": str(metrics.welfare),
            "nash_welfare": str(metrics.nsw),
            "sum_squares": str(metrics.sum_squares),
            "sorted_utilities": [str(u) for u in metrics.sorted_vector],
            "potential": str(metrics.potential),
        }
    )
    return EXIT_OK if ok else EXIT_PROPERTY_FAILS


def _cmd_distribution(args) -> int:
    inst = _load_instance(args.infile)
    if args.mech == "rpe":
        dist = run_rpe(floor_reports(inst.valuations), inst.m, mode="exact")
    else:
        dist = run_meps(_meps_demands(inst), inst.m, inst.epsilon, mode="exact")
    _emit({"mechanism": args.mech, **docio.distribution_document(dist, inst)})
    return EXIT_OK


def _cmd_fuzz(args) -> int:
    inst = _load_instance(args.infile)
    if args.deviator not in inst.agent_names:
        raise ValidationError(f"unknown agent {args.deviator!r}")
    deviator = inst.agent_names.index(args.deviator)
    space = RestrictedMrfLibrary() if args.space == "library" else AllDemandSubsets()
    mode = "expectation" if args.expectation else "expost"
    result = fuzz_truthfulness(args.mech, inst, deviator, space, mode)
    doc = {
        "mechanism": result.mechanism,
        "deviator": args.deviator,
        "mode": result.mode,
        "truthful": result.truthful,
        "truthful_utility": str(result.truthful_utility),
    }
    if not result.truthful:
        try:
            report_doc = docio._valuation_document(result.best_report, inst.item_names)
        except EgallocError:
            report_doc = _jsonable(result.best_report)
        doc["witness"] = {
            "report": report_doc,
            "utility": str(result.best_utility),
            "gain": str(result.gain),
        }
    _emit(doc)
    return EXIT_OK if result.truthful else EXIT_PROPERTY_FAILS


def _cmd_fixture(args) -> int:
    result = run_fixture(args.id)
    _emit(
        {
            "fixture": result.fixture_id,
            "description": result.description,
            "passed": result.passed,
            "claimed": _jsonable(result.claimed),
            "computed": _jsonable(result.computed),
        }
    )
    return EXIT_OK if result.passed else EXIT_PROPERTY_FAILS


def _cmd_enumerate(args) -> int:
    inst = _load_instance(args.infile)
    result = enumerate_optimal(inst)
    doc = {
        "allocation_count": len(result.allocations),
        "max_welfare": str(result.max_welfare),
        "pareto_count": len(result.pareto),
        "lorenz_dominating_vectors": sorted(
            {tuple(str(u) for u in sorted(result.vectors[i])) for i in result.lorenz_dominating}
        ),
        "min_potential": str(result.min_potential_value),
        "min_potential_vectors": sorted(
            {tuple(str(u) for u in result.vectors[i]) for i in result.min_potential}
        ),
    }
    doc["lorenz_dominating_vectors"] = [list(v) for v in doc["lorenz_dominating_vectors"]]
    doc["min_potential_vectors"] = [list(v) for v in doc["min_potential_vectors"]]
    _emit(doc)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="egalloc",
        description="Truthful fair allocation for dichotomous and near-dichotomous valuations.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    solve = sub.add_parser("solve", help="run a mechanism on an instance")
    solve.add_argument("--mech", required=True, choices=["pe", "rpe", "meps", "balanced"])
    solve.add_argument("--in", dest="infile", required=True)
    solve.add_argument("--seed", type=int, default=0, help="PRNG seed for sampled modes")
    solve.add_argument("--exact", action="store_true", help="emit the exact distribution")
    solve.add_argument("--priority", help="comma-separated agent names, highest first")
    solve.set_defaults(fn=_cmd_solve)

    audit = sub.add_parser("audit", help="audit an allocation against an instance")
    audit.add_argument("--in", dest="infile", required=True)
    audit.add_argument("--alloc", required=True)
    audit.add_argument("--alpha", help="approximation factor p/q in (0,1]")
    audit.set_defaults(fn=_cmd_audit)

    dist = sub.add_parser("distribution", help="exact outcome distribution")
    dist.add_argument("--mech", required=True, choices=["rpe", "meps"])
    dist.add_argument("--in", dest="infile", required=True)
    dist.set_defaults(fn=_cmd_distribution)

    fuzz = sub.add_parser("fuzz", help="search deviating reports for an agent")
    fuzz.add_argument("--mech", required=True, choices=["pe", "balanced", "rpe", "meps"])
    fuzz.add_argument("--in", dest="infile", required=True)
    fuzz.add_argument("--deviator", required=True, help="agent name")
    fuzz.add_argument("--space", choices=["subsets", "library"], default="subsets")
    fuzz.add_argument("--expectation", action="store_true")
    fuzz.set_defaults(fn=_cmd_fuzz)

    fixture = sub.add_parser("fixture", help="run a pinned fixture F1..F9")
    fixture.add_argument("--id", required=True)
    fixture.set_defaults(fn=_cmd_fixture)

    enum = sub.add_parser("enumerate", help="exhaustive oracle sets (small instances)")
    enum.add_argument("--in", dest="infile", required=True)
    enum.set_defaults(fn=_cmd_enumerate)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    try:
        return args.fn(args)
    except CapabilityError as exc:
        print(f"capability cap exceeded: {exc}", file=sys.stderr)
        return EXIT_CAPABILITY
    except (EgallocError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
