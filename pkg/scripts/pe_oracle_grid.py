#!/usr/bin/env python3
"""Sweep every additive demand profile on a small grid and cross-check the
prioritized egalitarian mechanism against the exhaustive oracle.

For each (n, m) slab this verifies, per profile: the PE utility vector is
the unique minimum-potential welfare-maximizing vector, and no demand-set
deviation is profitable.  Prints one summary row per slab.

Usage:
    python scripts/pe_oracle_grid.py --max-agents 3 --max-items 4
"""

import argparse
import itertools
import sys
import time
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from egalloc.lorenz import enumerate_optimal
from egalloc.mechanisms import run_pe
from egalloc.model import Instance
from egalloc.valuation import AdditiveDichotomous


def all_profiles(n, m):
    subsets = [
        frozenset(s) for k in range(m + 1) for s in itertools.combinations(range(m), k)
    ]
    return itertools.product(subsets, repeat=n)


def sweep(n, m):
    t0 = time.perf_counter()
    pe_by_profile = {}
    oracle_mismatches = 0
    instances = 0
    for demands in all_profiles(n, m):
        inst = Instance(
            item_names=tuple(f"i{j}" for j in range(m)),
            agent_names=tuple(f"a{j}" for j in range(n)),
            valuations=tuple(AdditiveDichotomous(d) for d in demands),
        )
        alloc = run_pe(inst.valuations, m)
        pe_by_profile[demands] = alloc.bundles
        vecs = enumerate_optimal(inst).min_potential_vectors()
        vec = tuple(len(b) for b in alloc.bundles)
        if len(vecs) != 1 or tuple(map(int, next(iter(vecs)))) != vec:
            oracle_mismatches += 1
        instances += 1

    profitable = 0
    deviations = 0
    subsets = [
        frozenset(s) for k in range(m + 1) for s in itertools.combinations(range(m), k)
    ]
    for demands, bundles in pe_by_profile.items():
        for v in range(n):
            truth_utility = len(bundles[v] & demands[v])
            for lie in subsets:
                if lie == demands[v]:
                    continue
                other = list(demands)
                other[v] = lie
                deviations += 1
                if len(pe_by_profile[tuple(other)][v] & demands[v]) > truth_utility:
                    profitable += 1
    return instances, oracle_mismatches, deviations, profitable, time.perf_counter() - t0


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--max-agents", type=int, default=3)
    parser.add_argument("--max-items", type=int, default=4)
    args = parser.parse_args()

    print(f"{'n':>2} {'m':>2} {'instances':>10} {'oracle-miss':>12} "
          f"{'deviations':>11} {'profitable':>11} {'seconds':>8}")
    for n in range(2, args.max_agents + 1):
        for m in range(2, args.max_items + 1):
            inst, miss, dev, prof, secs = sweep(n, m)
            print(f"{n:>2} {m:>2} {inst:>10} {miss:>12} {dev:>11} {prof:>11} {secs:>8.2f}")
    print("\nevery row should show 0 oracle mismatches and 0 profitable deviations")


if __name__ == "__main__":
    main()
