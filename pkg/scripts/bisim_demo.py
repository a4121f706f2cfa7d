"""Decide bisimilarity of every state pair in random LTSs by proof search and compare
with partition refinement."""

import argparse
import time

import numpy as np

from mumall.kernel import RuleConfig
from mumall.lts import bisimilarity, problem_text, random_lts, state_pairs
from mumall.search import Proved, SearchBudget, prove
from mumall.syntax import parse_problem_file


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--instances", type=int, default=20)
    ap.add_argument("--states", type=int, default=4)
    ap.add_argument("--seed", type=int, default=2026)
    ap.add_argument("--timeout-ms", type=int, default=60_000)
    args = ap.parse_args()

    rng = np.random.default_rng(args.seed)
    disagreements = 0
    for k in range(args.instances):
        lts = random_lts(rng, n_states=args.states)
        pairs = state_pairs(lts)
        related = bisimilarity(lts)
        problem = parse_problem_file(problem_text(lts, pairs, [pq in related for pq in pairs]))
        start = time.perf_counter()
        proved = 0
        for goal in problem.goals:
            r = prove(goal.sequent, problem.definitions, SearchBudget(wall_clock_ms=args.timeout_ms),
                      RuleConfig(), problem.signature)
            if isinstance(r, Proved):
                proved += 1
            else:
                disagreements += 1
                print(f"  instance {k}: {goal.name} -> {type(r).__name__}")
        print(f"instance {k:2}: {len(lts.steps):2} steps, {len(related):2} related pairs, "
              f"{proved}/{len(problem.goals)} verdicts proved in {time.perf_counter() - start:.2f}s")
    print(f"disagreements: {disagreements}")


if __name__ == "__main__":
    main()
