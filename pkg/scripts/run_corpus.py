"""Prove every goal in the problems/ corpus and print outcome, time and certificate size."""

import argparse
import time
from pathlib import Path

from mumall.kernel import RuleConfig
from mumall.search import Proved, SearchBudget, prove
from mumall.syntax import parse_problem_file

ROOT = Path(__file__).resolve().parent.parent / "problems"

# witness depth and init flag each goal needs
SETTINGS = {"plus_comm": (21, False), "nat_refl": (3, True)}


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--dir", type=Path, default=ROOT)
    args = ap.parse_args()
    for path in sorted(args.dir.glob("*.mu")):
        problem = parse_problem_file(path.read_text())
        for goal in problem.goals:
            depth, init = SETTINGS.get(goal.name, (3, False))
            config = RuleConfig(allow_init=init, witness_depth=depth)
            start = time.perf_counter()
            r = prove(goal.sequent, problem.definitions, SearchBudget(witness_depth=depth),
                      config, problem.signature)
            elapsed = time.perf_counter() - start
            size = r.certificate.size() if isinstance(r, Proved) else "-"
            print(f"{path.name:12} {goal.name:10} {type(r).__name__:15} {elapsed:7.3f}s  rules={size}")


if __name__ == "__main__":
    main()
