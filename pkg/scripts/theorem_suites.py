"""Run the additive-fragment property checks and report counterexample counts."""

import argparse
import time

from mumall.logic import Formula, formula_str
from mumall.suites import (
    SuiteConfig, agreement_counterexamples, cut_counterexamples, initial_counterexamples,
    oracle_table, strengthening_counterexamples, weakening_contraction_counterexamples,
)


def show(x) -> str:
    if isinstance(x, Formula):
        return formula_str(x)
    if isinstance(x, tuple):
        return "[" + ", ".join(show(y) for y in x) + "]"
    return str(x)


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--depth", type=int, default=3)
    ap.add_argument("--max-size", type=int, default=3)
    ap.add_argument("--constants", nargs="*", default=[],
                    help="constants for closed =/!= literals (none: propositional only)")
    ap.add_argument("--agreement", action="store_true",
                    help="also compare prove_mall with the oracle on every multiset")
    args = ap.parse_args()

    config = SuiteConfig(args.depth, args.max_size, tuple(args.constants))
    start = time.perf_counter()
    table = oracle_table(config)
    print(f"{table.n} formulas, {len(table.codes)} multisets, "
          f"{int(table.values.sum())} provable ({time.perf_counter() - start:.1f}s)")
    checks = [
        ("strengthening", lambda: strengthening_counterexamples(table)),
        ("weakening/contraction", lambda: weakening_contraction_counterexamples(table)),
        ("initial", lambda: initial_counterexamples(table.formulas)),
        ("cut", lambda: cut_counterexamples(table)),
    ]
    if args.agreement:
        checks.append(("prove_mall agreement", lambda: agreement_counterexamples(table)))
    for name, run in checks:
        t = time.perf_counter()
        bad = run()
        print(f"{name:22} {len(bad):6} counterexamples  {time.perf_counter() - t:6.1f}s")
        for example in bad[:3]:
            print("   ", show(example))
    print(f"total {time.perf_counter() - start:.1f}s")


if __name__ == "__main__":
    main()
