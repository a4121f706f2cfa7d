"""Command line: `mumall prove FILE ...` and `mumall check CERT FILE`."""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

from .certificates import (
    FORMAT_VERSION, CertDocument, CertificateError, DigestMismatch, deserialize_certificate,
    problem_digest, write_certificate,
)
from .kernel import RuleConfig, check_certificate, sequents_match
from .search import BudgetExceeded, NoProof, Proved, SearchBudget, prove
from .syntax import ParseError, ProblemFile, parse_problem_file

OUTCOME = {Proved: "PROVED", NoProof: "NO-PROOF", BudgetExceeded: "BUDGET-EXCEEDED"}


class UsageError(Exception):
    pass


def _positive(text: str) -> int:
    try:
        n = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"{text!r} is not an integer") from None
    if n <= 0:
        raise argparse.ArgumentTypeError("must be positive")
    return n


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="mumall", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("prove", help="search for proofs of the goals in a problem file")
    p.add_argument("file")
    p.add_argument("--goal", action="append", metavar="NAME",
                   help="goal to prove (repeatable; default: all goals)")
    p.add_argument("--budget", type=_positive, default=64, metavar="N",
                   help="fixed-point unfoldings allowed per branch (default 64)")
    p.add_argument("--witness-depth", type=_positive, default=3, metavar="D",
                   help="depth bound for enumerated quantifier witnesses (default 3)")
    p.add_argument("--enable-init", action="store_true", help="allow the fixed-point initial rules")
    p.add_argument("--enable-cut", action="store_true", help="allow cut in certificates")
    p.add_argument("--emit-cert", metavar="PATH",
                   help="write certificates: a .muproof file for a single goal, else a directory")
    p.add_argument("--timeout-ms", type=_positive, default=60_000, metavar="T",
                   help="wall-clock limit per goal (default 60000)")
    p.add_argument("--json", action="store_true", help="print a machine-readable summary")

    c = sub.add_parser("check", help="check a certificate against a problem file")
    c.add_argument("cert")
    c.add_argument("file")
    c.add_argument("--json", action="store_true", help="print a machine-readable verdict")
    return ap


def load_problem(path: str) -> tuple[ProblemFile, bytes]:
    try:
        data = Path(path).read_bytes()
    except OSError as e:
        raise UsageError(f"{path}: {e.strerror}") from None
    try:
        text = data.decode("utf-8")
    except UnicodeDecodeError:
        raise UsageError(f"{path}: not valid UTF-8") from None
    try:
        return parse_problem_file(text), data
    except ParseError as e:
        where = ":".join(str(n) for n in (e.line, e.col) if n)
        raise UsageError(f"{path}:{where}: {e.msg}" if where else f"{path}: {e.msg}") from None
    except ValueError as e:
        raise UsageError(f"{path}: {e}") from None


def _cert_paths(target: str, names: list[str]) -> dict[str, Path]:
    t = Path(target)
    if t.suffix == ".muproof":
        if len(names) != 1:
            raise UsageError("--emit-cert names a single file but several goals are selected")
        return {names[0]: t}
    return {n: t / f"{n}.muproof" for n in names}


def run_prove(args) -> int:
    problem, data = load_problem(args.file)
    names = [g.name for g in problem.goals]
    if args.goal:
        for n in args.goal:
            if n not in names:
                raise UsageError(f"{args.file}: no goal named {n!r}")
        names = [n for n in names if n in set(args.goal)]
    if not names:
        raise UsageError(f"{args.file}: no goals")
    config = RuleConfig(allow_cut=args.enable_cut, allow_init=args.enable_init,
                        witness_depth=args.witness_depth)
    budget = SearchBudget(max_unfoldings=args.budget, witness_depth=args.witness_depth,
                          wall_clock_ms=args.timeout_ms)
    paths = _cert_paths(args.emit_cert, names) if args.emit_cert else {}
    records = []
    for name in names:
        start = time.perf_counter()
        out = prove(problem.goal(name).sequent, problem.definitions, budget, config, problem.signature)
        rec = {"goal": name, "outcome": OUTCOME[type(out)],
               "seconds": round(time.perf_counter() - start, 4)}
        if isinstance(out, Proved):
            rec["rules"] = out.certificate.size()
            if name in paths:
                paths[name].parent.mkdir(parents=True, exist_ok=True)
                write_certificate(paths[name], CertDocument(
                    FORMAT_VERSION, problem_digest(data), name, config, out.certificate,
                    problem.signature))
                rec["certificate"] = str(paths[name])
        records.append(rec)
        if not args.json:
            extra = f" ({rec['rules']} rules)" if "rules" in rec else ""
            print(f"{name}: {rec['outcome']}{extra}", flush=True)
    if args.json:
        print(json.dumps({"file": args.file, "goals": records}, indent=2))
    return 0 if all(r["outcome"] == "PROVED" for r in records) else 1


def run_check(args) -> int:
    try:
        raw = Path(args.cert).read_bytes()
    except OSError as e:
        raise UsageError(f"{args.cert}: {e.strerror}") from None
    tampered = False
    try:
        doc = deserialize_certificate(raw)
    except DigestMismatch:
        # well-formed but edited: still load it so the checker can point at the node
        tampered = True
        try:
            doc = deserialize_certificate(raw, verify_digest=False)
        except CertificateError as e:
            raise UsageError(f"{args.cert}: {e}") from None
    except CertificateError as e:
        raise UsageError(f"{args.cert}: {e}") from None
    problem, data = load_problem(args.file)

    def verdict(ok: bool, message: str, path: str | None = None) -> int:
        if args.json:
            print(json.dumps({"ok": ok, "goal": doc.goal_name, "path": path, "message": message}))
        else:
            print(message if ok else f"FAILED: {message}")
        return 0 if ok else 1

    if doc.problem_hash != problem_digest(data):
        return verdict(False, "problem file hash does not match the certificate")
    if not any(g.name == doc.goal_name for g in problem.goals):
        return verdict(False, f"problem has no goal named {doc.goal_name!r}")
    if doc.signature != problem.signature:
        return verdict(False, "certificate signature differs from the problem's")
    goal = problem.goal(doc.goal_name).sequent
    if not sequents_match(doc.root.conclusion, goal):
        return verdict(False, "certificate root does not prove the named goal", "root")
    result = check_certificate(doc.root, doc.config, problem.signature)
    if not result:
        return verdict(False, f"node {result.path}: {result.reason}", result.path)
    if tampered:
        return verdict(False, "certificate digest does not match its contents")
    return verdict(True, f"OK {doc.goal_name}")


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return run_prove(args) if args.command == "prove" else run_check(args)
    except UsageError as e:
        print(f"mumall: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
