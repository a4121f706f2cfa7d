"""Proof search: a decision procedure for the fixed-point-free fragment, a tabled
unfolding search for fixed points, and (co)invariant synthesis over finite domains."""

from __future__ import annotations

import sys
from collections import Counter
import threading
import time
from dataclasses import dataclass
from functools import lru_cache
from itertools import product
from typing import Iterable

from .kernel import (
    Certificate, RuleApp, RuleConfig, Sequent, UNFOLD_RULES, check_certificate, eigen_name,
    expand_rule, sequent_key, splits, theta_tuple,
)
from .logic import (
    Abstraction, All, AndNeg, AndPos, Definitions, Eq, Ex, FalseNeg, FalsePos, Formula, Imp, Mu,
    Neq, Nu, OrNeg, OrPos, TrueNeg, TruePos, _cached, abstraction_key, alpha_eq, alpha_key,
    constructors, disjunction, has_fixed_points, inline_nonrecursive, instantiate,
    is_recursive, subst, tensor, unfold,
)
from .terms import (
    App, Signature, Term, Var, apply_substitution, compose, enumerate_terms, subterms, term_vars,
    unify,
)


@dataclass(frozen=True)
class SearchBudget:
    max_unfoldings: int = 64
    max_depth: int = 4096
    witness_depth: int | None = None  # None: use the rule config's bound
    wall_clock_ms: int = 60_000

    def __post_init__(self):
        for name in ("max_unfoldings", "max_depth", "wall_clock_ms"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if self.witness_depth is not None and self.witness_depth <= 0:
            raise ValueError("witness_depth must be positive")


@dataclass(frozen=True)
class Proved:
    certificate: Certificate


@dataclass(frozen=True)
class NoProof:
    exhausted: bool = True


@dataclass(frozen=True)
class BudgetExceeded:
    loop_table: frozenset = frozenset()


SearchOutcome = Proved | NoProof | BudgetExceeded


class LoopTable:
    """Status of every canonical sequent visited by one search."""

    IN_PROGRESS, FAILED, PROVED = "in-progress", "failed", "proved"

    def __init__(self):
        self.visited: dict[str, str] = {}

    def mark(self, key: str, status: str) -> None:
        self.visited[key] = status

    def status(self, key: str) -> str | None:
        return self.visited.get(key)

    def __len__(self) -> int:
        return len(self.visited)

    def __contains__(self, key: str) -> bool:
        return key in self.visited


def _memo_key(s: Sequent):
    """α-canonical key when fixed points occur (loop detection needs it); otherwise
    a cheap multiset key, since fixed-point-free search cannot loop."""
    if any(has_fixed_points(f) for f in s.left) or any(has_fixed_points(f) for f in s.right):
        return sequent_key(s)
    return s.vars, frozenset(Counter(s.left).items()), frozenset(Counter(s.right).items())


@dataclass(frozen=True)
class _Fail:
    loops: frozenset = frozenset()  # ancestor keys the failure depends on
    budget: bool = False

    @property
    def clean(self) -> bool:
        return not self.loops and not self.budget


def _join(fails: Iterable[_Fail]) -> _Fail:
    loops: frozenset = frozenset()
    budget = False
    for f in fails:
        loops |= f.loops
        budget = budget or f.budget
    return _Fail(loops, budget)


class _Timeout(Exception):
    pass


def infer_signature(s: Sequent) -> Signature:
    """Constructors mentioned in s; a lone constant `a` is added when none is."""
    entries: dict[str, int] = {}
    for f in s.left + s.right:
        for name, arity in constructors(f):
            entries[name] = arity
    if not any(a == 0 for a in entries.values()):
        entries.setdefault("a", 0)
    return Signature(entries)


def _ground_size(f: Formula) -> int:
    return sum(1 for t in f.args if not term_vars(t) for _ in subterms(t))


def _disjuncts(f: Formula) -> list[Formula]:
    return _disjuncts(f.a) + _disjuncts(f.b) if isinstance(f, OrPos) else [f]


def _consistent(f: Formula) -> bool:
    """False when the positive conjunction f contains jointly non-unifiable equations."""
    theta: dict = {}
    stack = [f]
    k = 0
    while stack:
        g = stack.pop()
        if isinstance(g, AndPos):
            stack += [g.a, g.b]
        elif isinstance(g, Ex):
            k += 1
            stack.append(subst(g.body, {g.var: Var(f"_e{k}")}))
        elif isinstance(g, FalsePos):
            return False
        elif isinstance(g, Eq):
            sigma = unify(apply_substitution(theta, g.left), apply_substitution(theta, g.right))
            if sigma is None:
                return False
            theta = compose(theta, sigma)
    return True


def unfolding_branches(f: Mu) -> int:
    """Number of disjuncts of f's unfolding that are not refuted by unification alone."""
    return _cached(f, "_branches",
                   lambda g: sum(1 for d in _disjuncts(unfold(g)) if _consistent(d)))


def _top_equations(f: Formula, out: list) -> None:
    if isinstance(f, (Eq, Neq)):
        out.append(f)
    elif isinstance(f, (AndPos, AndNeg, OrPos, OrNeg, Imp)):
        _top_equations(f.a, out)
        _top_equations(f.b, out)
    elif isinstance(f, (Ex, All)):
        _top_equations(f.body, out)


def witness_candidates(s: Sequent, f: Ex | All, sig: Signature, depth: int) -> list[Term]:
    """Witnesses for f's bound variable: those forced by an equation in the body, then
    every Σ(𝒳)-term up to the depth bound."""
    probe = eigen_name("w", s, sig)
    probe = eigen_name(probe + "_probe", Sequent(s.vars + (probe,), (), ()), sig)
    body = subst(f.body, {f.var: Var(probe)})
    eqs: list = []
    _top_equations(body, eqs)
    ctx = set(s.vars)
    out: list[Term] = []
    for e in eqs:
        theta = unify(e.left, e.right)
        if theta is None:
            continue
        t = theta.get(probe)
        if t is None:
            t = next((Var(v) for v, u in theta.items() if u == Var(probe) and v in ctx), None)
        if t is not None and term_vars(t) <= ctx and t not in out:
            try:
                sig.check_term(t, s.vars)
            except ValueError:
                continue
            out.append(t)
    seen = set(out)
    out.extend(t for t in enumerate_terms(sig, s.vars, depth) if t not in seen)
    return out


AXIOMS_ANY = (("R", TrueNeg, "TrueNegR"), ("L", FalsePos, "FalsePosL"))
AXIOMS_ALONE = (("R", Eq, "EqR"), ("L", Neq, "NeqL"), ("R", TruePos, "TruePosR"),
                ("L", FalseNeg, "FalseNegL"))
INVERTIBLE = (
    ("L", TruePos, "TruePosL"), ("R", FalseNeg, "FalseNegR"),
    ("L", Eq, "EqLUnify"), ("R", Neq, "NeqRUnify"),
    ("L", AndPos, "AndPosL"), ("R", OrNeg, "OrNegR"), ("R", Imp, "ImpR"),
    ("R", All, "AllR"), ("L", Ex, "ExL"),
    ("R", AndNeg, "AndNegR"), ("L", OrPos, "OrL"),
)


class Prover:
    """One proof attempt: owns its loop table, memo tables and clock."""

    def __init__(self, signature: Signature, config: RuleConfig = RuleConfig(),
                 budget: SearchBudget | None = None):
        self.sig = signature
        self.config = config
        self.budget = budget
        self.witness_depth = (budget.witness_depth if budget and budget.witness_depth
                              else config.witness_depth)
        self.max_depth = budget.max_depth if budget else None
        self.deadline = (time.monotonic() + budget.wall_clock_ms / 1000) if budget else None
        self.table = LoopTable()
        self.proved: dict[Sequent, Certificate] = {}
        self.failed: dict[str, list[tuple[frozenset, bool, int | None]]] = {}
        self.verified: dict = {}
        self.ancestors: set[str] = set()
        self.loop_sequents: dict[str, Sequent] = {}
        self.invariants: dict[str, Abstraction | None] = {}
        self.coinvariants: dict[str, Abstraction | None] = {}
        self.nodes = 0

    # ---------------------------------------------------------------- core

    def search(self, s: Sequent, fuel: int | None = None, depth: int = 0) -> Certificate | _Fail:
        self.nodes += 1
        if self.deadline is not None and self.nodes % 64 == 0 and time.monotonic() > self.deadline:
            raise _Timeout
        cert = self.proved.get(s)
        if cert is not None:
            return cert
        key = _memo_key(s)
        if key in self.ancestors:
            self.loop_sequents.setdefault(key, s)
            return _Fail(frozenset((key,)))
        for loops, bud, f in self.failed.get(key, ()):
            if loops <= self.ancestors and (not bud or fuel is None or fuel <= f):
                return _Fail(loops, bud)
        if self.max_depth is not None and depth > self.max_depth:
            return _Fail(budget=True)
        self.ancestors.add(key)
        self.table.mark(key, LoopTable.IN_PROGRESS)
        try:
            res = self._expand(s, key, fuel, depth)
        finally:
            self.ancestors.discard(key)
        if isinstance(res, Certificate):
            self.proved[s] = res
            self.table.mark(key, LoopTable.PROVED)
            return res
        res = _Fail(res.loops - {key}, res.budget)
        self.failed.setdefault(key, []).append((res.loops, res.budget, fuel))
        self.table.mark(key, LoopTable.FAILED)
        return res

    def close(self, s: Sequent, r: RuleApp, fuel: int | None, depth: int) -> Certificate | _Fail:
        if r.tag in UNFOLD_RULES and fuel is not None:
            fuel -= 1
            if fuel < 0:
                return _Fail(budget=True)
        kids = []
        for p in expand_rule(s, r, self.sig):
            sub = self.search(p, fuel, depth + 1)
            if isinstance(sub, _Fail):
                return sub
            kids.append(sub)
        return Certificate(s, r, tuple(kids))

    def _expand(self, s: Sequent, key: str, fuel, depth) -> Certificate | _Fail:
        cert = self._axiom(s)
        if cert is not None:
            return cert
        r = self._invertible(s)
        if r is not None:
            return self.close(s, r, fuel, depth)
        fails: list[_Fail] = []

        mus = [i for i, f in enumerate(s.left) if isinstance(f, Mu)]
        if mus:
            i = min(mus, key=lambda k: (unfolding_branches(s.left[k]), is_recursive(s.left[k].abs),
                                        -_ground_size(s.left[k]), k))
            res = self.close(s, RuleApp("MuLUnfold", i), fuel, depth)
            if isinstance(res, Certificate) or res.clean:
                return res
            fails.append(res)
            if key in res.loops and self.config.allow_induction:
                ind = self._induction(s, i, fuel, depth)
                if isinstance(ind, Certificate):
                    return ind
                if ind is not None:
                    fails.append(ind)
            if not res.loops:
                return _join(fails)

        nus = [i for i, f in enumerate(s.right) if isinstance(f, Nu)]
        if nus:
            i = nus[0]
            if self.config.allow_induction:
                co = self._coinduction(s, i, fuel, depth)
                if isinstance(co, Certificate):
                    return co
                if co is not None:
                    fails.append(co)
            res = self.close(s, RuleApp("NuRUnfold", i), fuel, depth)
            return res if isinstance(res, Certificate) else _join(fails + [res])

        for side, ctx, conn, tag in (("R", s.right, Mu, "MuR"), ("L", s.left, Nu, "NuL")):
            for i, f in enumerate(ctx):
                if isinstance(f, conn):
                    res = self.close(s, RuleApp(tag, i), fuel, depth)
                    if isinstance(res, Certificate):
                        return res
                    return _join(fails + [res])

        for r in self._choices(s):
            res = self.close(s, r, fuel, depth)
            if isinstance(res, Certificate):
                return res
            fails.append(res)
        return _join(fails)

    # -------------------------------------------------------------- phases

    def _axiom(self, s: Sequent) -> Certificate | None:
        for side, conn, tag in AXIOMS_ANY:
            for i, f in enumerate(s.right if side == "R" else s.left):
                if isinstance(f, conn):
                    return Certificate(s, RuleApp(tag, i))
        for i, f in enumerate(s.left):
            if isinstance(f, Eq) and unify(f.left, f.right) is None:
                return Certificate(s, RuleApp("EqLClash", i))
        for i, f in enumerate(s.right):
            if isinstance(f, Neq) and unify(f.left, f.right) is None:
                return Certificate(s, RuleApp("NeqRClash", i))
        if len(s.left) + len(s.right) == 1:
            for side, conn, tag in AXIOMS_ALONE:
                ctx = s.right if side == "R" else s.left
                if ctx and isinstance(ctx[0], conn):
                    f = ctx[0]
                    if not isinstance(f, (Eq, Neq)) or f.left == f.right:
                        return Certificate(s, RuleApp(tag, 0))
        if (self.config.allow_init and len(s.left) == 1 and len(s.right) == 1
                and isinstance(s.left[0], (Mu, Nu)) and alpha_eq(s.left[0], s.right[0])):
            return Certificate(s, RuleApp("MuInit" if isinstance(s.left[0], Mu) else "NuInit", 0))
        return None

    def _invertible(self, s: Sequent) -> RuleApp | None:
        for side, conn, tag in INVERTIBLE:
            ctx = s.right if side == "R" else s.left
            for i, f in enumerate(ctx):
                if not isinstance(f, conn):
                    continue
                if tag in ("EqLUnify", "NeqRUnify"):
                    return RuleApp(tag, i, theta=theta_tuple(unify(f.left, f.right)))
                if tag in ("AllR", "ExL"):
                    return RuleApp(tag, i, fresh=eigen_name(f.var, s, self.sig))
                return RuleApp(tag, i)
        return None

    def _choices(self, s: Sequent):
        for i, f in enumerate(s.right):
            if isinstance(f, OrPos):
                yield RuleApp("OrR1", i)
                yield RuleApp("OrR2", i)
        for i, f in enumerate(s.left):
            if isinstance(f, AndNeg):
                yield RuleApp("AndNegL1", i)
                yield RuleApp("AndNegL2", i)
        for side, ctx, conn, tag in (("R", s.right, Ex, "ExR"), ("L", s.left, All, "AllL")):
            for i, f in enumerate(ctx):
                if isinstance(f, conn):
                    for t in witness_candidates(s, f, self.sig, self.witness_depth):
                        yield RuleApp(tag, i, witness=t)
        for side, ctx, conn, tag in (("R", s.right, AndPos, "AndPosR"), ("L", s.left, Imp, "ImpL"),
                                     ("L", s.left, OrNeg, "OrNegL")):
            for i, f in enumerate(ctx):
                if isinstance(f, conn):
                    for sp in splits(s, side, i, self.config.enumerate_splits):
                        yield RuleApp(tag, i, split=sp)

    def _induction(self, s: Sequent, i: int, fuel, depth) -> Certificate | _Fail | None:
        fp = s.left[i]
        k = alpha_key(fp)
        if k not in self.invariants:
            self.invariants[k] = synthesize_invariant(s, fp, signature=self.sig, config=self.config)
        inv = self.invariants[k]
        if inv is None:
            return None
        return self.close(s, RuleApp("MuLInd", i, invariant=inv), fuel, depth)

    def _coinduction(self, s: Sequent, i: int, fuel, depth) -> Certificate | _Fail | None:
        fp = s.right[i]
        k = abstraction_key(fp.abs)
        if k not in self.coinvariants:
            self.coinvariants[k] = synthesize_coinvariant(s, fp, signature=self.sig,
                                                          config=self.config)
        inv = self.coinvariants[k]
        if inv is None or not _member(inv, fp.args):
            return None
        return self.close(s, RuleApp("NuRCoind", i, invariant=inv), fuel, depth)


# ------------------------------------------------------------ entry points

_DEEP_STACK = 512 * 1024 * 1024


def _run_deep(fn):
    """Run fn on a thread with a large stack so deep proofs do not overflow."""
    limit = sys.getrecursionlimit()
    sys.setrecursionlimit(max(limit, 200_000))
    box: dict = {}

    def target():
        try:
            box["value"] = fn()
        except BaseException as e:  # re-raised on the calling thread
            box["error"] = e

    old = threading.stack_size()
    threading.stack_size(_DEEP_STACK)
    try:
        t = threading.Thread(target=target, daemon=True)
        t.start()
    finally:
        threading.stack_size(old)
    t.join()
    # the limit is process-wide; a high value would let the main thread's
    # small stack overflow instead of raising RecursionError
    sys.setrecursionlimit(limit)
    if "error" in box:
        raise box["error"]
    return box["value"]


def _verified(cert: Certificate, config: RuleConfig, sig: Signature,
              cache: dict | None = None) -> Proved:
    verdict = check_certificate(cert, config, sig, cache)
    if not verdict:
        raise AssertionError(f"search produced an invalid certificate: {verdict}")
    return Proved(cert)


def prove_mall(s: Sequent, config: RuleConfig = RuleConfig(),
               signature: Signature | None = None, prover: Prover | None = None) -> SearchOutcome:
    """Decide a fixed-point-free sequent (complete up to the witness-depth bound).

    Passing a `prover` shares its memo tables across calls.
    """
    if any(has_fixed_points(f) for f in s.left + s.right):
        raise ValueError("prove_mall: sequent contains fixed points")
    sig = signature or (prover.sig if prover else infer_signature(s))
    prover = prover or Prover(sig, config)
    size = sum(1 for _ in s.left + s.right)
    res = prover.search(s) if size < 64 else _run_deep(lambda: prover.search(s))
    if isinstance(res, Certificate):
        return _verified(res, prover.config, sig, prover.verified)
    return NoProof()


def prove(s: Sequent, defs: Definitions | None = None, budget: SearchBudget = SearchBudget(),
          config: RuleConfig = RuleConfig(), signature: Signature | None = None) -> SearchOutcome:
    """Search for a proof of s; fixed-point goals never yield NoProof.

    `defs` is accepted for symmetry with the problem loader: sequents arrive
    with every named predicate already expanded.
    """
    sig = signature or infer_signature(s)
    prover = Prover(sig, config, budget)

    def deepen():
        # Iterative deepening on the unfolding budget finds shallow proofs
        # first; memo tables carry over between rounds.
        fuel = min(4, budget.max_unfoldings)
        while True:
            res = prover.search(s, fuel, 0)
            if isinstance(res, Certificate) or not res.budget or fuel >= budget.max_unfoldings:
                return res
            fuel = min(2 * fuel, budget.max_unfoldings)

    try:
        res = _run_deep(deepen)
    except _Timeout:
        return BudgetExceeded(frozenset(prover.loop_sequents.values()))
    if isinstance(res, Certificate):
        return _verified(res, config, sig)
    if res.clean and not any(has_fixed_points(f) for f in s.left + s.right):
        return NoProof()
    return BudgetExceeded(frozenset(prover.loop_sequents.values()))


# -------------------------------------------------------------- synthesis

def tuple_predicate(params: tuple, tuples: Iterable[tuple]) -> Abstraction:
    """λx̄. ⋁_{ū} (x₁ = u₁ ∧⁺ ... ∧⁺ xₙ = uₙ)."""
    body = disjunction(tensor(Eq(Var(x), u) for x, u in zip(params, us)) for us in tuples)
    return Abstraction("S", tuple(params), body)


def predicate_tuples(a: Abstraction, sig: Signature) -> set[tuple]:
    """Ground tuples over the signature's constants that satisfy a (by proof search)."""
    out = set()
    for us in product([App(c) for c in sig.constants], repeat=a.arity):
        if _member(a, us, sig):
            out.add(us)
    return out


def _member(a: Abstraction, args: tuple, sig: Signature | None = None) -> bool:
    from .logic import apply_abstraction
    f = apply_abstraction(a, tuple(args))
    if has_fixed_points(f):
        return False
    if any(term_vars(t) for t in args):
        return False
    return isinstance(prove_mall(Sequent((), (), (f,)), signature=sig), Proved)


def _domain(fp: Mu | Nu, sig: Signature | None) -> list[tuple] | None:
    if sig is None or not sig.is_finite or not sig.constants:
        return None
    for name, arity in constructors(fp):
        if arity > 0:
            return None
    return list(product([App(c) for c in sig.constants], repeat=fp.abs.arity))


def reachable_tuples(fp: Mu, cap: int = 20_000) -> set[tuple] | None:
    """Argument tuples of fp's predicate met while saturating left rules from ⟨fp ⊢ ·⟩.

    Returns None when a met tuple is not ground or the exploration exceeds cap states.
    """
    target = abstraction_key(fp.abs)
    if any(term_vars(t) for t in fp.args):
        return None
    found = {tuple(fp.args)}
    roots = [tuple(fp.args)]
    counter = [0]
    steps = 0

    def fresh() -> str:
        counter[0] += 1
        return f"_r{counter[0]}"

    while roots:
        args = roots.pop()
        stack: list[tuple] = [(unfold(Mu(fp.abs, args)),)]
        seen: set[tuple] = set()
        while stack:
            fs = stack.pop()
            if fs in seen:
                continue
            seen.add(fs)
            steps += 1
            if steps > cap:
                return None
            j = next((k for k, f in enumerate(fs)
                      if not (isinstance(f, Mu) and abstraction_key(f.abs) == target)), None)
            if j is None:
                for f in fs:
                    us = tuple(f.args)
                    if any(term_vars(t) for t in us):
                        return None
                    if us not in found:
                        found.add(us)
                        roots.append(us)
                continue
            f, rest = fs[j], fs[:j] + fs[j + 1:]
            if isinstance(f, Eq):
                theta = unify(f.left, f.right)
                if theta is not None:
                    stack.append(tuple(subst(g, theta) for g in rest))
            elif isinstance(f, OrPos) or isinstance(f, AndNeg):
                stack.append(rest + (f.b,))
                stack.append(rest + (f.a,))
            elif isinstance(f, AndPos):
                stack.append(rest + (f.a, f.b))
            elif isinstance(f, Ex):
                stack.append(rest + (subst(f.body, {f.var: Var(fresh())}),))
            elif isinstance(f, FalsePos):
                pass
            elif isinstance(f, Mu) and not is_recursive(f.abs):
                stack.append(rest + (unfold(f),))
            else:
                stack.append(rest)
    return found


def synthesize_invariant(goal: Sequent, fp: Mu, defs: Definitions | None = None, *,
                         signature: Signature | None = None,
                         config: RuleConfig = RuleConfig()) -> Abstraction | None:
    """Complement of the tuples reachable from fp, if it is a provable invariant for goal."""
    dom = _domain(fp, signature)
    if dom is None:
        return None
    found = reachable_tuples(fp)
    if found is None:
        return None
    inv = tuple_predicate(fp.abs.params, [u for u in dom if u not in found])
    i = next((k for k, f in enumerate(goal.left) if alpha_eq(f, fp)), None)
    if i is None:
        return None
    checker = Prover(signature, config, SearchBudget())
    try:
        for p in expand_rule(goal, RuleApp("MuLInd", i, invariant=inv), signature):
            if not isinstance(_run_deep(lambda: checker.search(p, 64, 0)), Certificate):
                return None
    except _Timeout:
        return None
    return inv


def synthesize_coinvariant(goal: Sequent, fp: Nu, defs: Definitions | None = None, *,
                           signature: Signature | None = None,
                           config: RuleConfig = RuleConfig()) -> Abstraction | None:
    """Greatest fixed point of fp's body over the finite tuple domain, by iteration."""
    if _domain(fp, signature) is None:
        return None
    return _greatest_fixed_point(fp.abs, signature, config)


@lru_cache(maxsize=256)
def _greatest_fixed_point(a: Abstraction, signature: Signature,
                          config: RuleConfig) -> Abstraction | None:
    # depends only on the abstraction, so every goal over the same predicate shares it
    current = list(product([App(c) for c in signature.constants], repeat=a.arity))
    mall = Prover(signature, config)
    while True:
        inv = tuple_predicate(a.params, current)
        kept = []
        for us in current:
            body = inline_nonrecursive(instantiate(Nu(a, us), inv))
            if has_fixed_points(body):
                return None
            if isinstance(prove_mall(Sequent((), (), (body,)), config, signature, prover=mall), Proved):
                kept.append(us)
        if len(kept) == len(current):
            return inv
        current = kept
        mall = Prover(signature, config)


# --------------------------------------------------------- additive oracle

_ADDITIVE = (AndNeg, TrueNeg, OrPos, FalsePos)


def _check_additive(f: Formula) -> None:
    if isinstance(f, (AndNeg, OrPos)):
        _check_additive(f.a)
        _check_additive(f.b)
    elif isinstance(f, (Eq, Neq)):
        if term_vars(f.left) or term_vars(f.right):
            raise ValueError("additive_oracle: equality literals must be closed")
    elif not isinstance(f, _ADDITIVE):
        raise ValueError(f"additive_oracle: {type(f).__name__} is not an additive connective")


def _norm(fs: Iterable[Formula]) -> tuple:
    return tuple(sorted(fs, key=alpha_key))


def additive_oracle(delta: Iterable[Formula]) -> bool:
    """Provability of the one-sided sequent ⊢ Δ using only the additive rules."""
    delta = list(delta)
    for f in delta:
        _check_additive(f)
    return _oracle(_norm(delta))


@lru_cache(maxsize=None)
def _oracle(ms: tuple) -> bool:
    for i, f in enumerate(ms):
        if isinstance(f, TrueNeg):
            return True
        if isinstance(f, Eq) and f.left == f.right:
            return True
        if isinstance(f, Neq) and f.left != f.right:
            return True
    for i, f in enumerate(ms):
        rest = ms[:i] + ms[i + 1:]
        if isinstance(f, AndNeg):
            if _oracle(_norm(rest + (f.a,))) and _oracle(_norm(rest + (f.b,))):
                return True
        elif isinstance(f, OrPos):
            if _oracle(_norm(rest + (f.a,))) or _oracle(_norm(rest + (f.b,))):
                return True
    return False
