"""Two-sided µMALL sequent calculus with equality: rule expansion and proof checking."""

from __future__ import annotations

import re
from dataclasses import dataclass, field, replace
from itertools import combinations
from typing import Iterator

from .logic import (
    Abstraction, All, AndNeg, AndPos, Eq, Ex, FalseNeg, FalsePos, Formula, FormulaError, Imp,
    Mu, Neq, Nu, OrNeg, OrPos, TrueNeg, TruePos, abstraction_free_vars, alpha_eq, alpha_key,
    apply_abstraction, constructors, formula_str, free_predvars, free_vars, instantiate,
    instantiate_quantifier, subst, unfold,
)
from .terms import (
    Signature, SignatureError, Term, Var, apply_substitution, enumerate_terms, fresh_name, node,
    term_vars, unify,
)


class RuleError(ValueError):
    pass


@node
class Sequent:
    vars: tuple
    left: tuple
    right: tuple

    def __str__(self) -> str:
        ctx = ", ".join(self.vars)
        lhs = ", ".join(formula_str(f) for f in self.left)
        rhs = ", ".join(formula_str(f) for f in self.right)
        return f"{ctx}; {lhs} |- {rhs}".strip()

    def free_vars(self) -> set[str]:
        out: set[str] = set()
        for f in self.left + self.right:
            out |= free_vars(f)
        return out


@dataclass(frozen=True)
class RuleConfig:
    allow_cut: bool = False
    allow_init: bool = False
    allow_induction: bool = True
    witness_depth: int = 3
    enumerate_splits: bool = True

    def to_dict(self) -> dict:
        return {
            "allow_cut": self.allow_cut,
            "allow_init": self.allow_init,
            "allow_induction": self.allow_induction,
            "witness_depth": self.witness_depth,
            "enumerate_splits": self.enumerate_splits,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "RuleConfig":
        expected = set(cls().to_dict())
        if set(d) != expected:
            raise ValueError(f"config keys must be exactly {sorted(expected)}")
        for k in ("allow_cut", "allow_init", "allow_induction", "enumerate_splits"):
            if not isinstance(d[k], bool):
                raise ValueError(f"config field {k} must be a boolean")
        wd = d["witness_depth"]
        if not isinstance(wd, int) or isinstance(wd, bool) or wd < 1:
            raise ValueError("config field witness_depth must be a positive integer")
        return cls(**d)


# tag -> (side of the principal formula, its connective)
RULES: dict[str, tuple[str | None, type | None]] = {
    "AndNegR": ("R", AndNeg), "AndNegL1": ("L", AndNeg), "AndNegL2": ("L", AndNeg),
    "OrL": ("L", OrPos), "FalsePosL": ("L", FalsePos),
    "OrR1": ("R", OrPos), "OrR2": ("R", OrPos),
    "AndPosR": ("R", AndPos), "AndPosL": ("L", AndPos),
    "TruePosR": ("R", TruePos), "TruePosL": ("L", TruePos), "TrueNegR": ("R", TrueNeg),
    "OrNegR": ("R", OrNeg), "OrNegL": ("L", OrNeg),
    "FalseNegR": ("R", FalseNeg), "FalseNegL": ("L", FalseNeg),
    "ImpR": ("R", Imp), "ImpL": ("L", Imp),
    "ExR": ("R", Ex), "AllR": ("R", All), "AllL": ("L", All), "ExL": ("L", Ex),
    "EqR": ("R", Eq), "NeqL": ("L", Neq),
    "EqLClash": ("L", Eq), "NeqRClash": ("R", Neq),
    "EqLUnify": ("L", Eq), "NeqRUnify": ("R", Neq),
    "MuR": ("R", Mu), "NuL": ("L", Nu), "MuLUnfold": ("L", Mu), "NuRUnfold": ("R", Nu),
    "MuLInd": ("L", Mu), "NuRCoind": ("R", Nu),
    "MuInit": ("L", Mu), "NuInit": ("L", Nu),
    "Cut": (None, None),
}
SPLIT_RULES = {"AndPosR", "ImpL", "OrNegL", "Cut"}
WITNESS_RULES = {"ExR", "AllL"}
FRESH_RULES = {"AllR", "ExL"}
UNIFY_RULES = {"EqLUnify", "NeqRUnify"}
INDUCTION_RULES = {"MuLInd", "NuRCoind"}
INIT_RULES = {"MuInit", "NuInit"}
UNFOLD_RULES = {"MuR", "NuL", "MuLUnfold", "NuRUnfold"}

_IDENT = re.compile(r"[A-Za-z][A-Za-z0-9_]*")


@dataclass(frozen=True)
class RuleApp:
    tag: str
    principal: int = 0
    witness: Term | None = None
    fresh: str | None = None
    theta: tuple | None = None  # sorted (name, term) pairs
    invariant: Abstraction | None = None
    split: tuple | None = None  # (left indices, right indices) sent to the first premise
    cut: Formula | None = None

    @property
    def side(self) -> str | None:
        return RULES[self.tag][0]

    def theta_dict(self) -> dict[str, Term]:
        return dict(self.theta or ())


def theta_tuple(theta: dict) -> tuple:
    return tuple(sorted(theta.items()))


@dataclass(frozen=True)
class Certificate:
    """Proof tree.  Below the root, `conclusion` may be None (recomputed on check)."""

    conclusion: Sequent | None
    rule: RuleApp
    premises: tuple = ()

    def nodes(self) -> Iterator["Certificate"]:
        stack = [self]
        while stack:
            c = stack.pop()
            yield c
            stack.extend(reversed(c.premises))

    def size(self) -> int:
        return sum(1 for _ in self.nodes())


# ------------------------------------------------------------- expansion

def _without(seq: tuple, i: int) -> tuple:
    return seq[:i] + seq[i + 1:]


def _check_witness(s: Sequent, t: Term, sig: Signature | None) -> None:
    extra = term_vars(t) - set(s.vars)
    if extra:
        raise RuleError(f"witness mentions variables outside the context: {sorted(extra)}")
    if sig is not None:
        try:
            sig.check_term(t, s.vars)
        except SignatureError as e:
            raise RuleError(f"ill-formed witness: {e}") from None


def _check_fresh(s: Sequent, y: str | None, sig: Signature | None) -> str:
    if y is None or not _IDENT.fullmatch(y):
        raise RuleError(f"bad eigenvariable name {y!r}")
    if y in s.vars:
        raise RuleError(f"eigenvariable {y} is not fresh")
    if sig is not None and y in sig:
        raise RuleError(f"eigenvariable {y} clashes with a constructor")
    return y


def _split(s: Sequent, r: RuleApp, side: str | None):
    if r.split is None:
        raise RuleError(f"{r.tag} needs an explicit context split")
    try:
        left_idx, right_idx = (tuple(x) for x in r.split)
    except (TypeError, ValueError):
        raise RuleError("malformed split") from None
    skip_l = r.principal if side == "L" else None
    skip_r = r.principal if side == "R" else None
    for idx, n, skip in ((left_idx, len(s.left), skip_l), (right_idx, len(s.right), skip_r)):
        if list(idx) != sorted(set(idx)):
            raise RuleError("split indices must be strictly increasing")
        for k in idx:
            if not isinstance(k, int) or not 0 <= k < n or k == skip:
                raise RuleError(f"split index {k} out of range")
    g1 = tuple(s.left[k] for k in left_idx)
    g2 = tuple(f for k, f in enumerate(s.left) if k not in left_idx and k != skip_l)
    d1 = tuple(s.right[k] for k in right_idx)
    d2 = tuple(f for k, f in enumerate(s.right) if k not in right_idx and k != skip_r)
    return g1, g2, d1, d2


def _apply_theta(s: Sequent, left: tuple, right: tuple, theta: dict) -> Sequent:
    rng: set[str] = set()
    for t in theta.values():
        rng |= term_vars(t)
    kept = tuple(v for v in s.vars if v not in theta)
    new = tuple(sorted(rng - set(kept)))
    return Sequent(
        kept + new,
        tuple(subst(f, theta) for f in left),
        tuple(subst(f, theta) for f in right),
    )


def _check_closed_abstraction(a: Abstraction, arity: int) -> None:
    if not isinstance(a, Abstraction):
        raise RuleError("missing invariant")
    if a.arity != arity:
        raise RuleError(f"invariant has arity {a.arity}, fixed point has arity {arity}")
    if len(set(a.params)) != len(a.params):
        raise RuleError("invariant parameters must be distinct")
    if abstraction_free_vars(a):
        raise RuleError("invariant must be closed")
    if free_predvars(a.body):
        raise RuleError("invariant body mentions a free predicate variable (non-monotonic use)")


def expand_rule(s: Sequent, r: RuleApp, signature: Signature | None = None) -> list[Sequent]:
    """Premises of applying r to s, exactly as the inference rule dictates.

    Raises RuleError if r does not apply.
    """
    if r.tag not in RULES:
        raise RuleError(f"unknown rule {r.tag!r}")
    side, conn = RULES[r.tag]
    X = s.vars
    if side is None:
        return _expand_cut(s, r, signature)
    ctx = s.left if side == "L" else s.right
    if not isinstance(r.principal, int) or not 0 <= r.principal < len(ctx):
        raise RuleError(f"no formula at {side}{r.principal}")
    f = ctx[r.principal]
    if not isinstance(f, conn):
        raise RuleError(f"{r.tag} expects a {conn.__name__} at {side}{r.principal}, found {type(f).__name__}")
    G, D = s.left, s.right
    i = r.principal
    if side == "L":
        G = _without(G, i)
    else:
        D = _without(D, i)
    tag = r.tag

    if tag == "AndNegR":
        return [Sequent(X, G, D + (f.a,)), Sequent(X, G, D + (f.b,))]
    if tag in ("AndNegL1", "AndNegL2"):
        return [Sequent(X, G + ((f.a if tag == "AndNegL1" else f.b),), D)]
    if tag == "OrL":
        return [Sequent(X, G + (f.a,), D), Sequent(X, G + (f.b,), D)]
    if tag in ("OrR1", "OrR2"):
        return [Sequent(X, G, D + ((f.a if tag == "OrR1" else f.b),))]
    if tag in ("FalsePosL", "TrueNegR"):
        return []
    if tag in ("TruePosR", "FalseNegL"):
        if G or D:
            raise RuleError(f"{tag} requires an otherwise empty sequent")
        return []
    if tag in ("TruePosL", "FalseNegR"):
        return [Sequent(X, G, D)]
    if tag == "AndPosL":
        return [Sequent(X, G + (f.a, f.b), D)]
    if tag == "OrNegR":
        return [Sequent(X, G, D + (f.a, f.b))]
    if tag == "ImpR":
        return [Sequent(X, G + (f.a,), D + (f.b,))]
    if tag in ("AndPosR", "ImpL", "OrNegL"):
        g1, g2, d1, d2 = _split(s, r, side)
        if tag == "AndPosR":
            return [Sequent(X, g1, d1 + (f.a,)), Sequent(X, g2, d2 + (f.b,))]
        if tag == "ImpL":
            return [Sequent(X, g1, d1 + (f.a,)), Sequent(X, g2 + (f.b,), d2)]
        return [Sequent(X, g1 + (f.a,), d1), Sequent(X, g2 + (f.b,), d2)]
    if tag in ("ExR", "AllL"):
        if r.witness is None:
            raise RuleError(f"{tag} needs a witness term")
        _check_witness(s, r.witness, signature)
        inst = instantiate_quantifier(f, r.witness)
        return [Sequent(X, G, D + (inst,))] if tag == "ExR" else [Sequent(X, G + (inst,), D)]
    if tag in ("AllR", "ExL"):
        y = _check_fresh(s, r.fresh, signature)
        inst = instantiate_quantifier(f, Var(y))
        X2 = X + (y,)
        return [Sequent(X2, G, D + (inst,))] if tag == "AllR" else [Sequent(X2, G + (inst,), D)]
    if tag in ("EqR", "NeqL"):
        if G or D:
            raise RuleError(f"{tag} requires an otherwise empty sequent")
        if f.left != f.right:
            raise RuleError(f"{tag} requires identical terms")
        return []
    if tag in ("EqLClash", "NeqRClash"):
        if unify(f.left, f.right) is not None:
            raise RuleError(f"{tag}: the terms unify")
        return []
    if tag in ("EqLUnify", "NeqRUnify"):
        theta = unify(f.left, f.right)
        if theta is None:
            raise RuleError(f"{tag}: the terms do not unify")
        if r.theta is None or r.theta_dict() != theta:
            raise RuleError(f"{tag}: substitution is not the canonical most general unifier")
        return [_apply_theta(s, G, D, theta)]
    if tag == "MuR":
        return [Sequent(X, G, D + (unfold(f),))]
    if tag == "NuL":
        return [Sequent(X, G + (unfold(f),), D)]
    if tag == "MuLUnfold":
        return [Sequent(X, G + (unfold(f),), D)]
    if tag == "NuRUnfold":
        return [Sequent(X, G, D + (unfold(f),))]
    if tag in ("MuLInd", "NuRCoind"):
        S = r.invariant
        _check_closed_abstraction(S, f.abs.arity)
        xs = f.abs.params
        generic = type(f)(f.abs, tuple(Var(x) for x in xs))
        body = instantiate(generic, S)
        here = apply_abstraction(S, f.args)
        there = apply_abstraction(S, tuple(Var(x) for x in xs))
        if tag == "MuLInd":
            return [Sequent(X, G + (here,), D), Sequent(tuple(xs), (body,), (there,))]
        return [Sequent(X, G, D + (here,)), Sequent(tuple(xs), (there,), (body,))]
    if tag in ("MuInit", "NuInit"):
        if len(s.left) != 1 or len(s.right) != 1:
            raise RuleError(f"{tag} requires exactly one formula on each side")
        if not alpha_eq(s.left[0], s.right[0]):
            raise RuleError(f"{tag} requires identical fixed points on both sides")
        return []
    raise RuleError(f"unhandled rule {tag}")  # pragma: no cover


def _expand_cut(s: Sequent, r: RuleApp, sig: Signature | None) -> list[Sequent]:
    c = r.cut
    if c is None:
        raise RuleError("Cut needs a cut formula")
    if not free_vars(c) <= set(s.vars):
        raise RuleError("cut formula mentions variables outside the context")
    if free_predvars(c):
        raise RuleError("cut formula has free predicate variables")
    if sig is not None:
        for name, arity in constructors(c):
            if name not in sig or sig.arity(name) != arity:
                raise RuleError(f"cut formula uses undeclared constructor {name}/{arity}")
    g1, g2, d1, d2 = _split(s, r, None)
    return [Sequent(s.vars, g1, d1 + (c,)), Sequent(s.vars, g2 + (c,), d2)]


# ------------------------------------------------------------ enumeration

def _subsets(idx: list[int], enumerate_splits: bool):
    if not enumerate_splits:
        yield ()
        if idx:
            yield tuple(idx)
        return
    for k in range(len(idx) + 1):
        yield from combinations(idx, k)


def splits(s: Sequent, side: str | None, principal: int, enumerate_splits: bool = True):
    left = [k for k in range(len(s.left)) if not (side == "L" and k == principal)]
    right = [k for k in range(len(s.right)) if not (side == "R" and k == principal)]
    for lsub in _subsets(left, enumerate_splits):
        for rsub in _subsets(right, enumerate_splits):
            yield (tuple(lsub), tuple(rsub))


def eigen_name(base: str, s: Sequent, sig: Signature | None) -> str:
    avoid = set(s.vars) | (set(sig.entries) if sig is not None else set())
    return fresh_name(base, avoid)


def list_applicable_rules(s: Sequent, config: RuleConfig = RuleConfig(),
                          signature: Signature | None = None) -> list[RuleApp]:
    """Every rule application (except induction, coinduction and cut) that applies to s."""
    sig = signature or Signature({})
    out: list[RuleApp] = []
    witnesses: list[Term] | None = None
    for side, ctx in (("L", s.left), ("R", s.right)):
        for i, f in enumerate(ctx):
            for tag, (tside, conn) in RULES.items():
                if tside != side or conn is None or not isinstance(f, conn):
                    continue
                if tag in INDUCTION_RULES or (tag in INIT_RULES and not config.allow_init):
                    continue
                if tag in SPLIT_RULES:
                    cands = [RuleApp(tag, i, split=sp)
                             for sp in splits(s, side, i, config.enumerate_splits)]
                elif tag in WITNESS_RULES:
                    if witnesses is None:
                        witnesses = enumerate_terms(sig, s.vars, config.witness_depth)
                    cands = [RuleApp(tag, i, witness=t) for t in witnesses]
                elif tag in FRESH_RULES:
                    cands = [RuleApp(tag, i, fresh=eigen_name(f.var, s, signature))]
                elif tag in UNIFY_RULES:
                    theta = unify(f.left, f.right)
                    if theta is None:
                        continue
                    cands = [RuleApp(tag, i, theta=theta_tuple(theta))]
                else:
                    cands = [RuleApp(tag, i)]
                for r in cands:
                    try:
                        expand_rule(s, r, signature)
                    except (RuleError, FormulaError):
                        continue
                    out.append(r)
    return out


# -------------------------------------------------------------- checking

def sequent_key(s: Sequent) -> str:
    """Canonical form up to multiset order and renaming of eigenvariables."""
    def order(fs):
        return sorted(fs, key=lambda f: (alpha_key(f, {}), alpha_key(f)))

    rename: dict[str, str] = {}
    left = [alpha_key(f, rename) for f in order(s.left)]
    right = [alpha_key(f, rename) for f in order(s.right)]
    unused = len(set(s.vars) - set(rename))
    return f"{'; '.join(sorted(left))} |- {'; '.join(sorted(right))} #{unused}"


def sequents_match(a: Sequent, b: Sequent) -> bool:
    return a == b or sequent_key(a) == sequent_key(b)


@dataclass
class CheckResult:
    ok: bool
    path: str = ""
    reason: str = ""

    def __bool__(self) -> bool:
        return self.ok

    def __str__(self) -> str:
        return "ok" if self.ok else f"{self.path}: {self.reason}"


def _config_violation(r: RuleApp, config: RuleConfig) -> str | None:
    if r.tag in INIT_RULES and not config.allow_init:
        return f"{r.tag} used but initial rules are disabled"
    if r.tag == "Cut" and not config.allow_cut:
        return "Cut used but cut is disabled"
    if r.tag in INDUCTION_RULES and not config.allow_induction:
        return f"{r.tag} used but induction is disabled"
    return None


def check_certificate(c: Certificate, config: RuleConfig = RuleConfig(),
                      signature: Signature | None = None, verified: dict | None = None) -> CheckResult:
    """Re-derive every premise with expand_rule and compare with the tree.

    `verified` maps id(node) to (node, sequents it was already checked against)
    and lets repeated checks skip shared subtrees; it is only extended on success.
    """
    if c.conclusion is None:
        return CheckResult(False, "root", "root has no conclusion")
    stray = c.conclusion.free_vars() - set(c.conclusion.vars)
    if stray:
        return CheckResult(False, "root", f"free variables outside the context: {sorted(stray)}")
    stack: list[tuple[Certificate, Sequent | None, str]] = [(c, None, "root")]
    seen: list[tuple[Certificate, Sequent]] = []
    while stack:
        node, expected, path = stack.pop()
        seq = node.conclusion
        if seq is None:
            seq = expected
        if verified is not None:
            hit = verified.get(id(node))
            if hit is not None and hit[0] is node and seq in hit[1] and (
                    expected is None or sequents_match(seq, expected)):
                continue
            seen.append((node, seq))
        elif expected is not None and not sequents_match(seq, expected):
            return CheckResult(False, path, "conclusion does not match the parent's premise")
        if not isinstance(node.rule, RuleApp):
            return CheckResult(False, path, "missing rule")
        bad = _config_violation(node.rule, config)
        if bad:
            return CheckResult(False, path, bad)
        try:
            prems = expand_rule(seq, node.rule, signature)
        except (RuleError, FormulaError) as e:
            return CheckResult(False, path, f"{node.rule.tag}: {e}")
        if len(prems) != len(node.premises):
            return CheckResult(
                False, path,
                f"{node.rule.tag} yields {len(prems)} premises, certificate has {len(node.premises)}",
            )
        for k in reversed(range(len(prems))):
            stack.append((node.premises[k], prems[k], f"{path}.{k}"))
    if verified is not None:
        for node, seq in seen:
            verified.setdefault(id(node), (node, set()))[1].add(seq)
    return CheckResult(True)


def fill_conclusions(c: Certificate, signature: Signature | None = None,
                     conclusion: Sequent | None = None) -> Certificate:
    """Copy of c with every conclusion computed by expand_rule from the root down."""
    seq = c.conclusion if c.conclusion is not None else conclusion
    prems = expand_rule(seq, c.rule, signature)
    if len(prems) != len(c.premises):
        raise RuleError(f"{c.rule.tag} yields {len(prems)} premises, certificate has {len(c.premises)}")
    return Certificate(seq, c.rule, tuple(
        fill_conclusions(p, signature, q) for p, q in zip(c.premises, prems)))


# --------------------------------------------------------- canonical form

def _canon_name(used: set[str], sig: Signature | None) -> str:
    k = 0
    while f"v{k}" in used or (sig is not None and f"v{k}" in sig):
        k += 1
    return f"v{k}"


def canonicalize(c: Certificate, signature: Signature | None = None) -> Certificate:
    """α-normal form: eigenvariables renamed v0, v1, ... in order of introduction.

    Two certificates that differ only in eigenvariable names canonicalize to
    the same tree.
    """
    root = c.conclusion
    rho: dict[str, Term] = {}
    used: set[str] = set()
    for v in root.vars:
        n = _canon_name(used, signature)
        used.add(n)
        rho[v] = Var(n)
    new_root = Sequent(tuple(rho[v].name for v in root.vars),
                       tuple(subst(f, rho) for f in root.left),
                       tuple(subst(f, rho) for f in root.right))
    return _replay(c, root, new_root, rho, signature)


def _replay(c: Certificate, old: Sequent, new: Sequent, rho: dict, sig) -> Certificate:
    r = c.rule
    changes: dict = {}
    if r.witness is not None:
        changes["witness"] = apply_substitution(rho, r.witness)
    if r.cut is not None:
        changes["cut"] = subst(r.cut, rho)
    if r.fresh is not None:
        changes["fresh"] = _canon_name(set(new.vars), sig)
    if r.tag in UNIFY_RULES:
        f = (new.left if r.side == "L" else new.right)[r.principal]
        theta = unify(f.left, f.right)
        changes["theta"] = theta_tuple(theta) if theta is not None else r.theta
    r2 = replace(r, **changes)
    old_prems = expand_rule(old, r, sig)
    new_prems = expand_rule(new, r2, sig)
    kids = []
    for k, (p, op, np_) in enumerate(zip(c.premises, old_prems, new_prems)):
        if r.tag in FRESH_RULES:
            rho_k = dict(rho)
            rho_k[r.fresh] = Var(r2.fresh)
        elif r.tag in UNIFY_RULES:
            theta2 = r2.theta_dict()
            rho_k = {w: apply_substitution(theta2, rho.get(w, Var(w))) for w in op.vars}
        elif r.tag in INDUCTION_RULES and k == 1:
            rho_k = {w: Var(w) for w in op.vars}
        else:
            rho_k = rho
        kids.append(_replay(p, op, np_, rho_k, sig))
    return Certificate(new, r2, tuple(kids))
