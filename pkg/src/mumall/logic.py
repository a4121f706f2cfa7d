"""Polarized µMALL formulas with first-order equality and fixed points."""

from __future__ import annotations

import weakref
from dataclasses import dataclass
from typing import Callable, Iterable, Mapping

from .terms import App, Term, Var, apply_substitution, fresh_name, node, term_vars


class FormulaError(ValueError):
    pass


@node
class AndNeg:
    a: "Formula"
    b: "Formula"


@node
class TrueNeg:
    pass


@node
class OrNeg:
    a: "Formula"
    b: "Formula"


@node
class FalseNeg:
    pass


@node
class AndPos:
    a: "Formula"
    b: "Formula"


@node
class TruePos:
    pass


@node
class OrPos:
    a: "Formula"
    b: "Formula"


@node
class FalsePos:
    pass


@node
class Imp:
    a: "Formula"
    b: "Formula"


@node
class Eq:
    left: Term
    right: Term


@node
class Neq:
    left: Term
    right: Term


@node
class All:
    var: str
    body: "Formula"


@node
class Ex:
    var: str
    body: "Formula"


@node
class Abstraction:
    """λ pred_var λ params. body -- the operand of µ/ν, or an (co)invariant."""

    pred_var: str
    params: tuple
    body: "Formula"

    @property
    def arity(self) -> int:
        return len(self.params)


@node
class Mu:
    abs: Abstraction
    args: tuple


@node
class Nu:
    abs: Abstraction
    args: tuple


@node
class PredVar:
    name: str
    args: tuple


@node
class Pred:
    """Named predicate reference; only exists before desugaring."""

    name: str
    args: tuple


Formula = (
    AndNeg | TrueNeg | OrNeg | FalseNeg | AndPos | TruePos | OrPos | FalsePos
    | Imp | Eq | Neq | All | Ex | Mu | Nu | PredVar | Pred
)

BINARY = (AndNeg, OrNeg, AndPos, OrPos, Imp)
UNITS = (TrueNeg, FalseNeg, TruePos, FalsePos)
QUANTS = (All, Ex)
FIXPOINTS = (Mu, Nu)
APPLIED = (PredVar, Pred)


def disjunction(fs: Iterable[Formula]) -> Formula:
    """Right-nested ∨ of fs; the empty disjunction is f."""
    fs = list(fs)
    if not fs:
        return FalsePos()
    out = fs[-1]
    for f in reversed(fs[:-1]):
        out = OrPos(f, out)
    return out


def tensor(fs: Iterable[Formula]) -> Formula:
    """Right-nested ∧⁺ of fs; the empty conjunction is t⁺."""
    fs = list(fs)
    if not fs:
        return TruePos()
    out = fs[-1]
    for f in reversed(fs[:-1]):
        out = AndPos(f, out)
    return out


def _cached(f, slot, compute):
    try:
        return f.__dict__[slot]
    except KeyError:
        v = compute(f)
        object.__setattr__(f, slot, v)
        return v


# ---------------------------------------------------------------- variables

def free_vars(f: Formula) -> frozenset:
    return _cached(f, "_fv", _free_vars)


def _free_vars(f) -> frozenset:
    if isinstance(f, BINARY):
        return free_vars(f.a) | free_vars(f.b)
    if isinstance(f, (Eq, Neq)):
        return frozenset(term_vars(f.left) | term_vars(f.right))
    if isinstance(f, QUANTS):
        return free_vars(f.body) - {f.var}
    if isinstance(f, FIXPOINTS + APPLIED):
        out: set = set()
        for t in f.args:
            out |= term_vars(t)
        return frozenset(out)
    return frozenset()


def abstraction_free_vars(a: Abstraction) -> frozenset:
    return free_vars(a.body) - set(a.params)


def free_predvars(f: Formula, bound: frozenset = frozenset()) -> set[str]:
    if isinstance(f, BINARY):
        return free_predvars(f.a, bound) | free_predvars(f.b, bound)
    if isinstance(f, QUANTS):
        return free_predvars(f.body, bound)
    if isinstance(f, PredVar):
        return set() if f.name in bound else {f.name}
    if isinstance(f, FIXPOINTS):
        return free_predvars(f.abs.body, bound | {f.abs.pred_var})
    return set()


def bound_names(f: Formula) -> set[str]:
    if isinstance(f, BINARY):
        return bound_names(f.a) | bound_names(f.b)
    if isinstance(f, QUANTS):
        return {f.var} | bound_names(f.body)
    return set()


# ------------------------------------------------------------- substitution

def subst(f: Formula, theta: Mapping[str, Term]) -> Formula:
    """Capture-avoiding substitution of terms for free variables."""
    if not theta:
        return f
    fv = free_vars(f)
    theta = {x: t for x, t in theta.items() if x in fv}
    if not theta:
        return f
    return _subst(f, theta)


def _subst(f, theta):
    if isinstance(f, BINARY):
        return type(f)(subst(f.a, theta), subst(f.b, theta))
    if isinstance(f, (Eq, Neq)):
        return type(f)(apply_substitution(theta, f.left), apply_substitution(theta, f.right))
    if isinstance(f, QUANTS):
        inner = {x: t for x, t in theta.items() if x != f.var}
        if not inner:
            return f
        clash = set()
        for t in inner.values():
            clash |= term_vars(t)
        var, body = f.var, f.body
        if var in clash:
            var = fresh_name(var, clash | free_vars(body) | set(inner))
            body = subst(body, {f.var: Var(var)})
        return type(f)(var, subst(body, inner))
    if isinstance(f, FIXPOINTS + APPLIED):
        return type(f)(f.abs if isinstance(f, FIXPOINTS) else f.name,
                       tuple(apply_substitution(theta, t) for t in f.args))
    return f


def apply_abstraction(a: Abstraction, args: Iterable[Term]) -> Formula:
    """β-reduce `a` against term arguments (the predicate variable is left alone)."""
    args = tuple(args)
    if len(args) != a.arity:
        raise FormulaError(f"abstraction {a.pred_var} expects {a.arity} arguments, got {len(args)}")
    return subst(a.body, dict(zip(a.params, args)))


def subst_pred(f: Formula, name: str, repl: Callable[[tuple], Formula]) -> Formula:
    """Replace every free occurrence PredVar(name, ts) by repl(ts)."""
    if isinstance(f, BINARY):
        a, b = subst_pred(f.a, name, repl), subst_pred(f.b, name, repl)
        return f if (a is f.a and b is f.b) else type(f)(a, b)
    if isinstance(f, QUANTS):
        body = subst_pred(f.body, name, repl)
        return f if body is f.body else type(f)(f.var, body)
    if isinstance(f, PredVar) and f.name == name:
        return repl(f.args)
    return f


def instantiate(fp: Mu | Nu, pred: Abstraction) -> Formula:
    """B S t̄: the body of fp's abstraction with `pred` for its predicate variable."""
    b = fp.abs
    body = apply_abstraction(b, fp.args)
    return subst_pred(body, b.pred_var, lambda ts: apply_abstraction(pred, ts))


def unfold(fp: Formula) -> Formula:
    """B(µB) t̄ for fp = µB t̄ (dually for ν)."""
    if not isinstance(fp, FIXPOINTS):
        raise FormulaError("unfold expects a fixed point")
    if len(fp.args) != fp.abs.arity:
        raise FormulaError(
            f"fixed point {fp.abs.pred_var} has arity {fp.abs.arity}, got {len(fp.args)} arguments"
        )
    return _cached(fp, "_unfolded", _unfold)


# Fixed points produced by unfolding are shared, so repeated unfoldings of the
# same instance reuse one body and its cached keys.
_SHARED_FIXPOINTS: weakref.WeakValueDictionary = weakref.WeakValueDictionary()


def _shared(kind, a: Abstraction, ts: tuple) -> Formula:
    k = (kind, a, ts)
    fp = _SHARED_FIXPOINTS.get(k)
    if fp is None:
        fp = _SHARED_FIXPOINTS[k] = kind(a, ts)
    return fp


def _unfold(fp) -> Formula:
    kind = type(fp)
    body = apply_abstraction(fp.abs, fp.args)
    return subst_pred(body, fp.abs.pred_var, lambda ts: _shared(kind, fp.abs, ts))


def instantiate_quantifier(f: All | Ex, t: Term) -> Formula:
    """The body of f with t for its bound variable, memoized per formula and term."""
    memo = _cached(f, "_inst", lambda g: {})
    try:
        return memo[t]
    except KeyError:
        out = memo[t] = subst(f.body, {f.var: t})
        return out


def is_recursive(a: Abstraction) -> bool:
    return a.pred_var in free_predvars(a.body)


def inline_nonrecursive(f: Formula) -> Formula:
    """Unfold every fixed point whose body never mentions its own predicate."""
    if isinstance(f, BINARY):
        return type(f)(inline_nonrecursive(f.a), inline_nonrecursive(f.b))
    if isinstance(f, QUANTS):
        return type(f)(f.var, inline_nonrecursive(f.body))
    if isinstance(f, FIXPOINTS) and not is_recursive(f.abs):
        return inline_nonrecursive(apply_abstraction(f.abs, f.args))
    return f


# ------------------------------------------------------------------ measures

def connective_count(f: Formula) -> int:
    if isinstance(f, BINARY):
        return 1 + connective_count(f.a) + connective_count(f.b)
    if isinstance(f, QUANTS):
        return 1 + connective_count(f.body)
    return 1


def depth(f: Formula) -> int:
    if isinstance(f, BINARY):
        return 1 + max(depth(f.a), depth(f.b))
    if isinstance(f, QUANTS):
        return 1 + depth(f.body)
    return 1


def has_fixed_points(f: Formula) -> bool:
    return _cached(f, "_hfp", _has_fixed_points)


def _has_fixed_points(f) -> bool:
    if isinstance(f, BINARY):
        return has_fixed_points(f.a) or has_fixed_points(f.b)
    if isinstance(f, QUANTS):
        return has_fixed_points(f.body)
    return isinstance(f, FIXPOINTS + APPLIED)


def formula_terms(f: Formula) -> list[Term]:
    """Terms occurring in f outside of fixed-point bodies."""
    if isinstance(f, BINARY):
        return formula_terms(f.a) + formula_terms(f.b)
    if isinstance(f, QUANTS):
        return formula_terms(f.body)
    if isinstance(f, (Eq, Neq)):
        return [f.left, f.right]
    if isinstance(f, FIXPOINTS + APPLIED):
        return list(f.args)
    return []


def constructors(f: Formula, into: set | None = None) -> set[tuple[str, int]]:
    """(name, arity) of every constructor in f, fixed-point bodies included."""
    out = set() if into is None else into
    stack: list = [f]
    while stack:
        g = stack.pop()
        if isinstance(g, BINARY):
            stack += [g.a, g.b]
        elif isinstance(g, QUANTS):
            stack.append(g.body)
        elif isinstance(g, (Eq, Neq)):
            _term_constructors(g.left, out)
            _term_constructors(g.right, out)
        elif isinstance(g, FIXPOINTS + APPLIED):
            for t in g.args:
                _term_constructors(t, out)
            if isinstance(g, FIXPOINTS):
                stack.append(g.abs.body)
    return out


def _term_constructors(t: Term, out: set) -> None:
    if isinstance(t, App):
        out.add((t.name, len(t.args)))
        for a in t.args:
            _term_constructors(a, out)


# ------------------------------------------------------------ α-equivalence

_ABS_IDS: dict[str, str] = {}


def abstraction_key(a: Abstraction) -> str:
    """Short canonical id shared by all α-equivalent abstractions."""

    def compute(a):
        env = {p: f"#{i}" for i, p in enumerate(a.params)}
        parts: list[str] = [f"L{a.arity}."]
        _key(a.body, env, len(a.params), None, parts, {a.pred_var: "@0"})
        full = "".join(parts)
        return _ABS_IDS.setdefault(full, f"M{len(_ABS_IDS)}")

    return _cached(a, "_key", compute)


def alpha_key(f: Formula, rename: dict | None = None) -> str:
    """Canonical string for f modulo bound-variable names.

    With `rename`, free variables are numbered in order of first occurrence
    (the dict is updated in place); otherwise they keep their names.
    """
    if rename is None or not free_vars(f):
        return _cached(f, "_akey", lambda g: _key_str(g, None))
    segments, names = _cached(f, "_atmpl", _template)
    out = []
    for i, seg in enumerate(segments):
        if i % 2 == 0:
            out.append(seg)
        else:
            x = names[int(seg)]
            if x not in rename:
                rename[x] = f"${len(rename)}"
            out.append(rename[x])
    return "".join(out)


class _Slots(dict):
    """Records free variables in order of first occurrence as numbered placeholders."""

    def __missing__(self, name):
        v = self[name] = f"\0{len(self)}\0"
        return v


def _template(f) -> tuple:
    slots = _Slots()
    key = _key_str(f, slots)
    return key.split("\0"), list(slots)


def _key_str(f, rename):
    parts: list[str] = []
    _key(f, {}, 0, rename, parts, {})
    return "".join(parts)


_TAGS = {AndNeg: "&", OrNeg: "%", AndPos: "*", OrPos: "+", Imp: ">"}


def _term_key(t: Term, env, rename, parts) -> None:
    if isinstance(t, Var):
        if t.name in env:
            parts.append(env[t.name])
        elif isinstance(rename, _Slots):
            parts.append(rename[t.name])
        elif rename is not None:
            if t.name not in rename:
                rename[t.name] = f"${len(rename)}"
            parts.append(rename[t.name])
        else:
            parts.append("$" + t.name)
        return
    parts.append(t.name)
    if t.args:
        parts.append("(")
        for i, a in enumerate(t.args):
            if i:
                parts.append(",")
            _term_key(a, env, rename, parts)
        parts.append(")")


def _subkey(f, env, level, rename, parts, penv) -> None:
    # a closed subformula outside any abstraction body keys the same in every context
    if not penv and not free_vars(f):
        parts.append(alpha_key(f))
    else:
        _key(f, env, level, rename, parts, penv)


def _key(f, env, level, rename, parts, penv) -> None:
    if isinstance(f, BINARY):
        parts.append(_TAGS[type(f)] + "(")
        _subkey(f.a, env, level, rename, parts, penv)
        parts.append(",")
        _subkey(f.b, env, level, rename, parts, penv)
        parts.append(")")
    elif isinstance(f, UNITS):
        parts.append({TrueNeg: "T-", FalseNeg: "F-", TruePos: "T+", FalsePos: "F+"}[type(f)])
    elif isinstance(f, (Eq, Neq)):
        parts.append("=(" if isinstance(f, Eq) else "!(")
        _term_key(f.left, env, rename, parts)
        parts.append(",")
        _term_key(f.right, env, rename, parts)
        parts.append(")")
    elif isinstance(f, QUANTS):
        parts.append("A" if isinstance(f, All) else "E")
        inner = dict(env)
        inner[f.var] = f"#{level}"
        _subkey(f.body, inner, level + 1, rename, parts, penv)
    else:
        if isinstance(f, FIXPOINTS):
            parts.append(("mu:" if isinstance(f, Mu) else "nu:") + abstraction_key(f.abs))
        elif isinstance(f, PredVar):
            parts.append("P:" + penv.get(f.name, f.name))
        else:
            parts.append("N:" + f.name)
        parts.append("(")
        for i, t in enumerate(f.args):
            if i:
                parts.append(",")
            _term_key(t, env, rename, parts)
        parts.append(")")


def alpha_eq(f: Formula, g: Formula) -> bool:
    return f is g or alpha_key(f) == alpha_key(g)


# --------------------------------------------------------------- dualization

def dual(f: Formula, _keep: frozenset = frozenset()) -> Formula:
    """De Morgan dual (negation normal form of ¬f)."""
    t = type(f)
    if t is AndNeg:
        return OrPos(dual(f.a, _keep), dual(f.b, _keep))
    if t is OrPos:
        return AndNeg(dual(f.a, _keep), dual(f.b, _keep))
    if t is AndPos:
        return OrNeg(dual(f.a, _keep), dual(f.b, _keep))
    if t is OrNeg:
        return AndPos(dual(f.a, _keep), dual(f.b, _keep))
    if t in _DUAL_UNITS:
        return _DUAL_UNITS[t]()
    if t is Eq:
        return Neq(f.left, f.right)
    if t is Neq:
        return Eq(f.left, f.right)
    if t is All:
        return Ex(f.var, dual(f.body, _keep))
    if t is Ex:
        return All(f.var, dual(f.body, _keep))
    if t in (Mu, Nu):
        a = f.abs
        body = dual(a.body, _keep | {a.pred_var})
        return (Nu if t is Mu else Mu)(Abstraction(a.pred_var, a.params, body), f.args)
    if t is PredVar:
        if f.name in _keep:
            return f
        raise FormulaError(f"cannot dualize free predicate variable {f.name}")
    if t is Imp:
        raise FormulaError("dual expects an implication-free formula; use eliminate_imp first")
    raise FormulaError(f"cannot dualize {t.__name__}; desugar first")


_DUAL_UNITS = {TrueNeg: FalsePos, FalsePos: TrueNeg, TruePos: FalseNeg, FalseNeg: TruePos}


def eliminate_imp(f: Formula) -> Formula:
    """Rewrite A ⊃ B as (dual A) ∨⁻ B everywhere."""
    if isinstance(f, Imp):
        return OrNeg(dual(eliminate_imp(f.a)), eliminate_imp(f.b))
    if isinstance(f, BINARY):
        return type(f)(eliminate_imp(f.a), eliminate_imp(f.b))
    if isinstance(f, QUANTS):
        return type(f)(f.var, eliminate_imp(f.body))
    if isinstance(f, FIXPOINTS):
        a = f.abs
        return type(f)(Abstraction(a.pred_var, a.params, eliminate_imp(a.body)), f.args)
    return f


def check_monotonic(a: Abstraction) -> bool:
    """True iff a.pred_var occurs only under an even number of ⊃-antecedents."""
    return _polarities(a.body, a.pred_var, True) <= {True}


def _polarities(f, name, pos) -> set[bool]:
    if isinstance(f, Imp):
        return _polarities(f.a, name, not pos) | _polarities(f.b, name, pos)
    if isinstance(f, BINARY):
        return _polarities(f.a, name, pos) | _polarities(f.b, name, pos)
    if isinstance(f, QUANTS):
        return _polarities(f.body, name, pos)
    if isinstance(f, PredVar) and f.name == name:
        return {pos}
    if isinstance(f, FIXPOINTS) and f.abs.pred_var != name:
        return _polarities(f.abs.body, name, pos)
    return set()


# -------------------------------------------------------------- definitions

@dataclass(frozen=True)
class Definition:
    kind: str  # "mu" or "nu"
    abstraction: Abstraction

    def apply(self, args: Iterable[Term]) -> Mu | Nu:
        args = tuple(args)
        if len(args) != self.abstraction.arity:
            raise FormulaError(
                f"{self.abstraction.pred_var} expects {self.abstraction.arity} arguments, got {len(args)}"
            )
        return (Mu if self.kind == "mu" else Nu)(self.abstraction, args)


Definitions = Mapping[str, Definition]


def desugar(f: Formula, defs: Definitions) -> Formula:
    """Replace named predicate references by their fixed-point expressions."""
    if isinstance(f, Pred):
        if f.name not in defs:
            raise FormulaError(f"unbound predicate {f.name}")
        return defs[f.name].apply(f.args)
    if isinstance(f, BINARY):
        a, b = desugar(f.a, defs), desugar(f.b, defs)
        return f if (a is f.a and b is f.b) else type(f)(a, b)
    if isinstance(f, QUANTS):
        body = desugar(f.body, defs)
        return f if body is f.body else type(f)(f.var, body)
    return f


# ------------------------------------------------------------------ printing

_QUANT, _IMP, _DISJ, _CONJ, _ATOM = range(5)
_OPS = {AndNeg: "/\\-", AndPos: "/\\+", OrPos: "\\/", OrNeg: "\\/-", Imp: "=>"}


def _level(f) -> int:
    if isinstance(f, QUANTS):
        return _QUANT
    if isinstance(f, Imp):
        return _IMP
    if isinstance(f, (OrPos, OrNeg)):
        return _DISJ
    if isinstance(f, (AndPos, AndNeg)):
        return _CONJ
    return _ATOM


def formula_str(f: Formula) -> str:
    """Concrete syntax accepted back by the problem-file parser."""
    return _cached(f, "_str", lambda g: _fmt(g, _QUANT))


def _fmt(f, prec, tail=True) -> str:
    # `tail`: nothing follows f in its enclosing text, so a quantifier there
    # may extend to the end without parentheses.
    lvl = _level(f)
    if lvl < prec and not (lvl == _QUANT and tail):
        return "(" + _fmt(f, _QUANT) + ")"
    if isinstance(f, BINARY):
        return f"{_fmt(f.a, lvl + 1, False)} {_OPS[type(f)]} {_fmt(f.b, lvl, tail)}"
    if isinstance(f, QUANTS):
        kw = "all" if isinstance(f, All) else "exists"
        return f"{kw} {f.var}, {_fmt(f.body, _QUANT, tail)}"
    if isinstance(f, TrueNeg):
        return "true-"
    if isinstance(f, TruePos):
        return "true+"
    if isinstance(f, FalsePos):
        return "false"
    if isinstance(f, FalseNeg):
        return "false-"
    if isinstance(f, Eq):
        return f"{f.left} = {f.right}"
    if isinstance(f, Neq):
        return f"{f.left} != {f.right}"
    args = "(" + ", ".join(str(t) for t in f.args) + ")"
    if isinstance(f, FIXPOINTS):
        kw = "mu" if isinstance(f, Mu) else "nu"
        return f"[{kw} {_binder(f.abs)}]{args}"
    return f.name + (args if f.args else "")


def _binder(a: Abstraction) -> str:
    head = " ".join((a.pred_var,) + tuple(a.params))
    return f"{head}. {_fmt(a.body, _QUANT)}"


def abstraction_str(a: Abstraction) -> str:
    """`lam X Y. body` form used for (co)invariants."""
    params = "".join(" " + p for p in a.params)
    return f"lam{params}. {_fmt(a.body, _QUANT)}"
