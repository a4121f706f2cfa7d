"""Lexer and recursive-descent parser for problem files and formula strings.

Grammar sketch (``%`` starts a line comment)::

    signature a/0 b/0 s/1.
    adj a b.                              % Horn fact
    path X Y :- adj X Y.                  % Horn clause, body items joined by /\\+
    path X Z :- adj X Y, path Y Z.        % Y is existentially quantified
    define nat N := N = z \\/ exists M, N = s(M) /\\+ nat M.
    codefine bisim P Q := ... .
    goal g: F1, ..., Fn |- G1, ..., Gm.

Connectives ``/\\-  /\\+  \\/  \\/-  =>  =  !=  true-  true+  false  false-``,
quantifiers ``all X, F`` / ``exists X, F``, inline fixed points
``[mu P X Y. F](t1, t2)`` and invariants ``lam X Y. F``.
"""

from __future__ import annotations

import functools
import re
from dataclasses import dataclass, field

from .logic import (
    Abstraction, All, AndNeg, AndPos, Definition, Eq, Ex, FalseNeg, FalsePos, Formula,
    FormulaError, Imp, Mu, Neq, Nu, OrNeg, OrPos, Pred, PredVar, TrueNeg, TruePos,
    abstraction_free_vars, check_monotonic, desugar, disjunction, subst, tensor,
)
from .terms import App, Signature, SignatureError, Term, Var, apply_substitution, fresh_name, numeral


class ParseError(ValueError):
    def __init__(self, msg: str, line: int = 0, col: int = 0):
        self.msg, self.line, self.col = msg, line, col
        where = f"line {line}, column {col}" if col else f"line {line}"
        super().__init__(f"{where}: {msg}" if line else msg)


MAX_NUMERAL = 200
KEYWORDS = {"all", "exists", "mu", "nu", "lam", "signature", "define", "codefine", "goal"}
_SYMBOLS = ["/\\-", "/\\+", "\\/-", "\\/", "=>", "!=", "|-", ":-", ":=", "=",
            "(", ")", "[", "]", ",", ".", "/", ";", ":"]
_TOKEN_RE = re.compile(
    r"(?P<ws>[ \t\r\n]+|%[^\n]*)"
    r"|(?P<unit>true[-+]|false-?)(?![A-Za-z0-9_])"
    r"|(?P<ident>[A-Za-z][A-Za-z0-9_]*)"
    r"|(?P<num>[0-9]+)"
    r"|(?P<sym>" + "|".join(re.escape(s) for s in _SYMBOLS) + ")"
)


@dataclass
class Token:
    kind: str
    value: str
    line: int
    col: int


def tokenize(text: str) -> list[Token]:
    toks: list[Token] = []
    pos, line, line_start = 0, 1, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
        kind = m.lastgroup
        if kind != "ws":
            toks.append(Token(kind, m.group(), line, pos - line_start + 1))
        nl = m.group().count("\n")
        if nl:
            line += nl
            line_start = pos + m.group().rfind("\n") + 1
        pos = m.end()
    toks.append(Token("eof", "", line, pos - line_start + 1))
    return toks


@dataclass
class Goal:
    name: str
    sequent: "object"  # kernel.Sequent


@dataclass
class ProblemFile:
    signature: Signature
    definitions: dict[str, Definition]
    goals: list[Goal]
    text: str = ""

    def goal(self, name: str) -> Goal:
        for g in self.goals:
            if g.name == name:
                return g
        raise KeyError(name)


@dataclass
class _Clause:
    args: list
    body: Formula | None
    clause_vars: list
    line: int


@dataclass
class _RawDef:
    kind: str
    params: list | None = None
    body: Formula | None = None
    clauses: list = field(default_factory=list)
    line: int = 0


class Parser:
    def __init__(self, text: str, signature: Signature | None = None, preds=()):
        self.toks = tokenize(text)
        self.i = 0
        self.sig = signature or Signature({})
        self.preds = set(preds)
        self.predvars: dict[str, int] = {}
        self.clause_vars: list | None = None  # Horn mode when not None

    # ------------------------------------------------------------ utilities
    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def peek(self, k: int = 1) -> Token:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def error(self, msg: str, tok: Token | None = None):
        tok = tok or self.tok
        raise ParseError(msg, tok.line, tok.col)

    def at(self, value: str) -> bool:
        return self.tok.kind in ("sym", "unit") and self.tok.value == value

    def at_kw(self, value: str) -> bool:
        return self.tok.kind == "ident" and self.tok.value == value

    def expect(self, value: str) -> Token:
        if not (self.tok.value == value and self.tok.kind in ("sym", "ident", "unit")):
            shown = self.tok.value or "end of input"
            self.error(f"expected {value!r}, found {shown!r}")
        t = self.tok
        self.i += 1
        return t

    def ident(self) -> str:
        if self.tok.kind != "ident":
            self.error(f"expected identifier, found {self.tok.value or 'end of input'!r}")
        v = self.tok.value
        self.i += 1
        return v

    def binder_name(self) -> str:
        tok = self.tok
        name = self.ident()
        if name in KEYWORDS:
            self.error(f"{name!r} is a keyword", tok)
        if name in self.sig:
            self.error(f"cannot bind {name!r}: it is a declared constructor", tok)
        return name

    # ---------------------------------------------------------------- terms
    def term(self, scope) -> Term:
        tok = self.tok
        if tok.kind == "num":
            self.i += 1
            if not self.sig.has_numerals:
                self.error("numerals need z/0 and s/1 in the signature", tok)
            if int(tok.value) > MAX_NUMERAL:
                self.error(f"numeral {tok.value} exceeds {MAX_NUMERAL}", tok)
            return numeral(int(tok.value))
        if self.at("("):
            self.i += 1
            t = self.term(scope)
            self.expect(")")
            return t
        if tok.kind != "ident" or tok.value in KEYWORDS:
            self.error(f"expected a term, found {tok.value or 'end of input'!r}")
        name = tok.value
        self.i += 1
        if name in scope:
            if self.at("("):
                self.error(f"variable {name} cannot take arguments")
            return Var(name)
        if name in self.sig:
            args: list[Term] = []
            if self.at("("):
                self.i += 1
                args.append(self.term(scope))
                while self.at(","):
                    self.i += 1
                    args.append(self.term(scope))
                self.expect(")")
            if len(args) != self.sig.arity(name):
                self.error(f"{name} expects {self.sig.arity(name)} arguments, got {len(args)}", tok)
            return App(name, tuple(args))
        if self.clause_vars is not None and name[0].isupper():
            if self.at("("):
                self.error(f"variable {name} cannot take arguments")
            if name not in self.clause_vars:
                self.clause_vars.append(name)
            return Var(name)
        if name[0].isupper():
            self.error(f"unbound variable {name}", tok)
        self.error(f"undeclared constructor {name}", tok)

    def _starts_atomic_term(self, scope) -> bool:
        tok = self.tok
        if tok.kind == "num":
            return True
        if tok.kind != "ident" or tok.value in KEYWORDS:
            return False
        name = tok.value
        if name in self.predvars or (name in self.preds and name not in scope):
            return False
        return name in scope or name in self.sig or (
            self.clause_vars is not None and name[0].isupper()
        )

    def pred_args(self, scope) -> tuple:
        args: list[Term] = []
        if self.at("("):
            self.i += 1
            if not self.at(")"):
                args.append(self.term(scope))
                while self.at(","):
                    self.i += 1
                    args.append(self.term(scope))
            self.expect(")")
            return tuple(args)
        while self._starts_atomic_term(scope):
            args.append(self.term(scope))
        return tuple(args)

    # ------------------------------------------------------------- formulas
    def formula(self, scope) -> Formula:
        if self.at_kw("all") or self.at_kw("exists"):
            kind = All if self.tok.value == "all" else Ex
            self.i += 1
            var = self.binder_name()
            self.expect(",")
            return kind(var, self.formula(scope | {var}))
        left = self.disj(scope)
        if self.at("=>"):
            self.i += 1
            return Imp(left, self.formula(scope))
        return left

    def _rhs(self, scope, sub):
        if self.at_kw("all") or self.at_kw("exists"):
            return self.formula(scope)
        return sub(scope)

    def disj(self, scope) -> Formula:
        left = self.conj(scope)
        for op, kind in (("\\/", OrPos), ("\\/-", OrNeg)):
            if self.at(op):
                self.i += 1
                return kind(left, self._rhs(scope, self.disj))
        return left

    def conj(self, scope) -> Formula:
        left = self.unary(scope)
        for op, kind in (("/\\-", AndNeg), ("/\\+", AndPos)):
            if self.at(op):
                self.i += 1
                return kind(left, self._rhs(scope, self.conj))
        return left

    def unary(self, scope) -> Formula:
        tok = self.tok
        if tok.kind == "unit":
            self.i += 1
            return {"true-": TrueNeg, "true+": TruePos, "false": FalsePos, "false-": FalseNeg}[
                tok.value
            ]()
        if self.at("("):
            save = self.i
            try:
                self.i += 1
                f = self.formula(scope)
                self.expect(")")
                return f
            except ParseError as e:
                first = e
                self.i = save
            try:
                return self.equation(scope)
            except ParseError as e:
                # report whichever reading got further into the input
                raise max(first, e, key=lambda err: (err.line, err.col)) from None
        if self.at("["):
            return self.fixed_point(scope)
        if tok.kind == "ident" and tok.value not in scope:
            name = tok.value
            if name in self.predvars:
                self.i += 1
                args = self.pred_args(scope)
                if len(args) != self.predvars[name]:
                    self.error(f"{name} expects {self.predvars[name]} arguments, got {len(args)}", tok)
                return PredVar(name, args)
            if name in self.preds:
                self.i += 1
                return Pred(name, self.pred_args(scope))
        return self.equation(scope)

    def equation(self, scope) -> Formula:
        left = self.term(scope)
        if self.at("="):
            self.i += 1
            return Eq(left, self.term(scope))
        if self.at("!="):
            self.i += 1
            return Neq(left, self.term(scope))
        self.error(f"expected '=' or '!=' after term, found {self.tok.value or 'end of input'!r}")

    def fixed_point(self, scope) -> Formula:
        self.expect("[")
        if not (self.at_kw("mu") or self.at_kw("nu")):
            self.error("expected 'mu' or 'nu'")
        kind = Mu if self.tok.value == "mu" else Nu
        self.i += 1
        a = self.binder(require_pred=True)
        self.expect("]")
        if not self.at("("):
            self.error("expected argument list after fixed point")
        args = self.pred_args(scope)
        if len(args) != a.arity:
            self.error(f"fixed point {a.pred_var} expects {a.arity} arguments, got {len(args)}")
        return kind(a, args)

    def binder(self, require_pred: bool) -> Abstraction:
        pred = self.binder_name() if require_pred else "S"
        params: list[str] = []
        while self.tok.kind == "ident":
            params.append(self.binder_name())
        if len(set(params)) != len(params):
            self.error("repeated parameter name")
        self.expect(".")
        saved = dict(self.predvars), self.preds
        if require_pred:
            self.predvars[pred] = len(params)
        self.preds = set()
        try:
            body = self.formula(frozenset(params))
        finally:
            self.predvars, self.preds = saved
        return Abstraction(pred, tuple(params), body)

    def abstraction(self) -> Abstraction:
        self.expect("lam")
        return self.binder(require_pred=False)

    def formula_list(self, scope, stop: set[str]) -> list[Formula]:
        out: list[Formula] = []
        if self.tok.kind == "sym" and self.tok.value in stop:
            return out
        out.append(self.formula(scope))
        while self.at(","):
            self.i += 1
            out.append(self.formula(scope))
        return out

    def end(self):
        if self.tok.kind != "eof":
            self.error(f"unexpected {self.tok.value!r}")

    # --------------------------------------------------------- problem file
    def problem(self, text: str) -> ProblemFile:
        from .kernel import Sequent

        self.preds = self._scan_predicates()
        sig_entries: dict[str, int] = {}
        raw: dict[str, _RawDef] = {}
        order: list[str] = []
        goals: list[tuple[str, list, list, Token]] = []
        while self.tok.kind != "eof":
            tok = self.tok
            if self.at_kw("signature"):
                self.i += 1
                while not self.at("."):
                    ctok = self.tok
                    name = self.ident()
                    self.expect("/")
                    if self.tok.kind != "num":
                        self.error("expected arity")
                    arity = int(self.tok.value)
                    self.i += 1
                    if name in KEYWORDS or name in self.preds:
                        self.error(f"{name!r} cannot be a constructor", ctok)
                    if name in sig_entries and sig_entries[name] != arity:
                        self.error(f"conflicting arity for {name}", ctok)
                    sig_entries[name] = arity
                self.expect(".")
                try:
                    self.sig = Signature(sig_entries)
                except SignatureError as e:
                    self.error(str(e), tok)
            elif self.at_kw("define") or self.at_kw("codefine"):
                kind = "mu" if self.tok.value == "define" else "nu"
                self.i += 1
                name = self.ident()
                if name in raw:
                    self.error(f"predicate {name} defined twice", tok)
                params: list[str] = []
                if self.at("("):
                    self.i += 1
                    params.append(self.binder_name())
                    while self.at(","):
                        self.i += 1
                        params.append(self.binder_name())
                    self.expect(")")
                else:
                    while self.tok.kind == "ident":
                        params.append(self.binder_name())
                if len(set(params)) != len(params):
                    self.error("repeated parameter name", tok)
                self.expect(":=")
                body = self.formula(frozenset(params))
                self.expect(".")
                raw[name] = _RawDef(kind, params, body, line=tok.line)
                order.append(name)
            elif self.at_kw("goal"):
                self.i += 1
                name = self.ident()
                if any(g[0] == name for g in goals):
                    self.error(f"duplicate goal name {name}", tok)
                self.expect(":")
                left = self.formula_list(frozenset(), {"|-"})
                self.expect("|-")
                right = self.formula_list(frozenset(), {"."})
                self.expect(".")
                goals.append((name, left, right, tok))
            elif self.tok.kind == "ident" and self.tok.value in self.preds:
                name = self.ident()
                entry = raw.get(name)
                if entry is None:
                    entry = raw[name] = _RawDef("horn", line=tok.line)
                    order.append(name)
                elif entry.kind != "horn":
                    self.error(f"predicate {name} mixes clauses and define", tok)
                self.clause_vars = []
                try:
                    args = list(self.pred_args(frozenset()))
                    body = None
                    if self.at(":-"):
                        self.i += 1
                        items = self.formula_list(frozenset(), {"."})
                        body = tensor(items)
                    self.expect(".")
                    entry.clauses.append(_Clause(args, body, list(self.clause_vars), tok.line))
                finally:
                    self.clause_vars = None
                if len({len(c.args) for c in entry.clauses}) > 1:
                    self.error(f"clauses for {name} disagree on arity", tok)
            else:
                self.error(f"expected a declaration, found {self.tok.value!r}")
        defs = compile_definitions(raw, order, self.sig)
        built = []
        for name, left, right, tok in goals:
            try:
                seq = Sequent((), tuple(desugar(f, defs) for f in left),
                              tuple(desugar(f, defs) for f in right))
            except FormulaError as e:
                raise ParseError(f"goal {name}: {e}", tok.line, tok.col) from None
            built.append(Goal(name, seq))
        return ProblemFile(self.sig, defs, built, text)

    def _scan_predicates(self) -> set[str]:
        names: set[str] = set()
        depth, start = 0, True
        toks = self.toks
        for k, t in enumerate(toks):
            if start and t.kind == "ident":
                if t.value in ("define", "codefine"):
                    if toks[k + 1].kind == "ident":
                        names.add(toks[k + 1].value)
                elif t.value not in KEYWORDS:
                    names.add(t.value)
            start = False
            if t.kind == "sym":
                if t.value == "[":
                    depth += 1
                elif t.value == "]":
                    depth -= 1
                elif t.value == "." and depth == 0:
                    start = True
        return names


def _compile_clause(c: _Clause, params: tuple, sig: Signature) -> Formula:
    mapping: dict[str, Term] = {}
    eqs: list[Formula] = []
    for p, h in zip(params, c.args):
        if isinstance(h, Var) and h.name not in mapping:
            mapping[h.name] = Var(p)
        else:
            eqs.append(Eq(Var(p), h))
    avoid = set(params) | set(c.clause_vars) | set(sig.entries)
    existentials: list[str] = []
    for v in c.clause_vars:
        if v not in mapping:
            new = fresh_name(v, avoid) if v in params else v
            avoid.add(new)
            mapping[v] = Var(new)
            existentials.append(new)
    # equations mention clause variables too; rename them together with the body
    eqs = [Eq(e.left, apply_substitution(mapping, e.right)) for e in eqs]
    parts = eqs + ([subst(c.body, mapping)] if c.body is not None else [])
    f = tensor(parts)
    for v in reversed(existentials):
        f = Ex(v, f)
    return f


def compile_definitions(raw: dict, order: list[str], sig: Signature) -> dict[str, Definition]:
    """Turn parsed definitions into closed, monotone fixed-point abstractions."""
    surface: dict[str, tuple[str, tuple, Formula, int]] = {}
    for name in order:
        d = raw[name]
        if d.kind == "horn":
            arity = len(d.clauses[0].args)
            first = next(
                (c for c in d.clauses
                 if all(isinstance(a, Var) for a in c.args)
                 and len({a.name for a in c.args}) == arity),
                None,
            )
            if first is not None:
                params = tuple(a.name for a in first.args)
            else:
                avoid = set(sig.entries)
                params = []
                for k in range(arity):
                    p = fresh_name(f"X{k + 1}", avoid)
                    avoid.add(p)
                    params.append(p)
                params = tuple(params)
            body = disjunction(_compile_clause(c, params, sig) for c in d.clauses)
            surface[name] = ("mu", params, body, d.line)
        else:
            surface[name] = (d.kind, tuple(d.params), d.body, d.line)

    deps = {n: _pred_refs(surface[n][2]) for n in surface}
    for n, ds in deps.items():
        for q in ds:
            if q not in surface:
                raise ParseError(f"definition of {n} uses undefined predicate {q}", surface[n][3])
    done: dict[str, Definition] = {}
    state: dict[str, int] = {}

    def visit(n, stack):
        if state.get(n) == 2:
            return
        if state.get(n) == 1:
            cycle = stack[stack.index(n):]
            raise ParseError(f"mutual recursion between {', '.join(cycle)} is not supported",
                             surface[n][3])
        state[n] = 1
        for q in sorted(deps[n] - {n}):
            visit(q, stack + [q])
        state[n] = 2
        kind, params, body, line = surface[n]
        own = _resolve(body, n, len(params), done, line)
        a = Abstraction(n, params, own)
        if abstraction_free_vars(a):
            raise ParseError(f"definition of {n} has free variables "
                             f"{', '.join(sorted(abstraction_free_vars(a)))}", line)
        if not check_monotonic(a):
            raise ParseError(f"definition of {n} is not monotonic", line)
        done[n] = Definition(kind, a)

    for n in order:
        visit(n, [n])
    return {n: done[n] for n in order}


def _pred_refs(f) -> set[str]:
    if isinstance(f, Pred):
        return {f.name}
    if hasattr(f, "a"):
        return _pred_refs(f.a) | _pred_refs(f.b)
    if hasattr(f, "body") and not isinstance(f, (Mu, Nu)):
        return _pred_refs(f.body)
    return set()


def _resolve(f, self_name, arity, done, line):
    if isinstance(f, Pred):
        if f.name == self_name:
            if len(f.args) != arity:
                raise ParseError(f"{self_name} expects {arity} arguments, got {len(f.args)}", line)
            return PredVar(self_name, f.args)
        try:
            return done[f.name].apply(f.args)
        except FormulaError as e:
            raise ParseError(str(e), line) from None
    if hasattr(f, "a"):
        return type(f)(_resolve(f.a, self_name, arity, done, line),
                       _resolve(f.b, self_name, arity, done, line))
    if isinstance(f, (All, Ex)):
        return type(f)(f.var, _resolve(f.body, self_name, arity, done, line))
    return f


# ------------------------------------------------------------------ helpers

def _bounded(fn):
    """Report runaway nesting as a parse error instead of RecursionError."""
    @functools.wraps(fn)
    def wrapper(*args, **kw):
        try:
            return fn(*args, **kw)
        except RecursionError:
            raise ParseError("input nested too deeply") from None
    return wrapper


@_bounded
def parse_problem_file(text: str) -> ProblemFile:
    return Parser(text).problem(text)


@_bounded
def parse_term(text: str, signature: Signature, variables=()) -> Term:
    p = Parser(text, signature)
    t = p.term(frozenset(variables))
    p.end()
    return t


@_bounded
def parse_formula(text: str, signature: Signature, variables=(), preds=()) -> Formula:
    p = Parser(text, signature, preds)
    f = p.formula(frozenset(variables))
    p.end()
    return f


@_bounded
def parse_abstraction(text: str, signature: Signature) -> Abstraction:
    p = Parser(text, signature)
    a = p.abstraction()
    p.end()
    return a


def check_identifier(name: str, signature: Signature) -> str:
    if not re.fullmatch(r"[A-Za-z][A-Za-z0-9_]*", name) or name in KEYWORDS or name in signature:
        raise ParseError(f"{name!r} is not a usable variable name")
    return name


