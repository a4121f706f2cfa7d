"""First-order terms over a ranked signature, substitutions and unification."""

from __future__ import annotations

import re
from dataclasses import dataclass, fields
from itertools import product
from typing import Iterable, Iterator, Mapping


def node(cls):
    """Frozen dataclass whose structural hash is computed once and cached."""
    cls = dataclass(frozen=True)(cls)
    names = tuple(f.name for f in fields(cls))

    def __hash__(self):
        try:
            return self.__dict__["_hash"]
        except KeyError:
            h = hash((cls.__name__,) + tuple(getattr(self, n) for n in names))
            object.__setattr__(self, "_hash", h)
            return h

    cls.__hash__ = __hash__
    return cls


@node
class Var:
    name: str

    def __str__(self) -> str:
        return self.name


@node
class App:
    name: str
    args: tuple = ()

    def __str__(self) -> str:
        # iterative: numerals nest deeply
        out: list[str] = []
        stack: list = [self]
        while stack:
            t = stack.pop()
            if isinstance(t, str):
                out.append(t)
            elif isinstance(t, Var) or not t.args:
                out.append(t.name)
            else:
                out.append(t.name + "(")
                stack.append(")")
                for k in reversed(range(len(t.args))):
                    stack.append(t.args[k])
                    if k:
                        stack.append(", ")
        return "".join(out)


Term = Var | App
Substitution = Mapping[str, Term]


class SignatureError(ValueError):
    pass


class Signature:
    """Ranked signature: constructor name -> arity."""

    def __init__(self, entries: Mapping[str, int]):
        entries = dict(entries)
        for name, arity in entries.items():
            if not re.fullmatch(r"[a-zA-Z][a-zA-Z0-9_]*", name):
                raise SignatureError(f"bad constructor name {name!r}")
            if not isinstance(arity, int) or arity < 0:
                raise SignatureError(f"bad arity for {name}: {arity!r}")
        if entries and not any(a == 0 for a in entries.values()):
            raise SignatureError("signature has no constants, so there are no closed terms")
        self.entries = entries

    def __contains__(self, name: str) -> bool:
        return name in self.entries

    def __eq__(self, other) -> bool:
        return isinstance(other, Signature) and self.entries == other.entries

    def __hash__(self):
        return hash(tuple(sorted(self.entries.items())))

    def __repr__(self) -> str:
        return f"Signature({self.entries!r})"

    def arity(self, name: str) -> int:
        return self.entries[name]

    @property
    def constants(self) -> list[str]:
        return sorted(n for n, a in self.entries.items() if a == 0)

    @property
    def is_finite(self) -> bool:
        """True when every constructor is a constant (finite Herbrand universe)."""
        return all(a == 0 for a in self.entries.values())

    @property
    def has_numerals(self) -> bool:
        return self.entries.get("z") == 0 and self.entries.get("s") == 1

    def check_term(self, t: Term, variables: Iterable[str] = ()) -> None:
        variables = set(variables)
        for sub in subterms(t):
            if isinstance(sub, Var):
                if sub.name not in variables:
                    raise SignatureError(f"variable {sub.name} not in context")
            elif sub.name not in self.entries:
                raise SignatureError(f"undeclared constructor {sub.name}")
            elif self.entries[sub.name] != len(sub.args):
                raise SignatureError(
                    f"{sub.name} expects {self.entries[sub.name]} arguments, got {len(sub.args)}"
                )


def subterms(t: Term) -> Iterator[Term]:
    stack = [t]
    while stack:
        u = stack.pop()
        yield u
        if isinstance(u, App):
            stack.extend(u.args)


def term_vars(t: Term) -> set[str]:
    if isinstance(t, Var):
        return {t.name}
    out: set[str] = set()
    for a in t.args:
        out |= term_vars(a)
    return out


def occurs(name: str, t: Term) -> bool:
    if isinstance(t, Var):
        return t.name == name
    return any(occurs(name, a) for a in t.args)


def term_depth(t: Term) -> int:
    if isinstance(t, Var) or not t.args:
        return 1
    return 1 + max(term_depth(a) for a in t.args)


def numeral(n: int) -> Term:
    t: Term = App("z")
    for _ in range(n):
        t = App("s", (t,))
    return t


def apply_substitution(theta: Substitution, t: Term) -> Term:
    if not theta:
        return t
    if isinstance(t, Var):
        return theta.get(t.name, t)
    if not t.args:
        return t
    return App(t.name, tuple(apply_substitution(theta, a) for a in t.args))


def compose(theta: Substitution, sigma: Substitution) -> dict[str, Term]:
    """The substitution `sigma after theta` (apply theta first)."""
    out = {x: apply_substitution(sigma, t) for x, t in theta.items()}
    for x, t in sigma.items():
        out.setdefault(x, t)
    return {x: t for x, t in out.items() if t != Var(x)}


def unify(t: Term, s: Term) -> dict[str, Term] | None:
    """Most general unifier of t and s, or None when they do not unify.

    The result is idempotent.  When two distinct variables meet, the
    lexicographically smaller name is bound to the larger one, so the
    result is canonical.
    """
    theta: dict[str, Term] = {}
    stack = [(t, s)]
    while stack:
        a, b = stack.pop()
        a = apply_substitution(theta, a)
        b = apply_substitution(theta, b)
        if a == b:
            continue
        if isinstance(a, Var) and isinstance(b, Var):
            lo, hi = sorted((a.name, b.name))
            binding = {lo: Var(hi)}
        elif isinstance(a, Var):
            if occurs(a.name, b):
                return None
            binding = {a.name: b}
        elif isinstance(b, Var):
            if occurs(b.name, a):
                return None
            binding = {b.name: a}
        else:
            if a.name != b.name or len(a.args) != len(b.args):
                return None
            stack.extend(zip(reversed(a.args), reversed(b.args)))
            continue
        theta = {x: apply_substitution(binding, u) for x, u in theta.items()}
        theta.update(binding)
    return theta


def fresh_name(base: str, avoid: Iterable[str]) -> str:
    """`base` itself if free, otherwise `base_k` for the least k >= 1 not in avoid."""
    avoid = set(avoid)
    if base not in avoid:
        return base
    stem = re.sub(r"_\d+$", "", base) or "x"
    k = 1
    while f"{stem}_{k}" in avoid:
        k += 1
    return f"{stem}_{k}"


def rename_apart(t: Term, avoid: Iterable[str]) -> Term:
    avoid = set(avoid)
    own = term_vars(t)
    mapping: dict[str, Term] = {}
    for name in sorted(own):
        new = name if name not in avoid else fresh_name(name, avoid | own)
        avoid.add(new)
        mapping[name] = Var(new)
    return apply_substitution(mapping, t)


def enumerate_terms(sig: Signature, variables: Iterable[str], max_depth: int) -> list[Term]:
    """All Σ(𝒳)-terms of depth <= max_depth, ordered by depth then syntax."""
    leaves: list[Term] = [Var(v) for v in sorted(variables)] + [App(c) for c in sig.constants]
    by_depth: list[list[Term]] = [leaves]
    seen = list(leaves)
    if max_depth < 1:
        return []
    funcs = sorted((n, a) for n, a in sig.entries.items() if a > 0)
    for d in range(2, max_depth + 1):
        layer: list[Term] = []
        prev = set(by_depth[-1])
        for name, arity in funcs:
            for args in product(seen, repeat=arity):
                if any(a in prev for a in args):
                    layer.append(App(name, tuple(args)))
        if not layer:
            break
        by_depth.append(layer)
        seen = seen + layer
    return seen
