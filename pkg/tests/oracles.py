"""Reference implementations used to cross-check the package.

Nothing here calls the prover: unifiers are found by brute force, additive
formulas are enumerated exhaustively and evaluated truth-functionally."""

from __future__ import annotations

from itertools import combinations_with_replacement, product

import numpy as np

from mumall.kernel import Sequent
from mumall.logic import (
    All, AndNeg, AndPos, Eq, Ex, FalsePos, Imp, Neq, OrNeg, OrPos, TrueNeg, TruePos, FalseNeg,
)
from mumall.terms import App, Signature, Var, apply_substitution, enumerate_terms, term_vars


# ------------------------------------------------------------- unification

def ground_terms(sig: Signature, depth: int) -> list:
    return enumerate_terms(sig, (), depth)


def brute_unifiers(t, s, sig: Signature, depth: int = 2) -> list[dict]:
    """Every ground substitution (into terms of bounded depth) that equates t and s."""
    xs = sorted(term_vars(t) | term_vars(s))
    pool = ground_terms(sig, depth)
    out = []
    for vals in product(pool, repeat=len(xs)):
        sigma = dict(zip(xs, vals))
        if apply_substitution(sigma, t) == apply_substitution(sigma, s):
            out.append(sigma)
    return out


# ------------------------------------------------------- additive formulas

def additive_formulas(depth: int, atoms) -> list:
    """All formulas over ∧⁻ and ∨ with the given atoms, of depth <= depth."""
    layers = [list(atoms)]
    everything = list(atoms)
    for _ in range(depth - 1):
        new = [c(a, b) for c in (AndNeg, OrPos) for a in everything for b in everything]
        fresh = [f for f in new if f not in set(everything)]
        everything = list(atoms) + new
        layers.append(fresh)
    return list(dict.fromkeys(everything))


PROPOSITIONAL_ATOMS = (TrueNeg(), FalsePos())


def closed_literals(constants=("a", "b")):
    cs = [App(c) for c in constants]
    return [k(x, y) for k in (Eq, Neq) for x in cs for y in cs]


def truth(f) -> bool:
    """Truth-functional value of a closed additive formula."""
    if isinstance(f, TrueNeg):
        return True
    if isinstance(f, FalsePos):
        return False
    if isinstance(f, Eq):
        return f.left == f.right
    if isinstance(f, Neq):
        return f.left != f.right
    if isinstance(f, AndNeg):
        return truth(f.a) and truth(f.b)
    if isinstance(f, OrPos):
        return truth(f.a) or truth(f.b)
    raise ValueError(type(f).__name__)


def multisets(n: int, max_size: int, min_size: int = 0) -> list[tuple[int, ...]]:
    """Sorted index tuples: every multiset over range(n) with size in [min_size, max_size]."""
    out: list[tuple[int, ...]] = []
    for k in range(min_size, max_size + 1):
        out.extend(combinations_with_replacement(range(n), k))
    return out


# -------------------------------------------------- random MALL sequents

SMALL_SIG = Signature({"a": 0, "b": 0, "f": 1})


def random_term(rng: np.random.Generator, scope: list[str], depth: int = 2):
    choices = [App("a"), App("b")] + [Var(x) for x in scope]
    if depth > 1 and rng.random() < 0.3:
        return App("f", (random_term(rng, scope, depth - 1),))
    return choices[rng.integers(len(choices))]


def random_formula(rng: np.random.Generator, size: int, scope: list[str], names=iter(())):
    """A fixed-point-free formula with at most `size` connectives."""
    if size <= 1:
        k = rng.integers(6)
        if k == 0:
            return (TrueNeg(), FalsePos(), TruePos(), FalseNeg())[rng.integers(4)]
        cls = Eq if k < 4 else Neq
        return cls(random_term(rng, scope), random_term(rng, scope))
    k = rng.integers(8)
    if k < 6:
        cls = (AndNeg, OrPos, AndPos, OrNeg, Imp, AndPos)[k]
        left = int(rng.integers(1, size))
        return cls(random_formula(rng, left, scope), random_formula(rng, size - left, scope))
    var = f"x{len(scope)}"
    body = random_formula(rng, size - 1, scope + [var])
    return (All if k == 6 else Ex)(var, body)


def random_mall_sequent(rng: np.random.Generator, max_size: int = 12) -> Sequent:
    """Closed sequent with 1-3 formulas and total connective count <= max_size."""
    n = int(rng.integers(1, 4))
    budget = int(rng.integers(n, max_size + 1))
    cuts = sorted(rng.choice(np.arange(1, budget), size=n - 1, replace=False)) if n > 1 else []
    sizes = np.diff([0, *cuts, budget])
    fs = [random_formula(rng, int(s), []) for s in sizes]
    split = int(rng.integers(0, n + 1))
    return Sequent((), tuple(fs[:split]), tuple(fs[split:]))
