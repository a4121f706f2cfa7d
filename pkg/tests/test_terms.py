from itertools import product

import pytest
from hypothesis import given
from hypothesis import strategies as st

from mumall.terms import (
    App, Signature, SignatureError, Var, apply_substitution, compose, enumerate_terms, numeral,
    rename_apart, term_vars, unify,
)
from oracles import brute_unifiers
from strategies import SIG3, VARS, terms

X, Y = Var("X"), Var("Y")
a, b = App("a"), App("b")


def f(t):
    return App("f", (t,))


def g(t, u):
    return App("g", (t, u))


def test_signature_needs_a_constant():
    with pytest.raises(SignatureError):
        Signature({"s": 1})
    with pytest.raises(SignatureError):
        Signature({"a": -1})
    assert Signature({"z": 0, "s": 1}).has_numerals


def test_check_term_reports_arity_and_scope():
    sig = Signature({"z": 0, "s": 1})
    sig.check_term(App("s", (Var("x"),)), ["x"])
    with pytest.raises(SignatureError, match="expects 1"):
        sig.check_term(App("s", ()))
    with pytest.raises(SignatureError, match="not in context"):
        sig.check_term(Var("y"), ["x"])


def test_apply_substitution_examples():
    assert apply_substitution({"x": numeral(0)}, App("s", (Var("x"),))) == numeral(1)
    assert apply_substitution({}, g(a, b)) == g(a, b)
    theta = {"x": App("s", (a,)), "y": a}
    t = g(Var("x"), Var("y"))
    assert apply_substitution(theta, apply_substitution(theta, t)) == apply_substitution(theta, t)


def test_unify_examples():
    assert unify(g(X, f(a)), g(b, Y)) == {"X": b, "Y": f(a)}
    assert unify(X, f(X)) is None
    assert unify(App("s", (X,)), App("s", (Y,))) == {"X": Y}
    assert unify(a, b) is None
    assert unify(g(X, X), g(a, b)) is None


def test_rename_apart_examples():
    t = rename_apart(f(Var("x")), {"x"})
    assert isinstance(t.args[0], Var) and t.args[0].name != "x"
    assert rename_apart(a, {"x"}) == a


@given(terms(), st.lists(st.sampled_from(["X", "Y", "Z", "X_1", "W"]), max_size=4))
def test_rename_apart_is_injective_and_avoids(t, avoid):
    r = rename_apart(t, avoid)
    assert not (term_vars(r) & set(avoid))
    assert len(term_vars(r)) == len(term_vars(t))
    # same shape once variables are forgotten
    erase = {v: a for v in term_vars(t)}
    assert apply_substitution(erase, t) == apply_substitution({v: a for v in term_vars(r)}, r)


@given(terms())
def test_repeated_renaming_gives_disjoint_variables(t):
    seen = set(term_vars(t))
    for _ in range(3):
        r = rename_apart(t, seen)
        assert not (term_vars(r) & seen)
        seen |= term_vars(r)


@given(terms(max_leaves=4), terms(max_leaves=4))
def test_unify_sound_and_idempotent(t, s):
    theta = unify(t, s)
    if theta is None:
        return
    assert apply_substitution(theta, t) == apply_substitution(theta, s)
    for x, u in theta.items():
        assert apply_substitution(theta, u) == u
        assert x not in term_vars(u)


def _small_pairs():
    leaves = [a, X, Y]
    shallow = leaves + [f(u) for u in leaves] + [g(u, v) for u in leaves for v in leaves]
    return list(product(shallow, repeat=2))


@pytest.mark.parametrize("t,s", _small_pairs()[::7])
def test_unify_agrees_with_brute_force(t, s):
    """Absent iff no ground unifier; every ground unifier factors through the mgu."""
    found = brute_unifiers(t, s, SIG3, depth=2)
    theta = unify(t, s)
    assert (theta is None) == (not found)
    if theta is None:
        return
    for sigma in found:
        # sigma itself witnesses the factorisation: sigma . theta = sigma
        for x in set(sigma):
            assert apply_substitution(sigma, apply_substitution(theta, Var(x))) == sigma[x]


def test_unify_generality_counts():
    """A non-ground mgu leaves its range variables free, so the brute-force
    unifiers of f(X) = f(Y) are exactly the diagonal."""
    pool = enumerate_terms(SIG3, (), 2)
    found = brute_unifiers(f(X), f(Y), SIG3, depth=2)
    assert len(found) == len(pool)


@given(terms(), st.dictionaries(st.sampled_from(VARS), terms(max_leaves=3), max_size=2))
def test_substitution_preserves_arities(t, theta):
    SIG3.check_term(apply_substitution(theta, t), VARS)


@given(st.dictionaries(st.sampled_from(VARS), terms(("W",), 3), max_size=3),
       st.dictionaries(st.sampled_from(("W",)), terms((), 3), max_size=1), terms())
def test_compose_applies_in_order(theta, sigma, t):
    assert apply_substitution(compose(theta, sigma), t) == \
        apply_substitution(sigma, apply_substitution(theta, t))


def test_enumerate_terms_by_depth():
    sig = Signature({"z": 0, "s": 1})
    assert enumerate_terms(sig, (), 3) == [numeral(0), numeral(1), numeral(2)]
    assert enumerate_terms(sig, ("x",), 2) == [Var("x"), numeral(0), App("s", (Var("x"),)), numeral(1)]
    assert len(set(enumerate_terms(SIG3, (), 2))) == len(enumerate_terms(SIG3, (), 2)) == 2 + 2 + 4
