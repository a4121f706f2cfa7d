from pathlib import Path

import pytest
from hypothesis import given
from hypothesis import strategies as st

from mumall.kernel import Sequent
from mumall.logic import Eq, Ex, Imp, Mu, OrPos, check_monotonic
from mumall.syntax import MAX_NUMERAL, ParseError, parse_formula, parse_problem_file, tokenize
from mumall.terms import App, Signature, numeral

CORPUS = Path(__file__).resolve().parent.parent / "problems"
CORPUS_TEXTS = {p.name: p.read_text() for p in sorted(CORPUS.glob("*.mu"))}


def test_numeral_goal():
    p = parse_problem_file("signature z/0 s/1.\ngoal g: |- 0 = 0.\n")
    assert p.goal("g").sequent == Sequent((), (), (Eq(numeral(0), numeral(0)),))


def test_goal_with_both_sides_and_empty_sides():
    p = parse_problem_file("signature a/0 b/0.\ngoal g: a = b, a = a |- .\ngoal h: |- a = a, b = b.\n")
    assert len(p.goal("g").sequent.left) == 2 and not p.goal("g").sequent.right
    assert len(p.goal("h").sequent.right) == 2


def test_arith_definitions_match_hand_expansion():
    p = parse_problem_file(CORPUS_TEXTS["arith.mu"])
    lt = p.definitions["lt"].abstraction
    x, y = lt.params
    base = parse_formula(f"{x} = z /\\+ (exists Y1, {y} = s(Y1))", p.signature, (x, y))
    body = lt.body
    assert isinstance(body, OrPos) and body.a == base
    step = body.b
    assert isinstance(step, Ex) and isinstance(step.body, Ex)
    # the recursive call is the abstraction's own predicate variable
    inner = step.body.body
    assert inner.b.b.name == lt.pred_var and check_monotonic(lt)
    plus = p.definitions["plus"].abstraction
    assert plus.arity == 3 and check_monotonic(plus)


def test_backtracking_reports_the_deeper_error():
    sig = Signature({"z": 0, "s": 1})
    with pytest.raises(ParseError, match="unbound variable A") as info:
        parse_formula("X = z /\\+ (exists Y1, Y = s(Y1)) \\/ (exists W, A(W))", sig, ("X", "Y"))
    assert info.value.col > 30


def test_ordinary_definition_form():
    p = parse_problem_file(CORPUS_TEXTS["nat.mu"])
    nat = p.definitions["nat"]
    assert nat.kind == "mu"
    goal = p.goal("nat_refl").sequent.right[0]
    assert isinstance(goal.body, Imp) and isinstance(goal.body.a, Mu)


@pytest.mark.parametrize("text,where", [
    ("signature a/0.\ngoal g: |- a = b.", (2, 16)),
    ("signature a/0.\ngoal g: |- true-.\ngoal g: |- true-.", (3, 1)),
    ("signature a/0.\ngoal g: |- a = .", (2, 16)),
    ("signature a/0 f/1.\ngoal g: |- f(a, a) = a.", (2, 12)),
    ("signature a/0.\ngoal g: |- all x, x = a", None),
    ("signature s/1.\n", None),
    ("goal g: |- 1 = 1.", None),
    ("signature z/0 s/1.\ngoal g: |- 999 = 0.", None),
    ("signature a/0.\ndefine p X := p X => false.\n", (2, 0)),
    ("signature a/0.\ngoal g: |- @.", None),
    ("goal g: |- " + "(" * 3000 + "true-" + ")" * 3000 + ".", None),
])
def test_errors_are_reported_with_positions(text, where):
    with pytest.raises(ParseError) as info:
        parse_problem_file(text)
    if where is not None:
        assert (info.value.line, info.value.col) == where


def test_numeral_limit_is_inclusive():
    p = parse_problem_file(f"signature z/0 s/1.\ngoal g: |- {MAX_NUMERAL} = 0.")
    assert str(p.goal("g").sequent).count("s(") == MAX_NUMERAL


def test_tokenizer_skips_comments():
    toks = tokenize("% only a comment\nsignature a/0. % trailing\n")
    assert [t.value for t in toks if t.kind != "eof"][:2] == ["signature", "a"]


def _mutations(text: str):
    alphabet = st.sampled_from(list("abXY()[],.:=|-/\\+%!0 \n") + ["all", "exists", "mu", "=>"])
    return st.tuples(st.integers(0, len(text)), st.integers(0, 3), st.lists(alphabet, max_size=3))


@pytest.mark.parametrize("name", sorted(CORPUS_TEXTS))
@given(data=st.data())
def test_fuzzed_corpus_never_crashes(name, data):
    text = CORPUS_TEXTS[name]
    pos, cut, ins = data.draw(_mutations(text))
    mutated = text[:pos] + "".join(ins) + text[pos + cut:]
    try:
        parse_problem_file(mutated)
    except ParseError:
        pass


@given(st.text(max_size=80))
def test_arbitrary_text_never_crashes(text):
    try:
        parse_problem_file(text)
    except ParseError:
        pass


def test_corpus_parses():
    for name, text in CORPUS_TEXTS.items():
        p = parse_problem_file(text)
        assert p.goals, name
        assert isinstance(p.signature, Signature)
