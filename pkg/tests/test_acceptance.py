"""End-to-end acceptance checks, one test per requirement, in order.

Everything runs at full scale, so the whole file takes several minutes.
"""

import time
from functools import lru_cache

import numpy as np

from mumall import search
from mumall.certificates import (
    CertificateError, deserialize_certificate, serialize_certificate,
)
from mumall.cli import main
from mumall.kernel import RuleConfig, check_certificate, fill_conclusions
from mumall.logic import abstraction_key
from mumall.lts import bisimilarity, problem_text, random_lts, state_pairs
from mumall.search import (
    BudgetExceeded, NoProof, Proved, SearchBudget, predicate_tuples, prove, prove_mall,
)
from mumall.suites import (
    SuiteConfig, agreement_counterexamples, cut_counterexamples, initial_counterexamples,
    oracle_table, strengthening_counterexamples, weakening_contraction_counterexamples,
)
from mumall.syntax import parse_problem_file
from mumall.terms import App, term_vars

from corpus import CORPUS, corpus_documents, same_rules
from oracles import SMALL_SIG, random_mall_sequent


def load(name):
    return parse_problem_file((CORPUS / name).read_text())


def tags(cert):
    return [n.rule.tag for n in cert.nodes()]


@lru_cache(maxsize=None)
def propositional_table():
    return oracle_table(SuiteConfig())


# ------------------------------------------------------------------------

def test_1_subset_proof_shape_and_check(tmp_path):
    p = load("subset.mu")
    start = time.perf_counter()
    r = prove(p.goal("subset").sequent, p.definitions, signature=p.signature)
    elapsed = time.perf_counter() - start
    assert isinstance(r, Proved) and elapsed < 1.0
    t = tags(r.certificate)
    assert t.count("OrL") == 1 and t.count("EqLUnify") == 2
    orl = next(n for n in r.certificate.nodes() if n.rule.tag == "OrL")
    assert [tags(branch)[0] for branch in orl.premises] == ["EqLUnify", "EqLUnify"]
    assert check_certificate(r.certificate, RuleConfig(), p.signature)

    cert = tmp_path / "subset.muproof"
    problem = str(CORPUS / "subset.mu")
    assert main(["prove", problem, "--emit-cert", str(cert)]) == 0
    assert main(["check", str(cert), problem]) == 0


def test_2_graph_corpus():
    g = load("graph.mu")
    start = time.perf_counter()
    adj = prove(g.goal("adj_ac").sequent, g.definitions, signature=g.signature)
    path_ac = prove(g.goal("path_ac").sequent, g.definitions, signature=g.signature)
    path_ca = prove(g.goal("path_ca").sequent, g.definitions, signature=g.signature)
    elapsed = time.perf_counter() - start

    assert isinstance(adj, Proved)
    assert tags(adj.certificate) == [
        "MuLUnfold", "OrL", "AndPosL", "EqLClash", "OrL", "AndPosL", "EqLClash",
        "AndPosL", "EqLClash"]
    leaves = [n for n in adj.certificate.nodes() if not n.premises]
    assert len(leaves) == 3 and all(n.rule.tag == "EqLClash" for n in leaves)

    assert isinstance(path_ac, Proved)

    assert isinstance(path_ca, Proved)
    inductions = [n for n in path_ca.certificate.nodes() if n.rule.tag == "MuLInd"]
    assert len(inductions) == 1
    a, b, c = (App(x) for x in "abc")
    everything = {(u, v) for u in (a, b, c) for v in (a, b, c)}
    assert predicate_tuples(inductions[0].rule.invariant, g.signature) == \
        everything - {(b, a), (c, a)}
    assert elapsed < 5.0


def test_3_bounded_arithmetic():
    p = load("arith.mu")
    lt = prove(p.goal("lt_refl").sequent, p.definitions, signature=p.signature)
    assert isinstance(lt, Proved)

    config = RuleConfig(witness_depth=21)
    start = time.perf_counter()
    r = prove(p.goal("plus_comm").sequent, p.definitions, SearchBudget(witness_depth=21),
              config, p.signature)
    elapsed = time.perf_counter() - start
    assert isinstance(r, Proved) and elapsed < 60.0

    plus = abstraction_key(p.definitions["plus"].apply((App("z"),) * 3).abs)
    evaluated = set()
    for n in fill_conclusions(r.certificate, p.signature).nodes():
        if n.rule.tag != "MuR":
            continue
        f = n.conclusion.right[n.rule.principal]
        if abstraction_key(f.abs) == plus and not any(term_vars(t) for t in f.args):
            evaluated.add(f.args)
    assert len(evaluated) >= 100


def test_4_init_rule_sensitivity():
    n = load("nat.mu")
    s = n.goal("nat_refl").sequent
    start = time.perf_counter()
    without = prove(s, n.definitions, signature=n.signature)
    assert isinstance(without, BudgetExceeded)
    assert time.perf_counter() - start < 30.0

    with_init = prove(s, n.definitions, config=RuleConfig(allow_init=True), signature=n.signature)
    assert isinstance(with_init, Proved)
    assert tags(with_init.certificate) == ["AllR", "ImpR", "MuInit"]

    problem = str(CORPUS / "nat.mu")
    assert main(["prove", problem]) == 1
    assert main(["prove", problem, "--enable-init"]) == 0


def test_5_additive_theorem_suites():
    # timed from cold memo tables so the oracle work is counted
    propositional_table.cache_clear()
    search._oracle.cache_clear()
    start = time.perf_counter()
    table = propositional_table()
    assert table.n == 202 and len(table.codes) == 1_414_910
    assert strengthening_counterexamples(table) == []
    assert weakening_contraction_counterexamples(table) == []
    assert initial_counterexamples(table.formulas) == []
    assert cut_counterexamples(table) == []
    assert time.perf_counter() - start < 120.0


def test_6_mall_decidability():
    rng = np.random.default_rng(6)
    config = RuleConfig(witness_depth=2)
    outcomes = set()
    for _ in range(1000):
        s = random_mall_sequent(rng, max_size=12)
        r = prove_mall(s, config, SMALL_SIG)
        assert isinstance(r, (Proved, NoProof))
        outcomes.add(type(r))
    assert outcomes == {Proved, NoProof}

    assert agreement_counterexamples(propositional_table()) == []


def test_7_certificate_integrity():
    docs = corpus_documents()
    assert len(docs) == 7
    blobs = []
    for d in docs.values():
        data = serialize_certificate(d)
        again = deserialize_certificate(data)
        assert serialize_certificate(again) == data
        assert again.root.conclusion == d.root.conclusion and same_rules(again.root, d.root)
        assert (again.format_version, again.problem_hash, again.goal_name, again.config,
                again.signature) == (d.format_version, d.problem_hash, d.goal_name, d.config,
                                     d.signature)
        blobs.append(data)

    rng = np.random.default_rng(7)
    tried = 0
    while tried < 10_000:
        data = blobs[tried % len(blobs)]
        pos = int(rng.integers(len(data)))
        value = int(rng.integers(256))
        if value == data[pos]:
            continue
        mutated = data[:pos] + bytes([value]) + data[pos + 1:]
        try:
            d = deserialize_certificate(mutated)
        except CertificateError:
            pass
        else:
            assert not check_certificate(d.root, d.config, d.signature), (tried, pos, value)
        tried += 1


def test_8_bisimulation_agrees_with_partition_refinement():
    rng = np.random.default_rng(2026)
    for k in range(20):
        lts = random_lts(rng)
        pairs = state_pairs(lts)
        related = bisimilarity(lts)
        problem = parse_problem_file(problem_text(lts, pairs, [pq in related for pq in pairs]))
        for goal in problem.goals:
            r = prove(goal.sequent, problem.definitions, SearchBudget(wall_clock_ms=60_000),
                      RuleConfig(), problem.signature)
            assert isinstance(r, Proved), (k, goal.name, type(r).__name__)
