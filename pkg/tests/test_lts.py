import numpy as np
import pytest

from mumall.lts import LTS, bisimilarity, problem_text, random_lts, state_pairs
from mumall.syntax import parse_problem_file


def naive_bisimilarity(lts: LTS) -> set:
    """Largest relation closed under the transfer conditions, by deleting bad pairs."""
    rel = {(p, q) for p in lts.states for q in lts.states}

    def matches(p, q):
        for a in lts.labels:
            for p1 in lts.successors(p, a):
                if not any((p1, q1) in rel for q1 in lts.successors(q, a)):
                    return False
            for q1 in lts.successors(q, a):
                if not any((p1, q1) in rel for p1 in lts.successors(p, a)):
                    return False
        return True

    changed = True
    while changed:
        bad = {pq for pq in rel if not matches(*pq)}
        changed = bool(bad)
        rel -= bad
    return rel


@pytest.mark.parametrize("seed", range(40))
def test_partition_refinement_matches_naive(seed):
    lts = random_lts(np.random.default_rng(seed), n_states=5, density=0.25)
    assert bisimilarity(lts) == naive_bisimilarity(lts)


def test_bisimilarity_is_an_equivalence():
    lts = random_lts(np.random.default_rng(3))
    rel = bisimilarity(lts)
    assert all((p, p) in rel for p in lts.states)
    assert all((q, p) in rel for p, q in rel)


def test_problem_text_parses():
    lts = random_lts(np.random.default_rng(0))
    pairs = state_pairs(lts)
    rel = bisimilarity(lts)
    p = parse_problem_file(problem_text(lts, pairs, [pq in rel for pq in pairs]))
    assert len(p.goals) == len(pairs) == 10
    assert p.definitions["bisim"].kind == "nu"


def test_empty_step_relation():
    lts = LTS(("s0", "s1"), ("a",), frozenset())
    p = parse_problem_file(problem_text(lts, [("s0", "s1")], [True]))
    assert p.goals[0].name == "bisim_s0_s1"
