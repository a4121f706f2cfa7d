"""Shared helpers: prove corpus goals and wrap the results as certificate documents."""

from functools import lru_cache
from pathlib import Path

from mumall.certificates import FORMAT_VERSION, CertDocument, problem_digest
from mumall.kernel import Certificate, RuleConfig
from mumall.search import Proved, SearchBudget, prove
from mumall.syntax import parse_problem_file

CORPUS = Path(__file__).resolve().parent.parent / "problems"

# goal -> (witness depth, allow_init) needed to prove it
SETTINGS = {"plus_comm": (21, False), "nat_refl": (3, True)}


@lru_cache(maxsize=None)
def corpus_documents() -> dict:
    """(file, goal) -> CertDocument for every provable corpus goal."""
    out = {}
    for path in sorted(CORPUS.glob("*.mu")):
        data = path.read_bytes()
        problem = parse_problem_file(data.decode())
        for g in problem.goals:
            depth, init = SETTINGS.get(g.name, (3, False))
            config = RuleConfig(allow_init=init, witness_depth=depth)
            r = prove(g.sequent, problem.definitions, SearchBudget(witness_depth=depth), config,
                      problem.signature)
            assert isinstance(r, Proved), g.name
            out[path.name, g.name] = CertDocument(
                FORMAT_VERSION, problem_digest(data), g.name, config, r.certificate, problem.signature)
    return out


def same_rules(x: Certificate, y: Certificate) -> bool:
    """Same rules and rule data at every node; conclusions are not compared."""
    if x.rule != y.rule or len(x.premises) != len(y.premises):
        return False
    return all(same_rules(p, q) for p, q in zip(x.premises, y.premises))
