import json

import numpy as np
import pytest

from mumall.certificates import (
    HEADER, CertDocument, CertificateError, deserialize_certificate, serialize_certificate,
)
from mumall.kernel import Certificate, RuleApp, RuleConfig, Sequent, canonicalize, check_certificate
from mumall.logic import Eq, Imp, Mu, Abstraction, OrPos, PredVar
from mumall.terms import App, Signature, Var
from corpus import corpus_documents, same_rules


@pytest.fixture(scope="module")
def docs():
    return corpus_documents()


def test_round_trip_is_identity(docs):
    for key, d in docs.items():
        data = serialize_certificate(d)
        back = deserialize_certificate(data)
        assert serialize_certificate(back) == data, key
        assert back.root.conclusion == d.root.conclusion
        assert same_rules(back.root, d.root)
        assert (back.goal_name, back.problem_hash, back.config, back.signature) == \
            (d.goal_name, d.problem_hash, d.config, d.signature)
        assert check_certificate(back.root, back.config, back.signature)


def test_header_and_determinism(docs):
    d = docs["subset.mu", "subset"]
    data = serialize_certificate(d)
    assert data.startswith(HEADER) and data.count(b"\n") == 2
    assert serialize_certificate(d) == data


def test_init_certificate_is_three_nodes(docs):
    d = docs["nat.mu", "nat_refl"]
    body = json.loads(serialize_certificate(d)[len(HEADER):])
    node, count = body["root"], 0
    while True:
        count += 1
        if not node["premises"]:
            break
        node = node["premises"][0]
    assert count == 3 and node["rule"] == "MuInit"


def _rename(c: Certificate, old: str, new: str, root: bool = True) -> Certificate:
    """Rename one eigenvariable consistently in every rule's data.

    Inner conclusions are dropped, as on the wire, so the checker recomputes them."""
    from dataclasses import replace
    from mumall.logic import subst
    from mumall.terms import apply_substitution
    rho = {old: Var(new)}
    r = c.rule
    r = replace(
        r,
        fresh=new if r.fresh == old else r.fresh,
        witness=None if r.witness is None else apply_substitution(rho, r.witness),
        theta=None if r.theta is None else tuple(sorted(
            (new if x == old else x, apply_substitution(rho, t)) for x, t in r.theta)),
        cut=None if r.cut is None else subst(r.cut, rho),
    )
    return replace(c, rule=r, conclusion=c.conclusion if root else None,
                   premises=tuple(_rename(p, old, new, False) for p in c.premises))


def test_alpha_equivalent_certificates_serialize_identically(docs):
    from dataclasses import replace
    d = docs["subset.mu", "subset"]
    root = d.root
    assert root.rule.tag == "AllR"
    renamed = _rename(root, root.rule.fresh, "other")
    assert renamed != root
    assert check_certificate(renamed, d.config, d.signature)
    one = serialize_certificate(replace(d, root=canonicalize(root, d.signature)))
    two = serialize_certificate(replace(d, root=canonicalize(renamed, d.signature)))
    assert one == two


def test_truncated_input_reports_offset(docs):
    data = serialize_certificate(docs["graph.mu", "adj_ac"])
    with pytest.raises(CertificateError) as info:
        deserialize_certificate(data[:60])
    assert info.value.offset is not None and info.value.offset >= len(HEADER)


def _resign(body: dict) -> bytes:
    import hashlib
    body = dict(body)
    body.pop("digest", None)
    canon = lambda o: json.dumps(o, sort_keys=True, separators=(",", ":"), ensure_ascii=False).encode()
    body["digest"] = hashlib.sha256(canon(body)).hexdigest()
    return HEADER + canon(body) + b"\n"


def _body(doc):
    return json.loads(serialize_certificate(doc)[len(HEADER):])


def test_missing_invariant_names_node(docs):
    body = _body(docs["graph.mu", "path_ca"])
    stack = [(body["root"], "root")]
    while stack:
        node, path = stack.pop()
        if node["rule"] == "MuLInd":
            node["data"] = {}
            break
        stack += [(p, f"{path}.{k}") for k, p in enumerate(node["premises"])]
    with pytest.raises(CertificateError, match="invariant") as info:
        deserialize_certificate(_resign(body))
    assert info.value.path == path


@pytest.mark.parametrize("edit,match", [
    (lambda b: b.update(format_version="2"), "version"),
    (lambda b: b["root"].update(rule="Frobnicate"), "unknown rule"),
    (lambda b: b["root"].update(rule=7), "unknown rule"),
    (lambda b: b["root"].update(principal=-1), "principal"),
    (lambda b: b["signature"].update(a=-1), "signature"),
    (lambda b: b["config"].update(witness_depth=0), "config"),
    (lambda b: b["root"]["conclusion"].update(right=["undeclared(a)"]), "conclusion"),
])
def test_structural_validation(docs, edit, match):
    body = _body(docs["graph.mu", "adj_ac"])
    edit(body)
    with pytest.raises(CertificateError, match=match):
        deserialize_certificate(_resign(body))


def test_non_canonical_bytes_rejected(docs):
    data = serialize_certificate(docs["graph.mu", "adj_ac"])
    pretty = HEADER + json.dumps(json.loads(data[len(HEADER):]), indent=1).encode() + b"\n"
    with pytest.raises(CertificateError):
        deserialize_certificate(pretty)


def _mutation_rejected(data: bytes, pos: int, value: int) -> bool:
    mutated = data[:pos] + bytes([value]) + data[pos + 1:]
    try:
        d = deserialize_certificate(mutated)
    except CertificateError:
        return True
    return not check_certificate(d.root, d.config, d.signature)


def test_single_byte_mutations_sample(docs):
    rng = np.random.default_rng(1)
    data = serialize_certificate(docs["graph.mu", "path_ca"])
    for _ in range(500):
        pos = int(rng.integers(len(data)))
        value = int(rng.integers(256))
        if value == data[pos]:
            continue
        assert _mutation_rejected(data, pos, value), (pos, value)
