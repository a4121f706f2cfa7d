"""The `.muproof` certificate format.

A file is the line `muproof 1` followed by one line of canonical JSON (sorted
keys, no insignificant whitespace).  Only the root stores its conclusion;
the checker recomputes every other sequent with the kernel.  A SHA-256 digest
of the document body makes any edit detectable before checking.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass

from .kernel import RULES, Certificate, RuleApp, RuleConfig, Sequent
from .logic import abstraction_str, formula_str
from .syntax import check_identifier, parse_abstraction, parse_formula, parse_term, tokenize
from .terms import Signature, SignatureError

HEADER = b"muproof 1\n"
FORMAT_VERSION = "1"
_DOC_KEYS = {"config", "digest", "format_version", "goal_name", "problem_hash", "root", "signature"}
_NODE_KEYS = {"rule", "principal", "data", "premises"}
_DATA_KEYS = {"witness", "fresh", "theta", "invariant", "split", "cut"}


class CertificateError(ValueError):
    def __init__(self, msg: str, path: str | None = None, offset: int | None = None):
        where = []
        if offset is not None:
            where.append(f"byte {offset}")
        if path is not None:
            where.append(f"node {path}")
        super().__init__(f"{', '.join(where)}: {msg}" if where else msg)
        self.path = path
        self.offset = offset


@dataclass(frozen=True)
class CertDocument:
    format_version: str
    problem_hash: str
    goal_name: str
    config: RuleConfig
    root: Certificate
    signature: Signature


def problem_digest(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


# ------------------------------------------------------------ encoding

def _node_json(c: Certificate, root: bool) -> dict:
    r = c.rule
    data: dict = {}
    if r.witness is not None:
        data["witness"] = str(r.witness)
    if r.fresh is not None:
        data["fresh"] = r.fresh
    if r.theta is not None:
        data["theta"] = {x: str(t) for x, t in r.theta}
    if r.invariant is not None:
        data["invariant"] = abstraction_str(r.invariant)
    if r.split is not None:
        data["split"] = {"left": list(r.split[0]), "right": list(r.split[1])}
    if r.cut is not None:
        data["cut"] = formula_str(r.cut)
    out = {
        "rule": r.tag,
        "principal": r.principal,
        "data": data,
        "premises": [_node_json(p, False) for p in c.premises],
    }
    if root:
        s = c.conclusion
        out["conclusion"] = {
            "vars": list(s.vars),
            "left": [formula_str(f) for f in s.left],
            "right": [formula_str(f) for f in s.right],
        }
    return out


def _canonical(obj) -> bytes:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=False).encode()


def serialize_certificate(d: CertDocument) -> bytes:
    body = {
        "format_version": d.format_version,
        "problem_hash": d.problem_hash,
        "goal_name": d.goal_name,
        "config": d.config.to_dict(),
        "signature": dict(sorted(d.signature.entries.items())),
        "root": _node_json(d.root, True),
    }
    body["digest"] = hashlib.sha256(_canonical(body)).hexdigest()
    return HEADER + _canonical(body) + b"\n"


# ------------------------------------------------------------ decoding

class DigestMismatch(CertificateError):
    pass


def deserialize_certificate(data: bytes, verify_digest: bool = True) -> CertDocument:
    """Parse and structurally validate a certificate; raise CertificateError.

    With verify_digest off, a document whose digest is stale still loads, so
    a caller can locate the edit with the kernel checker.
    """
    if not data.startswith(HEADER):
        line = data.split(b"\n", 1)[0][:40]
        raise CertificateError(f"expected header 'muproof 1', found {line!r}", offset=0)
    text_bytes = data[len(HEADER):]
    try:
        text = text_bytes.decode("utf-8")
    except UnicodeDecodeError as e:
        raise CertificateError("invalid UTF-8", offset=len(HEADER) + e.start) from None
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        offset = len(HEADER) + len(text[:e.pos].encode())
        raise CertificateError(f"syntax error: {e.msg}", offset=offset) from None
    except RecursionError:
        raise CertificateError("nesting too deep", offset=len(HEADER)) from None
    if not isinstance(doc, dict):
        raise CertificateError("document must be a record", offset=len(HEADER))
    if set(doc) != _DOC_KEYS:
        raise CertificateError(f"document keys must be exactly {sorted(_DOC_KEYS)}")
    if doc["format_version"] != FORMAT_VERSION:
        raise CertificateError(f"unsupported format version {doc['format_version']!r}")
    body = {k: v for k, v in doc.items() if k != "digest"}
    if verify_digest and doc["digest"] != hashlib.sha256(_canonical(body)).hexdigest():
        raise DigestMismatch("digest does not match the document contents")
    if _canonical(doc) + b"\n" != text_bytes:
        raise CertificateError("document is not in canonical form")
    for k in ("problem_hash", "goal_name"):
        if not isinstance(doc[k], str):
            raise CertificateError(f"{k} must be a string")
    try:
        config = RuleConfig.from_dict(doc["config"]) if isinstance(doc["config"], dict) else None
    except (ValueError, TypeError) as e:
        raise CertificateError(f"bad config: {e}") from None
    if config is None:
        raise CertificateError("config must be a record")
    sig_raw = doc["signature"]
    if not isinstance(sig_raw, dict) or not all(
            isinstance(a, int) and not isinstance(a, bool) for a in sig_raw.values()):
        raise CertificateError("signature must map names to arities")
    try:
        sig = Signature(sig_raw)
    except SignatureError as e:
        raise CertificateError(f"bad signature: {e}") from None
    root = _decode_tree(doc["root"], sig)
    return CertDocument(doc["format_version"], doc["problem_hash"], doc["goal_name"], config, root, sig)


def _decode_conclusion(raw, sig: Signature) -> Sequent:
    if not isinstance(raw, dict) or set(raw) != {"vars", "left", "right"}:
        raise CertificateError("conclusion must have vars, left and right", path="root")
    try:
        xs = tuple(check_identifier(_str(x), sig) for x in raw["vars"])
        if len(set(xs)) != len(xs):
            raise ValueError("duplicate context variable")
        left = tuple(parse_formula(_str(f), sig, xs) for f in _list(raw["left"]))
        right = tuple(parse_formula(_str(f), sig, xs) for f in _list(raw["right"]))
    except (ValueError, TypeError) as e:
        raise CertificateError(f"bad conclusion: {e}", path="root") from None
    return Sequent(xs, left, right)


def _str(x) -> str:
    if not isinstance(x, str):
        raise TypeError(f"expected a string, found {type(x).__name__}")
    return x


def _list(x) -> list:
    if not isinstance(x, list):
        raise TypeError(f"expected a list, found {type(x).__name__}")
    return x


def _int_list(x) -> tuple:
    xs = _list(x)
    if not all(isinstance(i, int) and not isinstance(i, bool) for i in xs):
        raise TypeError("split indices must be integers")
    return tuple(xs)


def _decode_rule(raw: dict, sig: Signature, path: str) -> RuleApp:
    tag = raw["rule"]
    if not isinstance(tag, str) or tag not in RULES:
        raise CertificateError(f"unknown rule tag {tag!r}", path=path)
    principal = raw["principal"]
    if not isinstance(principal, int) or isinstance(principal, bool) or principal < 0:
        raise CertificateError("principal must be a non-negative integer", path=path)
    data = raw["data"]
    if not isinstance(data, dict) or not set(data) <= _DATA_KEYS:
        raise CertificateError(f"data keys must be among {sorted(_DATA_KEYS)}", path=path)
    needed = {
        "ExR": "witness", "AllL": "witness", "AllR": "fresh", "ExL": "fresh",
        "EqLUnify": "theta", "NeqRUnify": "theta", "MuLInd": "invariant",
        "NuRCoind": "invariant", "AndPosR": "split", "ImpL": "split", "OrNegL": "split",
    }
    expected = {needed[tag]} if tag in needed else set()
    if tag == "Cut":
        expected = {"cut", "split"}
    if set(data) != expected:
        missing = expected - set(data)
        what = f"missing {sorted(missing)}" if missing else f"unexpected {sorted(set(data) - expected)}"
        raise CertificateError(f"{tag}: {what} in rule data", path=path)
    kw: dict = {}
    try:
        if "witness" in data:
            kw["witness"] = _open_term(_str(data["witness"]), sig)
        if "fresh" in data:
            kw["fresh"] = check_identifier(_str(data["fresh"]), sig)
        if "theta" in data:
            if not isinstance(data["theta"], dict):
                raise TypeError("theta must be a record")
            kw["theta"] = tuple(sorted(
                (check_identifier(x, sig), _open_term(_str(t), sig)) for x, t in data["theta"].items()))
        if "invariant" in data:
            kw["invariant"] = parse_abstraction(_str(data["invariant"]), sig)
        if "split" in data:
            sp = data["split"]
            if not isinstance(sp, dict) or set(sp) != {"left", "right"}:
                raise TypeError("split must have left and right index lists")
            kw["split"] = (_int_list(sp["left"]), _int_list(sp["right"]))
        if "cut" in data:
            kw["cut"] = _parse_open_formula(_str(data["cut"]), sig)
    except (ValueError, TypeError) as e:
        raise CertificateError(f"{tag}: {e}", path=path) from None
    return RuleApp(tag, principal, **kw)


def _free_names(text: str, sig: Signature) -> set[str]:
    # identifiers that are not constructors; the kernel checks them against the context
    return {t.value for t in tokenize(text) if t.kind == "ident" and t.value not in sig}


def _open_term(text: str, sig: Signature):
    return parse_term(text, sig, _free_names(text, sig))


def _parse_open_formula(text: str, sig: Signature):
    return parse_formula(text, sig, _free_names(text, sig))


def _decode_tree(raw, sig: Signature) -> Certificate:
    """Iterative decode (certificates can be deep)."""
    out: dict[str, Certificate] = {}
    pending = [(raw, "root", False)]
    while pending:
        node, path, ready = pending.pop()
        if not ready:
            if not isinstance(node, dict):
                raise CertificateError("node must be a record", path=path)
            keys = _NODE_KEYS | ({"conclusion"} if path == "root" else set())
            if set(node) != keys:
                raise CertificateError(f"node keys must be exactly {sorted(keys)}", path=path)
            if not isinstance(node["premises"], list):
                raise CertificateError("premises must be a list", path=path)
            pending.append((node, path, True))
            for k, p in enumerate(node["premises"]):
                pending.append((p, f"{path}.{k}", False))
            continue
        rule = _decode_rule(node, sig, path)
        kids = tuple(out.pop(f"{path}.{k}") for k in range(len(node["premises"])))
        concl = _decode_conclusion(node["conclusion"], sig) if path == "root" else None
        out[path] = Certificate(concl, rule, kids)
    return out["root"]


def read_certificate(path) -> CertDocument:
    with open(path, "rb") as fh:
        return deserialize_certificate(fh.read())


def write_certificate(path, d: CertDocument) -> None:
    with open(path, "wb") as fh:
        fh.write(serialize_certificate(d))
