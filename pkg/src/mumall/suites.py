"""Exhaustive metatheory checks on the additive fragment.

Formulas over ∧⁻, t⁻, ∨, f (optionally with closed =/≠ literals) are enumerated
up to a depth, and every multiset of them up to a size is decided once by
`additive_oracle`. The structural properties are then checked against that
table with vectorized lookups. Each check returns its counterexamples.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations_with_replacement
from typing import Callable, Sequence

import numpy as np

from .kernel import RuleConfig, Sequent
from .logic import AndNeg, Eq, FalsePos, Formula, Neq, OrPos, TrueNeg, dual
from .search import Prover, Proved, additive_oracle, prove_mall
from .terms import App, Signature


@dataclass(frozen=True)
class SuiteConfig:
    depth: int = 3
    max_size: int = 3
    # constants for closed =/≠ atoms; empty means purely propositional
    constants: tuple[str, ...] = ()


def additive_atoms(constants: Sequence[str] = ()) -> list[Formula]:
    cs = [App(c) for c in constants]
    return [TrueNeg(), FalsePos()] + [k(x, y) for k in (Eq, Neq) for x in cs for y in cs]


def additive_formulas(depth: int, atoms: Sequence[Formula]) -> list[Formula]:
    """Every formula over ∧⁻ and ∨ with the given atoms, of depth at most `depth`."""
    out = list(dict.fromkeys(atoms))
    for _ in range(depth - 1):
        out = list(dict.fromkeys(
            list(atoms) + [c(a, b) for c in (AndNeg, OrPos) for a in out for b in out]))
    return out


def suite_formulas(config: SuiteConfig) -> list[Formula]:
    return additive_formulas(config.depth, additive_atoms(config.constants))


class MultisetTable:
    """A boolean verdict for every multiset of formula indices up to a size.

    Multisets are rows of sorted indices padded with the sentinel n, packed
    into one integer in base n+1.
    """

    def __init__(self, formulas: Sequence[Formula], max_size: int,
                 decide: Callable[[list[Formula]], bool]):
        self.formulas = list(formulas)
        self.n = len(self.formulas)
        self.size = max_size
        rows = self.all_rows()
        values = np.fromiter(
            (decide([self.formulas[i] for i in row if i < self.n]) for row in rows.tolist()),
            dtype=bool, count=len(rows))
        codes = self.encode(rows)
        order = np.argsort(codes)
        self.codes, self.values = codes[order], values[order]

    def all_rows(self, min_size: int = 0) -> np.ndarray:
        rows = [combo + (self.n,) * (self.size - k)
                for k in range(min_size, self.size + 1)
                for combo in combinations_with_replacement(range(self.n), k)]
        return np.array(rows, dtype=np.int64).reshape(-1, self.size)

    def encode(self, rows: np.ndarray) -> np.ndarray:
        rows = np.sort(rows, axis=1)
        out = np.zeros(len(rows), dtype=np.int64)
        for j in range(self.size):
            out = out * (self.n + 1) + rows[:, j]
        return out

    def lookup(self, rows: np.ndarray) -> np.ndarray:
        """Verdicts for rows of indices (sentinel-padded, any order, at most `size` real)."""
        if rows.shape[1] != self.size or (rows.size and (rows.min() < 0 or rows.max() > self.n)):
            raise KeyError("rows are not padded multisets of formula indices")
        codes = self.encode(rows)
        pos = np.searchsorted(self.codes, codes)
        if not np.array_equal(self.codes[np.minimum(pos, len(self.codes) - 1)], codes):
            raise KeyError("multiset outside the table")
        return self.values[pos]

    def rows_of_size(self, k: int) -> np.ndarray:
        rows = [combo + (self.n,) * (self.size - k)
                for combo in combinations_with_replacement(range(self.n), k)]
        return np.array(rows, dtype=np.int64).reshape(-1, self.size)

    def formulas_of(self, row) -> tuple[Formula, ...]:
        return tuple(self.formulas[i] for i in row if i < self.n)


def oracle_table(config: SuiteConfig = SuiteConfig()) -> MultisetTable:
    return MultisetTable(suite_formulas(config), config.max_size, additive_oracle)


# --------------------------------------------------------------- properties

def strengthening_counterexamples(table: MultisetTable) -> list[tuple]:
    """Provable multisets none of whose members is provable alone."""
    rows = table.all_rows(min_size=1)
    provable = table.lookup(rows)
    single = np.full(table.n + 1, False)
    single[:table.n] = table.lookup(_pad(np.arange(table.n)[:, None], table))
    some_member = single[rows].any(axis=1)
    return [table.formulas_of(r) for r in rows[provable & ~some_member]]


def weakening_contraction_counterexamples(table: MultisetTable) -> list[tuple]:
    """Pairs (Δ₁, Δ₂) with Δ₁ ⊆ Δ₂ as sets, Δ₁ provable and Δ₂ not.

    Every Δ₁ over the distinct members of Δ₂ is generated by choosing
    positions of Δ₂'s row with repetition.
    """
    rows = table.all_rows(min_size=1)
    target = table.lookup(rows)
    bad = []
    for k in range(1, table.size + 1):
        for picks in combinations_with_replacement(range(table.size), k):
            sub = rows[:, list(picks)]
            real = (sub < table.n).all(axis=1)
            sub = _pad(sub[real], table)
            hit = table.lookup(sub) & ~target[real]
            bad += [(table.formulas_of(a), table.formulas_of(b))
                    for a, b in zip(sub[hit], rows[real][hit])]
    return bad


def initial_counterexamples(formulas: Sequence[Formula],
                            signature: Signature | None = None) -> list[tuple]:
    """Formulas B where ⊢ B, dual B fails in the oracle or B ⊢ B fails without init."""
    sig = signature or Signature({"a": 0, "b": 0})
    config = RuleConfig(allow_init=False)
    prover = Prover(sig, config)
    bad = []
    for b in formulas:
        if not additive_oracle([b, dual(b)]):
            bad.append(("oracle", b))
        if not isinstance(prove_mall(Sequent((), (b,), (b,)), config, sig, prover=prover),
                          Proved):
            bad.append(("kernel", b))
    return bad


def cut_counterexamples(table: MultisetTable) -> list[tuple]:
    """Triples (B, Δ₁, Δ₂) with ⊢ B, Δ₁ and ⊢ dual B, Δ₂ provable but ⊢ Δ₁, Δ₂ not.

    Only sizes keeping every sequent within the table are considered. For each
    (|Δ₁|, |Δ₂|) the quantification over B is a boolean matrix product.
    """
    index = {f: i for i, f in enumerate(table.formulas)}
    duals = np.array([index[dual(f)] for f in table.formulas])
    cols = np.arange(table.n)[:, None]
    bad = []
    for k1 in range(table.size):
        for k2 in range(min(table.size - 1, table.size - k1) + 1):
            d1, d2 = table.rows_of_size(k1), table.rows_of_size(k2)
            with_b = _member_matrix(table, cols, d1)
            with_dual = _member_matrix(table, duals[:, None], d2)
            both = (with_b.T.astype(np.int32) @ with_dual.astype(np.int32)) > 0
            i1, i2 = np.nonzero(both)
            if not len(i1):
                continue
            union = np.concatenate([d1[i1][:, :k1], d2[i2][:, :k2]], axis=1)
            ok = table.lookup(_pad(union, table))
            for a, c in zip(i1[~ok], i2[~ok]):
                witnesses = np.nonzero(with_b[:, a] & with_dual[:, c])[0]
                bad.append((table.formulas[witnesses[0]], table.formulas_of(d1[a]),
                            table.formulas_of(d2[c])))
    return bad


def agreement_counterexamples(table: MultisetTable,
                              signature: Signature | None = None) -> list[tuple]:
    """Multisets Δ where prove_mall on ⊢ Δ disagrees with the oracle."""
    sig = signature or Signature({"a": 0, "b": 0})
    config = RuleConfig()
    prover = Prover(sig, config)
    bad = []
    for row, expected in zip(_decode(table), table.values.tolist()):
        delta = table.formulas_of(row)
        got = isinstance(prove_mall(Sequent((), (), delta), config, sig, prover=prover), Proved)
        if got != expected:
            bad.append(delta)
    return bad


# ------------------------------------------------------------------ helpers

def _pad(rows: np.ndarray, table: MultisetTable) -> np.ndarray:
    extra = table.size - rows.shape[1]
    if extra <= 0:
        return rows
    return np.concatenate([rows, np.full((len(rows), extra), table.n, dtype=np.int64)], axis=1)


def _member_matrix(table: MultisetTable, heads: np.ndarray, rest: np.ndarray) -> np.ndarray:
    """M[i, j] = verdict of heads[i] added to the multiset rest[j]."""
    k = int((rest[0] < table.n).sum()) if len(rest) else 0
    n_heads, n_rest = len(heads), len(rest)
    rows = np.concatenate([
        np.repeat(heads, n_rest, axis=0),
        np.tile(rest[:, :k], (n_heads, 1)),
    ], axis=1)
    return table.lookup(_pad(rows, table)).reshape(n_heads, n_rest)


def _decode(table: MultisetTable) -> list[list[int]]:
    rows = np.empty((len(table.codes), table.size), dtype=np.int64)
    codes = table.codes.copy()
    for j in reversed(range(table.size)):
        rows[:, j] = codes % (table.n + 1)
        codes //= table.n + 1
    return rows.tolist()
