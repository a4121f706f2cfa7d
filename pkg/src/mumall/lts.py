"""Finite labelled transition systems: random generation, encoding as problem files,
and bisimilarity by partition refinement."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations_with_replacement

import numpy as np


@dataclass(frozen=True)
class LTS:
    states: tuple[str, ...]
    labels: tuple[str, ...]
    steps: frozenset  # of (source, label, target)

    def successors(self, p: str, a: str) -> set[str]:
        return {q for (src, lab, q) in self.steps if src == p and lab == a}


def random_lts(rng: np.random.Generator, n_states: int = 4, labels: tuple = ("a", "b"),
               density: float = 0.3) -> LTS:
    states = tuple(f"s{i}" for i in range(n_states))
    mask = rng.random((n_states, len(labels), n_states)) < density
    steps = frozenset(
        (states[i], labels[k], states[j]) for i, k, j in zip(*np.nonzero(mask))
    )
    return LTS(states, tuple(labels), steps)


def bisimilarity(lts: LTS) -> set[tuple[str, str]]:
    """All bisimilar pairs, by naive partition refinement on transition signatures."""
    block = {p: 0 for p in lts.states}
    while True:
        sig = {
            p: (block[p], tuple(
                frozenset(block[q] for q in lts.successors(p, a)) for a in lts.labels))
            for p in lts.states
        }
        ids: dict = {}
        new = {p: ids.setdefault(sig[p], len(ids)) for p in lts.states}
        if len(ids) == len(set(block.values())):
            break
        block = new
    return {(p, q) for p in lts.states for q in lts.states if block[p] == block[q]}


BISIM = (
    "codefine bisim P Q :=\n"
    "    (all A, all P1, step P A P1 => exists Q1, step Q A Q1 /\\+ bisim P1 Q1)\n"
    " /\\- (all A, all Q1, step Q A Q1 => exists P1, step P A P1 /\\+ bisim P1 Q1).\n"
)


def problem_text(lts: LTS, pairs: list[tuple[str, str]], related: list[bool]) -> str:
    """Problem file asserting, for each pair, bisimilarity (if related) or its negation."""
    consts = " ".join(f"{c}/0" for c in lts.states + lts.labels)
    lines = [f"signature {consts}.", ""]
    if lts.steps:
        lines += [f"step {p} {a} {q}." for (p, a, q) in sorted(lts.steps)]
    else:
        lines.append("define step P A Q := false.")
    lines += ["", BISIM]
    for (p, q), rel in zip(pairs, related):
        goal = f"|- bisim {p} {q}" if rel else f"bisim {p} {q} |-"
        lines.append(f"goal {'bisim' if rel else 'distinct'}_{p}_{q}: {goal}.")
    return "\n".join(lines) + "\n"


def state_pairs(lts: LTS) -> list[tuple[str, str]]:
    return list(combinations_with_replacement(lts.states, 2))
