"""Brute-force reference implementations, used as correctness anchors.

Everything here enumerates exhaustively and is budget-guarded; none of it
shares configuration/product code with the main engine, so agreement in
tests is evidence rather than tautology.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from itertools import combinations

from .automata import DBUTA, NSTA, dbuta_run, nsta_accepts
from .dagenum import DecoratedDAG
from .forest import Expr, Forest, _Flat


@dataclass(frozen=True)
class OracleBudget:
    max_vertices: int = 16  # subset loops run over 2^max_vertices sets
    max_paths: int = 10**5
    max_states: int = 64

    def __post_init__(self):
        if min(self.max_vertices, self.max_paths, self.max_states) <= 0:
            raise ValueError("budgets must be positive")


DEFAULT_BUDGET = OracleBudget()


def brute_select(a: NSTA, f: Forest, budget: OracleBudget = DEFAULT_BUDGET) -> set[frozenset]:
    """All selected vertex sets, by checking every subset."""
    n = len(f)
    if n > budget.max_vertices:
        raise ValueError(f"{n} vertices exceed the subset budget {budget.max_vertices}")
    if a.m > budget.max_states:
        raise ValueError("state count exceeds the oracle budget")
    out: set[frozenset] = set()
    for size in range(n + 1):
        for sel in combinations(range(n), size):
            if nsta_accepts(a, f, sel):
                out.add(frozenset(sel))
    return out


def brute_paths(d: DecoratedDAG, source: int, budget: OracleBudget = DEFAULT_BUDGET) -> Counter:
    """Multiset of ⟨target, morphism⟩ over all source-to-target paths (DFS)."""
    if d.category is None:
        raise ValueError("decorated DAG needs a category")
    cat = d.category
    out: Counter = Counter()
    stack = [(source, cat.identity(d.obj[source]))]
    seen_paths = 0
    while stack:
        v, m = stack.pop()
        if v in d.targets:
            out[(v, m)] += 1
            seen_paths += 1
            if seen_paths > budget.max_paths:
                raise ValueError("path count exceeds the oracle budget")
        for em, w in reversed(d.edges[v]):
            stack.append((w, cat.compose(m, em)))
    return out


def brute_word_paths(d: DecoratedDAG, source: int, budget: OracleBudget = DEFAULT_BUDGET) -> Counter:
    """Multiset of ⟨target, label word⟩; labels None are skipped (ε)."""
    out: Counter = Counter()
    stack: list[tuple[int, tuple]] = [(source, ())]
    seen_paths = 0
    while stack:
        v, word = stack.pop()
        if v in d.targets:
            out[(v, word)] += 1
            seen_paths += 1
            if seen_paths > budget.max_paths:
                raise ValueError("path count exceeds the oracle budget")
        for lab, w in reversed(d.edges[v]):
            stack.append((w, word if lab is None else word + (lab,)))
    return out


def brute_dbuta_select(b: DBUTA, e: Expr, budget: OracleBudget = DEFAULT_BUDGET) -> set[frozenset]:
    """All accepted leaf-index subsets of the expression."""
    nleaves = len(_Flat(e).leaves)
    if nleaves > budget.max_vertices:
        raise ValueError(f"{nleaves} leaves exceed the subset budget")
    out: set[frozenset] = set()
    for size in range(nleaves + 1):
        for sel in combinations(range(nleaves), size):
            if b.is_final(dbuta_run(b, e, sel)):
                out.add(frozenset(sel))
    return out
