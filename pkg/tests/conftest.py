"""Shared random instance generators for the property tests."""

from __future__ import annotations

import random

import pytest

from fslpenum import (
    NSTA,
    DecoratedDAG,
    ExprLeaf,
    ExprNode,
    Forest,
    parse_term,
)
from fslpenum.fixtures import INT_SUM


def random_forest(rng: random.Random, max_n: int, labels: str = "ab") -> Forest:
    """Random non-empty forest with at most max_n vertices."""

    def grow(budget: list[int]) -> list:
        out = []
        while budget[0] > 0 and (not out or rng.random() < 0.6):
            budget[0] -= 1
            label = rng.choice(labels)
            kids = grow(budget) if rng.random() < 0.5 else []
            out.append((label, kids))
        return out

    budget = [rng.randint(1, max_n)]
    trees = grow(budget)
    if not trees:
        trees = [(rng.choice(labels), [])]

    def emit(trees: list) -> str:
        return "".join(l + (f"({emit(k)})" if k else "") for l, k in trees)

    return parse_term(emit(trees))


def random_expr(rng: random.Random, depth: int, labels: str = "ab", typ: int = 0):
    """Random valid expression of the requested type."""
    if depth == 0 or rng.random() < 0.3:
        if typ == 0:
            return ExprLeaf(rng.choice(labels))
        return ExprLeaf(rng.choice(labels), ctx=True)
    if typ == 0:
        choice = rng.randrange(3)
        if choice == 0:
            return ExprNode("hc", random_expr(rng, depth - 1, labels, 0), random_expr(rng, depth - 1, labels, 0))
        if choice == 1:
            return ExprNode("vc", random_expr(rng, depth - 1, labels, 1), random_expr(rng, depth - 1, labels, 0))
        return ExprLeaf(rng.choice(labels))
    choice = rng.randrange(3)
    if choice == 0:
        return ExprNode("hc", random_expr(rng, depth - 1, labels, 0), random_expr(rng, depth - 1, labels, 1))
    if choice == 1:
        return ExprNode("hc", random_expr(rng, depth - 1, labels, 1), random_expr(rng, depth - 1, labels, 0))
    return ExprNode("vc", random_expr(rng, depth - 1, labels, 1), random_expr(rng, depth - 1, labels, 1))


def random_any_expr(rng: random.Random, depth: int, labels: str = "ab"):
    """Random expression tree, possibly invalid."""
    if depth == 0 or rng.random() < 0.3:
        return ExprLeaf(rng.choice(labels), rng.random() < 0.4)
    op = rng.choice(["hc", "vc"])
    return ExprNode(op, random_any_expr(rng, depth - 1, labels), random_any_expr(rng, depth - 1, labels))


def random_nsta(rng: random.Random, m: int, labels: str = "ab") -> NSTA:
    delta = frozenset(
        (p, q, r)
        for p in range(m)
        for q in range(m)
        for r in range(m)
        if rng.random() < 0.3
    )
    iota = {}
    for a in labels:
        for bit in (0, 1):
            iota[(a, bit)] = frozenset(q for q in range(m) if rng.random() < 0.5)
    return NSTA(m, delta, iota, rng.randrange(m), rng.randrange(m))


def random_weighted_dag(rng: random.Random, max_n: int) -> DecoratedDAG:
    n = rng.randint(1, max_n)
    d = DecoratedDAG(INT_SUM)
    for v in range(n):
        d.add_vertex(None, target=rng.random() < 0.4)
    for v in range(n):
        for w in range(v + 1, n):
            for _ in range(rng.choice([0, 0, 0, 1, 1, 2])):
                d.add_edge(v, rng.randint(0, 5), w)
    return d


def random_labelled_dag(rng: random.Random, max_n: int, symbols=("x", "y")) -> DecoratedDAG:
    n = rng.randint(1, max_n)
    d = DecoratedDAG()
    for v in range(n):
        d.add_vertex(None, target=rng.random() < 0.4)
    for v in range(n):
        for w in range(v + 1, n):
            if rng.random() < 0.4:
                d.add_edge(v, rng.choice([None, None, *symbols]), w)
    return d


@pytest.fixture
def rng() -> random.Random:
    return random.Random(20250810)
