"""Forest straight-line programs: a binary DAG whose unfoldings are valid
forest-algebra expressions.

Node kinds: ``leaf`` (label a), ``leafctx`` (label a over the hole, a_*),
``hc`` (horizontal concatenation) and ``vc`` (vertical concatenation).
Nodes may reference only earlier-declared nodes, so the structure is
acyclic by construction and node arrays are append-only: extending an
f-SLP never invalidates existing node ids.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from typing import Iterable, Optional

from .effects import Effect
from .forest import (
    HC,
    VC,
    Expr,
    ExprLeaf,
    ExprNode,
    Forest,
    eval_expr,
    leaf,
    leafctx,
)

LEAF = "leaf"
LEAFCTX = "leafctx"

DEFAULT_BUDGET = int(os.environ.get("FSLPENUM_BUDGET", 10**6))


class InvalidFSLP(ValueError):
    """Structural or typing violation, reporting the offending node."""

    def __init__(self, node: int, rule: str):
        super().__init__(f"node {node}: {rule}")
        self.node = node
        self.rule = rule


class BudgetExceeded(RuntimeError):
    pass


class FSLP:
    """Append-only node store; node id = declaration index."""

    __slots__ = ("kinds", "labels", "lefts", "rights", "root")

    def __init__(self, root: Optional[int] = None):
        self.kinds: list[str] = []
        self.labels: list[Optional[str]] = []
        self.lefts: list[Optional[int]] = []
        self.rights: list[Optional[int]] = []
        self.root = root

    def __len__(self) -> int:
        return len(self.kinds)

    def _push(self, kind: str, label: Optional[str], left: Optional[int], right: Optional[int]) -> int:
        i = len(self.kinds)
        if kind in (HC, VC):
            for ref in (left, right):
                if ref is None or not (0 <= ref < i):
                    raise InvalidFSLP(i, "children must reference earlier nodes")
        self.kinds.append(kind)
        self.labels.append(label)
        self.lefts.append(left)
        self.rights.append(right)
        return i

    def add_leaf(self, label: str) -> int:
        return self._push(LEAF, label, None, None)

    def add_leafctx(self, label: str) -> int:
        return self._push(LEAFCTX, label, None, None)

    def add_hc(self, left: int, right: int) -> int:
        return self._push(HC, None, left, right)

    def add_vc(self, left: int, right: int) -> int:
        return self._push(VC, None, left, right)

    def add_node(self, definition: tuple) -> int:
        kind = definition[0]
        if kind in (LEAF, LEAFCTX):
            return self._push(kind, definition[1], None, None)
        if kind in (HC, VC):
            return self._push(kind, None, definition[1], definition[2])
        raise InvalidFSLP(len(self), f"unknown node kind {kind!r}")

    def node_def(self, i: int) -> tuple:
        kind = self.kinds[i]
        if kind in (LEAF, LEAFCTX):
            return (kind, self.labels[i])
        return (kind, self.lefts[i], self.rights[i])

    def is_leaf_node(self, i: int) -> bool:
        return self.kinds[i] in (LEAF, LEAFCTX)

    def alphabet(self) -> set[str]:
        return {l for l in self.labels if l is not None}


@dataclass
class VertexStats:
    """Per-node type, leaf size, left size, vertex count and height."""

    tau: list[int] = field(default_factory=list)
    s: list[int] = field(default_factory=list)
    ell: list[Optional[int]] = field(default_factory=list)
    nverts: list[int] = field(default_factory=list)
    height: list[int] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.tau)

    def append_node(self, g: FSLP, i: int) -> None:
        kind = g.kinds[i]
        if kind == LEAF:
            tau, s, ell, h = 0, 1, None, 0
        elif kind == LEAFCTX:
            tau, s, ell, h = 1, 1, 1, 0
        else:
            l, r = g.lefts[i], g.rights[i]
            tl, tr = self.tau[l], self.tau[r]
            if kind == HC:
                if tl + tr > 1:
                    raise InvalidFSLP(i, "hc requires at most one context operand")
                tau = tl + tr
                if tau == 0:
                    ell = None
                elif tl == 0:
                    ell = self.s[l] + self.ell[r]
                else:
                    ell = self.ell[l]
            else:  # VC
                if tl != 1:
                    raise InvalidFSLP(i, "vc requires a context left operand")
                tau = tr
                ell = None if tau == 0 else self.ell[l] + self.ell[r]
            s = self.s[l] + self.s[r]
            h = 1 + max(self.height[l], self.height[r])
        self.tau.append(tau)
        self.s.append(s)
        self.ell.append(ell)
        self.nverts.append(s if tau == 0 else s + 1)
        self.height.append(h)

    def extend_for(self, g: FSLP) -> None:
        for i in range(len(self), len(g)):
            self.append_node(g, i)


def compute_stats(g: FSLP) -> VertexStats:
    stats = VertexStats()
    stats.extend_for(g)
    return stats


# ---------------------------------------------------------------------------
# preorder effects on edges, path navigation
# ---------------------------------------------------------------------------

def edge_effect(g: FSLP, stats: VertexStats, parent: int, side: str) -> Effect:
    """Effect of the edge from ``parent`` to its ``side`` ('l'/'r') child."""
    kind = g.kinds[parent]
    if kind not in (HC, VC):
        raise ValueError(f"node {parent} has no outgoing edges")
    if side not in ("l", "r"):
        raise ValueError("side must be 'l' or 'r'")
    l, r = g.lefts[parent], g.rights[parent]
    tl, tr = stats.tau[l], stats.tau[r]
    if kind == HC:
        if tl == 0 and tr == 0:
            return Effect.m00(0) if side == "l" else Effect.m00(stats.s[l])
        if tl == 0:  # parent type 1, right child carries the hole
            return Effect.m10a(0) if side == "l" else Effect.m11a(stats.s[l], 0)
        # tl == 1, tr == 0
        return Effect.m11a(0, 0) if side == "l" else Effect.m10b(stats.s[l])
    # VC
    if tr == 0:  # parent type 0
        return Effect.m01(0, stats.s[r]) if side == "l" else Effect.m00(stats.ell[l])
    return Effect.m11a(0, stats.s[r]) if side == "l" else Effect.m11a(stats.ell[l], 0)


def path_preorder(g: FSLP, stats: VertexStats, start: int, path: Iterable[str]) -> int:
    """Preorder number of the leaf reached from ``start`` along ``path``."""
    if stats.tau[start] != 0:
        raise ValueError("start node must have type 0")
    eff = Effect.identity(0)
    cur = start
    for step, side in enumerate(path):
        if g.is_leaf_node(cur):
            raise ValueError(f"path leaves the DAG at step {step}")
        eff = eff.compose(edge_effect(g, stats, cur, side))
        cur = g.lefts[cur] if side == "l" else g.rights[cur]
    if not g.is_leaf_node(cur):
        raise ValueError("path ends at an internal node")
    return eff.preorder


def preorder_to_path(g: FSLP, stats: VertexStats, start: int, k: int) -> str:
    """Ten-case descent from ``start`` to the leaf with preorder number ``k``."""
    if stats.tau[start] != 0:
        raise ValueError("start node must have type 0")
    if not (0 <= k < stats.nverts[start]):
        raise ValueError(f"preorder {k} out of range [0, {stats.nverts[start]})")
    path: list[str] = []
    node, m = start, k
    p: Optional[int] = None  # size of the forest plugged below, when tau=1
    while not g.is_leaf_node(node):
        l, r = g.lefts[node], g.rights[node]
        kind = g.kinds[node]
        s1 = stats.s[l]
        if stats.tau[node] == 0:
            if kind == HC:
                if m < s1:
                    node, m = l, m
                    path.append("l")
                else:
                    node, m = r, m - s1
                    path.append("r")
            else:  # VC, tau(l)=1, tau(r)=0
                e1 = stats.ell[l]
                if m < e1 or e1 + stats.s[r] <= m:
                    node, m, p = l, m, stats.s[r]
                    path.append("l")
                else:
                    node, m, p = r, m - e1, None
                    path.append("r")
        else:
            if kind == HC:
                if stats.tau[l] == 0:
                    if m < s1:
                        node, m, p = l, m, None
                        path.append("l")
                    else:
                        node, m = r, m - s1
                        path.append("r")
                else:  # tau(l)=1, tau(r)=0
                    if m < s1 + p:
                        node, m = l, m
                        path.append("l")
                    else:
                        node, m, p = r, m - s1 - p, None
                        path.append("r")
            else:  # VC, tau(l)=tau(r)=1
                e1 = stats.ell[l]
                if m < e1 or e1 + stats.s[r] + p <= m:
                    node, m, p = l, m, stats.s[r] + p
                    path.append("l")
                else:
                    node, m = r, m - e1
                    path.append("r")
    return "".join(path)


# ---------------------------------------------------------------------------
# unfold / evaluate / fold
# ---------------------------------------------------------------------------

def unfold(g: FSLP, node: int, budget: int = DEFAULT_BUDGET, stats: Optional[VertexStats] = None) -> Expr:
    """Explicit expression tree for ``node`` (exponential in general)."""
    if stats is None:
        stats = compute_stats(g)
    size = 2 * stats.s[node] - 1
    if size > budget:
        raise BudgetExceeded(f"unfolded expression has {size} nodes > budget {budget}")
    out: list[Expr] = []
    stack: list[tuple[int, bool]] = [(node, False)]
    while stack:
        i, expanded = stack.pop()
        kind = g.kinds[i]
        if kind == LEAF:
            out.append(leaf(g.labels[i]))
        elif kind == LEAFCTX:
            out.append(leafctx(g.labels[i]))
        elif expanded:
            right = out.pop()
            left = out.pop()
            out.append(ExprNode(kind, left, right))
        else:
            stack.append((i, True))
            stack.append((g.rights[i], False))
            stack.append((g.lefts[i], False))
    return out[0]


def evaluate(g: FSLP, node: int, budget: int = DEFAULT_BUDGET, stats: Optional[VertexStats] = None) -> Forest:
    """Decompress the forest / forest context produced by ``node``."""
    if stats is None:
        stats = compute_stats(g)
    if stats.nverts[node] > budget:
        raise BudgetExceeded(
            f"decompressed size {stats.nverts[node]} > budget {budget}"
        )
    return eval_expr(unfold(g, node, budget=2 * stats.s[node], stats=stats))


def fold_expr(e: Expr) -> FSLP:
    """Minimal DAG of the expression: one node per distinct subtree."""
    g = FSLP()
    memo: dict[tuple, int] = {}
    out: list[int] = []
    stack: list[tuple[Expr, bool]] = [(e, False)]
    while stack:
        node, expanded = stack.pop()
        if isinstance(node, ExprLeaf):
            key = (LEAFCTX if node.ctx else LEAF, node.label)
            nid = memo.get(key)
            if nid is None:
                nid = memo[key] = g.add_node(key)
            out.append(nid)
        elif expanded:
            right = out.pop()
            left = out.pop()
            key = (node.op, left, right)
            nid = memo.get(key)
            if nid is None:
                nid = memo[key] = g.add_node(key)
            out.append(nid)
        else:
            stack.append((node, True))
            stack.append((node.right, False))
            stack.append((node.left, False))
    g.root = out[0]
    return g


# ---------------------------------------------------------------------------
# compression
# ---------------------------------------------------------------------------

class _Builder:
    """Hash-consing FSLP builder: structurally equal definitions share a node."""

    def __init__(self):
        self.g = FSLP()
        self.memo: dict[tuple, int] = {}

    def mk(self, *definition) -> int:
        nid = self.memo.get(definition)
        if nid is None:
            nid = self.memo[definition] = self.g.add_node(definition)
        return nid


def _balanced(b: _Builder, op: str, items: list[int], weights: list[int]) -> int:
    """Combine ``items`` with ``op`` splitting at the weighted midpoint."""
    if len(items) == 1:
        return items[0]
    total = sum(weights)
    acc = 0
    cut = len(items) - 1
    for j in range(1, len(items)):
        acc += weights[j - 1]
        if 2 * acc >= total:
            cut = j
            break
    left = _balanced(b, op, items[:cut], weights[:cut])
    right = _balanced(b, op, items[cut:], weights[cut:])
    return b.mk(op, left, right)


def compress_forest(f: Forest) -> FSLP:
    """Build a valid expression for ``f`` of height O(log |f|) and fold it.

    Sibling sequences are combined at the weighted midpoint; trees are
    decomposed along the heaviest root-to-leaf path, whose context pieces
    are recombined with vertical concatenation (also weight-balanced).
    Folding happens on the fly through hash-consing, so repeated shapes
    (rows a^n, deep unary chains) collapse to O(log n) nodes.
    """
    if len(f) == 0:
        raise ValueError("cannot compress the empty forest")
    size = [1] * len(f)
    for v in range(len(f) - 1, -1, -1):
        for c in f.children[v]:
            size[v] += size[c]
    b = _Builder()

    def forest_part(vs: list[int]) -> int:
        if len(vs) == 1:
            return tree_part(vs[0])
        items = [tree_part(v) for v in vs]
        return _balanced(b, HC, items, [size[v] for v in vs])

    def tree_part(v: int) -> int:
        if not f.children[v]:
            return b.mk(LEAF, f.labels[v])
        # heaviest path from v down to a leaf
        path = [v]
        cur = v
        while f.children[cur]:
            cur = max(f.children[cur], key=lambda c: size[c])
            path.append(cur)
        pieces: list[int] = []
        weights: list[int] = []
        for i in range(len(path) - 2):
            vi, nxt = path[i], path[i + 1]
            kids = f.children[vi]
            at = kids.index(nxt)
            piece = b.mk(LEAFCTX, f.labels[nxt])
            w = size[nxt]
            if at > 0:
                piece = b.mk(HC, forest_part(list(kids[:at])), piece)
                w += sum(size[c] for c in kids[:at])
            if at + 1 < len(kids):
                piece = b.mk(HC, piece, forest_part(list(kids[at + 1 :])))
                w += sum(size[c] for c in kids[at + 1 :])
            # the piece's weight no longer counts the subtree below nxt
            pieces.append(piece)
            weights.append(w - size[nxt] + 1)
        last = path[-2]  # parent of the final leaf on the path
        pieces.append(forest_part(list(f.children[last])))
        weights.append(sum(size[c] for c in f.children[last]))
        body = _balanced(b, VC, pieces, weights)
        return b.mk(VC, b.mk(LEAFCTX, f.labels[v]), body)

    b.g.root = forest_part(list(f.roots))
    return b.g


def row_fslp(label: str, n: int) -> FSLP:
    """f-SLP for the forest of ``n`` sibling ``label`` vertices, O(log n) nodes."""
    if n < 1:
        raise ValueError("n must be positive")
    b = _Builder()
    memo: dict[int, int] = {}

    def row(m: int) -> int:
        nid = memo.get(m)
        if nid is None:
            if m == 1:
                nid = b.mk(LEAF, label)
            else:
                nid = b.mk(HC, row(m - m // 2), row(m // 2))
            memo[m] = nid
        return nid

    b.g.root = row(n)
    return b.g


def chain_fslp(label: str, depth: int) -> FSLP:
    """f-SLP for the unary chain of ``depth`` vertices, O(log depth) nodes."""
    if depth < 1:
        raise ValueError("depth must be positive")
    b = _Builder()
    memo: dict[int, int] = {}

    def ctx(m: int) -> int:
        nid = memo.get(m)
        if nid is None:
            if m == 1:
                nid = b.mk(LEAFCTX, label)
            else:
                nid = b.mk(VC, ctx(m - m // 2), ctx(m // 2))
            memo[m] = nid
        return nid

    if depth == 1:
        b.g.root = b.mk(LEAF, label)
    else:
        b.g.root = b.mk(VC, ctx(depth - 1), b.mk(LEAF, label))
    return b.g


# ---------------------------------------------------------------------------
# text format
# ---------------------------------------------------------------------------

def dumps(g: FSLP) -> str:
    lines = ["fslp v1"]
    for i in range(len(g)):
        kind = g.kinds[i]
        if kind in (LEAF, LEAFCTX):
            lines.append(f"node {i} {kind} {g.labels[i]}")
        else:
            lines.append(f"node {i} {kind} {g.lefts[i]} {g.rights[i]}")
    if g.root is not None:
        lines.append(f"root {g.root}")
    return "\n".join(lines) + "\n"


def loads(text: str) -> FSLP:
    g = FSLP()
    lines = text.splitlines()
    if not lines or lines[0].split("#", 1)[0].strip() != "fslp v1":
        raise ValueError("missing 'fslp v1' header")
    for lineno, raw in enumerate(lines[1:], start=2):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if parts[0] == "root":
            if len(parts) != 2:
                raise ValueError(f"line {lineno}: bad root line")
            g.root = int(parts[1])
            if not (0 <= g.root < len(g)):
                raise ValueError(f"line {lineno}: root references unknown node")
            continue
        if parts[0] != "node" or len(parts) < 4:
            raise ValueError(f"line {lineno}: expected 'node <id> <kind> ...'")
        nid, kind = int(parts[1]), parts[2]
        if nid != len(g):
            raise ValueError(f"line {lineno}: node ids must be dense and in order")
        if kind in (LEAF, LEAFCTX):
            if len(parts) != 4:
                raise ValueError(f"line {lineno}: leaf takes one label")
            g.add_node((kind, parts[3]))
        elif kind in (HC, VC):
            if len(parts) != 5:
                raise ValueError(f"line {lineno}: {kind} takes two child ids")
            g.add_node((kind, int(parts[3]), int(parts[4])))
        else:
            raise ValueError(f"line {lineno}: unknown kind {kind!r}")
    return g


def gc(g: FSLP, keep: Iterable[int]) -> tuple[FSLP, dict[int, int]]:
    """Drop nodes unreachable from ``keep``; returns (new FSLP, id map)."""
    live: set[int] = set()
    stack = list(keep)
    while stack:
        i = stack.pop()
        if i in live:
            continue
        live.add(i)
        if not g.is_leaf_node(i):
            stack.append(g.lefts[i])
            stack.append(g.rights[i])
    out = FSLP()
    remap: dict[int, int] = {}
    for i in sorted(live):
        if g.is_leaf_node(i):
            remap[i] = out.add_node((g.kinds[i], g.labels[i]))
        else:
            remap[i] = out.add_node((g.kinds[i], remap[g.lefts[i]], remap[g.rights[i]]))
    if g.root is not None and g.root in remap:
        out.root = remap[g.root]
    return out, remap
