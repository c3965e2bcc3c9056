"""Answer-set enumeration for automaton queries over f-SLP-compressed forests.

The preprocessing classifies per DAG node and automaton state which
configurations are reachable with a nonempty selection (active), with
both children selecting (useful), or with the empty selection; builds the
product DAG over active configurations whose edges skip an empty-selection
sibling; and hands that DAG to the path-enumeration index with the useful
configurations as targets.

Enumeration then walks witness trees: unary nodes draw (useful config,
composed effect) pairs from frozen path sessions, binary nodes step
through the ordered successor tuples, and each emitted answer is the set
of preorder numbers read off the root-to-leaf composed effects.  Answers
come out duplicate-free with delay linear in the answer size.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, Optional

from .automata import DBUTA
from .dagenum import EnumIndex, Normalizer, PathSession, open_session
from .effects import PRE_CATEGORY, Effect
from .forest import Expr, _Flat, leaf_preorders
from .fslp import FSLP, VertexStats, compute_stats, edge_effect


@dataclass
class ConfSets:
    """Per (node, state) membership in the active/useful/empty classes."""

    active: list[tuple[int, ...]] = field(default_factory=list)
    useful: list[tuple[int, ...]] = field(default_factory=list)
    empty: list[tuple[int, ...]] = field(default_factory=list)
    useful_sets: list[frozenset] = field(default_factory=list)

    def append_node(self, g: FSLP, b: DBUTA, i: int) -> None:
        if g.is_leaf_node(i):
            label, ctx = g.labels[i], g.kinds[i] == "leafctx"
            qa = b.delta0(label, ctx, 1)
            qe = b.delta0(label, ctx, 0)
            act, use, emp = (qa,), (qa,), (qe,)
        else:
            l, r = g.lefts[i], g.rights[i]
            op = g.kinds[i]
            emp_s = {
                b.delta2(q1, q2, op)
                for q1 in self.empty[l]
                for q2 in self.empty[r]
            }
            use_s = {
                b.delta2(q1, q2, op)
                for q1 in self.active[l]
                for q2 in self.active[r]
            }
            act_s = set(use_s)
            act_s.update(
                b.delta2(q1, q2, op)
                for q1 in self.active[l]
                for q2 in self.empty[r]
            )
            act_s.update(
                b.delta2(q1, q2, op)
                for q1 in self.empty[l]
                for q2 in self.active[r]
            )
            act = tuple(sorted(act_s))
            use = tuple(sorted(use_s))
            emp = tuple(sorted(emp_s))
        self.active.append(act)
        self.useful.append(use)
        self.empty.append(emp)
        self.useful_sets.append(frozenset(use))

    def extend_for(self, g: FSLP, b: DBUTA) -> None:
        for i in range(len(self.active), len(g)):
            self.append_node(g, b, i)


def build_conf_sets(g: FSLP, b: DBUTA) -> ConfSets:
    conf = ConfSets()
    conf.extend_for(g, b)
    return conf


class ProductIndex:
    """Preprocessed bundle: configuration sets, ordered successor tuples,
    per-edge effects, and the normalized product DAG with its path index."""

    def __init__(self, g: FSLP, b: DBUTA, conf: ConfSets, stats: Optional[VertexStats] = None):
        self.g = g
        self.b = b
        self.conf = conf
        self.stats = stats if stats is not None else compute_stats(g)
        self.pair_id: dict[tuple[int, int], int] = {}
        self.pairs: list[tuple[int, int]] = []
        self.succ_a: dict[int, list[tuple[int, int]]] = {}
        self.eff: dict[tuple[int, str], Effect] = {}
        self.raw_edges: dict[int, list[tuple[str, int]]] = {}  # pid -> [(side, child pid)]
        self.norm = Normalizer(PRE_CATEGORY)
        self.enum = EnumIndex(self.norm)
        self.work = 0  # state-pair iterations, for maintenance-cost checks
        self._built = 0
        self.extend_for(len(g))

    def extend_for(self, upto: int) -> None:
        """Feed nodes [built, upto) into the product (children come first).

        One pass over realized state pairs per node: successor tuples from
        active x active, product edges from active x empty (and mirrored).
        """
        g, b, conf = self.g, self.b, self.conf
        for i in range(self._built, upto):
            internal = not g.is_leaf_node(i)
            ledges: dict[int, set[int]] = {}
            redges: dict[int, set[int]] = {}
            if internal:
                l, r = g.lefts[i], g.rights[i]
                op = g.kinds[i]
                self.eff[(i, "l")] = edge_effect(g, self.stats, i, "l")
                self.eff[(i, "r")] = edge_effect(g, self.stats, i, "r")
                for q1 in conf.active[l]:
                    for q2 in conf.active[r]:
                        q = b.delta2(q1, q2, op)
                        pid = self._pid(i, q)
                        self.succ_a.setdefault(pid, []).append((q1, q2))
                for q1 in conf.active[l]:
                    for qe in conf.empty[r]:
                        ledges.setdefault(b.delta2(q1, qe, op), set()).add(q1)
                for qe in conf.empty[l]:
                    for q2 in conf.active[r]:
                        redges.setdefault(b.delta2(qe, q2, op), set()).add(q2)
                self.work += (len(conf.active[l]) + len(conf.empty[l])) * (
                    len(conf.active[r]) + len(conf.empty[r])
                )
            obj = self.stats.tau[i]
            for q in conf.active[i]:
                pid = self._pid(i, q)
                edges: list[tuple] = []
                raw: list[tuple[str, int]] = []
                if internal:
                    el, er = self.eff[(i, "l")], self.eff[(i, "r")]
                    for q1 in sorted(ledges.get(q, ())):
                        edges.append((el, self.pair_id[(l, q1)]))
                        raw.append(("l", self.pair_id[(l, q1)]))
                    for q2 in sorted(redges.get(q, ())):
                        edges.append((er, self.pair_id[(r, q2)]))
                        raw.append(("r", self.pair_id[(r, q2)]))
                self.raw_edges[pid] = raw
                self.work += 1 + len(edges)
                self.norm.add_original(pid, obj, edges, q in conf.useful_sets[i])
        self._built = upto

    def _pid(self, node: int, q: int) -> int:
        pid = self.pair_id.get((node, q))
        if pid is None:
            pid = len(self.pairs)
            self.pair_id[(node, q)] = pid
            self.pairs.append((node, q))
        return pid

    def open_path_session(self, node: int, q: int) -> PathSession:
        return open_session(self.enum, self.pair_id[(node, q)])


def build_product(g: FSLP, b: DBUTA, conf: ConfSets, stats: Optional[VertexStats] = None) -> ProductIndex:
    return ProductIndex(g, b, conf, stats)


def check_empty_solution(conf: ConfSets, node: int, b: DBUTA) -> bool:
    return any(b.is_final(q) for q in conf.empty[node])


# ---------------------------------------------------------------------------
# witness trees over the product DAG
# ---------------------------------------------------------------------------

class _Peek:
    """One-item lookahead over a path session, for maximality tests."""

    __slots__ = ("session", "buf", "init_steps")

    def __init__(self, session: PathSession):
        self.session = session
        self.buf = session.next()
        self.init_steps = session.last_steps

    def has_next(self) -> bool:
        return self.buf is not None

    def next(self):
        item = self.buf
        self.buf = self.session.next()
        return item


_LEAF, _UNARY, _BINARY = 0, 1, 2


class _WNode:
    __slots__ = (
        "kind", "node", "state", "cum", "child", "left", "right",
        "session", "succ", "succ_idx", "maximal", "pos",
    )

    def __init__(self, kind: int, node: int, state: int, cum: Effect):
        self.kind = kind
        self.node = node
        self.state = state
        self.cum = cum
        self.child: Optional[_WNode] = None
        self.left: Optional[_WNode] = None
        self.right: Optional[_WNode] = None
        self.session: Optional[_Peek] = None
        self.succ: Optional[list] = None
        self.succ_idx = 0
        self.maximal = True
        self.pos = 0


class AnswerStream:
    """Enumerates the answer sets for one forest node of the product index.

    ``next`` returns the next answer as a list of preorder numbers (in
    witness order, not sorted) or None after the end.  ``last_steps``
    counts the instrumented work of the most recent call.
    """

    def __init__(self, idx: ProductIndex, node: int, record_steps: bool = False):
        if not (0 <= node < len(idx.g)):
            raise ValueError(f"unknown node {node}")
        if idx.stats.tau[node] != 0:
            raise ValueError("enumeration needs a forest node (type 0)")
        self.idx = idx
        self.node = node
        b = idx.b
        self._finals = [q for q in idx.conf.active[node] if b.is_final(q)]
        self._emit_empty = check_empty_solution(idx.conf, node, b)
        self._state_pos = -1
        self._root: Optional[_WNode] = None
        self._pre: list[_WNode] = []
        self._last_nonmax: Optional[int] = None
        self.last_steps = 0
        self.step_log: Optional[list[int]] = [] if record_steps else None
        self.exhausted = False

    # -- construction -----------------------------------------------------

    def _tick(self, n: int = 1) -> None:
        self.last_steps += n

    def _make_active(self, node: int, state: int, cum: Effect) -> _WNode:
        """Minimal witness subtree for an active configuration."""
        root = self._start_active(node, state, cum)
        self._complete_below(root)
        return root

    def _start_active(self, node: int, state: int, cum: Effect) -> _WNode:
        self._tick()
        if self.idx.g.is_leaf_node(node):
            return _WNode(_LEAF, node, state, cum)
        w = _WNode(_UNARY, node, state, cum)
        w.session = _Peek(self.idx.open_path_session(node, state))
        self._tick(w.session.init_steps)
        return w

    def _start_useful(self, node: int, state: int, cum: Effect) -> _WNode:
        self._tick()
        if self.idx.g.is_leaf_node(node):
            return _WNode(_LEAF, node, state, cum)
        w = _WNode(_BINARY, node, state, cum)
        w.succ = self.idx.succ_a[self.idx.pair_id[(node, state)]]
        w.succ_idx = 0
        w.maximal = len(w.succ) == 1
        return w

    def _draw_unary(self, w: _WNode) -> None:
        """Draw the next (useful config, effect) pair for a unary node."""
        tpid, eff = w.session.next()
        tnode, tq = self.idx.pairs[tpid]
        self._tick(w.session.session.last_steps)
        w.maximal = not w.session.has_next()
        w.child = self._start_useful(tnode, tq, w.cum.compose(eff))

    def _set_binary_children(self, w: _WNode) -> None:
        """(Re)create the children named by the current successor tuple."""
        q1, q2 = w.succ[w.succ_idx]
        g = self.idx.g
        l, r = g.lefts[w.node], g.rights[w.node]
        w.left = self._start_active(l, q1, w.cum.compose(self.idx.eff[(w.node, "l")]))
        w.right = self._start_active(r, q2, w.cum.compose(self.idx.eff[(w.node, "r")]))

    def _complete_below(self, w: _WNode) -> None:
        """Minimal completion of a fresh node whose choice is not yet drawn."""
        work = [w]
        while work:
            x = work.pop()
            if x.kind == _LEAF:
                continue
            if x.kind == _UNARY:
                self._draw_unary(x)
                work.append(x.child)
            else:
                self._set_binary_children(x)
                work.append(x.right)
                work.append(x.left)

    # -- walk: preorder list, answer, last non-maximal ---------------------

    def _walk(self) -> list[int]:
        answer: list[int] = []
        pre: list[_WNode] = []
        last_nonmax = None
        stack = [self._root]
        while stack:
            w = stack.pop()
            w.pos = len(pre)
            pre.append(w)
            self._tick()
            if not w.maximal:
                last_nonmax = w.pos
            if w.kind == _LEAF:
                answer.append(w.cum.preorder)
            elif w.kind == _UNARY:
                stack.append(w.child)
            else:
                stack.append(w.right)
                stack.append(w.left)
        if len(pre) > 4 * len(answer) - 2:
            raise AssertionError(
                f"witness tree has {len(pre)} nodes for {len(answer)} leaves"
            )
        if len(set(answer)) != len(answer):
            raise AssertionError("answer set contains a repeated preorder number")
        self._pre = pre
        self._last_nonmax = last_nonmax
        return answer

    # -- the lexicographic successor ---------------------------------------

    def _advance(self) -> None:
        i = self._last_nonmax
        w = self._pre[i]
        # advance the last non-maximal node, then complete minimally below it
        self._tick()
        if w.kind == _UNARY:
            self._draw_unary(w)
            self._complete_below(w.child)
        else:
            w.succ_idx += 1
            w.maximal = w.succ_idx == len(w.succ) - 1
            self._set_binary_children(w)
            self._complete_below(w.left)
            self._complete_below(w.right)
        # children of kept nodes that fell into the discarded suffix are
        # rebuilt minimally (their labels are fixed by the kept choice)
        for j in range(i):
            x = self._pre[j]
            self._tick()
            if x.kind == _BINARY and x.right is not None and x.right.pos > i:
                q2 = x.succ[x.succ_idx][1]
                r = self.idx.g.rights[x.node]
                x.right = self._start_active(
                    r, q2, x.cum.compose(self.idx.eff[(x.node, "r")])
                )
                self._complete_below(x.right)

    # -- public -------------------------------------------------------------

    def next(self) -> Optional[list[int]]:
        self.last_steps = 0
        out = self._next_inner()
        if self.step_log is not None and out is not None:
            self.step_log.append(self.last_steps)
        return out

    def _next_inner(self) -> Optional[list[int]]:
        if self.exhausted:
            return None
        if self._emit_empty:
            self._emit_empty = False
            self._tick()
            return []
        while True:
            if self._root is None:
                self._state_pos += 1
                if self._state_pos >= len(self._finals):
                    self.exhausted = True
                    return None
                q = self._finals[self._state_pos]
                self._root = self._make_active(self.node, q, Effect.identity(0))
                return self._walk()
            if self._last_nonmax is None:
                self._root = None
                continue
            self._advance()
            return self._walk()

    def __iter__(self) -> Iterator[list[int]]:
        while True:
            item = self.next()
            if item is None:
                return
            yield item


def enumerate_select(idx: ProductIndex, node: int, record_steps: bool = False) -> AnswerStream:
    """Stream of answer sets (preorder-number lists) for queries on ⟦node⟧."""
    return AnswerStream(idx, node, record_steps=record_steps)


# ---------------------------------------------------------------------------
# tree-level reference implementation on an explicit expression
# ---------------------------------------------------------------------------

class _TreeEnum:
    """Witness-tree enumeration directly on an expression tree.

    Self-contained second oracle: configuration sets, the per-position
    product forest, and reachability lists are recomputed here on the
    explicit tree, without the DAG machinery above.
    """

    def __init__(self, e: Expr, b: DBUTA):
        flat = _Flat(e)
        self.flat = flat
        self.b = b
        n = len(flat)
        act: list[tuple[int, ...]] = [()] * n
        use: list[tuple[int, ...]] = [()] * n
        emp: list[tuple[int, ...]] = [()] * n
        for pos in range(n - 1, -1, -1):
            if flat.kind[pos] == "leaf":
                qa = b.delta0(flat.label[pos], flat.ctx[pos], 1)
                qe = b.delta0(flat.label[pos], flat.ctx[pos], 0)
                act[pos], use[pos], emp[pos] = (qa,), (qa,), (qe,)
            else:
                l, r = flat.left[pos], flat.right[pos]
                op = flat.kind[pos]
                e_s = {b.delta2(x, y, op) for x in emp[l] for y in emp[r]}
                u_s = {b.delta2(x, y, op) for x in act[l] for y in act[r]}
                a_s = set(u_s)
                a_s.update(b.delta2(x, y, op) for x in act[l] for y in emp[r])
                a_s.update(b.delta2(x, y, op) for x in emp[l] for y in act[r])
                act[pos] = tuple(sorted(a_s))
                use[pos] = tuple(sorted(u_s))
                emp[pos] = tuple(sorted(e_s))
        self.act, self.use, self.emp = act, use, emp
        self.use_sets = [frozenset(u) for u in use]
        # product forest edges per active configuration
        self.adj: dict[tuple[int, int], list[tuple[int, int]]] = {}
        self.succ_a: dict[tuple[int, int], list[tuple[int, int]]] = {}
        for pos in range(n):
            if flat.kind[pos] == "leaf":
                continue
            l, r = flat.left[pos], flat.right[pos]
            op = flat.kind[pos]
            for q1 in act[l]:
                for q2 in act[r]:
                    self.succ_a.setdefault((pos, b.delta2(q1, q2, op)), []).append((q1, q2))
            for p in act[pos]:
                edges = []
                for q1 in act[l]:
                    if any(b.delta2(q1, qe, op) == p for qe in emp[r]):
                        edges.append((l, q1))
                for q2 in act[r]:
                    if any(b.delta2(qe, q2, op) == p for qe in emp[l]):
                        edges.append((r, q2))
                self.adj[(pos, p)] = edges
        self._succ_u: dict[tuple[int, int], list[tuple[int, int]]] = {}
        self.leaf_no = {pos: i for i, pos in enumerate(flat.leaves)}

    def succ_u(self, conf: tuple[int, int]) -> list[tuple[int, int]]:
        out = self._succ_u.get(conf)
        if out is None:
            out = []
            seen = set()
            stack = [conf]
            while stack:
                c = stack.pop()
                if c in seen:
                    continue
                seen.add(c)
                if c[1] in self.use_sets[c[0]]:
                    out.append(c)
                stack.extend(reversed(self.adj.get(c, ())))
            self._succ_u[conf] = out
        return out

    def answers(self, root_states: list[int]) -> Iterator[frozenset]:
        """All answer leaf-index sets, one witness tree at a time."""
        for q in root_states:
            yield from self._answers_from((0, q))

    def _answers_from(self, conf: tuple[int, int]) -> Iterator[frozenset]:
        # recursive witness construction; oracle sizes are small
        pos, q = conf
        if self.flat.kind[pos] == "leaf":
            yield frozenset((self.leaf_no[pos],))
            return
        for upos, uq in self.succ_u(conf):
            if self.flat.kind[upos] == "leaf":
                yield frozenset((self.leaf_no[upos],))
                continue
            l, r = self.flat.left[upos], self.flat.right[upos]
            for q1, q2 in self.succ_a[(upos, uq)]:
                for s1 in self._answers_from((l, q1)):
                    for s2 in self._answers_from((r, q2)):
                        yield s1 | s2


def enumerate_select_uncompressed(e: Expr, b: DBUTA) -> Iterator[frozenset]:
    """Reference answer stream on the explicit tree; emits preorder-number sets."""
    po = leaf_preorders(e)
    te = _TreeEnum(e, b)
    if any(b.is_final(q) for q in te.emp[0]):
        yield frozenset()
    finals = [q for q in te.act[0] if b.is_final(q)]
    for leaf_set in te.answers(finals):
        yield frozenset(po[i] for i in leaf_set)
