"""Maintenance of the enumeration structure under f-SLP extensions and
vertex relabelling.

An extension appends nodes whose children are existing nodes; old nodes
keep their definitions, so every table (stats, configuration rows, the
normalized product DAG) grows strictly append-only and existing queries
stay valid.  Relabelling locates the root-to-leaf path of the target
vertex by preorder arithmetic and appends copies of the path's nodes with
the leaf copy relabelled, at most height+1 new nodes per update.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Union

from .automata import DBUTA, NSTA, nsta_to_dbuta
from .dagenum import NODE, PRUNED, SHORTCUT
from .fslp import FSLP, preorder_to_path
from .msoenum import AnswerStream, ConfSets, ProductIndex, build_conf_sets


@dataclass
class EnumDataStructure:
    """Everything the enumeration needs, bundled with its f-SLP."""

    fslp: FSLP
    dbuta: DBUTA
    conf: ConfSets
    product: ProductIndex
    ops: int = 0  # instrumented maintenance work (per-state/per-edge units)

    @property
    def stats(self):
        return self.product.stats

    def enumerate(self, node: int, record_steps: bool = False) -> AnswerStream:
        return AnswerStream(self.product, node, record_steps=record_steps)

    def canonical_form(self):
        """Value-level snapshot for structural comparison with a rebuild.

        Interned state ids and normalized vertex numbers are construction
        artifacts; the form maps everything back to state values and
        (node, state) pairs.
        """
        b = self.dbuta
        g = self.fslp
        norm = self.product.norm
        pairs = self.product.pairs

        def sval(q: int):
            return b.value(q)

        conf_part = tuple(
            (
                tuple(map(sval, self.conf.active[i])),
                tuple(map(sval, self.conf.useful[i])),
                tuple(map(sval, self.conf.empty[i])),
            )
            for i in range(len(g))
        )
        succ_part = tuple(
            sorted(
                (
                    (pairs[pid][0], sval(pairs[pid][1])),
                    tuple((sval(q1), sval(q2)) for q1, q2 in tuples),
                )
                for pid, tuples in self.product.succ_a.items()
            )
        )
        eff_part = tuple(sorted(self.product.eff.items()))

        def pairval(pid: int):
            node, q = pairs[pid]
            return (node, sval(q))

        owner = {
            disp[1]: orig for orig, disp in norm.source.items() if disp[0] == NODE
        }

        def normval(nid: int):
            if norm.is_leaf(nid):
                return ("leaf", pairval(norm.leaf_orig[nid]))
            return ("vertex", pairval(owner[nid]))

        prod_part = []
        for pid in range(len(pairs)):
            disp = norm.source[pid]
            if disp[0] == PRUNED:
                prod_part.append((pairval(pid), PRUNED))
            elif disp[0] == SHORTCUT:
                prod_part.append((pairval(pid), SHORTCUT, normval(disp[1]), disp[2]))
            else:
                nid = disp[1]
                edges = tuple((m, normval(child)) for m, child in norm.resolved[pid])
                prod_part.append(
                    (
                        pairval(pid),
                        NODE,
                        edges,
                        pairval(norm.leaf_orig[norm.omega[nid]]),
                        norm.gam[nid],
                    )
                )
        return (conf_part, succ_part, eff_part, tuple(prod_part))


NodeDef = tuple


def build_enum_structure(g: FSLP, query: Union[NSTA, DBUTA]) -> EnumDataStructure:
    """Full preprocessing for an f-SLP and a query automaton."""
    b = query if isinstance(query, DBUTA) else nsta_to_dbuta(query)
    conf = build_conf_sets(g, b)
    product = ProductIndex(g, b, conf)
    return EnumDataStructure(g, b, conf, product)


def extend(eds: EnumDataStructure, defs: Iterable[NodeDef]) -> tuple[EnumDataStructure, list[int]]:
    """Append new nodes and maintain every table; returns (eds, new ids).

    Each definition is ("leaf", label), ("leafctx", label), ("hc", i, j)
    or ("vc", i, j) referencing old or earlier-new nodes.  Old nodes are
    never touched.
    """
    g = eds.fslp
    before = len(g)
    defs = [tuple(d) for d in defs]
    for offset, d in enumerate(defs):  # validate before touching the structure
        if d[0] in ("hc", "vc"):
            if not all(isinstance(c, int) and 0 <= c < before + offset for c in d[1:]):
                raise ValueError(f"definition {offset} references an undeclared node")
        elif d[0] not in ("leaf", "leafctx"):
            raise ValueError(f"definition {offset} has unknown kind {d[0]!r}")
    new_ids: list[int] = []
    for d in defs:
        new_ids.append(g.add_node(d))
    work_before = eds.product.work
    conf = eds.conf
    for i in range(before, len(g)):
        eds.product.stats.append_node(g, i)
        conf.append_node(g, eds.dbuta, i)
        if g.is_leaf_node(i):
            eds.ops += 1
        else:
            l, r = g.lefts[i], g.rights[i]
            eds.ops += (len(conf.active[l]) + len(conf.empty[l])) * (
                len(conf.active[r]) + len(conf.empty[r])
            ) * 2
    eds.product.extend_for(len(g))
    eds.ops += eds.product.work - work_before
    return eds, new_ids


def relabel(
    eds: EnumDataStructure, node: int, preorder: int, label: str
) -> tuple[EnumDataStructure, int, int]:
    """Relabel the vertex with the given preorder number in ⟦node⟧.

    Returns (eds, new root node, number of nodes added).  The new root
    derives the relabelled forest; the original node still derives the old
    one.  Adds at most height(node)+1 nodes and height never grows.
    """
    g = eds.fslp
    stats = eds.product.stats
    path = preorder_to_path(g, stats, node, preorder)
    chain = [node]
    for side in path:
        cur = chain[-1]
        chain.append(g.lefts[cur] if side == "l" else g.rights[cur])
    old_leaf = chain[-1]
    defs: list[NodeDef] = [(g.kinds[old_leaf], label)]
    # bottom-up copies of the path, one child swapped for the fresh copy
    for depth in range(len(path) - 1, -1, -1):
        cur = chain[depth]
        side = path[depth]
        # the previous def (last appended) becomes this copy's child
        swapped = len(eds.fslp) + len(defs) - 1
        if side == "l":
            defs.append((g.kinds[cur], swapped, g.rights[cur]))
        else:
            defs.append((g.kinds[cur], g.lefts[cur], swapped))
    eds, new_ids = extend(eds, defs)
    new_root = new_ids[-1]
    assert len(new_ids) <= stats.height[node] + 1
    assert stats.height[new_root] <= stats.height[node]
    return eds, new_root, len(new_ids)
