from itertools import combinations, product

import pytest

from fslpenum import (
    NSTA,
    build_btau,
    compress_forest,
    dbuta_accepts,
    dbuta_run,
    evaluate,
    fold_expr,
    hc,
    leaf,
    leaf_preorders,
    leafctx,
    multivar_reduce,
    nsta_accepts,
    nsta_to_dbuta,
    parse_term,
    type_of,
    unfold,
    vc,
)
from fslpenum import automata as am
from fslpenum.automata import FAILURE
from fslpenum.fixtures import (
    accept_all_nsta,
    exactly_one_nsta,
    select_labels_nsta,
)

from conftest import random_any_expr, random_expr, random_forest, random_nsta


def brute_run_accept(a: NSTA, f, sel) -> bool:
    """Exhaustive assignment of all three run mappings."""
    n = len(f)
    if n == 0:
        return a.q0 == a.qf
    lab = lambda v: (f.labels[v], 1 if v in sel else 0)
    for rho in product(range(a.m), repeat=3 * n):
        r0, r1, rf = rho[:n], rho[n : 2 * n], rho[2 * n :]
        ok = True
        for v in range(n):
            if (r0[v], r1[v], rf[v]) not in a.delta:
                ok = False
                break
            kids = f.children[v]
            if not kids:
                if r1[v] not in a.iota_set(*lab(v)):
                    ok = False
                    break
            else:
                if r0[kids[0]] not in a.iota_set(*lab(v)):
                    ok = False
                    break
                if r1[v] != rf[kids[-1]]:
                    ok = False
                    break
                if any(r0[w] != rf[u] for u, w in zip(kids, kids[1:])):
                    ok = False
                    break
        if not ok:
            continue
        if r0[f.roots[0]] != a.q0 or rf[f.roots[-1]] != a.qf:
            continue
        if all(r0[w] == rf[u] for u, w in zip(f.roots, f.roots[1:])):
            return True
    return False


class TestNstaAccepts:
    def test_bit_blind_automaton_ignores_selection(self, rng):
        a = accept_all_nsta("ab")
        for _ in range(30):
            f = random_forest(rng, 8)
            sel = [v for v in range(len(f)) if rng.random() < 0.5]
            assert nsta_accepts(a, f, sel) == nsta_accepts(a, f, [])

    def test_select_b_on_worked_forest(self):
        f = parse_term("a(ba(a))bcb(c(ab))")
        a = select_labels_nsta({"b"}, {"a", "b", "c"})
        want = {1, 4, 6, 9}
        for size in range(4):
            for sel in combinations(range(10), size):
                assert nsta_accepts(a, f, sel) == (set(sel) == want)
        assert nsta_accepts(a, f, want)

    def test_against_exhaustive_run_oracle(self, rng):
        checked = 0
        while checked < 150:
            m = rng.randint(1, 2)
            a = random_nsta(rng, m)
            f = random_forest(rng, 4)
            if a.m ** (3 * len(f)) > 10**5:
                continue
            for size in range(len(f) + 1):
                for sel in combinations(range(len(f)), size):
                    assert nsta_accepts(a, f, sel) == brute_run_accept(a, f, set(sel))
                    checked += 1

    def test_empty_forest(self):
        f = parse_term("")
        yes = NSTA(2, frozenset(), {}, 0, 0)
        no = NSTA(2, frozenset(), {}, 0, 1)
        assert nsta_accepts(yes, f, [])
        assert not nsta_accepts(no, f, [])

    def test_bad_states_rejected(self):
        with pytest.raises(ValueError):
            NSTA(1, frozenset([(0, 0, 1)]), {}, 0, 0)
        with pytest.raises(ValueError):
            NSTA(1, frozenset(), {("a", 2): frozenset([0])}, 0, 0)


class TestBtau:
    def test_leaf_values(self):
        b = build_btau()
        assert b.value(b.delta0("a", False, 0)) == 0
        assert b.value(b.delta0("a", True, 1)) == 1

    def test_table_entries(self):
        b = build_btau()
        one = b.delta0("a", True, 0)
        zero = b.delta0("a", False, 0)
        assert b.value(b.delta2(one, zero, "vc")) == 0
        assert b.value(b.delta2(one, one, "hc")) == FAILURE

    def test_rejects_double_hole(self):
        b = build_btau()
        e = hc(leafctx("a"), leafctx("a"))
        assert not dbuta_accepts(b, e, ())

    def test_agrees_with_structural_typing(self, rng):
        b = build_btau()
        for _ in range(250):
            e = random_any_expr(rng, 4)
            t = type_of(e)
            v = b.value(dbuta_run(b, e, ()))
            assert v == (FAILURE if t is None else t)


class TestDeterminization:
    def test_trivial_automaton_reachable_states(self):
        a = NSTA(1, frozenset(), {("a", 0): frozenset([0]), ("a", 1): frozenset([0])}, 0, 0)
        b = nsta_to_dbuta(a)
        seeds = [
            b.delta0("a", False, 0),
            b.delta0("a", False, 1),
            b.delta0("a", True, 0),
            b.delta0("a", True, 1),
        ]
        frontier = set(seeds)
        reachable = set(frontier)
        for _ in range(6):
            new = set()
            for q1 in reachable:
                for q2 in reachable:
                    for op in ("hc", "vc"):
                        q = b.delta2(q1, q2, op)
                        if q not in reachable:
                            new.add(q)
            if not new:
                break
            reachable |= new
        assert len(reachable) <= 3

    def test_type_mismatch_goes_to_failure(self):
        a = exactly_one_nsta("ab")
        b = nsta_to_dbuta(a)
        p = b.delta0("a", False, 0)  # pair-set state
        assert b.value(b.delta2(p, p, "vc")) == FAILURE
        # failure absorbs
        q = b.delta0("a", True, 0)
        fid = b.delta2(p, p, "vc")
        assert b.value(b.delta2(fid, q, "hc")) == FAILURE

    def test_equivalence_random(self, rng):
        for _ in range(200):
            m = rng.randint(1, 3)
            a = random_nsta(rng, m)
            b = nsta_to_dbuta(a)
            e = random_expr(rng, 4)
            po = leaf_preorders(e)
            sel = frozenset(i for i in range(len(po)) if rng.random() < 0.4)
            f = evaluate(fold_expr(e), fold_expr(e).root)
            got = dbuta_accepts(b, e, sel)
            want = nsta_accepts(a, f, {po[i] for i in sel})
            assert got == want

    def test_state_bound_tracked(self, rng):
        for m in (1, 2, 3):
            a = random_nsta(rng, m)
            b = nsta_to_dbuta(a)
            bound = 2 ** (m * m) + 2 ** (m**4) + 1
            assert b.state_bound == bound
            e = random_expr(rng, 5)
            dbuta_run(b, e, ())
            assert b.state_count <= bound

    def test_interning_is_canonical(self):
        a = exactly_one_nsta("ab")
        b = nsta_to_dbuta(a)
        # two different routes to the same subset state intern identically
        e1 = hc(leaf("a"), hc(leaf("a"), leaf("a")))
        e2 = hc(hc(leaf("a"), leaf("a")), leaf("a"))
        assert dbuta_run(b, e1, (0,)) == dbuta_run(b, e2, (0,))


class TestMultivar:
    def test_pair_expansion(self):
        g = compress_forest(parse_term("ab"))
        red = multivar_reduce(g, 2)
        out = evaluate(red.fslp, red.node_map[g.root])
        assert list(out.labels) == ["a~1", "a~2", "b~1", "b~2"]
        assert out.parents == (None, None, None, None)

    def test_context_expansion(self):
        g = fold_expr(vc(leafctx("a"), leaf("b")))
        red = multivar_reduce(g, 3)
        out = evaluate(red.fslp, red.node_map[g.root])
        # a~1 a~2 a~3(b~1 b~2 b~3): siblings added left of each original vertex
        assert list(out.labels) == ["a~1", "a~2", "a~3", "b~1", "b~2", "b~3"]
        assert out.children[2] == (3, 4, 5)

    def test_decoder(self):
        g = compress_forest(parse_term("ab"))
        red = multivar_reduce(g, 2)
        assert red.decode([]) == (frozenset(), frozenset())
        # transformed preorder m selects variable m mod k at vertex m div k
        assert red.decode([0, 3]) == (frozenset({0}), frozenset({1}))

    def test_size_bound(self, rng):
        for k in (2, 3, 5):
            f = random_forest(rng, 20, labels="abc")
            g = compress_forest(f)
            red = multivar_reduce(g, k)
            sigma = len(g.alphabet())
            assert len(red.fslp) - len(g) <= 3 * sigma * k

    def test_commutes_with_decompression(self, rng):
        for _ in range(25):
            k = rng.randint(2, 4)
            f = random_forest(rng, 10)
            g = compress_forest(f)
            red = multivar_reduce(g, k)
            got = evaluate(red.fslp, red.node_map[g.root])
            want = _transform_forest(f, k)
            assert got == want

    def test_k_must_be_at_least_two(self):
        g = compress_forest(parse_term("a"))
        with pytest.raises(ValueError):
            multivar_reduce(g, 1)


def _transform_forest(f, k):
    """Direct forest-level transformation: k-1 extra left siblings per vertex."""
    from fslpenum import parse_term as pt

    def emit(v):
        row = "".join(f"'{f.labels[v]}~{i}'" for i in range(1, k))
        kids = "".join(emit(c) for c in f.children[v])
        return row + f"'{f.labels[v]}~{k}'" + (f"({kids})" if kids else "")

    return pt("".join(emit(r) for r in f.roots))


class TestTextFormat:
    def test_round_trip(self):
        a = exactly_one_nsta("ab")
        text = am.dumps(a)
        assert am.dumps(am.loads(text)) == text

    def test_parse_example(self):
        text = "nsta v1\nstates 2\niota a 0 0\niota a 1 1\ntrans 0 1 1\ninit 0\nfinal 1\n"
        a = am.loads(text)
        assert a.m == 2 and a.q0 == 0 and a.qf == 1
        assert a.iota_set("a", 1) == frozenset([1])
        assert (0, 1, 1) in a.delta

    @pytest.mark.parametrize(
        "text",
        [
            "states 1\ninit 0\nfinal 0\n",
            "nsta v1\ninit 0\nfinal 0\n",
            "nsta v1\nstates 1\nfrob 1\ninit 0\nfinal 0\n",
            "nsta v1\nstates 1\ntrans 0 0 3\ninit 0\nfinal 0\n",
        ],
    )
    def test_errors(self, text):
        with pytest.raises(ValueError):
            am.loads(text)
