"""Blow-ups, induced actions and the three recolorings."""

import random

import pytest
from hypothesis import given, strategies as st

from oracles import sigma_direct
from treelocal.ball import identity_germ, make_ball, random_germ_pair, sample_U
from treelocal.blowup import (
    blow_up,
    cycle_group,
    induced_action,
    interior_degrees,
    inversion_check,
    lemma1_coloring,
    lemma1_formula,
    lemma2_graph,
    lemma3_graph,
    partial_iso_report,
    partitioned,
    reversal_symmetric_colors,
    verify_lemma1,
    verify_local_actions,
)
from treelocal.coloring import random_tree_coloring, validate_coloring
from treelocal.errors import BadTransporter, HypothesisViolated, NotTransitive
from treelocal.perm import Permutation, PermGroup, orbits, point_stabilizer
from treelocal.sgraph import check_automorphism, validate

P = Permutation.from_cycles
A4 = PermGroup.alternating(4)
S3 = PermGroup.symmetric(3)


def samples(F, c, ball, n, seed, reach=1):
    rng = random.Random(seed)
    near = ball.within(ball.root, reach)
    return [sample_U(F, c, ball, rng.choice(near), rng) for _ in range(n)]


def brute_blow_up_edges(ball, c):
    """Undirected edge multiset of the blow-up straight from the definition."""
    d = c.degree
    g = ball.graph
    out = []
    for v in g.vertices:
        for i in range(d):
            for j in range(i + 1, d):
                out.append(frozenset([(v, i), (v, j)]))
    for e in g.undirected_edges():
        out.append(frozenset([(g.origin[e], c.colors[e]), (g.terminal(e), c.colors[g.reversal[e]])]))
    return sorted(tuple(sorted(x)) for x in out)


class TestPlainBlowUp:
    def test_sizes(self):
        B = blow_up(make_ball(3, 1), make_ball(3, 1).canonical)
        assert len(B.graph.vertices) == 12 and validate(B.graph).ok

    def test_interior_regular(self):
        ball = make_ball(5, 2)
        B = blow_up(ball, ball.canonical)
        assert interior_degrees(B.graph) == [5]

    @pytest.mark.parametrize("d,R", [(3, 2), (4, 2)])
    def test_edges_match_definition(self, d, R):
        ball = make_ball(d, R)
        c = random_tree_coloring(ball.graph, d, ball.root, random.Random(d), symmetric=())
        B = blow_up(ball, c)
        g = B.graph
        got = sorted(
            tuple(sorted([B.label[g.origin[e]], B.label[g.terminal(e)]])) for e in g.undirected_edges()
        )
        assert got == brute_blow_up_edges(ball, c)

    def test_partition_by_singletons(self):
        ball = make_ball(4, 2)
        B = partitioned(ball, ball.canonical, [(0,), (1,), (2,), (3,)])
        assert interior_degrees(B.graph) == [3]


class TestInducedAction:
    def test_identity(self):
        ball = make_ball(3, 2)
        B = blow_up(ball, ball.canonical)
        act = induced_action(identity_germ(ball), B)
        assert all(x == y for x, y in act.vertex_map.items())
        assert all(e == f for e, f in act.edge_map.items())

    def test_random_germs_are_partial_isomorphisms(self):
        ball = make_ball(4, 3)
        B = blow_up(ball, ball.canonical)
        for g in samples(A4, ball.canonical, ball, 20, 1):
            assert partial_iso_report(induced_action(g, B)).ok

    def test_complete_is_automorphism(self):
        ball = make_ball(3, 2)
        B = blow_up(ball, ball.canonical)
        for seed in range(10):
            g = sample_U(S3, ball.canonical, ball, seed=seed)
            check_automorphism(B.graph, induced_action(g, B, complete=True))

    def test_functorial(self):
        ball = make_ball(3, 4)
        B = blow_up(ball, ball.canonical)
        rng = random.Random(11)
        compared = 0
        for _ in range(100):
            g, h = random_germ_pair(ball, ball.canonical, rng)
            lhs = induced_action(g * h, B)
            rhs = induced_action(g, B).compose(induced_action(h, B))
            assert lhs.vertex_map.items() <= rhs.vertex_map.items()
            assert lhs.edge_map.items() <= rhs.edge_map.items()
            compared += len(lhs.vertex_map)
        assert compared > 0


class TestInversion:
    def test_examples(self):
        assert inversion_check(PermGroup(4, [P(4, (1, 2, 3))]))
        assert not inversion_check(PermGroup(3, [P(3, (1, 2))]))

    def test_no_inversion_on_samples(self):
        F = point_stabilizer(A4, 0)
        assert inversion_check(F)
        ball = make_ball(4, 2)
        B = blow_up(ball, ball.canonical)
        for g in samples(F, ball.canonical, ball, 100, 2, reach=0):
            assert not induced_action(g, B).inverts_some_edge()


class TestLemma1:
    @pytest.mark.parametrize("F", [A4, S3], ids=["A4", "Sym3"])
    def test_formula_matches_direct(self, F):
        ball = make_ball(F.degree, 3)
        B = blow_up(ball, ball.canonical)
        a, gs = lemma1_coloring(B, F)
        assert validate_coloring(a).ok
        assert a.regular == set(B.graph.interior())
        assert not reversal_symmetric_colors(a, (0,))
        rep = verify_lemma1(B, a, gs, F, samples(F, ball.canonical, ball, 15, 3))
        assert rep.ok and rep.checked > 0

    def test_formula_independent_of_caches(self):
        ball = make_ball(3, 3)
        B = blow_up(ball, ball.canonical)
        a, gs = lemma1_coloring(B, S3)
        for g in samples(S3, ball.canonical, ball, 5, 9):
            act = induced_action(g, B)
            for v in g.inner:
                sigma = sigma_direct(g, v, ball.canonical)
                for i in range(3):
                    x = B.vid[(v, i)]
                    assert sigma_direct(act, x, a) == lemma1_formula(gs, sigma, i)

    def test_identity_germ(self):
        ball = make_ball(4, 2)
        B = blow_up(ball, ball.canonical)
        a, gs = lemma1_coloring(B, A4)
        rep = verify_local_actions(B, a, [identity_germ(ball)], PermGroup.trivial(4))
        assert rep.ok and rep.checked

    def test_hypotheses(self):
        ball = make_ball(3, 2)
        B = blow_up(ball, ball.canonical)
        with pytest.raises(NotTransitive):
            lemma1_coloring(B, PermGroup(3, [P(3, (1, 2))]))
        with pytest.raises(BadTransporter):
            lemma1_coloring(B, S3, [Permutation.identity(3)] * 3)


def c3_on_ten():
    return PermGroup(10, [P(10, (1, 2, 3), (4, 5, 6), (7, 8, 9))])


class TestLemma2:
    def test_regular_and_local_actions(self):
        F = c3_on_ten()
        ball = make_ball(10, 2)
        c = random_tree_coloring(ball.graph, 10, ball.root, random.Random(4), classes=orbits(F))
        Y, a, info = lemma2_graph(ball, c, F)
        assert interior_degrees(Y.graph) == [5]
        assert validate(Y.graph).ok and validate_coloring(a).ok
        assert not reversal_symmetric_colors(a, (0, 1))
        target = cycle_group(5, range(2, 5))
        rep = verify_local_actions(Y, a, samples(F, c, ball, 10, 5, reach=0), target)
        assert rep.ok and rep.checked
        for h, orb in zip(info["conjugators"][1:], info["orbits"][1:]):
            x = info["generator"]
            cycle = Permutation([x(y) if y in orb else y for y in range(10)])
            assert h * cycle * h.inverse() == P(10, (2, 3, 4))

    def test_identity_germ(self):
        F = c3_on_ten()
        ball = make_ball(10, 2)
        c = random_tree_coloring(ball.graph, 10, ball.root, random.Random(6), classes=orbits(F))
        Y, a, _ = lemma2_graph(ball, c, F)
        rep = verify_local_actions(Y, a, [identity_germ(ball)], PermGroup.trivial(5))
        assert rep.ok and rep.checked

    def test_odd_orbit_count(self):
        F = PermGroup(7, [P(7, (1, 2, 3), (4, 5, 6))])
        ball = make_ball(7, 1)
        with pytest.raises(HypothesisViolated):
            lemma2_graph(ball, ball.canonical, F)


class TestLemma3:
    @pytest.mark.parametrize("p", [3, 5])
    def test_regular_and_local_actions(self, p):
        ball = make_ball(p + 2, 2)
        c = random_tree_coloring(ball.graph, p + 2, ball.root, random.Random(p), symmetric=(0, 1))
        Z, a, info = lemma3_graph(ball, c, p)
        assert interior_degrees(Z.graph) == [p + 1]
        assert validate(Z.graph).ok and validate_coloring(a).ok
        assert not reversal_symmetric_colors(a, (0,))
        F = cycle_group(p + 2, range(2, p + 2))
        target = cycle_group(p + 1, range(1, p + 1))
        rep = verify_local_actions(Z, a, samples(F, c, ball, 8, p, reach=0), target)
        assert rep.ok and rep.checked

    def test_identity_germ(self):
        ball = make_ball(5, 2)
        Z, a, _ = lemma3_graph(ball, ball.canonical, 3)
        rep = verify_local_actions(Z, a, [identity_germ(ball)], PermGroup.trivial(4))
        assert rep.ok and rep.checked

    def test_rejects_composite(self):
        ball = make_ball(6, 1)
        with pytest.raises(HypothesisViolated):
            lemma3_graph(ball, ball.canonical, 4)


@given(st.integers(0, 10**6))
def test_lemma1_local_actions_fix_zero(seed):
    ball = make_ball(4, 2)
    B = blow_up(ball, ball.canonical)
    a, gs = lemma1_coloring(B, A4)
    g = sample_U(A4, ball.canonical, ball, seed=seed)
    rep = verify_local_actions(B, a, [g], point_stabilizer(A4, 0))
    assert rep.ok
