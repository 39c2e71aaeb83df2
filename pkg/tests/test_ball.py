"""Tree balls, germs, local actions, U(F) sampling and enumeration, Busemann values."""

import json
import random

import pytest
from hypothesis import given, strategies as st

from oracles import brute_in_U, cocycle_failures, sigma_direct
from treelocal.ball import (
    ball_size,
    build_germ,
    busemann,
    busemann_values,
    count_U_fix_formula,
    enumerate_U_fix,
    fixator_condition,
    germ_from_json,
    identity_germ,
    in_U,
    make_ball,
    random_germ_pair,
    root_fixing_automorphisms,
    sample_U,
    shift_germ,
    unique_fixed_point_audit,
    _least_with,
)
from treelocal.coloring import Coloring, is_legal, local_action, random_tree_coloring
from treelocal.errors import EmptyCoset, FormatError, HypothesisViolated, NotStabilized, SizeExceeded
from treelocal.perm import Permutation, PermGroup, all_subgroups, fixed_points, is_nilpotent
from treelocal.sgraph import is_forest, validate

P = Permutation.from_cycles


class TestMakeBall:
    @pytest.mark.parametrize("d,R,n", [(3, 1, 4), (3, 2, 10), (6, 2, 37)])
    def test_sizes(self, d, R, n):
        ball = make_ball(d, R)
        assert len(ball.graph.vertices) == n == ball_size(d, R)

    @pytest.mark.parametrize("d,R", [(3, 3), (4, 2), (5, 2)])
    def test_invariants(self, d, R):
        ball = make_ball(d, R)
        g = ball.graph
        assert validate(g).ok and is_forest(g) and g.is_connected()
        assert all(g.degree(v) == d for v in g.interior())
        assert is_legal(ball.canonical) and ball.canonical.regular == set(g.interior())

    def test_rejections(self):
        with pytest.raises(HypothesisViolated):
            make_ball(2, 3)
        with pytest.raises(SizeExceeded):
            make_ball(6, 6, cap=1000)

    def test_distance_matches_bfs(self):
        ball = make_ball(3, 3)
        for u in ball.graph.vertices[:8]:
            dist = ball.graph.distances_from(u)
            assert all(ball.distance(u, v) == dist[v] for v in ball.graph.vertices)


class TestLocalAction:
    def test_identity(self):
        ball = make_ball(4, 2)
        g = identity_germ(ball)
        assert all(local_action(g, v, ball.canonical).is_identity() for v in g.inner)

    def test_subtree_swap(self):
        ball = make_ball(3, 2)
        swap = P(3, (0, 1))

        def choose(v, gv, forced):
            return swap if forced is None else _least_with(ball.sym(), [forced])

        g = build_germ(ball, ball.canonical, ball.root, ball.root, 2, choose)
        assert local_action(g, ball.root, ball.canonical) == swap
        assert not in_U(g, PermGroup.trivial(3), ball.canonical)
        assert in_U(g, ball.sym(), ball.canonical)

    @given(st.sampled_from([3, 4, 6]), st.integers(0, 10**6))
    def test_cocycle_identities(self, d, seed):
        ball = make_ball(d, 4 if d < 6 else 3)
        rng = random.Random(seed)
        g, h = random_germ_pair(ball, ball.canonical, rng)
        checked, bad = cocycle_failures(g, h, ball.canonical)
        assert checked > 0 and not bad

    @given(st.integers(0, 10**6))
    def test_cocycle_with_random_coloring(self, seed):
        ball = make_ball(4, 3)
        rng = random.Random(seed)
        c = random_tree_coloring(ball.graph, 4, ball.root, rng, symmetric=())
        g, h = random_germ_pair(ball, c, rng)
        assert not cocycle_failures(g, h, c)[1]

    @given(st.integers(0, 10**6))
    def test_matches_direct_scan(self, seed):
        ball = make_ball(3, 3)
        g = sample_U(ball.sym(), ball.canonical, ball, seed=seed)
        for v in g.inner:
            assert local_action(g, v, ball.canonical) == sigma_direct(g, v, ball.canonical)


class TestSampling:
    def test_full_group(self):
        ball = make_ball(3, 3)
        for seed in range(10):
            assert in_U(sample_U(ball.sym(), ball.canonical, ball, seed=seed), ball.sym(), ball.canonical)

    def test_deterministic(self):
        ball = make_ball(4, 3)
        a = sample_U(ball.sym(), ball.canonical, ball, seed=7)
        b = sample_U(ball.sym(), ball.canonical, ball, seed=7)
        assert a.vertex_map == b.vertex_map and a.edge_map == b.edge_map

    @given(st.sampled_from([g for n in (3, 4) for g in all_subgroups(n)]), st.integers(0, 10**6))
    def test_samples_lie_in_U(self, F, seed):
        ball = make_ball(F.degree, 3)
        g = sample_U(F, ball.canonical, ball, seed=seed)
        assert brute_in_U(g, F, ball.canonical) and in_U(g, F, ball.canonical)

    def test_fixing_zero(self):
        ball = make_ball(3, 2)
        F = PermGroup(3, [P(3, (1, 2))])
        assert in_U(sample_U(F, ball.canonical, ball, seed=1), F, ball.canonical)

    def test_empty_coset(self):
        ball = make_ball(3, 3)
        gr = ball.graph
        colors = dict(ball.canonical.colors)
        t = gr.terminal(ball.canonical.edge_of(ball.root, 0))
        for f in gr.out_edges(t):
            colors[f] = {0: 1, 1: 0, 2: 2}[colors[f]]
        c = Coloring(gr, 3, colors)
        with pytest.raises(EmptyCoset):
            sample_U(PermGroup.trivial(3), c, ball, root_target=t)

    def test_json_roundtrip(self):
        ball = make_ball(3, 3)
        g = sample_U(ball.sym(), ball.canonical, ball, seed=4)
        h = germ_from_json(ball, json.loads(json.dumps(g.to_json())))
        assert h.vertex_map == g.vertex_map and h.edge_map == g.edge_map

    def test_json_rejects_partial(self):
        ball = make_ball(3, 2)
        data = identity_germ(ball).to_json()
        data["vertex_map"].pop(str(ball.root))
        with pytest.raises(FormatError):
            germ_from_json(ball, data)


class TestEnumeration:
    def test_examples(self):
        b1, b2 = make_ball(3, 1), make_ball(3, 2)
        assert enumerate_U_fix(PermGroup.trivial(3), b2.canonical, b2)[0] == 1
        assert enumerate_U_fix(PermGroup(3, [P(3, (1, 2))]), b1.canonical, b1)[0] == 2
        assert enumerate_U_fix(b2.sym(), b2.canonical, b2)[0] == 48

    @pytest.mark.parametrize("d,R", [(3, 1), (3, 2), (4, 1)])
    def test_against_brute_force_and_formula(self, d, R):
        ball = make_ball(d, R)
        autos = list(root_fixing_automorphisms(ball))
        for F in all_subgroups(d):
            count, germs = enumerate_U_fix(F, ball.canonical, ball)
            brute = sum(brute_in_U(g, F, ball.canonical) for g in autos)
            assert count == brute == count_U_fix_formula(F, ball.canonical, ball)
            assert len({tuple(sorted(g.vertex_map.items())) for g in germs}) == count


class TestBusemann:
    def through_root(self, ball):
        gr = ball.graph
        left = [ball.root]
        right = [ball.root]
        for side, color in ((left, 0), (right, 1)):
            v = gr.terminal(ball.canonical.edge_of(ball.root, color))
            side.append(v)
            while len(side) <= ball.radius:
                e = min(ball.children(side[-1]), key=lambda x: ball.canonical.colors[x])
                side.append(gr.terminal(e))
        return left[::-1] + right[1:]

    def test_examples(self):
        ball = make_ball(3, 6)
        ray = self.through_root(ball)
        mid = ball.radius
        assert busemann(identity_germ(ball), ray) == 0
        assert busemann(shift_germ(ball, ray, mid, 1), ray) == 1
        assert busemann(shift_germ(ball, ray, mid, -1), ray) == -1

    def test_not_stabilized(self):
        ball = make_ball(3, 4)
        ray = self.through_root(ball)
        g = shift_germ(ball, ray, ball.radius, 1)
        with pytest.raises(NotStabilized):
            busemann(g, ray, window=50)

    @given(st.integers(-2, 2), st.integers(-2, 2))
    def test_additive(self, s1, s2):
        ball = make_ball(3, 6)
        ray = self.through_root(ball)
        mid = ball.radius
        h = shift_germ(ball, ray, mid, s1)
        g = shift_germ(ball, ray, mid + s1, s2)
        gh = g * h
        assert len(busemann_values(gh, ray)) >= 2
        assert busemann(gh, ray) == busemann(g, ray) + busemann(h, ray) == s1 + s2


class TestFixatorCondition:
    def test_examples(self):
        assert fixator_condition(PermGroup(4, [P(4, (0, 1)), P(4, (2, 3))]))
        assert not fixator_condition(PermGroup.symmetric(3))
        assert fixator_condition(PermGroup.cyclic(5))

    @pytest.mark.parametrize("n", [2, 3, 4, 5])
    def test_nilpotent_without_unique_fixed_point(self, n):
        for F in all_subgroups(n):
            if is_nilpotent(F) and len(fixed_points(F)) != 1:
                assert fixator_condition(F)


class TestUniqueFixedPointAudit:
    F = PermGroup(4, [P(4, (1, 2, 3))])

    def test_passes_on_samples(self):
        ball = make_ball(4, 3)
        rng = random.Random(5)
        near = ball.within(ball.root, 1)
        germs = [sample_U(self.F, ball.canonical, ball, rng.choice(near), rng) for _ in range(100)]
        ok, entries = unique_fixed_point_audit(self.F, germs, ball.canonical)
        assert ok and entries

    def test_flags_illegal_fixed_color(self):
        ball = make_ball(4, 3)
        gr = ball.graph
        colors = dict(ball.canonical.colors)
        e = ball.canonical.edge_of(ball.root, 0)
        t = gr.terminal(e)
        for f in gr.out_edges(t):
            colors[f] = {0: 1, 1: 0, 2: 2, 3: 3}[colors[f]]
        c = Coloring(gr, 4, colors)

        def choose(v, gv, forced):
            return Permutation.identity(4) if forced is None else _least_with(ball.sym(), [forced])

        g = build_germ(ball, c, ball.root, t, 2, choose)
        ok, entries = unique_fixed_point_audit(self.F, [g], c)
        assert not ok and entries[0].edge == e and entries[0].colors == (0, 1)
