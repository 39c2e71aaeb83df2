"""Acceptance suite: one printed PASS/FAIL line per criterion.

Run under pytest (lines are collected into the terminal summary) or
directly with ``python3 tests/test_acceptance.py``.
"""

import json
import random
import sys
import time
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from oracles import cocycle_failures, sigma_direct  # noqa: E402
from treelocal.ball import (  # noqa: E402
    enumerate_U_fix,
    in_U,
    make_ball,
    random_germ_pair,
    root_fixing_automorphisms,
    sample_U,
)
from treelocal.blowup import blow_up, induced_action, lemma1_coloring, verify_lemma1  # noqa: E402
from treelocal.coloring import is_legal, legalize_cp, random_tree_coloring  # noqa: E402
from treelocal.cover import check_sigma_lift, diagram_report, lift, universal_cover  # noqa: E402
from treelocal.perm import (  # noqa: E402
    Permutation,
    PermGroup,
    all_subgroups,
    classify,
    conjugacy_class_reps,
    frobenius_from_prime,
    is_nilpotent,
    is_transitive,
    orbits,
    plus_subgroup,
    point_stabilizer,
)
from treelocal.sgraph import is_forest, quotient  # noqa: E402
from treelocal.vhcomplex import MET, complex_from_json, local_action as complex_local_action  # noqa: E402
from treelocal.vhcomplex import nonrf_report, stabilizer_growth, strictly_increasing  # noqa: E402

EXAMPLE_FIXTURE = Path(__file__).parent / "fixtures" / "square_complex_4x6.json"

RESULTS = []


def record(number, title, ok, detail, elapsed=None, budget=None):
    within = budget is None or elapsed < budget
    status = "PASS" if ok and within else "FAIL"
    timing = "" if elapsed is None else f" [{elapsed:.2f}s" + (f" < {budget}s]" if budget else "]")
    line = f"{status} criterion {number}: {title}: {detail}{timing}"
    RESULTS.append(line)
    print(line)
    assert ok, line
    assert within, f"{line} exceeded the {budget}s budget"


# 1 ------------------------------------------------------------------------------------------


def test_criterion_1_cocycle_identities():
    start = time.perf_counter()
    pairs, checks, failures = 0, 0, 0
    for d in (3, 4, 6):
        ball = make_ball(d, 4)
        rng = random.Random(1000 + d)
        for _ in range(500):
            g, h = random_germ_pair(ball, ball.canonical, rng)
            n, bad = cocycle_failures(g, h, ball.canonical)
            pairs += 1
            checks += n
            failures += len(bad)
    elapsed = time.perf_counter() - start
    record(1, "cocycle identities on B4(T_d), d in {3,4,6}",
           failures == 0 and pairs >= 1500,
           f"{pairs} pairs, {checks} vertex checks, {failures} failures", elapsed, 10)


# 2 ------------------------------------------------------------------------------------------


def test_criterion_2_legalize_cp_equivalence():
    start = time.perf_counter()
    details, ok = [], True
    for p in (3, 5):
        n = p + 1
        F = PermGroup(n, [Permutation.from_cycles(n, tuple(range(1, n)))])
        ball = make_ball(n, 3)
        rng = random.Random(p)
        c = random_tree_coloring(ball.graph, n, ball.root, rng, symmetric=(0,))
        d = legalize_cp(c, F, ball.root)
        legal = is_legal(d)
        pools = [(F, c), (F, d), (ball.sym(), c)]
        near = ball.within(ball.root, 1)
        agree, members = 0, 0
        for i in range(200):
            group, col = pools[i % 3]
            g = sample_U(group, col, ball, rng.choice(near), rng)
            a, b = in_U(g, F, c), in_U(g, F, d)
            agree += a == b
            members += a
        ok = ok and legal and agree == 200 and 0 < members < 200
        details.append(f"p={p}: legal={legal}, {agree}/200 agree ({members} members)")
    elapsed = time.perf_counter() - start
    record(2, "legalize_cp output legal and U_c(F) = U_d(F) on samples", ok, "; ".join(details), elapsed, 30)


# 3 ------------------------------------------------------------------------------------------


def test_criterion_3_lemma1_formula():
    start = time.perf_counter()
    details, ok = [], True
    for name, F in (("A4", PermGroup.alternating(4)), ("Sym(3)", PermGroup.symmetric(3))):
        ball = make_ball(F.degree, 3)
        B = blow_up(ball, ball.canonical)
        a, gs = lemma1_coloring(B, F)
        rng = random.Random(F.order())
        near = ball.within(ball.root, 1)
        germs = [sample_U(F, ball.canonical, ball, rng.choice(near), rng) for _ in range(100)]
        rep = verify_lemma1(B, a, gs, F, germs)
        ok = ok and rep.ok and rep.checked > 0
        details.append(f"{name}: {rep.checked} checks, {len(rep.mismatches)} mismatches")
    elapsed = time.perf_counter() - start
    record(3, "closed-form blow-up local action vs direct evaluation", ok, "; ".join(details), elapsed, 60)


# 4 ------------------------------------------------------------------------------------------


def test_criterion_4_lifted_local_actions():
    start = time.perf_counter()
    lifted, checked, mismatches, diagram_failures = 0, 0, 0, 0
    for F, count in ((PermGroup.alternating(4), 25), (PermGroup.symmetric(3), 25)):
        d = F.degree
        ball = make_ball(d, 2)
        B = blow_up(ball, ball.canonical)
        a, _ = lemma1_coloring(B, F)
        x = B.vid[(ball.root, 0)]
        bundle = universal_cover(B.graph, x, 4)
        rng = random.Random(40 + d)
        for _ in range(count):
            g = induced_action(sample_U(F, ball.canonical, ball, seed=rng), B, complete=True)
            fibre = sorted(bundle.fibre(g.vertex_map[x]), key=lambda y: (len(bundle.paths[y]), y))
            choice = rng.choice(fibre[: max(1, len(fibre) // 4)])
            G = lift(g, bundle, choice)
            diagram_failures += not diagram_report(bundle, g, G).ok
            rep = check_sigma_lift(bundle, a, g, G)
            lifted += 1
            checked += rep.checked
            mismatches += len(rep.mismatches)
    elapsed = time.perf_counter() - start
    ok = lifted == 50 and checked > 0 and mismatches == 0 and diagram_failures == 0
    record(4, "lifted coloring local actions equal base local actions", ok,
           f"{lifted} lifts, {checked} interior vertices, {mismatches} mismatches", elapsed, 60)


# 5 ------------------------------------------------------------------------------------------


def test_criterion_5_frobenius_construction():
    G = frobenius_from_prime(3)
    info = classify(G)
    elems = [e for e in G.elements() if not e.is_identity()]
    brute = is_transitive(G) and any(e.fixed_points() for e in elems) and all(len(e.fixed_points()) <= 1 for e in elems)
    index = G.order() // point_stabilizer(G, 0).order()
    ok = (G.degree == 4 and G.order() == 12 and info.frobenius and brute
          and info.generated_by_point_stabilizers and index == 4 and index & (index - 1) == 0)
    record(5, "Frobenius group from p=3", ok,
           f"degree {G.degree}, order {G.order()}, frobenius={info.frobenius}, "
           f"generated_by_point_stabilizers={info.generated_by_point_stabilizers}, index {index}")


# 6 ------------------------------------------------------------------------------------------


def test_criterion_6_nilpotent_transitive_plus():
    start = time.perf_counter()
    found, violations = 0, 0
    for d in range(1, 6):
        for G in all_subgroups(d):
            if d >= 2 and is_transitive(G) and is_nilpotent(G):
                found += 1
                violations += is_transitive(plus_subgroup(G))
    elapsed = time.perf_counter() - start
    record(6, "transitive nilpotent subgroups of Sym(d), d <= 5, have intransitive plus subgroup",
           violations == 0 and found > 0, f"{found} groups, {violations} violations", elapsed, 120)


# 7 ------------------------------------------------------------------------------------------


def test_criterion_7_quotient_forest():
    ball = make_ball(3, 3)
    F = PermGroup(3, [Permutation.from_cycles(3, (1, 2))])
    gr = ball.graph
    _, germs = enumerate_U_fix(F, ball.canonical, ball)
    root_edges = gr.out_edges(ball.root)
    moves = [g for g in germs if any(g.edge_map[e] == e for e in root_edges)]
    q, proj = quotient(gr, moves)
    degrees = [q.degree(v) for v in q.vertices if v not in q.boundary]
    blocks = len(orbits(plus_subgroup(F)))
    ok = is_forest(q) and proj.check().ok and min(degrees) >= 2 and blocks >= 2
    record(7, "quotient of B3(T3) by edge-fixing U(C2) germs", ok,
           f"{len(moves)} germs, {len(q.vertices)} quotient vertices, forest={is_forest(q)}, "
           f"min interior degree {min(degrees)}, blocks {blocks}")


# 8 ------------------------------------------------------------------------------------------


def test_criterion_8_enumeration_vs_brute_force():
    start = time.perf_counter()
    details, ok = [], True
    for d, R in ((3, 1), (3, 2), (4, 1), (4, 2)):
        ball = make_ball(d, R)
        c = ball.canonical
        inner = ball.within(ball.root, R - 1)
        signatures = [tuple(sigma_direct(g, v, c).images for v in inner) for g in root_fixing_automorphisms(ball)]
        reps = conjugacy_class_reps(d)
        mism = 0
        for F in reps:
            elems = F._element_set
            brute = sum(all(s in elems for s in sig) for sig in signatures)
            mism += enumerate_U_fix(F, c, ball)[0] != brute
        ok = ok and mism == 0
        details.append(f"({d},{R}): {len(reps)} classes, {len(signatures)} automorphisms, {mism} mismatches")
    elapsed = time.perf_counter() - start
    record(8, "enumerate_U_fix equals brute-force filtering", ok, "; ".join(details), elapsed, 300)


# 9 ------------------------------------------------------------------------------------------


def test_criterion_9_square_complex_fixture():
    if not EXAMPLE_FIXTURE.exists():
        line = f"SKIP criterion 9: square list fixture {EXAMPLE_FIXTURE.name} is not shipped; no squares are invented"
        RESULTS.append(line)
        print(line)
        pytest.skip(f"fixture {EXAMPLE_FIXTURE} absent: the square list must be transcribed from its source table")
    X = complex_from_json(json.loads(EXAMPLE_FIXTURE.read_text()))
    degrees = X.degrees()
    four = "vertical" if degrees[0] == 4 else "horizontal"
    six = "horizontal" if four == "vertical" else "vertical"
    F = complex_local_action(X, four)
    klein = PermGroup(4, [Permutation.from_cycles(4, (0, 1), (2, 3)), Permutation.from_cycles(4, (0, 2), (1, 3))])
    is_klein = F.order() == 4 and all(x.order() <= 2 for x in F.elements()) and not any(x.fixed_points() for x in F.elements() if not x.is_identity())
    growth = stabilizer_growth(X, six, 3, order_cap=None)
    verdict = nonrf_report(X)["verdict"]
    ok = sorted(degrees) == [4, 6] and is_klein and verdict == MET and strictly_increasing(growth)
    record(9, "square complex fixture", ok,
           f"degrees {degrees}, local action order {F.order()} (Klein: {is_klein}, reference {klein.order()}), "
           f"growth {growth}, verdict {verdict!r}")


if __name__ == "__main__":
    tests = [v for k, v in sorted(globals().items()) if k.startswith("test_criterion_")]
    failed = 0
    for t in tests:
        try:
            t()
        except pytest.skip.Exception:
            pass
        except AssertionError:
            failed += 1
    sys.exit(1 if failed else 0)
