"""Blow-ups of tree balls, the modified partition blow-ups and their colorings.

Every blow-up keeps a key for each of its edges:

* ``("clique", v, i, j)`` and ``("cycle", v, i, j)``: edges inside the fibre over ``v``;
* ``("tree", e)``: the edge lying over the base edge ``e``;
* ``("par", e, k)``: the ``k``-th parallel copy replacing the tree edge over ``e``.

Keys make the induced action of a base germ a pure relabelling.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .coloring import Coloring, is_legal, local_action
from .errors import BadTransporter, HypothesisViolated, NotTransitive, OutOfDomain, SingularVertex
from .perm import PermGroup, Permutation, _is_prime, is_transitive, orbits
from .sgraph import GraphBuilder, PartialMap, Report


@dataclass(eq=False)
class BlowupGraph:
    base: object  # TreeBall
    coloring: Coloring  # base coloring the blow-up is routed by
    kind: str  # plain | partitioned | Y-modified | Z-modified
    graph: object
    label: dict  # vertex -> (base vertex, color or part index)
    partition: tuple = None
    vid: dict = field(default_factory=dict)
    edge_key: dict = field(default_factory=dict)
    key_edge: dict = field(default_factory=dict)

    def part_of(self, color):
        if self.partition is None:
            return color
        return self._part_index[color]

    def __post_init__(self):
        if self.partition is not None:
            self._part_index = {x: i for i, part in enumerate(self.partition) for x in part}


class _Builder:
    def __init__(self, ball):
        self.b = GraphBuilder()
        self.ball = ball
        self.vid = {}
        self.edge_key = {}
        self.key_edge = {}

    def vertex(self, v, i):
        x = self.b.add_vertex(label=(v, i), boundary=v in self.ball.graph.boundary)
        self.vid[(v, i)] = x
        return x

    def edge(self, key, rkey, u, w):
        e, r = self.b.add_edge(u, w)
        self.edge_key[e], self.edge_key[r] = key, rkey
        self.key_edge[key], self.key_edge[rkey] = e, r
        return e, r

    def finish(self, c, kind, partition=None):
        g = self.b.build()
        return BlowupGraph(self.ball, c, kind, g, dict(g.labels), partition, self.vid, self.edge_key, self.key_edge)


def _require_regular(ball, c):
    for v in ball.graph.interior():
        if v not in c.regular:
            raise SingularVertex(f"base vertex {v} is not regular")


def blow_up(ball, c):
    """Replace each base vertex by a clique on the colors; tree edges join ``(v, c(e))`` and ``(w, c(ē))``."""
    _require_regular(ball, c)
    n = c.degree
    bd = _Builder(ball)
    g = ball.graph
    for v in g.vertices:
        for i in range(n):
            bd.vertex(v, i)
    for v in g.vertices:
        for i in range(n):
            for j in range(i + 1, n):
                bd.edge(("clique", v, i, j), ("clique", v, j, i), bd.vid[(v, i)], bd.vid[(v, j)])
    for e in sorted(g.undirected_edges()):
        r = g.reversal[e]
        bd.edge(("tree", e), ("tree", r), bd.vid[(g.origin[e], c.colors[e])], bd.vid[(g.origin[r], c.colors[r])])
    return bd.finish(c, "plain")


def _cycle_pairs(length):
    pairs = set()
    for i in range(length):
        for j in ((i + 1) % length, (i - 1) % length):
            if i != j:
                pairs.add((min(i, j), max(i, j)))
    return sorted(pairs)


def partition_blow_up(ball, c, partition, _skip=None):
    """Fibre over ``v`` is the parts, joined cyclically; tree edges follow the parts of the colors."""
    parts = tuple(tuple(sorted(p)) for p in partition)
    index = {x: i for i, p in enumerate(parts) for x in p}
    if sorted(index) != list(range(c.degree)):
        raise HypothesisViolated("partition must cover the colors exactly once")
    _require_regular(ball, c)
    bd = _Builder(ball)
    g = ball.graph
    ell = len(parts)
    for v in g.vertices:
        for i in range(ell):
            bd.vertex(v, i)
    for v in g.vertices:
        for i, j in _cycle_pairs(ell):
            bd.edge(("cycle", v, i, j), ("cycle", v, j, i), bd.vid[(v, i)], bd.vid[(v, j)])
    for e in sorted(g.undirected_edges()):
        r = g.reversal[e]
        if _skip is not None and _skip(e):
            continue
        bd.edge(("tree", e), ("tree", r), bd.vid[(g.origin[e], index[c.colors[e]])], bd.vid[(g.origin[r], index[c.colors[r]])])
    return bd, parts, index


def partitioned(ball, c, partition):
    bd, parts, _ = partition_blow_up(ball, c, partition)
    return bd.finish(c, "partitioned", parts)


# -- induced action ------------------------------------------------------------------

def _map_key(key, germ, fibre_map):
    kind = key[0]
    if kind in ("clique", "cycle"):
        _, v, i, j = key
        gv = germ.vertex_map[v]
        return (kind, gv, fibre_map[v][i], fibre_map[v][j])
    if kind == "tree":
        return ("tree", germ.edge_map[key[1]])
    return ("par", germ.edge_map[key[1]], key[2])


def induced_action(germ, B, complete=False):
    """Action of a base germ on the blow-up, ``(v, i) -> (g v, σ(g, v)(i))``.

    Defined over ``B_{k-1}(source)`` together with the far ends of the edges
    leaving it.  With ``complete`` and a germ defined on the whole ball, the
    fibres over boundary base vertices are filled in by the least admissible
    bijection, giving a full automorphism.
    """
    c = B.coloring
    g = B.graph
    fibre = {}
    for v in germ.inner:
        sigma = local_action(germ, v, c)
        if B.partition is None:
            fibre[v] = sigma.images
        else:
            fm = []
            for part in B.partition:
                img = B._part_index[sigma.images[part[0]]]
                if any(B._part_index[sigma.images[x]] != img for x in part):
                    raise HypothesisViolated(f"local action at {v} does not permute the parts")
                fm.append(img)
            fibre[v] = tuple(fm)
    if complete:
        _complete_boundary(germ, B, fibre)
    vm, em = {}, {}
    for v, fm in fibre.items():
        gv = germ.vertex_map[v]
        for i, j in enumerate(fm):
            vm[B.vid[(v, i)]] = B.vid[(gv, j)]
    for e, key in B.edge_key.items():
        if e in em:
            continue
        kind = key[0]
        if kind in ("clique", "cycle"):
            if key[1] not in fibre:
                continue
        else:
            base_e = key[1]
            if base_e not in germ.edge_map:
                continue
            o = B.base.graph.origin[base_e]
            t = B.base.graph.terminal(base_e)
            if o not in fibre and t not in fibre:
                continue
        f = B.key_edge[_map_key(key, germ, fibre)]
        r, rf = g.reversal[e], g.reversal[f]
        em[e], em[r] = f, rf
        for x, y in ((g.origin[e], g.origin[f]), (g.origin[r], g.origin[rf])):
            if vm.setdefault(x, y) != y:
                raise OutOfDomain(f"inconsistent image for blow-up vertex {x}")
    return PartialMap(g, vm, em)


def _complete_boundary(germ, B, fibre):
    base = B.base
    bg = base.graph
    c = B.coloring
    size = c.degree if B.partition is None else len(B.partition)
    for w in bg.boundary:
        if w not in germ.vertex_map or w in fibre:
            continue
        ew = [e for e in bg.out_edges(w)]
        if any(e not in germ.edge_map for e in ew):
            raise OutOfDomain(f"germ is not defined around boundary vertex {w}")
        pairs = {}
        for e in ew:
            pairs[B.part_of(c.colors[e])] = B.part_of(c.colors[germ.edge_map[e]])
        used = set(pairs.values())
        free = iter(x for x in range(size) if x not in used)
        fibre[w] = tuple(pairs[i] if i in pairs else next(free) for i in range(size))


def partial_iso_report(pm):
    """Injective, origin- and reversal-preserving on its domain."""
    g = pm.graph
    vm, em = pm.vertex_map, pm.edge_map
    if len(set(vm.values())) != len(vm):
        return Report(("vertex map is not injective",))
    if len(set(em.values())) != len(em):
        return Report(("edge map is not injective",))
    for e, f in em.items():
        if vm.get(g.origin[e]) != g.origin[f]:
            return Report((f"origin not preserved at edge {e}",))
        if em.get(g.reversal[e]) != g.reversal[f]:
            return Report((f"reversal not preserved at edge {e}",))
    return Report()


def inversion_check(F):
    """No element of ``F`` has a cycle of length two."""
    return not any(len(cyc) == 2 for x in F.elements() for cyc in x.cycles())


def interior_degrees(graph):
    return sorted({graph.degree(v) for v in graph.interior()})


# -- first construction: plain blow-up, transporter coloring -----------------------------

def least_transporters(F):
    """``g_i``: least element of ``F`` with ``g_i(i) = 0``."""
    if not is_transitive(F):
        raise NotTransitive("F must be transitive")
    return [F.transporters(i, 0)[0] for i in range(F.degree)]


def lemma1_coloring(B, F, transporters=None):
    """Coloring ``a(e) = g_{i}(j)`` for an edge from ``(v, i)`` to ``(w, j)``."""
    c = B.coloring
    if B.kind != "plain":
        raise HypothesisViolated("needs a plain blow-up")
    if not is_transitive(F):
        raise NotTransitive("F must be transitive")
    if not is_legal(c):
        raise HypothesisViolated("base coloring must be legal")
    gs = least_transporters(F) if transporters is None else list(transporters)
    if len(gs) != F.degree:
        raise BadTransporter("need one transporter per point")
    for i, x in enumerate(gs):
        if x not in F or x.images[i] != 0:
            raise BadTransporter(f"g_{i} must lie in F and send {i} to 0")
    if not gs[0].is_identity():
        raise BadTransporter("g_0 must be the identity")
    g = B.graph
    lab = B.label
    colors = {e: gs[lab[g.origin[e]][1]].images[lab[g.terminal(e)][1]] for e in g.edges}
    return Coloring(g, F.degree, colors), gs


def lemma1_formula(gs, sigma, i):
    """``g_{σ(i)} · σ · g_i^{-1}``."""
    return gs[sigma.images[i]] * sigma * gs[i].inverse()


@dataclass
class AuditReport:
    checked: int = 0
    mismatches: list = field(default_factory=list)

    @property
    def ok(self):
        return not self.mismatches


def verify_lemma1(B, a, gs, F, germs):
    """Direct ``σ_a`` on the blow-up against the closed formula; result must fix 0 and lie in ``F``."""
    rep = AuditReport()
    c = B.coloring
    for n, germ in enumerate(germs):
        act = induced_action(germ, B)
        for v in germ.inner:
            sigma = local_action(germ, v, c)
            for i in range(c.degree):
                x = B.vid[(v, i)]
                direct = local_action(act, x, a)
                formula = lemma1_formula(gs, sigma, i)
                rep.checked += 1
                if direct != formula or direct.images[0] != 0 or direct not in F:
                    rep.mismatches.append((n, (v, i), str(direct), str(formula)))
    return rep


# -- second construction: graph Y over the orbits of a cyclic group ----------------------

def _conjugator(points, cycle_of, n, low):
    """Least ``h`` in Sym(n) carrying the cycle through ``points`` onto ``(low .. low+p-1)``."""
    start = min(points)
    seq = [start]
    while len(seq) < len(points):
        seq.append(cycle_of[seq[-1]])
    p = len(seq)
    best = None
    for r in range(p):
        img = {seq[t]: low + (t + r) % p for t in range(p)}
        rest_src = [x for x in range(n) if x not in img]
        rest_dst = [y for y in range(n) if y not in img.values()]
        img.update(zip(rest_src, rest_dst))
        cand = tuple(img[x] for x in range(n))
        if best is None or cand < best:
            best = cand
    return Permutation(best)


def _cyclic_prime(F):
    order = F.order()
    if not _is_prime(order) or order < 3:
        raise HypothesisViolated("group must be cyclic of odd prime order")
    return order


def lemma2_graph(ball, c, F, generator=None):
    """Graph Y and its coloring for ``F = C_p`` with unique fixed point 0 and an even number of orbits.

    Returns ``(Y, a, info)`` where ``info`` records orbits, generator and conjugators.
    """
    p = _cyclic_prime(F)
    orbs = orbits(F)
    if orbs[0] != (0,) or any(len(o) == 1 for o in orbs[1:]):
        raise HypothesisViolated("0 must be the only fixed point")
    ell = len(orbs)
    if ell <= 2 or ell % 2:
        raise HypothesisViolated(f"orbit count {ell} must be even and greater than 2")
    for e in ball.graph.edges:
        if (c.colors[e] == 0) != (c.colors[ball.graph.reversal[e]] == 0):
            raise HypothesisViolated(f"edge {e}: color 0 is not symmetric")
    x = generator if generator is not None else next(y for y in F.elements() if not y.is_identity())
    if x not in F or x.is_identity():
        raise HypothesisViolated("generator must be a non-trivial element of F")
    n = F.degree
    hs = [None] + [_conjugator(orbs[i], x.images, n, 2) for i in range(1, ell)]

    g = ball.graph
    bd, parts, index = partition_blow_up(ball, c, orbs, _skip=lambda e: c.colors[e] == 0)
    for e in sorted(g.undirected_edges()):
        if c.colors[e] != 0:
            continue
        r = g.reversal[e]
        for k in range(2, p + 2):
            bd.edge(("par", e, k), ("par", r, k), bd.vid[(g.origin[e], 0)], bd.vid[(g.origin[r], 0)])
    Y = bd.finish(c, "Y-modified", parts)

    colors = {}
    for f, key in Y.edge_key.items():
        kind = key[0]
        if kind == "par":
            colors[f] = key[2]
            continue
        i = Y.label[Y.graph.origin[f]][1]
        if kind == "tree":
            colors[f] = hs[i].images[c.colors[key[1]]]
            continue
        j = key[3]
        colors[f] = _cycle_color(i, j, ell)
    a = Coloring(Y.graph, p + 2, colors)
    return Y, a, {"orbits": orbs, "generator": x, "conjugators": hs, "p": p}


def _cycle_color(i, j, ell):
    up = j == (i + 1) % ell
    if i == 0:
        return 0 if up else 1
    if i == ell - 1:
        return 1 if up else 0
    if i % 2:
        return 1 if up else 0
    return 0 if up else 1


# -- third construction: graph Z over {0,1} | {2..p+1} --------------------------------------

def lemma3_graph(ball, c, p):
    """Graph Z and its coloring for ``F = <(2 .. p+1)>`` acting on ``0..p+1``."""
    if not _is_prime(p) or p < 3:
        raise HypothesisViolated("p must be an odd prime")
    if c.degree != p + 2:
        raise HypothesisViolated(f"coloring must have degree {p + 2}")
    g = ball.graph
    for e in g.edges:
        for z in (0, 1):
            if (c.colors[e] == z) != (c.colors[g.reversal[e]] == z):
                raise HypothesisViolated(f"edge {e}: color {z} is not symmetric")
    W, U = (0, 1), tuple(range(2, p + 2))
    cyc = {2 + t: 2 + (t + 1) % p for t in range(p)}
    h = _conjugator(U, cyc, p + 2, 1)

    bd, parts, index = partition_blow_up(ball, c, (W, U), _skip=lambda e: c.colors[e] in (0, 1))
    for e in sorted(g.undirected_edges()):
        col = c.colors[e]
        if col not in (0, 1):
            continue
        r = g.reversal[e]
        ks = range(1, p) if col == 0 else (p,)
        for k in ks:
            bd.edge(("par", e, k), ("par", r, k), bd.vid[(g.origin[e], 0)], bd.vid[(g.origin[r], 0)])
    Z = bd.finish(c, "Z-modified", parts)
    colors = {}
    for f, key in Z.edge_key.items():
        if key[0] == "par":
            colors[f] = key[2]
        elif key[0] == "cycle":
            colors[f] = 0
        else:
            colors[f] = h.images[c.colors[key[1]]]
    a = Coloring(Z.graph, p + 1, colors)
    return Z, a, {"conjugator": h, "p": p}


def cycle_group(degree, points):
    return PermGroup(degree, [Permutation.from_cycles(degree, tuple(points))])


def verify_local_actions(B, a, germs, target):
    """Every induced local action at an interior vertex over ``B_{k-1}`` lies in ``target``."""
    rep = AuditReport()
    for n, germ in enumerate(germs):
        act = induced_action(germ, B)
        for x in act.vertex_map:
            if x in B.graph.boundary or not act.star_defined(x):
                continue
            s = local_action(act, x, a)
            rep.checked += 1
            if s not in target:
                rep.mismatches.append((n, B.label[x], str(s)))
    return rep


def reversal_symmetric_colors(a, colors):
    """Edges violating ``a(e) = z <=> a(ē) = z`` for ``z`` in ``colors``."""
    g = a.graph
    return [e for e in g.edges for z in colors if (a.colors[e] == z) != (a.colors[g.reversal[e]] == z)]
