"""Finite balls in the d-regular tree and germs of its automorphisms.

A :class:`BallGerm` is a graph isomorphism ``B_k(s) -> B_k(t)`` between two
balls inside one :class:`TreeBall`.  Local actions are only meaningful on
``B_{k-1}(s)``, where the full star of every vertex lies in the domain.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass

from .coloring import Coloring, local_action
from .errors import CapExceeded, EmptyCoset, FormatError, HypothesisViolated, NotStabilized, OutOfDomain, SizeExceeded
from .perm import DEFAULT_CAP, PermGroup, Permutation
from .sgraph import GraphBuilder, PartialMap


def ball_size(d, R):
    if d == 2:
        return 2 * R + 1
    return 1 + d * ((d - 1) ** R - 1) // (d - 2)


@dataclass(eq=False)
class TreeBall:
    degree: int
    radius: int
    root: int
    graph: object
    canonical: Coloring
    depth: dict
    up: dict  # non-root vertex -> edge towards its parent

    def parent(self, v):
        return self.graph.terminal(self.up[v])

    def distance(self, u, v):
        du, dv = self.depth[u], self.depth[v]
        steps = 0
        while du > dv:
            u, du, steps = self.parent(u), du - 1, steps + 1
        while dv > du:
            v, dv, steps = self.parent(v), dv - 1, steps + 1
        while u != v:
            u, v, steps = self.parent(u), self.parent(v), steps + 2
        return steps

    def within(self, center, k):
        """Vertices of ``B_k(center)`` in BFS order."""
        dist = {center: 0}
        order = [center]
        for x in order:
            if dist[x] == k:
                continue
            for e in self.graph.out_edges(x):
                y = self.graph.terminal(e)
                if y not in dist:
                    dist[y] = dist[x] + 1
                    order.append(y)
        return order

    def children(self, v):
        return [e for e in self.graph.out_edges(v) if self.up.get(v) != e]

    def max_radius(self, s, t):
        """Largest ``k`` for which a germ ``B_k(s) -> B_k(t)`` fits inside the ball."""
        return self.radius - max(self.depth[s], self.depth[t])

    def sym(self):
        return PermGroup.symmetric(self.degree)


def make_ball(d, R, cap=DEFAULT_CAP):
    """Ball of radius ``R`` in ``T_d`` with its canonical legal coloring.

    Root edges get colors ``0..d-1``; a child repeats the color of the edge
    it hangs from and hands the remaining colors to its own children in
    increasing order.
    """
    if d < 3 or R < 1:
        raise HypothesisViolated("need d >= 3 and R >= 1")
    size = ball_size(d, R)
    if size > cap:
        raise SizeExceeded(f"ball has {size} vertices, cap is {cap}")
    b = GraphBuilder()
    root = b.add_vertex(label=(), boundary=False)
    depth = {root: 0}
    up = {}
    colors = {}
    frontier = [root]
    for level in range(1, R + 1):
        nxt = []
        for v in frontier:
            if v == root:
                palette = list(range(d))
            else:
                used = colors[up[v]]
                palette = [a for a in range(d) if a != used]
            for a in palette:
                w = b.add_vertex(label=b.labels[v] + (a,), boundary=(level == R))
                down, back = b.add_edge(v, w)
                colors[down] = colors[back] = a
                depth[w] = level
                up[w] = back
                nxt.append(w)
        frontier = nxt
    g = b.build()
    interior = [v for v in g.vertices if v not in g.boundary]
    canonical = Coloring(g, d, colors, interior)
    return TreeBall(d, R, root, g, canonical, depth, up)


# -- germs -----------------------------------------------------------------------

class BallGerm(PartialMap):
    """Isomorphism ``B_k(source) -> B_k(target)``; ``inner`` is ``B_{k-1}(source)``."""

    def __init__(self, ball, source, target, k, vertex_map, edge_map, inner=None):
        PartialMap.__init__(self, ball.graph, vertex_map, edge_map)
        self.ball, self.source, self.target, self.k = ball, source, target, k
        self.inner = tuple(ball.within(source, k - 1)) if inner is None else tuple(inner)

    def __repr__(self):
        return f"BallGerm({self.source}->{self.target}, k={self.k})"

    def compose(self, other):
        """``self ∘ other``; radius ``min(k_other, k_self - d(t_other, s_self))``."""
        if self.ball is not other.ball:
            raise ValueError("germs live in different balls")
        k = min(other.k, self.k - self.ball.distance(other.target, self.source))
        if k < 0:
            raise OutOfDomain("germs are too far apart to compose")
        vs = self.ball.within(other.source, k)
        vm = {v: self.vertex_map[other.vertex_map[v]] for v in vs}
        vset = set(vs)
        o, t = self.graph.origin, self.graph.terminal
        em = {e: self.edge_map[f] for e, f in other.edge_map.items() if o[e] in vset and t(e) in vset}
        return BallGerm(self.ball, other.source, vm[other.source], k, vm, em)

    def __mul__(self, other):
        return self.compose(other)

    def inverse(self):
        vm = {w: v for v, w in self.vertex_map.items()}
        em = {f: e for e, f in self.edge_map.items()}
        return BallGerm(self.ball, self.target, self.source, self.k, vm, em)

    def restrict_radius(self, k):
        if k > self.k:
            raise OutOfDomain("cannot enlarge a germ")
        vs = set(self.ball.within(self.source, k))
        o, t = self.graph.origin, self.graph.terminal
        vm = {v: w for v, w in self.vertex_map.items() if v in vs}
        em = {e: f for e, f in self.edge_map.items() if o[e] in vs and t(e) in vs}
        return BallGerm(self.ball, self.source, self.target, k, vm, em)

    def to_json(self):
        out = {"source": self.source, "target": self.target, "k": self.k}
        out.update(PartialMap.to_json(self))
        return out


def germ_from_json(ball, data):
    try:
        vm = {int(a): int(b) for a, b in data["vertex_map"].items()}
        em = {int(a): int(b) for a, b in data["edge_map"].items()}
        g = BallGerm(ball, int(data["source"]), int(data["target"]), int(data["k"]), vm, em)
    except (KeyError, TypeError, ValueError, AttributeError) as exc:
        raise FormatError(f"malformed germ JSON: {exc}") from exc
    _check_germ(g)
    return g


def _check_germ(g):
    ball = g.ball
    expected = set(ball.within(g.source, g.k))
    if set(g.vertex_map) != expected or set(g.vertex_map.values()) != set(ball.within(g.target, g.k)):
        raise FormatError("germ does not map B_k(source) onto B_k(target)")
    gr = ball.graph
    for e, f in g.edge_map.items():
        if g.vertex_map.get(gr.origin[e]) != gr.origin[f] or g.edge_map.get(gr.reversal[e]) != gr.reversal[f]:
            raise FormatError(f"germ is not a graph map at edge {e}")


def build_germ(ball, c, source, target, k, choose):
    """Grow a germ outward from ``source``.

    ``choose(v, gv, forced)`` returns the local permutation at ``v``, where
    ``forced`` is ``None`` at the source and otherwise the pair ``(a, b)``
    meaning the permutation must send ``a`` to ``b`` (the edge towards the
    parent is already mapped).
    """
    if k < 0 or ball.depth[source] + k > ball.radius or ball.depth[target] + k > ball.radius:
        raise OutOfDomain(f"radius {k} germ from {source} to {target} leaves the ball")
    gr = ball.graph
    rev, col = gr.reversal, c.colors
    vm = {source: target}
    em = {}
    dist = {source: 0}
    entry = {}
    queue = [source]
    inner = []
    for v in queue:
        if dist[v] == k:
            continue
        inner.append(v)
        gv = vm[v]
        forced = None
        if v in entry:
            pe = rev[entry[v]]
            forced = (col[pe], col[em[pe]])
        sigma = choose(v, gv, forced)
        img = sigma.images
        for a in range(c.degree):
            e = c.edge_of(v, a)
            f = c.edge_of(gv, img[a])
            if e in em:
                if em[e] != f:
                    raise ValueError(f"local permutation at {v} contradicts the parent edge")
                continue
            em[e], em[rev[e]] = f, rev[f]
            w = gr.terminal(e)
            vm[w] = gr.terminal(f)
            dist[w] = dist[v] + 1
            entry[w] = e
            queue.append(w)
    return BallGerm(ball, source, target, k, vm, em, inner)


def identity_germ(ball, center=None, k=None):
    center = ball.root if center is None else center
    k = ball.max_radius(center, center) if k is None else k
    return build_germ(ball, ball.canonical, center, center, k, lambda v, gv, f: Permutation.identity(ball.degree))


def _satisfying(group, forced):
    if forced is None:
        return group.elements()
    return group.transporters(*forced)


def sample_U(F, c, ball, root_target=None, seed=0, source=None, k=None):
    """Random germ of ``U_c(F)``; each local permutation uniform in its admissible coset."""
    rng = seed if isinstance(seed, random.Random) else random.Random(seed)
    source = ball.root if source is None else source
    target = source if root_target is None else root_target
    k = ball.max_radius(source, target) if k is None else k

    def choose(v, gv, forced):
        cands = _satisfying(F, forced)
        if not cands:
            raise EmptyCoset(f"no element of F maps {forced[0]} to {forced[1]} at vertex {v}")
        return cands[rng.randrange(len(cands))]

    return build_germ(ball, c, source, target, k, choose)


def in_U(g, F, c):
    """Every local action on ``B_{k-1}(source)`` lies in ``F``."""
    elems = F._element_set
    return all(local_action(g, v, c).images in elems for v in g.inner)


def local_actions(g, c):
    return {v: local_action(g, v, c) for v in g.inner}


# -- enumeration -----------------------------------------------------------------

def iter_U_fix(F, c, ball):
    """Root-fixing full-radius germs of ``U_c(F)``, depth-first."""
    interior = [v for v in ball.within(ball.root, ball.radius - 1)]
    gr = ball.graph
    rev = gr.reversal
    col = c.colors
    d = c.degree

    def extend(idx, vm, em):
        if idx == len(interior):
            yield BallGerm(ball, ball.root, ball.root, ball.radius, dict(vm), dict(em), interior)
            return
        v = interior[idx]
        gv = vm[v]
        forced = None
        if v != ball.root:
            pe = ball.up[v]
            forced = (col[pe], col[em[pe]])
        for sigma in _satisfying(F, forced):
            added = []
            ok = True
            for a in range(d):
                e = c.edge_of(v, a)
                f = c.edge_of(gv, sigma.images[a])
                if e in em:
                    ok = em[e] == f
                    if not ok:
                        break
                    continue
                w = gr.terminal(e)
                em[e], em[rev[e]] = f, rev[f]
                vm[w] = gr.terminal(f)
                added.append((e, w))
            if ok:
                yield from extend(idx + 1, vm, em)
            for e, w in added:
                del em[e], em[rev[e]], vm[w]

    yield from extend(0, {ball.root: ball.root}, {})


def enumerate_U_fix(F, c, ball, cap=DEFAULT_CAP):
    """Count and list of the root-fixing full-radius germs in ``U_c(F)``."""
    out = []
    for g in iter_U_fix(F, c, ball):
        out.append(g)
        if len(out) > cap:
            raise CapExceeded(f"more than {cap} germs")
    return len(out), out


def count_U_fix_formula(F, c, ball):
    """``|F| * prod |F_(c(e_v))|`` over non-root interior vertices (legal ``c``)."""
    stab = {}
    total = F.order()
    for v in ball.within(ball.root, ball.radius - 1):
        if v == ball.root:
            continue
        a = c.colors[ball.up[v]]
        if a not in stab:
            stab[a] = len(F.transporters(a, a))
        total *= stab[a]
    return total


def root_fixing_automorphisms(ball, cap=DEFAULT_CAP):
    """Every automorphism of the ball fixing the root, by permuting children.

    Coloring-free: used as the brute-force oracle for :func:`enumerate_U_fix`.
    """
    gr = ball.graph
    rev = gr.reversal
    interior = ball.within(ball.root, ball.radius - 1)
    count = 1
    for v in interior:
        count *= _factorial(len(ball.children(v)))
    if count > cap:
        raise CapExceeded(f"{count} automorphisms exceed cap {cap}")

    def extend(idx, vm, em):
        if idx == len(interior):
            yield BallGerm(ball, ball.root, ball.root, ball.radius, dict(vm), dict(em), interior)
            return
        v = interior[idx]
        src = ball.children(v)
        dst = ball.children(vm[v])
        for perm in itertools.permutations(dst):
            for e, f in zip(src, perm):
                em[e], em[rev[e]] = f, rev[f]
                vm[gr.terminal(e)] = gr.terminal(f)
            yield from extend(idx + 1, vm, em)
        for e in src:
            del em[e], em[rev[e]], vm[gr.terminal(e)]

    yield from extend(0, {ball.root: ball.root}, {})


def _factorial(n):
    out = 1
    for i in range(2, n + 1):
        out *= i
    return out


# -- Busemann values -------------------------------------------------------------

def _check_ray(ball, ray):
    for i in range(len(ray) - 1):
        if ball.distance(ray[i], ray[i + 1]) != 1:
            raise HypothesisViolated(f"ray steps {ray[i]} -> {ray[i + 1]} are not adjacent")
        if i and ray[i + 1] == ray[i - 1]:
            raise HypothesisViolated("ray backtracks")


def busemann_values(g, ray):
    """``d(g(x_i), x_0) - i`` for every ray vertex inside the domain."""
    ball = g.ball
    _check_ray(ball, ray)
    return [
        (i, ball.distance(g.vertex_map[x], ray[0]) - i)
        for i, x in enumerate(ray)
        if x in g.vertex_map
    ]


def busemann(g, ray, window=2):
    """Stabilized Busemann value; the identity has value 0."""
    vals = busemann_values(g, ray)
    tail = [v for _, v in vals[-window:]]
    if len(tail) < window or len(set(tail)) != 1:
        raise NotStabilized(f"values {[v for _, v in vals]} do not stabilize over {window} steps")
    return tail[0]


def _least_with(group, pairs):
    for x in group.elements():
        if all(x.images[a] == b for a, b in pairs):
            return x
    raise EmptyCoset(f"no element satisfies {pairs}")


def shift_germ(ball, ray, source_index, step, c=None, group=None):
    """Germ sending ``ray[i]`` to ``ray[i + step]`` around ``ray[source_index]``.

    Local permutations are the least elements of ``group`` (default the full
    symmetric group) that keep the ray on itself.
    """
    c = ball.canonical if c is None else c
    group = ball.sym() if group is None else group
    _check_ray(ball, ray)
    pos = {x: i for i, x in enumerate(ray)}
    s = ray[source_index]
    t = ray[source_index + step]
    k = ball.max_radius(s, t)
    gr = ball.graph

    def choose(v, gv, forced):
        pairs = [] if forced is None else [forced]
        i = pos.get(v)
        if i is not None:
            for j in (i - 1, i + 1):
                if 0 <= j < len(ray) and 0 <= j + step < len(ray) and 0 <= i + step < len(ray):
                    e = gr.edge_between(v, ray[j])
                    f = gr.edge_between(ray[i + step], ray[j + step])
                    pairs.append((c.colors[e], c.colors[f]))
        return _least_with(group, pairs)

    return build_germ(ball, c, s, t, k, choose)


def root_ray(ball, colors=None):
    """Ray from the root following the given colors (default: always the least allowed)."""
    ray = [ball.root]
    c = ball.canonical
    for i in range(ball.radius):
        v = ray[-1]
        options = ball.children(v)
        if colors is not None:
            e = c.edge_of(v, colors[i])
            if e not in options:
                raise HypothesisViolated("ray would backtrack")
        else:
            e = min(options, key=lambda x: c.colors[x])
        ray.append(ball.graph.terminal(e))
    return ray


# -- local conditions --------------------------------------------------------------

def fixator_condition(F):
    """Each point stabilizer fixes some other point."""
    elems = F.elements()
    for i in range(F.degree):
        stab = [x for x in elems if x.images[i] == i]
        if not any(all(x.images[j] == j for x in stab) for j in range(F.degree) if j != i):
            return False
    return True


@dataclass
class AuditEntry:
    index: int
    edge: int
    inverted: bool
    colors: tuple


def unique_fixed_point_audit(F, germs, c, fixed=None):
    """For germs moving the root across an edge of the fixed color, check the edge is inverted.

    Returns ``(ok, entries)``; germs that do not move the root across such an
    edge are ignored.
    """
    if fixed is None:
        fps = [i for i in range(F.degree) if all(x.images[i] == i for x in F.generators)]
        if len(fps) != 1:
            raise HypothesisViolated("F must have a unique fixed point")
        fixed = fps[0]
    entries = []
    for n, g in enumerate(germs):
        gr = g.graph
        root = g.source
        e = c.edge_of(root, fixed)
        if g.vertex_map.get(root) != gr.terminal(e) or e not in g.edge_map:
            continue
        inverted = g.edge_map[e] == gr.reversal[e]
        entries.append(AuditEntry(n, e, inverted, (c.colors[e], c.colors[gr.reversal[e]])))
    return all(x.inverted for x in entries), entries


def random_germ_pair(ball, c, rng, F=None, reach=1):
    """Composable pair ``(g, h)``: ``h`` starts at the root, ``g`` starts at ``h``'s target."""
    F = ball.sym() if F is None else F
    near = ball.within(ball.root, reach)
    t1 = rng.choice(near)
    h = sample_U(F, c, ball, t1, rng)
    t2 = rng.choice(near)
    g = sample_U(F, c, ball, t2, rng, source=t1)
    return g, h
