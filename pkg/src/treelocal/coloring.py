"""Edge colorings, their local actions, legalization and lifting.

A coloring of degree ``d`` assigns a color in ``0..d-1`` to every directed
edge.  At an interior vertex the colors of the outgoing edges are either a
bijection onto ``0..d-1`` (a *regular* vertex) or constant (*singular*).
Boundary vertices are exempt from that dichotomy.
"""

from __future__ import annotations

import random
from functools import cached_property

from .errors import BadTransporter, FormatError, HypothesisViolated, NoTransporter, NotCovering, OutOfDomain, SingularVertex
from .perm import Permutation, orbits
from .sgraph import PartialMap, Report, is_forest


class Coloring:
    def __init__(self, graph, degree, colors, regular=None):
        self.graph = graph
        self.degree = degree
        self.colors = dict(colors)
        if regular is None:
            regular = [v for v in graph.interior() if self._bijective_at(v)]
        self.regular = frozenset(regular)

    def _bijective_at(self, v):
        cols = [self.colors.get(e) for e in self.graph.out_edges(v)]
        return sorted(cols) == list(range(self.degree))

    def __getitem__(self, e):
        return self.colors[e]

    def at(self, v):
        return {e: self.colors[e] for e in self.graph.out_edges(v)}

    @cached_property
    def _edge_of(self):
        table = {}
        for v in self.regular:
            row = [None] * self.degree
            for e in self.graph.out_edges(v):
                row[self.colors[e]] = e
            table[v] = tuple(row)
        return table

    def edge_of(self, v, color):
        """The edge at regular vertex ``v`` carrying ``color``."""
        try:
            return self._edge_of[v][color]
        except KeyError:
            raise SingularVertex(f"vertex {v!r} is not regular") from None

    def recolored(self, perm):
        """Compose every color with ``perm``."""
        return Coloring(self.graph, self.degree, {e: perm.images[c] for e, c in self.colors.items()}, self.regular)

    def to_json(self):
        return {
            "color_degree": self.degree,
            "colors": {str(e): c for e, c in sorted(self.colors.items())},
            "regular": sorted(self.regular),
        }


def coloring_from_json(graph, data):
    try:
        colors = {int(k): int(v) for k, v in data["colors"].items()}
        degree = int(data.get("color_degree", max(colors.values(), default=-1) + 1))
    except (KeyError, TypeError, ValueError, AttributeError) as exc:
        raise FormatError(f"malformed coloring: {exc}") from exc
    return Coloring(graph, degree, colors, data.get("regular"))


def validate_coloring(c):
    """Check totality, range, and the regular/singular dichotomy."""
    g = c.graph
    for e in g.edges:
        if e not in c.colors:
            return Report((f"edge {e} is uncolored",))
        if not 0 <= c.colors[e] < c.degree:
            return Report((f"edge {e} has color {c.colors[e]} outside 0..{c.degree - 1}",))
    for v in c.regular:
        if v in g.boundary:
            return Report((f"boundary vertex {v} is declared regular",))
        if not c._bijective_at(v):
            return Report((f"vertex {v} is declared regular but its colors are not a bijection",))
    for v in g.interior():
        if v in c.regular:
            continue
        cols = {c.colors[e] for e in g.out_edges(v)}
        if len(cols) > 1:
            return Report((f"vertex {v} is neither regular nor constant",))
    return Report()


def illegal_edges(c):
    return [e for e in c.graph.edges if c.colors[e] != c.colors[c.graph.reversal[e]]]


def is_legal(c):
    """``c(e) == c(reversal(e))`` on every edge."""
    return not illegal_edges(c)


def local_action(g, v, c):
    """The color permutation ``c_{g(v)} ∘ g ∘ c_v^{-1}``.

    ``g`` is any partial automorphism of ``c.graph`` defined on ``E(v)``.
    """
    if v not in g.vertex_map or not g.star_defined(v):
        raise OutOfDomain(f"E({v!r}) is not inside the domain")
    gv = g.vertex_map[v]
    if v not in c.regular or gv not in c.regular:
        raise SingularVertex(f"{v!r} or its image {gv!r} is not regular")
    em, col = g.edge_map, c.colors
    row = c._edge_of[v]
    return Permutation._trusted(tuple([col[em[row[i]]] for i in range(c.degree)]))


def _bfs_tree(graph, root):
    """BFS order and the edge pointing from each non-root vertex to its parent."""
    up = {}
    order = [root]
    seen = {root}
    for x in order:
        for e in graph.out_edges(x):
            y = graph.terminal(e)
            if y not in seen:
                seen.add(y)
                up[y] = graph.reversal[e]
                order.append(y)
    return order, up


def _require_tree(graph):
    if not (is_forest(graph) and graph.is_connected()):
        raise HypothesisViolated("legalization needs a tree")


def legalize_general(c, group, root):
    """Root-anchored recoloring by transporters of ``group``.

    Proceeding outward from ``root``, every vertex ``v`` gets a multiplier
    ``m_v`` in ``group`` and its edges are recolored ``d(f) = m_v(c(f))``,
    where ``m_v = m_parent ∘ g`` and ``g`` is the least element of ``group``
    taking ``c(e_v)`` to ``c(reversal(e_v))``.  Boundary edges are set equal
    to their reversal.
    """
    graph = c.graph
    _require_tree(graph)
    order, up = _bfs_tree(graph, root)
    ident = Permutation.identity(c.degree)
    mult = {root: ident}
    d = {e: c.colors[e] for e in graph.out_edges(root)}
    for v in order[1:]:
        ev = up[v]
        if v in graph.boundary:
            d[ev] = d[graph.reversal[ev]]
            mult[v] = ident
            continue
        i, j = c.colors[ev], c.colors[graph.reversal[ev]]
        cands = group.transporters(i, j)
        if not cands:
            raise NoTransporter(f"no element maps color {i} to {j} (edge {ev})")
        m = mult[graph.terminal(ev)] * cands[0]
        mult[v] = m
        for f in graph.out_edges(v):
            d[f] = m.images[c.colors[f]]
    return Coloring(graph, c.degree, d, c.regular)


def legalize_cp(c, group, root=None):
    """Legal recoloring for a group fixing 0 and transitive on the rest.

    Requires ``c(e) == 0 => c(reversal(e)) == 0``.  A vertex whose parent
    edge is colored 0 keeps its colors; otherwise its colors are moved by the
    least element of ``group`` taking ``c(e_v)`` to the (already final)
    color of the parent edge.
    """
    graph = c.graph
    if group.degree < 2 or not transitive_on_rest(group):
        raise HypothesisViolated("group must fix 0 and be transitive on 1..n-1")
    for e in graph.edges:
        if c.colors[e] == 0 and c.colors[graph.reversal[e]] != 0:
            raise HypothesisViolated(f"edge {e} has color 0 but its reversal does not")
    _require_tree(graph)
    if root is None:
        root = graph.vertices[0]
    order, up = _bfs_tree(graph, root)
    d = {e: c.colors[e] for e in graph.out_edges(root)}
    for v in order[1:]:
        ev = up[v]
        j = d[graph.reversal[ev]]
        if v in graph.boundary:
            d[ev] = j
            continue
        if j == 0:
            for f in graph.out_edges(v):
                d[f] = c.colors[f]
            continue
        k = c.colors[ev]
        cands = group.transporters(k, j)
        if not cands:
            raise NoTransporter(f"no element maps color {k} to {j}")
        m = cands[0]
        for f in graph.out_edges(v):
            d[f] = m.images[c.colors[f]]
    return Coloring(graph, c.degree, d, c.regular)


def induce_from_vertex(graph, v, k, transporters, degree=None):
    """Spread a bijection ``k: E(v) -> colors`` along transporters ``h_w``.

    ``transporters[w]`` is a partial automorphism with ``h_w(w) == v``.
    Vertices with a transporter become regular with colors ``k(h_w(e))``;
    every other vertex gets the constant color 0.
    """
    degree = len(graph.out_edges(v)) if degree is None else degree
    if sorted(k[e] for e in graph.out_edges(v)) != list(range(degree)):
        raise HypothesisViolated("k must be a bijection from E(v) onto the colors")
    hs = dict(transporters)
    if v in hs:
        hv = hs[v]
        if any(hv.edge_map.get(e) != e for e in graph.out_edges(v)):
            raise BadTransporter("the transporter of v itself must be the identity")
    else:
        hs[v] = PartialMap(graph, {v: v}, {e: e for e in graph.out_edges(v)})
    colors = {}
    for w, h in hs.items():
        if h.vertex_map.get(w) != v:
            raise BadTransporter(f"transporter of {w!r} does not send it to {v!r}")
        if not h.star_defined(w):
            raise BadTransporter(f"transporter of {w!r} is not defined on E({w!r})")
        for e in graph.out_edges(w):
            colors[e] = k[h.edge_map[e]]
    for e in graph.edges:
        colors.setdefault(e, 0)
    return Coloring(graph, degree, colors, hs.keys())


def check_covering(phi):
    """Raise NotCovering unless ``phi`` is locally bijective on interior stars."""
    rep = phi.check()
    if not rep.ok:
        raise NotCovering(rep.first)
    src, dst = phi.source, phi.target
    for x in src.vertices:
        if x not in phi.vertex_map:
            raise NotCovering(f"vertex {x!r} is not mapped")
        if x in src.boundary:
            continue
        image = [phi.edge_map.get(e) for e in src.out_edges(x)]
        if None in image or sorted(image) != sorted(dst.out_edges(phi.vertex_map[x])):
            raise NotCovering(f"not a bijection on E({x!r})")


def lift_coloring(c, phi):
    """Pull ``c`` back along a covering map ``phi: total -> c.graph``."""
    check_covering(phi)
    total = phi.source
    colors = {e: c.colors[f] for e, f in phi.edge_map.items()}
    regular = [x for x in total.interior() if phi.vertex_map[x] in c.regular]
    return Coloring(total, c.degree, colors, regular)


def random_tree_coloring(graph, degree, root, rng=None, symmetric=(0,), classes=None):
    """Random regular coloring of a tree ball whose edge pairs stay inside ``classes``.

    ``c(e)`` and ``c(ē)`` always lie in one class.  By default every color in
    ``symmetric`` is its own class and the remaining colors form one class,
    so ``c(e) = s <=> c(ē) = s`` for ``s`` in ``symmetric``.
    """
    rng = rng if rng is not None else random.Random(0)
    if classes is None:
        sym = sorted(set(symmetric))
        classes = [(s,) for s in sym] + [tuple(x for x in range(degree) if x not in sym)]
    cls = {x: tuple(part) for part in classes for x in part}
    order, up = _bfs_tree(graph, root)
    colors = {}
    for v in order:
        edges = list(graph.out_edges(v))
        if v == root:
            cols = list(range(degree))
            rng.shuffle(cols)
            colors.update(zip(edges, cols))
            continue
        ev = up[v]
        first = rng.choice(cls[colors[graph.reversal[ev]]])
        colors[ev] = first
        rest = [x for x in range(degree) if x != first]
        rng.shuffle(rest)
        colors.update(zip([e for e in edges if e != ev], rest))
    return Coloring(graph, degree, colors)


def transitive_on_rest(group):
    """Group fixes 0 and permutes 1..n-1 transitively."""
    return all(g.images[0] == 0 for g in group.generators) and orbits(group) == [(0,), tuple(range(1, group.degree))]


__all__ = [
    "Coloring",
    "coloring_from_json",
    "validate_coloring",
    "is_legal",
    "illegal_edges",
    "local_action",
    "legalize_general",
    "legalize_cp",
    "induce_from_vertex",
    "lift_coloring",
    "check_covering",
    "random_tree_coloring",
    "transitive_on_rest",
]
