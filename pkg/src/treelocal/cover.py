"""Universal covers of finite graphs, truncated at a radius, and lifts of automorphisms.

Cover vertices are reduced (non-backtracking) edge paths leaving the
basepoint.  A path stops growing at the radius or when it reaches a boundary
vertex of the base.
"""

from __future__ import annotations

from dataclasses import dataclass

from .coloring import lift_coloring, local_action
from .errors import BadChoice, SizeExceeded
from .perm import DEFAULT_CAP
from .sgraph import GraphMorphism, PartialMap, Report, SerreGraph


@dataclass(eq=False)
class CoverBundle:
    base: SerreGraph
    total: SerreGraph
    phi: GraphMorphism
    basepoint: object
    radius: int
    paths: dict  # cover vertex -> edge path
    index: dict  # edge path -> cover vertex
    edge_over: dict  # (cover vertex, base edge) -> cover edge

    def end(self, path):
        return self.basepoint if not path else self.base.terminal(path[-1])

    def fibre(self, base_vertex):
        return [x for x, w in self.phi.vertex_map.items() if w == base_vertex]


def universal_cover(g, basepoint, radius, cap=DEFAULT_CAP):
    """Ball of radius ``radius`` around the basepoint in the universal cover of ``g``."""
    g.out_edges(basepoint)  # raises UnknownVertex
    paths = [()]
    index = {(): 0}
    frontier = [()]
    for _ in range(radius):
        nxt = []
        for path in frontier:
            end = basepoint if not path else g.terminal(path[-1])
            if end in g.boundary:
                continue
            back = g.reversal[path[-1]] if path else None
            for e in g.out_edges(end):
                if e == back:
                    continue
                q = path + (e,)
                index[q] = len(paths)
                paths.append(q)
                nxt.append(q)
                if len(paths) > cap:
                    raise SizeExceeded(f"cover ball exceeds {cap} vertices")
        frontier = nxt
    origin, rev = {}, {}
    vm, em = {}, {}
    edge_over = {}
    for x, path in enumerate(paths):
        vm[x] = basepoint if not path else g.terminal(path[-1])
        if not path:
            continue
        parent = index[path[:-1]]
        e = len(origin)
        origin[e], origin[e + 1] = parent, x
        rev[e], rev[e + 1] = e + 1, e
        em[e], em[e + 1] = path[-1], g.reversal[path[-1]]
        edge_over[(parent, path[-1])] = e
        edge_over[(x, g.reversal[path[-1]])] = e + 1
    boundary = [x for x, path in enumerate(paths) if len(path) == radius or vm[x] in g.boundary]
    labels = {x: path for x, path in enumerate(paths)}
    total = SerreGraph(range(len(paths)), origin, rev, boundary, labels)
    phi = GraphMorphism(total, g, vm, em)
    return CoverBundle(g, total, phi, basepoint, radius, dict(enumerate(paths)), index, edge_over)


def _reduce_append(path, e, rev):
    if path and path[-1] == rev[e]:
        return path[:-1]
    return path + (e,)


def lift(g, bundle, choice):
    """Lift a base (partial) automorphism ``g`` to the cover.

    ``choice`` is a cover vertex over ``g(basepoint)``; the lift sends the
    path ``P`` to the reduction of ``choice`` followed by ``g(P)``.  It is
    defined on paths of length at most ``radius - len(choice)`` whose edges
    all lie in the domain of ``g``.
    """
    base = bundle.base
    if choice not in bundle.paths:
        raise BadChoice(f"{choice!r} is not a cover vertex")
    gb = g.vertex_map.get(bundle.basepoint)
    if gb is None or bundle.phi.vertex_map[choice] != gb:
        raise BadChoice("choice does not lie over the image of the basepoint")
    q0 = bundle.paths[choice]
    limit = bundle.radius - len(q0)
    rev = base.reversal
    image = {(): q0}
    order = [()]
    for path in order:
        if len(path) >= limit:
            continue
        x = bundle.index[path]
        if x in bundle.total.boundary:
            continue
        end = bundle.end(path)
        back = rev[path[-1]] if path else None
        for e in base.out_edges(end):
            if e == back or e not in g.edge_map:
                continue
            q = path + (e,)
            img = _reduce_append(image[path], g.edge_map[e], rev)
            if q not in bundle.index or img not in bundle.index:
                continue
            image[q] = img
            order.append(q)
    vm = {bundle.index[p]: bundle.index[q] for p, q in image.items()}
    em = {}
    for p in order[1:]:
        parent = p[:-1]
        e = p[-1]
        src = bundle.edge_over[(bundle.index[parent], e)]
        dst = bundle.edge_over[(vm[bundle.index[parent]], g.edge_map[e])]
        em[src] = dst
        em[bundle.total.reversal[src]] = bundle.total.reversal[dst]
    return PartialMap(bundle.total, vm, em)


def diagram_report(bundle, g, lifted):
    """``phi ∘ G == g ∘ phi`` on every vertex and edge of the lift's domain."""
    pv, pe = bundle.phi.vertex_map, bundle.phi.edge_map
    for x, y in lifted.vertex_map.items():
        if pv[y] != g.vertex_map.get(pv[x]):
            return Report((f"vertex square fails at {x}",))
    for e, f in lifted.edge_map.items():
        if pe[f] != g.edge_map.get(pe[e]):
            return Report((f"edge square fails at {e}",))
    return Report()


@dataclass
class SigmaLiftReport:
    checked: int
    mismatches: list

    @property
    def ok(self):
        return not self.mismatches

    @property
    def first(self):
        return self.mismatches[0] if self.mismatches else None


def check_sigma_lift(bundle, c, g, lifted, lifted_coloring=None):
    """Compare ``σ_{c̃}(G, v)`` with ``σ_c(g, φ(v))`` at every interior cover vertex where both exist."""
    ct = lift_coloring(c, bundle.phi) if lifted_coloring is None else lifted_coloring
    total = bundle.total
    checked = 0
    bad = []
    for v in sorted(lifted.vertex_map):
        if v in total.boundary or not lifted.star_defined(v):
            continue
        w = bundle.phi.vertex_map[v]
        if not g.star_defined(w) or w not in c.regular or g.vertex_map[w] not in c.regular:
            continue
        up = local_action(lifted, v, ct)
        down = local_action(g, w, c)
        checked += 1
        if up != down:
            bad.append((v, str(up), str(down)))
    return SigmaLiftReport(checked, bad)


def deck_check(bundle, lift1, lift2):
    """``G1 ∘ G2^{-1}`` commutes with the projection (a lift of the identity)."""
    d = lift1.compose(lift2.inverse())
    pv = bundle.phi.vertex_map
    return all(pv[x] == pv[y] for x, y in d.vertex_map.items()), d
