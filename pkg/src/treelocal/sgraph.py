"""Serre graphs: directed edges with an origin map and a reversal involution.

A finite piece of an infinite graph (a ball in a tree, a blow-up of such a
ball) carries a designated set of *boundary* vertices.  Degree and
regularity checks only look at interior vertices.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

from .errors import EdgeInversion, FormatError, NotAutomorphism, OutOfDomain, UnknownVertex


@dataclass(frozen=True)
class Report:
    """Outcome of a validation pass; ``problems`` is empty when ok."""

    problems: tuple = ()

    @property
    def ok(self):
        return not self.problems

    @property
    def first(self):
        return self.problems[0] if self.problems else None

    def __bool__(self):
        return self.ok


class SerreGraph:
    """Vertex ids, edge ids, ``origin[e]`` and ``reversal[e]``.

    The constructor stores whatever it is given; :func:`validate` checks the
    invariants.  ``labels`` is free-form per-vertex metadata.
    """

    def __init__(self, vertices, origin, reversal, boundary=(), labels=None):
        self.vertices = tuple(vertices)
        self.origin = dict(origin)
        self.reversal = dict(reversal)
        self.boundary = frozenset(boundary)
        self.labels = dict(labels or {})

    @property
    def edges(self):
        return tuple(self.origin)

    def terminal(self, e):
        return self.origin[self.reversal[e]]

    @cached_property
    def _vertex_set(self):
        return frozenset(self.vertices)

    @cached_property
    def _out(self):
        out = {v: [] for v in self.vertices}
        for e, v in self.origin.items():
            out.setdefault(v, []).append(e)
        return {v: tuple(sorted(es)) for v, es in out.items()}

    def out_edges(self, v):
        try:
            return self._out[v]
        except KeyError:
            raise UnknownVertex(f"unknown vertex {v!r}") from None

    def degree(self, v):
        return len(self.out_edges(v))

    def interior(self):
        return [v for v in self.vertices if v not in self.boundary]

    def is_regular(self, d):
        return all(self.degree(v) == d for v in self.interior())

    def undirected_edges(self):
        """One representative (the smaller id) per reversal pair."""
        return [e for e in self.origin if e < self.reversal[e]]

    def neighbors(self, v):
        return [self.terminal(e) for e in self.out_edges(v)]

    def edge_between(self, u, v):
        for e in self.out_edges(u):
            if self.terminal(e) == v:
                return e
        return None

    def distances_from(self, v):
        """Breadth-first distances from ``v`` in the underlying graph."""
        dist = {v: 0}
        queue = [v]
        for x in queue:
            for e in self.out_edges(x):
                y = self.terminal(e)
                if y not in dist:
                    dist[y] = dist[x] + 1
                    queue.append(y)
        return dist

    def is_connected(self):
        if not self.vertices:
            return True
        return len(self.distances_from(self.vertices[0])) == len(self.vertices)

    def __repr__(self):
        return f"SerreGraph(|V|={len(self.vertices)}, |E|={len(self.origin)})"


class GraphBuilder:
    """Incremental construction with fresh integer ids."""

    def __init__(self):
        self.vertices = []
        self.origin = {}
        self.reversal = {}
        self.boundary = set()
        self.labels = {}

    def add_vertex(self, label=None, boundary=False):
        v = len(self.vertices)
        self.vertices.append(v)
        if label is not None:
            self.labels[v] = label
        if boundary:
            self.boundary.add(v)
        return v

    def add_edge(self, u, v):
        """Add the pair ``u -> v`` and ``v -> u``; return both ids."""
        e = len(self.origin)
        self.origin[e] = u
        self.origin[e + 1] = v
        self.reversal[e] = e + 1
        self.reversal[e + 1] = e
        return e, e + 1

    def build(self):
        return SerreGraph(self.vertices, self.origin, self.reversal, self.boundary, self.labels)


def validate(g):
    """Check the Serre graph axioms; report the first failure."""
    vset = set(g.vertices)
    if len(vset) != len(g.vertices):
        return Report(("duplicate vertex ids",))
    if not set(g.boundary) <= vset:
        return Report(("boundary vertex not in graph",))
    if set(g.reversal) != set(g.origin):
        return Report(("reversal not defined on every edge",))
    for e in g.origin:
        if g.origin[e] not in vset:
            return Report((f"edge {e} has unknown origin {g.origin[e]!r}",))
        r = g.reversal[e]
        if r == e:
            return Report((f"fixed edge under reversal: {e}",))
        if r not in g.reversal or g.reversal[r] != e:
            return Report((f"reversal is not an involution at edge {e}",))
    return Report()


# -- morphisms ----------------------------------------------------------------

@dataclass
class GraphMorphism:
    """A pair of maps ``V -> V'`` and ``E -> E'`` (possibly partial)."""

    source: SerreGraph
    target: SerreGraph
    vertex_map: dict
    edge_map: dict

    def check(self):
        """Report violations of origin/reversal compatibility where defined."""
        problems = []
        for e, f in self.edge_map.items():
            o = self.source.origin[e]
            if o in self.vertex_map and self.vertex_map[o] != self.target.origin[f]:
                problems.append(f"origin not preserved at edge {e}")
                break
            r = self.source.reversal[e]
            if r in self.edge_map and self.edge_map[r] != self.target.reversal[f]:
                problems.append(f"reversal not preserved at edge {e}")
                break
        return Report(tuple(problems))


class PartialMap:
    """A partial automorphism of one graph: injective vertex and edge maps.

    Edge maps are kept closed under reversal, so an edge is in the domain
    exactly when its reversal is.
    """

    def __init__(self, graph, vertex_map, edge_map):
        self.graph = graph
        self.vertex_map = vertex_map
        self.edge_map = edge_map

    def __call__(self, v):
        try:
            return self.vertex_map[v]
        except KeyError:
            raise OutOfDomain(f"vertex {v!r} outside the domain") from None

    def edge(self, e):
        try:
            return self.edge_map[e]
        except KeyError:
            raise OutOfDomain(f"edge {e!r} outside the domain") from None

    def star_defined(self, v):
        return v in self.vertex_map and all(e in self.edge_map for e in self.graph.out_edges(v))

    def compose(self, other):
        """``self ∘ other`` on the set where both steps are defined."""
        vm = {x: self.vertex_map[y] for x, y in other.vertex_map.items() if y in self.vertex_map}
        em = {x: self.edge_map[y] for x, y in other.edge_map.items() if y in self.edge_map}
        return PartialMap(self.graph, vm, em)

    def inverse(self):
        return PartialMap(
            self.graph,
            {y: x for x, y in self.vertex_map.items()},
            {y: x for x, y in self.edge_map.items()},
        )

    def restrict(self, vertices):
        vs = set(vertices)
        vm = {v: w for v, w in self.vertex_map.items() if v in vs}
        o, t = self.graph.origin, self.graph.terminal
        em = {e: f for e, f in self.edge_map.items() if o[e] in vs and t(e) in vs}
        return PartialMap(self.graph, vm, em)

    def inverts_some_edge(self):
        r = self.graph.reversal
        return [e for e, f in self.edge_map.items() if f == r[e]]

    def as_morphism(self):
        return GraphMorphism(self.graph, self.graph, self.vertex_map, self.edge_map)

    def same_on(self, other, vertices=None):
        keys = self.vertex_map.keys() & other.vertex_map.keys()
        if vertices is not None:
            keys &= set(vertices)
        return all(self.vertex_map[k] == other.vertex_map[k] for k in keys)

    def to_json(self):
        return {
            "vertex_map": {str(k): v for k, v in sorted(self.vertex_map.items())},
            "edge_map": {str(k): v for k, v in sorted(self.edge_map.items())},
        }

    @classmethod
    def identity(cls, graph, vertices=None):
        vs = graph.vertices if vertices is None else vertices
        return cls(graph, {v: v for v in vs}, {e: e for e in graph.edges}).restrict(vs)


def check_automorphism(g, move):
    """Raise NotAutomorphism unless ``move`` is a full automorphism of ``g``."""
    vm, em = move.vertex_map, move.edge_map
    if set(vm) != set(g.vertices) or set(vm.values()) != set(g.vertices):
        raise NotAutomorphism("vertex map is not a bijection of the vertex set")
    if set(em) != set(g.origin) or set(em.values()) != set(g.origin):
        raise NotAutomorphism("edge map is not a bijection of the edge set")
    for e, f in em.items():
        if vm[g.origin[e]] != g.origin[f]:
            raise NotAutomorphism(f"origin not preserved at edge {e}")
        if em[g.reversal[e]] != g.reversal[f]:
            raise NotAutomorphism(f"reversal not preserved at edge {e}")


# -- forests, quotients, subdivision ------------------------------------------

class _UnionFind:
    def __init__(self, items):
        self.parent = {x: x for x in items}

    def find(self, x):
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        if rb < ra:
            ra, rb = rb, ra
        self.parent[rb] = ra
        return True


def is_forest(g):
    """No cycle in the underlying undirected multigraph (loops count)."""
    uf = _UnionFind(g.vertices)
    for e in g.undirected_edges():
        if not uf.union(g.origin[e], g.terminal(e)):
            return False
    return True


def quotient(g, moves):
    """Quotient by the equivalence generated by ``moves`` (automorphisms).

    Classes are labelled by their least member.  Returns the quotient graph
    and the projection morphism.  Raises EdgeInversion when some edge is
    identified with its own reversal.
    """
    for m in moves:
        check_automorphism(g, m)
    vuf = _UnionFind(g.vertices)
    euf = _UnionFind(g.edges)
    for m in moves:
        for v, w in m.vertex_map.items():
            vuf.union(v, w)
        for e, f in m.edge_map.items():
            euf.union(e, f)
    for e in g.edges:
        if euf.find(e) == euf.find(g.reversal[e]):
            raise EdgeInversion(f"edge {e} is identified with its reversal")
    vmap = {v: vuf.find(v) for v in g.vertices}
    emap = {e: euf.find(e) for e in g.edges}
    qv = sorted(set(vmap.values()))
    qorigin = {}
    qrev = {}
    for e in sorted(set(emap.values())):
        qorigin[e] = vmap[g.origin[e]]
        qrev[e] = emap[g.reversal[e]]
    members = {}
    for v, c in vmap.items():
        members.setdefault(c, []).append(v)
    qboundary = [c for c, vs in members.items() if all(v in g.boundary for v in vs)]
    q = SerreGraph(qv, qorigin, qrev, qboundary)
    return q, GraphMorphism(g, q, vmap, emap)


def barycentric_subdivision(g):
    """Insert a midpoint on every undirected edge.

    Each directed edge ``e`` becomes the half-edge ``2e`` from ``o(e)`` to the
    midpoint, with reversal ``2e+1``.  Returns the subdivision and the vertex
    embedding (old vertices keep their ids).
    """
    nxt = max(g.vertices, default=-1) + 1
    mid = {}
    for e in sorted(g.undirected_edges()):
        mid[e] = mid[g.reversal[e]] = nxt
        nxt += 1
    origin, rev = {}, {}
    for e in g.edges:
        origin[2 * e] = g.origin[e]
        origin[2 * e + 1] = mid[e]
        rev[2 * e] = 2 * e + 1
        rev[2 * e + 1] = 2 * e
    verts = list(g.vertices) + sorted(set(mid.values()))
    labels = {m: ("mid", e) for e, m in mid.items() if e < g.reversal[e]}
    sub = SerreGraph(verts, origin, rev, g.boundary, labels)
    return sub, {v: v for v in g.vertices}


def subdivide_map(sub, pm, midpoints=None):
    """Transport a partial automorphism of ``g`` to its subdivision ``sub``."""
    g = pm.graph
    if midpoints is None:
        midpoints = {e: sub.origin[2 * e + 1] for e in g.edges}
    vm = dict(pm.vertex_map)
    em = {}
    for e, f in pm.edge_map.items():
        vm[midpoints[e]] = midpoints[f]
        em[2 * e] = 2 * f
        em[2 * e + 1] = 2 * f + 1
    return PartialMap(sub, vm, em)


# -- serialization -------------------------------------------------------------

def to_json(g, coloring=None):
    out = {
        "vertices": list(g.vertices),
        "edges": [{"id": e, "origin": g.origin[e], "reversal": g.reversal[e]} for e in sorted(g.origin)],
        "boundary": sorted(g.boundary),
    }
    if g.labels:
        out["label"] = {str(v): _jsonable(lbl) for v, lbl in sorted(g.labels.items())}
    if coloring is not None:
        out["color_degree"] = coloring.degree
        out["colors"] = {str(e): c for e, c in sorted(coloring.colors.items())}
        out["regular"] = sorted(coloring.regular)
    return out


def _jsonable(x):
    if isinstance(x, (tuple, list)):
        return [_jsonable(y) for y in x]
    return x


def from_json(data):
    try:
        origin = {int(e["id"]): e["origin"] for e in data["edges"]}
        rev = {int(e["id"]): e["reversal"] for e in data["edges"]}
        labels = {}
        for k, v in data.get("label", {}).items():
            labels[int(k)] = tuple(v) if isinstance(v, list) else v
        return SerreGraph(data["vertices"], origin, rev, data.get("boundary", ()), labels)
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError(f"malformed graph JSON: {exc}") from exc


def morphism_from_json(graph, data):
    try:
        vm = {int(k): v for k, v in data["vertex_map"].items()}
        em = {int(k): v for k, v in data["edge_map"].items()}
    except (KeyError, TypeError, ValueError, AttributeError) as exc:
        raise FormatError(f"malformed map JSON: {exc}") from exc
    return PartialMap(graph, vm, em)


def to_dot(g, coloring=None, name="G"):
    """Undirected DOT export; one line per reversal pair."""
    lines = [f"graph {name} {{"]
    for v in g.vertices:
        attrs = []
        if v in g.boundary:
            attrs.append("shape=box")
        if v in g.labels:
            attrs.append(f'label="{_dot_label(v, g.labels[v])}"')
        lines.append(f"  {v}" + (f" [{', '.join(attrs)}]" if attrs else "") + ";")
    for e in sorted(g.undirected_edges()):
        r = g.reversal[e]
        line = f"  {g.origin[e]} -- {g.terminal(e)}"
        if coloring is not None:
            line += f' [taillabel="{coloring.colors.get(e, "")}", headlabel="{coloring.colors.get(r, "")}"]'
        lines.append(line + ";")
    lines.append("}")
    return "\n".join(lines) + "\n"


def _dot_label(v, label):
    if isinstance(label, tuple):
        return f"{v}:" + ",".join(map(str, label))
    return f"{v}:{label}"
