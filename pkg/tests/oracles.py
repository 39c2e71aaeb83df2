"""Slow, direct reference computations shared by the test modules."""

from treelocal.perm import Permutation


def sigma_direct(g, v, c):
    """Local action by scanning E(v) for each color; no cached tables."""
    gr = c.graph
    gv = g.vertex_map[v]
    images = []
    for a in range(c.degree):
        e = next(e for e in gr.out_edges(v) if c.colors[e] == a)
        images.append(c.colors[g.edge_map[e]])
    assert sorted(images) == list(range(c.degree))
    assert gv == gr.origin[g.edge_map[e]]
    return Permutation(images)


def cocycle_failures(g, h, c):
    """Check both cocycle identities for the composable pair; return (checked, failures)."""
    gh = g * h
    checked, bad = 0, []
    for v in gh.inner:
        lhs = sigma_direct(gh, v, c)
        rhs = sigma_direct(g, h.vertex_map[v], c) * sigma_direct(h, v, c)
        checked += 1
        if lhs != rhs:
            bad.append(("product", v))
    ginv = g.inverse()
    for v in ginv.inner:
        lhs = sigma_direct(ginv, v, c)
        rhs = sigma_direct(g, ginv.vertex_map[v], c).inverse()
        checked += 1
        if lhs != rhs:
            bad.append(("inverse", v))
    return checked, bad


def brute_in_U(g, F, c):
    elems = {x.images for x in F.elements()}
    return all(sigma_direct(g, v, c).images in elems for v in g.inner)
