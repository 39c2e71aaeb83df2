"""Pure-Python reference kernels.

Permutations are tuples of images; ``a∘b`` means apply ``b`` first.
The compiled module ``_kernel_cy`` exposes the same three functions.
"""


def closure(gens, degree, cap):
    """All products of ``gens`` in breadth-first order, identity first.

    Returns ``None`` as soon as more than ``cap`` elements are found.
    """
    ident = tuple(range(degree))
    seen = {ident}
    out = [ident]
    i = 0
    while i < len(out):
        x = out[i]
        i += 1
        for g in gens:
            y = tuple([x[j] for j in g])
            if y not in seen:
                if len(out) >= cap:
                    return None
                seen.add(y)
                out.append(y)
    return out


def mult_table(elements):
    """Row ``i``, column ``j`` holds the index of ``elements[i]∘elements[j]``."""
    index = {e: i for i, e in enumerate(elements)}
    return [[index[tuple([a[k] for k in b])] for b in elements] for a in elements]


def table_closure(table, gens, identity=0):
    """Sorted element indices of the subgroup generated by ``gens``."""
    seen = {identity}
    queue = [identity]
    for x in queue:
        row = table[x]
        for g in gens:
            y = row[g]
            if y not in seen:
                seen.add(y)
                queue.append(y)
    return sorted(seen)
