# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled kernels; drop-in replacements for ``_kernel_py``."""

from libc.stdlib cimport malloc, free
from libc.string cimport memcpy
from cpython.bytes cimport PyBytes_FromStringAndSize, PyBytes_AS_STRING

ctypedef unsigned short pt


cdef bytes _encode(tuple p, Py_ssize_t n):
    cdef bytes b = PyBytes_FromStringAndSize(NULL, n * sizeof(pt))
    cdef pt* buf = <pt*> PyBytes_AS_STRING(b)
    cdef Py_ssize_t i
    for i in range(n):
        buf[i] = <pt> p[i]
    return b


cdef tuple _decode(bytes b, Py_ssize_t n):
    cdef const pt* buf = <const pt*> PyBytes_AS_STRING(b)
    cdef Py_ssize_t i
    return tuple([buf[i] for i in range(n)])


def closure(gens, Py_ssize_t degree, Py_ssize_t cap):
    if degree > 65535:
        raise ValueError("degree too large for compiled kernel")
    cdef Py_ssize_t n = degree, ng = len(gens), i, j, k
    cdef pt* g = <pt*> malloc((ng * n + 1) * sizeof(pt))
    cdef pt* y = <pt*> malloc((n + 1) * sizeof(pt))
    cdef const pt* x
    cdef bytes xb, yb
    cdef dict seen = {}
    cdef list out = []
    try:
        for k in range(ng):
            gk = gens[k]
            for j in range(n):
                g[k * n + j] = <pt> gk[j]
        xb = _encode(tuple(range(n)), n)
        seen[xb] = None
        out.append(xb)
        i = 0
        while i < len(out):
            xb = out[i]
            x = <const pt*> PyBytes_AS_STRING(xb)
            i += 1
            for k in range(ng):
                for j in range(n):
                    y[j] = x[g[k * n + j]]
                yb = PyBytes_FromStringAndSize(<char*> y, n * sizeof(pt))
                if yb not in seen:
                    if len(out) >= cap:
                        return None
                    seen[yb] = None
                    out.append(yb)
        return [_decode(b, n) for b in out]
    finally:
        free(g)
        free(y)


def mult_table(elements):
    cdef Py_ssize_t m = len(elements), n, i, j, k
    if m == 0:
        return []
    n = len(elements[0])
    cdef pt* flat = <pt*> malloc((m * n + 1) * sizeof(pt))
    cdef pt* y = <pt*> malloc((n + 1) * sizeof(pt))
    cdef dict index = {}
    cdef list table = [], row
    try:
        for i in range(m):
            e = elements[i]
            for k in range(n):
                flat[i * n + k] = <pt> e[k]
            index[PyBytes_FromStringAndSize(<char*> &flat[i * n], n * sizeof(pt))] = i
        for i in range(m):
            row = [0] * m
            for j in range(m):
                for k in range(n):
                    y[k] = flat[i * n + flat[j * n + k]]
                row[j] = index[PyBytes_FromStringAndSize(<char*> y, n * sizeof(pt))]
            table.append(row)
        return table
    finally:
        free(flat)
        free(y)


def table_closure(table, gens, Py_ssize_t identity=0):
    # only the columns of the generators are needed: cols[k * m + x] = x∘gens[k]
    cdef Py_ssize_t m = len(table), ng = len(gens), head = 0, tail = 0, k, x, yv
    cdef int* cols = <int*> malloc((m * ng + 1) * sizeof(int))
    cdef char* seen = <char*> malloc(m + 1)
    cdef int* queue = <int*> malloc((m + 1) * sizeof(int))
    try:
        for x in range(m):
            row = table[x]
            seen[x] = 0
            for k in range(ng):
                cols[k * m + x] = row[gens[k]]
        seen[identity] = 1
        queue[tail] = identity
        tail += 1
        while head < tail:
            x = queue[head]
            head += 1
            for k in range(ng):
                yv = cols[k * m + x]
                if not seen[yv]:
                    seen[yv] = 1
                    queue[tail] = yv
                    tail += 1
        return [x for x in range(m) if seen[x]]
    finally:
        free(cols)
        free(seen)
        free(queue)
