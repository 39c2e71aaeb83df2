"""Finite permutation groups by full element enumeration.

Points are ``0..n-1``.  A product ``g * h`` is the composite ``g∘h``: apply
``h`` first.  Groups are small (degree up to a few dozen, order up to
``DEFAULT_CAP``), so every structural question is answered on the enumerated
element list rather than with a stabilizer chain.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property
from math import factorial

from . import kernels
from .errors import CapExceeded, DegreeTooLarge, FormatError, HypothesisViolated, NotTransitive

DEFAULT_CAP = 10**6


class Permutation:
    """A bijection of ``{0..n-1}`` stored as its image tuple."""

    __slots__ = ("images", "_hash")

    def __init__(self, images):
        images = tuple(int(i) for i in images)
        if sorted(images) != list(range(len(images))):
            raise ValueError(f"not a permutation: {images!r}")
        self.images = images
        self._hash = hash(images)

    @classmethod
    def _trusted(cls, images):
        p = object.__new__(cls)
        p.images = images
        p._hash = hash(images)
        return p

    @classmethod
    def identity(cls, n):
        return cls._trusted(tuple(range(n)))

    @classmethod
    def from_cycles(cls, n, *cycles):
        """``Permutation.from_cycles(4, (0, 1, 2))`` is the 3-cycle 0->1->2->0."""
        images = list(range(n))
        for cyc in cycles:
            for a, b in zip(cyc, cyc[1:] + cyc[:1]):
                images[a] = b
        return cls(images)

    @property
    def degree(self):
        return len(self.images)

    def __call__(self, i):
        return self.images[i]

    def __mul__(self, other):
        a = self.images
        return Permutation._trusted(tuple([a[j] for j in other.images]))

    def inverse(self):
        inv = [0] * len(self.images)
        for i, j in enumerate(self.images):
            inv[j] = i
        return Permutation._trusted(tuple(inv))

    def __pow__(self, k):
        if k < 0:
            return self.inverse() ** (-k)
        out = Permutation.identity(self.degree)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __eq__(self, other):
        return isinstance(other, Permutation) and self.images == other.images

    def __lt__(self, other):
        return self.images < other.images

    def __hash__(self):
        return self._hash

    def is_identity(self):
        return all(i == j for i, j in enumerate(self.images))

    def fixed_points(self):
        return [i for i, j in enumerate(self.images) if i == j]

    def cycles(self):
        """Non-trivial cycles, each starting at its least point."""
        seen = set()
        out = []
        for i in range(len(self.images)):
            if i in seen or self.images[i] == i:
                continue
            cyc = [i]
            seen.add(i)
            j = self.images[i]
            while j != i:
                cyc.append(j)
                seen.add(j)
                j = self.images[j]
            out.append(tuple(cyc))
        return out

    def order(self):
        from math import lcm

        return lcm(1, *(len(c) for c in self.cycles()))

    def __str__(self):
        cycles = self.cycles()
        if not cycles:
            return "()"
        return "".join("(" + " ".join(map(str, c)) + ")" for c in cycles)

    def __repr__(self):
        return f"Permutation({self.degree}, {self})"


class PermGroup:
    """Subgroup of Sym(n) given by generators; elements enumerated on demand."""

    def __init__(self, degree, generators=(), *, cap=DEFAULT_CAP):
        gens = []
        for g in generators:
            g = g if isinstance(g, Permutation) else Permutation(g)
            if g.degree != degree:
                raise ValueError(f"generator {g} has degree {g.degree}, expected {degree}")
            gens.append(g)
        self.degree = degree
        self.generators = tuple(gens)
        self.cap = cap
        self._elements = None

    @classmethod
    def from_elements(cls, degree, elements, *, cap=DEFAULT_CAP):
        """Build a group from its full (closed) element list.

        The generating set is chosen greedily along the lexicographic order.
        """
        elems = sorted(e if isinstance(e, Permutation) else Permutation(e) for e in elements)
        gens = []
        span = {tuple(range(degree))}
        for e in elems:
            if e.images not in span:
                gens.append(e)
                found = kernels.closure([g.images for g in gens], degree, max(cap, len(elems)))
                span = set(found)
        group = cls(degree, gens, cap=cap)
        if len(span) != len(elems):
            raise ValueError("element list is not closed under composition")
        group._elements = tuple(elems)
        return group

    @classmethod
    def symmetric(cls, n):
        if n <= 1:
            return cls(max(n, 1))
        gens = [Permutation.from_cycles(n, tuple(range(n)))]
        gens.append(Permutation.from_cycles(n, (0, 1)))
        return cls(n, gens)

    @classmethod
    def alternating(cls, n):
        gens = [Permutation.from_cycles(n, (0, 1, i)) for i in range(2, n)]
        return cls(n, gens)

    @classmethod
    def cyclic(cls, n):
        return cls(n, [Permutation.from_cycles(n, tuple(range(n)))] if n > 1 else [])

    @classmethod
    def trivial(cls, n):
        return cls(n)

    def elements(self, cap=None):
        """Sorted tuple of all elements; identity first."""
        cap = self.cap if cap is None else cap
        if self._elements is None:
            found = kernels.closure([g.images for g in self.generators], self.degree, cap)
            if found is None:
                raise CapExceeded(f"group order exceeds cap {cap}")
            self._elements = tuple(sorted(Permutation._trusted(t) for t in found))
        if len(self._elements) > cap:
            raise CapExceeded(f"group order {len(self._elements)} exceeds cap {cap}")
        return self._elements

    @cached_property
    def _element_set(self):
        return frozenset(e.images for e in self.elements())

    def order(self):
        return len(self.elements())

    def __contains__(self, perm):
        images = perm.images if isinstance(perm, Permutation) else tuple(perm)
        return images in self._element_set

    def __eq__(self, other):
        if not isinstance(other, PermGroup):
            return NotImplemented
        return self.degree == other.degree and self._element_set == other._element_set

    def __hash__(self):
        return hash((self.degree, self._element_set))

    def __len__(self):
        return self.order()

    def __iter__(self):
        return iter(self.elements())

    def is_trivial(self):
        return all(g.is_identity() for g in self.generators)

    def issubgroup(self, other):
        return self.degree == other.degree and self._element_set <= other._element_set

    @cached_property
    def _transporter_table(self):
        table = {}
        for e in self.elements():
            for i, j in enumerate(e.images):
                table.setdefault((i, j), []).append(e)
        return table

    def transporters(self, i, j):
        """Elements sending ``i`` to ``j``, in lexicographic order."""
        return self._transporter_table.get((i, j), [])

    def __repr__(self):
        gens = ", ".join(str(g) for g in self.generators)
        return f"PermGroup({self.degree}, [{gens}])"


def enumerate_elements(group, cap=DEFAULT_CAP):
    """Full element set of ``group``; raises CapExceeded past ``cap``."""
    return group.elements(cap)


def orbits(group):
    """Orbit partition of ``{0..n-1}``, parts sorted, ordered by least point."""
    n = group.degree
    seen = [False] * n
    parts = []
    for start in range(n):
        if seen[start]:
            continue
        seen[start] = True
        orbit = [start]
        for x in orbit:
            for g in group.generators:
                y = g.images[x]
                if not seen[y]:
                    seen[y] = True
                    orbit.append(y)
        parts.append(tuple(sorted(orbit)))
    return parts


def is_transitive(group):
    return len(orbits(group)) == 1


def point_stabilizer(group, i):
    if not 0 <= i < group.degree:
        raise ValueError(f"point {i} out of range for degree {group.degree}")
    elems = [e for e in group.elements() if e.images[i] == i]
    return PermGroup.from_elements(group.degree, elems, cap=group.cap)


def plus_subgroup(group):
    """Subgroup generated by all point stabilizers."""
    gens = []
    seen = set()
    for i in range(group.degree):
        for g in point_stabilizer(group, i).generators:
            if g not in seen:
                seen.add(g)
                gens.append(g)
    return PermGroup(group.degree, gens, cap=group.cap)


@dataclass(frozen=True)
class BlockSystem:
    parts: tuple
    group: PermGroup

    def block_of(self, point):
        for k, part in enumerate(self.parts):
            if point in part:
                return k
        raise ValueError(point)


def block_action(system, g):
    """Permutation of block indices induced by ``g``."""
    return Permutation([system.block_of(g.images[part[0]]) for part in system.parts])


def block_system(group):
    """Blocks of imprimitivity given by the orbits of the plus subgroup.

    Returns ``(system, action, ok)`` where ``action`` is the image of ``group``
    in Sym(blocks) and ``ok`` records the brute-force check that the kernel of
    the block action is the plus subgroup and the quotient acts freely.
    """
    if not is_transitive(group):
        raise NotTransitive("block system requires a transitive group")
    plus = plus_subgroup(group)
    system = BlockSystem(tuple(orbits(plus)), group)
    for g in group.generators:
        for part in system.parts:
            image = {g.images[x] for x in part}
            if image not in [set(p) for p in system.parts]:
                raise AssertionError("plus-orbits are not blocks")
    nb = len(system.parts)
    action = PermGroup(nb, [block_action(system, g) for g in group.generators], cap=group.cap)
    kernel = set()
    free = True
    for g in group.elements():
        pi = block_action(system, g)
        if pi.is_identity():
            kernel.add(g.images)
        elif pi.fixed_points():
            free = False
    ok = free and kernel == plus._element_set
    return system, action, ok


def _commutator(x, y):
    return x.inverse() * y.inverse() * x * y


def _normal_closure(group, gens):
    gens = [g for g in dict.fromkeys(gens) if not g.is_identity()]
    cap = group.cap
    while True:
        sub = PermGroup(group.degree, gens, cap=cap)
        members = sub._element_set
        extra = []
        for g in group.generators:
            ginv = g.inverse()
            for h in gens:
                c = g * h * ginv
                if c.images not in members and c not in extra:
                    extra.append(c)
        if not extra:
            return sub
        gens = gens + extra


def lower_central_series(group):
    """Orders of the terms of the lower central series until it stabilizes."""
    series = [group]
    current = group
    while current.order() > 1:
        comms = [_commutator(x, y) for x in group.generators for y in current.generators]
        nxt = _normal_closure(group, comms)
        if nxt.order() == current.order():
            break
        series.append(nxt)
        current = nxt
    return series


def is_nilpotent(group):
    return lower_central_series(group)[-1].order() == 1


def fixed_points(group):
    """Points fixed by every element."""
    return [i for i in range(group.degree) if all(g.images[i] == i for g in group.generators)]


@dataclass(frozen=True)
class Classification:
    transitive: bool
    free: bool
    generated_by_point_stabilizers: bool
    frobenius: bool
    nilpotent: bool
    nilpotent_with_intransitive_plus: bool

    def as_dict(self):
        return dict(self.__dict__)


def classify(group):
    elems = group.elements()
    nfix = [len(e.fixed_points()) for e in elems if not e.is_identity()]
    transitive = is_transitive(group)
    free = all(k == 0 for k in nfix)
    plus = plus_subgroup(group)
    nilpotent = is_nilpotent(group)
    return Classification(
        transitive=transitive,
        free=free,
        generated_by_point_stabilizers=plus.order() == group.order(),
        frobenius=transitive and not free and all(k <= 1 for k in nfix),
        nilpotent=nilpotent,
        nilpotent_with_intransitive_plus=nilpotent and not is_transitive(plus),
    )


# -- Frobenius groups from irreducible F2-representations of C_p -------------

def _is_prime(n):
    return n >= 2 and all(n % k for k in range(2, int(n**0.5) + 1))


def multiplicative_order(a, p):
    k, x = 1, a % p
    while x != 1:
        x = x * a % p
        k += 1
    return k


def gf2_mod(a, b):
    """Remainder of ``a`` by ``b``; polynomials over F2 as bit masks."""
    db = b.bit_length()
    while a.bit_length() >= db:
        a ^= b << (a.bit_length() - db)
    return a


def gf2_is_irreducible(f):
    deg = f.bit_length() - 1
    if deg < 1:
        return False
    for g in range(2, 1 << (deg // 2 + 1)):
        if 0 < g.bit_length() - 1 <= deg // 2 and gf2_mod(f, g) == 0:
            return False
    return True


def cyclotomic_factor(p):
    """Least irreducible degree-m divisor of 1 + x + ... + x^(p-1) over F2.

    ``m`` is the multiplicative order of 2 mod p.  Polynomials are compared by
    their coefficient sequences from the leading term down, i.e. as integers.
    """
    m = multiplicative_order(2, p)
    phi = (1 << p) - 1
    for f in range(1 << m, 1 << (m + 1)):
        if gf2_mod(phi, f) == 0 and gf2_is_irreducible(f):
            return f
    raise AssertionError("no irreducible factor found")  # unreachable for odd primes


def frobenius_from_prime(p, max_degree=4096):
    """Affine group F2^m ⋊ C_p acting on F2^m, with C_p = <x> in F2[x]/(f).

    Points are vectors of F2^m encoded as integers; the stabilizer of 0 is
    the cyclic group generated by multiplication by ``x``.
    """
    if p == 2 or not _is_prime(p):
        raise HypothesisViolated(f"{p} is not an odd prime")
    m = multiplicative_order(2, p)
    n = 1 << m
    if n > max_degree:
        raise DegreeTooLarge(f"degree 2^{m} = {n} exceeds bound {max_degree}")
    f = cyclotomic_factor(p)
    mult_x = [gf2_mod(v << 1, f) for v in range(n)]
    gens = [Permutation([v ^ (1 << i) for v in range(n)]) for i in range(m)]
    gens.append(Permutation(mult_x))
    return PermGroup(n, gens, cap=max(DEFAULT_CAP, n * p))


# -- exhaustive subgroup lattice of Sym(n) -----------------------------------

@dataclass
class _SymTable:
    elements: list
    table: list
    inverse: list


_SYM_CACHE = {}


def _sym_table(n):
    if n not in _SYM_CACHE:
        elems = sorted(itertools.permutations(range(n)))
        table = kernels.mult_table(elems)
        inv = [row.index(0) for row in table]
        _SYM_CACHE[n] = _SymTable(elems, table, inv)
    return _SYM_CACHE[n]


def all_subgroups(n):
    """Every subgroup of Sym(n), sorted by order then elements (n <= 6)."""
    if n > 6:
        raise CapExceeded("subgroup enumeration is limited to degree 6")
    st = _sym_table(n)
    table = st.table
    gens_of = {}
    cyclic = {}
    for i in range(len(st.elements)):
        c = frozenset(kernels.table_closure(table, [i]))
        cyclic.setdefault(c, i)
    gens_of[frozenset([0])] = []
    for c, i in cyclic.items():
        gens_of.setdefault(c, [i])
    frontier = list(gens_of)
    while frontier:
        nxt = []
        for h in frontier:
            for c, i in cyclic.items():
                if i in h:
                    continue
                gens = gens_of[h] + [i]
                k = frozenset(kernels.table_closure(table, gens))
                if k not in gens_of:
                    gens_of[k] = gens
                    nxt.append(k)
        frontier = nxt
    out = []
    for h in sorted(gens_of, key=lambda s: (len(s), sorted(s))):
        grp = PermGroup(n, [Permutation._trusted(st.elements[i]) for i in gens_of[h]])
        grp._elements = tuple(Permutation._trusted(st.elements[i]) for i in sorted(h))
        out.append(grp)
    return out


def conjugacy_class_reps(n):
    """One subgroup per Sym(n)-conjugacy class (the first in ``all_subgroups`` order)."""
    st = _sym_table(n)
    index = {e: i for i, e in enumerate(st.elements)}
    table, inv = st.table, st.inverse
    seen = set()
    reps = []
    for grp in all_subgroups(n):
        key = frozenset(index[e.images] for e in grp.elements())
        if key in seen:
            continue
        reps.append(grp)
        for s in range(len(st.elements)):
            seen.add(frozenset(table[table[s][h]][inv[s]] for h in key))
    return reps


def are_conjugate(g1, g2, max_degree=8):
    """Whether ``g1`` and ``g2`` are conjugate in Sym(n), by brute force."""
    if g1.degree != g2.degree:
        return False
    if g1.degree > max_degree:
        raise CapExceeded(f"brute-force conjugacy limited to degree {max_degree}")
    if g1.order() != g2.order():
        return False
    target = g2._element_set
    for s in itertools.permutations(range(g1.degree)):
        s = Permutation._trusted(s)
        sinv = s.inverse()
        if all((s * g * sinv).images in target for g in g1.generators):
            return True
    return False


def symmetric_order(n):
    return factorial(n)


# -- text format --------------------------------------------------------------

def parse_group_text(text):
    """Parse ``degree n`` followed by one image sequence per generator line."""
    lines = [ln.split("#", 1)[0].strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln]
    if not lines or not lines[0].startswith("degree"):
        raise FormatError("first line must be 'degree n'")
    try:
        n = int(lines[0].split()[1])
        gens = [Permutation([int(x) for x in ln.split()]) for ln in lines[1:]]
    except (IndexError, ValueError) as exc:
        raise FormatError(str(exc)) from exc
    for g in gens:
        if g.degree != n:
            raise FormatError(f"generator {g} does not have degree {n}")
    return PermGroup(n, gens)


def format_group_text(group):
    lines = [f"degree {group.degree}"]
    lines += [" ".join(map(str, g.images)) for g in group.generators]
    return "\n".join(lines) + "\n"


def group_to_json(group):
    return {
        "degree": group.degree,
        "generators": [list(g.images) for g in group.generators],
        "order": group.order(),
    }
