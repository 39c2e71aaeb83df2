"""One-vertex VH square complexes.

Letters come in two families: vertical ``A`` and horizontal ``B``, each with
a fixed-point-free inverse map.  A square is a tuple ``(a, b, a2, b2)``
standing for the relation ``b * a2 == a * b2``.  Closing a square under the
three rewritings

    (a2, b^-1, a, b2^-1),  (a^-1, b2, a2^-1, b),  (a2^-1, b2^-1, a^-1, b^-1)

gives all its readings.  The complex is complete when each pair ``(a, b)``
is the prefix of exactly one square.  Everything below goes through
:func:`rewritings`, so the convention lives in one place.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from sympy.combinatorics import Permutation as SymPermutation
from sympy.combinatorics import PermutationGroup as SymGroup

from .ball import fixator_condition
from .errors import FormatError, InvalidComplex, SizeExceeded
from .perm import PermGroup, Permutation, is_nilpotent
from .sgraph import Report

MAX_GROWTH_RADIUS = 5
DEFAULT_ORDER_CAP = 10**6

MET = "criterion hypotheses met"
NOT_MET = "hypotheses not met"
INCONCLUSIVE = "inconclusive"


def _default_inverse(x):
    return x[:-3] if x.endswith("^-1") else x + "^-1"


@dataclass(eq=False)
class VHComplex:
    vertical: tuple
    horizontal: tuple
    inv: dict
    squares: frozenset = field(default_factory=frozenset)

    def degrees(self):
        return len(self.vertical), len(self.horizontal)

    def rewritings(self, sq):
        return rewritings(sq, self.inv)

    def prefix_table(self):
        """``(a, b) -> [squares with that prefix]``."""
        table = {}
        for sq in self.squares:
            table.setdefault(sq[:2], []).append(sq)
        return table

    def letters(self, side):
        return self.vertical if side == "vertical" else self.horizontal

    def to_json(self):
        def family(xs):
            out, seen = [], set()
            for x in xs:
                if x in seen:
                    continue
                seen.update((x, self.inv[x]))
                out.append([x, self.inv[x]])
            return out

        return {
            "vertical": family(self.vertical),
            "horizontal": family(self.horizontal),
            "squares": sorted(list(sq) for sq in self.squares),
        }


def rewritings(sq, inv):
    a, b, a2, b2 = sq
    return (
        (a2, inv[b], a, inv[b2]),
        (inv[a], b2, inv[a2], b),
        (inv[a2], inv[b2], inv[a], inv[b]),
    )


def close_squares(squares, inv):
    out = set()
    stack = [tuple(s) for s in squares]
    while stack:
        sq = stack.pop()
        if sq in out:
            continue
        out.add(sq)
        stack.extend(rewritings(sq, inv))
    return frozenset(out)


def _parse_family(items):
    letters, inv = [], {}
    for item in items:
        if isinstance(item, str):
            x, y = item, _default_inverse(item)
        elif isinstance(item, (list, tuple)) and len(item) == 2 and all(isinstance(z, str) for z in item):
            x, y = item
        else:
            raise FormatError(f"bad letter entry {item!r}")
        for p, q in ((x, y), (y, x)):
            if inv.setdefault(p, q) != q:
                raise FormatError(f"conflicting inverses for {p!r}")
            if p not in letters:
                letters.append(p)
    return tuple(letters), inv


def make_complex(vertical, horizontal, squares, close=True):
    A, invA = _parse_family(vertical)
    B, invB = _parse_family(horizontal)
    inv = {**invA, **invB}
    sqs = [tuple(s) for s in squares]
    for s in sqs:
        if len(s) != 4:
            raise FormatError(f"square {s!r} must have four letters")
    if close:
        known = set(A) | set(B)
        if all(x in known for s in sqs for x in s):
            sqs = close_squares(sqs, inv)
    return VHComplex(A, B, inv, frozenset(sqs))


def complex_from_json(data, close=True):
    try:
        return make_complex(data["vertical"], data["horizontal"], data["squares"], close)
    except (KeyError, TypeError) as exc:
        raise FormatError(f"malformed complex JSON: {exc}") from exc


def validate_complex(X):
    """Check involutions, letter families, closure and completeness."""
    problems = []
    A, B = set(X.vertical), set(X.horizontal)
    if A & B:
        problems.append(f"letters on both sides: {sorted(A & B)}")
    for side, letters in (("vertical", A), ("horizontal", B)):
        for x in letters:
            y = X.inv.get(x)
            if y is None or y not in letters or X.inv.get(y) != x:
                problems.append(f"{side} inverse map is not an involution at {x!r}")
            elif y == x:
                problems.append(f"{side} letter {x!r} is its own inverse")
    if problems:
        return Report(tuple(problems))
    for sq in sorted(X.squares):
        a, b, a2, b2 = sq
        if a not in A or a2 not in A or b not in B or b2 not in B:
            problems.append(f"square {sq} has letters on the wrong side")
    if problems:
        return Report(tuple(problems))
    for sq in sorted(X.squares):
        for r in X.rewritings(sq):
            if r not in X.squares:
                problems.append(f"square set not closed: {sq} lacks {r}")
                break
    table = X.prefix_table()
    for a in X.vertical:
        for b in X.horizontal:
            n = len(table.get((a, b), ()))
            if n == 0:
                problems.append(f"incomplete: no square with prefix ({a}, {b})")
            elif n > 1:
                problems.append(f"prefix ({a}, {b}) starts {n} squares")
    return Report(tuple(problems))


def _require_valid(X):
    rep = validate_complex(X)
    if not rep.ok:
        raise InvalidComplex(rep.first)


def radius_one_permutations(X, side):
    """``{acting letter: permutation of this side's letters}``.

    Vertical: ``ρ_b(a) = a2`` for the square with prefix ``(a, b)``.
    Horizontal: ``ρ_a(b) = b2``.
    """
    _require_valid(X)
    table = X.prefix_table()
    A, B = X.vertical, X.horizontal
    if side == "vertical":
        pos = {a: i for i, a in enumerate(A)}
        return {b: Permutation([pos[table[(a, b)][0][2]] for a in A]) for b in B}
    if side == "horizontal":
        pos = {b: i for i, b in enumerate(B)}
        return {a: Permutation([pos[table[(a, b)][0][3]] for b in B]) for a in A}
    raise ValueError(f"side must be vertical or horizontal, not {side!r}")


def local_action(X, side):
    perms = radius_one_permutations(X, side)
    degree = len(X.letters(side))
    return PermGroup(degree, sorted({x for x in perms.values() if not x.is_identity()}))


# -- growth of radius-k groups ---------------------------------------------------------

def _transitions(X, side):
    """``(state, letter read) -> (letter written, new state)``.

    From ``b * a2 == a * b2``: on the vertical side the state ``b`` reads
    ``a2``, writes ``a`` and becomes ``b2``; on the horizontal side the state
    ``a`` reads ``b2``, writes ``b`` and becomes ``a2``.
    """
    trans = {}
    for a, b, a2, b2 in X.squares:
        if side == "vertical":
            trans[(b, a2)] = (a, b2)
        else:
            trans[(a, b2)] = (b, a2)
    return trans


def reduced_words(letters, inv, k):
    words = [()]
    for _ in range(k):
        words = [w + (x,) for w in words for x in letters if not w or inv[w[-1]] != x]
    return words


def _act(trans, state, word):
    out = []
    for y in word:
        y2, state = trans[(state, y)]
        out.append(y2)
    return tuple(out)


def radius_k_generators(X, side, k):
    """Permutations of the radius-``k`` sphere induced by each opposite-side letter."""
    _require_valid(X)
    trans = _transitions(X, side)
    here = X.letters(side)
    other = X.horizontal if side == "vertical" else X.vertical
    sphere = reduced_words(here, X.inv, k)
    pos = {w: i for i, w in enumerate(sphere)}
    gens = {}
    for x in other:
        gens[x] = [pos[_act(trans, x, w)] for w in sphere]
    return sphere, gens


def _growth(X, side, max_radius, order_cap):
    """Orders for radii ``1..max_radius``; stops early (flagging it) once an order passes the cap."""
    if max_radius > MAX_GROWTH_RADIUS:
        raise SizeExceeded(f"growth radius is capped at {MAX_GROWTH_RADIUS}")
    orders = []
    for k in range(1, max_radius + 1):
        sphere, gens = radius_k_generators(X, side, k)
        if len(sphere) < 2:
            orders.append(1)
            continue
        group = SymGroup([SymPermutation(g) for g in gens.values()])
        n = int(group.order())
        if order_cap is not None and n > order_cap:
            return orders, k
        orders.append(n)
    return orders, None


def stabilizer_growth(X, side, max_radius=3, order_cap=DEFAULT_ORDER_CAP):
    """Orders of the groups induced on balls of radius ``1..max_radius``.

    Each opposite-side letter acts on reduced words of length ``k`` by
    propagating through squares; the order is computed with Schreier-Sims.
    """
    orders, capped_at = _growth(X, side, max_radius, order_cap)
    if capped_at is not None:
        raise SizeExceeded(f"radius {capped_at} group order exceeds cap {order_cap}")
    return orders


def strictly_increasing(seq):
    return all(x < y for x, y in zip(seq, seq[1:]))


# -- the criterion report -------------------------------------------------------------------

def nonrf_report(X, radius=3, order_cap=DEFAULT_ORDER_CAP):
    """Checkable hypotheses of the non-residual-finiteness criterion, side by side.

    The verdict only speaks about hypotheses; it never claims the conclusion.
    """
    _require_valid(X)
    sides = {}
    for side in ("vertical", "horizontal"):
        F = local_action(X, side)
        growth, capped_at = _growth(X, side, radius, order_cap)
        # passing the cap after a strictly increasing prefix still counts as growth
        evidence = strictly_increasing(growth) and (len(growth) + (capped_at is not None)) >= 2
        sides[side] = {
            "degree": F.degree,
            "local_action_order": F.order(),
            "nilpotent": is_nilpotent(F),
            "fixator_condition": fixator_condition(F),
            "growth": growth,
            "growth_capped_at_radius": capped_at,
            "growth_evidence": evidence,
        }
    other = {"vertical": "horizontal", "horizontal": "vertical"}
    met = [s for s in sides if sides[s]["nilpotent"] and sides[other[s]]["growth_evidence"]]
    if met:
        verdict = MET
    elif not any(sides[s]["nilpotent"] for s in sides):
        verdict = NOT_MET
    else:
        verdict = INCONCLUSIVE
    return {
        "vertex_transitive": True,
        "vertex_transitive_note": "one-vertex complex: the lattice is transitive on the vertices of the product",
        "sides": sides,
        "sides_met": met,
        "verdict": verdict,
    }


# -- generators of examples ---------------------------------------------------------------------

def torus():
    return make_complex(["a"], ["b"], [("a", "b", "a", "b")])


def _letter_names(prefix, n):
    if n % 2:
        raise ValueError("letter families have even size")
    names = []
    for i in range(n // 2):
        names.append([f"{prefix}{i}", f"{prefix}{i}^-1"])
    return names


def random_complex(nA, nB, rng=None, attempts=1000):
    """Random complete complex with ``nA`` vertical and ``nB`` horizontal letters."""
    rng = rng if rng is not None else random.Random(0)
    famA, famB = _letter_names("a", nA), _letter_names("b", nB)
    base = make_complex(famA, famB, [])
    A, B, inv = base.vertical, base.horizontal, base.inv
    for _ in range(attempts):
        squares = set()
        used = {}
        ok = True
        for a in A:
            for b in B:
                if (a, b) in used:
                    continue
                cands = [(a2, b2) for a2 in A for b2 in B]
                rng.shuffle(cands)
                for a2, b2 in cands:
                    orbit = close_squares([(a, b, a2, b2)], inv)
                    pre = {}
                    if any(pre.setdefault(s[:2], s) != s for s in orbit):
                        continue
                    if any(s[:2] in used for s in orbit):
                        continue
                    for s in orbit:
                        used[s[:2]] = s
                    squares |= orbit
                    break
                else:
                    ok = False
                    break
            if not ok:
                break
        if ok:
            return VHComplex(A, B, inv, frozenset(squares))
    raise InvalidComplex("could not complete a random square set")


def relabel(X, mapping):
    """Rename letters; ``mapping`` must commute with the inverse maps."""
    inv = {mapping[x]: mapping[y] for x, y in X.inv.items()}
    return VHComplex(
        tuple(mapping[x] for x in X.vertical),
        tuple(mapping[x] for x in X.horizontal),
        inv,
        frozenset(tuple(mapping[x] for x in sq) for sq in X.squares),
    )
