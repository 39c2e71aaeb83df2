"""Compare the compiled and pure-Python kernels on the hot loops.

Run with ``python3 benchmarks/bench_kernels.py``.  Each line reports the best
of several repeats for each available backend.
"""

import argparse
import itertools
import timeit

from treelocal.kernels import backends


def sym_gens(n):
    cycle = tuple(list(range(1, n)) + [0])
    swap = tuple([1, 0] + list(range(2, n)))
    return [cycle, swap]


def cases():
    sym8 = sym_gens(8)
    sym5 = sorted(itertools.permutations(range(5)))
    sym6 = sorted(itertools.permutations(range(6)))
    yield "closure Sym(8), order 40320", lambda k: k.closure(sym8, 8, 10**6)
    yield "mult_table Sym(5), 120x120", lambda k: k.mult_table(sym5)
    table6 = backends()["python"].mult_table(sym6)
    gens = list(range(1, 720, 37))
    yield "table_closure in Sym(6), 200 subgroups", lambda k: [k.table_closure(table6, [a, b]) for a in gens[:10] for b in gens[:20]]


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)
    mods = backends()
    print(f"backends: {', '.join(mods)}")
    for name, fn in cases():
        times = {b: min(timeit.repeat(lambda: fn(m), number=1, repeat=args.repeat)) for b, m in mods.items()}
        row = "  ".join(f"{b}={t * 1e3:8.1f} ms" for b, t in times.items())
        if "cython" in times:
            row += f"  speedup={times['python'] / times['cython']:.1f}x"
        print(f"{name:<42} {row}")


if __name__ == "__main__":
    main()
