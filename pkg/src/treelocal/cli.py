"""Command line entry point: ``treelocal <module> <action> ...``.

Exit codes: 0 success, 1 domain error (JSON with the error token), 2 usage.
"""

from __future__ import annotations

import argparse
import json
import random
import sys

from . import ball as ballmod
from . import blowup as bl
from . import cover as cov
from . import perm as pm
from . import sgraph as sg
from . import vhcomplex as vh
from .coloring import coloring_from_json, illegal_edges, is_legal, legalize_cp, legalize_general, validate_coloring
from .errors import FormatError, TreeLocalError


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def parse_group_spec(spec):
    """``sym:N``, ``alt:N``, ``cyc:N``, ``trivial:N``, ``frob:P``, ``gens:N:(0 1)(2 3);(1 2 3)`` or a text file path."""
    kind, _, rest = spec.partition(":")
    try:
        if kind == "sym":
            return pm.PermGroup.symmetric(int(rest))
        if kind == "alt":
            return pm.PermGroup.alternating(int(rest))
        if kind == "cyc":
            return pm.PermGroup.cyclic(int(rest))
        if kind == "trivial":
            return pm.PermGroup.trivial(int(rest))
        if kind == "frob":
            return pm.frobenius_from_prime(int(rest))
        if kind == "gens":
            n, _, body = rest.partition(":")
            n = int(n)
            gens = [_cycles(n, g) for g in body.split(";") if g.strip()]
            return pm.PermGroup(n, gens)
    except ValueError as exc:
        raise FormatError(f"bad group spec {spec!r}: {exc}") from exc
    try:
        with open(spec) as fh:
            return pm.parse_group_text(fh.read())
    except OSError as exc:
        raise FormatError(f"cannot read group file {spec!r}: {exc}") from exc


def _cycles(n, text):
    cycles = []
    for chunk in text.replace(")", ")|").split("|"):
        chunk = chunk.strip().strip("()").strip()
        if chunk:
            cycles.append(tuple(int(x) for x in chunk.replace(",", " ").split()))
    return pm.Permutation.from_cycles(n, *cycles)


def _load_json(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise FormatError(f"cannot read {path!r}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path!r} is not JSON: {exc}") from exc


def _load_graph(path):
    data = _load_json(path)
    g = sg.from_json(data)
    rep = sg.validate(g)
    if not rep.ok:
        raise _Invalid(rep.first)
    return g, data


class _Invalid(TreeLocalError):
    """Validation failure reported by a ``validate``/``check`` action."""

    def __init__(self, message, token="InvalidGraph"):
        super().__init__(message)
        self._token = token

    @property
    def token(self):
        return self._token


# -- perm ---------------------------------------------------------------------

def cmd_perm(args, cfg):
    if args.action == "frobenius":
        G = pm.frobenius_from_prime(int(args.arg))
        out = pm.group_to_json(G)
        out["classification"] = pm.classify(G).as_dict()
        return out
    if args.action == "subgroups":
        n = int(args.arg)
        reps = pm.conjugacy_class_reps(n)
        return {
            "degree": n,
            "subgroups": len(pm.all_subgroups(n)),
            "conjugacy_classes": [pm.group_to_json(H) for H in reps],
        }
    G = parse_group_spec(args.arg)
    if args.action == "info":
        return pm.group_to_json(G)
    if args.action == "classify":
        out = pm.group_to_json(G)
        out["classification"] = pm.classify(G).as_dict()
        return out
    if args.action == "orbits":
        return {"orbits": [list(o) for o in pm.orbits(G)]}
    if args.action == "blocks":
        system, action, ok = pm.block_system(G)
        return {"blocks": [list(b) for b in system.parts], "action": pm.group_to_json(action), "intransitive_plus": ok}
    if args.action == "elements":
        return {"elements": [list(x.images) for x in G.elements(cfg.cap)]}
    raise UsageError(f"unknown perm action {args.action}")


# -- graph ----------------------------------------------------------------------

def cmd_graph(args, cfg):
    data = _load_json(args.file)
    g = sg.from_json(data)
    rep = sg.validate(g)
    if args.action == "validate":
        if not rep.ok:
            raise _Invalid(rep.first)
        return {"ok": True, "vertices": len(g.vertices), "edges": len(g.edges), "forest": sg.is_forest(g), "connected": g.is_connected()}
    if not rep.ok:
        raise _Invalid(rep.first)
    if args.action == "subdivide":
        sub, _ = sg.barycentric_subdivision(g)
        return sub
    if args.action == "show":
        return g
    raise UsageError(f"unknown graph action {args.action}")


# -- coloring ---------------------------------------------------------------------

def cmd_coloring(args, cfg):
    g, data = _load_graph(args.file)
    c = coloring_from_json(g, data)
    rep = validate_coloring(c)
    if args.action == "check":
        if not rep.ok:
            raise _Invalid(rep.first, "InvalidColoring")
        return {"ok": True, "legal": is_legal(c), "illegal_edges": illegal_edges(c), "regular": sorted(c.regular)}
    if not rep.ok:
        raise _Invalid(rep.first, "InvalidColoring")
    if args.action == "legalize":
        if not args.group:
            raise UsageError("--group is required")
        F = parse_group_spec(args.group)
        root = args.root if args.root is not None else g.vertices[0]
        d = legalize_cp(c, F, root) if args.cp else legalize_general(c, F, root)
        return (g, d)
    raise UsageError(f"unknown coloring action {args.action}")


# -- ball -------------------------------------------------------------------------

def cmd_ball(args, cfg):
    b = ballmod.make_ball(args.d, args.R, cap=cfg.cap)
    c = b.canonical
    if args.action == "make":
        return (b.graph, c)
    F = parse_group_spec(args.group) if args.group else b.sym()
    if args.action == "enumerate":
        count, germs = ballmod.enumerate_U_fix(F, c, b, cap=cfg.cap)
        out = {"count": count, "formula": ballmod.count_U_fix_formula(F, c, b)}
        if args.list:
            out["germs"] = [x.to_json() for x in germs]
        return out
    if args.action == "sample":
        target = b.root if args.target is None else args.target
        g = ballmod.sample_U(F, c, b, target, cfg.seed)
        return g.to_json()
    if args.action == "sigma":
        if not args.germ:
            raise UsageError("--germ is required")
        g = ballmod.germ_from_json(b, _load_json(args.germ))
        vs = [args.vertex] if args.vertex is not None else list(g.inner)
        return {"local_actions": {str(v): list(ballmod.local_action(g, v, c).images) for v in vs}, "in_U": ballmod.in_U(g, F, c)}
    raise UsageError(f"unknown ball action {args.action}")


# -- blowup -------------------------------------------------------------------------

def _samples(F, c, b, n, seed, reach=1):
    rng = random.Random(seed)
    near = b.within(b.root, reach)
    return [ballmod.sample_U(F, c, b, rng.choice(near), rng) for _ in range(n)]


def _audit_json(rep):
    return {"checked": rep.checked, "ok": rep.ok, "mismatches": [list(map(str, m)) for m in rep.mismatches[:20]]}


def cmd_blowup(args, cfg):
    from .coloring import random_tree_coloring

    b = ballmod.make_ball(args.d, args.R, cap=cfg.cap)
    c = b.canonical
    if args.action == "plain":
        B = bl.blow_up(b, c)
        return (B.graph, None)
    if args.action == "partition":
        if not args.parts:
            raise UsageError("--parts is required, e.g. '0|1,2|3'")
        parts = [[int(x) for x in p.split(",")] for p in args.parts.split("|")]
        return (bl.partitioned(b, c, parts).graph, None)
    if args.action in ("y", "verify-lemma2"):
        if not args.group:
            raise UsageError("--group is required (cyclic of prime order)")
        F = parse_group_spec(args.group)
        cc = random_tree_coloring(b.graph, args.d, b.root, random.Random(cfg.seed), classes=pm.orbits(F))
        Y, a, info = bl.lemma2_graph(b, cc, F)
        if args.action == "y":
            return (Y.graph, a)
        p = info["p"]
        rep = bl.verify_local_actions(Y, a, _samples(F, cc, b, args.samples, cfg.seed), bl.cycle_group(p + 2, range(2, p + 2)))
        out = _audit_json(rep)
        out["interior_degrees"] = bl.interior_degrees(Y.graph)
        out["reversal_violations"] = len(bl.reversal_symmetric_colors(a, (0, 1)))
        return out
    if args.action in ("z", "verify-lemma3"):
        p = args.d - 2
        F = bl.cycle_group(args.d, range(2, p + 2))
        cc = random_tree_coloring(b.graph, args.d, b.root, random.Random(cfg.seed), symmetric=(0, 1))
        Z, a, info = bl.lemma3_graph(b, cc, p)
        if args.action == "z":
            return (Z.graph, a)
        rep = bl.verify_local_actions(Z, a, _samples(F, cc, b, args.samples, cfg.seed), bl.cycle_group(p + 1, range(1, p + 1)))
        out = _audit_json(rep)
        out["interior_degrees"] = bl.interior_degrees(Z.graph)
        out["reversal_violations"] = len(bl.reversal_symmetric_colors(a, (0,)))
        return out
    if args.action == "verify-lemma1":
        F = parse_group_spec(args.group) if args.group else b.sym()
        B = bl.blow_up(b, c)
        a, gs = bl.lemma1_coloring(B, F)
        rep = bl.verify_lemma1(B, a, gs, F, _samples(F, c, b, args.samples, cfg.seed))
        out = _audit_json(rep)
        out["transporters"] = [list(x.images) for x in gs]
        return out
    raise UsageError(f"unknown blowup action {args.action}")


# -- cover ---------------------------------------------------------------------------

def cmd_cover(args, cfg):
    g, data = _load_graph(args.file)
    base = args.basepoint if args.basepoint is not None else g.vertices[0]
    bundle = cov.universal_cover(g, base, args.radius, cap=cfg.cap)
    if args.action == "build":
        return (bundle.total, None)
    if not args.map:
        raise UsageError("--map is required")
    auto = sg.morphism_from_json(g, _load_json(args.map))
    target = auto.vertex_map.get(base)
    choice = args.choice if args.choice is not None else min(bundle.fibre(target), key=lambda x: (len(bundle.paths[x]), x), default=-1)
    G = cov.lift(auto, bundle, choice)
    if args.action == "lift":
        rep = cov.diagram_report(bundle, auto, G)
        return {"choice": choice, "diagram_ok": rep.ok, "lift": G.to_json()}
    if args.action == "check-sigma":
        c = coloring_from_json(g, data)
        rep = cov.check_sigma_lift(bundle, c, auto, G)
        return {"checked": rep.checked, "ok": rep.ok, "mismatches": rep.mismatches}
    raise UsageError(f"unknown cover action {args.action}")


# -- complex -------------------------------------------------------------------------

def cmd_complex(args, cfg):
    X = vh.complex_from_json(_load_json(args.file))
    if args.action == "validate":
        rep = vh.validate_complex(X)
        if not rep.ok:
            raise _Invalid(rep.first, "InvalidComplex")
        return {"ok": True, "degrees": list(X.degrees())}
    if args.action == "local-action":
        F = vh.local_action(X, args.side)
        out = pm.group_to_json(F)
        out["letters"] = list(X.letters(args.side))
        return out
    if args.action == "growth":
        return {"side": args.side, "orders": vh.stabilizer_growth(X, args.side, args.radius, cfg.cap)}
    if args.action == "nonrf":
        return vh.nonrf_report(X, args.radius, cfg.cap)
    raise UsageError(f"unknown complex action {args.action}")


# -- plumbing --------------------------------------------------------------------------

def build_parser():
    p = _Parser(prog="treelocal", description="Local actions of groups acting on trees, at finite radius.")
    _globals(p, pm.DEFAULT_CAP, 0, "json")
    # the same flags are accepted after the subcommand
    common = _Parser(add_help=False)
    _globals(common, argparse.SUPPRESS, argparse.SUPPRESS, argparse.SUPPRESS)
    sub = p.add_subparsers(dest="module", parser_class=_Parser)
    _add = sub.add_parser

    def add_parser(name):
        return _add(name, parents=[common])

    sub.add_parser = add_parser

    q = sub.add_parser("perm")
    q.add_argument("action", choices=("frobenius", "subgroups", "info", "classify", "orbits", "blocks", "elements"))
    q.add_argument("arg", help="prime, degree, or group spec")
    q.set_defaults(func=cmd_perm)

    q = sub.add_parser("graph")
    q.add_argument("action", choices=("validate", "subdivide", "show"))
    q.add_argument("file")
    q.set_defaults(func=cmd_graph)

    q = sub.add_parser("coloring")
    q.add_argument("action", choices=("check", "legalize"))
    q.add_argument("file")
    q.add_argument("--group")
    q.add_argument("--root", type=int)
    q.add_argument("--cp", action="store_true", help="use the fixed-point recoloring")
    q.set_defaults(func=cmd_coloring)

    q = sub.add_parser("ball")
    q.add_argument("action", choices=("make", "enumerate", "sample", "sigma"))
    q.add_argument("d", type=int)
    q.add_argument("R", type=int)
    q.add_argument("--group")
    q.add_argument("--target", type=int)
    q.add_argument("--germ")
    q.add_argument("--vertex", type=int)
    q.add_argument("--list", action="store_true")
    q.set_defaults(func=cmd_ball)

    q = sub.add_parser("blowup")
    q.add_argument("action", choices=("plain", "partition", "y", "z", "verify-lemma1", "verify-lemma2", "verify-lemma3"))
    q.add_argument("d", type=int)
    q.add_argument("R", type=int)
    q.add_argument("--group")
    q.add_argument("--parts")
    q.add_argument("--samples", type=int, default=20)
    q.set_defaults(func=cmd_blowup)

    q = sub.add_parser("cover")
    q.add_argument("action", choices=("build", "lift", "check-sigma"))
    q.add_argument("file")
    q.add_argument("--radius", type=int, required=True)
    q.add_argument("--basepoint", type=int)
    q.add_argument("--map")
    q.add_argument("--choice", type=int)
    q.set_defaults(func=cmd_cover)

    q = sub.add_parser("complex")
    q.add_argument("action", choices=("validate", "local-action", "growth", "nonrf"))
    q.add_argument("file")
    q.add_argument("--side", choices=("vertical", "horizontal"), default="vertical")
    q.add_argument("--radius", type=int, default=3)
    q.set_defaults(func=cmd_complex)
    return p


def _globals(p, cap, seed, fmt):
    p.add_argument("--cap", type=int, default=cap, help="size cap for groups, balls and growth orders")
    p.add_argument("--seed", type=int, default=seed)
    p.add_argument("--format", choices=("json", "dot", "text"), default=fmt)


def render(result, fmt):
    """Serialize a command result; graphs may be returned as ``graph`` or ``(graph, coloring)``."""
    graph, coloring = None, None
    if isinstance(result, sg.SerreGraph):
        graph = result
    elif isinstance(result, tuple) and len(result) == 2 and isinstance(result[0], sg.SerreGraph):
        graph, coloring = result
    if graph is not None:
        if fmt == "dot":
            return sg.to_dot(graph, coloring)
        result = sg.to_json(graph, coloring)
        if fmt == "text":
            return f"vertices {len(graph.vertices)}\nedges {len(graph.edges)}\nboundary {len(graph.boundary)}\n"
    elif fmt == "dot":
        raise UsageError("dot output is only available for graphs")
    if fmt == "text":
        return _text(result)
    return json.dumps(result, sort_keys=True) + "\n"


def _text(obj, indent=""):
    lines = []
    if isinstance(obj, dict):
        for k in sorted(obj):
            v = obj[k]
            if isinstance(v, (dict, list)) and v and not all(isinstance(x, (int, str, bool)) for x in (v if isinstance(v, list) else [0])):
                lines.append(f"{indent}{k}:")
                lines.append(_text(v, indent + "  ").rstrip("\n"))
            else:
                lines.append(f"{indent}{k}: {json.dumps(v, sort_keys=True)}")
    elif isinstance(obj, list):
        for v in obj:
            lines.append(f"{indent}- {json.dumps(v, sort_keys=True)}")
    else:
        lines.append(f"{indent}{obj}")
    return "\n".join(lines) + "\n"


class Config:
    def __init__(self, cap, seed, fmt):
        if cap <= 0:
            raise UsageError("--cap must be positive")
        self.cap, self.seed, self.format = cap, seed, fmt


def run(argv, out=None, err=None):
    out = sys.stdout if out is None else out
    err = sys.stderr if err is None else err
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if not getattr(args, "module", None):
            raise UsageError("a subcommand is required")
        cfg = Config(args.cap, args.seed, args.format)
        result = args.func(args, cfg)
        out.write(render(result, cfg.format))
        return 0
    except UsageError as exc:
        err.write(f"usage error: {exc}\n")
        return 2
    except TreeLocalError as exc:
        out.write(json.dumps({"error": exc.token, "message": str(exc)}, sort_keys=True) + "\n")
        return 1
    except (ValueError, KeyError, IndexError) as exc:
        out.write(json.dumps({"error": "InvalidInput", "message": str(exc)}, sort_keys=True) + "\n")
        return 1


def main(argv=None):
    return run(sys.argv[1:] if argv is None else argv)


if __name__ == "__main__":
    sys.exit(main())
