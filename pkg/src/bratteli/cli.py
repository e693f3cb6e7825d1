"""Command line front end over the library.

Every command is a pure function of its input files and flags, so
repeated invocations print byte-identical output.  Exit codes follow
the verdict lattice: 0 when everything asked for Holds, 1 when a check
Fails (the counterexample is in the output), 2 on usage or parse
errors, 3 when a verdict stayed Unknown within budget.  With --strict
an Unknown exits 1 instead.

Paths on the command line are written END:r1,r2,...,rN with one-based
fiber ranks, deepest edge last; the same shape the orbit and chain
commands print, minus the source annotations.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from ._report import FAILS, HOLDS, UNKNOWN, DiagramError, worst
from .diagram import (DEFAULT_BUDGET, load_diagram, telescope,
                      validate_unordered)
from .dynamics import (Diverges, chain_transitive, cover_steps,
                       cylinder_graph, epsilon_chain, path_text, pseudo_orbit,
                       saturation_sets)
from .ktheory import (bounded_norm_membership, check_index_relations,
                      class_is_zero, index_elements, is_positive, pushforward,
                      rational_rank_lower_bound)
from .order import (MIN, extreme_chains, extreme_path, make_path,
                    marker_level, validate_ordered)
from .realize import load_dvectors, synthesize_order
from .transgraph import index_pushforward, transition_graph
from .vershik import Maximal, orbit, towers


def _budget(args):
    if args.budget is not None:
        return args.budget
    env = os.environ.get("BDK_BUDGET")
    if env is not None:
        try:
            return int(env)
        except ValueError:
            raise DiagramError("BDK_BUDGET must be an integer, got %r" % env)
    return DEFAULT_BUDGET


def _emit(text, args):
    out = getattr(args, "output", None)
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _dump(obj):
    return json.dumps(obj, indent=2, default=str) + "\n"


def _exit_for(overall, args):
    if overall == HOLDS:
        return 0
    if overall == FAILS:
        return 1
    return 1 if getattr(args, "strict", False) else 3


def _parse_path(d, text):
    head, sep, tail = text.rpartition(":")
    if not sep:
        raise DiagramError("path syntax is END:r1,r2,... with one-based "
                           "ranks, got %r" % text)
    try:
        ranks = tuple(int(r) - 1 for r in tail.split(","))
    except ValueError:
        raise DiagramError("bad rank list in %r" % text)
    if any(r < 0 for r in ranks):
        raise DiagramError("ranks are counted from one in %r" % text)
    return make_path(d, head, ranks)


def _report_lines(rep):
    lines = []
    for c in rep.checks:
        tail = ""
        if c.witness is not None:
            tail = "  %s" % json.dumps(c.witness, sort_keys=True, default=str)
        lines.append("%-24s %s%s" % (c.property, c.verdict, tail))
    for note in rep.findings:
        lines.append("note: %s" % note)
    return lines


def cmd_validate(args):
    d = load_diagram(args.diagram)
    budget = _budget(args)
    rep = (validate_ordered(d, budget) if args.ordered
           else validate_unordered(d, budget))
    if args.format == "text":
        body = "\n".join(_report_lines(rep) + ["overall: %s" % rep.overall()])
        _emit(body + "\n", args)
    else:
        _emit(_dump(rep.to_json()), args)
    return _exit_for(rep.overall(), args)


def cmd_telescope(args):
    d = load_diagram(args.diagram)
    try:
        levels = [int(x) for x in args.levels.split(",")]
    except ValueError:
        raise DiagramError("--levels wants a comma list of integers")
    out = telescope(d, levels)
    if args.format == "text":
        _emit(out.to_text(), args)
    else:
        _emit(_dump(out.to_json()), args)
    return 0


def cmd_towers(args):
    d = load_diagram(args.diagram)
    part = towers(d, args.level)
    if args.format == "text":
        lines = []
        for v in part.vertices:
            floors = part.tower(v)
            lines.append("%s (height %d)" % (v, len(floors)))
            lines.extend("  %s" % path_text(p) for p in floors)
        _emit("\n".join(lines) + "\n", args)
    else:
        doc = {"level": part.level,
               "towers": [{"vertex": v,
                           "height": len(part.tower(v)),
                           "floors": [path_text(p) for p in part.tower(v)]}
                          for v in part.vertices]}
        _emit(_dump(doc), args)
    return 0


def cmd_orbit(args):
    d = load_diagram(args.diagram)
    p = _parse_path(d, args.start)
    paths, terminal = orbit(d, p, args.steps, reverse=args.reverse)
    stop = None
    if terminal is not None:
        stop = {"kind": "maximal" if isinstance(terminal, Maximal)
                else "minimal",
                "component": terminal.component}
    if args.format == "text":
        lines = [path_text(q) for q in paths]
        if stop is not None:
            lines.append("stopped: %s(%s)" % (stop["kind"],
                                              stop["component"]))
        _emit("\n".join(lines) + "\n", args)
    else:
        _emit(_dump({"paths": [path_text(q) for q in paths],
                     "terminal": stop}), args)
    return 0


def _graph_levels(d, args):
    if args.level is not None:
        return [args.level]
    L, verdict, wit = marker_level(d)
    if L is None:
        raise DiagramError("markers never resolve: %s" % (wit,))
    return list(range(max(2, L), d.depth + 1))


def cmd_transition_graphs(args):
    d = load_diagram(args.diagram)
    graphs = [transition_graph(d, n) for n in _graph_levels(d, args)]
    if args.format == "dot":
        _emit("\n".join(g.to_dot() for g in graphs), args)
    elif args.format == "text":
        lines = []
        for g in graphs:
            lines.append("level %d" % g.level)
            lines.extend("  %s: Y%d -> Y%d" % (v, i, j)
                         for v, i, j in g.edges)
        _emit("\n".join(lines) + "\n", args)
    else:
        _emit(_dump([g.to_json() for g in graphs]), args)
    return 0


def _index_level(d, args):
    if args.level is not None:
        return args.level
    L, verdict, wit = marker_level(d)
    if L is None:
        raise DiagramError("markers never resolve: %s" % (wit,))
    return max(2, L)


def cmd_index(args):
    d = load_diagram(args.diagram)
    s = index_elements(d, _index_level(d, args))
    if args.format == "text":
        lines = ["level %d" % s.level]
        for i, vec in enumerate(s.elements, start=1):
            lines.append("d%d = (%s) over %s"
                         % (i, ", ".join("%+d" % x for x in vec),
                            ", ".join(s.vertices)))
        _emit("\n".join(lines) + "\n", args)
    else:
        _emit(_dump(s.to_json()), args)
    return 0


def cmd_check_index(args):
    d = load_diagram(args.diagram)
    n = _index_level(d, args)
    s = index_elements(d, n)
    L, verdict, wit = marker_level(d)
    graphs = [transition_graph(d, m) for m in range(max(2, L), d.depth + 1)]
    rep = check_index_relations(s, graphs)
    size, rank_rep = rational_rank_lower_bound(d, n)
    push_rep = index_pushforward(d)
    checks = rep.checks + rank_rep.checks + push_rep.checks
    overall = worst(c.verdict for c in checks)
    doc = {"level": n, "V_o_size": size,
           "checks": [c.to_json() for c in checks],
           "overall": overall}
    if args.format == "text":
        lines = []
        for hold in (rep, rank_rep, push_rep):
            lines.extend(_report_lines(hold))
        lines.append("overall: %s" % overall)
        _emit("\n".join(lines) + "\n", args)
    else:
        _emit(_dump(doc), args)
    return _exit_for(overall, args)


def cmd_synthesize(args):
    d = load_diagram(args.diagram)
    dv = load_dvectors(args.d)
    out = synthesize_order(d, dv)
    if args.format == "text":
        _emit(out.to_text(), args)
    else:
        _emit(_dump(out.to_json()), args)
    return 0


def cmd_chain(args):
    d = load_diagram(args.diagram)
    if args.start is None:
        if args.depth is None:
            raise DiagramError("chain needs either a start path or --depth")
        g = cylinder_graph(d, args.depth, args.lookahead)
        if args.format == "dot":
            _emit(g.to_dot(), args)
            return 0
        verdict, wit = chain_transitive(d, args.depth, graph=g)
        sat = saturation_sets(d, args.depth, graph=g)
        doc = {"depth": args.depth, "nodes": len(g),
               "chain_transitive": verdict, "witness": wit,
               "saturation": {"Y%d" % i: len(s)
                              for i, s in sorted(sat.items())}}
        if args.format == "text":
            lines = ["chain_transitive %s nodes=%d" % (verdict, len(g))]
            lines.extend("E%d covers %d/%d" % (i, len(s), len(g))
                         for i, s in sorted(sat.items()))
            _emit("\n".join(lines) + "\n", args)
        else:
            _emit(_dump(doc), args)
        return _exit_for(verdict, args)
    p = _parse_path(d, args.start)
    if args.closed:
        walk = pseudo_orbit(d, p, args.lookahead)
    else:
        if args.end is None:
            raise DiagramError("chain needs an end path unless --closed")
        q = _parse_path(d, args.end)
        walk = epsilon_chain(d, p, q, args.lookahead)
    if args.format == "text":
        _emit("\n".join(path_text(x) for x in walk) + "\n", args)
    else:
        _emit(_dump([path_text(x) for x in walk]), args)
    return 0


def _cover_set(d, args):
    if args.set is not None:
        with open(args.set) as fh:
            entries = json.load(fh)
        if (not isinstance(entries, list) or not entries
                or not all(isinstance(e, str) for e in entries)):
            raise DiagramError("--set wants a JSON array of path strings")
        return [_parse_path(d, e) for e in entries]
    chains = extreme_chains(d, MIN)
    cyls = []
    for i in range(1, d.k + 1):
        z = chains.vertex(i, args.depth)
        if z is None:
            raise DiagramError("cannot locate the minimal path of component "
                               "%d at depth %d" % (i, args.depth))
        cyls.append(extreme_path(d, z, args.depth, MIN))
    return cyls


def cmd_cover(args):
    d = load_diagram(args.diagram)
    cyls = _cover_set(d, args)
    res = cover_steps(d, cyls, direction=args.direction,
                      lookahead=args.lookahead)
    if isinstance(res, Diverges):
        doc = {"diverges": {"steps": res.steps,
                            "uncovered": list(res.uncovered)}}
        code = 1
    else:
        doc = {"steps": res, "direction": args.direction,
               "depth": cyls[0].depth}
        code = 0
    if args.format == "text":
        if code:
            _emit("diverges after %d steps, %d cylinders uncovered\n"
                  % (res.steps, len(res.uncovered)), args)
        else:
            _emit("%d\n" % res, args)
    else:
        _emit(_dump(doc), args)
    return code


def cmd_kpush(args):
    d = load_diagram(args.diagram)
    try:
        vec = tuple(int(x) for x in args.vec.split(","))
    except ValueError:
        raise DiagramError("--vec wants a comma list of integers")
    budget = _budget(args)
    doc = {"level": args.level, "vector": list(vec)}
    checks = []
    if args.to is not None:
        lvl, moved = pushforward(d, (args.level, vec), args.to,
                                 ideal=args.ideal)
        doc["pushforward"] = {"level": lvl, "vector": list(moved)}
    if args.zero:
        v, w = class_is_zero(d, args.level, vec, ideal=args.ideal,
                             depth_budget=budget)
        checks.append({"property": "class_is_zero", "verdict": v,
                       "witness": w})
    if args.positive:
        v, w = is_positive(d, args.level, vec, ideal=args.ideal,
                           depth_budget=budget)
        checks.append({"property": "is_positive", "verdict": v,
                       "witness": w})
    if args.bound is not None:
        v, w = bounded_norm_membership(d, args.level, vec, args.bound,
                                       ideal=args.ideal, depth_budget=budget)
        checks.append({"property": "bounded_norm_membership", "verdict": v,
                       "witness": w})
    if checks:
        doc["checks"] = checks
        doc["overall"] = worst(c["verdict"] for c in checks)
    if args.format == "text":
        lines = ["(%s) at level %d" % (", ".join(str(x) for x in vec),
                                       args.level)]
        if "pushforward" in doc:
            lines.append("-> level %d: (%s)"
                         % (args.to, ", ".join(str(x) for x in
                                               doc["pushforward"]["vector"])))
        for c in checks:
            lines.append("%-24s %s  %s" % (c["property"], c["verdict"],
                                           json.dumps(c["witness"],
                                                      sort_keys=True,
                                                      default=str)))
        _emit("\n".join(lines) + "\n", args)
    else:
        _emit(_dump(doc), args)
    if checks:
        return _exit_for(doc["overall"], args)
    return 0


def _add_common(sp, fmt=("json", "text")):
    sp.add_argument("diagram", help="diagram JSON file")
    sp.add_argument("--format", choices=fmt, default="json")
    sp.add_argument("-o", "--output", metavar="FILE",
                    help="write output here instead of stdout")


def _build_parser():
    ap = argparse.ArgumentParser(
        prog="bratteli",
        description="k-simple ordered Bratteli diagrams and their dynamics")
    sub = ap.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("validate", help="check the simplicity and order "
                        "axioms")
    _add_common(sp)
    sp.add_argument("--ordered", action="store_true",
                    help="also check the order conditions")
    sp.add_argument("--budget", type=int, default=None,
                    help="extra levels to search (default BDK_BUDGET or 10)")
    sp.add_argument("--strict", action="store_true",
                    help="treat Unknown as failure")
    sp.set_defaults(func=cmd_validate)

    sp = sub.add_parser("telescope", help="contract to a subsequence of "
                        "levels")
    _add_common(sp)
    sp.add_argument("--levels", required=True,
                    help="comma list of retained levels starting at the "
                    "root, e.g. 0,1,3")
    sp.set_defaults(func=cmd_telescope)

    sp = sub.add_parser("towers", help="print the Kakutani-Rokhlin towers "
                        "of one level")
    _add_common(sp)
    sp.add_argument("--level", type=int, default=1)
    sp.set_defaults(func=cmd_towers)

    sp = sub.add_parser("orbit", help="iterate the successor map from a "
                        "path")
    _add_common(sp)
    sp.add_argument("--start", required=True, metavar="PATH",
                    help="path as END:r1,r2,... with one-based ranks")
    sp.add_argument("--steps", type=int, required=True)
    sp.add_argument("--reverse", action="store_true",
                    help="iterate the predecessor map instead")
    sp.set_defaults(func=cmd_orbit)

    sp = sub.add_parser("transition-graphs", help="the graphs L_n read off "
                        "the markers")
    _add_common(sp, fmt=("json", "text", "dot"))
    sp.add_argument("--level", type=int, default=None,
                    help="one level only (default: every resolvable level)")
    sp.set_defaults(func=cmd_transition_graphs)

    sp = sub.add_parser("index", help="index vectors of the remainder "
                        "vertices")
    _add_common(sp)
    sp.add_argument("--level", type=int, default=None,
                    help="level to read (default: first resolvable)")
    sp.set_defaults(func=cmd_index)

    sp = sub.add_parser("check-index", help="relations, rank and transport "
                        "of the index vectors")
    _add_common(sp)
    sp.add_argument("--level", type=int, default=None)
    sp.add_argument("--strict", action="store_true")
    sp.set_defaults(func=cmd_check_index)

    sp = sub.add_parser("synthesize", help="order an unordered diagram from "
                        "prescribed d-vectors")
    _add_common(sp)
    sp.add_argument("--d", required=True, metavar="FILE",
                    help="d-vector JSON file")
    sp.set_defaults(func=cmd_synthesize)

    sp = sub.add_parser("chain", help="epsilon-chains between cylinders, "
                        "or the transitivity report")
    _add_common(sp, fmt=("json", "text", "dot"))
    sp.add_argument("--start", metavar="PATH", default=None)
    sp.add_argument("--end", metavar="PATH", default=None)
    sp.add_argument("--closed", action="store_true",
                    help="shortest closed chain through the start path")
    sp.add_argument("--depth", type=int, default=None,
                    help="cylinder depth for the transitivity report")
    sp.add_argument("--lookahead", type=int, default=2)
    sp.add_argument("--strict", action="store_true")
    sp.set_defaults(func=cmd_chain)

    sp = sub.add_parser("cover", help="steps until the sweep of a cylinder "
                        "set covers everything")
    _add_common(sp)
    sp.add_argument("--set", metavar="FILE", default=None,
                    help="JSON array of paths (default: the k minimal "
                    "cylinders)")
    sp.add_argument("--depth", type=int, default=3,
                    help="cylinder depth for the default set")
    sp.add_argument("--direction", choices=("forward", "backward"),
                    default="forward")
    sp.add_argument("--lookahead", type=int, default=2)
    sp.set_defaults(func=cmd_cover)

    sp = sub.add_parser("kpush", help="transport a K-theory vector and "
                        "test its class")
    _add_common(sp)
    sp.add_argument("--level", type=int, required=True)
    sp.add_argument("--vec", required=True,
                    help="comma list of integers over the vertex listing")
    sp.add_argument("--to", type=int, default=None,
                    help="push forward to this level")
    sp.add_argument("--ideal", action="store_true",
                    help="work in the ideal subdiagram coordinates")
    sp.add_argument("--zero", action="store_true",
                    help="test whether the class is zero")
    sp.add_argument("--positive", action="store_true",
                    help="test positivity of the class")
    sp.add_argument("--bound", type=int, default=None, metavar="M",
                    help="test membership in the norm-M bounded part")
    sp.add_argument("--budget", type=int, default=None)
    sp.add_argument("--strict", action="store_true")
    sp.set_defaults(func=cmd_kpush)

    return ap


def main(argv=None):
    args = _build_parser().parse_args(argv)
    try:
        return args.func(args)
    except DiagramError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 2
    except OSError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 2
    except json.JSONDecodeError as exc:
        print("error: not valid JSON: %s" % exc, file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
