"""Command-line front end: compile formulas, decide satisfiability, model
check, simulate runs, and dump zone graphs.

Exit codes for verdict-producing commands: 0 = empty/UNSAT/property holds,
1 = non-empty/SAT/property violated, 2 = inconclusive (budget exhausted).
"""

import argparse
import json
import sys

from .automata import gta_from_json, gta_to_dot, gta_to_json, run_concrete
from .explore import build_zone_graph, check_liveness, check_sat, model_check
from .extreal import rat, rat_str
from .formula import parse, word_from_json
from .translate import (
    formula_to_gtt,
    gtt_to_gta,
    needs_special_points,
    pair_pool_size,
    until_transducer,
)


def _read_formula(arg):
    text = sys.stdin.read() if arg == "-" else arg
    return parse(text)


def _write(path, text):
    if path == "-" or path is None:
        print(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


def _collect_untils(phi):
    from .formula import And, Next, Not, Or, Prop, Until

    out = []

    def walk(f):
        if isinstance(f, Until):
            out.append(f.interval)
            walk(f.left)
            walk(f.right)
        elif isinstance(f, (Not, Next)):
            walk(f.child)
        elif isinstance(f, (And, Or)):
            walk(f.left)
            walk(f.right)

    walk(phi)
    return out


def cmd_compile(args):
    phi = _read_formula(args.formula)
    gtt = formula_to_gtt(phi)
    gta = gtt_to_gta(gtt)
    s = gtt.stats()
    print("formula: %s" % phi)
    print(
        "transducer: %d locations, %d transitions, %d future clocks, %d history clocks"
        % (s["states"], s["transitions"], s["future_clocks"], s["history_clocks"])
    )
    sa = gta.stats()
    print("acceptor: %d locations, %d transitions" % (sa["states"], sa["transitions"]))
    for iv in _collect_untils(phi):
        if needs_special_points(iv):
            k = pair_pool_size(iv)
            t = until_transducer(iv)
            locs = len(t.states)
            fut = len(t.future_clocks())
            ok = "ok" if locs <= 6 * k else "EXCEEDED"
            print(
                "until %s: k=%d, locations=%d (bound 6k=%d: %s), future clocks=%d (=2k+2)"
                % (iv, k, locs, 6 * k, ok, fut)
            )
            print(
                "until %s: pair-pool fragment has %d locations; note: the closed-form "
                "estimate 2k-1=%d undercounts, the enumerated construction gives 2k+1=%d "
                "(measured value matches the enumeration)"
                % (iv, 2 * k + 1, 2 * k - 1, 2 * k + 1)
            )
        else:
            print("until %s: no special points needed (3 locations, 2 future clocks)" % iv)
    if args.out:
        _write(args.out + ".gtt.json", gta_to_json(gtt))
        _write(args.out + ".gta.json", gta_to_json(gta))
        print("wrote %s.gtt.json and %s.gta.json" % (args.out, args.out))
    if args.dot:
        _write(args.dot, gta_to_dot(gta))
    return 0


def _report_liveness(res, args, kind="sat"):
    names = {
        "sat": {"NonEmpty": "SAT", "Empty": "UNSAT", "Inconclusive": "INCONCLUSIVE"},
        "mc": {
            "NonEmpty": "VIOLATED",
            "Empty": "HOLDS",
            "Inconclusive": "INCONCLUSIVE",
        },
    }[kind]
    print("verdict: %s" % names[res.verdict])
    if res.verdict == "NonEmpty" and res.validation is not None:
        lasso = res.validation.lasso
        print("lasso period: %s" % rat_str(res.validation.period))
        print("lasso: %s" % json.dumps(lasso.to_json(), sort_keys=True))
        if args.witness:
            _write(args.witness, json.dumps(lasso.to_json(), sort_keys=True, indent=1))
    for d in res.diagnostics:
        print("note: %s" % d)
    return res.exit_code


def cmd_check_sat(args):
    phi = _read_formula(args.formula)
    res = check_sat(phi, budget=args.budget, seed=args.seed)
    return _report_liveness(res, args, "sat")


def cmd_model_check(args):
    with open(args.system) as fh:
        system = gta_from_json(fh.read())
    phi = _read_formula(args.formula)
    res = model_check(system, phi, budget=args.budget, seed=args.seed)
    return _report_liveness(res, args, "mc")


def cmd_simulate(args):
    with open(args.automaton) as fh:
        gta = gta_from_json(fh.read())
    with open(args.word) as fh:
        word = word_from_json(fh.read())
    with open(args.steps) as fh:
        plan = json.loads(fh.read())
    byname = {c.name: c for c in gta.clocks}
    steps = []
    for entry in plan:
        tr = gta.transitions[entry["transition"]]
        choices = {byname[k]: rat(v) for k, v in entry.get("choices", {}).items()}
        steps.append((tr, choices))
    res = run_concrete(gta, word, steps)
    for i, v in enumerate(res.valuations):
        print(
            "step %d: %s"
            % (i, {c.name: rat_str(val) for c, val in sorted(v.items())})
        )
    print("outputs: %s" % res.outputs)
    if not res.ok:
        print("blocked at position %d: %s" % (res.position, res.reason))
        return 1
    print("run complete in state %s" % (res.state,))
    return 0


def cmd_zonegraph(args):
    if args.automaton:
        with open(args.automaton) as fh:
            gta = gta_from_json(fh.read())
    else:
        gta = gtt_to_gta(formula_to_gtt(_read_formula(args.formula)))
    from .automata import eliminate_renamings

    graph = build_zone_graph(eliminate_renamings(gta), budget=args.budget)
    print(
        "zone graph: %d nodes, %d edges, %s"
        % (
            len(graph.nodes),
            sum(len(e) for e in graph.edges.values()),
            "closed" if graph.closed else "budget exhausted",
        )
    )
    if args.dot:
        lines = ["digraph zones {"]
        for nid, (state, zone) in sorted(graph.nodes.items()):
            shape = "doublecircle" if nid in graph.buchi else "circle"
            lines.append('  n%d [label="%s", shape=%s];' % (nid, state, shape))
        for nid, succ in sorted(graph.edges.items()):
            for t, dst in succ:
                lines.append('  n%d -> n%d;' % (nid, dst))
        lines.append("}")
        _write(args.dot, "\n".join(lines))
    return 0 if graph.closed else 2


def main(argv=None):
    top = argparse.ArgumentParser(
        prog="mitlgta",
        description="MITL to timed-automata compiler and liveness checker",
    )
    sub = top.add_subparsers(dest="command", required=True)

    def common(p, formula=True):
        if formula:
            p.add_argument("formula", help="formula text, or - to read stdin")
        p.add_argument("--budget", type=int, default=10000, help="zone graph node budget")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--no-nonzeno", action="store_true", help="skip the non-Zeno guard")
        p.add_argument(
            "--threads",
            type=int,
            default=1,
            help="accepted for interface stability; exploration runs sequentially",
        )
        p.add_argument("--witness", help="write the witness lasso JSON here")
        p.add_argument("--dot", help="write a DOT rendering here")

    p = sub.add_parser("compile", help="compile a formula; print a size report")
    common(p)
    p.add_argument("--out", help="prefix for the transducer/acceptor JSON files")
    p.set_defaults(fn=cmd_compile)

    p = sub.add_parser("check-sat", help="satisfiability over infinite timed words")
    common(p)
    p.set_defaults(fn=cmd_check_sat)

    p = sub.add_parser("model-check", help="does a system satisfy a formula")
    common(p)
    p.add_argument("--system", required=True, help="system automaton JSON file")
    p.set_defaults(fn=cmd_model_check)

    p = sub.add_parser("simulate", help="replay a concrete run on an automaton")
    common(p, formula=False)
    p.add_argument("--automaton", required=True)
    p.add_argument("--word", required=True, help="timed word JSON file")
    p.add_argument("--steps", required=True, help="transition/choices plan JSON file")
    p.set_defaults(fn=cmd_simulate)

    p = sub.add_parser("zonegraph", help="explore and dump the zone graph")
    common(p, formula=False)
    p.add_argument("--automaton", help="automaton JSON file")
    p.add_argument("--formula", help="or a formula to compile first")
    p.set_defaults(fn=cmd_zonegraph)

    args = top.parse_args(argv)
    return args.fn(args)


if __name__ == "__main__":
    sys.exit(main())
