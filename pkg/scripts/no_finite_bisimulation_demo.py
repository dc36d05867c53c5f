#!/usr/bin/env python3
"""Show a zone graph whose node count grows without bound.

The automaton below widens the gap between a never-reset history clock
(recording absolute age) and a periodically reset one.  No finite set of
zones covers its reachable valuations under equivalence-only covering,
so exploration keeps discovering fresh nodes at every budget and the
liveness check returns Inconclusive instead of a verdict.
"""

import argparse
import sys
from fractions import Fraction

sys.path.insert(0, "src")

from mitlgta.automata import Atom, Gta, Guard, Transition, atom_eq, change, future, history
from mitlgta.explore import build_zone_graph, check_liveness


def drift_gta():
    x = future("x")
    y = history("y")
    z = history("z")
    b = frozenset(["b"])
    c = frozenset(["c"])
    d = frozenset(["d"])
    t_loop1 = Transition(
        "l1",
        b,
        (Guard(tuple(atom_eq(y, 1)) + (Atom(x, None, True, Fraction(0)),)), change(y)),
        "l1",
    )
    t_move = Transition("l1", c, (Guard(tuple(atom_eq(x, 0)) + tuple(atom_eq(y, 1))),), "l2")
    t_loop2 = Transition("l2", d, (Guard(tuple(atom_eq(y, 1))), change(y)), "l2")
    g0 = Guard(tuple(atom_eq(y, 0)) + tuple(atom_eq(z, 0)))
    return Gta(
        states={"l1", "l2"},
        alphabet={b, c, d},
        clocks=(x, y, z),
        transitions=[t_loop1, t_move, t_loop2],
        initial=[("l1", g0)],
        buchi={"l2"},
    )


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--budgets", type=int, nargs="+", default=[100, 400, 1600, 6400])
    ap.add_argument("--liveness-budget", type=int, default=10000)
    args = ap.parse_args(argv)

    gta = drift_gta()
    print("budget  nodes  closed")
    prev = 0
    for budget in args.budgets:
        graph = build_zone_graph(gta, budget=budget)
        print("%6d  %5d  %s" % (budget, len(graph.nodes), "yes" if graph.closed else "no"))
        assert len(graph.nodes) >= prev
        prev = len(graph.nodes)

    res = check_liveness(gta, budget=args.liveness_budget)
    print("liveness check at budget %d: %s" % (args.liveness_budget, res.verdict))
    return 0


if __name__ == "__main__":
    sys.exit(main())
