#!/usr/bin/env python3
"""Print a size table for compiled formulas.

For every bounded-until subformula the table reports the bookkeeping pool
size k, measured locations against the 6k bound, and the future-clock
count (always 2k + 2).  Formulas come from the command line; without
arguments a default selection is used.
"""

import argparse
import sys

sys.path.insert(0, "src")

from mitlgta.formula import parse
from mitlgta.translate import compile_report

DEFAULTS = [
    "p",
    "X[1,2] p",
    "T U[1,2] p",
    "p U[2,3] q",
    "p U[1,4] q",
    "p U(2,5] q",
    "(p U[1,2] q) & X[0,3] p",
]


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("formulas", nargs="*", default=DEFAULTS)
    args = ap.parse_args(argv)
    for text in args.formulas:
        phi = parse(text)
        rep = compile_report(phi)
        print("%s" % text)
        print(
            "  transducer: %d locations, %d transitions, %d future + %d history clocks"
            % (
                rep["states"],
                rep["transitions"],
                rep["future_clocks"],
                rep["history_clocks"],
            )
        )
        for u in rep["untils"]:
            if u["k"]:
                print(
                    "  until %s: k=%d locations=%d (bound %d) future_clocks=%d"
                    " pool_states=%d"
                    % (
                        u["interval"],
                        u["k"],
                        u["locations"],
                        u["location_bound_6k"],
                        u["future_clocks"],
                        u["pair_pool_states"],
                    )
                )
            else:
                print("  until %s: no bookkeeping pool needed" % u["interval"])
    return 0


if __name__ == "__main__":
    sys.exit(main())
