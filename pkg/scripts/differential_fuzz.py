#!/usr/bin/env python3
"""Differential fuzzing of the compiler against the direct evaluator.

Random (formula, finite timed word) pairs are checked two ways: the
three-valued evaluator scores the formula at every position, and the
compiled transducer network is run symbolically over the same word.
Whenever the evaluator is determinate (true or false from the finite
prefix alone), the network's feasible output set at that position must
contain the same bit.  Any disagreement is reported with a replayable
seed.
"""

import argparse
import random
import sys
import time

sys.path.insert(0, "src")

from mitlgta.formula import FALSE, TRUE, eval_at
from mitlgta.symrun import network_outputs
from mitlgta.translate import formula_to_network

sys.path.insert(0, "tests")
from conftest import random_formula, random_word  # noqa: E402


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--count", type=int, default=500)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--depth", type=int, default=3)
    ap.add_argument("--max-len", type=int, default=8)
    args = ap.parse_args(argv)

    rng = random.Random(args.seed)
    t0 = time.monotonic()
    determinate = 0
    failures = 0
    for n in range(args.count):
        phi = random_formula(rng, depth=args.depth)
        word = random_word(rng, rng.randint(1, args.max_len))
        run = network_outputs(formula_to_network(phi), word)
        for i in range(len(word)):
            v = eval_at(word, phi, i)
            if v is TRUE:
                determinate += 1
                ok = 1 in run.outputs[i]
            elif v is FALSE:
                determinate += 1
                ok = 0 in run.outputs[i]
            else:
                continue
            if not ok:
                failures += 1
                print(
                    "MISMATCH seed=%d pair=%d pos=%d formula=%s word=%s"
                    % (args.seed, n, i, phi, word)
                )
    elapsed = time.monotonic() - t0
    print(
        "%d pairs, %d determinate verdicts, %d mismatches, %.1fs"
        % (args.count, determinate, failures, elapsed)
    )
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
