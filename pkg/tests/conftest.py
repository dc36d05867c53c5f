"""Shared generators and naive reference implementations for the tests.

The reference implementations here are deliberately simple and structurally
different from the package code: the difference-matrix closure below relaxes
entries in full sweeps until a fixpoint instead of the package's incremental
tightening, so the two can check each other.
"""

import random
from fractions import Fraction

import pytest

from mitlgta.automata import Atom, Guard, future, history
from mitlgta.extreal import INF, NEG_INF
from mitlgta.formula import And, Interval, Next, Not, Or, Prop, Until
from mitlgta.zones import Zone, _freeze, guard_zone, universal_zone

PROPS = ["p", "q"]


# --------------------------------------------------------------------------
# naive weight algebra and closure (reference for the zone module)


def ref_wadd(w1, w2):
    """Path concatenation on weights, spelled out case by case.

    A weight (c, s) bounds a difference by c, strictly when s == 0.  A -oo
    constant absorbs any finite summand; the vacuous (+oo, <=) bound wins
    over -oo because (+oo, <) excludes the -oo route outright.  Strictness
    of an infinite sum comes only from infinite summands.
    """
    (c1, s1), (c2, s2) = w1, w2
    if c1 == NEG_INF or c2 == NEG_INF:
        other = (c2, s2) if c1 == NEG_INF else (c1, s1)
        if other == (INF, 1):
            return (INF, 1)
        return (NEG_INF, 1)
    if c1 == INF and c2 == INF:
        return (INF, s1 | s2)
    if c1 == INF:
        return (INF, s1)
    if c2 == INF:
        return (INF, s2)
    return (c1 + c2, s1 & s2)


def ref_close(rows):
    """All-pairs tightest weights by repeated full relaxation sweeps.

    Returns (rows, empty).  Weights are totally ordered as tuples, so the
    sweep is a plain shortest-path fixpoint iteration.
    """
    n = len(rows)
    rows = [list(r) for r in rows]
    # n+1 sweeps suffice without negative cycles; a change in the last sweep
    # or a negative diagonal means the system is inconsistent
    for sweep in range(n + 1):
        changed = False
        for i in range(n):
            for k in range(n):
                for j in range(n):
                    w = ref_wadd(rows[i][k], rows[k][j])
                    if w < rows[i][j]:
                        rows[i][j] = w
                        changed = True
        if any(rows[i][i] < (0, 1) for i in range(n)):
            return rows, True
        if not changed:
            return rows, False
    return rows, changed


# --------------------------------------------------------------------------
# random zones


def random_clocks(rng, max_clocks=4):
    n = rng.randint(1, max_clocks)
    out = []
    for i in range(n):
        kind = rng.choice([future, history])
        out.append(kind("%s%d" % ("f" if kind is future else "h", i)))
    return tuple(out)


def random_weight(rng, maxc=5):
    r = rng.random()
    if r < 0.08:
        return (NEG_INF, 1)
    if r < 0.16:
        return (INF, rng.randint(0, 1))
    return (Fraction(rng.randint(-maxc, maxc)), rng.randint(0, 1))


def random_constraints(rng, nclocks, maxc=5):
    out = []
    for _ in range(rng.randint(0, nclocks * 2 + 2)):
        i = rng.randint(0, nclocks)
        j = rng.randint(0, nclocks)
        if i == j:
            continue
        out.append((i, j, random_weight(rng, maxc)))
    return out


def zone_from_constraints(clocks, cons):
    """Build a zone through the package's incremental tightening."""
    z = universal_zone(clocks)
    names = [None] + list(clocks)
    atoms = tuple(
        Atom(names[i], names[j], s == 0, c) for i, j, (c, s) in cons
    )
    return guard_zone(z, Guard(atoms))


def ref_zone_rows(clocks, cons):
    """The same zone as a raw matrix, closed by the reference sweep."""
    n = len(clocks) + 1
    rows = [[(INF, 1)] * n for _ in range(n)]
    for i in range(n):
        rows[i][i] = (Fraction(0), 1)
    for k, x in enumerate(clocks):
        if x.kind == "future":
            rows[k + 1][0] = min(rows[k + 1][0], (Fraction(0), 1))
        else:
            rows[0][k + 1] = min(rows[0][k + 1], (Fraction(0), 1))
    for i, j, w in cons:
        rows[i][j] = min(rows[i][j], w)
    return ref_close(rows)


# --------------------------------------------------------------------------
# random formulas and timed words


def random_interval(rng, maxc=3):
    while True:
        a = rng.randint(0, maxc)
        b = rng.randint(a, maxc)
        lo = rng.choice([True, False])
        hi = rng.choice([True, False])
        if a == b and not (a == 0 and lo and hi):
            continue
        return Interval(a, b, lo, hi)


def random_formula(rng, depth, maxc=3):
    ops = PROPS if depth == 0 else PROPS + ["not", "and", "or", "next", "until"]
    op = rng.choice(ops)
    if op in PROPS:
        return Prop(op)
    if op == "not":
        return Not(random_formula(rng, depth - 1, maxc))
    if op == "and":
        return And(random_formula(rng, depth - 1, maxc), random_formula(rng, depth - 1, maxc))
    if op == "or":
        return Or(random_formula(rng, depth - 1, maxc), random_formula(rng, depth - 1, maxc))
    if op == "next":
        return Next(random_interval(rng, maxc), random_formula(rng, depth - 1, maxc))
    return Until(
        random_interval(rng, maxc),
        random_formula(rng, depth - 1, maxc),
        random_formula(rng, depth - 1, maxc),
    )


def random_word(rng, length):
    t = Fraction(rng.randint(0, 2), rng.randint(1, 3))
    word = []
    for _ in range(length):
        word.append((frozenset(p for p in PROPS if rng.random() < 0.5), t))
        t += Fraction(rng.randint(1, 6), rng.randint(1, 3))
    return word


@pytest.fixture
def rng():
    return random.Random(20260826)
