"""Compilation of MITL formulas into generalized timed transducers.

Each subformula compiles to a transducer that reads the timed word (or the
output of child transducers) and emits, at every position, the truth bit of
the subformula at that position.  Future clocks carry predictions: a release
guesses the time of the next relevant event and a later guard verifies the
guess, so wrong guesses die and surviving runs emit correct bits.

An until with an interval bounded away from zero and from infinity needs
bookkeeping for "difficult" positions whose verdict depends on events
between the first and last pending witness; those use a bounded pool of
special-point clock pairs that bracket the window, recycled in FIFO order.
"""

import math
from dataclasses import dataclass, field

from .extreal import INF, NEG_INF
from .automata import (
    Atom,
    Change,
    Clock,
    Gta,
    Gtt,
    Guard,
    Rename,
    TRUE_GUARD,
    Transition,
    change,
    future,
    rename,
)

# --------------------------------------------------------------------------
# interval guards on prediction clocks
#
# A prediction clock holds minus the distance to its event, so the distance
# is the negated clock value; "beyond" includes the value -oo (no event).


def _lower_half(iv, clk):
    """distance >= lower (resp. > for an open bound)."""
    return Atom(clk, None, not iv.lower_closed, -iv.lower)


def _upper_half(iv, clk):
    """distance <= upper (resp. <); for an infinite bound: distance < +oo."""
    if iv.upper == INF:
        return Atom(None, clk, True, INF)
    return Atom(None, clk, not iv.upper_closed, iv.upper)


def _member(iv, clk):
    return (_lower_half(iv, clk), _upper_half(iv, clk))


def _before_lower(iv, clk):
    """distance strictly below the interval."""
    return Atom(None, clk, iv.lower_closed, iv.lower)


def _beyond_upper(iv, clk):
    """distance strictly above the interval (includes no-event); None if unbounded."""
    if iv.upper == INF:
        return None
    return Atom(clk, None, iv.upper_closed, -iv.upper)


def _pin_neg_inf(clk):
    return Atom(clk, None, False, NEG_INF)


def _membership_branches(iv, cx, cy):
    """Disjoint guard splits deciding: is some pending witness distance in iv?

    cx predicts the nearest pending witness, cy the farthest; every distance
    between them is a candidate only at its two ends here (one-sided case),
    so membership of either end decides.  Returns (atoms, bit) branches.
    """
    m_x, m_y = _member(iv, cx), _member(iv, cy)
    bl_x, bl_y = _before_lower(iv, cx), _before_lower(iv, cy)
    bu_x, bu_y = _beyond_upper(iv, cx), _beyond_upper(iv, cy)
    out = [(m_x, 1), ((bl_x,) + m_y, 1), ((bl_x, bl_y), 0)]
    if bu_x is not None:
        out += [
            ((bu_x,) + m_y, 1),
            ((bl_x, bu_y), 0),
            ((bu_x, bl_y), 0),
            ((bu_x, bu_y), 0),
        ]
    return out


# --------------------------------------------------------------------------
# leaf and gate transducers


def _all_letters(props):
    props = sorted(props)
    out = []
    for mask in range(1 << len(props)):
        out.append(frozenset(p for i, p in enumerate(props) if mask >> i & 1))
    return out


def _one_state_gtt(alphabet, out_fn):
    s = "s"
    trans = [Transition(s, a, (), s, out_fn(a)) for a in alphabet]
    return Gtt({s}, set(alphabet), (), trans, [(s, TRUE_GUARD)], {s})


def atomic_transducer(prop, props):
    """Reads sets of propositions, outputs membership of one proposition."""
    return _one_state_gtt(_all_letters(props), lambda a: int(prop in a))


def not_gate():
    return _one_state_gtt([0, 1], lambda b: 1 - b)


def and_gate():
    return _one_state_gtt([(0, 0), (0, 1), (1, 0), (1, 1)], lambda p: p[0] & p[1])


def or_gate():
    return _one_state_gtt([(0, 0), (0, 1), (1, 0), (1, 1)], lambda p: p[0] | p[1])


def next_transducer(iv):
    """Timed next: output 1 iff the next bit is 1 and the gap to it is in iv.

    State L1 (L2) asserts the bit at the current position is 1 (0); clock x
    predicts the arrival of the next position and is verified to be 0 on
    every transition, then re-released.
    """
    x = future("x")
    states = {"L1", "L2"}
    base = (Guard(atom_eq_zero(x)), change(x))
    trans = []
    for src, bit in (("L1", 1), ("L2", 0)):
        # into L1: the gap guard on the freshly released x decides the output
        trans.append(Transition(src, bit, base + (Guard(_member(iv, x)),), "L1", 1))
        trans.append(Transition(src, bit, base + (Guard((_before_lower(iv, x),)),), "L1", 0))
        bu = _beyond_upper(iv, x)
        if bu is not None:
            trans.append(Transition(src, bit, base + (Guard((bu,)),), "L1", 0))
        trans.append(Transition(src, bit, base, "L2", 0))
    init = [(s, TRUE_GUARD) for s in sorted(states)]
    return Gtt(states, {0, 1}, (x,), trans, init, set(states))


def atom_eq_zero(clk):
    return (Atom(clk, None, False, 0), Atom(None, clk, False, 0))


# --------------------------------------------------------------------------
# until, phase 1: the witness-chain automaton
#
# Reads pairs (p, q) of operand bits.  State SQ: q holds now and "p until q"
# holds; SPU: "p until q" holds but q does not hold now; SNO: "p until q"
# fails now.  Clock x predicts the next q-position on the live chain, clock
# y the last one (the position after which the chain breaks); both are
# verified at their events.  A transition is a chain end ("last witness")
# when q holds now and the chain does not continue past this position.

SQ, SPU, SNO = "SQ", "SPU", "SNO"


@dataclass(frozen=True)
class ARecord:
    src: str
    letter: tuple  # (p bit, q bit)
    program: tuple
    dst: str
    alpha: bool  # chain ends here
    tag: str  # T1 (q, chain continues) | T2 (no q, chain live) | ZERO


def _a_records(x, y):
    pi1 = (Guard(atom_eq_zero(x)), change(x))
    pi2 = (Guard(atom_eq_zero(x) + atom_eq_zero(y)), change(x, y))
    recs = []
    for dst in (SQ, SPU):
        recs.append(ARecord(SQ, (1, 1), pi1, dst, False, "T1"))
    recs.append(ARecord(SQ, (1, 1), pi2, SNO, True, "T1"))
    for dst in (SQ, SPU, SNO):
        recs.append(ARecord(SQ, (0, 1), pi2, dst, True, "T1"))
    for dst in (SQ, SPU):
        recs.append(ARecord(SPU, (1, 0), (), dst, False, "T2"))
    for dst in (SQ, SPU, SNO):
        recs.append(ARecord(SNO, (0, 0), (), dst, False, "ZERO"))
    recs.append(ARecord(SNO, (1, 0), (), SNO, False, "ZERO"))
    return recs


UNTIL_LETTERS = [(0, 0), (0, 1), (1, 0), (1, 1)]


def needs_special_points(iv):
    """Intervals excluding 0 with a finite upper bound need the pair pool."""
    return iv.upper != INF and not iv.contains_zero()


def until_automaton_A(iv):
    """The chain automaton with outputs resolved; one-sided intervals only."""
    if needs_special_points(iv):
        raise ValueError("interval %s needs the special-point construction" % iv)
    x, y = future("x"), future("y")
    zero_in = iv.contains_zero()
    trans = []
    for r in _a_records(x, y):
        if r.tag == "ZERO":
            trans.append(Transition(r.src, r.letter, r.program, r.dst, 0))
        elif r.alpha or r.tag == "T1":
            # at a q-position the distance-0 witness decides outright
            bit = 1 if zero_in else (0 if r.alpha else None)
            if bit is not None:
                trans.append(Transition(r.src, r.letter, r.program, r.dst, bit))
                continue
            for atoms, b in _membership_branches(iv, x, y):
                trans.append(
                    Transition(r.src, r.letter, r.program + (Guard(atoms),), r.dst, b)
                )
        else:  # T2
            for atoms, b in _membership_branches(iv, x, y):
                trans.append(
                    Transition(r.src, r.letter, r.program + (Guard(atoms),), r.dst, b)
                )
    states = {SQ, SPU, SNO}
    init = [(s, TRUE_GUARD) for s in (SQ, SPU, SNO)]
    return Gtt(states, set(UNTIL_LETTERS), (x, y), trans, init, set(states))


# --------------------------------------------------------------------------
# until, phase 2: the special-point bookkeeper


@dataclass(frozen=True)
class BRecord:
    a_states: frozenset  # chain-automaton states this pairs with
    qb: object  # required q bit, or None
    src: tuple
    program: tuple
    dst: tuple
    output: object  # bit, or None (no claim; chain automaton decides)
    discharge: bool = False  # pairs only with chain-ending transitions


@dataclass
class UntilBFragment:
    k: int
    clocks: tuple  # x_1, y_1, ..., x_k, y_k
    states: set
    records: list
    initial_guard: Guard


def pair_pool_size(iv):
    """Number of special-point pairs needed for an interval <b, c>."""
    b, c = iv.lower, iv.upper
    return 1 + max(1, math.ceil(b / (c - b)))


def until_automaton_B(iv, x=None, y=None):
    """The bookkeeping layer for intervals bounded away from 0 and oo.

    Tracks up to k special-point clock pairs bracketing windows whose
    verdict could not be read off the chain clocks x, y directly; pairs are
    verified at their events (x_i first, then y_i) and recycled by a cyclic
    renaming.  Returned as an inspectable fragment to be paired with the
    chain automaton.
    """
    if not needs_special_points(iv):
        raise ValueError("interval %s does not need special points" % iv)
    x = x or future("x")
    y = y or future("y")
    k = pair_pool_size(iv)
    xs = [None] + [future("x%d" % i) for i in range(1, k + 1)]
    ys = [None] + [future("y%d" % i) for i in range(1, k + 1)]
    live = frozenset((SQ, SPU))
    recs = []
    idle = (0, 1)

    def open_pair(i, bit):
        """Release pair i to bracket the upper end of the current window."""
        split = _lower_half(iv, xs[i]) if bit else _before_lower(iv, xs[i])
        return (
            change(xs[i], ys[i]),
            Guard((_beyond_upper(iv, ys[i]), _upper_half(iv, xs[i]), split)),
        )

    # --- from the idle state -------------------------------------------
    recs.append(BRecord(frozenset((SNO,)), None, idle, (), idle, 0))
    m_x, m_y = _member(iv, x), _member(iv, y)
    bl_x, bl_y = _before_lower(iv, x), _before_lower(iv, y)
    bu_x, bu_y = _beyond_upper(iv, x), _beyond_upper(iv, y)
    easy = [
        (m_x, 1),
        ((bl_x,) + m_y, 1),
        ((bu_x,), 0),
        ((bl_x, bl_y), 0),
    ]
    for atoms, bit in easy:
        recs.append(BRecord(live, None, idle, (Guard(atoms),), idle, bit))
    for bit in (1, 0):
        recs.append(
            BRecord(
                live, None, idle, (Guard((bl_x, bu_y)),) + open_pair(1, bit), (1, 1), bit
            )
        )

    # --- from states with active pairs ----------------------------------
    shift = rename(
        {
            **{xs[i]: xs[i % k + 1] for i in range(1, k + 1)},
            **{ys[i]: ys[i % k + 1] for i in range(1, k + 1)},
        }
    )
    blue = (
        Guard(atom_eq_zero(xs[1])),
        change(xs[1]),
        Guard((_pin_neg_inf(xs[1]),)),
    )
    black = (
        Guard(atom_eq_zero(ys[1])),
        change(ys[1]),
        Guard((_pin_neg_inf(ys[1]),)),
    )
    for j in range(1, k + 1):
        cov = _lower_half(iv, ys[j])
        ncv = _before_lower(iv, ys[j])
        out_branches = []  # (steps, bit, pairs opened)
        for atoms, bit in [
            ((cov,) + m_x, 1),
            ((cov, bl_x) + m_y, 1),
            ((cov, bu_x) + m_y, 1),
            ((cov, bl_x, bl_y), 0),
            ((cov, bl_x, bu_y), 0),
            ((cov, bu_x, bl_y), 0),
            ((cov, bu_x, bu_y), 0),
            ((ncv, _upper_half(iv, y), _lower_half(iv, y)), 1),
            ((ncv, bl_y), 0),
        ]:
            out_branches.append(((Guard(atoms),), bit, 0))
        if j < k:
            for bit in (1, 0):
                out_branches.append(
                    ((Guard((ncv, bu_y)),) + open_pair(j + 1, bit), bit, 1)
                )
        for steps, bit, dk in out_branches:
            kk = j + dk
            # waiting for the oldest pair's first event
            recs.append(BRecord(live, None, (j, 1), steps, (kk, 1), bit))
            recs.append(BRecord(live, 1, (j, 1), steps + blue, (kk, 2), bit))
            # first event seen; waiting for the pair's closing q
            recs.append(BRecord(live, 0, (j, 2), steps, (kk, 2), bit))
            closing = steps + black
            if kk == 1:
                recs.append(BRecord(live, 1, (j, 2), closing, idle, bit))
            else:
                recs.append(BRecord(live, 1, (j, 2), closing + (shift,), (kk - 1, 1), bit))
                recs.append(
                    BRecord(live, 1, (j, 2), closing + (shift,) + blue, (kk - 1, 2), bit)
                )

    # chain end: each pending first event must be exactly now (its opening
    # guard rules out "never"), each pending closing event can no longer
    # occur and is parked; the pool empties.  The chain clocks released by
    # the ending transition stay unconstrained: they are the next chain's
    # predictions and are examined there.
    recs.append(BRecord(live, 1, idle, (), idle, 0, True))
    for j in range(1, k + 1):
        for m in (1, 2):
            pend_x = xs[1 : j + 1] if m == 1 else xs[2 : j + 1]
            clks = tuple(pend_x) + tuple(ys[1 : j + 1])
            prog = ()
            if pend_x:
                prog += (
                    Guard(tuple(a for c in pend_x for a in atom_eq_zero(c))),
                )
            prog += (
                change(*clks),
                Guard(tuple(_pin_neg_inf(c) for c in clks)),
            )
            recs.append(BRecord(live, 1, (j, m), prog, idle, 0, True))

    states = {idle} | {(j, m) for j in range(1, k + 1) for m in (1, 2)}
    pins = Guard(tuple(_pin_neg_inf(c) for c in xs[1:] + ys[1:]))
    return UntilBFragment(k, tuple(xs[1:] + ys[1:]), states, recs, pins)


def until_transducer(iv):
    """Transducer for "p until q within iv" over operand bit pairs (p, q)."""
    if not needs_special_points(iv):
        return until_automaton_A(iv)
    x, y = future("x"), future("y")
    frag = until_automaton_B(iv, x, y)
    arecs = _a_records(x, y)
    trans = []
    for ra in arecs:
        qb = ra.letter[1]
        override = ra.alpha or ra.src == SNO
        for rb in frag.records:
            if ra.src not in rb.a_states:
                continue
            if rb.qb is not None and rb.qb != qb:
                continue
            if rb.discharge != ra.alpha:
                # a chain end discharges the pending pool; anything else
                # keeps the ordinary bookkeeping records
                continue
            out = 0 if override else rb.output
            trans.append(
                Transition(
                    (ra.src, rb.src),
                    ra.letter,
                    ra.program + rb.program,
                    (ra.dst, rb.dst),
                    out,
                )
            )
    initial = [((sa, (0, 1)), frag.initial_guard) for sa in (SQ, SPU, SNO)]
    states = {(sa, sb) for sa in (SQ, SPU, SNO) for sb in frag.states}
    gtt = Gtt(
        states,
        set(UNTIL_LETTERS),
        (x, y) + frag.clocks,
        trans,
        initial,
        set(states),
    )
    return trim_unreachable(gtt)


def trim_unreachable(gta):
    reach = {s for s, _ in gta.initial}
    frontier = list(reach)
    by_src = {}
    for t in gta.transitions:
        by_src.setdefault(t.src, []).append(t)
    while frontier:
        s = frontier.pop()
        for t in by_src.get(s, ()):
            if t.dst not in reach:
                reach.add(t.dst)
                frontier.append(t.dst)
    gta.states = reach
    gta.transitions = [t for t in gta.transitions if t.src in reach]
    gta.buchi = gta.buchi & reach
    return gta


# --------------------------------------------------------------------------
# wiring: clock namespaces, product, composition


def remap_clocks(gta, prefix):
    mapping = {c: Clock(prefix + c.name, c.kind) for c in gta.clocks}

    def prog(steps):
        out = []
        for s in steps:
            if isinstance(s, Guard):
                out.append(
                    Guard(
                        tuple(
                            Atom(
                                mapping[a.x] if a.x is not None else None,
                                mapping[a.y] if a.y is not None else None,
                                a.strict,
                                a.c,
                            )
                            for a in s.atoms
                        )
                    )
                )
            elif isinstance(s, Change):
                out.append(Change(frozenset(mapping[c] for c in s.clocks)))
            elif isinstance(s, Rename):
                out.append(rename({mapping[a]: mapping[b] for a, b in s.pairs}))
        return tuple(out)

    cls = Gtt if isinstance(gta, Gtt) else Gta
    return cls(
        set(gta.states),
        set(gta.alphabet),
        tuple(mapping[c] for c in gta.clocks),
        [Transition(t.src, t.letter, prog(t.program), t.dst, t.output) for t in gta.transitions],
        [(s, prog((g,))[0]) for s, g in gta.initial],
        set(gta.buchi),
    )


def _require_all_accepting(gtt, what):
    if gtt.buchi != gtt.states:
        raise ValueError("%s requires an all-accepting transducer" % what)


def _combine(a, b, feed, out_of):
    """Lockstep pairing, built from the reachable composite states only.

    ``feed(ta)`` selects which letter of ``b`` runs alongside transition
    ``ta`` of ``a``; ``out_of(ta, tb)`` is the paired transition's output.
    """
    a_by = {}
    for t in a.transitions:
        a_by.setdefault(t.src, []).append(t)
    b_by = {}
    for t in b.transitions:
        b_by.setdefault((t.src, t.letter), []).append(t)
    initial = [
        ((s1, s2), Guard(g1.atoms + g2.atoms))
        for s1, g1 in a.initial
        for s2, g2 in b.initial
    ]
    seen = {s for s, _ in initial}
    work = list(seen)
    trans = []
    while work:
        src = work.pop()
        s1, s2 = src
        for ta in a_by.get(s1, ()):
            for tb in b_by.get((s2, feed(ta)), ()):
                dst = (ta.dst, tb.dst)
                trans.append(
                    Transition(src, ta.letter, ta.program + tb.program,
                               dst, out_of(ta, tb))
                )
                if dst not in seen:
                    seen.add(dst)
                    work.append(dst)
    return Gtt(seen, set(a.alphabet), a.clocks + b.clocks, trans, initial,
               set(seen))


def product(t1, t2):
    """Same-input product; outputs become pairs of bits."""
    _require_all_accepting(t1, "product")
    _require_all_accepting(t2, "product")
    a = remap_clocks(t1, "l.")
    b = remap_clocks(t2, "r.")
    return _combine(a, b, lambda ta: ta.letter,
                    lambda ta, tb: (ta.output, tb.output))


def compose(first, second):
    """Feed the outputs of `first` into `second` (run in lockstep)."""
    _require_all_accepting(first, "compose")
    _require_all_accepting(second, "compose")
    a = remap_clocks(first, "l.")
    b = remap_clocks(second, "r.")
    return _combine(a, b, lambda ta: ta.output, lambda ta, tb: tb.output)


# --------------------------------------------------------------------------
# formula compiler


@dataclass
class Network:
    """Transducer DAG mirroring a formula tree, kept factored.

    ``nodes`` are small component transducers in a topological order
    (children first), with clock names made globally unique; ``children[i]``
    lists the nodes whose output bits form node i's input letter (empty for
    leaves, which read the projected word letter).  Keeping the components
    separate avoids the multiplicative transition blow-up of materialized
    products; a symbolic evaluator can thread one zone through all
    components and drop dead branches as soon as any component's guard
    fails.
    """

    nodes: list
    children: list
    clocks: tuple
    props: tuple

    def node_letter(self, i, word_letter, outs):
        """The input letter node i reads, given the children's outputs."""
        ch = self.children[i]
        if not ch:
            return frozenset(word_letter & set(self.props))
        if len(ch) == 1:
            return outs[ch[0]]
        return tuple(outs[c] for c in ch)


def formula_to_network(phi, props=None):
    """Compile a formula into a factored network of component transducers."""
    from .formula import And, Next, Not, Or, Prop, Until

    if props is None:
        props = sorted(phi.props()) or ["p0"]
    nodes = []
    children = []

    def add(gtt, childs):
        i = len(nodes)
        nodes.append(remap_clocks(gtt, "n%d." % i))
        children.append(tuple(childs))
        return i

    def build(f):
        if isinstance(f, Prop):
            return add(atomic_transducer(f.name, props), ())
        if isinstance(f, Not):
            return add(not_gate(), (build(f.child),))
        if isinstance(f, And):
            return add(and_gate(), (build(f.left), build(f.right)))
        if isinstance(f, Or):
            return add(or_gate(), (build(f.left), build(f.right)))
        if isinstance(f, Next):
            return add(next_transducer(f.interval), (build(f.child),))
        if isinstance(f, Until):
            return add(until_transducer(f.interval),
                       (build(f.left), build(f.right)))
        raise TypeError(f)

    build(phi)
    clocks = tuple(c for g in nodes for c in g.clocks)
    return Network(nodes, children, clocks, tuple(props))


def formula_to_gtt(phi, props=None):
    """Compile a formula into a transducer emitting its truth bit per position."""
    from .formula import And, Next, Not, Or, Prop, Until

    if props is None:
        props = sorted(phi.props()) or ["p0"]

    def build(f):
        if isinstance(f, Prop):
            return atomic_transducer(f.name, props)
        if isinstance(f, Not):
            return compose(build(f.child), not_gate())
        if isinstance(f, And):
            return compose(product(build(f.left), build(f.right)), and_gate())
        if isinstance(f, Or):
            return compose(product(build(f.left), build(f.right)), or_gate())
        if isinstance(f, Next):
            return compose(build(f.child), next_transducer(f.interval))
        if isinstance(f, Until):
            return compose(
                product(build(f.left), build(f.right)), until_transducer(f.interval)
            )
        raise TypeError(f)

    return build(phi)


def gtt_to_gta(gtt):
    """Acceptor of the words on which the transducer's first output bit is 1."""
    trans = []
    for t in gtt.transitions:
        if t.output == 1:
            trans.append(Transition((t.src, 0), t.letter, t.program, (t.dst, 1), None))
        trans.append(Transition((t.src, 1), t.letter, t.program, (t.dst, 1), None))
    states = {(s, ph) for s in gtt.states for ph in (0, 1)}
    initial = [((s, 0), g) for s, g in gtt.initial]
    buchi = {(s, 1) for s in gtt.buchi}
    return trim_unreachable(
        Gta(states, set(gtt.alphabet), gtt.clocks, trans, initial, buchi)
    )


def compile_report(phi, props=None):
    """Sizes and per-until bookkeeping statistics for a compiled formula."""
    from .formula import And, Next, Not, Or, Prop, Until

    untils = []

    def walk(f):
        if isinstance(f, Until):
            iv = f.interval
            if needs_special_points(iv):
                k = pair_pool_size(iv)
                t = until_transducer(iv)
                untils.append(
                    {
                        "interval": str(iv),
                        "k": k,
                        "locations": len(t.states),
                        "location_bound_6k": 6 * k,
                        "future_clocks": len(t.future_clocks()),
                        "pair_pool_states": 2 * k + 1,
                    }
                )
            else:
                untils.append({"interval": str(iv), "k": 0, "locations": 3, "future_clocks": 2})
            walk(f.left)
            walk(f.right)
        elif isinstance(f, (Not, Next)):
            walk(f.child)
        elif isinstance(f, (And, Or)):
            walk(f.left)
            walk(f.right)

    walk(phi)
    gtt = formula_to_gtt(phi, props)
    rep = dict(gtt.stats())
    rep["untils"] = untils
    return rep
