"""Generalized timed automata and transducers with future and history clocks.

A future clock holds a nonpositive value (or minus infinity): it counts up
toward a predicted event and must reach exactly zero when the event occurs.
A history clock holds a nonnegative value (or plus infinity): it counts up
from a past event.  Transitions carry *programs*, sequences of

* ``Guard`` -- a conjunction of difference constraints ``x - y < c`` or
  ``x - y <= c`` (either side may be the constant-zero reference),
* ``Change`` -- reset the named history clocks to 0 and release the named
  future clocks to a nondeterministically chosen value in [-inf, 0],
* ``Rename`` -- permute the clocks: the new value of ``x`` is the old value
  of ``sigma(x)``.
"""

import json
from dataclasses import dataclass, field
from fractions import Fraction

from .extreal import INF, NEG_INF, ext_sub, rat, rat_str

# --------------------------------------------------------------------------
# clocks and programs


@dataclass(frozen=True, order=True)
class Clock:
    name: str
    kind: str  # "future" | "history"

    def __post_init__(self):
        if self.kind not in ("future", "history"):
            raise ValueError(self.kind)

    def __str__(self):
        return self.name


def future(name):
    return Clock(name, "future")


def history(name):
    return Clock(name, "history")


@dataclass(frozen=True)
class Atom:
    """Constraint x - y < c (strict) or x - y <= c; None stands for 0."""

    x: object  # Clock or None
    y: object  # Clock or None
    strict: bool
    c: object  # int | Fraction | +-INF

    def holds(self, v):
        lhs = v[self.x] if self.x is not None else 0
        rhs = v[self.y] if self.y is not None else 0
        d = ext_sub(lhs, rhs)
        return d < self.c if self.strict else d <= self.c

    def __str__(self):
        lhs = str(self.x) if self.x is not None else "0"
        rhs = str(self.y) if self.y is not None else "0"
        op = "<" if self.strict else "<="
        return "%s - %s %s %s" % (lhs, rhs, op, rat_str(self.c))


def atom_eq(x, value):
    """Atoms pinning clock x to an exact extended value."""
    if value == INF:
        return (Atom(None, x, False, NEG_INF),)
    if value == NEG_INF:
        return (Atom(x, None, False, NEG_INF),)
    return (Atom(x, None, False, value), Atom(None, x, False, -value))


@dataclass(frozen=True)
class Guard:
    atoms: tuple

    def holds(self, v):
        return all(a.holds(v) for a in self.atoms)

    def __str__(self):
        return " & ".join(str(a) for a in self.atoms) if self.atoms else "true"


TRUE_GUARD = Guard(())


@dataclass(frozen=True)
class Change:
    clocks: frozenset

    def __str__(self):
        return "change{%s}" % ",".join(sorted(c.name for c in self.clocks))


@dataclass(frozen=True)
class Rename:
    pairs: tuple  # sorted tuple of (Clock, Clock); identity entries may be omitted

    @property
    def mapping(self):
        return dict(self.pairs)

    def apply(self, x):
        return self.mapping.get(x, x)

    def __str__(self):
        return "rename{%s}" % ",".join(
            "%s<-%s" % (a, b) for a, b in self.pairs
        )


def rename(mapping):
    return Rename(tuple(sorted(mapping.items(), key=lambda p: p[0].name)))


def change(*clocks):
    return Change(frozenset(clocks))


# --------------------------------------------------------------------------
# transitions and automata


@dataclass(frozen=True)
class Transition:
    src: object
    letter: object
    program: tuple  # of Guard | Change | Rename
    dst: object
    output: object = None  # transducer output bit, if any

    def __str__(self):
        prog = "; ".join(str(s) for s in self.program) or "skip"
        out = "" if self.output is None else " / %s" % self.output
        return "%s --%s [%s]%s--> %s" % (self.src, _letter_str(self.letter), prog, out, self.dst)


def _letter_str(a):
    if isinstance(a, frozenset):
        return "{%s}" % ",".join(sorted(a))
    return str(a)


@dataclass
class Gta:
    states: set
    alphabet: set
    clocks: tuple
    transitions: list
    initial: list  # of (state, Guard)
    buchi: set

    def future_clocks(self):
        return tuple(c for c in self.clocks if c.kind == "future")

    def history_clocks(self):
        return tuple(c for c in self.clocks if c.kind == "history")

    def transitions_from(self, state):
        return [t for t in self.transitions if t.src == state]

    def stats(self):
        return {
            "states": len(self.states),
            "transitions": len(self.transitions),
            "future_clocks": len(self.future_clocks()),
            "history_clocks": len(self.history_clocks()),
        }


@dataclass
class Gtt(Gta):
    """Transducer: every transition carries an output bit."""

    output_alphabet: tuple = (0, 1)


# --------------------------------------------------------------------------
# concrete execution


def delay(v, d):
    """Let time d >= 0 elapse: every clock grows, infinities stay put."""
    out = {}
    for x, val in v.items():
        if val == INF or val == NEG_INF:
            out[x] = val
        else:
            out[x] = val + d
    return out


class Blocked(Exception):
    def __init__(self, reason, step=None):
        super().__init__(reason)
        self.reason = reason
        self.step = step


def apply_program_concrete(program, v, choices=None):
    """Run a program on valuation v.

    ``choices`` maps released future clocks to the value chosen for them
    (must lie in [-inf, 0]); a missing entry defaults to 0.  Raises Blocked
    when a guard fails or a choice is out of range.
    """
    choices = choices or {}
    v = dict(v)
    for step in program:
        if isinstance(step, Guard):
            for a in step.atoms:
                if not a.holds(v):
                    raise Blocked("guard failed: %s" % a)
        elif isinstance(step, Change):
            for x in step.clocks:
                if x.kind == "history":
                    v[x] = 0
                else:
                    val = choices.get(x, 0)
                    if not (val == NEG_INF or val <= 0):
                        raise Blocked("release value for %s must be <= 0" % x)
                    v[x] = val
        elif isinstance(step, Rename):
            old = dict(v)
            for x in v:
                v[x] = old[step.apply(x)]
        else:
            raise TypeError(step)
    return v


@dataclass
class RunResult:
    ok: bool
    reason: str = ""
    position: int = -1
    valuations: list = field(default_factory=list)
    outputs: list = field(default_factory=list)
    state: object = None


def initial_valuation(gta, guard, assignment=None):
    """A valuation satisfying the given initial guard, if provided explicitly.

    History clocks start at the value pinned by the guard (0 or +inf);
    future clocks start at the value given in ``assignment`` (default 0).
    """
    assignment = assignment or {}
    v = {}
    for x in gta.clocks:
        if x.kind == "history":
            v[x] = 0
        else:
            v[x] = assignment.get(x, 0)
    for a in guard.atoms:
        # recognize pinning atoms to seed history clocks at +inf
        if a.x is None and a.y is not None and a.c == NEG_INF and a.y.kind == "history":
            v[a.y] = INF
    for x, val in assignment.items():
        v[x] = val
    return v


def run_concrete(gta, word, steps, v0=None, start=None):
    """Replay a finite run over a finite timed word.

    ``steps`` is a list of (transition, choices) pairs, one per letter.
    ``start``/``v0`` give the initial state and valuation; if omitted the
    first initial pair of the automaton is used with future clocks at the
    values required by its first guards (caller-supplied v0 recommended).
    Returns a RunResult; on failure, ``position`` is the offending letter.
    """
    if len(steps) != len(word):
        raise ValueError("need one step per letter")
    if start is None or v0 is None:
        state, g0 = gta.initial[0]
        v = initial_valuation(gta, g0)
        if not g0.holds(v):
            return RunResult(False, "initial guard failed", -1)
    else:
        state, v = start, dict(v0)
        g0 = next((g for s, g in gta.initial if s == state), None)
        if g0 is None:
            return RunResult(False, "not an initial state: %s" % state, -1)
        if not g0.holds(v):
            return RunResult(False, "initial guard failed", -1)
    vals = [dict(v)]
    outs = []
    prev_t = 0  # the run starts at absolute time 0; v0 holds the values then
    for i, ((tr, choices), (letter, t)) in enumerate(zip(steps, word)):
        v = delay(v, t - prev_t)
        prev_t = t
        if tr.src != state:
            return RunResult(False, "transition source mismatch", i, vals, outs, state)
        if tr.letter != letter:
            return RunResult(False, "letter mismatch", i, vals, outs, state)
        try:
            v = apply_program_concrete(tr.program, v, choices)
        except Blocked as b:
            return RunResult(False, b.reason, i, vals, outs, state)
        state = tr.dst
        vals.append(dict(v))
        outs.append(tr.output)
    return RunResult(True, "", len(word), vals, outs, state)


# --------------------------------------------------------------------------
# safety check


def is_safe(gta):
    """Check the structural conditions that make zone exploration complete.

    Returns (ok, diagnostics).  Requirements: clocks involved in
    future-future difference constraints must be pinned to 0 or -inf before
    every release, renamings must map that set onto itself, and every
    initial guard must pin each history clock to 0 or +inf.
    """
    diags = []
    fut = set(gta.future_clocks())
    xd = set()
    all_guards = [g for _, g in gta.initial]
    for t in gta.transitions:
        all_guards.extend(s for s in t.program if isinstance(s, Guard))
    for g in all_guards:
        for a in g.atoms:
            if a.x in fut and a.y in fut:
                xd.add(a.x)
                xd.add(a.y)

    def pinned_by(guard_atoms, x):
        lo = hi = False
        neg = False
        for a in guard_atoms:
            if a.x is x and a.y is None and a.c == NEG_INF:
                neg = True
            if a.x is x and a.y is None and not a.strict and a.c == 0:
                hi = True
            if a.y is x and a.x is None and not a.strict and a.c == 0:
                lo = True
        return neg or (lo and hi)

    for t in gta.transitions:
        verified = set()
        for step in t.program:
            if isinstance(step, Guard):
                for x in xd:
                    if pinned_by(step.atoms, x):
                        verified.add(x)
            elif isinstance(step, Change):
                for x in step.clocks & xd:
                    if x not in verified:
                        diags.append(
                            "transition %s releases %s without pinning it to 0 or -inf"
                            % (t, x)
                        )
                    verified.discard(x)
            elif isinstance(step, Rename):
                img = {step.apply(x) for x in xd}
                if img != xd:
                    diags.append("renaming on %s does not preserve the diagonal clocks" % (t,))
                verified = {x for x in xd if step.apply(x) in verified}

    for state, g in gta.initial:
        for h in gta.history_clocks():
            zero = any(
                a.x is h and a.y is None and not a.strict and a.c == 0 for a in g.atoms
            ) and any(
                a.y is h and a.x is None and not a.strict and a.c == 0 for a in g.atoms
            )
            inf_pin = any(a.y is h and a.x is None and a.c == NEG_INF for a in g.atoms)
            if not (zero or inf_pin):
                diags.append(
                    "initial guard at %s does not pin history clock %s to 0 or +inf"
                    % (state, h)
                )
    return (not diags, diags)


# --------------------------------------------------------------------------
# renaming elimination


def eliminate_renamings(gta):
    """Equivalent automaton whose programs contain no Rename steps.

    States become (state, permutation); each guard or change over original
    clock names is rewritten to the physical clocks the permutation points
    at, and renamings are folded into the permutation.
    """
    ident = tuple(sorted(gta.clocks))

    def key(perm):
        return tuple(perm[c] for c in ident)

    def rewrite(program, perm):
        perm = dict(perm)
        steps = []
        for step in program:
            if isinstance(step, Guard):
                steps.append(
                    Guard(
                        tuple(
                            Atom(
                                perm[a.x] if a.x is not None else None,
                                perm[a.y] if a.y is not None else None,
                                a.strict,
                                a.c,
                            )
                            for a in step.atoms
                        )
                    )
                )
            elif isinstance(step, Change):
                steps.append(Change(frozenset(perm[x] for x in step.clocks)))
            elif isinstance(step, Rename):
                perm = {x: perm[step.apply(x)] for x in perm}
            else:
                raise TypeError(step)
        return tuple(steps), perm

    id_perm = {c: c for c in gta.clocks}
    new_initial = []
    frontier = []
    seen = set()
    for s, g in gta.initial:
        node = (s, key(id_perm))
        new_initial.append((node, g))
        if node not in seen:
            seen.add(node)
            frontier.append((s, id_perm))
    new_transitions = []
    new_states = set(seen)
    while frontier:
        s, perm = frontier.pop()
        node = (s, key(perm))
        for t in gta.transitions_from(s):
            prog, perm2 = rewrite(t.program, perm)
            node2 = (t.dst, key(perm2))
            new_transitions.append(Transition(node, t.letter, prog, node2, t.output))
            if node2 not in seen:
                seen.add(node2)
                new_states.add(node2)
                frontier.append((t.dst, perm2))
    new_states |= {n for n, _ in new_initial}
    buchi = {n for n in new_states if n[0] in gta.buchi}
    cls = Gtt if isinstance(gta, Gtt) else Gta
    out = cls(new_states, set(gta.alphabet), gta.clocks, new_transitions, new_initial, buchi)
    return out


# --------------------------------------------------------------------------
# JSON interchange


def _enc_val(c):
    if isinstance(c, Fraction) or isinstance(c, int) or c in (INF, NEG_INF):
        return rat_str(c)
    raise TypeError(c)


def _enc_letter(a):
    if isinstance(a, frozenset):
        return {"set": sorted(a)}
    if isinstance(a, tuple):
        return {"pair": [_enc_letter(x) for x in a]}
    if isinstance(a, (int, str)):
        return a
    raise TypeError(a)


def _dec_letter(d):
    if isinstance(d, dict):
        if "set" in d:
            return frozenset(d["set"])
        return tuple(_dec_letter(x) for x in d["pair"])
    return d


def _enc_state(s):
    if isinstance(s, tuple):
        return {"pair": [_enc_state(x) for x in s]}
    return s


def _dec_state(d):
    if isinstance(d, dict):
        return tuple(_dec_state(x) for x in d["pair"])
    return d


def _enc_program(program):
    out = []
    for step in program:
        if isinstance(step, Guard):
            out.append(
                {
                    "guard": [
                        [
                            a.x.name if a.x else None,
                            a.y.name if a.y else None,
                            a.strict,
                            _enc_val(a.c),
                        ]
                        for a in step.atoms
                    ]
                }
            )
        elif isinstance(step, Change):
            out.append({"change": sorted(x.name for x in step.clocks)})
        elif isinstance(step, Rename):
            out.append({"rename": {a.name: b.name for a, b in step.pairs}})
    return out


def gta_to_json(gta):
    return json.dumps(
        {
            "kind": "gtt" if isinstance(gta, Gtt) else "gta",
            "clocks": [[c.name, c.kind] for c in gta.clocks],
            "states": [_enc_state(s) for s in sorted(gta.states, key=repr)],
            "alphabet": [_enc_letter(a) for a in sorted(gta.alphabet, key=repr)],
            "initial": [
                [_enc_state(s), _enc_program((g,))[0]["guard"]] for s, g in gta.initial
            ],
            "buchi": [_enc_state(s) for s in sorted(gta.buchi, key=repr)],
            "transitions": [
                {
                    "src": _enc_state(t.src),
                    "letter": _enc_letter(t.letter),
                    "program": _enc_program(t.program),
                    "dst": _enc_state(t.dst),
                    "output": t.output,
                }
                for t in gta.transitions
            ],
        },
        indent=1,
    )


def gta_from_json(text):
    d = json.loads(text) if isinstance(text, str) else text
    clocks = tuple(Clock(n, k) for n, k in d["clocks"])
    byname = {c.name: c for c in clocks}

    def dec_prog(steps):
        out = []
        for step in steps:
            if "guard" in step:
                out.append(
                    Guard(
                        tuple(
                            Atom(
                                byname[x] if x else None,
                                byname[y] if y else None,
                                strict,
                                rat(c),
                            )
                            for x, y, strict, c in step["guard"]
                        )
                    )
                )
            elif "change" in step:
                out.append(Change(frozenset(byname[n] for n in step["change"])))
            elif "rename" in step:
                out.append(rename({byname[a]: byname[b] for a, b in step["rename"].items()}))
        return tuple(out)

    transitions = [
        Transition(
            _dec_state(t["src"]),
            _dec_letter(t["letter"]),
            dec_prog(t["program"]),
            _dec_state(t["dst"]),
            t.get("output"),
        )
        for t in d["transitions"]
    ]
    cls = Gtt if d.get("kind") == "gtt" else Gta
    return cls(
        {_dec_state(s) for s in d["states"]},
        {_dec_letter(a) for a in d["alphabet"]},
        clocks,
        transitions,
        [(_dec_state(s), dec_prog([{"guard": g}])[0]) for s, g in d["initial"]],
        {_dec_state(s) for s in d["buchi"]},
    )


def gta_to_dot(gta, name="gta"):
    lines = ["digraph %s {" % name, "  rankdir=LR;"]
    ids = {s: "n%d" % i for i, s in enumerate(sorted(gta.states, key=repr))}
    for s, nid in ids.items():
        shape = "doublecircle" if s in gta.buchi else "circle"
        lines.append('  %s [label="%s", shape=%s];' % (nid, s, shape))
    for i, (s, g) in enumerate(gta.initial):
        lines.append('  init%d [shape=point];' % i)
        lines.append('  init%d -> %s [label="%s"];' % (i, ids[s], g))
    for t in gta.transitions:
        prog = "; ".join(str(x) for x in t.program)
        out = "" if t.output is None else " / %s" % t.output
        lines.append(
            '  %s -> %s [label="%s [%s]%s"];'
            % (ids[t.src], ids[t.dst], _letter_str(t.letter), prog, out)
        )
    lines.append("}")
    return "\n".join(lines)
