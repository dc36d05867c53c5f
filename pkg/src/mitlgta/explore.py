"""Buchi non-emptiness of safe timed automata via zone-graph exploration.

The zone graph pairs control states with canonical zones; a node covers
another when their canonical matrices coincide (optionally, when one zone
includes the other).  An accepting lasso exists when some strongly connected
component of the explored graph contains an accepting node and every future
clock is either released along the component or can sit at minus infinity;
a candidate lasso is then extracted and revalidated concretely by solving a
difference-constraint system over the event times and predicted event
times of an unrolled prefix-cycle run.
"""

import random
from dataclasses import dataclass, field
from fractions import Fraction

from .extreal import INF, NEG_INF, is_finite
from .automata import (
    Atom,
    Change,
    Clock,
    Gta,
    Guard,
    Rename,
    Transition,
    change,
    eliminate_renamings,
    is_safe,
    run_concrete,
)
from .zones import (
    BranchTrie,
    apply_program_symbolic,
    can_be_minus_infinity,
    elapse,
    force_minus_infinity,
    includes,
    initial_zone,
    raw_close,
    raw_rows,
    successor,
    raw_tighten,
    sample_rows,
)

# --------------------------------------------------------------------------
# non-Zenoness


def make_strongly_non_zeno(gta, min_gap=1):
    """Accepting runs of the result take at least ``min_gap`` time per visit.

    A fresh history clock (initially 0) guards entry into accepting copies:
    accepting states are duplicated and reachable only via transitions that
    check the clock reached ``min_gap`` and reset it, so accepting runs
    advance time beyond any bound.
    """
    names = {c.name for c in gta.clocks}
    zname = "nz"
    while zname in names:
        zname += "_"
    z = Clock(zname, "history")
    clocks = gta.clocks + (z,)
    trans = []
    for t in gta.transitions:
        for ph in (0, 1):
            trans.append(Transition((t.src, ph), t.letter, t.program, (t.dst, 0), t.output))
            if t.dst in gta.buchi:
                prog = t.program + (
                    Guard((Atom(None, z, False, -min_gap),)),
                    change(z),
                )
                trans.append(Transition((t.src, ph), t.letter, prog, (t.dst, 1), t.output))
    states = {(s, ph) for s in gta.states for ph in (0, 1)}
    initial = [
        ((s, 0), Guard(g.atoms + (Atom(z, None, False, 0), Atom(None, z, False, 0))))
        for s, g in gta.initial
    ]
    buchi = {(s, 1) for s in gta.buchi}
    return Gta(states, set(gta.alphabet), clocks, trans, initial, buchi)


# --------------------------------------------------------------------------
# zone graph


@dataclass
class ZoneGraph:
    nodes: dict  # node id -> (state, Zone)
    edges: dict  # node id -> list of (Transition, node id)
    initial: list  # node ids
    buchi: set  # node ids
    closed: bool  # True when exploration exhausted every reachable node


def build_zone_graph(gta, budget=10000, use_inclusion=False, checkpoint=None,
                     checkpoint_every=1000):
    """Forward exploration with the elapse-then-fire successor relation.

    ``checkpoint``, if given, is called with the partial ZoneGraph every
    ``checkpoint_every`` discovered nodes; a truthy return stops exploration
    early (the graph is then reported as not closed).
    """
    by_src = {}
    for t in gta.transitions:
        by_src.setdefault(t.src, []).append(t)
    tries = {s: BranchTrie(ts) for s, ts in by_src.items()}
    nodes = {}
    edges = {}
    index = {}  # (state, zone key) -> node id
    by_state = {}  # state -> node ids (for inclusion covering)
    order = []

    def add_node(state, zone):
        key = (state, zone.key())
        if key in index:
            return index[key]
        if use_inclusion:
            for nid in by_state.get(state, ()):
                if includes(nodes[nid][1], zone):
                    return nid
        nid = len(nodes)
        nodes[nid] = (state, zone)
        index[key] = nid
        by_state.setdefault(state, []).append(nid)
        edges[nid] = []
        order.append(nid)
        return nid

    initial = []
    for s, g in gta.initial:
        z = elapse(initial_zone(gta.clocks, g))
        if not z.empty:
            initial.append(add_node(s, z))
    closed = True
    stopped = False
    next_check = checkpoint_every
    i = 0
    while i < len(order):
        nid = order[i]
        i += 1
        state, zone = nodes[nid]
        trie = tries.get(state)
        for t, z2 in (trie.successors(zone) if trie is not None else ()):
            if len(nodes) >= budget and (t.dst, z2.key()) not in index:
                closed = False
                continue
            edges[nid].append((t, add_node(t.dst, z2)))
        if checkpoint is not None and len(nodes) >= next_check:
            next_check = len(nodes) + checkpoint_every
            buchi = {nid for nid, (s, _) in nodes.items() if s in gta.buchi}
            if checkpoint(ZoneGraph(nodes, edges, initial, buchi, False)):
                stopped = True
                break
    buchi = {nid for nid, (s, _) in nodes.items() if s in gta.buchi}
    return ZoneGraph(nodes, edges, initial, buchi, closed and not stopped)


def _sccs(graph):
    """Tarjan's algorithm, iterative; yields lists of node ids."""
    idx = {}
    low = {}
    onstack = {}
    stack = []
    counter = [0]
    out = []
    for root in list(graph.nodes):
        if root in idx:
            continue
        work = [(root, 0)]
        while work:
            v, pi = work.pop()
            if pi == 0:
                idx[v] = low[v] = counter[0]
                counter[0] += 1
                stack.append(v)
                onstack[v] = True
            recurse = False
            succs = graph.edges.get(v, ())
            for j in range(pi, len(succs)):
                w = succs[j][1]
                if w not in idx:
                    work.append((v, j + 1))
                    work.append((w, 0))
                    recurse = True
                    break
                if onstack.get(w):
                    low[v] = min(low[v], idx[w])
            if recurse:
                continue
            if low[v] == idx[v]:
                comp = []
                while True:
                    w = stack.pop()
                    onstack[w] = False
                    comp.append(w)
                    if w == v:
                        break
                out.append(comp)
            if work:
                parent = work[-1][0]
                low[parent] = min(low[parent], low[v])
    return out


def _bfs_path(graph, sources, target, allowed=None):
    """Shortest transition path from any source node to the target node."""
    from collections import deque

    prev = {}  # node -> (parent, transition)
    seen = set(sources)
    q = deque(sources)
    while q:
        v = q.popleft()
        if v == target:
            path = []
            while v in prev:
                parent, t = prev[v]
                path.append(t)
                v = parent
            path.reverse()
            return v, path
        for t, w in graph.edges.get(v, ()):
            if allowed is not None and w not in allowed:
                continue
            if w not in seen:
                seen.add(w)
                prev[w] = (v, t)
                q.append(w)
    return None


# --------------------------------------------------------------------------
# liveness


@dataclass
class LassoWitness:
    prefix: list  # transitions from an initial node to the anchor
    cycle: list  # transitions of a closed walk at the anchor
    anchor: object  # node id of the accepting node the cycle loops at
    evidence: dict  # future clock -> how its obligations resolve
    start: object = None  # control state the prefix starts in


@dataclass
class LivenessResult:
    verdict: str  # "Empty" | "NonEmpty" | "Inconclusive"
    witness: object = None
    gta: object = None  # the transformed automaton the witness runs on
    graph: object = None
    validation: object = None
    diagnostics: list = field(default_factory=list)

    @property
    def exit_code(self):
        return {"Empty": 0, "NonEmpty": 1, "Inconclusive": 2}[self.verdict]


def check_liveness(gta, budget=10000, nonzeno=True, use_inclusion=False, validate=True, seed=0):
    """Decide Buchi non-emptiness; see module docstring for the method."""
    ok, diags = is_safe(gta)
    if not ok:
        raise ValueError("automaton is not safe for zone exploration: %s" % diags)
    g = eliminate_renamings(gta)
    if nonzeno:
        g = make_strongly_non_zeno(g)
    futures = g.future_clocks()
    reasons = []
    found = []

    def probe(partial):
        hit = _search_witness(g, partial, futures, validate, seed, reasons)
        if hit is not None:
            found.append(hit)
            return True
        return False

    graph = build_zone_graph(g, budget=budget, use_inclusion=use_inclusion,
                             checkpoint=probe)
    if not found:
        hit = _search_witness(g, graph, futures, validate, seed, reasons)
        if hit is not None:
            found.append(hit)
    if found:
        witness, validation = found[0]
        return LivenessResult("NonEmpty", witness, g, graph, validation, reasons)
    verdict = "Empty" if graph.closed else "Inconclusive"
    return LivenessResult(verdict, None, g, graph, None, reasons)


def _search_witness(g, graph, futures, validate, seed, reasons):
    """Scan the (possibly partial) zone graph for a validated accepting lasso."""
    comps = _sccs(graph)
    for comp in comps:
        cset = set(comp)
        nontrivial = any(w in cset for v in comp for _, w in graph.edges.get(v, ()))
        if not nontrivial:
            continue
        anchors = [v for v in comp if v in graph.buchi]
        if not anchors:
            continue
        released = {}
        for v in comp:
            for t, w in graph.edges.get(v, ()):
                if w not in cset:
                    continue
                for step in t.program:
                    if isinstance(step, Change):
                        for c in step.clocks:
                            if c.kind == "future":
                                released.setdefault(c, (v, t, w))
        for b in anchors:
            zone_b = graph.nodes[b][1]
            evidence = {}
            needed_edges = []
            feasible = True
            frozen = []
            for x in futures:
                if x in released:
                    evidence[x] = "released along the cycle"
                    needed_edges.append(released[x])
                elif can_be_minus_infinity(zone_b, x):
                    evidence[x] = "can stay at -inf"
                    frozen.append(x)
                else:
                    feasible = False
                    reasons.append(
                        "component at node %d: clock %s neither released nor -inf" % (b, x)
                    )
                    break
            if not feasible:
                continue
            if frozen and force_minus_infinity(zone_b, frozen).empty:
                reasons.append("component at node %d: joint -inf infeasible" % b)
                continue
            cycle = _assemble_cycle(graph, cset, b, needed_edges)
            if cycle is None:
                continue
            start_node, prefix = _assemble_prefix(graph, b)
            if prefix is None:
                continue
            witness = LassoWitness(prefix, cycle, b, evidence, graph.nodes[start_node][0])
            validation = None
            if validate:
                validation = validate_witness(g, witness, seed=seed)
                if not validation.ok:
                    reasons.append(
                        "witness at node %d failed validation: %s" % (b, validation.reason)
                    )
                    continue
            return witness, validation
    return None


def _assemble_prefix(graph, target):
    found = _bfs_path(graph, set(graph.initial), target)
    if found is None:
        return None, None
    return found


def _assemble_cycle(graph, cset, b, needed_edges):
    """A closed walk at b inside the component through all required edges."""
    walk = []
    cur = b
    for v, t, w in needed_edges:
        found = _bfs_path(graph, {cur}, v, allowed=cset)
        if found is None:
            return None
        walk.extend(found[1])
        walk.append(t)
        cur = w
    found = _bfs_path(graph, {cur}, b, allowed=cset)
    if found is None:
        return None
    walk.extend(found[1])
    if not walk:
        # no releases required: loop through any in-component successor of b
        for t, w in graph.edges.get(b, ()):
            if w in cset:
                found = _bfs_path(graph, {w}, b, allowed=cset)
                if found is not None:
                    return [t] + found[1]
        return None
    return walk


# --------------------------------------------------------------------------
# witness validation


@dataclass
class Validation:
    ok: bool
    reason: str = ""
    word: list = None
    lasso: object = None  # LassoWord replayed and accepted
    period: object = None
    choices: list = None  # per step of prefix+cycle: {clock: release value}


def _descr_diff(env_x, env_y, c, strict):
    """Encode value(x) - value(y) <| c as a raw matrix constraint or a constant.

    Descriptors are ("var", index) for t_j - var origins and ("posinf",)
    for a history clock pinned at +oo.  Returns True/False when decidable
    outright, else (a, b, weight).
    """
    w = (c, 0 if strict else 1)
    if env_x == ("posinf",):
        # +oo - anything = +oo
        return c == INF and not strict
    if env_y == ("posinf",):
        # anything - (+oo) = -oo
        return not (c == NEG_INF and strict)
    # (t_j - ox) - (t_j - oy) = oy - ox, consistently with the extended algebra
    return (env_y[1], env_x[1], w)


def validate_witness(gta, witness, k=3, seed=0, unroll=2):
    """Concretize a symbolic lasso and replay it.

    Builds a difference-constraint system over step times and predicted
    event times for ``prefix + unroll * cycle``, pins a concrete period so
    the solution extends to a genuinely periodic infinite run, samples a
    solution, and replays ``prefix + k * cycle`` transition by transition.
    """
    rng = random.Random(seed)
    P, L = len(witness.prefix), len(witness.cycle)
    steps = list(witness.prefix) + list(witness.cycle) * unroll
    n = len(steps)
    futures = gta.future_clocks()
    histories = gta.history_clocks()

    nvars = [0]

    def newvar():
        nvars[0] += 1
        return nvars[0]

    tvar = [newvar() for _ in range(n)]
    constraints = []  # (a, b, weight)
    var_birth = {}  # T var -> step index it was released at (-1 for initial)

    # initial valuation: histories pinned to 0 or +oo by the initial guard,
    # futures predicted from time 0
    state0 = witness.start if witness.start is not None else gta.initial[0][0]
    g0 = next(g for s, g in gta.initial if s == state0)
    env = {}
    for h in histories:
        pinned_inf = any(
            a.x is None and a.y is h and a.c == NEG_INF for a in g0.atoms
        )
        env[h] = ("posinf",) if pinned_inf else ("var", 0)
    occ = []  # (step, clock, var) release occurrences, in order
    for x in futures:
        v = newvar()
        env[x] = ("var", v)
        var_birth[v] = -1
        occ.append((-1, x, v))
        constraints.append((0, v, (0, 1)))  # T >= 0

    # base time structure: 0 <= t_0 <= t_1 <= ... < +oo
    constraints.append((0, tvar[0], (0, 1)))
    for j in range(n):
        constraints.append((tvar[j], 0, (INF, 0)))
        if j + 1 < n:
            constraints.append((tvar[j], tvar[j + 1], (0, 1)))

    infeasible = [None]

    def add_atom(a, j):
        ex = env[a.x] if a.x is not None else ("var", tvar[j])
        ey = env[a.y] if a.y is not None else ("var", tvar[j])
        r = _descr_diff(ex, ey, a.c, a.strict)
        if r is True:
            return True
        if r is False:
            infeasible[0] = "guard %s contradicts an infinite-valued clock" % a
            return False
        constraints.append(r)
        return True

    # initial guard holds at time 0
    for a in g0.atoms:
        ex = env[a.x] if a.x is not None else ("var", 0)
        ey = env[a.y] if a.y is not None else ("var", 0)
        r = _descr_diff(ex, ey, a.c, a.strict)
        if r is True:
            continue
        if r is False:
            return Validation(False, "initial guard unsatisfiable")
        constraints.append(r)

    for j, t in enumerate(steps):
        for step in t.program:
            if isinstance(step, Guard):
                for a in step.atoms:
                    if not add_atom(a, j):
                        return Validation(False, infeasible[0])
            elif isinstance(step, Change):
                for c in sorted(step.clocks):
                    if c.kind == "history":
                        env[c] = ("var", tvar[j])
                    else:
                        v = newvar()
                        env[c] = ("var", v)
                        var_birth[v] = j
                        occ.append((j, c, v))
                        constraints.append((tvar[j], v, (0, 1)))  # value <= 0
            elif isinstance(step, Rename):
                old = dict(env)
                for c in gta.clocks:
                    env[c] = old[step.apply(c)]
        # domain invariant: active predictions have not timed out
        for x in futures:
            constraints.append((tvar[j], env[x][1], (0, 1)))

    # a prediction never renewed during the cycle must be "never" (-oo value)
    last_iter_start = P + (unroll - 1) * L
    forced_inf = set()
    for x in futures:
        d = env[x]
        if d[0] == "var" and d[1] != 0 and var_birth.get(d[1], n) < last_iter_start:
            forced_inf.add(d[1])

    def build(extra):
        rows = raw_rows(nvars[0])
        for a, b, w in constraints:
            if not raw_tighten(rows, a, b, w):
                return None
        for v in forced_inf:
            if not raw_tighten(rows, 0, v, (NEG_INF, 1)):
                return None
        for a, b, w in extra:
            if not raw_tighten(rows, a, b, w):
                return None
        if not raw_close(rows):
            return None
        return rows

    base = build([])
    if base is None:
        return Validation(False, "constraint system infeasible")

    # candidate periods from the derived bounds on t_{P+L} - t_P
    if L == 0 or n <= P:
        return Validation(False, "empty cycle")
    a_idx, b_idx = tvar[min(P + L, n - 1)], tvar[P]
    hi, hi_s = base[a_idx][b_idx]
    lo_w, lo_s = base[b_idx][a_idx]
    lo = -lo_w if is_finite(lo_w) else (0 if lo_w == INF else INF)
    cands = []
    if is_finite(hi) and is_finite(lo):
        cands.append(Fraction(lo + hi) / 2)
        if lo_s and hi_s and lo == hi:
            cands = [Fraction(lo)]
    elif is_finite(lo):
        cands.extend([Fraction(lo) + 1, Fraction(lo) + Fraction(1, 2)])
    elif is_finite(hi):
        cands.append(Fraction(hi) / 2)
    for extra_cand in (1, 2, Fraction(1, 2)):
        cands.append(Fraction(extra_cand))
    seen = set()
    cands = [d for d in cands if d > 0 and not (d in seen or seen.add(d))]

    def period_pins(d, with_T):
        pins = []
        for j in range(P, n - L):
            pins.append((tvar[j + L], tvar[j], (d, 1)))
            pins.append((tvar[j], tvar[j + L], (-d, 1)))
        if with_T:
            by_slot = {}
            for (j, c, v) in occ:
                if j >= P:
                    by_slot.setdefault(((j - P) % L, c), []).append((j, v))
            for slot, lst in by_slot.items():
                lst.sort()
                for (j1, v1), (j2, v2) in zip(lst, lst[1:]):
                    if v1 in forced_inf or v2 in forced_inf:
                        continue
                    d12 = d * ((j2 - j1) // L)
                    pins.append((v2, v1, (d12, 1)))
                    pins.append((v1, v2, (-d12, 1)))
        return pins

    solved = None
    chosen_d = None
    for d in cands:
        for with_T in (True, False):
            rows = build(period_pins(d, with_T))
            if rows is not None:
                solved = rows
                chosen_d = d
                break
        if solved is not None:
            break
    if solved is None:
        return Validation(False, "no feasible period found among candidates")

    val = sample_rows(solved, rng)
    times = [val[tvar[j]] for j in range(n)]
    tval = {v: val[v] for v in range(1, nvars[0] + 1)}

    # concrete release choices per step (relative values, periodic by design)
    choices = [dict() for _ in range(n)]
    init_choice = {}
    for (j, c, v) in occ:
        tv = tval[v]
        if j < 0:
            init_choice[c] = NEG_INF if tv == INF else -Fraction(tv)
        else:
            choices[j][c] = NEG_INF if tv == INF else Fraction(times[j]) - Fraction(tv)

    # replay prefix + k cycles with first-iteration choices repeated
    d = chosen_d
    word = []
    replay_steps = []
    for j in range(P):
        word.append((steps[j].letter, Fraction(times[j])))
        replay_steps.append((steps[j], choices[j]))
    for it in range(k):
        for r in range(L):
            j = P + r
            word.append((steps[j].letter, Fraction(times[j]) + it * d))
            replay_steps.append((steps[j], choices[j]))
    v0 = {}
    for h in histories:
        pinned_inf = any(a.x is None and a.y is h and a.c == NEG_INF for a in g0.atoms)
        v0[h] = INF if pinned_inf else 0
    for x in futures:
        v0[x] = init_choice[x]
    res = run_concrete(gta, word, replay_steps, v0=v0, start=state0)
    if not res.ok:
        return Validation(
            False, "replay blocked at position %d: %s" % (res.position, res.reason)
        )
    out = Validation(True, "")
    from .formula import LassoWord

    try:
        lasso = LassoWord(
            tuple(word[:P]),
            tuple((steps[P + r].letter, Fraction(times[P + r])) for r in range(L)),
            d,
        )
    except ValueError as e:
        return Validation(False, "sampled lasso ill-formed: %s" % e)
    out.lasso = lasso
    out.word = word
    out.period = d
    out.choices = choices[: P + L]
    return out


# --------------------------------------------------------------------------
# model checking


def _degeneralize_product(sys_gta, form_gta):
    """Synchronous product accepting when both Buchi sets recur."""
    a = sys_gta
    b = form_gta
    from .translate import remap_clocks, trim_unreachable

    a = remap_clocks(a, "s.")
    b = remap_clocks(b, "f.")
    common = a.alphabet & b.alphabet
    b_by = {}
    for t in b.transitions:
        if t.letter in common:
            b_by.setdefault((t.src, t.letter), []).append(t)
    trans = []
    states = set()

    def phase_after(ph, d1, d2):
        if ph == 2:
            ph = 0
        if ph == 0:
            return 1 if d1 in a.buchi else 0
        return 2 if d2 in b.buchi else 1

    for ta in a.transitions:
        if ta.letter not in common:
            continue
        for s2 in b.states:
            for tb in b_by.get((s2, ta.letter), ()):
                for ph in (0, 1, 2):
                    dst = (ta.dst, tb.dst, phase_after(ph, ta.dst, tb.dst))
                    trans.append(
                        Transition(
                            (ta.src, tb.src, ph),
                            ta.letter,
                            ta.program + tb.program,
                            dst,
                            None,
                        )
                    )
    initial = [
        ((s1, s2, 0), Guard(g1.atoms + g2.atoms))
        for s1, g1 in a.initial
        for s2, g2 in b.initial
    ]
    states = {(s1, s2, ph) for s1 in a.states for s2 in b.states for ph in (0, 1, 2)}
    buchi = {s for s in states if s[2] == 2}
    out = Gta(states, common, a.clocks + b.clocks, trans, initial, buchi)
    return trim_unreachable(out)


def check_sat(phi, budget=10000, seed=0, props=None):
    """Satisfiability of a formula over infinite timed words."""
    from .translate import formula_to_gtt, gtt_to_gta

    gta = gtt_to_gta(formula_to_gtt(phi, props))
    res = check_liveness(gta, budget=budget, seed=seed)
    if res.verdict == "NonEmpty" and res.validation is not None:
        from .formula import eval_lasso

        if not eval_lasso(res.validation.lasso, phi, 0):
            res.diagnostics.append("lasso failed the formula-level crosscheck")
            res.verdict = "Inconclusive"
    return res


def model_check(system, phi, budget=10000, seed=0, props=None):
    """Does every infinite word of the system satisfy the formula?

    Checks emptiness of system x automaton(not phi).  Verdict "Empty" means
    the property holds; "NonEmpty" comes with a counterexample lasso.
    """
    from .formula import Not
    from .translate import formula_to_gtt, gtt_to_gta

    neg = gtt_to_gta(formula_to_gtt(Not(phi), props))
    prod = _degeneralize_product(system, neg)
    return check_liveness(prod, budget=budget, seed=seed)
