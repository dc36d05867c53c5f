"""Symbolic execution of a timed transducer over a fixed finite timed word.

Because future clocks encode predictions, a single input prefix admits many
runs that differ in the guessed release values; runs whose guesses are
contradicted die when a guard fails or a prediction strictly times out
during a delay.  This module builds the DAG of all surviving symbolic runs
(one zone per reached configuration and position) and reports, for each
position, the set of output bits emitted by runs that still survive at the
end of the word.
"""

from dataclasses import dataclass, field

import itertools

from .automata import Guard
from .zones import BranchTrie, Zone, _freeze, _thaw, initial_zone, shift_delay


@dataclass
class SymRun:
    """Per-position co-reachable output sets of a transducer on a word."""

    outputs: list  # list of sets of output bits, one per position
    alive: bool  # does at least one run survive the whole word
    node_count: int = 0


def symbolic_outputs(gtt, word):
    """Run the transducer symbolically over the finite timed word.

    Returns a SymRun whose outputs[i] collects the bits emitted at position
    i by runs extendable to the end of the word.
    """
    # transducer letters mention only its own propositions; word letters may
    # carry extra ones, which the transducer cannot observe
    props = set()
    for t in gtt.transitions:
        if isinstance(t.letter, frozenset):
            props |= t.letter

    # forward pass: levels of (state, zone) with dedup by canonical matrix
    levels = [{}]
    t0 = word[0][1] if word else 0
    for s, g in gtt.initial:
        z = initial_zone(gtt.clocks, g)
        if not z.empty:
            z = shift_delay(z, t0)  # the run starts at time 0
        if not z.empty:
            levels[0].setdefault((s, z.key()), z)
    edges = [[] for _ in range(len(word))]  # per level: (src_key, dst_key, output)
    by_letter = {}
    for t in gtt.transitions:
        by_letter.setdefault((t.src, t.letter), []).append(t)
    tries = {k: BranchTrie(ts) for k, ts in by_letter.items()}
    n = len(word)
    for i in range(n):
        letter, t_now = word[i]
        if isinstance(letter, frozenset):
            letter = frozenset(letter & props)
        nxt = {}
        delay = word[i + 1][1] - t_now if i + 1 < n else None
        for (s, zk), z in levels[i].items():
            trie = tries.get((s, letter))
            if trie is None:
                continue
            for tr, z2 in trie.successors(z, do_elapse=False):
                if delay is not None:
                    z2 = shift_delay(z2, delay)
                    if z2.empty:
                        continue
                key = (tr.dst, z2.key())
                nxt.setdefault(key, z2)
                edges[i].append(((s, zk), key, tr.output))
        levels.append(nxt)

    # backward pass: co-reachability from any final-level node
    alive = set(levels[n].keys())
    out_sets = [set() for _ in range(n)]
    for i in range(n - 1, -1, -1):
        prev_alive = set()
        for src, dst, out in edges[i]:
            if dst in alive:
                prev_alive.add(src)
                out_sets[i].add(out)
        alive = prev_alive
    total = sum(len(l) for l in levels)
    return SymRun(out_sets, bool(levels[n]), total)


def network_outputs(net, word):
    """Symbolic execution of a factored transducer network over a word.

    Equivalent to composing the components into one transducer and calling
    symbolic_outputs, but exploiting that no guard couples clocks of
    different components and delays shift all clocks uniformly: the joint
    zone factors exactly into one small zone per clocked component.  A
    configuration is the tuple of component states plus the tuple of
    component zones; branch combinations die as soon as one component's
    guard empties its own zone.  Returns a SymRun for the root's outputs.
    """
    nnodes = len(net.nodes)
    clocked = [j for j in range(nnodes) if net.nodes[j].clocks]
    zslot = {j: k for k, j in enumerate(clocked)}
    by_letter = [dict() for _ in range(nnodes)]
    for j, g in enumerate(net.nodes):
        for t in g.transitions:
            by_letter[j].setdefault((t.src, t.letter), []).append(t)
    tries = {}

    def trie_for(j, s, letter):
        key = (j, s, letter)
        tr = tries.get(key)
        if tr is None:
            tr = BranchTrie(by_letter[j].get((s, letter), ()))
            tries[key] = tr
        return tr

    # interning pool so equal zones share one object; with interned zones,
    # per-component successor and delay results memoize by object identity
    pool = {}

    def intern(z):
        return pool.setdefault((z.clocks, z.key()), z)

    shift_cache = {}
    _MISS = object()

    def shifted(z, d):
        key = (id(z), d)
        hit = shift_cache.get(key, _MISS)
        if hit is not _MISS:
            return hit
        z2 = shift_delay(z, d)
        out = None if z2.empty else intern(z2)
        shift_cache[key] = out
        return out

    succ_cache = {}

    def successors(j, s, lt, z):
        key = (j, s, lt, id(z))
        hit = succ_cache.get(key)
        if hit is None:
            small = net.nodes[j].clocks
            hit = [
                (tr.dst, tr.output, intern(Zone(small, _freeze(rows), False)))
                for tr, rows in trie_for(j, s, lt).successors_rows(
                    _thaw(z.m), z.idx, small)
            ]
            succ_cache[key] = hit
        return hit

    n = len(word)
    t0 = word[0][1] if word else 0
    levels = [{}]
    for combo in itertools.product(*(g.initial for g in net.nodes)):
        states = tuple(s for s, _ in combo)
        zones = []
        ok = True
        for j in clocked:
            z = initial_zone(net.nodes[j].clocks, combo[j][1])
            # intern before the id-keyed delay cache sees the zone
            z = None if z.empty else shifted(intern(z), t0)
            if z is None:
                ok = False
                break
            zones.append(z)
        if ok:
            levels[0].setdefault(
                (states, tuple(map(id, zones))), tuple(zones))

    edges = [set() for _ in range(n)]
    for i in range(n):
        letter, t_now = word[i]
        delay = word[i + 1][1] - t_now if i + 1 < n else None
        nxt = {}
        for src_key, zones in levels[i].items():
            states = src_key[0]
            configs = [(states, zones, [])]
            for j in range(nnodes):
                grown = []
                for sts, zs, outs in configs:
                    lt = net.node_letter(j, letter, outs)
                    if j in zslot:
                        k = zslot[j]
                        for dst, out, z2 in successors(j, sts[j], lt, zs[k]):
                            grown.append(
                                (sts[:j] + (dst,) + sts[j + 1:],
                                 zs[:k] + (z2,) + zs[k + 1:],
                                 outs + [out]))
                    else:
                        for tr in trie_for(j, sts[j], lt)._leaves:
                            grown.append(
                                (sts[:j] + (tr.dst,) + sts[j + 1:], zs,
                                 outs + [tr.output]))
                configs = grown
                if not configs:
                    break
            for sts, zs, outs in configs:
                if delay is not None:
                    zs = tuple(shifted(z, delay) for z in zs)
                    if any(z is None for z in zs):
                        continue
                key = (sts, tuple(map(id, zs)))
                nxt.setdefault(key, zs)
                edges[i].add((src_key, key, outs[-1]))
        levels.append(nxt)

    alive = set(levels[n].keys())
    out_sets = [set() for _ in range(n)]
    for i in range(n - 1, -1, -1):
        prev_alive = set()
        for src, dst, out in edges[i]:
            if dst in alive:
                prev_alive.add(src)
                out_sets[i].add(out)
        alive = prev_alive
    total = sum(len(l) for l in levels)
    return SymRun(out_sets, bool(levels[n]), total)
