"""Region-like equivalences on extended valuations and their matching moves.

Two equivalences over valuations of future/history clocks:

* ``approx_equiv`` (a time-abstract bisimulation, infinite index): agreement
  on all single-clock thresholds c <= M, all diagonal thresholds |c| <= M,
  and on the order of fractional parts among clocks with value <= M.
* ``sim_equiv`` (finite index): per-clock agreement up to n*M and pairwise
  difference agreement up to (n+1)*M, with n the number of clocks.

The two are incomparable.  The constructive procedures (``match_delay``,
``match_release``, ``adjust_to_region``, ``reroute_run``) realize the
bisimulation moves and the surgery that turns the end of a run into an
``approx_equiv``-equivalent valuation by re-choosing last release values.
"""

from dataclasses import dataclass
from fractions import Fraction

from .extreal import INF, NEG_INF, efloor, efrac, ext_sub, is_finite
from .automata import Blocked, Change, Guard, Rename, apply_program_concrete, delay


# --------------------------------------------------------------------------
# scalar classes


def _le_class(a, m):
    """Equivalence class for thresholds {-oo,+oo} and integers c <= m."""
    if a == NEG_INF:
        return "ninf"
    if a == INF:
        return "pinf"
    if a > m:
        return "high"
    return (efloor(a), efrac(a) == 0)


def _abs_class(a, k):
    """Equivalence class for thresholds {-oo,+oo} and integers |c| <= k."""
    if a == NEG_INF:
        return "ninf"
    if a == INF:
        return "pinf"
    if a > k:
        return "high"
    if a < -k:
        return "low"
    return (efloor(a), efrac(a) == 0)


def scalar_sim(a, b, k):
    return _abs_class(a, k) == _abs_class(b, k)


def approx_equiv(v1, v2, m):
    """Time-abstract bisimulation: threshold and fractional-order agreement."""
    if set(v1) != set(v2):
        raise ValueError("valuations over different clock sets")
    clocks = sorted(v1)
    for x in clocks:
        if _le_class(v1[x], m) != _le_class(v2[x], m):
            return False
    for x in clocks:
        for y in clocks:
            if x is y:
                continue
            if _abs_class(ext_sub(v1[x], v1[y]), m) != _abs_class(
                ext_sub(v2[x], v2[y]), m
            ):
                return False
    low = [x for x in clocks if v1[x] != NEG_INF and v1[x] <= m]
    for x in low:
        for y in low:
            if (efrac(v1[x]) <= efrac(v1[y])) != (efrac(v2[x]) <= efrac(v2[y])):
                return False
    return True


def sim_signature(v, m, n=None):
    """Canonical signature; signatures are equal iff sim_equiv holds.

    The image is finite for a fixed clock set and M, which witnesses the
    finite index of the equivalence.
    """
    clocks = sorted(v)
    n = n if n is not None else len(clocks)
    sig = tuple(_abs_class(v[x], n * m) for x in clocks)
    diag = tuple(
        _abs_class(ext_sub(v[x], v[y]), (n + 1) * m)
        for x in clocks
        for y in clocks
        if x is not y
    )
    return (sig, diag)


def sim_equiv(v1, v2, m, n=None):
    """Finite-index equivalence used by the liveness correctness argument."""
    if set(v1) != set(v2):
        raise ValueError("valuations over different clock sets")
    return sim_signature(v1, m, n) == sim_signature(v2, m, n)


# --------------------------------------------------------------------------
# fractional-part placement


def _frac_map(anchor_pairs):
    """A monotone map on [0,1] through the given (f1 -> f2) anchor points.

    Keys equal to an anchor map to its value; keys inside a gap map to
    evenly spaced points of the corresponding value gap, so equal inputs
    share outputs and strict order is preserved.
    """
    pairs = sorted(set(anchor_pairs) | {(Fraction(0), Fraction(0)), (Fraction(1), Fraction(1))})
    keys = [p[0] for p in pairs]
    if len(set(keys)) != len(keys):
        raise ValueError("inconsistent fractional anchors")

    def lookup(f, together=None):
        # `together` maps previously placed keys, consulted first
        f = Fraction(f)
        if together and f in together:
            return together[f]
        for k, val in pairs:
            if f == k:
                return val
        lo = max((p for p in pairs if p[0] < f), key=lambda p: p[0])
        hi = min((p for p in pairs if p[0] > f), key=lambda p: p[0])
        lo2 = lo[1]
        hi2 = hi[1]
        if together:
            for k, val in together.items():
                if lo[0] < k < f and val > lo2:
                    lo2 = val
                if f < k < hi[0] and val < hi2:
                    hi2 = val
        out = (lo2 + hi2) / 2
        if together is not None:
            together[f] = out
        return out

    return lookup


def _fracs_leq_m(v, m, skip=()):
    return [x for x in sorted(v) if x not in skip and v[x] != NEG_INF and v[x] <= m]


def match_delay(v1, v2, d1, m):
    """A delay d2 with (v1 + d1) approx-equivalent to (v2 + d2)."""
    if not approx_equiv(v1, v2, m):
        raise ValueError("valuations are not approx-equivalent")
    if d1 < 0:
        raise ValueError("negative delay")
    fd = efrac(d1)
    if fd == 0:
        return d1
    low = _fracs_leq_m(v1, m)
    if not low:
        return d1
    f1s = sorted({efrac(v1[x]) for x in low})
    f2s = sorted({efrac(v2[x]) for x in low})
    # the fractional parts pair up in order because of the order agreement
    grid1 = [Fraction(0)] + f1s + [Fraction(1)]
    grid2 = [Fraction(0)] + f2s + [Fraction(1)]
    # complements 1 - f, descending in f
    for i in range(len(grid1) - 1, -1, -1):
        if fd == 1 - grid1[i]:
            return efloor(d1) + (1 - grid2[i])
    for i in range(len(grid1) - 1):
        if 1 - grid1[i + 1] < fd < 1 - grid1[i]:
            lo, hi = 1 - grid2[i + 1], 1 - grid2[i]
            return efloor(d1) + (lo + hi) / 2
    raise AssertionError("fractional part of the delay fell through the grid")


def match_release(v1, v2, x, u1, m):
    """A valuation u2, releasing only x from v2, with u1 approx-equiv u2."""
    if not approx_equiv(v1, v2, m):
        raise ValueError("valuations are not approx-equivalent")
    for y in v1:
        if y != x and u1[y] != v1[y]:
            raise ValueError("u1 must differ from v1 only on the released clock")
    if not (u1[x] == NEG_INF or u1[x] <= 0):
        raise ValueError("released value must be nonpositive or -oo")
    u2 = dict(v2)
    if u1[x] == NEG_INF:
        u2[x] = NEG_INF
        return u2
    f = efrac(u1[x])
    if f == 0:
        u2[x] = Fraction(u1[x])
        return u2
    anchors = [
        (efrac(v1[y]), efrac(v2[y])) for y in _fracs_leq_m(v1, m, skip={x})
    ]
    u2[x] = efloor(u1[x]) + _frac_map(anchors)(f)
    return u2


def adjust_to_region(v1, v2, m, n=None):
    """From sim-equivalent v1, v2: a v2' equal to v2 on clocks with
    v1 >= -M and approx-equivalent to v1, by copying integral parts of the
    deep clocks and re-placing their fractional parts."""
    if not sim_equiv(v1, v2, m, n):
        raise ValueError("valuations are not sim-equivalent")
    deep = [x for x in sorted(v1) if v1[x] != NEG_INF and v1[x] < -m]
    v2p = dict(v2)
    if not deep:
        return v2p
    anchors = [
        (efrac(v1[y]), efrac(v2[y]))
        for y in sorted(v1)
        if y not in deep and v1[y] != NEG_INF and v1[y] <= m
    ]
    lookup = _frac_map(anchors)
    together = {}
    for x in sorted(deep, key=lambda c: efrac(v1[c])):
        f = efrac(v1[x])
        v2p[x] = efloor(v1[x]) + (0 if f == 0 else lookup(f, together))
    return v2p


# --------------------------------------------------------------------------
# run rerouting


@dataclass
class Trace:
    """A concrete run fragment: start valuation and (delay, program, choices)
    steps with atomic programs, replayed without reference to control states."""

    v0: dict
    steps: list  # (delay, program tuple, choices dict)


def replay(trace):
    """All intermediate valuations; raises Blocked on a guard violation."""
    v = dict(trace.v0)
    vals = [dict(v)]
    for d, program, choices in trace.steps:
        v = delay(v, d)
        v = apply_program_concrete(program, v, choices)
        vals.append(dict(v))
    return vals


def reroute_run(trace, v_prime_k):
    """Re-execute a run so it ends at v_prime_k instead of its original end.

    v_prime_k may differ from the original final valuation only on future
    clocks that end below -M (as produced by adjust_to_region); for each such
    clock the value chosen at its last release is shifted so the run lands
    exactly on v_prime_k, and every guard of the run is re-verified.
    Raises Blocked if a guard fails (which would refute the underlying
    claim, so callers treat it as a hard error).
    """
    vals = replay(trace)
    vk = vals[-1]
    last_release = {}
    for i, (d, program, choices) in enumerate(trace.steps):
        for step in program:
            if isinstance(step, Change):
                for c in step.clocks:
                    if c.kind == "future":
                        last_release[c] = i
    new_steps = [(d, p, dict(ch)) for d, p, ch in trace.steps]
    for x, target in v_prime_k.items():
        if target == vk[x]:
            continue
        if x.kind != "future":
            raise ValueError("only future clocks may be rerouted")
        if x not in last_release:
            raise ValueError("clock %s is never released in the trace" % x)
        j = last_release[x]
        later = sum(trace.steps[i][0] for i in range(j + 1, len(trace.steps)))
        new_steps[j][2][x] = NEG_INF if target == NEG_INF else Fraction(target) - later
    new_trace = Trace(dict(trace.v0), new_steps)
    new_vals = replay(new_trace)  # Blocked propagates to the caller
    end = new_vals[-1]
    for x, target in v_prime_k.items():
        if end[x] != target:
            raise AssertionError("reroute missed its target on %s" % x)
    return new_trace
