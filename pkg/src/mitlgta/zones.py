"""Zones over extended-valued clocks as canonical difference matrices.

A zone over clocks ``x1..xn`` is stored as an (n+1) x (n+1) matrix ``m``
with index 0 for the constant reference; entry ``m[i][j] = (c, s)`` encodes
``xi - xj < c`` (s = 0) or ``xi - xj <= c`` (s = 1), differences evaluated
in the extended algebra where ``+oo`` absorbs (so ``(-oo) - (-oo) = +oo``).

Weights are plain tuples so the builtin tuple order agrees with constraint
tightness: a smaller weight is a tighter constraint, ``(c, 0) < (c, 1)``.
A bound at infinity carries meaning through its strictness: ``(+oo, 1)`` is
no constraint at all, while ``(+oo, 0)`` says the difference is not ``+oo``
(equivalently, the right clock cannot sit at ``-oo`` while the left one is
above it).  Weight addition reflects that:

- both finite: constants add, strict wins, as usual;
- a ``-oo`` summand forces the sum to ``(-oo, <=)``, because a difference
  bounded by ``-oo`` is attained exactly (e.g. from ``x - z < -3`` and
  ``z - y <= -oo`` one may only conclude ``x - y <= -oo``) -- except when
  the other summand is the vacuous ``(+oo, <=)``, which wins;
- a ``+oo`` summand (none at ``-oo``): the sum is ``+oo`` and is strict
  exactly when every infinite summand is strict, since the only route to an
  infinite difference goes through a ``-oo`` value in the chain, which is
  what a strict infinite bound excludes (finite summands cannot block it).
"""

import random
from fractions import Fraction

from .extreal import INF, NEG_INF, ext_add, is_finite, rat_str
from .automata import Atom, Change, Guard, Rename

# weights ------------------------------------------------------------------

W_LE_INF = (INF, 1)
W_LT_INF = (INF, 0)
W_LE_ZERO = (0, 1)
W_LE_NEG_INF = (NEG_INF, 1)


def wadd(w1, w2):
    c1, s1 = w1
    c2, s2 = w2
    if c1 == NEG_INF or c2 == NEG_INF:
        oc, os = (c2, s2) if c1 == NEG_INF else (c1, s1)
        if oc == INF and os:
            return W_LE_INF
        return W_LE_NEG_INF
    if c1 == INF:
        return (INF, s1 | s2) if c2 == INF else (INF, s1)
    if c2 == INF:
        return (INF, s2)
    return (c1 + c2, s1 & s2)


def weight_str(w):
    return ("<= %s" if w[1] else "< %s") % rat_str(w[0])


# zones ----------------------------------------------------------------------


class EmptyZone(Exception):
    pass


class Zone:
    """Canonical (shortest-path closed) difference matrix; immutable."""

    __slots__ = ("clocks", "idx", "m", "empty")

    def __init__(self, clocks, m, empty):
        self.clocks = clocks
        self.idx = {x: i + 1 for i, x in enumerate(clocks)}
        self.m = m
        self.empty = empty

    def key(self):
        return ("EMPTY",) if self.empty else self.m

    def __eq__(self, other):
        return self.clocks == other.clocks and self.key() == other.key()

    def __hash__(self):
        return hash((self.clocks, self.key()))

    def entry(self, x, y):
        """Weight bounding x - y (None stands for the reference 0)."""
        i = self.idx[x] if x is not None else 0
        j = self.idx[y] if y is not None else 0
        return self.m[i][j]

    def __str__(self):
        if self.empty:
            return "<empty zone>"
        names = ["0"] + [c.name for c in self.clocks]
        lines = []
        for i, row in enumerate(self.m):
            ats = []
            for j, w in enumerate(row):
                if i != j and w != W_LE_INF:
                    ats.append("%s - %s %s" % (names[i], names[j], weight_str(w)))
            lines.extend(ats)
        return " & ".join(lines) if lines else "<universal>"


def _freeze(rows):
    return tuple(tuple(r) for r in rows)


def _thaw(m):
    return [list(r) for r in m]


def _closed(rows):
    """Floyd-Warshall closure; returns False when inconsistent."""
    n = len(rows)
    for k in range(n):
        rk = rows[k]
        for i in range(n):
            ri = rows[i]
            w_ik = ri[k]
            if w_ik == W_LE_INF:
                continue
            for j in range(n):
                w = wadd(w_ik, rk[j])
                if w < ri[j]:
                    ri[j] = w
    for i in range(n):
        if rows[i][i] < W_LE_ZERO:
            return False
    return True


def _empty(clocks):
    return Zone(clocks, None, True)


def _domain_rows(clocks):
    n = len(clocks) + 1
    rows = [[W_LE_INF] * n for _ in range(n)]
    for i in range(n):
        rows[i][i] = W_LE_ZERO
    for x in clocks:
        i = clocks.index(x) + 1
        if x.kind == "future":
            rows[i][0] = W_LE_ZERO  # x <= 0; -oo allowed via (<= +oo) lower bound
        else:
            rows[0][i] = W_LE_ZERO  # x >= 0; +oo allowed via (<= +oo) upper bound
    return rows


def universal_zone(clocks):
    """The full domain: future clocks in [-oo, 0], history clocks in [0, +oo]."""
    clocks = tuple(clocks)
    rows = _domain_rows(clocks)
    if not _closed(rows):
        raise AssertionError("domain zone inconsistent")
    return Zone(clocks, _freeze(rows), False)


def _tighten(rows, a, b, w):
    """Intersect with (xa - xb) bounded by w and restore closure in O(n^2).

    Returns False when the zone becomes empty.  A strict bound at -oo is
    unsatisfiable outright (no extended value is < -oo).
    """
    if w == (NEG_INF, 0):
        return False
    if w >= rows[a][b]:
        return True
    n = len(rows)
    rb = rows[b]
    for i in range(n):
        wia = rows[i][a]
        if wia == W_LE_INF:
            continue
        left = wadd(wia, w)
        if left == W_LE_INF:
            continue
        lc, ls = left
        ri = rows[i]
        for j in range(n):
            bw = rb[j]
            if bw == W_LE_INF:
                continue
            bc, bs = bw
            if lc == INF:
                cand = W_LE_NEG_INF if bc == NEG_INF else (INF, 0)
            elif bc == INF:
                cand = W_LE_NEG_INF if lc == NEG_INF else (INF, 0)
            elif lc == NEG_INF or bc == NEG_INF:
                cand = W_LE_NEG_INF
            else:
                cand = (lc + bc, ls & bs)
            if cand < ri[j]:
                ri[j] = cand
    for i in range(n):
        if rows[i][i] < W_LE_ZERO:
            return False
    return True


def _atom_indices(zone_or_idx, atom):
    idx = zone_or_idx
    a = idx[atom.x] if atom.x is not None else 0
    b = idx[atom.y] if atom.y is not None else 0
    return a, b


def guard_zone(z, guard):
    """Intersect a canonical zone with a conjunction of difference atoms."""
    if z.empty:
        return z
    rows = _thaw(z.m)
    for atom in guard.atoms:
        a, b = _atom_indices(z.idx, atom)
        w = (atom.c, 0 if atom.strict else 1)
        if not _tighten(rows, a, b, w):
            return _empty(z.clocks)
    return Zone(z.clocks, _freeze(rows), False)


def reset_history(z, clks):
    """Set the given history clocks to exactly 0."""
    if z.empty or not clks:
        return z
    rows = _thaw(z.m)
    n = len(rows)
    for x in clks:
        i = z.idx[x]
        for j in range(n):
            rows[i][j] = rows[0][j]
            rows[j][i] = rows[j][0]
        rows[i][i] = W_LE_ZERO
        rows[i][0] = W_LE_ZERO
        rows[0][i] = W_LE_ZERO
    return Zone(z.clocks, _freeze(rows), False)


def release_future(z, clks):
    """Release the given future clocks to arbitrary values in [-oo, 0].

    The result is canonical without a full closure pass: a released clock
    only constrains others through its cap at 0, and admits -oo, so entries
    into it are unbounded.
    """
    if z.empty or not clks:
        return z
    rows = _thaw(z.m)
    n = len(rows)
    rel = {z.idx[x] for x in clks}
    for i in rel:
        for j in range(n):
            rows[i][j] = wadd(W_LE_ZERO, rows[0][j]) if j not in rel else W_LE_INF
            rows[j][i] = W_LE_INF
        rows[i][i] = W_LE_ZERO
        rows[i][0] = W_LE_ZERO
        rows[0][i] = W_LE_INF
    return Zone(z.clocks, _freeze(rows), False)


def rename_zone(z, rn):
    """Apply a clock permutation: the new value of x is the old value of rn(x)."""
    if z.empty:
        return z
    n = len(z.m)
    src = [0] * n
    for x in z.clocks:
        src[z.idx[x]] = z.idx[rn.apply(x)]
    rows = [[z.m[src[i]][src[j]] for j in range(n)] for i in range(n)]
    return Zone(z.clocks, _freeze(rows), False)


def elapse(z):
    """Let an arbitrary nonneg. amount of time pass (all clocks grow equally).

    Upper bounds relax to the domain caps: a future clock may climb to 0
    (a clock pinned at -oo stays there), a history clock grows without bound
    but never reaches +oo unless it already could.  Lower bounds and
    differences are kept (delay 0 is allowed) and a closure pass restores
    tightness, since diagonal constraints may still cap a clock.
    """
    if z.empty:
        return z
    rows = _thaw(z.m)
    _elapse_rows(rows, z.idx, z.clocks)
    return Zone(z.clocks, _freeze(rows), False)


def shift_delay(z, d):
    """Elapse an exact amount of time d >= 0.

    Every finite clock value grows by d; bounds against the reference shift
    accordingly and are re-intersected with the domain caps, so a zone whose
    future clocks all time out strictly before reaching 0 becomes empty.
    """
    if z.empty:
        return z
    if d < 0:
        raise ValueError("negative delay")
    rows = _thaw(z.m)
    n = len(rows)
    for i in range(1, n):
        c, s = rows[i][0]
        rows[i][0] = (ext_add(c, d), s) if is_finite(c) else (c, s)
        c, s = rows[0][i]
        rows[0][i] = (ext_add(c, -d), s) if is_finite(c) else (c, s)
    caps_ok = True
    for x in z.clocks:
        i = z.idx[x]
        if x.kind == "future":
            caps_ok &= _tighten(rows, i, 0, W_LE_ZERO)
        else:
            caps_ok &= _tighten(rows, 0, i, W_LE_ZERO)
        if not caps_ok:
            return _empty(z.clocks)
    # translating by d preserves closure (paths through the reference shift
    # by +d then -d), and the cap intersections re-tighten incrementally
    return Zone(z.clocks, _freeze(rows), False)


def _guard_rows(rows, idx, guard):
    for atom in guard.atoms:
        a = idx[atom.x] if atom.x is not None else 0
        b = idx[atom.y] if atom.y is not None else 0
        if not _tighten(rows, a, b, (atom.c, 0 if atom.strict else 1)):
            return False
    return True


def _change_rows(rows, idx, clks):
    n = len(rows)
    resets = [idx[x] for x in clks if x.kind == "history"]
    rel = {idx[x] for x in clks if x.kind == "future"}
    for i in resets:
        for j in range(n):
            rows[i][j] = rows[0][j]
            rows[j][i] = rows[j][0]
        rows[i][i] = W_LE_ZERO
        rows[i][0] = W_LE_ZERO
        rows[0][i] = W_LE_ZERO
    for i in rel:
        r0 = rows[0]
        ri = rows[i]
        for j in range(n):
            ri[j] = wadd(W_LE_ZERO, r0[j]) if j not in rel else W_LE_INF
            rows[j][i] = W_LE_INF
        ri[i] = W_LE_ZERO
        ri[0] = W_LE_ZERO
        r0[i] = W_LE_INF


def _rename_rows(rows, idx, clocks, rn):
    n = len(rows)
    src = [0] * n
    for x in clocks:
        src[idx[x]] = idx[rn.apply(x)]
    return [[rows[src[i]][src[j]] for j in range(n)] for i in range(n)]


def _elapse_rows(rows, idx, clocks):
    """Relax uppers to the domain caps; single-pass recanonicalization.

    Only column 0 is relaxed, so the other entries of a canonical input stay
    shortest paths, and column 0 re-tightens with single-step detours
    rows[i][j] + cap[j] through them.
    """
    n = len(rows)
    caps = [None] * n
    for x in clocks:
        i = idx[x]
        if x.kind == "future":
            if rows[i][0][0] != NEG_INF:
                caps[i] = W_LE_ZERO
        else:
            if rows[i][0] != W_LE_INF:
                caps[i] = W_LT_INF
    col0 = [caps[i] if caps[i] is not None else rows[i][0] for i in range(n)]
    for i in range(1, n):
        best = col0[i]
        ri = rows[i]
        for j in range(1, n):
            if i == j:
                continue
            w = wadd(ri[j], col0[j])
            if w < best:
                best = w
        ri[0] = best


def _program_rows(rows, idx, clocks, program):
    """Run a transition program on a thawed canonical matrix.

    Returns the resulting rows, or None when a guard empties the zone.
    """
    for step in program:
        if isinstance(step, Guard):
            if not _guard_rows(rows, idx, step):
                return None
        elif isinstance(step, Change):
            _change_rows(rows, idx, step.clocks)
        elif isinstance(step, Rename):
            rows = _rename_rows(rows, idx, clocks, step)
        else:
            raise TypeError(step)
    return rows


class BranchTrie:
    """A family of transition programs indexed by shared prefixes.

    Combined automata multiply per-component branches; within one family the
    alternatives share long program prefixes (the other components' steps),
    and most die on their first unsatisfiable guard.  Walking the prefix
    tree applies every distinct step once per source zone instead of once
    per combination.
    """

    __slots__ = ("_children", "_leaves")

    def __init__(self, transitions):
        self._children = {}
        self._leaves = []
        for t in transitions:
            node = self
            for step in t.program:
                nxt = node._children.get(step)
                if nxt is None:
                    nxt = BranchTrie(())
                    node._children[step] = nxt
                node = nxt
            node._leaves.append(t)

    def successors_rows(self, rows0, idx, clocks):
        """All (transition, rows) pairs on a thawed matrix; input untouched.

        Transitions ending at the same trie node share one rows object, so
        callers must copy before mutating.
        """
        out = []
        stack = [(self, [r[:] for r in rows0])]
        while stack:
            node, rows = stack.pop()
            if node._leaves:
                final = [r[:] for r in rows] if node._children else rows
                for t in node._leaves:
                    out.append((t, final))
            items = list(node._children.items())
            last = len(items) - 1
            for k, (step, child) in enumerate(items):
                r = rows if (k == last and not node._leaves) else [row[:] for row in rows]
                if isinstance(step, Guard):
                    if not _guard_rows(r, idx, step):
                        continue
                elif isinstance(step, Change):
                    _change_rows(r, idx, step.clocks)
                elif isinstance(step, Rename):
                    r = _rename_rows(r, idx, clocks, step)
                else:
                    raise TypeError(step)
                stack.append((child, r))
        return out

    def successors(self, z, do_elapse=True):
        """All (transition, nonempty zone) pairs; elapsed when requested."""
        if z.empty:
            return []
        idx = z.idx
        clocks = z.clocks
        out = []
        stack = [(self, _thaw(z.m))]
        while stack:
            node, rows = stack.pop()
            if node._leaves:
                final = [r[:] for r in rows] if node._children else rows
                if do_elapse:
                    _elapse_rows(final, idx, clocks)
                zz = Zone(clocks, _freeze(final), False)
                for t in node._leaves:
                    out.append((t, zz))
            items = list(node._children.items())
            last = len(items) - 1
            for k, (step, child) in enumerate(items):
                r = rows if (k == last and not node._leaves) else [row[:] for row in rows]
                if isinstance(step, Guard):
                    if not _guard_rows(r, idx, step):
                        continue
                elif isinstance(step, Change):
                    _change_rows(r, idx, step.clocks)
                elif isinstance(step, Rename):
                    r = _rename_rows(r, idx, clocks, step)
                else:
                    raise TypeError(step)
                stack.append((child, r))
        return out


def apply_program_symbolic(z, program):
    if z.empty:
        return z
    rows = _program_rows(_thaw(z.m), z.idx, z.clocks, program)
    if rows is None:
        return _empty(z.clocks)
    return Zone(z.clocks, _freeze(rows), False)


def successor(z, program):
    """Transition program followed by arbitrary time elapse, or None."""
    if z.empty:
        return None
    rows = _program_rows(_thaw(z.m), z.idx, z.clocks, program)
    if rows is None:
        return None
    _elapse_rows(rows, z.idx, z.clocks)
    return Zone(z.clocks, _freeze(rows), False)


def initial_zone(clocks, guard):
    """Domain intersected with an initial guard (not yet elapsed)."""
    return guard_zone(universal_zone(clocks), guard)


def includes(zsup, zsub):
    """Set inclusion of canonical zones (entrywise bound comparison)."""
    if zsub.empty:
        return True
    if zsup.empty:
        return False
    return all(
        zsub.m[i][j] <= zsup.m[i][j]
        for i in range(len(zsub.m))
        for j in range(len(zsub.m))
    )


def can_be_minus_infinity(z, x):
    """Whether the future clock x can take the value -oo in this zone."""
    return (not z.empty) and z.m[0][z.idx[x]] == W_LE_INF


def can_be_plus_infinity(z, h):
    """Whether the history clock h can take the value +oo in this zone."""
    return (not z.empty) and z.m[z.idx[h]][0] == W_LE_INF


def force_minus_infinity(z, clks):
    """Restrict the zone to valuations where every clock in clks is -oo."""
    if z.empty:
        return z
    rows = _thaw(z.m)
    for x in clks:
        if not _tighten(rows, z.idx[x], 0, W_LE_NEG_INF):
            return _empty(z.clocks)
    return Zone(z.clocks, _freeze(rows), False)


# sampling -------------------------------------------------------------------


def _pick_finite(lo, lo_closed, hi, hi_closed, rng):
    """A rational in the given interval; bounds may be infinite."""
    if lo == NEG_INF and hi == INF:
        return Fraction(rng.randint(-3, 3))
    if lo == NEG_INF:
        return Fraction(hi) - (0 if hi_closed and rng.random() < 0.5 else 1)
    if hi == INF:
        return Fraction(lo) + (0 if lo_closed and rng.random() < 0.5 else 1)
    lo, hi = Fraction(lo), Fraction(hi)
    if lo == hi:
        if lo_closed and hi_closed:
            return lo
        return None
    if lo > hi:
        return None
    opts = [(lo + hi) / 2]
    if lo_closed:
        opts.append(lo)
    if hi_closed:
        opts.append(hi)
    return rng.choice(opts)


def sample_rows(rows, rng=None, prefer_finite=True):
    """A concrete solution of a canonical difference matrix, by variable index.

    Variables are fixed one by one inside their current derived bounds, the
    matrix re-tightened after each choice; closure guarantees each partial
    choice extends.  Infinite values are picked when forced, and otherwise
    with small probability unless prefer_finite is False.
    """
    rng = rng or random.Random(0)
    val = {}
    for i in range(1, len(rows)):
        hi, hi_s = rows[i][0]
        lo_w, lo_s = rows[0][i]
        # value of x lies in (-lo_w) .. hi
        lo = -lo_w if is_finite(lo_w) else (INF if lo_w == NEG_INF else NEG_INF)
        v = None
        if hi == NEG_INF:
            v = NEG_INF
        elif lo == INF:
            v = INF
        else:
            # an infinite value satisfies a finite difference bound against
            # no partner (oo - oo = +oo), so it is only pickable when the
            # whole row (for +oo) or column (for -oo) is unconstrained
            allow_neg = lo == NEG_INF and lo_s == 1 and all(
                rows[j][i] == W_LE_INF for j in range(len(rows)) if j != i
            )
            allow_pos = hi == INF and hi_s == 1 and all(
                rows[i][j] == W_LE_INF for j in range(len(rows)) if j != i
            )
            p = 0.2 if prefer_finite else 0.5
            if allow_neg and rng.random() < p:
                v = NEG_INF
            elif allow_pos and rng.random() < p:
                v = INF
            else:
                v = _pick_finite(lo, lo_s == 1, hi, hi_s == 1, rng)
                if v is None:
                    v = NEG_INF if allow_neg else (INF if allow_pos else None)
        if v is None:
            raise AssertionError("canonical system admitted no value for #%d" % i)
        if v == NEG_INF:
            ok = _tighten(rows, i, 0, W_LE_NEG_INF)
        elif v == INF:
            ok = _tighten(rows, 0, i, W_LE_NEG_INF)
        else:
            ok = _tighten(rows, i, 0, (v, 1)) and _tighten(rows, 0, i, (-v, 1))
        if not ok:
            raise AssertionError("sampling emptied a canonical system at #%d" % i)
        val[i] = v
    return val


def sample_point(z, rng=None, prefer_finite=True):
    """A concrete valuation inside a non-empty canonical zone."""
    if z.empty:
        raise EmptyZone("cannot sample an empty zone")
    by_index = sample_rows(_thaw(z.m), rng, prefer_finite)
    return {x: by_index[z.idx[x]] for x in z.clocks}


# raw difference systems (no clock domains) reuse the same machinery


def raw_rows(nvars):
    """An unconstrained system over nvars variables plus the reference 0."""
    n = nvars + 1
    rows = [[W_LE_INF] * n for _ in range(n)]
    for i in range(n):
        rows[i][i] = W_LE_ZERO
    return rows


def raw_tighten(rows, a, b, w):
    """Add (var_a - var_b) bounded by w; False when inconsistent."""
    return _tighten(rows, a, b, w)


def raw_close(rows):
    return _closed(rows)


def contains_point(z, val):
    """Membership of a concrete valuation in a zone."""
    if z.empty:
        return False
    from .extreal import ext_sub

    n = len(z.m)
    vals = [0] + [val[x] for x in z.clocks]
    for i in range(n):
        for j in range(n):
            if i == j:
                # diagonal entries are path bookkeeping, not constraints;
                # (-oo) - (-oo) = +oo would wrongly reject pinned clocks
                continue
            c, s = z.m[i][j]
            d = ext_sub(vals[i], vals[j])
            if not (d < c or (s == 1 and d == c)):
                return False
    return True
