"""Region-like equivalences: threshold/fractional bisimulation properties,
the finite-index simulation, their incomparability, and run rerouting."""

import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mitlgta.automata import Atom, Guard, change, delay, future, history
from mitlgta.equivalence import (
    Trace,
    adjust_to_region,
    approx_equiv,
    match_delay,
    match_release,
    replay,
    reroute_run,
    sim_equiv,
    sim_signature,
)
from mitlgta.extreal import INF, NEG_INF, efrac

F0, F1 = future("f0"), future("f1")
H0 = history("h0")
CLOCKS = (F0, F1, H0)
M = 2


def _frac(rng):
    return Fraction(rng.randint(0, 5), rng.choice([1, 2, 3, 4, 6]))


def _rand_val(rng):
    v = {}
    for c in CLOCKS:
        r = rng.random()
        if r < 0.12:
            v[c] = NEG_INF if c.kind == "future" else INF
        else:
            mag = rng.randint(0, 4) + Fraction(rng.randint(0, 3), 4)
            v[c] = -mag if c.kind == "future" else mag
    return v


def _frac_twin(v, rng):
    """An approx-equivalent partner: same integer parts, fractional parts
    remapped through a random monotone bijection of [0,1] fixing 0."""
    fracs = sorted({efrac(x) for x in v.values() if x != INF and x != NEG_INF})
    targets = sorted(rng.sample([Fraction(i, 24) for i in range(1, 24)], len(fracs)))
    remap = {f: (Fraction(0) if f == 0 else t) for f, t in zip(fracs, targets)}
    if Fraction(0) in remap:
        remap[Fraction(0)] = Fraction(0)
    w = {}
    for c, x in v.items():
        if x == INF or x == NEG_INF:
            w[c] = x
        else:
            f = efrac(x)
            base = x - f
            w[c] = base + remap[f]
    return w


def _rand_atom(rng, maxc):
    operands = [None, F0, F1, H0]
    x, y = rng.sample(operands, 2)
    return Atom(x, y, rng.random() < 0.5, Fraction(rng.randint(-maxc, maxc)))


def test_guard_agreement_on_equivalent_valuations():
    rng = random.Random(41)
    for _ in range(2000):
        v1 = _rand_val(rng)
        v2 = _frac_twin(v1, rng)
        assert approx_equiv(v1, v2, M), (v1, v2)
        a = _rand_atom(rng, M)
        assert a.holds(v1) == a.holds(v2), (v1, v2, a)


def test_match_delay_preserves_equivalence():
    rng = random.Random(43)
    for _ in range(1000):
        v1 = _rand_val(rng)
        v2 = _frac_twin(v1, rng)
        d1 = Fraction(rng.randint(0, 8), rng.choice([1, 2, 3, 4]))
        d2 = match_delay(v1, v2, d1, M)
        assert d2 >= 0
        assert approx_equiv(delay(v1, d1), delay(v2, d2), M), (v1, v2, d1, d2)


def test_match_release_preserves_equivalence():
    rng = random.Random(47)
    for _ in range(1000):
        v1 = _rand_val(rng)
        v2 = _frac_twin(v1, rng)
        x = rng.choice([F0, F1])
        u = rng.choice(
            [NEG_INF, Fraction(0), -Fraction(rng.randint(0, 9), rng.choice([1, 2, 3]))]
        )
        u1 = dict(v1)
        u1[x] = u
        u2 = match_release(v1, v2, x, u1, M)
        assert all(u2[y] == v2[y] for y in v2 if y != x)
        assert approx_equiv(u1, u2, M), (u1, u2)


def test_history_reset_preserves_equivalence():
    rng = random.Random(53)
    for _ in range(1000):
        v1 = _rand_val(rng)
        v2 = _frac_twin(v1, rng)
        w1, w2 = dict(v1), dict(v2)
        w1[H0] = w2[H0] = Fraction(0)
        assert approx_equiv(w1, w2, M)


@st.composite
def _pairs(draw):
    rng = random.Random(draw(st.integers(0, 2**30)))
    v1 = _rand_val(rng)
    return v1, _frac_twin(v1, rng), rng


@settings(max_examples=200, deadline=None)
@given(_pairs(), st.fractions(min_value=0, max_value=9, max_denominator=4))
def test_match_delay_property(pair, d1):
    v1, v2, _ = pair
    d2 = match_delay(v1, v2, d1, M)
    assert approx_equiv(delay(v1, d1), delay(v2, d2), M)


@settings(max_examples=200, deadline=None)
@given(_pairs(), st.sampled_from([F0, F1]),
       st.fractions(min_value=-9, max_value=0, max_denominator=6))
def test_match_release_property(pair, x, u):
    v1, v2, _ = pair
    u1 = dict(v1)
    u1[x] = u
    u2 = match_release(v1, v2, x, u1, M)
    assert approx_equiv(u1, u2, M)


def test_equivalences_are_incomparable():
    x, y = history("x"), history("y")
    # approx-equivalent but not sim-equivalent (n = 2, M = 2): the per-clock
    # simulation thresholds reach n*M = 4 and tell 4 from 5
    v1 = {x: Fraction(M + 2), y: Fraction(1)}
    v2 = {x: Fraction(M + 3), y: Fraction(1)}
    assert approx_equiv(v1, v2, M)
    assert not sim_equiv(v1, v2, M)
    # sim-equivalent but not approx-equivalent (n = 1, M = 2): both below
    # -n*M, but the bisimulation distinguishes every integer threshold
    z = future("z")
    w1 = {z: Fraction(-3)}
    w2 = {z: Fraction(-4)}
    assert sim_equiv(w1, w2, M)
    assert not approx_equiv(w1, w2, M)


def test_sim_signature_is_finite_index():
    # unlike the bisimulation, the signature collapses unboundedly deep and
    # unboundedly separated values, so its image is finite
    z = future("z")
    base = sim_signature({z: Fraction(-7)}, M, n=1)
    for d in (-8, -50, Fraction(-701, 3)):
        assert sim_signature({z: Fraction(d)}, M, n=1) == base
    w = history("w")
    sep = [
        sim_signature({z: Fraction(-9), w: Fraction(g)}, M, n=2)
        for g in (13, 14, 1000)
    ]
    assert sep[0] == sep[1] == sep[2]
    # while the bisimulation-style classes distinguish all of these
    assert not approx_equiv({z: Fraction(-8)}, {z: Fraction(-50)}, M)


def test_adjust_to_region_requires_sim():
    v1 = {F0: Fraction(-1)}
    v2 = {F0: Fraction(-20)}
    with pytest.raises(ValueError):
        adjust_to_region(v1, v2, M)


def _deep_trace(rng):
    """A two-step run whose end is sim-equivalent to its start: deep future
    values, a loose guard before each release, history reset at the end."""
    n1m = (len(CLOCKS) + 1) * M  # deepest threshold any signature inspects
    lo = n1m + 2
    d1 = Fraction(rng.randint(0, 2), rng.choice([1, 2, 3]))
    d2 = Fraction(rng.randint(0, 2), rng.choice([1, 2, 3]))
    a0 = lo + rng.randint(0, 4) + Fraction(rng.randint(0, 3), 4)
    a1 = a0 + lo + rng.randint(0, 4) + Fraction(rng.randint(0, 3), 4)
    v0 = {F0: -a0, F1: -a1, H0: Fraction(0)}
    # end targets, also deep and widely separated
    b0 = lo + rng.randint(0, 4) + Fraction(rng.randint(0, 3), 4)
    b1 = b0 + lo + rng.randint(0, 4) + Fraction(rng.randint(0, 3), 4)
    loose = Guard((Atom(F0, None, False, Fraction(-M)), Atom(F1, None, False, Fraction(-M))))
    steps = [
        (d1, (loose, change(F0)), {F0: -b0 - d2}),
        (d2, (loose, change(F1), change(H0)), {F1: -b1}),
    ]
    return Trace(v0, steps)


def test_reroute_run_reaches_adjusted_valuation():
    rng = random.Random(61)
    for _ in range(200):
        tr = _deep_trace(rng)
        vals = replay(tr)
        v0, vk = vals[0], vals[-1]
        assert sim_equiv(v0, vk, M), (v0, vk)
        vp = adjust_to_region(v0, vk, M)
        assert approx_equiv(v0, vp, M)
        new_tr = reroute_run(tr, vp)
        assert replay(new_tr)[-1] == vp


def test_reroute_rejects_unreleased_clock():
    tr = Trace({F0: Fraction(-10), F1: Fraction(-10), H0: Fraction(0)}, [])
    with pytest.raises(ValueError):
        reroute_run(tr, {F0: Fraction(-11), F1: Fraction(-10), H0: Fraction(0)})
