"""Formula-to-transducer compilation: component sizes, the bounded-until
bookkeeping layer, and differential checks of the symbolic evaluators
against direct formula evaluation."""

import random

from conftest import PROPS, random_formula, random_word

from mitlgta.formula import TRUE, FALSE, Interval, eval_at, parse
from mitlgta.symrun import network_outputs, symbolic_outputs
from mitlgta.translate import (
    compile_report,
    formula_to_gtt,
    formula_to_network,
    gtt_to_gta,
    needs_special_points,
    pair_pool_size,
    until_transducer,
)
from mitlgta.automata import is_safe


def test_pair_pool_size_formula():
    assert pair_pool_size(Interval(1, 2, False, False)) == 2
    assert pair_pool_size(Interval(2, 3, True, True)) == 3
    assert pair_pool_size(Interval(1, 4, True, True)) == 2
    assert pair_pool_size(Interval(2, 5, False, True)) == 2


def test_until_needs_bookkeeping_only_when_two_sided():
    assert needs_special_points(Interval(1, 2, True, True))
    assert not needs_special_points(Interval(0, 2, True, True))
    from mitlgta.extreal import INF

    assert not needs_special_points(Interval(3, INF, True, False))


def test_until_transducer_size_bounds():
    for iv in (
        Interval(1, 2, False, False),
        Interval(2, 3, True, True),
        Interval(1, 4, True, True),
        Interval(2, 5, False, True),
    ):
        k = pair_pool_size(iv)
        t = until_transducer(iv)
        assert len(t.states) <= 6 * k
        assert len(t.future_clocks()) == 2 * k + 2


def test_compile_report_counts():
    rep = compile_report(parse("p U[1,2] q"))
    assert rep["untils"][0]["k"] == 2
    assert rep["untils"][0]["pair_pool_states"] == 5
    assert rep["untils"][0]["locations"] <= 12


def test_compiled_acceptor_is_safe():
    gta = gtt_to_gta(formula_to_gtt(parse("T U[1,2] p")))
    ok, diags = is_safe(gta)
    assert ok, diags


def _positions(word):
    return range(len(word))


def test_network_agrees_with_prefix_evaluation():
    rng = random.Random(101)
    agreements = 0
    for _ in range(120):
        phi = random_formula(rng, depth=3)
        word = random_word(rng, rng.randint(1, 8))
        net = formula_to_network(phi)
        run = network_outputs(net, word)
        for i in _positions(word):
            v = eval_at(word, phi, i)
            if v is TRUE:
                assert 1 in run.outputs[i], (phi, word, i)
                agreements += 1
            elif v is FALSE:
                assert 0 in run.outputs[i], (phi, word, i)
                agreements += 1
    assert agreements > 200


def test_network_matches_materialized_product():
    rng = random.Random(103)
    for _ in range(40):
        phi = random_formula(rng, depth=2)
        word = random_word(rng, rng.randint(1, 6))
        net_run = network_outputs(formula_to_network(phi), word)
        flat_run = symbolic_outputs(formula_to_gtt(phi), word)
        assert net_run.outputs == flat_run.outputs, (phi, word)
        assert net_run.alive == flat_run.alive


def test_atomic_transducer_reads_only_own_prop():
    from mitlgta.translate import atomic_transducer

    t = atomic_transducer("p", PROPS)
    outs = {(tr.letter, tr.output) for tr in t.transitions}
    for letter, out in outs:
        assert out == (1 if "p" in letter else 0)
