"""Formula parsing, three-valued prefix evaluation, and exact lasso
evaluation."""

import random
from fractions import Fraction

import pytest
from conftest import random_formula, random_word

from mitlgta.formula import (
    FALSE,
    TRUE,
    UNKNOWN,
    And,
    Interval,
    LassoWord,
    Next,
    Not,
    Or,
    ParseError,
    Prop,
    Until,
    eval_at,
    eval_lasso,
    parse,
    v_and,
    v_not,
    v_or,
    word_from_json,
    word_to_json,
)
from mitlgta.extreal import INF


def test_parse_shapes():
    f = parse("p U[1,2] q")
    assert isinstance(f, Until)
    assert f.interval == Interval(1, 2, True, True)
    assert f.left == Prop("p") and f.right == Prop("q")

    f = parse("X(0,3] (p & !q)")
    assert isinstance(f, Next)
    assert f.interval == Interval(0, 3, False, True)
    assert isinstance(f.child, And) and isinstance(f.child.right, Not)

    f = parse("p | q & r")  # & binds tighter than |
    assert isinstance(f, Or) and isinstance(f.right, And)

    # F/G sugar and unbounded intervals
    f = parse("F[1,inf) p")
    assert isinstance(f, Until) and f.interval == Interval(1, INF, True, False)
    g = parse("G p")
    assert isinstance(g, Not) and isinstance(g.child, Until)


def test_parse_true_expands_to_tautology():
    f = parse("T U[1,2] p")
    assert isinstance(f, Until)
    assert isinstance(f.left, Or) and isinstance(f.left.right, Not)
    assert f.left.left == f.left.right.child


def test_parse_roundtrip_via_str():
    rng = random.Random(5)
    for _ in range(200):
        f = random_formula(rng, depth=3)
        assert parse(str(f)) == f


def test_parse_rejects_garbage():
    for bad in ["", "p U", "p &", "X[2,1] p", "U[1,2] p", "p q", "X[1,1] p"]:
        with pytest.raises(ValueError):
            parse(bad)


def test_interval_validation():
    with pytest.raises(ValueError):
        Interval(2, 1)
    with pytest.raises(ValueError):
        Interval(1, 1)  # only [0,0] may be singular
    with pytest.raises(ValueError):
        Interval(0, INF, True, True)  # unbounded must be right-open
    assert Interval(0, 0).contains(Fraction(0))
    iv = Interval(1, 2, False, True)
    assert not iv.contains(Fraction(1)) and iv.contains(Fraction(2))


def test_three_valued_connectives():
    assert v_not(TRUE) is FALSE and v_not(UNKNOWN) is UNKNOWN
    assert v_and(TRUE, UNKNOWN) is UNKNOWN and v_and(FALSE, UNKNOWN) is FALSE
    assert v_or(TRUE, UNKNOWN) is TRUE and v_or(FALSE, UNKNOWN) is UNKNOWN


def _w(*events):
    return [(frozenset(a), Fraction(t)) for a, t in events]


def test_eval_at_until_basic():
    w = _w((["p"], 0), (["p"], 1), (["q"], Fraction(3, 2)))
    f = parse("p U[1,2] q")
    assert eval_at(w, f, 0) is TRUE
    # from position 1 the left operand fails before the window opens
    assert eval_at(w, f, 1) is FALSE
    # open window, chain of p intact, no witness yet
    assert eval_at(_w((["p"], 0), (["p"], 1)), f, 0) is UNKNOWN
    w2 = _w(([], 0), (["q"], 3))
    assert eval_at(w2, f, 0) is FALSE  # window closed before any q


def test_eval_at_next():
    w = _w((["p"], 0), (["q"], 2))
    assert eval_at(w, parse("X[1,3] q"), 0) is TRUE
    assert eval_at(w, parse("X[0,1] q"), 0) is FALSE
    assert eval_at(w, parse("X q"), 1) is UNKNOWN


def test_eval_at_verdicts_sound_on_extensions():
    # any TRUE/FALSE verdict on a prefix persists when the word is extended
    rng = random.Random(9)
    checked = 0
    for _ in range(300):
        f = random_formula(rng, depth=3)
        w = random_word(rng, rng.randint(2, 8))
        if len(w) < 2:
            continue
        cut = rng.randint(1, len(w) - 1)
        for i in range(cut):
            v = eval_at(w[:cut], f, i)
            if v is not UNKNOWN:
                assert eval_at(w, f, i) is v
                checked += 1
    assert checked > 100


def test_eval_lasso_matches_prefix_verdicts():
    rng = random.Random(27)
    checked = 0
    for _ in range(200):
        f = random_formula(rng, depth=2)
        w = random_word(rng, rng.randint(1, 6))
        if not w:
            continue
        lw = LassoWord((), tuple(w), Fraction(w[-1][1] - w[0][1] + 1))
        # unroll enough copies of the cycle that prefix verdicts are sound
        unrolled = [(a, lw.time(i)) for i, (a, _) in enumerate(list(w) * 6)]
        for i in range(len(w)):
            v = eval_at(unrolled, f, i)
            if v is not UNKNOWN:
                assert eval_lasso(lw, f, i) is (v is TRUE)
                checked += 1
    assert checked > 100


def test_lasso_word_validation():
    with pytest.raises(ValueError):
        LassoWord((), (), Fraction(1))
    with pytest.raises(ValueError):
        LassoWord((), ((frozenset(), Fraction(0)),), Fraction(0))
    with pytest.raises(ValueError):
        # cycle spans 3 but period is 2: the wrap would go back in time
        LassoWord(
            (),
            ((frozenset(), Fraction(0)), (frozenset(), Fraction(3))),
            Fraction(2),
        )
    lw = LassoWord((), ((frozenset("p"), Fraction(1)),), Fraction(2))
    assert lw.time(3) == 7 and lw.letter(3) == frozenset("p")


def test_word_json_roundtrip():
    w = _w((["p", "q"], 0), ([], Fraction(1, 3)))
    assert word_from_json(word_to_json(w)) == w


def test_lasso_json_roundtrip():
    lw = LassoWord(
        ((frozenset(["p"]), Fraction(0)),),
        ((frozenset(), Fraction(1)), (frozenset(["q"]), Fraction(3, 2))),
        Fraction(2),
    )
    assert LassoWord.from_json(lw.to_json()) == lw
