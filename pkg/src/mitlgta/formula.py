"""MITL formulas under pointwise semantics over timed words.

Grammar (concrete syntax)::

    phi ::= prop | T | true | ! phi | phi & phi | phi | phi
          | X[l,u] phi | phi U[l,u] phi | F[l,u] phi | G[l,u] phi
          | ( phi )

Propositions match ``[a-z][a-z0-9_]*``.  Interval brackets may be ``[``/``(``
and ``]``/``)``; an omitted interval means ``[0,inf)``.  Allowed intervals are
the punctual ``[0,0]`` and non-singular ``a < b`` with integer endpoints
(``b`` may be ``inf``, in which case the right end must be open).

``F``/``G`` and ``true`` are sugar: ``true`` becomes ``(z | !z)`` for a
proposition ``z`` already occurring in the formula (so the alphabet is not
extended), ``F[I] p`` becomes ``true U[I] p`` and ``G[I] p`` its dual.
"""

import json
import re
from dataclasses import dataclass
from fractions import Fraction

from .extreal import INF, rat, rat_str

# --------------------------------------------------------------------------
# three-valued verdicts


class Verdict3:
    """Kleene truth values for finite-prefix evaluation."""

    def __init__(self, name):
        self.name = name

    def __repr__(self):
        return self.name


TRUE = Verdict3("TRUE")
FALSE = Verdict3("FALSE")
UNKNOWN = Verdict3("UNKNOWN")


def v_not(a):
    if a is TRUE:
        return FALSE
    if a is FALSE:
        return TRUE
    return UNKNOWN


def v_and(a, b):
    if a is FALSE or b is FALSE:
        return FALSE
    if a is TRUE and b is TRUE:
        return TRUE
    return UNKNOWN


def v_or(a, b):
    return v_not(v_and(v_not(a), v_not(b)))


def v_bool(b):
    return TRUE if b else FALSE


# --------------------------------------------------------------------------
# intervals


@dataclass(frozen=True)
class Interval:
    """Integer-bounded interval of time distances."""

    lower: int
    upper: object  # int or INF
    lower_closed: bool = True
    upper_closed: bool = True

    def __post_init__(self):
        if self.lower < 0:
            raise ValueError("negative interval bound")
        if self.upper == INF:
            if self.upper_closed:
                raise ValueError("an unbounded interval must be right-open")
        elif self.lower == self.upper:
            if not (self.lower == 0 and self.lower_closed and self.upper_closed):
                raise ValueError("the only singular interval allowed is [0,0]")
        elif self.lower > self.upper:
            raise ValueError("empty interval")

    def contains(self, value):
        """Membership of an extended rational in the interval."""
        if self.lower_closed:
            if value < self.lower:
                return False
        elif value <= self.lower:
            return False
        if self.upper_closed:
            if value > self.upper:
                return False
        elif value >= self.upper:
            return False
        return True

    def contains_zero(self):
        return self.lower == 0 and self.lower_closed

    def is_two_sided(self):
        """Bounded away from zero on both ends: needs the bookkeeping layer."""
        return self.lower >= 1 and self.upper != INF

    def __str__(self):
        lo = "[" if self.lower_closed else "("
        hi = "]" if self.upper_closed else ")"
        up = "inf" if self.upper == INF else str(self.upper)
        return "%s%d,%s%s" % (lo, self.lower, up, hi)


FULL = Interval(0, INF, True, False)


# --------------------------------------------------------------------------
# AST


@dataclass(frozen=True)
class Formula:
    def props(self):
        out = set()
        self._collect(out)
        return out

    def _collect(self, out):
        raise NotImplementedError


@dataclass(frozen=True)
class Prop(Formula):
    name: str

    def _collect(self, out):
        out.add(self.name)

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class Not(Formula):
    child: Formula

    def _collect(self, out):
        self.child._collect(out)

    def __str__(self):
        return "!" + _paren(self.child)


@dataclass(frozen=True)
class And(Formula):
    left: Formula
    right: Formula

    def _collect(self, out):
        self.left._collect(out)
        self.right._collect(out)

    def __str__(self):
        return "%s & %s" % (_paren(self.left), _paren(self.right))


@dataclass(frozen=True)
class Or(Formula):
    left: Formula
    right: Formula

    def _collect(self, out):
        self.left._collect(out)
        self.right._collect(out)

    def __str__(self):
        return "%s | %s" % (_paren(self.left), _paren(self.right))


@dataclass(frozen=True)
class Next(Formula):
    interval: Interval
    child: Formula

    def _collect(self, out):
        self.child._collect(out)

    def __str__(self):
        return "X%s %s" % (self.interval, _paren(self.child))


@dataclass(frozen=True)
class Until(Formula):
    interval: Interval
    left: Formula
    right: Formula

    def _collect(self, out):
        self.left._collect(out)
        self.right._collect(out)

    def __str__(self):
        return "%s U%s %s" % (_paren(self.left), self.interval, _paren(self.right))


def _paren(f):
    if isinstance(f, Prop):
        return str(f)
    return "(%s)" % f


# --------------------------------------------------------------------------
# parser


_TOKEN = re.compile(
    r"\s*(?:(?P<num>\d+)|(?P<inf>inf)|(?P<true>true|T\b)|(?P<prop>[a-z][a-z0-9_]*)"
    r"|(?P<op>[!&|,UXFG()\[\]]))"
)


class ParseError(ValueError):
    pass


def _tokenize(s):
    toks = []
    pos = 0
    while pos < len(s):
        m = _TOKEN.match(s, pos)
        if not m or m.end() == pos and not s[pos:].strip():
            break
        if not m:
            raise ParseError("bad character at %r" % s[pos:])
        pos = m.end()
        if m.group("num"):
            toks.append(("num", int(m.group("num"))))
        elif m.group("inf"):
            toks.append(("inf", INF))
        elif m.group("true"):
            toks.append(("true", None))
        elif m.group("prop"):
            name = m.group("prop")
            if name in ("U", "X", "F", "G"):
                toks.append(("op", name))
            else:
                toks.append(("prop", name))
        else:
            toks.append(("op", m.group("op")))
    if s[pos:].strip():
        raise ParseError("bad character at %r" % s[pos:].strip())
    return toks


class _TrueMark(Formula):
    """Placeholder for the `true` literal, replaced after parsing."""

    def _collect(self, out):
        pass


class _Parser:
    def __init__(self, toks):
        self.toks = toks
        self.i = 0

    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else ("eof", None)

    def take(self):
        t = self.peek()
        self.i += 1
        return t

    def expect(self, kind, val=None):
        k, v = self.take()
        if k != kind or (val is not None and v != val):
            raise ParseError("expected %s %r, got %s %r" % (kind, val, k, v))
        return v

    # interval after a temporal operator; None if absent
    def try_interval(self):
        k, v = self.peek()
        if k != "op" or v not in ("[", "("):
            return None
        # lookahead: an interval must continue with num/inf
        if self.i + 1 < len(self.toks) and self.toks[self.i + 1][0] in ("num", "inf"):
            lc = v == "["
            self.take()
            lo = self.take()
            if lo[0] not in ("num", "inf"):
                raise ParseError("bad interval lower bound")
            self.expect("op", ",")
            hi = self.take()
            if hi[0] not in ("num", "inf"):
                raise ParseError("bad interval upper bound")
            k2, v2 = self.take()
            if k2 != "op" or v2 not in ("]", ")"):
                raise ParseError("unterminated interval")
            if lo[1] == INF:
                raise ParseError("interval lower bound must be finite")
            return Interval(lo[1], hi[1], lc, v2 == "]")
        return None

    def interval_or_full(self):
        iv = self.try_interval()
        return FULL if iv is None else iv

    def parse_or(self):
        f = self.parse_and()
        while self.peek() == ("op", "|"):
            self.take()
            f = Or(f, self.parse_and())
        return f

    def parse_and(self):
        f = self.parse_until()
        while self.peek() == ("op", "&"):
            self.take()
            f = And(f, self.parse_until())
        return f

    def parse_until(self):
        f = self.parse_unary()
        if self.peek() == ("op", "U"):
            self.take()
            iv = self.interval_or_full()
            return Until(iv, f, self.parse_until())
        return f

    def parse_unary(self):
        k, v = self.peek()
        if (k, v) == ("op", "!"):
            self.take()
            return Not(self.parse_unary())
        if (k, v) == ("op", "X"):
            self.take()
            iv = self.interval_or_full()
            return Next(iv, self.parse_unary())
        if (k, v) == ("op", "F"):
            self.take()
            iv = self.interval_or_full()
            return Until(iv, _TrueMark(), self.parse_unary())
        if (k, v) == ("op", "G"):
            self.take()
            iv = self.interval_or_full()
            return Not(Until(iv, _TrueMark(), Not(self.parse_unary())))
        if (k, v) == ("op", "("):
            self.take()
            f = self.parse_or()
            self.expect("op", ")")
            return f
        if k == "true":
            self.take()
            return _TrueMark()
        if k == "prop":
            self.take()
            return Prop(v)
        raise ParseError("unexpected token %s %r" % (k, v))


def _replace_true(f, tautology):
    if isinstance(f, _TrueMark):
        return tautology
    if isinstance(f, Prop):
        return f
    if isinstance(f, Not):
        return Not(_replace_true(f.child, tautology))
    if isinstance(f, And):
        return And(_replace_true(f.left, tautology), _replace_true(f.right, tautology))
    if isinstance(f, Or):
        return Or(_replace_true(f.left, tautology), _replace_true(f.right, tautology))
    if isinstance(f, Next):
        return Next(f.interval, _replace_true(f.child, tautology))
    if isinstance(f, Until):
        return Until(f.interval, _replace_true(f.left, tautology), _replace_true(f.right, tautology))
    raise TypeError(f)


def parse(s):
    """Parse the concrete syntax into a Formula."""
    p = _Parser(_tokenize(s))
    f = p.parse_or()
    if p.peek()[0] != "eof":
        raise ParseError("trailing input: %r" % (p.peek(),))
    props = sorted(f.props())
    z = Prop(props[0] if props else "p0")
    return _replace_true(f, Or(z, Not(z)))


# --------------------------------------------------------------------------
# timed words


def check_word(word):
    """word: list of (frozenset of props, rational timestamp), nondecreasing."""
    prev = 0
    for letter, t in word:
        if t < prev:
            raise ValueError("timestamps must be nondecreasing and start >= 0")
        prev = t
    return word


def word_to_json(word):
    return [{"letter": sorted(a), "t": rat_str(t)} for a, t in word]


def word_from_json(data):
    if isinstance(data, str):
        data = json.loads(data)
    return check_word([(frozenset(e["letter"]), rat(e["t"])) for e in data])


@dataclass(frozen=True)
class LassoWord:
    """Ultimately periodic timed word: prefix . cycle^omega.

    Cycle timestamps are absolute for the first iteration; each further
    iteration is shifted by ``period``, which must be positive (non-Zeno)
    and large enough to keep timestamps nondecreasing across the wrap.
    """

    prefix: tuple
    cycle: tuple
    period: object

    def __post_init__(self):
        if not self.cycle:
            raise ValueError("empty cycle")
        if self.period <= 0:
            raise ValueError("period must be positive")
        check_word(list(self.prefix) + list(self.cycle))
        if self.cycle[0][1] + self.period < self.cycle[-1][1]:
            raise ValueError("period too small for cycle span")
        if self.prefix and self.cycle[0][1] < self.prefix[-1][1]:
            raise ValueError("cycle must not start before prefix ends")

    def letter(self, i):
        p, c = len(self.prefix), len(self.cycle)
        if i < p:
            return self.prefix[i][0]
        return self.cycle[(i - p) % c][0]

    def time(self, i):
        p, c = len(self.prefix), len(self.cycle)
        if i < p:
            return self.prefix[i][1]
        j = i - p
        return self.cycle[j % c][1] + (j // c) * self.period

    def to_json(self):
        return {
            "prefix": word_to_json(list(self.prefix)),
            "cycle": word_to_json(list(self.cycle)),
            "period": rat_str(self.period),
        }

    @staticmethod
    def from_json(data):
        if isinstance(data, str):
            data = json.loads(data)
        return LassoWord(
            tuple(word_from_json(data["prefix"])),
            tuple(word_from_json(data["cycle"])),
            rat(data["period"]),
        )


# --------------------------------------------------------------------------
# three-valued evaluation on finite prefixes


def eval_at(word, f, i):
    """Three-valued truth of f at position i of a finite timed word.

    TRUE/FALSE verdicts are sound for every infinite timed extension of the
    word; UNKNOWN means the prefix leaves the outcome open (the check is
    conservative for joint satisfiability of future obligations, so some
    semantically determined positions may also report UNKNOWN).
    """
    if not 0 <= i < len(word):
        raise IndexError(i)
    if isinstance(f, Prop):
        return v_bool(f.name in word[i][0])
    if isinstance(f, Not):
        return v_not(eval_at(word, f.child, i))
    if isinstance(f, And):
        return v_and(eval_at(word, f.left, i), eval_at(word, f.right, i))
    if isinstance(f, Or):
        return v_or(eval_at(word, f.left, i), eval_at(word, f.right, i))
    if isinstance(f, Next):
        if i + 1 >= len(word):
            return UNKNOWN
        gap = word[i + 1][1] - word[i][1]
        if not f.interval.contains(gap):
            return FALSE
        return eval_at(word, f.child, i + 1)
    if isinstance(f, Until):
        iv = f.interval
        t0 = word[i][1]
        result = FALSE
        chain = TRUE  # conjunction of left-operand verdicts below j
        for j in range(i, len(word)):
            d = word[j][1] - t0
            if iv.upper != INF and not (
                d < iv.upper or (iv.upper_closed and d == iv.upper)
            ):
                break
            here = v_and(v_bool(iv.contains(d)), v_and(eval_at(word, f.right, j), chain))
            result = v_or(result, here)
            if result is TRUE:
                return TRUE
            chain = v_and(chain, eval_at(word, f.left, j))
            if chain is FALSE:
                return result
        # a witness beyond the prefix?
        if chain is FALSE:
            return result
        d_last = word[-1][1] - t0
        if iv.upper != INF:
            exceeded = d_last > iv.upper or (d_last == iv.upper and not iv.upper_closed)
            if exceeded:
                return result
        return v_or(result, UNKNOWN)
    raise TypeError(f)


# --------------------------------------------------------------------------
# exact evaluation on lasso words


def eval_lasso(lw, f, i):
    """Exact truth of f at position i of an ultimately periodic word.

    Truth values on the cyclic part repeat with the cycle (the suffix at
    position j + len(cycle) is the suffix at j shifted in time), so the
    recursion folds positions back into one window and terminates.
    """
    memo = {}
    p, c = len(lw.prefix), len(lw.cycle)

    def fold(j):
        if j >= p + c:
            return p + (j - p) % c
        return j

    def ev(g, j):
        j = fold(j)
        key = (id(g), j)
        if key in memo:
            return memo[key]
        memo[key] = None  # cycle guard; never hit for well-founded recursion
        r = _ev(g, j)
        memo[key] = r
        return r

    def _ev(g, j):
        if isinstance(g, Prop):
            return g.name in lw.letter(j)
        if isinstance(g, Not):
            return not ev(g.child, j)
        if isinstance(g, And):
            return ev(g.left, j) and ev(g.right, j)
        if isinstance(g, Or):
            return ev(g.left, j) or ev(g.right, j)
        if isinstance(g, Next):
            gap = lw.time(j + 1) - lw.time(j)
            return g.interval.contains(gap) and ev(g.child, j + 1)
        if isinstance(g, Until):
            iv = g.interval
            t0 = lw.time(j)
            # witnesses beyond `stop` repeat an already-inspected cycle slot
            k = j
            full_cycle_from = None
            while True:
                d = lw.time(k) - t0
                if iv.upper != INF and not (
                    d < iv.upper or (iv.upper_closed and d == iv.upper)
                ):
                    return False
                if iv.contains(d) and ev(g.right, k):
                    return True
                if not ev(g.left, k):
                    return False
                if iv.upper == INF:
                    beyond_lower = iv.contains(d) or d > iv.lower
                    if k >= p and beyond_lower:
                        if full_cycle_from is None:
                            full_cycle_from = k
                        elif k - full_cycle_from >= c:
                            # left holds on the whole cycle and no witness
                            return False
                k += 1
        raise TypeError(g)

    return ev(f, i)
