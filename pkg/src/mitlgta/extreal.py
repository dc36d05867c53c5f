"""Exact arithmetic over the extended rationals Q u {-oo, +oo}.

Clock values and zone constants live in this domain.  Finite values are
``int`` or ``fractions.Fraction``; the infinities are the float sentinels
``INF`` and ``NEG_INF`` (comparisons between Fraction/int and float
infinities behave correctly in Python).

Addition follows the convention used throughout the automaton semantics:
+oo absorbs every summand, and -oo absorbs everything except +oo.
"""

from fractions import Fraction

INF = float("inf")
NEG_INF = float("-inf")


def is_finite(a):
    return a != INF and a != NEG_INF


def ext_add(a, b):
    """a + b with (+oo) + x = +oo for all x, (-oo) + y = -oo for y != +oo."""
    if a == INF or b == INF:
        return INF
    if a == NEG_INF or b == NEG_INF:
        return NEG_INF
    return a + b


def ext_neg(a):
    if a == INF:
        return NEG_INF
    if a == NEG_INF:
        return INF
    return -a


def ext_sub(a, b):
    """a - b, evaluated as a + (-b) in the extended algebra."""
    return ext_add(a, ext_neg(b))


def efloor(a):
    """Integer part of a finite extended rational."""
    if not is_finite(a):
        raise ValueError("floor of infinite value")
    if isinstance(a, int):
        return a
    return a.numerator // a.denominator


def efrac(a):
    """Fractional part of a finite extended rational, in [0, 1)."""
    return Fraction(a) - efloor(a)


def rat(s):
    """Parse 'num/den' / 'n' / 'inf' / '-inf' into an extended rational."""
    if isinstance(s, (int, Fraction)):
        return s
    t = str(s).strip()
    if t in ("inf", "+inf", "oo", "+oo"):
        return INF
    if t in ("-inf", "-oo"):
        return NEG_INF
    f = Fraction(t)
    return f.numerator if f.denominator == 1 else f


def rat_str(a):
    if a == INF:
        return "inf"
    if a == NEG_INF:
        return "-inf"
    f = Fraction(a)
    return str(f.numerator) if f.denominator == 1 else "%d/%d" % (f.numerator, f.denominator)
