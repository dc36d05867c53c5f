"""Compilation of MITL formulas to timed automata with future and history
clocks, and Buchi emptiness checking via zone graphs."""

from .extreal import INF, NEG_INF, rat, rat_str
from .formula import (
    FALSE,
    TRUE,
    UNKNOWN,
    Formula,
    Interval,
    LassoWord,
    Prop,
    Not,
    And,
    Or,
    Next,
    Until,
    eval_at,
    eval_lasso,
    parse,
    word_from_json,
    word_to_json,
)

__all__ = [
    "INF",
    "NEG_INF",
    "rat",
    "rat_str",
    "Formula",
    "Interval",
    "LassoWord",
    "Prop",
    "Not",
    "And",
    "Or",
    "Next",
    "Until",
    "TRUE",
    "FALSE",
    "UNKNOWN",
    "eval_at",
    "eval_lasso",
    "parse",
    "word_from_json",
    "word_to_json",
]
