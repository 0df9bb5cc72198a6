"""Pretty-printing that the parser reads back to the same AST."""

from __future__ import annotations

from .ast import (
    And, App, Atom, Bot, Eq, Exists, Forall, Formula, Imp, Judgment, Or, Quantifier,
    Term, Top, Var,
)

# binding strength; quantifiers extend as far right as possible
_LEVEL = {Imp: 1, Or: 2, And: 3}


def print_term(t: Term) -> str:
    if isinstance(t, Var):
        return t.name
    return f"{t.fn}(" + ", ".join(print_term(a) for a in t.args) + ")"


def _fmt(p: Formula, ctx_level: int, rightmost: bool) -> str:
    if isinstance(p, Top):
        return "T"
    if isinstance(p, Bot):
        return "F"
    if isinstance(p, Atom):
        if not p.args:
            return f"{p.rel}()"
        return f"{p.rel}(" + ", ".join(print_term(a) for a in p.args) + ")"
    if isinstance(p, Eq):
        return f"{print_term(p.left)} = {print_term(p.right)}"
    if isinstance(p, Quantifier):
        kw = "ex" if isinstance(p, Exists) else "all"
        s = f"{kw} {p.var}:{p.sort}. {_fmt(p.body, 0, True)}"
        return s if rightmost else f"({s})"
    lvl = _LEVEL[type(p)]
    wrap = lvl < ctx_level
    tail = True if wrap else rightmost
    if isinstance(p, Imp):
        # right associative
        s = f"{_fmt(p.left, lvl + 1, False)} => {_fmt(p.right, lvl, tail)}"
    else:
        op = "&" if isinstance(p, And) else "|"
        s = f"{_fmt(p.left, lvl, False)} {op} {_fmt(p.right, lvl + 1, tail)}"
    return f"({s})" if wrap else s


def print_formula(p: Formula) -> str:
    return _fmt(p, 0, True)


def print_context(ctx) -> str:
    return "[" + ", ".join(f"{v}:{s}" for v, s in ctx) + "]"


def print_judgment(j: Judgment) -> str:
    prem = ", ".join(print_formula(p) for p in j.premises)
    head = print_context(j.context)
    if prem:
        return f"{head} {prem} |- {print_formula(j.conclusion)}"
    return f"{head} |- {print_formula(j.conclusion)}"
