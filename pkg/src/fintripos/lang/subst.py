"""Capture-avoiding substitution and weakening."""

from __future__ import annotations

from typing import Mapping

from .ast import (
    And, App, Atom, Binary, Bot, Eq, Exists, Forall, Formula, Imp, Or, Quantifier,
    Term, Top, Var, all_names, free_vars, free_vars_term,
)


def fresh_name(avoid, stem: str = "v") -> str:
    n = 1
    while f"{stem}_{n}" in avoid:
        n += 1
    return f"{stem}_{n}"


def substitute_term(t: Term, mapping: Mapping[str, Term]) -> Term:
    if isinstance(t, Var):
        return mapping.get(t.name, t)
    return App(t.fn, tuple(substitute_term(a, mapping) for a in t.args), t.pos)


def substitute_many(p: Formula, mapping: Mapping[str, Term]) -> Formula:
    """Simultaneous substitution ``p[u1/y1, ..., un/yn]``; bound variables that
    would capture a free variable of some ``ui`` are renamed to ``v_1``, ``v_2``, ..."""
    mapping = {k: v for k, v in mapping.items() if not (isinstance(v, Var) and v.name == k)}
    if not mapping:
        return p
    return _subst(p, mapping)


def _subst(p: Formula, mapping: Mapping[str, Term]) -> Formula:
    if isinstance(p, (Top, Bot)):
        return p
    if isinstance(p, Atom):
        return Atom(p.rel, tuple(substitute_term(a, mapping) for a in p.args), p.pos)
    if isinstance(p, Eq):
        return Eq(substitute_term(p.left, mapping), substitute_term(p.right, mapping), p.pos)
    if isinstance(p, Binary):
        return type(p)(_subst(p.left, mapping), _subst(p.right, mapping), p.pos)
    # quantifier
    inner = {k: v for k, v in mapping.items() if k != p.var}
    fv_body = free_vars(p.body)
    inner = {k: v for k, v in inner.items() if k in fv_body}
    if not inner:
        return p
    incoming = frozenset().union(*(free_vars_term(v) for v in inner.values()))
    var, body = p.var, p.body
    if var in incoming:
        avoid = incoming | all_names(body) | set(inner)
        new = fresh_name(avoid)
        body = _subst(body, {var: Var(new)})
        var = new
    return type(p)(var, p.sort, _subst(body, inner), p.pos)


def substitute(p: Formula, var: str, u: Term) -> Formula:
    """``p[u/var]``."""
    return substitute_many(p, {var: u})


def weaken(ctx, p: Formula, insert_at: int, var: str, sort: str):
    """Insert ``var:sort`` into ``ctx`` at ``insert_at``; returns ``(ctx', p)``.

    The formula itself is unchanged: ``var`` must be fresh for the context and,
    if it occurs bound in ``p``, binding shadows it anyway.
    """
    names = [n for n, _ in ctx]
    if var in names:
        raise ValueError(f"variable {var} already in context")
    if var in free_vars(p):
        raise ValueError(f"variable {var} occurs free in the formula")
    ctx = list(ctx)
    ctx.insert(insert_at, (var, sort))
    return tuple(ctx), p


def rename_bound(p: Formula, avoid) -> Formula:
    """Alpha-rename every bound variable that clashes with ``avoid``."""
    if isinstance(p, Binary):
        return type(p)(rename_bound(p.left, avoid), rename_bound(p.right, avoid), p.pos)
    if isinstance(p, Quantifier):
        body = rename_bound(p.body, avoid)
        var = p.var
        if var in avoid:
            var = fresh_name(set(avoid) | all_names(body))
            body = _subst(body, {p.var: Var(var)})
        return type(p)(var, p.sort, body, p.pos)
    return p
