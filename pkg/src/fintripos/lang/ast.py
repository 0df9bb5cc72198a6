"""Abstract syntax of the internal language.

Nodes are frozen dataclasses, so they hash and compare structurally.  Source
positions ride along for error messages but never take part in equality.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Union


@dataclass(frozen=True)
class Var:
    name: str
    pos: int = field(default=-1, compare=False, repr=False)


@dataclass(frozen=True)
class App:
    fn: str
    args: tuple["Term", ...]
    pos: int = field(default=-1, compare=False, repr=False)


Term = Union[Var, App]


@dataclass(frozen=True)
class Atom:
    rel: str
    args: tuple[Term, ...]
    pos: int = field(default=-1, compare=False, repr=False)


@dataclass(frozen=True)
class Eq:
    left: Term
    right: Term
    pos: int = field(default=-1, compare=False, repr=False)


@dataclass(frozen=True)
class Top:
    pos: int = field(default=-1, compare=False, repr=False)


@dataclass(frozen=True)
class Bot:
    pos: int = field(default=-1, compare=False, repr=False)


@dataclass(frozen=True)
class And:
    left: "Formula"
    right: "Formula"
    pos: int = field(default=-1, compare=False, repr=False)


@dataclass(frozen=True)
class Or:
    left: "Formula"
    right: "Formula"
    pos: int = field(default=-1, compare=False, repr=False)


@dataclass(frozen=True)
class Imp:
    left: "Formula"
    right: "Formula"
    pos: int = field(default=-1, compare=False, repr=False)


@dataclass(frozen=True)
class Exists:
    var: str
    sort: str
    body: "Formula"
    pos: int = field(default=-1, compare=False, repr=False)


@dataclass(frozen=True)
class Forall:
    var: str
    sort: str
    body: "Formula"
    pos: int = field(default=-1, compare=False, repr=False)


Formula = Union[Atom, Eq, Top, Bot, And, Or, Imp, Exists, Forall]
Binary = (And, Or, Imp)
Quantifier = (Exists, Forall)
NON_REGULAR = (Or, Imp, Bot, Forall)

Context = tuple[tuple[str, str], ...]


@dataclass(frozen=True)
class Judgment:
    context: Context
    premises: tuple[Formula, ...]
    conclusion: Formula


def iff(p: Formula, q: Formula) -> Formula:
    return And(Imp(p, q), Imp(q, p))


def conj(parts) -> Formula:
    """Left-nested conjunction; ``T`` for no parts."""
    parts = list(parts)
    if not parts:
        return Top()
    out = parts[0]
    for p in parts[1:]:
        out = And(out, p)
    return out


def free_vars_term(t: Term) -> frozenset[str]:
    if isinstance(t, Var):
        return frozenset((t.name,))
    out = frozenset()
    for a in t.args:
        out |= free_vars_term(a)
    return out


def free_vars(p: Formula) -> frozenset[str]:
    if isinstance(p, (Top, Bot)):
        return frozenset()
    if isinstance(p, Atom):
        out = frozenset()
        for a in p.args:
            out |= free_vars_term(a)
        return out
    if isinstance(p, Eq):
        return free_vars_term(p.left) | free_vars_term(p.right)
    if isinstance(p, Binary):
        return free_vars(p.left) | free_vars(p.right)
    return free_vars(p.body) - {p.var}


def all_names(p: Formula) -> frozenset[str]:
    """Free and bound variable names occurring anywhere in ``p``."""
    if isinstance(p, Quantifier):
        return all_names(p.body) | {p.var}
    if isinstance(p, Binary):
        return all_names(p.left) | all_names(p.right)
    return free_vars(p)


def is_regular(p: Formula) -> bool:
    if isinstance(p, NON_REGULAR):
        return False
    if isinstance(p, Binary):
        return is_regular(p.left) and is_regular(p.right)
    if isinstance(p, Quantifier):
        return is_regular(p.body)
    return True


def depth(p: Formula) -> int:
    if isinstance(p, Binary):
        return 1 + max(depth(p.left), depth(p.right))
    if isinstance(p, Quantifier):
        return 1 + depth(p.body)
    return 0


def subformulas(p: Formula):
    yield p
    if isinstance(p, Binary):
        yield from subformulas(p.left)
        yield from subformulas(p.right)
    elif isinstance(p, Quantifier):
        yield from subformulas(p.body)
