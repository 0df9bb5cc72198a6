"""Lexer, recursive-descent parser and typechecker for the internal language.

Grammar (loosest first)::

    judgment := '[' [var ':' sort {',' var ':' sort}] ']' [formula {',' formula}] '|-' formula
    formula  := imp ['<=>' imp]
    imp      := disj ['=>' imp]
    disj     := conj {'|' conj}
    conj     := unary {'&' unary}
    unary    := ('ex' | 'all') var ':' sort '.' formula
              | 'T' | 'F' | '(' formula ')'
              | ident ['(' [term {',' term}] ')'] ['=' term]
    term     := ident ['(' [term {',' term}] ')']

A quantifier body extends as far right as possible.  ``P <=> Q`` is read as
``(P => Q) & (Q => P)``.  Defined predicates are expanded in place.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from ..errors import (
    LexError, NonRegularConnective, ParseError, SortMismatch, UnboundVariable, UnknownSymbol,
)
from .ast import (
    And, App, Atom, Bot, Eq, Exists, Forall, Formula, Imp, Judgment, Or, Term, Top, Var, iff,
)
from .signature import Signature
from .subst import rename_bound, substitute_many

_TOKEN = re.compile(
    r"\s*(?:(?P<sym><=>|=>|\|-|[()\[\],.:&|=])|(?P<ident>[A-Za-z_][A-Za-z0-9_']*))"
)
KEYWORDS = {"ex", "all", "T", "F"}


@dataclass(frozen=True)
class Token:
    kind: str  # "sym", "ident" or "end"
    text: str
    pos: int


def tokenize(text: str) -> list[Token]:
    out = []
    pos = 0
    n = len(text)
    while True:
        while pos < n and text[pos].isspace():
            pos += 1
        if pos >= n:
            break
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise LexError(f"unexpected character {text[pos]!r}", pos, text)
        kind = "sym" if m.group("sym") else "ident"
        start = m.start(kind)
        out.append(Token(kind, m.group(kind), start))
        pos = m.end()
    out.append(Token("end", "", n))
    return out


class _Parser:
    def __init__(self, text: str, sig: Signature):
        self.text = text
        self.sig = sig
        self.toks = tokenize(text)
        self.i = 0

    # -- token helpers
    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def at(self, text: str) -> bool:
        t = self.tok
        return t.kind != "end" and t.text == text

    def take(self, text: str) -> Token:
        if not self.at(text):
            found = self.tok.text or "end of input"
            raise ParseError(f"expected {text!r}, found {found!r}", self.tok.pos, self.text)
        t = self.tok
        self.i += 1
        return t

    def ident(self, what: str) -> Token:
        t = self.tok
        if t.kind != "ident" or t.text in KEYWORDS:
            found = t.text or "end of input"
            raise ParseError(f"expected {what}, found {found!r}", t.pos, self.text)
        self.i += 1
        return t

    def expect_end(self):
        if self.tok.kind != "end":
            raise ParseError(f"unexpected {self.tok.text!r}", self.tok.pos, self.text)

    def gate(self, what: str, pos: int):
        if self.sig.regular:
            raise NonRegularConnective(f"{what} is not available in regular mode", pos, self.text)

    def sort_name(self) -> str:
        t = self.ident("a sort")
        if t.text not in self.sig.sorts:
            raise UnknownSymbol(f"unknown sort {t.text!r}", t.pos, self.text)
        return t.text

    # -- contexts and judgments
    def context(self) -> tuple[tuple[str, str], ...]:
        self.take("[")
        ctx = []
        if not self.at("]"):
            while True:
                v = self.ident("a variable")
                if any(v.text == n for n, _ in ctx):
                    raise ParseError(f"variable {v.text!r} declared twice", v.pos, self.text)
                self.take(":")
                ctx.append((v.text, self.sort_name()))
                if not self.at(","):
                    break
                self.take(",")
        self.take("]")
        return tuple(ctx)

    def judgment(self) -> Judgment:
        ctx = self.context()
        env = dict(ctx)
        premises = []
        if not self.at("|-"):
            premises.append(self.formula(env))
            while self.at(","):
                self.take(",")
                premises.append(self.formula(env))
        self.take("|-")
        concl = self.formula(env)
        self.expect_end()
        return Judgment(ctx, tuple(premises), concl)

    # -- formulas; env maps variable names to sorts
    def formula(self, env) -> Formula:
        left = self.imp(env)
        if self.at("<=>"):
            t = self.take("<=>")
            self.gate("'<=>'", t.pos)
            right = self.imp(env)
            return iff(left, right)
        return left

    def imp(self, env) -> Formula:
        left = self.disj(env)
        if self.at("=>"):
            t = self.take("=>")
            self.gate("'=>'", t.pos)
            return Imp(left, self.imp(env), t.pos)
        return left

    def disj(self, env) -> Formula:
        left = self.conj(env)
        while self.at("|"):
            t = self.take("|")
            self.gate("'|'", t.pos)
            left = Or(left, self.conj(env), t.pos)
        return left

    def conj(self, env) -> Formula:
        left = self.unary(env)
        while self.at("&"):
            t = self.take("&")
            left = And(left, self.unary(env), t.pos)
        return left

    def unary(self, env) -> Formula:
        t = self.tok
        if t.kind == "ident" and t.text in ("ex", "all"):
            self.i += 1
            if t.text == "all":
                self.gate("'all'", t.pos)
            v = self.ident("a bound variable")
            self.take(":")
            sort = self.sort_name()
            self.take(".")
            body = self.formula({**env, v.text: sort})
            cls = Exists if t.text == "ex" else Forall
            return cls(v.text, sort, body, t.pos)
        if t.kind == "ident" and t.text == "T":
            self.i += 1
            return Top(t.pos)
        if t.kind == "ident" and t.text == "F":
            self.i += 1
            self.gate("'F'", t.pos)
            return Bot(t.pos)
        if self.at("("):
            self.take("(")
            p = self.formula(env)
            self.take(")")
            return p
        name = self.ident("a formula")
        args = None
        if self.at("("):
            args = self.arglist(env)
        if self.at("="):
            eqtok = self.take("=")
            left, lsort = self.finish_term(name, args, env)
            right, rsort = self.term(env)
            if lsort != rsort:
                raise SortMismatch(
                    f"cannot equate a term of sort {lsort} with one of sort {rsort}", eqtok.pos, self.text
                )
            return Eq(left, right, name.pos)
        return self.atom(name, args or [], env)

    def atom(self, name: Token, args, env) -> Formula:
        sig = self.sig
        if name.text in sig.relations:
            arity = sig.relations[name.text].args
            self.check_args(name, arity, args)
            return Atom(name.text, tuple(a for a, _ in args), name.pos)
        if name.text in sig.definitions:
            d = sig.definitions[name.text]
            self.check_args(name, tuple(s for _, s in d.params), args)
            body = rename_bound(d.body, set().union(*(_names(a) for a, _ in args)) if args else set())
            return substitute_many(body, {p: a for (p, _), (a, _) in zip(d.params, args)})
        if name.text in env or name.text in sig.functions:
            raise ParseError(f"{name.text!r} is a term, not a formula", name.pos, self.text)
        raise UnknownSymbol(f"unknown relation {name.text!r}", name.pos, self.text)

    def check_args(self, name: Token, arity, args):
        if len(arity) != len(args):
            raise SortMismatch(
                f"{name.text} expects {len(arity)} arguments, got {len(args)}", name.pos, self.text
            )
        for k, ((term, sort), want) in enumerate(zip(args, arity)):
            if sort != want:
                raise SortMismatch(
                    f"argument {k + 1} of {name.text} has sort {sort}, expected {want}",
                    getattr(term, "pos", name.pos), self.text,
                )

    # -- terms
    def arglist(self, env):
        self.take("(")
        args = []
        if not self.at(")"):
            while True:
                args.append(self.term(env))
                if not self.at(","):
                    break
                self.take(",")
        self.take(")")
        return args

    def term(self, env):
        name = self.ident("a term")
        args = self.arglist(env) if self.at("(") else None
        return self.finish_term(name, args, env)

    def finish_term(self, name: Token, args, env):
        if args is None:
            if name.text in env:
                return Var(name.text, name.pos), env[name.text]
            if name.text in self.sig.functions and not self.sig.functions[name.text].args:
                return App(name.text, (), name.pos), self.sig.functions[name.text].result
            raise UnboundVariable(f"variable {name.text!r} is not in context", name.pos, self.text)
        f = self.sig.functions.get(name.text)
        if f is None:
            raise UnknownSymbol(f"unknown function {name.text!r}", name.pos, self.text)
        self.check_args(name, f.args, args)
        return App(name.text, tuple(a for a, _ in args), name.pos), f.result


def _names(t: Term) -> set[str]:
    if isinstance(t, Var):
        return {t.name}
    out = set()
    for a in t.args:
        out |= _names(a)
    return out


_CACHE: dict = {}
_CACHE_LIMIT = 4096


def _cached(kind: str, text: str, sig: Signature, ctx, build):
    key = (kind, text, sig.shape_key(), ctx)
    hit = _CACHE.get(key)
    if hit is None:
        hit = build()
        if len(_CACHE) >= _CACHE_LIMIT:
            _CACHE.clear()
        _CACHE[key] = hit
    return hit


def parse_judgment(text: str, sig: Signature) -> Judgment:
    def build():
        p = _Parser(text, sig)
        return p.judgment()

    return _cached("judgment", text, sig, None, build)


def parse_formula(text: str, sig: Signature, ctx=()) -> Formula:
    ctx = tuple(ctx)

    def build():
        p = _Parser(text, sig)
        for _, s in ctx:
            if s not in sig.sorts:
                raise UnknownSymbol(f"unknown sort {s!r}")
        out = p.formula(dict(ctx))
        p.expect_end()
        return out

    return _cached("formula", text, sig, ctx, build)


def parse_term(text: str, sig: Signature, ctx=()) -> Term:
    ctx = tuple(ctx)

    def build():
        p = _Parser(text, sig)
        out, _ = p.term(dict(ctx))
        p.expect_end()
        return out

    return _cached("term", text, sig, ctx, build)


def parse(text: str, sig: Signature, ctx=None):
    """Judgment if the text has a leading context, otherwise a formula in ``ctx``."""
    if text.lstrip().startswith("["):
        return parse_judgment(text, sig)
    return parse_formula(text, sig, ctx or ())


def parse_context(text: str, sig: Signature):
    p = _Parser(text, sig)
    ctx = p.context()
    p.expect_end()
    return ctx


# -- typechecking for programmatically built syntax ---------------------------


def sort_of(t: Term, sig: Signature, env) -> str:
    if isinstance(t, Var):
        if t.name not in env:
            raise UnboundVariable(f"variable {t.name!r} is not in context", t.pos)
        return env[t.name]
    f = sig.functions.get(t.fn)
    if f is None:
        raise UnknownSymbol(f"unknown function {t.fn!r}", t.pos)
    _check_terms(t.fn, f.args, t.args, sig, env, t.pos)
    return f.result


def _check_terms(name, arity, args, sig, env, pos):
    if len(arity) != len(args):
        raise SortMismatch(f"{name} expects {len(arity)} arguments, got {len(args)}", pos)
    for a, want in zip(args, arity):
        got = sort_of(a, sig, env)
        if got != want:
            raise SortMismatch(f"argument of {name} has sort {got}, expected {want}", pos)


def typecheck(p: Formula, sig: Signature, ctx) -> None:
    """Raise a :class:`LangError` if ``p`` is ill-formed in ``ctx`` under ``sig``."""
    _tc(p, sig, dict(ctx))


def _tc(p: Formula, sig: Signature, env) -> None:
    from .ast import NON_REGULAR, Binary, Quantifier

    if sig.regular and isinstance(p, NON_REGULAR):
        raise NonRegularConnective(f"{type(p).__name__} is not available in regular mode", p.pos)
    if isinstance(p, (Top, Bot)):
        return
    if isinstance(p, Atom):
        r = sig.relations.get(p.rel)
        if r is None:
            raise UnknownSymbol(f"unknown relation {p.rel!r}", p.pos)
        _check_terms(p.rel, r.args, p.args, sig, env, p.pos)
        return
    if isinstance(p, Eq):
        if sort_of(p.left, sig, env) != sort_of(p.right, sig, env):
            raise SortMismatch("equation between terms of different sorts", p.pos)
        return
    if isinstance(p, Binary):
        _tc(p.left, sig, env)
        _tc(p.right, sig, env)
        return
    if isinstance(p, Quantifier):
        if p.sort not in sig.sorts:
            raise UnknownSymbol(f"unknown sort {p.sort!r}", p.pos)
        _tc(p.body, sig, {**env, p.var: p.sort})
        return
    raise TypeError(f"not a formula: {p!r}")


def typecheck_judgment(j: Judgment, sig: Signature) -> None:
    names = [v for v, _ in j.context]
    if len(set(names)) != len(names):
        raise ParseError("duplicate variable in context")
    for s in (s for _, s in j.context):
        if s not in sig.sorts:
            raise UnknownSymbol(f"unknown sort {s!r}")
    for p in (*j.premises, j.conclusion):
        typecheck(p, sig, j.context)
