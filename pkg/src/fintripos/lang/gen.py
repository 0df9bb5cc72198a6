"""Seeded random signatures, batched models, terms, formulas and rule instances.

A :class:`World` fixes sorts, frame and symbol arities; its model carries
``batch`` independent random interpretations of every symbol, so one syntactic
instance is checked in many models at once.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..finset import FinMap, FinSet, pullback
from ..order import FinFrame, distributive_lattices
from .ast import (
    And, App, Atom, Bot, Eq, Exists, Forall, Formula, Imp, Or, Term, Top, Var, conj,
)
from .interp import Model
from .rules import PULLBACK_RULE, PullbackSquare, RuleInstance
from .subst import substitute

SORT_NAMES = ("A", "B", "C")
BOUND_NAMES = ("u", "v", "w")
CTX_NAMES = ("x1", "x2", "x3")


@dataclass
class World:
    frame: FinFrame
    sort_sizes: dict
    fun_sigs: dict  # name -> (arg sorts, result sort)
    rel_sigs: dict  # name -> arg sorts
    model: Model
    regular: bool
    square: PullbackSquare | None = None


def random_frame(rng: np.random.Generator, max_size: int = 5) -> FinFrame:
    frames = distributive_lattices(max_size)
    # skip the one-element frame most of the time: it makes every judgment trivial
    pool = [f for f in frames if f.n > 1] if rng.random() < 0.95 else list(frames)
    return pool[int(rng.integers(len(pool)))]


def _size(sorts, sizes):
    n = 1
    for s in sorts:
        n *= sizes[s]
    return n


def random_world(
    rng: np.random.Generator, batch: int, regular: bool, max_sort: int = 3,
    with_square: bool = False,
) -> World:
    frame = random_frame(rng)
    k = int(rng.integers(1, len(SORT_NAMES) + 1))
    sorts = SORT_NAMES[:k]
    sizes = {s: int(rng.choice([0, 1, 2, 3], p=[0.06, 0.24, 0.35, 0.35])) if max_sort >= 3 else
             int(rng.integers(0, max_sort + 1)) for s in sorts}

    def pick():
        return sorts[int(rng.integers(len(sorts)))]

    rel_sigs = {"p": (pick(),), "q": (pick(),), "r": (pick(), pick()), "z": ()}
    fun_sigs = {}
    for name, args in (("f", (pick(),)), ("g", (pick(), pick())), ("c", ())):
        res = pick()
        if sizes[res] == 0 and _size(args, sizes) > 0:
            continue
        fun_sigs[name] = (args, res)

    codes = frame.code
    funs = {}
    for name, (args, res) in fun_sigs.items():
        n = _size(args, sizes)
        funs[name] = (args, res, rng.integers(0, max(sizes[res], 1), size=(batch, n)))
    rels = {}
    for name, args in rel_sigs.items():
        n = _size(args, sizes)
        rels[name] = (args, codes[rng.integers(0, frame.n, size=(batch, n))])

    square = None
    if with_square:
        a, b = pick(), pick()
        c_size = int(rng.integers(1, 4))
        A = FinSet("A", range(sizes[a]))
        B = FinSet("B", range(sizes[b]))
        C = FinSet("C", range(c_size))
        f = FinMap(A, C, rng.integers(0, c_size, size=len(A)))
        g = FinMap(B, C, rng.integers(0, c_size, size=len(B)))
        cone = pullback(f, g)
        h, kk = cone.legs
        sizes["W"] = c_size
        sizes["D"] = len(cone.apex)
        funs["sf"] = ((a,), "W", f.table[None, :])
        funs["sg"] = ((b,), "W", g.table[None, :])
        funs["sh"] = (("D",), a, h.table[None, :])
        funs["sk"] = (("D",), b, kk.table[None, :])
        for nm in ("sf", "sg", "sh", "sk"):
            fun_sigs[nm] = (funs[nm][0], funs[nm][1])
        square = PullbackSquare("sf", "sg", "sh", "sk", a, b, "D")

    model = Model(frame, dict(sizes), funs, rels, batch, regular)
    return World(frame, sizes, fun_sigs, rel_sigs, model, regular, square)


class FormulaGen:
    """Random well-typed terms and formulas over a world."""

    def __init__(self, rng: np.random.Generator, world: World, max_depth: int = 4):
        self.rng = rng
        self.w = world
        self.max_depth = max_depth

    def coin(self, p: float) -> bool:
        return bool(self.rng.random() < p)

    def choice(self, seq):
        return seq[int(self.rng.integers(len(seq)))]

    def term(self, env: dict, sort: str, depth: int = 1) -> Term | None:
        vars_ = [v for v, s in env.items() if s == sort]
        funs = [n for n, (args, res) in self.w.fun_sigs.items()
                if res == sort and n not in ("sf", "sg", "sh", "sk")]
        if vars_ and (not funs or depth <= 0 or self.coin(0.7)):
            return Var(self.choice(vars_))
        for _ in range(4):
            if not funs or depth <= 0:
                break
            fn = self.choice(funs)
            args = [self.term(env, s, depth - 1) for s in self.w.fun_sigs[fn][0]]
            if all(a is not None for a in args):
                return App(fn, tuple(args))
        return Var(self.choice(vars_)) if vars_ else None

    def atom(self, env: dict) -> Formula:
        options = []
        for name, args in self.w.rel_sigs.items():
            options.append(("rel", name))
        for s in self.w.sort_sizes:
            if s in SORT_NAMES and any(es == s for es in env.values()):
                options.append(("eq", s))
        for _ in range(6):
            kind, what = self.choice(options)
            if kind == "rel":
                args = [self.term(env, s) for s in self.w.rel_sigs[what]]
                if all(a is not None for a in args):
                    return Atom(what, tuple(args))
            else:
                l, r = self.term(env, what), self.term(env, what)
                if l is not None and r is not None:
                    return Eq(l, r)
        if not self.w.regular and self.coin(0.3):
            return Bot()
        return Top()

    def formula(self, env: dict, depth: int | None = None) -> Formula:
        if depth is None:
            depth = int(self.rng.integers(0, self.max_depth + 1))
        if depth <= 0:
            r = self.rng.random()
            if r < 0.08:
                return Top()
            if r < 0.14 and not self.w.regular:
                return Bot()
            return self.atom(env)
        kinds = ["and", "ex"] if self.w.regular else ["and", "ex", "or", "imp", "all"]
        kind = self.choice(kinds)
        if kind in ("ex", "all"):
            sorts = [s for s in self.w.sort_sizes if s in SORT_NAMES]
            sort = self.choice(sorts)
            # sometimes reuse a context name to exercise shadowing
            var = self.choice(BOUND_NAMES + tuple(env)[:1]) if env and self.coin(0.15) else self.choice(BOUND_NAMES)
            body = self.formula({**env, var: sort}, depth - 1)
            return (Exists if kind == "ex" else Forall)(var, sort, body)
        left = self.formula(env, int(self.rng.integers(0, depth)))
        right = self.formula(env, depth - 1)
        if self.coin(0.5):
            left, right = right, left
        return {"and": And, "or": Or, "imp": Imp}[kind](left, right)

    def context(self, max_vars: int = 3) -> tuple:
        n = int(self.rng.integers(0, max_vars + 1))
        sorts = [s for s in self.w.sort_sizes if s in SORT_NAMES]
        return tuple((CTX_NAMES[i], self.choice(sorts)) for i in range(n))

    def gamma(self, env: dict, max_len: int = 2) -> list:
        return [self.formula(env) for _ in range(int(self.rng.integers(0, max_len + 1)))]


def _plant(gen: FormulaGen, prob: float = 0.6) -> bool:
    return gen.coin(prob)


def random_instance(rule: str, gen: FormulaGen) -> RuleInstance | None:
    """A random instance of ``rule``, with premises planted into Γ part of the time
    so that a useful share of instances are not vacuous.  ``None`` when the world
    cannot host the rule (e.g. no term of a needed sort)."""
    w = gen.w
    ctx = gen.context()
    env = dict(ctx)
    G = gen.gamma(env)
    sorts = [s for s in w.sort_sizes if s in SORT_NAMES]
    y = ("y", gen.choice(sorts))
    envy = {**env, "y": y[1]}
    F = gen.formula
    regular = w.regular

    if rule == "axiom":
        if not G:
            G = [F(env)]
        return RuleInstance(ctx, tuple(G), i=int(gen.rng.integers(len(G))))
    if rule == "top_intro":
        return RuleInstance(ctx, tuple(G))
    if rule == "eq_refl":
        t = gen.term(env, y[1])
        return None if t is None else RuleInstance(ctx, tuple(G), t=t)
    if rule == "exists_intro":
        t = gen.term(env, y[1])
        if t is None:
            return None
        R = F(envy)
        if _plant(gen):
            G = G + [substitute(R, "y", t)]
        return RuleInstance(ctx, tuple(G), y=y, R=R, t=t)
    if rule == "exists_elim":
        R, P = F(envy), F(env)
        ex = Exists("y", y[1], R)
        if _plant(gen):
            G = G + [ex]
        choice = gen.rng.random()
        if choice < 0.3:
            P = ex
        elif choice < 0.5 and G:
            P = And(gen.choice(G), ex)
        elif choice < 0.7 and not regular:
            P = Or(P, ex)
        return RuleInstance(ctx, tuple(G), y=y, R=R, P=P)
    if rule == "eq_subst":
        s, t = gen.term(env, y[1]), gen.term(env, y[1])
        if s is None:
            return None
        if t is None or gen.coin(0.3):
            t = s
        R = F(envy)
        if _plant(gen):
            G = G + [substitute(R, "y", s), Eq(s, t)]
        return RuleInstance(ctx, tuple(G), y=y, R=R, s=s, t=t)
    if rule in ("and_elim_left", "and_elim_right", "and_intro"):
        P, Q = F(env), F(env)
        if _plant(gen):
            G = G + ([And(P, Q)] if rule != "and_intro" else [P, Q])
        return RuleInstance(ctx, tuple(G), P=P, Q=Q)
    if rule == "forall_intro":
        R = F(envy)
        r = gen.rng.random()
        if r < 0.35 and G:
            R = Or(gen.choice(G), R)
        elif r < 0.6:
            G = G + [Forall("y", y[1], R)]
            R = Or(R, F(envy)) if gen.coin(0.5) else R
        return RuleInstance(ctx, tuple(G), y=y, R=R)
    if rule == "forall_elim":
        t = gen.term(env, y[1])
        if t is None:
            return None
        R = F(envy)
        if _plant(gen):
            G = G + [Forall("y", y[1], R)]
        return RuleInstance(ctx, tuple(G), y=y, R=R, t=t)
    if rule == "imp_intro":
        P, Q = F(env), F(env)
        r = gen.rng.random()
        if r < 0.3:
            Q = Or(Q, P)
        elif r < 0.5 and G:
            Q = And(P, gen.choice(G))
        return RuleInstance(ctx, tuple(G), P=P, Q=Q)
    if rule == "imp_elim":
        P, Q = F(env), F(env)
        if _plant(gen):
            G = G + [Imp(P, Q), P]
        return RuleInstance(ctx, tuple(G), P=P, Q=Q)
    if rule in ("or_intro_left", "or_intro_right"):
        P, Q = F(env), F(env)
        if _plant(gen):
            G = G + [P if rule == "or_intro_left" else Q]
        return RuleInstance(ctx, tuple(G), P=P, Q=Q)
    if rule == "bot_elim":
        P = F(env)
        r = gen.rng.random()
        if r < 0.3:
            G = G + [Bot()]
        elif r < 0.6:
            A = F(env)
            G = G + [A, Imp(A, Bot())]
        return RuleInstance(ctx, tuple(G), P=P)
    if rule == "or_elim":
        P, Q, S = F(env), F(env), F(env)
        if _plant(gen):
            G = G + [Or(P, Q)]
        if gen.coin(0.5):
            S = Or(Or(P, Q), S) if gen.coin(0.5) else Or(S, Or(Q, P))
        return RuleInstance(ctx, tuple(G), P=P, Q=Q, S=S)
    if rule == PULLBACK_RULE:
        sq = w.square
        if sq is None:
            return None
        full = {**env, "y": sq.a, "z": sq.b}
        G = gen.gamma(full)
        Q = F(full)
        eq = Eq(App(sq.f, (Var("y"),)), App(sq.g, (Var("z"),)))
        r = gen.rng.random()
        if r < 0.25:
            Q = eq
        elif r < 0.45:
            Q = And(eq, gen.choice(G)) if G else eq
        elif r < 0.6 and not regular:
            Q = Or(Q, eq)
        elif r < 0.75:
            G = G + [Q]
        return RuleInstance(
            ctx, tuple(G), y=("y", sq.a), z=("z", sq.b), p=("p", sq.d), Q=Q, square=sq
        )
    raise ValueError(f"unknown rule {rule!r}")
