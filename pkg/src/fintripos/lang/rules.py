"""Inference rules as premise/conclusion judgment builders, and soundness checks.

An instance of a rule is valid in a model when the conclusion holds whenever
every premise does.  Rules take their metavariables from a
:class:`RuleInstance`; contexts are explicit, and a rule that moves into an
extended context ``x, y`` appends ``y`` at the end.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from ..errors import MalformedInstance
from .ast import (
    And, App, Bot, Eq, Exists, Forall, Formula, Imp, Judgment, Or, Term, Top, Var, free_vars,
    free_vars_term,
)
from .interp import Evaluator, Model
from .signature import Signature
from .subst import substitute, substitute_many

REGULAR_RULES = (
    "axiom", "exists_intro", "exists_elim", "top_intro", "eq_refl", "eq_subst",
    "and_elim_left", "and_elim_right", "and_intro",
)
FIRST_ORDER_RULES = (
    "forall_intro", "forall_elim", "imp_intro", "imp_elim",
    "or_intro_left", "or_intro_right", "bot_elim", "or_elim",
)
PULLBACK_RULE = "pullback"
ALL_RULES = REGULAR_RULES + FIRST_ORDER_RULES + (PULLBACK_RULE,)


@dataclass(frozen=True)
class PullbackSquare:
    """Function symbols ``f: A -> C``, ``g: B -> C`` and legs ``h: D -> A``, ``k: D -> B``
    of their pullback, plus the names of the sorts ``A``, ``B`` and ``D``."""

    f: str
    g: str
    h: str
    k: str
    a: str
    b: str
    d: str


@dataclass(frozen=True)
class RuleInstance:
    ctx: tuple[tuple[str, str], ...]
    gamma: tuple[Formula, ...] = ()
    i: int = 0
    y: tuple[str, str] | None = None
    z: tuple[str, str] | None = None
    p: tuple[str, str] | None = None
    R: Formula | None = None
    P: Formula | None = None
    Q: Formula | None = None
    S: Formula | None = None
    t: Term | None = None
    s: Term | None = None
    square: PullbackSquare | None = None

    def need(self, *names):
        for n in names:
            if getattr(self, n) is None:
                raise MalformedInstance(f"rule instance lacks {n}")


@dataclass(frozen=True)
class RuleShape:
    premises: tuple[Judgment, ...]
    conclusion: Judgment


def _fresh_for(inst: RuleInstance, var: str, *formulas):
    if any(var == v for v, _ in inst.ctx):
        raise MalformedInstance(f"{var} must be fresh for the context")
    for f in formulas:
        if f is not None and var in free_vars(f):
            raise MalformedInstance(f"{var} occurs free where it must not")


def shape(rule: str, inst: RuleInstance) -> RuleShape:
    """Premise and conclusion judgments of ``rule`` at ``inst``."""
    x, G = tuple(inst.ctx), tuple(inst.gamma)

    def J(ctx, prem, concl) -> Judgment:
        return Judgment(tuple(ctx), tuple(prem), concl)

    if rule == "axiom":
        if not 0 <= inst.i < len(G):
            raise MalformedInstance("axiom needs a premise index within Γ")
        return RuleShape((), J(x, G, G[inst.i]))
    if rule == "top_intro":
        return RuleShape((), J(x, G, Top()))
    if rule == "eq_refl":
        inst.need("t")
        return RuleShape((), J(x, G, Eq(inst.t, inst.t)))
    if rule == "exists_intro":
        # the premise lives in context x: the witness t mentions only x
        inst.need("y", "R", "t")
        y, _ = inst.y
        _fresh_for(inst, y, *G)
        return RuleShape(
            (J(x, G, substitute(inst.R, y, inst.t)),), J(x, G, Exists(y, inst.y[1], inst.R))
        )
    if rule == "exists_elim":
        inst.need("y", "R", "P")
        y, ys = inst.y
        _fresh_for(inst, y, *G, inst.P)
        return RuleShape(
            (J(x, G, Exists(y, ys, inst.R)), J(x + (inst.y,), G + (inst.R,), inst.P)),
            J(x, G, inst.P),
        )
    if rule == "eq_subst":
        inst.need("y", "R", "s", "t")
        y, _ = inst.y
        return RuleShape(
            (J(x, G, substitute(inst.R, y, inst.s)), J(x, G, Eq(inst.s, inst.t))),
            J(x, G, substitute(inst.R, y, inst.t)),
        )
    if rule == "and_elim_left":
        inst.need("P", "Q")
        return RuleShape((J(x, G, And(inst.P, inst.Q)),), J(x, G, inst.P))
    if rule == "and_elim_right":
        inst.need("P", "Q")
        return RuleShape((J(x, G, And(inst.P, inst.Q)),), J(x, G, inst.Q))
    if rule == "and_intro":
        inst.need("P", "Q")
        return RuleShape((J(x, G, inst.P), J(x, G, inst.Q)), J(x, G, And(inst.P, inst.Q)))
    if rule == "forall_intro":
        inst.need("y", "R")
        y, ys = inst.y
        _fresh_for(inst, y, *G)
        return RuleShape((J(x + (inst.y,), G, inst.R),), J(x, G, Forall(y, ys, inst.R)))
    if rule == "forall_elim":
        inst.need("y", "R", "t")
        y, ys = inst.y
        return RuleShape((J(x, G, Forall(y, ys, inst.R)),), J(x, G, substitute(inst.R, y, inst.t)))
    if rule == "imp_intro":
        inst.need("P", "Q")
        return RuleShape((J(x, G + (inst.P,), inst.Q),), J(x, G, Imp(inst.P, inst.Q)))
    if rule == "imp_elim":
        inst.need("P", "Q")
        return RuleShape((J(x, G, Imp(inst.P, inst.Q)), J(x, G, inst.P)), J(x, G, inst.Q))
    if rule == "or_intro_left":
        inst.need("P", "Q")
        return RuleShape((J(x, G, inst.P),), J(x, G, Or(inst.P, inst.Q)))
    if rule == "or_intro_right":
        inst.need("P", "Q")
        return RuleShape((J(x, G, inst.Q),), J(x, G, Or(inst.P, inst.Q)))
    if rule == "bot_elim":
        inst.need("P")
        return RuleShape((J(x, G, Bot()),), J(x, G, inst.P))
    if rule == "or_elim":
        inst.need("P", "Q", "S")
        return RuleShape(
            (
                J(x, G, Or(inst.P, inst.Q)),
                J(x, G + (inst.P,), inst.S),
                J(x, G + (inst.Q,), inst.S),
            ),
            J(x, G, inst.S),
        )
    if rule == PULLBACK_RULE:
        inst.need("y", "z", "p", "Q", "square")
        sq = inst.square
        (y, ys), (z, zs), (p, ps) = inst.y, inst.z, inst.p
        if (ys, zs, ps) != (sq.a, sq.b, sq.d):
            raise MalformedInstance("pullback variables must have the square's sorts")
        names = {v for v, _ in x}
        if len({y, z, p} | names) != len(names) + 3:
            raise MalformedInstance("y, z and p must be distinct and fresh for x")
        pv = Var(p)
        sub = {y: App(sq.h, (pv,)), z: App(sq.k, (pv,))}
        prem = J(
            x + ((p, ps),),
            tuple(substitute_many(g, sub) for g in G),
            substitute_many(inst.Q, sub),
        )
        eq = Eq(App(sq.f, (Var(y),)), App(sq.g, (Var(z),)))
        concl = J(x + ((y, ys), (z, zs)), G + (eq,), inst.Q)
        return RuleShape((prem,), concl)
    raise MalformedInstance(f"unknown rule {rule!r}")


@dataclass(frozen=True)
class RuleOutcome:
    """Per-model results: ``premises_hold[b]`` and ``conclusion_holds[b]``."""

    premises_hold: np.ndarray
    conclusion_holds: np.ndarray

    @property
    def sound(self) -> np.ndarray:
        return ~self.premises_hold | self.conclusion_holds

    @property
    def violations(self) -> int:
        return int(np.count_nonzero(~self.sound))

    @property
    def nonvacuous(self) -> int:
        return int(np.count_nonzero(self.premises_hold))


def evaluate_rule(rule: str, inst: RuleInstance, ev: Evaluator) -> RuleOutcome:
    sh = shape(rule, inst)
    b = ev.m.batch
    prem = np.ones(b, dtype=bool)
    for j in sh.premises:
        prem &= ev.holds(j)
    return RuleOutcome(prem, ev.holds(sh.conclusion).copy())


def check_rule(rule: str, inst: RuleInstance, where: Signature | Model) -> bool:
    """Soundness of one instance: premises valid implies conclusion valid."""
    model = Model.from_signature(where) if isinstance(where, Signature) else where
    if isinstance(where, Signature):
        from .parser import typecheck_judgment

        sh = shape(rule, inst)
        for j in (*sh.premises, sh.conclusion):
            typecheck_judgment(j, where)
    return bool(np.all(evaluate_rule(rule, inst, Evaluator(model)).sound))
