"""Interpretation of terms and formulas in a canonical frame indexing.

The evaluator works on Birkhoff codes (see :mod:`fintripos.order`) and carries a
leading batch axis, so one formula can be evaluated in many models that share
sorts and frame but differ in their function and relation tables.  A value of a
formula in context ``x1..xn`` is an array of shape ``(B, |⟦x1..xn⟧|)``; the
context product is indexed in right-nested mixed radix, matching
:func:`fintripos.finset.product_n`.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..doctrine import Predicate
from ..errors import UnsupportedInMode
from ..finset import FinMap
from ..order import FinFrame
from .ast import (
    And, App, Atom, Bot, Eq, Exists, Forall, Formula, Imp, Judgment, NON_REGULAR, Or, Term,
    Top, Var,
)
from .signature import Signature


@dataclass
class Model:
    """Sorts, a frame, and batched symbol tables.

    ``functions[name] = (arg sorts, result sort, table)`` with ``table`` of shape
    ``(B or 1, |dom|)``; ``relations[name] = (arg sorts, codes)`` with ``codes`` of
    shape ``(B or 1, |carrier|)``.
    """

    frame: FinFrame
    sort_sizes: dict
    functions: dict
    relations: dict
    batch: int = 1
    regular: bool = False

    @classmethod
    def from_signature(cls, sig: Signature) -> "Model":
        fr = sig.frame
        funs = {
            k: (f.args, f.result, f.map.table[None, :]) for k, f in sig.functions.items()
        }
        rels = {
            k: (r.args, fr.code[r.pred.values][None, :]) for k, r in sig.relations.items()
        }
        return cls(fr, {k: len(v) for k, v in sig.sorts.items()}, funs, rels, 1, sig.regular)


def _mixed_radix(arrays, sizes):
    if not arrays:
        return None
    idx = arrays[0]
    for a, n in zip(arrays[1:], sizes[1:]):
        idx = idx * n + a
    return idx


def _lookup(table: np.ndarray, idx, n_points: int) -> np.ndarray:
    """Row-wise ``table[b, idx[b, :]]`` with broadcasting over the batch axis."""
    if idx is None:  # nullary symbol: column 0
        return np.broadcast_to(table[:, :1], (table.shape[0], n_points))
    if table.shape[0] == 1:
        return table[0][idx]
    if idx.shape[0] == 1:
        idx = np.broadcast_to(idx, (table.shape[0], idx.shape[1]))
    return np.take_along_axis(table, idx, axis=1)


class Evaluator:
    def __init__(self, model: Model):
        self.m = model
        self.top = np.int64(model.frame.top_code)
        self._var_cache: dict = {}
        self._cache: dict = {}

    def size(self, ctx) -> int:
        n = 1
        for _, s in ctx:
            n *= self.m.sort_sizes[s]
        return n

    def var_array(self, ctx, name: str) -> np.ndarray:
        key = (ctx, name)
        hit = self._var_cache.get(key)
        if hit is not None:
            return hit
        pos = max(i for i, (v, _) in enumerate(ctx) if v == name)
        sizes = [self.m.sort_sizes[s] for _, s in ctx]
        stride = 1
        for n in sizes[pos + 1:]:
            stride *= n
        total = self.size(ctx)
        arr = ((np.arange(total, dtype=np.int64) // stride) % max(sizes[pos], 1))[None, :]
        self._var_cache[key] = arr
        return arr

    # -- terms: index arrays of shape (B or 1, N)
    def term(self, ctx, t: Term) -> np.ndarray:
        key = (ctx, t)
        hit = self._cache.get(key)
        if hit is not None:
            return hit
        if isinstance(t, Var):
            out = self.var_array(ctx, t.name)
        else:
            args, _, table = self.m.functions[t.fn]
            vals = [self.term(ctx, a) for a in t.args]
            if vals:
                vals = np.broadcast_arrays(*vals)
            idx = _mixed_radix(list(vals), [self.m.sort_sizes[s] for s in args])
            out = _lookup(table, idx, self.size(ctx))
        self._cache[key] = out
        return out

    # -- formulas: code arrays of shape (B or 1, N)
    def formula(self, ctx, p: Formula) -> np.ndarray:
        key = (ctx, p)
        hit = self._cache.get(key)
        if hit is not None:
            return hit
        out = self._formula(ctx, p)
        self._cache[key] = out
        return out

    def _formula(self, ctx, p: Formula) -> np.ndarray:
        if self.m.regular and isinstance(p, NON_REGULAR):
            raise UnsupportedInMode(f"{type(p).__name__} needs tripos mode")
        n = self.size(ctx)
        if isinstance(p, Top):
            return np.full((1, n), self.top, dtype=np.int64)
        if isinstance(p, Bot):
            return np.zeros((1, n), dtype=np.int64)
        if isinstance(p, Atom):
            args, codes = self.m.relations[p.rel]
            vals = [self.term(ctx, a) for a in p.args]
            if vals:
                vals = np.broadcast_arrays(*vals)
            idx = _mixed_radix(list(vals), [self.m.sort_sizes[s] for s in args])
            return _lookup(codes, idx, n)
        if isinstance(p, Eq):
            return np.where(self.term(ctx, p.left) == self.term(ctx, p.right), self.top, 0)
        if isinstance(p, And):
            return self.formula(ctx, p.left) & self.formula(ctx, p.right)
        if isinstance(p, Or):
            return self.formula(ctx, p.left) | self.formula(ctx, p.right)
        if isinstance(p, Imp):
            a, b = np.broadcast_arrays(self.formula(ctx, p.left), self.formula(ctx, p.right))
            return self.m.frame.imp_code[a, b]
        # quantifiers: the bound variable becomes the last, fastest coordinate
        inner = ctx + ((p.var, p.sort),)
        body = self.formula(inner, p.body)
        s = self.m.sort_sizes[p.sort]
        if s == 0:
            fill = 0 if isinstance(p, Exists) else self.top
            return np.full((1, n), fill, dtype=np.int64)
        body = body.reshape(body.shape[0], n, s)
        if isinstance(p, Exists):
            return np.bitwise_or.reduce(body, axis=2)
        return np.bitwise_and.reduce(body, axis=2)

    def conj(self, ctx, formulas) -> np.ndarray:
        out = np.full((1, self.size(ctx)), self.top, dtype=np.int64)
        for f in formulas:
            out = out & self.formula(ctx, f)
        return out

    def holds(self, j: Judgment) -> np.ndarray:
        """Per-model validity, shape ``(B,)``."""
        ctx = tuple(j.context)
        lhs = self.conj(ctx, j.premises)
        rhs = self.formula(ctx, j.conclusion)
        bad = (lhs & ~rhs) != 0
        bad = np.broadcast_to(bad, (max(bad.shape[0], self.m.batch), bad.shape[1]))
        return ~bad.any(axis=1)

    def failures(self, j: Judgment) -> np.ndarray:
        ctx = tuple(j.context)
        lhs = self.conj(ctx, j.premises)
        rhs = self.formula(ctx, j.conclusion)
        return (lhs & ~rhs) != 0


# -- single-model API ----------------------------------------------------------


def interpret_term(sig: Signature, ctx, t: Term) -> FinMap:
    """``⟦t⟧ : ⟦ctx⟧ -> sort(t)``."""
    from .parser import sort_of

    ctx = tuple(ctx)
    ev = Evaluator(Model.from_signature(sig))
    sort = sort_of(t, sig, dict(ctx))
    vals = np.broadcast_to(ev.term(ctx, t), (1, ev.size(ctx)))[0]
    return FinMap(sig.context_set(ctx), sig.sorts[sort], vals)


def interpret_formula(sig: Signature, ctx, p: Formula) -> Predicate:
    """``⟦p⟧`` as a predicate on the context product."""
    ctx = tuple(ctx)
    ev = Evaluator(Model.from_signature(sig))
    codes = np.broadcast_to(ev.formula(ctx, p), (1, ev.size(ctx)))[0]
    return Predicate.from_codes(sig.context_set(ctx), sig.frame, codes)


@dataclass(frozen=True)
class HoldsResult:
    holds: bool
    witness: object = None  # first context element where the inequality fails
    lhs: object = None
    rhs: object = None

    def __bool__(self) -> bool:
        return self.holds


def check_judgment(sig: Signature, j: Judgment, evaluator: Evaluator | None = None) -> HoldsResult:
    ev = evaluator or Evaluator(Model.from_signature(sig))
    ctx = tuple(j.context)
    lhs = np.broadcast_to(ev.conj(ctx, j.premises), (1, ev.size(ctx)))[0]
    rhs = np.broadcast_to(ev.formula(ctx, j.conclusion), (1, ev.size(ctx)))[0]
    bad = np.flatnonzero((lhs & ~rhs) != 0)
    if not len(bad):
        return HoldsResult(True)
    k = int(bad[0])
    fr = sig.frame
    label = sig.context_set(ctx).elements[k]
    return HoldsResult(False, label, fr.elements[fr.decode[lhs[k]]], fr.elements[fr.decode[rhs[k]]])


def holds(sig: Signature, j: Judgment) -> bool:
    """``⟦P1⟧ ∧ … ∧ ⟦Pn⟧ <= ⟦Q⟧`` in the fibre over the context product."""
    return check_judgment(sig, j).holds
