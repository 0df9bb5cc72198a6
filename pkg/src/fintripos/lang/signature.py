"""Signatures: sorts, function symbols, relation symbols and defined predicates."""

from __future__ import annotations

from dataclasses import dataclass, field

from ..doctrine import REGULAR, TRIPOS, Predicate
from ..errors import CarrierMismatch
from ..finset import FinMap, FinSet, product_n
from ..order import FinFrame
from .ast import Formula


@dataclass(frozen=True)
class FunctionSymbol:
    name: str
    args: tuple[str, ...]
    result: str
    map: FinMap


@dataclass(frozen=True)
class RelationSymbol:
    name: str
    args: tuple[str, ...]
    pred: Predicate


@dataclass(frozen=True)
class Definition:
    """``name(params) :≡ body``, expanded wherever ``name`` is applied."""

    name: str
    params: tuple[tuple[str, str], ...]
    body: Formula


@dataclass
class Signature:
    frame: FinFrame
    mode: str = TRIPOS
    sorts: dict[str, FinSet] = field(default_factory=dict)
    functions: dict[str, FunctionSymbol] = field(default_factory=dict)
    relations: dict[str, RelationSymbol] = field(default_factory=dict)
    definitions: dict[str, Definition] = field(default_factory=dict)

    def add_sort(self, name: str, s: FinSet) -> "Signature":
        self.sorts[name] = s
        return self

    def add_function(self, name: str, args, result: str, fmap: FinMap) -> "Signature":
        args = tuple(args)
        dom = product_n([self.sorts[a] for a in args])
        if fmap.dom != dom or fmap.cod != self.sorts[result]:
            # accept any map with matching sizes, relabelled onto the canonical product
            if len(fmap.dom) != len(dom) or len(fmap.cod) != len(self.sorts[result]):
                raise CarrierMismatch(f"function {name} does not match its declared arity")
            fmap = FinMap(dom, self.sorts[result], fmap.table)
        self.functions[name] = FunctionSymbol(name, args, result, fmap)
        return self

    def add_relation(self, name: str, args, pred: Predicate) -> "Signature":
        args = tuple(args)
        carrier = product_n([self.sorts[a] for a in args])
        if pred.carrier != carrier:
            if len(pred.carrier) != len(carrier):
                raise CarrierMismatch(f"relation {name} does not match its declared arity")
            pred = Predicate(carrier, pred.frame, pred.values)
        if pred.frame != self.frame:
            raise CarrierMismatch(f"relation {name} is valued in {pred.frame.id}, not {self.frame.id}")
        self.relations[name] = RelationSymbol(name, args, pred)
        return self

    def add_definition(self, name: str, params, body: Formula) -> "Signature":
        self.definitions[name] = Definition(name, tuple(params), body)
        return self

    def copy(self) -> "Signature":
        return Signature(
            self.frame, self.mode, dict(self.sorts), dict(self.functions),
            dict(self.relations), dict(self.definitions),
        )

    def shape_key(self) -> tuple:
        """Everything the parser depends on, and nothing the interpreter alone needs."""
        return (
            self.mode,
            tuple(sorted((k, len(v)) for k, v in self.sorts.items())),
            tuple(sorted((k, f.args, f.result) for k, f in self.functions.items())),
            tuple(sorted((k, r.args) for k, r in self.relations.items())),
            tuple(sorted((k, d.params, d.body) for k, d in self.definitions.items())),
        )

    def context_set(self, ctx) -> FinSet:
        return product_n([self.sorts[s] for _, s in ctx])

    @property
    def regular(self) -> bool:
        return self.mode == REGULAR
