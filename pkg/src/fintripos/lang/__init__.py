"""The internal language: syntax, parser, interpreter and rule checking."""

from .ast import (
    And, App, Atom, Bot, Eq, Exists, Forall, Formula, Imp, Judgment, Or, Term, Top, Var,
    conj, free_vars, iff,
)
from .interp import (
    Evaluator, HoldsResult, Model, check_judgment, holds, interpret_formula, interpret_term,
)
from .parser import (
    parse, parse_context, parse_formula, parse_judgment, parse_term, tokenize, typecheck,
    typecheck_judgment,
)
from .printer import print_formula, print_judgment, print_term
from .signature import Definition, FunctionSymbol, RelationSymbol, Signature
from .subst import fresh_name, substitute, substitute_many, weaken
