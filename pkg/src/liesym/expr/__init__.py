"""Exact symbolic kernel: canonical expressions over rationals."""

from .core import (
    ONE,
    ZERO,
    App,
    Atom,
    Exp,
    Expression,
    Jet,
    Monomial,
    Sym,
    apply_function,
    exp_of,
    sym,
)
from .errors import (
    ArityError,
    CollectError,
    CyclicBindingError,
    EvaluationError,
    ExpressionError,
    ParseError,
    TranscendentalError,
    UnknownSymbolError,
)
from .ops import Lambda, collect, differentiate, evaluate, monomial_expression, recombine, substitute
from .parser import parse
from .render import render, render_number
from .symbols import Kind, Symbol, SymbolTable

__all__ = [
    "ONE", "ZERO", "App", "Atom", "Exp", "Expression", "Jet", "Monomial", "Sym",
    "apply_function", "exp_of", "sym",
    "ArityError", "CollectError", "CyclicBindingError", "EvaluationError",
    "ExpressionError", "ParseError", "TranscendentalError", "UnknownSymbolError",
    "Lambda", "collect", "differentiate", "evaluate", "monomial_expression",
    "recombine", "substitute", "parse", "render", "render_number",
    "Kind", "Symbol", "SymbolTable",
]
