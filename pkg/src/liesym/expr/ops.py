"""Differentiation, substitution, coefficient collection and evaluation."""

from __future__ import annotations

import decimal
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Union

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
    exp_of,
    linear_form_coefficients,
    mono_key,
)
from .errors import (
    ArityError,
    CollectError,
    CyclicBindingError,
    EvaluationError,
    ExpressionError,
    TranscendentalError,
)


@dataclass(frozen=True)
class Lambda:
    """A function template ``lambda params: body``."""

    params: tuple[str, ...]
    body: Expression

    @classmethod
    def parse(cls, params: Sequence[str] | str, body: str, table=None) -> Lambda:
        from .symbols import SymbolTable

        if isinstance(params, str):
            params = [p.strip() for p in params.split(",") if p.strip()]
        params = tuple(params)
        base = table if table is not None else SymbolTable()
        fresh = [p for p in params if p not in base]
        return cls(params, base.extended(coordinates=fresh).parse(body))

    @property
    def arity(self) -> int:
        return len(self.params)

    def derivative(self, orders: Sequence[int]) -> Expression:
        body = self.body
        for p, k in zip(self.params, orders):
            for _ in range(k):
                body = differentiate(body, Sym(p))
        return body


Variable = Union[Sym, Jet]


def _as_variable(v: Variable | str) -> Variable:
    if isinstance(v, str):
        if "_" in v:
            dep, index = v.split("_", 1)
            return Jet(dep, index)
        return Sym(v)
    if isinstance(v, Expression):
        (mono, c), = v.terms()
        if c == 1 and len(mono) == 1 and mono[0][1] == 1 and isinstance(mono[0][0], (Sym, Jet)):
            return mono[0][0]
        raise ExpressionError(f"{v} is not a variable")
    if not isinstance(v, (Sym, Jet)):
        raise ExpressionError(f"cannot differentiate with respect to {v!r}")
    return v


# ---------------------------------------------------------------------------
# differentiation


@lru_cache(maxsize=65536)
def _atom_derivative(atom: Atom, v: Variable) -> Expression:
    if isinstance(atom, (Sym, Jet)):
        return ONE if atom == v else ZERO
    if isinstance(atom, Exp):
        if not isinstance(v, Sym):
            return ZERO
        for n, c in atom.form:
            if n == v.name:
                return Expression.of(atom) * c
        return ZERO
    if isinstance(atom, App):
        total = ZERO
        for slot, arg in enumerate(atom.args):
            d = differentiate(arg, v)
            if d:
                total = total + Expression.of(atom.derived(slot)) * d
        return total
    raise TypeError(atom)


def differentiate(e: Expression, v: Variable | str) -> Expression:
    """Exact partial derivative of ``e`` by a symbol or jet coordinate.

    All other atoms are held fixed; function applications use the chain rule
    through every argument.
    """
    v = _as_variable(v)
    acc: dict[Monomial, Fraction] = {}
    for mono, c in e.terms():
        for idx, (atom, p) in enumerate(mono):
            d = _atom_derivative(atom, v)
            if not d:
                continue
            if isinstance(atom, Exp):
                # exp atoms always carry power 1; the derivative already holds the atom
                rest = mono[:idx] + mono[idx + 1:]
                factor = c
            else:
                if p == 1:
                    rest = mono[:idx] + mono[idx + 1:]
                else:
                    rest = mono[:idx] + ((atom, p - 1),) + mono[idx + 1:]
                factor = c * p
            piece = Expression({rest: Fraction(1)}) * d
            for m, cc in piece.terms():
                acc[m] = acc.get(m, 0) + cc * factor
    return Expression({m: c for m, c in acc.items() if c})


# ---------------------------------------------------------------------------
# substitution

FunctionTarget = Union[str, Lambda]


def substitute(
    e: Expression,
    bindings: Mapping[Variable | str, object],
    functions: Mapping[str, FunctionTarget] | None = None,
    check_cycles: bool = True,
) -> Expression:
    """Simultaneous substitution.

    ``bindings`` maps symbols or jet coordinates to expressions.  String keys
    are resolved as variable names.  ``functions`` maps function names to
    either another function name (a rename) or a :class:`Lambda` template.
    A symbol bound to an expression containing itself is rejected unless
    ``check_cycles`` is false (reparametrizations such as ``s -> -s``).
    """
    var_map: dict[Variable, Expression] = {}
    for k, val in bindings.items():
        var_map[_as_variable(k)] = Expression.coerce(val)
    fun_map = dict(functions or {})

    for k, val in var_map.items():
        if check_cycles and val.depends_on(k):
            raise CyclicBindingError(f"{k} is bound to an expression containing itself: {val}")
    for name, target in fun_map.items():
        if isinstance(target, Lambda):
            if any(isinstance(a, App) and a.name == name for a in target.body.all_atoms()):
                raise CyclicBindingError(f"template for {name} mentions {name}")
        elif not isinstance(target, str):
            raise ExpressionError(f"function {name} must map to a name or a Lambda")

    if not var_map and not fun_map:
        return e
    return _Substituter(var_map, fun_map).expr(e)


class _Substituter:
    def __init__(self, var_map: dict[Variable, Expression], fun_map: dict[str, FunctionTarget]):
        self.var_map = var_map
        self.fun_map = fun_map
        self.sym_names = {k.name: v for k, v in var_map.items() if isinstance(k, Sym)}
        self.memo: dict[Atom, Expression] = {}

    def expr(self, e: Expression) -> Expression:
        total = ZERO
        for mono, c in e.terms():
            term = Expression.const(c)
            for atom, p in mono:
                term = term * self.atom(atom) ** p
            total = total + term
        return total

    def atom(self, atom: Atom) -> Expression:
        hit = self.memo.get(atom)
        if hit is not None:
            return hit
        out = self._atom(atom)
        self.memo[atom] = out
        return out

    def _atom(self, atom: Atom) -> Expression:
        if isinstance(atom, (Sym, Jet)):
            return self.var_map.get(atom, Expression.of(atom))
        if isinstance(atom, Exp):
            if not any(n in self.sym_names for n, _ in atom.form):
                return Expression.of(atom)
            form = ZERO
            for n, c in atom.form:
                form = form + self.sym_names.get(n, Expression.of(Sym(n))) * c
            constant = form.coefficient(())
            if constant:
                raise TranscendentalError(
                    f"substitution turns {atom} into exp with constant part {constant}"
                )
            return exp_of(linear_form_coefficients(form))
        if isinstance(atom, App):
            args = [self.expr(a) for a in atom.args]
            target = self.fun_map.get(atom.name)
            if target is None:
                return Expression.of(atom.with_args(args))
            if isinstance(target, str):
                return Expression.of(App(target, atom.formals, args, atom.orders))
            if target.arity != len(args):
                raise ArityError(
                    f"template for {atom.name} takes {target.arity} argument(s), "
                    f"{atom.name} has {len(args)}"
                )
            body = target.derivative(atom.orders)
            binding = {Sym(p): a for p, a in zip(target.params, args)}
            return substitute(body, binding, check_cycles=False)
        raise TypeError(atom)


# ---------------------------------------------------------------------------
# coefficient collection


def collect(e: Expression, basis: Iterable[Atom]) -> dict[Monomial, Expression]:
    """Split ``e`` as a polynomial in the ``basis`` atoms.

    Keys are monomials in basis atoms only (``()`` for the basis-free part);
    values are coefficient expressions free of basis atoms.  The mapping is
    ordered by monomial key.
    """
    basis = set(basis)
    basis_names = {a.name for a in basis if isinstance(a, Sym)}
    out: dict[Monomial, dict[Monomial, Fraction]] = {}
    for mono, c in e.terms():
        key, rest = [], []
        for atom, p in mono:
            if atom in basis:
                if p < 0:
                    raise CollectError(
                        f"basis atom {atom} appears with negative power in term {Expression({mono: c})}"
                    )
                key.append((atom, p))
                continue
            if isinstance(atom, App):
                for arg in atom.args:
                    if any(b in arg.all_atoms() for b in basis) or basis_names & arg.free_names():
                        raise CollectError(
                            f"basis atom inside function argument in term {Expression({mono: c})}"
                        )
            if isinstance(atom, Exp) and basis_names & {n for n, _ in atom.form}:
                raise CollectError(
                    f"basis atom inside an exponential in term {Expression({mono: c})}"
                )
            rest.append((atom, p))
        bucket = out.setdefault(tuple(key), {})
        bucket[tuple(rest)] = bucket.get(tuple(rest), 0) + c
    result = {}
    for key in sorted(out, key=mono_key):
        coeff = Expression({m: c for m, c in out[key].items() if c})
        if coeff:
            result[key] = coeff
    return result


def monomial_expression(mono: Monomial) -> Expression:
    return Expression({mono: Fraction(1)}) if mono else ONE


def recombine(collected: Mapping[Monomial, Expression]) -> Expression:
    total = ZERO
    for mono, coeff in collected.items():
        total = total + monomial_expression(mono) * coeff
    return total


# ---------------------------------------------------------------------------
# numeric evaluation (test oracle only)


def _exp_fraction(value: Fraction, precision: int) -> Fraction:
    with decimal.localcontext() as ctx:
        ctx.prec = precision
        num = decimal.Decimal(value.numerator) / decimal.Decimal(value.denominator)
        return Fraction(num.exp())


def evaluate(
    e: Expression,
    assignment: Mapping[Variable | str, object],
    models: Mapping[str, Lambda] | None = None,
    precision: int = 50,
) -> Fraction:
    """Numeric value of ``e`` at a rational point.

    Exponentials are approximated to ``precision`` significant digits; with
    no exponential atoms present the result is exact.
    """
    values = {_as_variable(k): Fraction(v) for k, v in assignment.items()}
    models = dict(models or {})
    by_name = {k.name: v for k, v in values.items() if isinstance(k, Sym)}

    def ev(expr: Expression) -> Fraction:
        total = Fraction(0)
        for mono, c in expr.terms():
            term = c
            for atom, p in mono:
                val = atom_value(atom)
                if val == 0 and p < 0:
                    raise EvaluationError(f"division by zero evaluating {atom}^{p}")
                term *= val**p
            total += term
        return total

    def atom_value(atom: Atom) -> Fraction:
        if isinstance(atom, (Sym, Jet)):
            try:
                return values[atom]
            except KeyError:
                raise EvaluationError(f"no value for {atom}") from None
        if isinstance(atom, Exp):
            arg = Fraction(0)
            for n, c in atom.form:
                if n not in by_name:
                    raise EvaluationError(f"no value for {n}")
                arg += c * by_name[n]
            return Fraction(1) if arg == 0 else _exp_fraction(arg, precision)
        if isinstance(atom, App):
            model = models.get(atom.name)
            if model is None:
                raise EvaluationError(f"no model for function {atom.name}")
            if model.arity != len(atom.args):
                raise ArityError(f"model for {atom.name} has arity {model.arity}")
            body = model.derivative(atom.orders)
            inner = {Sym(p): ev(a) for p, a in zip(model.params, atom.args)}
            return evaluate(body, inner, models, precision)
        raise TypeError(atom)

    try:
        return ev(e)
    except ZeroDivisionError as exc:
        raise EvaluationError(str(exc)) from None
