from __future__ import annotations

import sys
from fractions import Fraction

import pytest
import sympy
from hypothesis import strategies as st

from liesym.determining import equation_table, equivalence_table
from liesym.expr import App, Exp, Expression, Jet, Sym, SymbolTable, apply_function, exp_of
from liesym.fields import VectorField
from liesym.workspace import load_workspace

X, T, U = (Expression.of(Sym(n)) for n in "xtu")


def jet(index: str) -> Expression:
    return Expression.of(Jet("u", index))


# ---------------------------------------------------------------------------
# random expressions


small = st.integers(min_value=-3, max_value=3)
nonzero = small.filter(bool)

_JETS = ["x", "t", "xx", "xt"]


@st.composite
def factors(draw, with_jets: bool = True, with_apps: bool = False, with_exp: bool = True) -> Expression:
    kinds = ["sym"]
    if with_jets:
        kinds.append("jet")
    if with_exp:
        kinds.append("exp")
    if with_apps:
        kinds.append("app")
    kind = draw(st.sampled_from(kinds))
    if kind == "sym":
        return Expression.of(Sym(draw(st.sampled_from("xtu"))), draw(st.integers(1, 3)))
    if kind == "jet":
        return jet(draw(st.sampled_from(_JETS))) ** draw(st.integers(1, 2))
    if kind == "exp":
        return exp_of({draw(st.sampled_from("xtu")): draw(nonzero)})
    inner = X * draw(nonzero) + U * draw(small)
    return apply_function("f", ("x", "u"), inner, U)


@st.composite
def expressions(draw, with_jets: bool = True, with_apps: bool = False, with_exp: bool = True, max_terms: int = 4) -> Expression:
    total = Expression.const(draw(small))
    for _ in range(draw(st.integers(1, max_terms))):
        term = Expression.const(draw(nonzero))
        for _ in range(draw(st.integers(0, 3))):
            term = term * draw(factors(with_jets, with_apps, with_exp))
        total = total + term
    return total


@st.composite
def polynomial_fields(draw, coords=("t", "x", "u", "f", "g")) -> VectorField:
    """Random polynomial vector fields on the equivalence space."""
    names = [Sym(c) for c in coords]
    coeffs = {}
    for c in coords:
        e = Expression.const(draw(small))
        for _ in range(draw(st.integers(0, 2))):
            term = Expression.const(draw(nonzero))
            for _ in range(draw(st.integers(0, 2))):
                term = term * Expression.of(draw(st.sampled_from(names)))
            e = e + term
        coeffs[c] = e
    return VectorField(coords, coeffs)


# ---------------------------------------------------------------------------
# sympy oracle


def _app_to_sympy(atom: App) -> sympy.Expr:
    formals = [sympy.Symbol(f"_{name}") for name in atom.formals]
    body = sympy.Function(atom.name)(*formals)
    for sym, k in zip(formals, atom.orders):
        if k:
            body = sympy.diff(body, sym, k)
    args = [to_sympy(a) for a in atom.args]
    return body.subs(dict(zip(formals, args)), simultaneous=True)


def to_sympy(e: Expression) -> sympy.Expr:
    """Convert an expression to sympy; applications become undefined functions."""
    total = sympy.Integer(0)
    for mono, c in e.terms():
        term = sympy.Rational(c.numerator, c.denominator)
        for atom, p in mono:
            if isinstance(atom, Sym):
                base = sympy.Symbol(atom.name)
            elif isinstance(atom, Jet):
                base = sympy.Symbol(f"{atom.dep}_{atom.index}")
            elif isinstance(atom, Exp):
                base = sympy.exp(sum(sympy.Rational(k.numerator, k.denominator) * sympy.Symbol(n) for n, k in atom.form))
            elif isinstance(atom, App):
                base = _app_to_sympy(atom)
            else:
                raise TypeError(f"no sympy image for {atom}")
            term *= base**p
        total += term
    return total


def sympy_equal(a: sympy.Expr, b: sympy.Expr) -> bool:
    return sympy.simplify(sympy.expand(a - b)) == 0


XS, TS = sympy.symbols("x t")
U_OF_XT = sympy.Function("u")(XS, TS)
VARS = {"x": XS, "t": TS}


def on_solution(e: Expression) -> sympy.Expr:
    """Replace ``u`` and every jet symbol by the matching derivative of u(x,t)."""
    s = to_sympy(e)
    lift = {}
    for sym in s.free_symbols:
        name = sym.name
        if name == "u":
            lift[sym] = U_OF_XT
        elif name.startswith("u_"):
            lift[sym] = sympy.Derivative(U_OF_XT, *(VARS[c] for c in name[2:]))
    return s.xreplace(lift)


def to_jet(e: sympy.Expr) -> sympy.Expr:
    e = sympy.expand(e.doit())
    lower = {}
    for d in e.atoms(sympy.Derivative):
        letters = "".join(str(v) * k for v, k in d.variable_count)
        lower[d] = sympy.Symbol("u_" + "".join(sorted(letters, key="xt".index)))
    return e.xreplace(lower).xreplace({U_OF_XT: sympy.Symbol("u")})


def sympy_residual(xi1: Expression, xi2: Expression, phi: Expression, f: Expression, g: Expression) -> sympy.Expr:
    """pr X (u_t - f u_x^2 - g u_xx) with u_t eliminated, computed in sympy on u(x,t)."""
    xs, ts, u = XS, TS, U_OF_XT
    a1, a2, p = (on_solution(c) for c in (xi1, xi2, phi))
    usym = sympy.Symbol("u")
    F, G = to_sympy(f), to_sympy(g)
    Q = p - a1 * sympy.diff(u, xs) - a2 * sympy.diff(u, ts)
    phi_x = sympy.diff(Q, xs) + a1 * sympy.diff(u, xs, 2) + a2 * sympy.diff(u, xs, ts)
    phi_t = sympy.diff(Q, ts) + a1 * sympy.diff(u, xs, ts) + a2 * sympy.diff(u, ts, 2)
    phi_xx = sympy.diff(Q, xs, 2) + a1 * sympy.diff(u, xs, 3) + a2 * sympy.diff(u, xs, 2, ts)

    def on_u(e: sympy.Expr) -> sympy.Expr:
        return e.subs(usym, u)

    R = (
        phi_t
        - (on_u(sympy.diff(F, xs)) * a1 + on_u(sympy.diff(F, usym)) * p) * sympy.diff(u, xs) ** 2
        - (on_u(sympy.diff(G, xs)) * a1 + on_u(sympy.diff(G, usym)) * p) * sympy.diff(u, xs, 2)
        - 2 * on_u(F) * phi_x * sympy.diff(u, xs)
        - on_u(G) * phi_xx
    )
    ux, uxx = sympy.Symbol("u_x"), sympy.Symbol("u_xx")
    return to_jet(R).subs(sympy.Symbol("u_t"), F * ux**2 + G * uxx)


# ---------------------------------------------------------------------------
# shared objects


@pytest.fixture(scope="session")
def workspace():
    return load_workspace()


@pytest.fixture(scope="session")
def g5(workspace):
    return workspace.algebra()


@pytest.fixture(scope="session")
def g5_reps(workspace):
    return workspace.relabeled()


@pytest.fixture(scope="session")
def eq_table() -> SymbolTable:
    return equation_table()


@pytest.fixture(scope="session")
def ev_table() -> SymbolTable:
    return equivalence_table()


def frac(*values) -> tuple[Fraction, ...]:
    return tuple(Fraction(v) for v in values)


__all__ = ["App", "sympy_residual", "on_solution", "to_jet", "VARS", "X", "T", "U", "jet", "expressions", "polynomial_fields", "to_sympy", "sympy_equal", "frac"]


def pytest_terminal_summary(terminalreporter) -> None:
    module = sys.modules.get("test_acceptance")
    results = getattr(module, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(results):
        terminalreporter.write_line(results[n])
