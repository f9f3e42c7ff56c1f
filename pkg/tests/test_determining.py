from __future__ import annotations

import random
from fractions import Fraction

import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from liesym.determining import (
    EQUATION_COORDS,
    EQUIVALENCE_COORDS,
    NoEquivalenceLift,
    check_equivalence_family,
    determining_system,
    equation_table,
    equivalence_lift,
    equivalence_residuals,
    equivalence_table,
    family_report,
    generic_field,
    symmetry_residual,
)
from liesym.expr import Expression, ExpressionError, Jet, Lambda, collect, evaluate, render, substitute
from liesym.fields import VectorField

from conftest import polynomial_fields, sympy_equal, sympy_residual, to_sympy

EQ = equation_table()
EV = equivalence_table()
UX2 = ((Jet("u", "x"), 2),)
UXX = ((Jet("u", "xx"), 1),)


def _e(text: str) -> Expression:
    return EQ.parse(text)


def _v(text: str) -> Expression:
    return EV.parse(text)


def _field(**coeffs: str) -> VectorField:
    return VectorField.parse(EQUATION_COORDS, coeffs, EQ)


def _equiv(**coeffs: str) -> VectorField:
    return VectorField.parse(EQUIVALENCE_COORDS, coeffs, EV)


# ---------------------------------------------------------------------------
# symmetry branch


def test_time_translation_is_always_admitted() -> None:
    assert symmetry_residual(_field(t="1")).is_zero()


def test_x_translation_residual_collects() -> None:
    R = symmetry_residual(_field(x="alpha", u="gamma"))
    parts = collect(R, [Jet("u", "x"), Jet("u", "xx")])
    assert parts == {
        UX2: _e("-(alpha*D[f,x](x,u) + gamma*D[f,u](x,u))"),
        UXX: _e("-(alpha*D[g,x](x,u) + gamma*D[g,u](x,u))"),
    }


def test_residual_for_concrete_coefficients() -> None:
    X = _field(x="1")
    assert symmetry_residual(X, _e("Phi(u)"), _e("Psi(u)")).is_zero()
    R = symmetry_residual(X, _e("exp(2*x)*Phi(u)"), _e("Psi(u)"))
    assert R == _e("-2*u_x^2*exp(2*x)*Phi(u)")


def test_generic_u_x_cubed_coefficient() -> None:
    system = determining_system(generic_field())
    got = system.as_dict()[((Jet("u", "x"), 3),)]
    want = _e(
        "2*f(x,u)*g(x,u)*D[xi2,x,u](x,t,u) + 2*f(x,u)^2*D[xi2,x](x,t,u)"
        " + f(x,u)*D[xi1,u](x,t,u) + g(x,u)*D[xi1,u,u](x,t,u)"
    )
    assert got == want
    assert len(system) == 10
    assert system.reconstruct("residual") == symmetry_residual(generic_field())


def test_class_functions_must_not_depend_on_t() -> None:
    with pytest.raises(ExpressionError):
        symmetry_residual(_field(x="1"), _e("t*u"), _e("1"))
    with pytest.raises(ExpressionError):
        symmetry_residual(_field(x="1"), _e("u_x"), _e("1"))


@given(polynomial_fields(EQUATION_COORDS), polynomial_fields(EQUATION_COORDS), st.integers(-3, 3))
def test_residual_is_linear_in_the_field(X: VectorField, Y: VectorField, k: int) -> None:
    f, g = _e("u^2 + x"), _e("x*u + 1")
    lhs = symmetry_residual(X + Y * k, f, g)
    rhs = symmetry_residual(X, f, g) + symmetry_residual(Y, f, g) * k
    assert lhs == rhs


_POLY = st.tuples(*(st.integers(-2, 2) for _ in range(4)))


def _poly(c: tuple[int, ...]) -> str:
    return f"{c[0]} + {c[1]}*x + {c[2]}*u^2 + {c[3]}*x*u"


@settings(max_examples=50, deadline=None)
@given(polynomial_fields(EQUATION_COORDS), _POLY, _POLY)
def test_residual_matches_sympy_invariance_condition(X: VectorField, fc, gc) -> None:
    """pr X (u_t - f u_x^2 - g u_xx) on u(x,t), then u_t eliminated, computed by sympy."""
    f, g = _e(_poly(fc)), _e(_poly(gc))
    R = sympy_residual(X["x"], X["t"], X["u"], f, g)
    assert sympy_equal(to_sympy(symmetry_residual(X, f, g)), R)


@settings(max_examples=50, deadline=None)
@given(polynomial_fields(EQUATION_COORDS), _POLY, _POLY)
def test_symbolic_residual_specializes(X: VectorField, fc, gc) -> None:
    """Residual with symbolic f, g then f, g := P, Q equals the residual at P, Q."""
    models = {"f": Lambda.parse("x,u", _poly(fc), EQ), "g": Lambda.parse("x,u", _poly(gc), EQ)}
    generic = substitute(symmetry_residual(X), {}, models)
    assert generic == symmetry_residual(X, _e(_poly(fc)), _e(_poly(gc)))


def test_numeric_soundness_at_random_points() -> None:
    """Residual and the sympy invariance condition agree exactly at 50 rational jet points."""
    rng = random.Random(11)
    X = _field(x="x", t="2*t", u="u + x")
    f, g = _e("x*u + 1"), _e("u^2 - x")
    mine = symmetry_residual(X, f, g)
    theirs = sympy_residual(X["x"], X["t"], X["u"], f, g)
    names = ["x", "t", "u", "u_x", "u_xx", "u_xt"]
    for _ in range(50):
        point = {n: Fraction(rng.randint(-9, 9), rng.randint(1, 5)) for n in names}
        want = theirs.subs({sympy.Symbol(n): sympy.Rational(v.numerator, v.denominator) for n, v in point.items()})
        assert evaluate(mine, point) == Fraction(int(want.p), int(want.q))


def test_admitted_field_vanishes_at_random_points() -> None:
    rng = random.Random(5)
    X = _field(t="t + 1", u="u")
    f, g = _e("x*u^-2 + exp(x)*u^-2"), _e("(x^2 + 1)*u^-1")
    R = symmetry_residual(X, f, g)
    assert R.is_zero()
    for _ in range(50):
        point = {n: Fraction(rng.randint(1, 9), rng.randint(1, 5)) for n in ("x", "t", "u", "u_x", "u_xx")}
        assert evaluate(R, point) == 0


def test_system_lines_format() -> None:
    lines = determining_system(_field(x="1"), _e("x*u"), _e("1")).lines()
    assert lines == ["u_x^2: -u = 0"]


# ---------------------------------------------------------------------------
# equivalence branch


@pytest.mark.parametrize(
    "coeffs",
    [
        {"t": "1"},
        {"x": "1"},
        {"u": "b0"},
        {"t": "t", "u": "u", "f": "-2*f", "g": "-g"},
    ],
)
def test_equivalence_generators(coeffs: dict[str, str]) -> None:
    assert equivalence_residuals(_equiv(**coeffs)).vanishes()


def test_non_generator_is_reported() -> None:
    res = equivalence_residuals(_equiv(x="1", f="2*f", g="g"))
    assert not res.vanishes()
    assert res.main == _v("-2*f*u_x^2 - g*u_xx")


def test_equivalence_lift() -> None:
    lifted = equivalence_lift(_field(t="t", u="u"))
    assert lifted == _equiv(t="t", u="u", f="-2*f", g="-g")
    with pytest.raises(NoEquivalenceLift):
        equivalence_lift(_field(t="x"))


def test_equivalence_rejects_f_in_base_coefficients() -> None:
    with pytest.raises(ExpressionError):
        equivalence_residuals(_equiv(x="f"))


def test_family_report_machine_values() -> None:
    report = family_report()
    assert report.mu == _v("-2*c1*f + 2*f*D[a,x](x)")
    assert report.nu == _v("-c1*g + 2*g*D[a,x](x)")
    assert set(report.constraints) == {_v("D[a,x,x](x)"), _v("D[b,x](x)"), _v("D[b,x,x](x)")}
    lines = report.lines(_v("-2*f*(c1 - a(x))"), _v("-g*(c1 - D[a,x](x))"), _v("D[b,x,x](x) - c1 + D[a,x](x)"))
    assert sum(line.startswith("DELTA") for line in lines) == 3


def test_printed_family_residuals() -> None:
    system = check_equivalence_family("a", "b", "c1", "c2")
    main = system.as_dict("main")
    assert main[()] == _v("-g*D[b,x,x](x)")
    assert main[UXX] == _v("g*D[a,x](x)")
    witness = check_equivalence_family("0", "1/2*x^2", "1", "0")
    assert witness.as_dict("main")[()] == _v("-g")


def test_printed_family_with_linear_b() -> None:
    system = check_equivalence_family("0", "x", "0", "0")
    assert {render(c) for _, _, c in system.equations} == {"-2*f"}


def test_family_reduces_to_scaling() -> None:
    assert check_equivalence_family("0", "0", "1", "0").is_empty()


def test_family_with_constant_a_exposes_mu() -> None:
    system = check_equivalence_family("1", "0", "0", "0")
    assert system.as_dict("main") == {UX2: _v("-2*f")}
