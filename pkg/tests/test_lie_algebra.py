from __future__ import annotations

from fractions import Fraction
from itertools import product

import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from liesym import linalg
from liesym.expr import Expression, Sym, SymbolTable, differentiate
from liesym.fields import VectorField
from liesym.lie_algebra import (
    LinearDependence,
    NonClosure,
    UnsupportedAlgebra,
    adjoint_matrix,
    adjoint_table,
    build_algebra,
    commutator,
    commutator_table,
    exponential,
    render_combination,
    truncated_series,
)

from conftest import polynomial_fields, sympy_equal, to_sympy

COORDS = ("x", "u")
TABLE = SymbolTable(coordinates=COORDS)


def _f(**coeffs: str) -> VectorField:
    return VectorField.parse(COORDS, coeffs, TABLE)


def _vec(alg, i: int, j: int) -> list[Fraction]:
    return alg.bracket(i, j)


def test_commutator_cells(g5) -> None:
    m = g5.dim
    nonzero = {(i, j): c for i, j in product(range(m), repeat=2) if any(c := g5.bracket(i, j))}
    e = lambda k: [Fraction(int(k == n)) for n in range(m)]  # noqa: E731
    assert nonzero == {
        (1, 3): e(1),
        (3, 1): [-v for v in e(1)],
        (2, 3): e(2),
        (3, 2): [-v for v in e(2)],
    }


def test_commutator_table_fields(g5) -> None:
    table = commutator_table(g5)
    for i, j in product(range(g5.dim), repeat=2):
        assert table[i][j] == commutator(g5.basis[i], g5.basis[j])


def test_jacobi_identity(g5) -> None:
    m = g5.dim
    zero = [Fraction(0)] * m
    for i, j, k in product(range(m), repeat=3):
        ei, ej, ek = (g5.element([int(n == a) for n in range(m)]) for a in (i, j, k))
        total = (
            commutator(ei, commutator(ej, ek))
            + commutator(ej, commutator(ek, ei))
            + commutator(ek, commutator(ei, ej))
        )
        assert total.is_zero(), (i, j, k)
        via_constants = [
            sum(
                g5.constants[j][k][n] * g5.constants[i][n][l]
                + g5.constants[k][i][n] * g5.constants[j][n][l]
                + g5.constants[i][j][n] * g5.constants[k][n][l]
                for n in range(m)
            )
            for l in range(m)
        ]
        assert via_constants == zero


@settings(max_examples=40, deadline=None)
@given(polynomial_fields(), polynomial_fields(), polynomial_fields(), st.integers(-3, 3))
def test_commutator_laws(X, Y, Z, k) -> None:
    assert commutator(X, Y) == -commutator(Y, X)
    assert commutator(X + Y * k, Z) == commutator(X, Z) + commutator(Y, Z) * k
    jac = commutator(X, commutator(Y, Z)) + commutator(Y, commutator(Z, X)) + commutator(Z, commutator(X, Y))
    assert jac.is_zero()


def test_adjoint_kinds(g5) -> None:
    kinds = [adjoint_matrix(g5, i).kind for i in range(g5.dim)]
    assert kinds == ["identity", "shift", "shift", "scale", "identity"]


def test_adjoint_cells_render(g5) -> None:
    table = adjoint_table(g5)
    assert render_combination(table[1][3], g5.names, lead=3) == "Y4 - s*Y2"
    assert render_combination(table[2][3], g5.names, lead=3) == "Y4 - s*Y3"
    assert render_combination(table[3][1], g5.names, lead=1) == "exp(s)*Y2"
    assert render_combination(table[3][2], g5.names, lead=2) == "exp(s)*Y3"


@pytest.mark.parametrize("i", range(5))
def test_adjoint_group_law(g5, i: int) -> None:
    Ad = adjoint_matrix(g5, i)
    p, q = Expression.of(Sym("p")), Expression.of(Sym("q"))
    assert Ad.at(p).compose(Ad.at(q)) == [list(r) for r in Ad.at(p + q).entries]
    assert Ad.at(0).rational() == linalg.identity(g5.dim)


@pytest.mark.parametrize("i", range(5))
def test_adjoint_derivative_law(g5, i: int) -> None:
    """d/ds Ad(s) = -ad(Y_i) Ad(s)."""
    Ad = adjoint_matrix(g5, i)
    A = g5.ad(i)
    m = g5.dim
    for r, c in product(range(m), repeat=2):
        lhs = differentiate(Ad.entries[r][c], Sym("s"))
        rhs = sum((Ad.entries[k][c] * -A[r][k] for k in range(m)), Expression.const(0))
        assert lhs == rhs


@pytest.mark.parametrize("i", [0, 1, 2, 4])
def test_truncated_series_agrees_for_nilpotent(g5, i: int) -> None:
    assert truncated_series(g5, i) == [list(r) for r in adjoint_matrix(g5, i).entries]


def test_truncated_series_rejects_semisimple(g5) -> None:
    with pytest.raises(UnsupportedAlgebra):
        truncated_series(g5, 3)


def test_inverse_action(g5) -> None:
    for i in range(g5.dim):
        Ad = adjoint_matrix(g5, i)
        s = Expression.of(Sym("s"))
        prod = Ad.compose(Ad.at(-s))
        assert prod == [[Expression.const(int(r == c)) for c in range(g5.dim)] for r in range(g5.dim)]


_spectra = st.lists(st.integers(-2, 2), min_size=3, max_size=3)
_upper = st.lists(st.integers(-2, 2), min_size=3, max_size=3)


@settings(max_examples=15, deadline=None)
@given(_spectra, _upper)
def test_exponential_matches_sympy(diag, upper) -> None:
    T = [[diag[0], upper[0], upper[1]], [0, diag[1], upper[2]], [0, 0, diag[2]]]
    P = [[1, 1, 0], [0, 1, 1], [1, 0, 1]]
    M = linalg.matmul(linalg.matmul(linalg.frac_matrix(P), linalg.frac_matrix(T)), linalg.inverse(linalg.frac_matrix(P)))
    s = sympy.Symbol("s")
    want = (sympy.Matrix([[sympy.Rational(v.numerator, v.denominator) for v in row] for row in M]) * s).exp()
    got = exponential(M)
    for r, c in product(range(3), repeat=2):
        assert sympy_equal(to_sympy(got[r][c]), want[r, c])


def test_irrational_spectrum_unsupported() -> None:
    alg = build_algebra([_f(x="1"), _f(u="1"), _f(x="x + 2*u", u="x + u")])
    with pytest.raises(UnsupportedAlgebra):
        adjoint_matrix(alg, 2)


def test_non_closure_names_the_pair() -> None:
    with pytest.raises(NonClosure) as info:
        build_algebra([_f(x="1"), _f(x="x^2")], ["A", "B"])
    assert info.value.pair == (0, 1)
    assert "[A, B]" in str(info.value)


def test_linear_dependence() -> None:
    with pytest.raises(LinearDependence):
        build_algebra([_f(x="1"), _f(x="2")])


def test_relabel_swaps_constants(g5) -> None:
    swapped = g5.relabel([2, 1, 3, 4, 5])
    assert swapped.basis[0] == g5.basis[1]
    assert swapped.bracket(0, 3) == [1, 0, 0, 0, 0]


def test_abelian_detection() -> None:
    assert build_algebra([_f(x="1"), _f(u="1")]).is_abelian()
