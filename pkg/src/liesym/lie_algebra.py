"""Finite-dimensional Lie algebras of vector fields.

Structure constants are read off by writing each commutator in the basis.
Adjoint actions are exact exponentials ``exp(-s ad Y_i)``; eigenvalues
must be rational.
"""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial

from . import linalg
from .expr import ONE, ZERO, Exp, Expression, Sym, exp_of, substitute
from .expr.render import render
from .fields import VectorField, combination


class AlgebraError(ValueError):
    pass


class NonClosure(AlgebraError):
    def __init__(self, i: int, j: int, names: Sequence[str], bracket: VectorField):
        self.pair = (i, j)
        self.bracket = bracket
        super().__init__(f"[{names[i]}, {names[j]}] = {bracket} is not in the span of the basis")


class LinearDependence(AlgebraError):
    pass


class UnsupportedAlgebra(AlgebraError):
    pass


def commutator(X: VectorField, Y: VectorField) -> VectorField:
    """``[X, Y]`` with ``k``-th coefficient ``X(eta^k) - Y(xi^k)``."""
    if X.coords != Y.coords:
        raise ValueError(f"coordinate mismatch: {X.coords} vs {Y.coords}")
    return VectorField(X.coords, {c: X.apply(Y[c]) - Y.apply(X[c]) for c in X.coords})


def _field_vector(X: VectorField) -> dict[tuple, Fraction]:
    out = {}
    for c, coeff in X.items():
        for mono, k in coeff.terms():
            out[(c, mono)] = k
    return out


@dataclass
class LieAlgebraPresentation:
    """An ordered basis together with its structure constants.

    ``constants[i][j][k]`` is ``c_ij^k`` in ``[Y_i, Y_j] = sum_k c_ij^k Y_k``.
    """

    basis: tuple[VectorField, ...]
    names: tuple[str, ...]
    constants: list[list[list[Fraction]]]
    _keys: list[tuple] = field(repr=False, default_factory=list)
    _matrix: list[list[Fraction]] = field(repr=False, default_factory=list)

    @property
    def dim(self) -> int:
        return len(self.basis)

    @property
    def coords(self) -> tuple[str, ...]:
        return self.basis[0].coords

    def coordinates_of(self, X: VectorField) -> list[Fraction] | None:
        """Rational coefficients of ``X`` in the basis, or ``None`` outside the span."""
        vec = _field_vector(X)
        if any(k not in self._keys for k in vec):
            return None
        b = [vec.get(k, Fraction(0)) for k in self._keys]
        return linalg.solve(self._matrix, b)

    def element(self, coeffs: Sequence[object]) -> VectorField:
        return combination(self.basis, coeffs)

    def bracket(self, i: int, j: int) -> list[Fraction]:
        return list(self.constants[i][j])

    def ad(self, i: int) -> linalg.Matrix:
        """Matrix of ``ad Y_i`` acting on coefficient columns: ``A[k][j] = c_ij^k``."""
        m = self.dim
        return [[self.constants[i][j][k] for j in range(m)] for k in range(m)]

    def bracket_vectors(self, a: Sequence[Fraction], b: Sequence[Fraction]) -> list[Fraction]:
        m = self.dim
        out = [Fraction(0)] * m
        for i in range(m):
            if not a[i]:
                continue
            for j in range(m):
                if not b[j]:
                    continue
                for k in range(m):
                    out[k] += a[i] * b[j] * self.constants[i][j][k]
        return out

    def is_abelian(self) -> bool:
        return all(v == 0 for plane in self.constants for row in plane for v in row)

    def relabel(self, permutation: Sequence[int], names: Sequence[str] | None = None) -> LieAlgebraPresentation:
        """New presentation whose ``k``-th basis element is old element ``permutation[k]``.

        ``permutation`` is 1-based, e.g. ``[2, 1, 3, 4, 5]`` swaps the first two.
        """
        perm = [p - 1 for p in permutation]
        if sorted(perm) != list(range(self.dim)):
            raise ValueError(f"{list(permutation)} is not a permutation of 1..{self.dim}")
        new_names = tuple(names) if names is not None else self.names
        return build_algebra([self.basis[p] for p in perm], new_names)


def build_algebra(basis: Sequence[VectorField], names: Sequence[str] | None = None) -> LieAlgebraPresentation:
    """Check independence and closure, then extract structure constants."""
    basis = tuple(basis)
    if not basis:
        raise AlgebraError("empty basis")
    coords = basis[0].coords
    for X in basis:
        if X.coords != coords:
            raise ValueError(f"coordinate mismatch: {X.coords} vs {coords}")
    names = tuple(names) if names is not None else tuple(f"Y{i + 1}" for i in range(len(basis)))
    if len(names) != len(basis):
        raise ValueError("one name per basis element is required")

    vectors = [_field_vector(X) for X in basis]
    keys = sorted({k for v in vectors for k in v}, key=repr)
    matrix = [[v.get(k, Fraction(0)) for v in vectors] for k in keys]
    if linalg.rank(matrix) < len(basis):
        null = linalg.nullspace(matrix)[0]
        relation = " + ".join(f"({c})*{n}" for c, n in zip(null, names) if c)
        raise LinearDependence(f"basis is linearly dependent: {relation} = 0")

    alg = LieAlgebraPresentation(basis, names, [], keys, matrix)
    m = len(basis)
    constants = [[[Fraction(0)] * m for _ in range(m)] for _ in range(m)]
    for i in range(m):
        for j in range(i + 1, m):
            br = commutator(basis[i], basis[j])
            c = alg.coordinates_of(br)
            if c is None:
                raise NonClosure(i, j, names, br)
            constants[i][j] = c
            constants[j][i] = [-v for v in c]
    alg.constants = constants
    return alg


def commutator_table(alg: LieAlgebraPresentation) -> list[list[VectorField]]:
    """Entry ``(i, j)`` is ``[Y_i, Y_j]``."""
    return [[alg.element(alg.constants[i][j]) for j in range(alg.dim)] for i in range(alg.dim)]


def render_combination(coeffs: Sequence[object], names: Sequence[str], lead: int | None = None) -> str:
    """Text such as ``Y4 - s*Y2`` or ``exp(s)*Y2``; ``lead`` is printed first."""
    order = list(range(len(names)))
    if lead is not None:
        order.remove(lead)
        order.insert(0, lead)
    pieces = []
    for k in order:
        c = Expression.coerce(coeffs[k])
        if not c:
            continue
        if c == 1:
            piece = names[k]
        elif c == -1:
            piece = f"-{names[k]}"
        elif c.is_single_term():
            piece = f"{render(c)}*{names[k]}"
        else:
            piece = f"({render(c)})*{names[k]}"
        pieces.append(piece)
    if not pieces:
        return "0"
    out = pieces[0]
    for p in pieces[1:]:
        out += f" - {p[1:]}" if p.startswith("-") else f" + {p}"
    return out


# ---------------------------------------------------------------------------
# adjoint action


@dataclass(frozen=True)
class AdjointMatrix:
    """``Ad(exp(s Y_i))`` as a matrix of expressions in ``s``.

    Column ``j`` holds the basis coefficients of ``Ad(exp(s Y_i)) Y_j``.
    ``kind`` is ``"identity"`` (``Y_i`` central), ``"shift"`` (entries are
    polynomials in ``s``) or ``"scale"`` (exponentials occur).
    """

    index: int
    entries: tuple[tuple[Expression, ...], ...]
    parameter: str = "s"
    kind: str = "identity"

    @property
    def dim(self) -> int:
        return len(self.entries)

    def column(self, j: int) -> list[Expression]:
        return [row[j] for row in self.entries]

    def apply(self, vector: Sequence[object]) -> list[Expression]:
        vec = [Expression.coerce(v) for v in vector]
        return [sum((e * v for e, v in zip(row, vec) if v), ZERO) for row in self.entries]

    def at(self, value: object) -> AdjointMatrix:
        """Substitute the parameter (by another linear expression or zero)."""
        value = Expression.coerce(value)
        sub = {Sym(self.parameter): value}
        rows = tuple(tuple(substitute(e, sub, check_cycles=False) for e in row) for row in self.entries)
        return AdjointMatrix(self.index, rows, self.parameter, self.kind)

    def rational(self) -> linalg.Matrix:
        """Entries as rationals; only valid once the parameter is specialized."""
        out = []
        for row in self.entries:
            if not all(e.is_constant() for e in row):
                raise ValueError("adjoint matrix still depends on its parameter")
            out.append([e.constant_value() for e in row])
        return out

    def compose(self, other: AdjointMatrix) -> list[list[Expression]]:
        """Matrix product ``self * other``."""
        m = self.dim
        return [
            [sum((self.entries[i][k] * other.entries[k][j] for k in range(m)), ZERO) for j in range(m)]
            for i in range(m)
        ]


def _eigen_decomposition(M: linalg.Matrix) -> list[tuple[Fraction, linalg.Matrix]]:
    """Pairs ``(lambda, P_lambda)`` of rational eigenvalues and spectral projectors."""
    n = len(M)
    roots, rest = linalg.rational_roots(linalg.charpoly(M))
    if len(rest) > 1:
        raise UnsupportedAlgebra(
            "adjoint matrix has eigenvalues outside the rationals "
            f"(irreducible factor with coefficients {[str(c) for c in rest]})"
        )
    bases: list[tuple[Fraction, list[list[Fraction]]]] = []
    for lam in sorted(roots):
        shifted = [[M[i][j] - (lam if i == j else 0) for j in range(n)] for i in range(n)]
        gen = linalg.nullspace(linalg.matpow(shifted, roots[lam]))
        bases.append((lam, gen))
    V = linalg.transpose([v for _, gen in bases for v in gen])
    Vinv = linalg.inverse(V)
    out = []
    offset = 0
    for lam, gen in bases:
        sel = [[Fraction(int(i == j and offset <= i < offset + len(gen))) for j in range(n)] for i in range(n)]
        out.append((lam, linalg.matmul(linalg.matmul(V, sel), Vinv)))
        offset += len(gen)
    return out


def exponential(M: linalg.Matrix, parameter: str = "s") -> tuple[tuple[Expression, ...], ...]:
    """Exact ``exp(s M)`` for a rational matrix with rational spectrum."""
    n = len(M)
    parts = _eigen_decomposition(M)
    N = [row[:] for row in M]
    for lam, P in parts:
        N = linalg.add(N, linalg.scale(P, -lam))
    s = Expression.of(Sym(parameter))
    result = [[ZERO] * n for _ in range(n)]
    power = linalg.identity(n)
    for k in range(n):
        if k:
            power = linalg.matmul(power, N)
            if linalg.is_zero(power):
                break
        sk = s**k * Fraction(1, factorial(k)) if k else ONE
        for lam, P in parts:
            block = linalg.matmul(P, power)
            weight = sk * exp_of({parameter: lam})
            for i in range(n):
                for j in range(n):
                    if block[i][j]:
                        result[i][j] = result[i][j] + weight * block[i][j]
    return tuple(tuple(row) for row in result)


def adjoint_matrix(alg: LieAlgebraPresentation, i: int, parameter: str = "s") -> AdjointMatrix:
    """``Ad(exp(s Y_i)) = exp(-s ad Y_i)`` (0-based ``i``)."""
    A = alg.ad(i)
    M = linalg.scale(A, Fraction(-1))
    entries = exponential(M, parameter)
    if linalg.is_zero(M):
        kind = "identity"
    elif any(isinstance(atom, Exp) for row in entries for e in row for atom in e.atoms()):
        kind = "scale"
    else:
        kind = "shift"
    return AdjointMatrix(i, entries, parameter, kind)


def adjoint_table(alg: LieAlgebraPresentation, parameter: str = "s") -> list[list[list[Expression]]]:
    """Entry ``(i, j)`` is the coefficient column of ``Ad(exp(s Y_i)) Y_j``."""
    table = []
    for i in range(alg.dim):
        Ad = adjoint_matrix(alg, i, parameter)
        table.append([Ad.column(j) for j in range(alg.dim)])
    return table


def truncated_series(alg: LieAlgebraPresentation, i: int, parameter: str = "s") -> list[list[Expression]]:
    """``sum_k (-s)^k ad(Y_i)^k / k!`` summed until the powers vanish.

    Agrees with :func:`adjoint_matrix` when ``ad Y_i`` is nilpotent.
    """
    A = alg.ad(i)
    n = alg.dim
    s = Expression.of(Sym(parameter))
    result = [[Expression.const(int(r == c)) for c in range(n)] for r in range(n)]
    power = linalg.identity(n)
    for k in range(1, n + 1):
        power = linalg.matmul(power, A)
        if linalg.is_zero(power):
            return result
        weight = (-s) ** k * Fraction(1, factorial(k))
        for r in range(n):
            for c in range(n):
                if power[r][c]:
                    result[r][c] = result[r][c] + weight * power[r][c]
    raise UnsupportedAlgebra(f"ad {alg.names[i]} is not nilpotent")
