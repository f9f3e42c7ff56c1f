"""Small exact linear algebra over ``Fraction``.

Matrices are lists of rows.  Everything here is exact; nothing is cached.
"""

from __future__ import annotations

from collections.abc import Sequence
from fractions import Fraction
from math import factorial, lcm


Matrix = list[list[Fraction]]


def frac_matrix(rows: Sequence[Sequence[object]]) -> Matrix:
    return [[Fraction(v) for v in row] for row in rows]


def identity(n: int) -> Matrix:
    return [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]


def zeros(n: int, m: int | None = None) -> Matrix:
    return [[Fraction(0)] * (n if m is None else m) for _ in range(n)]


def matmul(A: Matrix, B: Matrix) -> Matrix:
    Bt = list(zip(*B))
    return [[sum((a * b for a, b in zip(row, col)), Fraction(0)) for col in Bt] for row in A]


def matvec(A: Matrix, v: Sequence[Fraction]) -> list[Fraction]:
    return [sum((a * b for a, b in zip(row, v)), Fraction(0)) for row in A]


def add(A: Matrix, B: Matrix) -> Matrix:
    return [[a + b for a, b in zip(ra, rb)] for ra, rb in zip(A, B)]


def scale(A: Matrix, k: Fraction) -> Matrix:
    return [[a * k for a in row] for row in A]


def transpose(A: Matrix) -> Matrix:
    return [list(col) for col in zip(*A)]


def is_zero(A: Matrix) -> bool:
    return all(v == 0 for row in A for v in row)


def rref(A: Matrix) -> tuple[Matrix, list[int]]:
    """Reduced row echelon form and the pivot columns."""
    M = [row[:] for row in A]
    pivots: list[int] = []
    r = 0
    rows = len(M)
    cols = len(M[0]) if M else 0
    for c in range(cols):
        p = next((i for i in range(r, rows) if M[i][c] != 0), None)
        if p is None:
            continue
        M[r], M[p] = M[p], M[r]
        inv = 1 / M[r][c]
        M[r] = [v * inv for v in M[r]]
        for i in range(rows):
            if i != r and M[i][c] != 0:
                k = M[i][c]
                M[i] = [a - k * b for a, b in zip(M[i], M[r])]
        pivots.append(c)
        r += 1
        if r == rows:
            break
    return M, pivots


def rank(A: Matrix) -> int:
    return len(rref(A)[1]) if A else 0


def nullspace(A: Matrix) -> list[list[Fraction]]:
    """A basis of ``{v : A v = 0}``."""
    if not A:
        return []
    cols = len(A[0])
    R, pivots = rref(A)
    free = [c for c in range(cols) if c not in pivots]
    basis = []
    for fcol in free:
        v = [Fraction(0)] * cols
        v[fcol] = Fraction(1)
        for i, pc in enumerate(pivots):
            v[pc] = -R[i][fcol]
        basis.append(v)
    return basis


def solve(A: Matrix, b: Sequence[Fraction]) -> list[Fraction] | None:
    """One solution of ``A x = b`` (free variables zero) or ``None``."""
    cols = len(A[0])
    aug = [row[:] + [Fraction(v)] for row, v in zip(A, b)]
    R, pivots = rref(aug)
    if cols in pivots:
        return None
    x = [Fraction(0)] * cols
    for i, pc in enumerate(pivots):
        x[pc] = R[i][cols]
    return x


def inverse(A: Matrix) -> Matrix:
    n = len(A)
    aug = [row[:] + e for row, e in zip(A, identity(n))]
    R, pivots = rref(aug)
    if pivots[:n] != list(range(n)):
        raise ZeroDivisionError("matrix is singular")
    return [row[n:] for row in R]


def charpoly(A: Matrix) -> list[Fraction]:
    """Coefficients ``[1, c1, ..., cn]`` of ``det(lambda I - A)`` (Faddeev-LeVerrier)."""
    n = len(A)
    coeffs = [Fraction(1)]
    M = zeros(n)
    I = identity(n)
    for k in range(1, n + 1):
        M = add(matmul(A, M), scale(I, coeffs[-1]))
        AM = matmul(A, M)
        trace = sum((AM[i][i] for i in range(n)), Fraction(0))
        coeffs.append(-trace / k)
    return coeffs


def _divisors(n: int) -> list[int]:
    n = abs(n)
    small = [d for d in range(1, int(n**0.5) + 1) if n % d == 0]
    return sorted(set(small + [n // d for d in small]))


def poly_eval(coeffs: Sequence[Fraction], x: Fraction) -> Fraction:
    acc = Fraction(0)
    for c in coeffs:
        acc = acc * x + c
    return acc


def _deflate(coeffs: list[Fraction], root: Fraction) -> list[Fraction]:
    out = [coeffs[0]]
    for c in coeffs[1:-1]:
        out.append(c + out[-1] * root)
    return out


def rational_roots(coeffs: Sequence[Fraction]) -> tuple[dict[Fraction, int], list[Fraction]]:
    """Rational roots with multiplicity, plus the leftover factor without any.

    ``coeffs`` is highest degree first.  The leftover is ``[c]`` when the
    polynomial splits over the rationals.
    """
    poly = [Fraction(c) for c in coeffs]
    while len(poly) > 1 and poly[0] == 0:
        poly.pop(0)
    roots: dict[Fraction, int] = {}
    while len(poly) > 1 and poly[-1] == 0:
        roots[Fraction(0)] = roots.get(Fraction(0), 0) + 1
        poly.pop()
    changed = True
    while changed and len(poly) > 1:
        changed = False
        den = lcm(*(c.denominator for c in poly))
        ints = [int(c * den) for c in poly]
        for p in _divisors(ints[-1]):
            for q in _divisors(ints[0]):
                for r in (Fraction(p, q), Fraction(-p, q)):
                    if poly_eval(poly, r) == 0:
                        roots[r] = roots.get(r, 0) + 1
                        poly = _deflate(poly, r)
                        changed = True
                        break
                if changed:
                    break
            if changed:
                break
    return roots, poly


def matpow(A: Matrix, k: int) -> Matrix:
    out = identity(len(A))
    for _ in range(k):
        out = matmul(out, A)
    return out


def nilpotent_series(N: Matrix, s: Fraction) -> Matrix:
    """``sum_k s^k N^k / k!`` for nilpotent ``N``."""
    n = len(N)
    total = identity(n)
    power = identity(n)
    for k in range(1, n + 1):
        power = matmul(power, N)
        if is_zero(power):
            break
        total = add(total, scale(power, Fraction(s) ** k / factorial(k)))
    return total
