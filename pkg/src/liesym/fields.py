"""First-order differential operators with expression coefficients."""

from __future__ import annotations

from collections.abc import Iterable, Mapping, Sequence
from fractions import Fraction

from .expr import ZERO, Expression, Sym, SymbolTable, differentiate
from .expr.render import render


class VectorField:
    """``sum_k coeff_k * d/d(coord_k)`` on an ordered coordinate list.

    Coordinates not mentioned have coefficient zero.  The coordinate order is
    part of the field's identity and fixes its rendering order.
    """

    __slots__ = ("coords", "_coeffs")

    def __init__(self, coords: Sequence[str], coefficients: Mapping[str, object] | None = None):
        self.coords = tuple(coords)
        coeffs: dict[str, Expression] = {}
        for name, value in (coefficients or {}).items():
            if name not in self.coords:
                raise ValueError(f"{name} is not one of the coordinates {self.coords}")
            value = Expression.coerce(value)
            if value:
                coeffs[name] = value
        self._coeffs = coeffs

    @classmethod
    def parse(cls, coords: Sequence[str], coefficients: Mapping[str, str], table: SymbolTable) -> VectorField:
        return cls(coords, {k: table.parse(v) for k, v in coefficients.items()})

    def __getitem__(self, name: str) -> Expression:
        if name not in self.coords:
            raise KeyError(name)
        return self._coeffs.get(name, ZERO)

    def items(self) -> list[tuple[str, Expression]]:
        return [(c, self._coeffs[c]) for c in self.coords if c in self._coeffs]

    def is_zero(self) -> bool:
        return not self._coeffs

    def apply(self, e: Expression) -> Expression:
        """The derivation ``X(e)``."""
        total = ZERO
        for name, coeff in self._coeffs.items():
            d = differentiate(e, Sym(name))
            if d:
                total = total + coeff * d
        return total

    def restrict(self, coords: Sequence[str]) -> VectorField:
        """Drop every direction not in ``coords`` (a projection)."""
        return VectorField(coords, {c: v for c, v in self._coeffs.items() if c in coords})

    def _check(self, other: VectorField) -> None:
        if self.coords != other.coords:
            raise ValueError(f"coordinate mismatch: {self.coords} vs {other.coords}")

    def __add__(self, other: VectorField) -> VectorField:
        self._check(other)
        return VectorField(self.coords, {c: self[c] + other[c] for c in self.coords})

    def __sub__(self, other: VectorField) -> VectorField:
        return self + (-other)

    def __neg__(self) -> VectorField:
        return VectorField(self.coords, {c: -v for c, v in self._coeffs.items()})

    def __mul__(self, k: object) -> VectorField:
        return VectorField(self.coords, {c: v * k for c, v in self._coeffs.items()})

    __rmul__ = __mul__

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, VectorField)
            and self.coords == other.coords
            and self._coeffs == other._coeffs
        )

    def __hash__(self) -> int:
        return hash((self.coords, frozenset(self._coeffs.items())))

    def __repr__(self) -> str:
        return f"VectorField({render_field(self)!r})"

    def __str__(self) -> str:
        return render_field(self)


def render_field(X: VectorField) -> str:
    """Text form such as ``(t + 1)*d_t + u*d_u - 2*f*d_f``."""
    pieces = []
    for name, coeff in X.items():
        if coeff == 1:
            piece = f"d_{name}"
        elif coeff == -1:
            piece = f"-d_{name}"
        elif coeff.is_single_term():
            piece = f"{render(coeff)}*d_{name}"
        else:
            piece = f"({render(coeff)})*d_{name}"
        pieces.append(piece)
    if not pieces:
        return "0"
    out = pieces[0]
    for p in pieces[1:]:
        out += f" - {p[1:]}" if p.startswith("-") else f" + {p}"
    return out


def combination(fields: Sequence[VectorField], coeffs: Iterable[object]) -> VectorField:
    coeffs = list(coeffs)
    if len(coeffs) != len(fields):
        raise ValueError("coefficient count does not match the number of fields")
    total = VectorField(fields[0].coords)
    for X, c in zip(fields, coeffs):
        if c:
            total = total + X * (c if isinstance(c, Expression) else Fraction(c))
    return total
