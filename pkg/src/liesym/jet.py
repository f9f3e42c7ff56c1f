"""Jet-space bookkeeping: total derivatives, characteristics, prolongation."""

from __future__ import annotations

from dataclasses import dataclass

from .expr import ZERO, Expression, ExpressionError, Jet, Sym, differentiate
from .fields import VectorField


class JetOrderError(ExpressionError):
    pass


class JetSpace:
    """One dependent variable over ordered independent variables.

    >>> J = JetSpace()
    >>> J.coordinate("tx")
    Jet<u_xt>
    """

    def __init__(self, independents: tuple[str, ...] = ("x", "t"), dependent: str = "u", order_cap: int = 4):
        if order_cap < 3:
            raise ValueError("order cap must be at least 3")
        self.independents = tuple(independents)
        self.dependent = dependent
        self.order_cap = order_cap

    def coordinate(self, letters: str) -> Jet:
        """Canonical jet coordinate; raises past the order cap."""
        counts = dict.fromkeys(self.independents, 0)
        for ch in letters:
            if ch not in counts:
                raise ExpressionError(f"{self.dependent} does not depend on {ch!r}")
            counts[ch] += 1
        index = "".join(v * counts[v] for v in self.independents)
        if len(index) > self.order_cap:
            raise JetOrderError(
                f"{self.dependent}_{index} exceeds the jet order cap {self.order_cap}"
            )
        return Jet(self.dependent, index)

    def var(self, letters: str = "") -> Expression:
        """``u`` itself for empty ``letters``, otherwise the jet coordinate."""
        if not letters:
            return Expression.of(Sym(self.dependent))
        return Expression.of(self.coordinate(letters))

    def owns(self, jet: Jet) -> bool:
        return jet.dep == self.dependent

    def total_derivative(self, e: Expression, v: str) -> Expression:
        """``D_v e``: the partial in ``v`` plus the chain through every jet of ``u``."""
        if v not in self.independents:
            raise ExpressionError(f"{v} is not an independent variable")
        result = differentiate(e, Sym(v))
        if self.dependent in e.free_names():
            du = differentiate(e, Sym(self.dependent))
            if du:
                result = result + self.var(v) * du
        for jet in sorted((j for j in e.jets() if self.owns(j)), key=lambda j: j.key):
            dj = differentiate(e, jet)
            if dj:
                result = result + Expression.of(self.coordinate(jet.index + v)) * dj
        return result

    def characteristic(self, X: VectorField) -> Characteristic:
        xi1, xi2, phi = _components(X, self)
        x, t = self.independents
        Q = phi - xi1 * self.var(x) - xi2 * self.var(t)
        return Characteristic(X, Q)

    def prolong2(self, X: VectorField) -> ProlongedField:
        xi1, xi2, phi = _components(X, self)
        x, t = self.independents
        D = self.total_derivative
        ux, ut = self.var(x), self.var(t)
        uxx, uxt = self.var(x + x), self.var(x + t)
        Dx_xi1, Dx_xi2 = D(xi1, x), D(xi2, x)
        Dt_xi1, Dt_xi2 = D(xi1, t), D(xi2, t)
        phi_x = D(phi, x) - ux * Dx_xi1 - ut * Dx_xi2
        phi_t = D(phi, t) - ux * Dt_xi1 - ut * Dt_xi2
        phi_xx = D(phi_x, x) - uxx * Dx_xi1 - uxt * Dx_xi2
        phi_xt = D(phi_x, t) - uxx * Dt_xi1 - uxt * Dt_xi2
        return ProlongedField(X, phi_x, phi_t, phi_xx, phi_xt)


def _components(X: VectorField, J: JetSpace) -> tuple[Expression, Expression, Expression]:
    x, t = J.independents
    parts = tuple(X[c] if c in X.coords else ZERO for c in (x, t, J.dependent))
    for p in parts:
        if any(J.owns(j) for j in p.jets()):
            raise ExpressionError(f"vector field coefficient {p} contains a jet coordinate")
    return parts


@dataclass(frozen=True)
class Characteristic:
    field: VectorField
    Q: Expression


@dataclass(frozen=True)
class ProlongedField:
    """Second-prolongation coefficients; build with :func:`prolong2`."""

    base: VectorField
    phi_x: Expression
    phi_t: Expression
    phi_xx: Expression
    phi_xt: Expression


DEFAULT_JET = JetSpace()


def total_derivative(e: Expression, v: str, jet: JetSpace = DEFAULT_JET) -> Expression:
    return jet.total_derivative(e, v)


def characteristic(X: VectorField, jet: JetSpace = DEFAULT_JET) -> Characteristic:
    return jet.characteristic(X)


def prolong2(X: VectorField, jet: JetSpace = DEFAULT_JET) -> ProlongedField:
    return jet.prolong2(X)
