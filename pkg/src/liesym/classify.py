"""Projections, invariants and the verified classification table.

Each subalgebra representative is projected to ``(x, u, f, g)``.  Invariants
of the projection give the coefficient forms ``f``, ``g`` in terms of
arbitrary ``Phi``, ``Psi``; the ``(t, x, u)`` projections of the
representatives in the same group are the candidate additional operators.
Every candidate is checked by its exact symmetry residual.  When a
candidate fails, the row is rebuilt from the equivalence lift of the
operators and the failure is kept as part of the report.
"""

from __future__ import annotations

import json
from collections.abc import Sequence
from dataclasses import dataclass, field
from fractions import Fraction

from .determining import EQUATION_COORDS, NoEquivalenceLift, equivalence_lift, symmetry_residual
from .expr import ONE, ZERO, Expression, ExpressionError, Sym, apply_function, differentiate, exp_of
from .expr.render import render, render_latex
from .fields import VectorField, render_field
from .lie_algebra import LieAlgebraPresentation

PROJECTION_COORDS = ("x", "u", "f", "g")
OPERATOR_COORDS = ("t", "x", "u")


class UnsupportedOperator(ExpressionError):
    pass


# ---------------------------------------------------------------------------
# projection


@dataclass(frozen=True)
class ProjectedOperator:
    """A field on ``(x, u, f, g)`` scaled to a canonical representative."""

    field: VectorField
    scale: Fraction

    def __str__(self) -> str:
        return render_field(self.field)


def _lead(X: VectorField) -> Fraction | None:
    for c in ("x", "u"):
        e = X[c]
        if not e:
            continue
        if c == "u":
            k = e.coefficient(((Sym("u"), 1),))
            if k:
                return k
        return e.terms()[0][1]
    return None


def project(Y: VectorField, canonical: bool = True) -> ProjectedOperator | None:
    """Restriction of ``Y`` to ``(x, u, f, g)``; ``None`` when it has no ``x`` or ``u`` part.

    With ``canonical`` the result is rescaled so that the ``d_x`` coefficient
    (or failing that the leading ``d_u`` coefficient) is one.
    """
    Z = Y.restrict(PROJECTION_COORDS)
    lead = _lead(Z)
    if lead is None:
        return None
    if not canonical:
        return ProjectedOperator(Z, Fraction(1))
    k = 1 / lead
    return ProjectedOperator(Z * k, k)


def operator_part(Y: VectorField) -> VectorField:
    """Restriction of ``Y`` to ``(t, x, u)``."""
    return Y.restrict(OPERATOR_COORDS)


# ---------------------------------------------------------------------------
# invariants


def _constant(e: Expression, what: str) -> Fraction:
    if not e.is_constant():
        raise UnsupportedOperator(f"{what} must be a rational constant, got {render(e)}")
    return e.constant_value()


def _linear(e: Expression, var: str, what: str) -> tuple[Fraction, Fraction]:
    """``(slope, offset)`` when ``e = slope * var + offset`` with rational constants."""
    v = Expression.of(Sym(var))
    slope = _constant(differentiate(e, Sym(var)), what)
    offset = _constant(e - v * slope, what)
    return slope, offset


@dataclass(frozen=True)
class InvariantBasis:
    """Functionally independent invariants ``lam``, ``I_f``, ``I_g`` of ``Z``.

    ``I_f = f * weight_f`` and ``I_g = g * weight_g``; the invariant surface
    ``I_f = Phi(lam)``, ``I_g = Psi(lam)`` gives ``f_form`` and ``g_form``.
    """

    Z: VectorField
    lam: Expression
    weight_f: Expression
    weight_g: Expression

    @property
    def I_f(self) -> Expression:
        return Expression.of(Sym("f")) * self.weight_f

    @property
    def I_g(self) -> Expression:
        return Expression.of(Sym("g")) * self.weight_g

    @property
    def f_form(self) -> Expression:
        return apply_function("Phi", ("z",), self.lam) * self.weight_f.inverse()

    @property
    def g_form(self) -> Expression:
        return apply_function("Psi", ("z",), self.lam) * self.weight_g.inverse()

    def annihilated(self) -> bool:
        return not any(self.Z.apply(I) for I in (self.lam, self.I_f, self.I_g))

    def jacobian(self) -> list[list[Expression]]:
        return [[differentiate(I, Sym(c)) for c in PROJECTION_COORDS] for I in (self.lam, self.I_f, self.I_g)]

    def independent(self) -> bool:
        """Some 3x3 minor of the Jacobian in ``(x, u, f, g)`` is nonzero."""
        J = self.jacobian()
        for skip in range(4):
            cols = [c for c in range(4) if c != skip]
            M = [[row[c] for c in cols] for row in J]
            det = (
                M[0][0] * (M[1][1] * M[2][2] - M[1][2] * M[2][1])
                - M[0][1] * (M[1][0] * M[2][2] - M[1][2] * M[2][0])
                + M[0][2] * (M[1][0] * M[2][1] - M[1][1] * M[2][0])
            )
            if det:
                return True
        return False


def invariants(Z: VectorField) -> InvariantBasis:
    """Invariants of ``alpha d_x + (beta u + beta0) d_u + gamma f d_f + delta g d_g``."""
    if Z.coords != PROJECTION_COORDS:
        Z = Z.restrict(PROJECTION_COORDS)
    x, u = Expression.of(Sym("x")), Expression.of(Sym("u"))
    alpha = _constant(Z["x"], "d_x coefficient")
    beta, beta0 = _linear(Z["u"], "u", "d_u coefficient")
    gamma, gf0 = _linear(Z["f"], "f", "d_f coefficient")
    delta, gg0 = _linear(Z["g"], "g", "d_g coefficient")
    if gf0 or gg0:
        raise UnsupportedOperator("d_f and d_g coefficients must be homogeneous in f and g")

    if alpha:
        if beta:
            lam = (u + beta0 / beta) * exp_of({"x": -beta / alpha})
        else:
            lam = u - x * (beta0 / alpha)
        wf, wg = exp_of({"x": -gamma / alpha}), exp_of({"x": -delta / alpha})
    elif beta:
        if beta0:
            raise UnsupportedOperator("d_u coefficient beta*u + beta0 with beta0 != 0 needs a shifted power")
        lam = x
        wf, wg = _power(u, -gamma / beta), _power(u, -delta / beta)
    elif beta0:
        lam = x
        wf, wg = exp_of({"u": -gamma / beta0}), exp_of({"u": -delta / beta0})
    else:
        raise UnsupportedOperator(f"{render_field(Z)} has no x or u component")
    basis = InvariantBasis(Z, lam, wf, wg)
    if not basis.annihilated():
        raise UnsupportedOperator(f"invariants of {render_field(Z)} failed the annihilation check")
    return basis


def _power(base: Expression, k: Fraction) -> Expression:
    if k.denominator != 1:
        raise UnsupportedOperator(f"invariant needs the non-integer power {k}")
    return base ** int(k)


# ---------------------------------------------------------------------------
# rows


@dataclass(frozen=True)
class Verification:
    operator: VectorField
    residual: Expression

    @property
    def ok(self) -> bool:
        return not self.residual


def verify(operators: Sequence[VectorField], f: Expression, g: Expression) -> list[Verification]:
    out = []
    for X in operators:
        Xe = VectorField(EQUATION_COORDS, {c: X[c] for c in OPERATOR_COORDS})
        out.append(Verification(X, symmetry_residual(Xe, f, g)))
    return out


@dataclass
class ClassificationRow:
    """One row: projection, invariants, and verified additional operators.

    ``plain_Z``/``plain_basis``/``plain_checks`` describe the plain
    projection.  When some operator fails there, ``Z`` is the projection
    of the equivalence lift and ``checks`` are redone against its forms.
    """

    number: int
    members: tuple[int, ...]
    plain_Z: VectorField
    plain_basis: InvariantBasis
    plain_checks: list[Verification]
    Z: VectorField
    basis: InvariantBasis
    operators: list[VectorField]
    checks: list[Verification]
    repaired: bool = False

    @property
    def verified(self) -> bool:
        return all(v.ok for v in self.checks)

    @property
    def invariant(self) -> Expression:
        return self.basis.lam

    @property
    def f(self) -> Expression:
        return self.basis.f_form

    @property
    def g(self) -> Expression:
        return self.basis.g_form

    def cells(self) -> dict[str, str]:
        return {
            "Z": render_field(self.Z),
            "invariant": render(self.invariant),
            "f": render(self.f),
            "g": render(self.g),
            "operators": "[" + ", ".join(render_field(X) for X in self.operators) + "]",
        }


def classification_row(number: int, members: Sequence[int], Z: VectorField, operators: Sequence[VectorField]) -> ClassificationRow:
    """Verify ``operators`` on the ``Z``-invariant equation; lift and redo on failure."""
    operators = list(operators)
    basis = invariants(Z)
    checks = verify(operators, basis.f_form, basis.g_form)
    row = ClassificationRow(number, tuple(members), Z, basis, checks, Z, basis, operators, checks)
    if row.verified:
        return row
    lifted = []
    for X in operators:
        try:
            L = equivalence_lift(X)
        except NoEquivalenceLift:
            return row
        p = project(L)
        lifted.append(p.field if p is not None else None)
    if lifted[0] is None or any(p != lifted[0] for p in lifted):
        return row
    basis2 = invariants(lifted[0])
    checks2 = verify(operators, basis2.f_form, basis2.g_form)
    return ClassificationRow(number, tuple(members), Z, basis, checks, lifted[0], basis2, operators, checks2, True)


@dataclass(frozen=True)
class Delta:
    row: int
    column: str
    printed: str
    machine: str
    note: str = ""

    def describe(self) -> str:
        if self.column == "refuted":
            return f"row {self.row} refuted: {self.printed} leaves {self.machine}"
        out = f"row {self.row} {self.column}: printed {self.printed} | machine {self.machine}"
        return out + (f" ({self.note})" if self.note else "")


@dataclass
class ClassificationTable:
    rows: list[ClassificationRow]
    deltas: list[Delta] = field(default_factory=list)

    @property
    def verification_count(self) -> int:
        return sum(len(r.checks) for r in self.rows)

    @property
    def all_verified(self) -> bool:
        return all(r.verified for r in self.rows)


def group_representatives(fields: Sequence[VectorField]) -> list[tuple[VectorField, list[int]]]:
    """Distinct canonical projections in order of first appearance, with 1-based members."""
    groups: list[tuple[VectorField, list[int]]] = []
    for k, Y in enumerate(fields, 1):
        p = project(Y)
        if p is None:
            continue
        for Z, members in groups:
            if Z == p.field:
                members.append(k)
                break
        else:
            groups.append((p.field, [k]))
    return groups


def build_table(representatives: Sequence[VectorField], printed: Sequence[dict] | None = None) -> ClassificationTable:
    """Classification rows for the representative fields (on ``(t, x, u, f, g)``).

    ``printed`` holds the printed cells per row (keys ``Z``, ``invariant``,
    ``f``, ``g``, ``operators``, ``members``) and is used only for the
    delta report.
    """
    rows = []
    for n, (Z, members) in enumerate(group_representatives(representatives), 1):
        ops = [operator_part(representatives[k - 1]) for k in members]
        rows.append(classification_row(n, members, Z, ops))
    table = ClassificationTable(rows)
    if printed:
        table.deltas = table_deltas(table, printed)
    return table


def table_deltas(table: ClassificationTable, printed: Sequence[dict]) -> list[Delta]:
    out = []
    for row, cells in zip(table.rows, printed):
        machine = row.cells()
        for column in ("Z", "invariant", "f", "g", "operators"):
            if column in cells and cells[column] != machine[column]:
                note = ""
                if column == "Z" and row.repaired:
                    note = "projection is not an equivalence generator; lifted operator used"
                out.append(Delta(row.number, column, cells[column], machine[column], note))
        if "members" in cells and list(cells["members"]) != list(row.members):
            out.append(Delta(row.number, "members", str(list(cells["members"])), str(list(row.members))))
        if row.repaired:
            for v in row.plain_checks:
                if not v.ok:
                    out.append(
                        Delta(
                            row.number,
                            "refuted",
                            f"{render_field(v.operator)} on f = {render(row.plain_basis.f_form)}, g = {render(row.plain_basis.g_form)}",
                            f"residual {render(v.residual)}",
                        )
                    )
    return out


# ---------------------------------------------------------------------------
# renderers


def _equation(row: ClassificationRow) -> str:
    return f"u_t = {render(row.f)}*u_x^2 + {render(row.g)}*u_xx"


def render_text(table: ClassificationTable) -> str:
    lines = []
    for row in table.rows:
        c = row.cells()
        status = "verified" if row.verified else "FAILED"
        tag = " (lifted)" if row.repaired else ""
        lines.append(f"{row.number} | Z = {c['Z']}{tag} | invariant {c['invariant']} | {_equation(row)} | {c['operators']} | {status}")
    lines.append(f"verifications: {sum(v.ok for r in table.rows for v in r.checks)}/{table.verification_count} operators admitted")
    if table.deltas:
        lines.append("deltas against the printed table:")
        lines.extend(f"  {d.describe()}" for d in table.deltas)
    return "\n".join(lines) + "\n"


def _latex_field(X: VectorField) -> str:
    parts = []
    for name, coeff in X.items():
        d = f"\\partial_{name}"
        if coeff == 1:
            parts.append(f"+{d}")
        elif coeff == -1:
            parts.append(f"-{d}")
        else:
            body = render_latex(coeff)
            if not coeff.is_single_term():
                body = f"({body})"
            parts.append(body + d if body.startswith("-") else "+" + body + d)
    out = "".join(parts).lstrip("+")
    return out or "0"


def render_latex_table(table: ClassificationTable) -> str:
    lines = [
        "\\begin{tabular}{lllll}",
        "\\hline",
        "N & $Z$ & Invariant & Equation & Additional operator $X^{(2)}$ \\\\",
        "\\hline",
    ]
    for row in table.rows:
        eq = f"$u_t={render_latex(row.f)}\\,u_x^2+{render_latex(row.g)}\\,u_{{xx}}$"
        ops = ",\\; ".join(f"${_latex_field(X)}$" for X in row.operators)
        lines.append(f"{row.number} & ${_latex_field(row.Z)}$ & ${render_latex(row.invariant)}$ & {eq} & {ops} \\\\")
    lines += ["\\hline", "\\end{tabular}"]
    return "\n".join(lines) + "\n"


def table_json(table: ClassificationTable) -> str:
    doc = {
        "rows": [
            {
                "number": r.number,
                "members": list(r.members),
                **r.cells(),
                "lifted": r.repaired,
                "projection": render_field(r.plain_Z),
                "checks": [{"operator": render_field(v.operator), "residual": render(v.residual)} for v in r.checks],
            }
            for r in table.rows
        ],
        "verifications": table.verification_count,
        "deltas": [d.__dict__ for d in table.deltas],
    }
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"
