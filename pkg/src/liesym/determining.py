"""Determining functions for ``u_t = f(x,u) u_x^2 + g(x,u) u_xx``.

Two branches:

* the symmetry branch, where ``f`` and ``g`` are given functions of
  ``(x, u)`` and the question is whether a field on ``(x, t, u)`` is a
  point symmetry, and
* the equivalence branch, where ``f`` and ``g`` are extra coordinates and
  a field on ``(t, x, u, f, g)`` must map the whole class into itself.

Neither branch solves its determining system; both verify candidate
generators and report the collected coefficient equations.
"""

from __future__ import annotations

from collections.abc import Iterable
from dataclasses import dataclass
from fractions import Fraction

from .expr import (
    ZERO,
    Atom,
    Expression,
    ExpressionError,
    Jet,
    Monomial,
    Sym,
    SymbolTable,
    apply_function,
    collect,
    differentiate,
    monomial_expression,
    substitute,
)
from .expr.render import render
from .fields import VectorField
from .jet import DEFAULT_JET, JetSpace

EQUATION_COORDS = ("x", "t", "u")
EQUIVALENCE_COORDS = ("t", "x", "u", "f", "g")


def equation_table() -> SymbolTable:
    """Symbols for the symmetry branch: ``f``, ``g`` are functions of ``(x,u)``."""
    return SymbolTable(
        dependents={"u": ("x", "t")},
        parameters=["s"],
        constants=["c1", "c2", "c3", "c4", "b0", "c", "d", "alpha", "beta", "gamma"],
        functions={
            "f": ("x", "u"),
            "g": ("x", "u"),
            "Phi": ("z",),
            "Psi": ("z",),
            "a": ("x",),
            "b": ("x",),
            "xi1": ("x", "t", "u"),
            "xi2": ("x", "t", "u"),
            "phi": ("x", "t", "u"),
        },
        jet_order_cap=DEFAULT_JET.order_cap,
    )


def equivalence_table() -> SymbolTable:
    """Symbols for the equivalence branch: ``f``, ``g`` are coordinates."""
    return SymbolTable(
        dependents={"u": ("x", "t"), "f": ("x", "t", "u"), "g": ("x", "t", "u")},
        parameters=["s"],
        constants=["c1", "c2", "c3", "c4", "b0", "c", "d", "alpha", "beta", "gamma"],
        functions={
            "a": ("x",),
            "b": ("x",),
            "Phi": ("z",),
            "Psi": ("z",),
            "xi1": ("x", "t", "u"),
            "xi2": ("x", "t", "u"),
            "phi": ("x", "t", "u"),
            "mu": ("x", "t", "u", "f", "g"),
            "nu": ("x", "t", "u", "f", "g"),
        },
        jet_order_cap=DEFAULT_JET.order_cap,
    )


F_SYMBOLIC = apply_function("f", ("x", "u"), Sym("x"), Sym("u"))
G_SYMBOLIC = apply_function("g", ("x", "u"), Sym("x"), Sym("u"))


def generic_field() -> VectorField:
    """``xi1 d_x + xi2 d_t + phi d_u`` with undetermined coefficient functions."""
    args = (Sym("x"), Sym("t"), Sym("u"))
    formals = ("x", "t", "u")
    return VectorField(
        EQUATION_COORDS,
        {
            "x": apply_function("xi1", formals, *args),
            "t": apply_function("xi2", formals, *args),
            "u": apply_function("phi", formals, *args),
        },
    )


def as_equation_field(X: VectorField) -> VectorField:
    """The ``(x, t, u)`` part of a field; ``d_f``, ``d_g`` parts are dropped."""
    return VectorField(EQUATION_COORDS, {c: X[c] for c in EQUATION_COORDS if c in X.coords})


@dataclass(frozen=True)
class DeterminingSystem:
    """Collected coefficient equations of one or more residuals.

    ``residuals`` are ``(label, expression)`` pairs; ``equations`` are
    ``(label, monomial, coefficient)`` triples with nonzero coefficients.
    """

    residuals: tuple[tuple[str, Expression], ...]
    equations: tuple[tuple[str, Monomial, Expression], ...]

    @classmethod
    def from_residuals(cls, residuals: Iterable[tuple[str, Expression]], basis: Iterable[Atom] | None = None) -> DeterminingSystem:
        residuals = tuple(residuals)
        equations = []
        for label, r in residuals:
            atoms = set(basis) if basis is not None else {a for a in r.all_atoms() if isinstance(a, Jet)}
            for mono, coeff in collect(r, atoms).items():
                equations.append((label, mono, coeff))
        return cls(residuals, tuple(equations))

    def is_empty(self) -> bool:
        return not self.equations

    def __len__(self) -> int:
        return len(self.equations)

    def as_dict(self, label: str | None = None) -> dict[Monomial, Expression]:
        return {m: c for lab, m, c in self.equations if label is None or lab == label}

    def reconstruct(self, label: str) -> Expression:
        total = ZERO
        for lab, mono, coeff in self.equations:
            if lab == label:
                total = total + monomial_expression(mono) * coeff
        return total

    def lines(self) -> list[str]:
        labelled = len({lab for lab, _ in self.residuals}) > 1
        out = []
        for lab, mono, coeff in self.equations:
            key = render(monomial_expression(mono))
            prefix = f"[{lab}] " if labelled else ""
            out.append(f"{prefix}{key}: {render(coeff)} = 0")
        return out


# ---------------------------------------------------------------------------
# symmetry branch


def _check_class_function(name: str, e: Expression, jet: JetSpace) -> None:
    bad = e.free_names() & {jet.independents[1]}
    if bad or e.jets():
        raise ExpressionError(f"{name} = {e} must depend on (x, u) only")


def symmetry_residual(
    X: VectorField,
    f: Expression | None = None,
    g: Expression | None = None,
    jet: JetSpace = DEFAULT_JET,
) -> Expression:
    """Determining function of ``X`` for the equation with coefficients ``f``, ``g``.

    Computes ``phi^t - (f_x xi1 + f_u phi) u_x^2 - (g_x xi1 + g_u phi) u_xx
    - 2 f phi^x u_x - g phi^xx`` and then eliminates ``u_t`` using the
    equation.  The result is zero exactly when ``X`` is admitted (for
    ``g != 0``; a true symmetry has ``xi2 = xi2(t)`` so no ``u_xt`` term
    survives).
    """
    f = F_SYMBOLIC if f is None else Expression.coerce(f)
    g = G_SYMBOLIC if g is None else Expression.coerce(g)
    _check_class_function("f", f, jet)
    _check_class_function("g", g, jet)
    x, t = jet.independents
    u = Sym(jet.dependent)
    X = as_equation_field(X)
    xi1, phi = X[x], X[jet.dependent]
    P = jet.prolong2(X)
    ux, uxx = jet.var(x), jet.var(x + x)
    R = (
        P.phi_t
        - (differentiate(f, Sym(x)) * xi1 + differentiate(f, u) * phi) * ux**2
        - (differentiate(g, Sym(x)) * xi1 + differentiate(g, u) * phi) * uxx
        - 2 * f * P.phi_x * ux
        - g * P.phi_xx
    )
    return substitute(R, {jet.coordinate(t): f * ux**2 + g * uxx})


def determining_system(
    X: VectorField,
    f: Expression | None = None,
    g: Expression | None = None,
    jet: JetSpace = DEFAULT_JET,
) -> DeterminingSystem:
    """Coefficients of every jet monomial in :func:`symmetry_residual`."""
    R = symmetry_residual(X, f, g, jet)
    return DeterminingSystem.from_residuals([("residual", R)], [j for j in R.all_atoms() if isinstance(j, Jet) and jet.owns(j)])


# ---------------------------------------------------------------------------
# equivalence branch


@dataclass(frozen=True)
class EquivalenceResiduals:
    main: Expression
    ft: Expression
    gt: Expression

    def vanishes(self) -> bool:
        return not (self.main or self.ft or self.gt)

    def system(self) -> DeterminingSystem:
        basis = {a for r in (self.main, self.ft, self.gt) for a in r.all_atoms() if isinstance(a, Jet)}
        return DeterminingSystem.from_residuals(
            [("main", self.main), ("f_t", self.ft), ("g_t", self.gt)], basis
        )


def _equivalence_parts(Y: VectorField) -> tuple[Expression, ...]:
    for c in EQUIVALENCE_COORDS:
        if c not in Y.coords:
            raise ExpressionError(f"equivalence field needs a {c!r} direction")
    xi1, xi2, phi, mu, nu = (Y[c] for c in ("x", "t", "u", "f", "g"))
    for name, e in (("xi1", xi1), ("xi2", xi2), ("phi", phi)):
        if e.free_names() & {"f", "g"} or e.jets():
            raise ExpressionError(f"{name} = {e} must depend on (x, t, u) only")
    for name, e in (("mu", mu), ("nu", nu)):
        if e.jets():
            raise ExpressionError(f"{name} = {e} must not contain jet coordinates")
    return xi1, xi2, phi, mu, nu


def equivalence_residuals(Y: VectorField, jet: JetSpace = DEFAULT_JET) -> EquivalenceResiduals:
    """Invariance conditions for a field on ``(t, x, u, f, g)``.

    ``main`` is ``phi^t - 2 f u_x phi^x - g phi^xx - mu u_x^2 - nu u_xx``
    with ``u_t`` eliminated.  ``ft`` and ``gt`` are the ``t``-prolongation
    coefficients of ``mu`` and ``nu`` with ``f`` and ``g`` treated as
    dependent on ``(x, t, u)``; the conditions ``f_t = g_t = 0`` are applied
    after prolongation.
    """
    xi1, xi2, phi, mu, nu = _equivalence_parts(Y)
    x, t = jet.independents
    f, g = Expression.of(Sym("f")), Expression.of(Sym("g"))
    P = jet.prolong2(as_equation_field(Y))
    ux, uxx = jet.var(x), jet.var(x + x)
    main = P.phi_t - 2 * f * ux * P.phi_x - g * P.phi_xx - mu * ux**2 - nu * uxx
    main = substitute(main, {jet.coordinate(t): f * ux**2 + g * uxx})

    fj = {v: Jet("f", v) for v in ("x", "t", "u")}
    gj = {v: Jet("g", v) for v in ("x", "t", "u")}

    def Dt(e: Expression) -> Expression:
        # total t-derivative on the extended space where f, g depend on (x, t, u)
        return (
            differentiate(e, Sym(t))
            + Expression.of(fj["t"]) * differentiate(e, Sym("f"))
            + Expression.of(gj["t"]) * differentiate(e, Sym("g"))
        )

    def t_coefficient(eta: Expression, d: dict[str, Jet]) -> Expression:
        return (
            Dt(eta)
            - Expression.of(d["x"]) * Dt(xi1)
            - Expression.of(d["t"]) * Dt(xi2)
            - Expression.of(d["u"]) * Dt(phi)
        )

    static = {fj["t"]: 0, gj["t"]: 0}
    ft = substitute(t_coefficient(mu, fj), static)
    gt = substitute(t_coefficient(nu, gj), static)
    return EquivalenceResiduals(main, ft, gt)


class NoEquivalenceLift(ExpressionError):
    pass


def equivalence_lift(X: VectorField, jet: JetSpace = DEFAULT_JET) -> VectorField:
    """Extend a field on ``(x, t, u)`` by the unique ``mu d_f + nu d_g`` that
    makes it an equivalence generator, or raise :class:`NoEquivalenceLift`.

    With ``mu = nu = 0`` the ``u_x^2`` and ``u_xx`` coefficients of the main
    residual are exactly the required ``mu`` and ``nu``; every other
    coefficient must already vanish.
    """
    base = VectorField(EQUIVALENCE_COORDS, {c: X[c] for c in ("t", "x", "u") if c in X.coords})
    res = equivalence_residuals(base, jet)
    x = jet.independents[0]
    ux2 = ((jet.coordinate(x), 2),)
    uxx = ((jet.coordinate(x + x), 1),)
    coeffs = collect(res.main, [a for a in res.main.all_atoms() if isinstance(a, Jet)])
    mu = coeffs.pop(ux2, ZERO)
    nu = coeffs.pop(uxx, ZERO)
    if coeffs:
        bad = "; ".join(f"{render(monomial_expression(m))}: {render(c)}" for m, c in coeffs.items())
        raise NoEquivalenceLift(f"{X} has no equivalence lift: {bad}")
    lifted = VectorField(EQUIVALENCE_COORDS, {**{c: base[c] for c in ("t", "x", "u")}, "f": mu, "g": nu})
    check = equivalence_residuals(lifted, jet)
    if not check.vanishes():
        raise NoEquivalenceLift(f"{X}: lifted field fails the f_t/g_t conditions")
    return lifted


# ---------------------------------------------------------------------------
# the printed equivalence family


def _unary(value: Expression | str | int | Fraction, table: SymbolTable) -> Expression:
    if isinstance(value, str):
        sym = table.get(value)
        if sym is not None and sym.arity == 1:
            return apply_function(value, sym.formals, Sym("x"))
        return table.parse(value)
    return Expression.coerce(value)


def printed_family(a, b, c1, c2, table: SymbolTable | None = None) -> VectorField:
    """The generator family as printed: ``xi1 = a``, ``xi2 = c1 t + c2``,
    ``phi = c1 u + b``, ``mu = -2 f (c1 - a)``, ``nu = -g (c1 - a')``."""
    table = table or equivalence_table()
    a, b = _unary(a, table), _unary(b, table)
    c1, c2 = _unary(c1, table), _unary(c2, table)
    t, u, f, g = (Expression.of(Sym(n)) for n in "tufg")
    return VectorField(
        EQUIVALENCE_COORDS,
        {
            "x": a,
            "t": c1 * t + c2,
            "u": c1 * u + b,
            "f": -2 * f * (c1 - a),
            "g": -g * (c1 - differentiate(a, Sym("x"))),
        },
    )


def check_equivalence_family(a, b, c1, c2, table: SymbolTable | None = None) -> DeterminingSystem:
    """Residual system of the printed family; empty iff it is exactly right."""
    return equivalence_residuals(printed_family(a, b, c1, c2, table)).system()


@dataclass(frozen=True)
class FamilyReport:
    """Machine reading of the generator family ``xi1 = a``, ``xi2 = c1 t + c2``,
    ``phi = c1 u + b``.

    ``mu`` and ``nu`` are the unique values forced by the main residual;
    ``constraints`` are the remaining coefficients (split by powers of ``f``
    and ``g``) that must vanish.  ``printed`` is the residual system of the
    printed ``mu``, ``nu``.
    """

    field: VectorField
    mu: Expression
    nu: Expression
    constraints: tuple[Expression, ...]
    printed: DeterminingSystem

    def lines(self, printed_mu: Expression | None = None, printed_nu: Expression | None = None,
              printed_constraint: Expression | None = None) -> list[str]:
        out = [f"machine mu = {render(self.mu)}", f"machine nu = {render(self.nu)}"]
        out += [f"machine constraint: {render(c)} = 0" for c in self.constraints]
        for name, printed, machine in (("mu", printed_mu, self.mu), ("nu", printed_nu, self.nu)):
            if printed is not None and printed != machine:
                out.append(f"DELTA {name}: printed {render(printed)} | machine {render(machine)}")
        if printed_constraint is not None and (printed_constraint,) != self.constraints:
            out.append(
                f"DELTA constraint: printed {render(printed_constraint)} = 0 | machine "
                + ", ".join(f"{render(c)} = 0" for c in self.constraints)
            )
        if self.printed.is_empty():
            out.append("printed family: residual system empty")
        else:
            out.append(f"printed family: {len(self.printed)} nonzero residual coefficient(s)")
            out += [f"  {line}" for line in self.printed.lines()]
        return out


def _split_fg(e: Expression) -> list[Expression]:
    return list(collect(e, [Sym("f"), Sym("g")]).values())


def family_report(a="a", b="b", c1="c1", c2="c2", table: SymbolTable | None = None) -> FamilyReport:
    table = table or equivalence_table()
    printed = printed_family(a, b, c1, c2, table)
    base = VectorField(EQUATION_COORDS, {c: printed[c] for c in EQUATION_COORDS})
    zero_lift = VectorField(EQUIVALENCE_COORDS, {c: base[c] for c in EQUATION_COORDS})
    main = equivalence_residuals(zero_lift).main
    x = DEFAULT_JET.independents[0]
    ux2 = ((DEFAULT_JET.coordinate(x), 2),)
    uxx = ((DEFAULT_JET.coordinate(x + x), 1),)
    coeffs = collect(main, [j for j in main.all_atoms() if isinstance(j, Jet)])
    mu, nu = coeffs.pop(ux2, ZERO), coeffs.pop(uxx, ZERO)
    found: list[Expression] = []
    for coeff in coeffs.values():
        found += _split_fg(coeff)
    lifted = VectorField(EQUIVALENCE_COORDS, {**{c: base[c] for c in EQUATION_COORDS}, "f": mu, "g": nu})
    rest = equivalence_residuals(lifted)
    for r in (rest.ft, rest.gt):
        for coeff in collect(r, [j for j in r.all_atoms() if isinstance(j, Jet)]).values():
            found += _split_fg(coeff)
    constraints: list[Expression] = []
    for c in found:
        c = c * (1 / c.terms()[-1][1])
        if c not in constraints:
            constraints.append(c)
    constraints.sort(key=lambda e: e.key)
    return FamilyReport(printed, mu, nu, tuple(constraints), check_equivalence_family(a, b, c1, c2, table))


def generic_equivalence_field() -> VectorField:
    """An equivalence field with undetermined ``xi1, xi2, phi, mu, nu``."""
    x, t, u, f, g = (Sym(n) for n in ("x", "t", "u", "f", "g"))
    return VectorField(
        EQUIVALENCE_COORDS,
        {
            "x": apply_function("xi1", ("x", "t", "u"), x, t, u),
            "t": apply_function("xi2", ("x", "t", "u"), x, t, u),
            "u": apply_function("phi", ("x", "t", "u"), x, t, u),
            "f": apply_function("mu", ("x", "t", "u", "f", "g"), x, t, u, f, g),
            "g": apply_function("nu", ("x", "t", "u", "f", "g"), x, t, u, f, g),
        },
    )
