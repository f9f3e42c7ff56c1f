"""``liesym`` command line.

Exit codes: 0 success, 1 computed but differs from the fixtures, 2 algebra
error, 3 unsupported algebra, 64 usage or workspace error.
"""

from __future__ import annotations

import argparse
import json
import sys
from collections.abc import Sequence
from fractions import Fraction

from .classify import build_table, render_latex_table, render_text, table_json
from .determining import (
    EQUATION_COORDS,
    EQUIVALENCE_COORDS,
    determining_system,
    equation_table,
    equivalence_residuals,
    equivalence_table,
    family_report,
    generic_field,
    symmetry_residual,
)
from .expr import Expression, ExpressionError, Sym, substitute
from .expr.render import render, render_latex
from .fields import VectorField, render_field
from .fixtures import compare_adjoint, compare_commutators, printed_representatives
from .lie_algebra import (
    AlgebraError,
    LieAlgebraPresentation,
    UnsupportedAlgebra,
    adjoint_table,
    commutator_table,
    render_combination,
)
from .optimal import REPRESENTATIVES, normalize_paper, survey
from .workspace import Workspace, WorkspaceError, load_workspace

EXIT_OK, EXIT_DELTA, EXIT_ALGEBRA, EXIT_UNSUPPORTED, EXIT_USAGE = 0, 1, 2, 3, 64


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # argparse exits with 2 by default
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


# ---------------------------------------------------------------------------
# formatting helpers


def _grid(header: Sequence[str], rows: Sequence[Sequence[str]]) -> list[str]:
    widths = [max(len(r[k]) for r in [header, *rows]) for k in range(len(header))]
    fmt = lambda r: "  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip()  # noqa: E731
    return [fmt(header), fmt(["-" * w for w in widths]), *map(fmt, rows)]


def _latex_grid(names: Sequence[str], corner: str, cells: Sequence[Sequence[str]]) -> list[str]:
    head = " & ".join([corner, *(f"${n[0]}_{{{n[1:]}}}$" for n in names)])
    out = ["\\begin{tabular}{" + "l" * (len(names) + 1) + "}", "\\hline", head + " \\\\", "\\hline"]
    for n, row in zip(names, cells):
        out.append(" & ".join([f"${n[0]}_{{{n[1:]}}}$", *(f"${c}$" for c in row)]) + " \\\\")
    return out + ["\\hline", "\\end{tabular}"]


def _latex_combination(coeffs, names: Sequence[str], lead: int) -> str:
    order = [lead] + [k for k in range(len(names)) if k != lead]
    pieces = []
    for k in order:
        c = coeffs[k]
        if not c:
            continue
        sym = f"{names[k][0]}_{{{names[k][1:]}}}"
        if c == 1:
            body = sym
        elif c == -1:
            body = "-" + sym
        else:
            text = render_latex(c)
            body = f"{text}\\,{sym}" if c.is_single_term() else f"({text})\\,{sym}"
        pieces.append(body)
    if not pieces:
        return "0"
    out = pieces[0]
    for p in pieces[1:]:
        out += p if p.startswith("-") else "+" + p
    return out


def _emit(lines: Sequence[str]) -> None:
    sys.stdout.write("\n".join(lines) + "\n")


# ---------------------------------------------------------------------------
# commands


def cmd_commutators(ws: Workspace, args: argparse.Namespace) -> int:
    alg = ws.algebra()
    table = commutator_table(alg)
    cells = [[render_combination(alg.constants[i][j], alg.names) for j in range(alg.dim)] for i in range(alg.dim)]
    fixture = ws.fixture("commutators")
    cmp = compare_commutators(alg, fixture) if fixture else None
    if args.format == "json":
        doc = {
            "names": list(alg.names),
            "orientation": "entry (i, j) is [Yi, Yj]",
            "cells": cells,
            "fields": [[render_field(X) for X in row] for row in table],
            "fixture": None if cmp is None else {"passed": cmp.passed, "matches": cmp.matches, "total": cmp.total},
        }
        _emit([json.dumps(doc, indent=2, sort_keys=True)])
    elif args.format == "latex":
        latex_cells = [
            [_latex_combination([Expression.coerce(c) for c in alg.constants[i][j]], alg.names, j) for j in range(alg.dim)]
            for i in range(alg.dim)
        ]
        _emit(_latex_grid(alg.names, "$[\\,,\\,]$", latex_cells))
    else:
        lines = ["commutator table, entry (i, j) = [Yi, Yj]"]
        lines += _grid(["[ , ]", *alg.names], [[n, *row] for n, row in zip(alg.names, cells)])
        if cmp is not None:
            lines += cmp.lines()
        _emit(lines)
    return EXIT_OK if cmp is None or cmp.passed else EXIT_DELTA


def cmd_adjoint(ws: Workspace, args: argparse.Namespace) -> int:
    alg = ws.algebra()
    table = adjoint_table(alg)
    if args.at_zero:
        table = [[[substitute(e, {Sym("s"): 0}) for e in col] for col in row] for row in table]
    cells = [[render_combination(table[i][j], alg.names, lead=j) for j in range(alg.dim)] for i in range(alg.dim)]
    fixture = None if args.at_zero else ws.fixture("adjoint")
    cmp = compare_adjoint(alg, fixture) if fixture else None
    if args.format == "json":
        doc = {
            "names": list(alg.names),
            "orientation": "entry (i, j) is Ad(exp(s*Yi)) Yj",
            "parameter": "0" if args.at_zero else "s",
            "cells": cells,
            "fixture": None if cmp is None else {"passed": cmp.passed, "matches": cmp.matches, "total": cmp.total},
        }
        _emit([json.dumps(doc, indent=2, sort_keys=True)])
    elif args.format == "latex":
        latex_cells = [[_latex_combination(table[i][j], alg.names, j) for j in range(alg.dim)] for i in range(alg.dim)]
        _emit(_latex_grid(alg.names, "Ad", latex_cells))
    else:
        title = "adjoint table at s = 0" if args.at_zero else "adjoint table, entry (i, j) = Ad(exp(s*Yi)) Yj"
        lines = [title]
        lines += _grid(["Ad", *alg.names], [[n, *row] for n, row in zip(alg.names, cells)])
        if cmp is not None:
            lines += cmp.lines()
        _emit(lines)
    return EXIT_OK if cmp is None or cmp.passed else EXIT_DELTA


def _coefficient_pairs(items: Sequence[str] | None) -> dict[str, str]:
    out: dict[str, str] = {}
    for item in items or []:
        if "=" not in item:
            raise UsageError(f"--coeff expects DIRECTION=EXPR, got {item!r}")
        k, v = item.split("=", 1)
        out[k.strip()] = v
    return out


def _selected_field(ws: Workspace, args: argparse.Namespace, coords: Sequence[str], table) -> VectorField:
    if args.coeff:
        coeffs = _coefficient_pairs(args.coeff)
        bad = set(coeffs) - set(coords)
        if bad:
            raise UsageError(f"unknown direction(s) {', '.join(sorted(bad))}; use {', '.join(coords)}")
        return VectorField.parse(coords, coeffs, table)
    X = ws.field(args.field)
    return VectorField(coords, {c: X[c] for c in coords if c in X.coords})


def cmd_determine(ws: Workspace, args: argparse.Namespace) -> int:
    table = equation_table()
    if args.field == "generic":
        X = generic_field()
    else:
        X = _selected_field(ws, args, EQUATION_COORDS, table)
    f = table.parse(args.f) if args.f else None
    g = table.parse(args.g) if args.g else None
    R = symmetry_residual(X, f, g)
    system = determining_system(X, f, g)
    if args.format == "json":
        doc = {
            "field": render_field(X),
            "residual": render(R),
            "equations": [
                {"monomial": line.split(":", 1)[0], "coefficient": render(c)}
                for line, (_, _, c) in zip(system.lines(), system.equations)
            ],
        }
        _emit([json.dumps(doc, indent=2, sort_keys=True)])
    else:
        lines = [
            f"field: {render_field(X)}",
            f"f = {render(f) if f is not None else 'f(x,u)'}",
            f"g = {render(g) if g is not None else 'g(x,u)'}",
            f"residual: {render(R)}",
            f"equations: {len(system)}",
        ]
        lines += [f"  {line}" for line in system.lines()]
        _emit(lines)
    return EXIT_OK


def _equivalence_field(ws: Workspace, X: VectorField) -> VectorField:
    missing = [c for c in EQUIVALENCE_COORDS if c not in X.coords]
    if missing:
        raise UsageError(f"equivalence fields need the coordinates {', '.join(EQUIVALENCE_COORDS)}")
    return VectorField(EQUIVALENCE_COORDS, {c: X[c] for c in EQUIVALENCE_COORDS})


def cmd_equivalence(ws: Workspace, args: argparse.Namespace) -> int:
    etable = equivalence_table()
    if args.coeff or args.field:
        fields = [("field", _selected_field(ws, args, EQUIVALENCE_COORDS, etable))]
        if args.field and not args.coeff:
            fields = [(args.field, fields[0][1])]
    else:
        fields = [(n, _equivalence_field(ws, X)) for n, X in zip(ws.names, ws.basis)]
    lines: list[str] = []
    doc: dict = {"fields": []}
    failed = 0
    for name, Y in fields:
        res = equivalence_residuals(Y)
        ok = res.vanishes()
        failed += not ok
        lines.append(f"{name} = {render_field(Y)}: {'equivalence generator' if ok else 'NOT an equivalence generator'}")
        lines.append(f"  main: {render(res.main)}")
        lines.append(f"  f_t: {render(res.ft)}")
        lines.append(f"  g_t: {render(res.gt)}")
        doc["fields"].append(
            {"name": name, "field": render_field(Y), "generator": ok,
             "main": render(res.main), "ft": render(res.ft), "gt": render(res.gt)}
        )
    family_delta = False
    fixture = ws.fixture("family")
    if args.family or (fixture and not (args.coeff or args.field)):
        report = family_report()
        printed = [etable.parse(fixture[k]) if fixture else None for k in ("mu", "nu", "constraint")]
        flines = report.lines(*printed)
        family_delta = any(line.startswith("DELTA") for line in flines) or not report.printed.is_empty()
        lines.append("family xi1 = a(x), xi2 = c1*t + c2, phi = c1*u + b(x):")
        lines += [f"  {line}" for line in flines]
        if fixture and "determining_xi2" in fixture:
            t_ok = equivalence_residuals(VectorField(EQUIVALENCE_COORDS, {"t": 1})).vanishes()
            lines.append(
                f"  printed determining equation {fixture['determining_xi2']!r} read as xi2 = xi2(t): "
                f"d_t {'is' if t_ok else 'is not'} an equivalence generator"
            )
        doc["family"] = {"lines": flines}
    if args.format == "json":
        _emit([json.dumps(doc, indent=2, sort_keys=True)])
    else:
        _emit(lines)
    return EXIT_DELTA if failed or family_delta else EXIT_OK


def _parse_vector(text: str, dim: int) -> list[Fraction]:
    try:
        values = [Fraction(v.strip()) for v in text.split(",")]
    except ValueError:
        raise UsageError(f"--vector expects comma-separated rationals, got {text!r}") from None
    if len(values) != dim:
        raise UsageError(f"--vector needs {dim} coefficients, got {len(values)}")
    if not any(values):
        raise UsageError("--vector must be nonzero")
    return values


def _representative_algebra(ws: Workspace) -> LieAlgebraPresentation:
    alg = ws.relabeled()
    if alg.dim != len(REPRESENTATIVES[0]):
        raise AlgebraError(f"the optimal-system audit needs a {len(REPRESENTATIVES[0])}-dimensional algebra, got {alg.dim}")
    return alg


def cmd_optimal(ws: Workspace, args: argparse.Namespace) -> int:
    alg = _representative_algebra(ws)
    names = alg.names
    if args.vector:
        report = normalize_paper(alg, _parse_vector(args.vector, alg.dim))
        if args.format == "json":
            _emit([json.dumps(report.as_json(names), indent=2, sort_keys=True)])
        else:
            _emit(report.lines(names))
        return EXIT_DELTA if report.discrepancies else EXIT_OK
    if args.survey is not None:
        if args.survey <= 0:
            raise UsageError("--survey needs a positive count")
        rep = survey(alg, args.survey, args.seed)
        if args.format == "json":
            _emit([json.dumps(rep.as_json(names), indent=2, sort_keys=True)])
        else:
            _emit([f"survey of {args.survey} vectors, seed {args.seed}", *rep.lines(names)])
        ok = rep.all_certified and not any(r.discrepancies for r in rep.reports)
        return EXIT_OK if ok else EXIT_DELTA
    # default: audit the representative list itself
    delta = False
    lines = []
    items = []
    fixture = ws.fixture("representatives")
    checks = printed_representatives(alg, fixture, ws.table) if fixture else []
    for k, v in enumerate(REPRESENTATIVES, 1):
        r = normalize_paper(alg, v)
        delta |= bool(r.discrepancies) or r.representative != k
        lines.append(f"Y^{k} = {render_combination(v, names)} = {render_field(alg.element(v))}: maps to {r.representative}")
        lines += [f"  discrepancy {d.describe()}" for d in r.discrepancies]
        item = r.as_json(names)
        if checks:
            c = checks[k - 1]
            if not c.operator_ok:
                delta = True
                lines.append(f"  printed operator {render_field(c.printed)} differs from the sum {render_field(c.machine)}")
            item["printed_operator_ok"] = c.operator_ok
        items.append(item)
    if args.format == "json":
        _emit([json.dumps({"representatives": items}, indent=2, sort_keys=True)])
    else:
        _emit(lines)
    return EXIT_DELTA if delta else EXIT_OK


def cmd_classify(ws: Workspace, args: argparse.Namespace) -> int:
    alg = _representative_algebra(ws)
    reps = [alg.element(v) for v in REPRESENTATIVES]
    fixture = ws.fixture("classification")
    table = build_table(reps, fixture["rows"] if fixture else None)
    if args.format == "json":
        sys.stdout.write(table_json(table))
    elif args.format == "latex":
        sys.stdout.write(render_latex_table(table))
    else:
        sys.stdout.write(render_text(table))
    return EXIT_OK if table.all_verified and not table.deltas else EXIT_DELTA


# ---------------------------------------------------------------------------
# entry point


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--workspace", metavar="FILE", help="workspace JSON (default: the bundled one)")
    common.add_argument("--format", choices=("text", "latex", "json"), default="text")

    parser = _Parser(prog="liesym", description="Group classification toolkit for u_t = f u_x^2 + g u_xx.")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND", parser_class=_Parser)
    sub.required = True

    sub.add_parser("commutators", parents=[common], help="commutator table")
    p = sub.add_parser("adjoint", parents=[common], help="adjoint action table")
    p.add_argument("--at-zero", action="store_true", help="specialize the group parameter to s = 0")

    p = sub.add_parser("determine", parents=[common], help="symmetry residual and determining equations")
    p.add_argument("--field", metavar="NAME", help="basis field name, or 'generic' for undetermined coefficients")
    p.add_argument("--coeff", action="append", metavar="DIR=EXPR", help="field coefficient on x, t or u (repeatable)")
    p.add_argument("--f", metavar="EXPR", help="coefficient f(x,u) (default: symbolic)")
    p.add_argument("--g", metavar="EXPR", help="coefficient g(x,u) (default: symbolic)")

    p = sub.add_parser("equivalence-check", parents=[common], help="equivalence-generator residuals")
    p.add_argument("--field", metavar="NAME", help="basis field name (default: every basis field)")
    p.add_argument("--coeff", action="append", metavar="DIR=EXPR", help="coefficient on t, x, u, f or g (repeatable)")
    p.add_argument("--family", action="store_true", help="also report the a(x), b(x) generator family")

    p = sub.add_parser("optimal", parents=[common], help="optimal-system audit")
    group = p.add_mutually_exclusive_group()
    group.add_argument("--vector", metavar="A1,...,A5", help="normalize one vector")
    group.add_argument("--survey", type=int, metavar="N", help="normalize N seeded random vectors")
    p.add_argument("--seed", type=int, default=0)

    sub.add_parser("classify", parents=[common], help="verified classification table")
    return parser


COMMANDS = {
    "commutators": cmd_commutators,
    "adjoint": cmd_adjoint,
    "determine": cmd_determine,
    "equivalence-check": cmd_equivalence,
    "optimal": cmd_optimal,
    "classify": cmd_classify,
}
LATEX_COMMANDS = {"commutators", "adjoint", "classify"}


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.format == "latex" and args.command not in LATEX_COMMANDS:
        parser.error(f"--format latex is only available for {', '.join(sorted(LATEX_COMMANDS))}")
    if args.command == "determine" and not (args.field or args.coeff):
        parser.error("determine needs --field NAME or --coeff DIR=EXPR")
    try:
        ws = load_workspace(args.workspace)
        return COMMANDS[args.command](ws, args)
    except (UsageError, WorkspaceError) as exc:
        print(f"liesym: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except UnsupportedAlgebra as exc:
        print(f"liesym: unsupported algebra: {exc}", file=sys.stderr)
        return EXIT_UNSUPPORTED
    except AlgebraError as exc:
        print(f"liesym: algebra error: {exc}", file=sys.stderr)
        return EXIT_ALGEBRA
    except ExpressionError as exc:
        print(f"liesym: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
