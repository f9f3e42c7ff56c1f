"""Comparison of machine tables with the printed fixtures."""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass, field

from .expr import Expression, Sym, SymbolTable, collect
from .fields import VectorField
from .lie_algebra import LieAlgebraPresentation, adjoint_table, render_combination
from .optimal import REPRESENTATIVES


def parse_combination(text: str, names: Sequence[str], parameter: str = "s") -> list[Expression]:
    """Coefficients of a cell such as ``Y4 - s*Y2`` or ``exp(s)*Y3``."""
    table = SymbolTable(coordinates=list(names), parameters=[parameter])
    e = table.parse(text)
    syms = [Sym(n) for n in names]
    parts = collect(e, syms)
    out = []
    for n in syms:
        out.append(parts.pop(((n, 1),), Expression.const(0)))
    if parts:
        raise ValueError(f"cell {text!r} is not linear in {', '.join(names)}")
    return out


@dataclass
class CellComparison:
    label: str
    total: int
    matches: int
    transposed_matches: int
    mismatches: list[tuple[int, int, str, str]] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.matches == self.total

    def lines(self) -> list[str]:
        verdict = "PASS" if self.passed else "FAIL"
        out = [f"{verdict}: {self.matches}/{self.total} cells match the {self.label}"]
        if not self.passed and self.transposed_matches == self.total:
            out.append("note: the fixture matches with rows and columns exchanged")
        for i, j, printed, machine in self.mismatches:
            out.append(f"  cell ({i + 1},{j + 1}): printed {printed} | machine {machine}")
        return out


def _compare(label: str, machine: list[list[list[Expression]]], cells: list[list[str]], names: Sequence[str], parameter: str) -> CellComparison:
    m = len(names)
    parsed = [[parse_combination(cells[i][j], names, parameter) for j in range(m)] for i in range(m)]
    matches = sum(parsed[i][j] == machine[i][j] for i in range(m) for j in range(m))
    transposed = sum(parsed[j][i] == machine[i][j] for i in range(m) for j in range(m))
    mismatches = [
        (i, j, cells[i][j], render_combination(machine[i][j], names, lead=j))
        for i in range(m)
        for j in range(m)
        if parsed[i][j] != machine[i][j]
    ]
    return CellComparison(label, m * m, matches, transposed, mismatches)


def commutator_cells(alg: LieAlgebraPresentation) -> list[list[list[Expression]]]:
    return [[[Expression.coerce(c) for c in alg.constants[i][j]] for j in range(alg.dim)] for i in range(alg.dim)]


def compare_commutators(alg: LieAlgebraPresentation, fixture: dict) -> CellComparison:
    return _compare(fixture.get("label", "fixture"), commutator_cells(alg), fixture["cells"], alg.names, "s")


def compare_adjoint(alg: LieAlgebraPresentation, fixture: dict) -> CellComparison:
    parameter = fixture.get("parameter", "s")
    return _compare(fixture.get("label", "fixture"), adjoint_table(alg, parameter), fixture["cells"], alg.names, parameter)


@dataclass(frozen=True)
class PrintedRepresentative:
    index: int
    combination: list[Expression]
    machine: VectorField
    printed: VectorField

    @property
    def combination_ok(self) -> bool:
        return [c.constant_value() if c.is_constant() else None for c in self.combination] == list(REPRESENTATIVES[self.index - 1])

    @property
    def operator_ok(self) -> bool:
        return self.machine == self.printed


def printed_representatives(alg: LieAlgebraPresentation, fixture: dict, table: SymbolTable) -> list[PrintedRepresentative]:
    """Each printed ``Y^k`` as a combination and as an operator, next to the machine sum."""
    out = []
    for k, entry in enumerate(fixture["list"], 1):
        combo = parse_combination(entry["combination"], alg.names)
        printed = VectorField.parse(alg.coords, entry["operator"], table)
        out.append(PrintedRepresentative(k, combo, alg.element(combo), printed))
    return out


def printed_projections(fixture: dict, table: SymbolTable, coords: Sequence[str]) -> list[tuple[VectorField, list[int]]]:
    return [(VectorField.parse(coords, p["Z"], table), list(p["members"])) for p in fixture["list"]]
