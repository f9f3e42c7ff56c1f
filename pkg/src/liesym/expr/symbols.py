"""Symbol declarations: every name an expression may mention lives here."""

from __future__ import annotations

import re
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass
from enum import Enum

from .core import Jet
from .errors import ExpressionError

_NAME = re.compile(r"[A-Za-z][A-Za-z0-9']*\Z")
RESERVED = frozenset({"exp", "D"})


class Kind(Enum):
    COORDINATE = "coordinate"
    PARAMETER = "group-parameter"
    CONSTANT = "constant-parameter"
    FUNCTION = "arbitrary-function"


@dataclass(frozen=True)
class Symbol:
    name: str
    kind: Kind
    formals: tuple[str, ...] = ()

    @property
    def arity(self) -> int:
        return len(self.formals)


class SymbolTable:
    """Declared symbols plus the dependent variables that own jet coordinates.

    ``dependents`` maps a dependent coordinate (``u``) to the ordered tuple of
    independent coordinates it is differentiated by (``("x", "t")``).  The
    order fixes the canonical spelling of mixed jets (``u_xt``, never
    ``u_tx``).
    """

    def __init__(
        self,
        coordinates: Iterable[str] = (),
        parameters: Iterable[str] = (),
        constants: Iterable[str] = (),
        functions: Mapping[str, Sequence[str]] | None = None,
        dependents: Mapping[str, Sequence[str]] | None = None,
        jet_order_cap: int | None = None,
    ) -> None:
        self._symbols: dict[str, Symbol] = {}
        self.dependents: dict[str, tuple[str, ...]] = {}
        self.jet_order_cap = jet_order_cap
        for n in coordinates:
            self.declare(n, Kind.COORDINATE)
        for n in parameters:
            self.declare(n, Kind.PARAMETER)
        for n in constants:
            self.declare(n, Kind.CONSTANT)
        for n, formals in (functions or {}).items():
            self.declare(n, Kind.FUNCTION, formals)
        for dep, indep in (dependents or {}).items():
            self.declare_dependent(dep, indep)

    def declare(self, name: str, kind: Kind, formals: Sequence[str] = ()) -> Symbol:
        if not _NAME.match(name) or name in RESERVED:
            raise ExpressionError(f"invalid symbol name {name!r}")
        formals = tuple(formals)
        if kind is Kind.FUNCTION and not formals:
            raise ExpressionError(f"function {name} needs arity >= 1")
        if kind is not Kind.FUNCTION and formals:
            raise ExpressionError(f"{name} is not a function and takes no formals")
        new = Symbol(name, kind, formals)
        old = self._symbols.get(name)
        if old is not None:
            if old != new:
                raise ExpressionError(f"{name} is already declared as {old.kind.value}")
            return old
        self._symbols[name] = new
        return new

    def declare_dependent(self, name: str, independents: Sequence[str]) -> None:
        self.declare(name, Kind.COORDINATE)
        independents = tuple(independents)
        for v in independents:
            if len(v) != 1:
                raise ExpressionError(
                    f"jet suffixes need single-letter independents, got {v!r}"
                )
            self.declare(v, Kind.COORDINATE)
        self.dependents[name] = independents

    def __contains__(self, name: str) -> bool:
        return name in self._symbols

    def __getitem__(self, name: str) -> Symbol:
        return self._symbols[name]

    def get(self, name: str) -> Symbol | None:
        return self._symbols.get(name)

    def names(self, kind: Kind | None = None) -> list[str]:
        return [n for n, s in self._symbols.items() if kind is None or s.kind is kind]

    def jet(self, dep: str, letters: str) -> Jet:
        """Canonical jet coordinate of ``dep`` differentiated by ``letters``."""
        try:
            indep = self.dependents[dep]
        except KeyError:
            raise ExpressionError(f"{dep} is not a dependent variable") from None
        counts = dict.fromkeys(indep, 0)
        for ch in letters:
            if ch not in counts:
                raise ExpressionError(f"{dep} does not depend on {ch!r}")
            counts[ch] += 1
        if self.jet_order_cap is not None and len(letters) > self.jet_order_cap:
            raise ExpressionError(
                f"{dep}_{letters} exceeds the jet order cap {self.jet_order_cap}"
            )
        return Jet(dep, "".join(v * counts[v] for v in indep))

    def extended(
        self,
        coordinates: Iterable[str] = (),
        parameters: Iterable[str] = (),
        constants: Iterable[str] = (),
        functions: Mapping[str, Sequence[str]] | None = None,
    ) -> SymbolTable:
        """A copy with extra declarations (used for template placeholders)."""
        new = SymbolTable(jet_order_cap=self.jet_order_cap)
        new._symbols = dict(self._symbols)
        new.dependents = dict(self.dependents)
        for n in coordinates:
            new.declare(n, Kind.COORDINATE)
        for n in parameters:
            new.declare(n, Kind.PARAMETER)
        for n in constants:
            new.declare(n, Kind.CONSTANT)
        for n, formals in (functions or {}).items():
            new.declare(n, Kind.FUNCTION, formals)
        return new

    def parse(self, text: str):
        from .parser import parse

        return parse(text, self)
