"""Workspace files: one JSON document per algebra and equation setup."""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from .expr import Expression, ExpressionError, SymbolTable
from .fields import VectorField
from .lie_algebra import LieAlgebraPresentation, build_algebra


class WorkspaceError(ValueError):
    pass


def bundled_path(name: str = "g5.json") -> Path:
    return Path(str(resources.files("liesym") / "data" / name))


@dataclass
class Workspace:
    name: str
    path: Path | None
    coordinates: tuple[str, ...]
    table: SymbolTable
    names: tuple[str, ...]
    basis: tuple[VectorField, ...]
    permutation: tuple[int, ...] | None
    fixtures: dict | None

    def algebra(self) -> LieAlgebraPresentation:
        return build_algebra(self.basis, self.names)

    def relabeled(self) -> LieAlgebraPresentation:
        """The algebra in the representative labeling (identity if none is declared)."""
        alg = self.algebra()
        if self.permutation is None:
            return alg
        return alg.relabel(self.permutation)

    def field(self, name: str) -> VectorField:
        try:
            return self.basis[self.names.index(name)]
        except ValueError:
            raise WorkspaceError(f"no basis field named {name!r} (have {', '.join(self.names)})") from None

    def parse(self, text: str) -> Expression:
        return self.table.parse(text)

    def fixture(self, key: str) -> dict | None:
        return None if self.fixtures is None else self.fixtures.get(key)


def _require(doc: dict, key: str, kind: type) -> object:
    if key not in doc:
        raise WorkspaceError(f"workspace is missing {key!r}")
    if not isinstance(doc[key], kind):
        raise WorkspaceError(f"workspace field {key!r} must be a {kind.__name__}")
    return doc[key]


def load_workspace(path: str | Path | None = None) -> Workspace:
    """Read a workspace; ``None`` selects the bundled one."""
    p = Path(path) if path is not None else bundled_path()
    try:
        doc = json.loads(p.read_text())
    except OSError as exc:
        raise WorkspaceError(f"cannot read workspace {p}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise WorkspaceError(f"workspace {p} is not valid JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise WorkspaceError("workspace must be a JSON object")

    coords = tuple(_require(doc, "coordinates", list))
    symbols = doc.get("symbols") or {}
    try:
        table = SymbolTable(
            coordinates=coords,
            parameters=symbols.get("parameters", []),
            constants=symbols.get("constants", []),
            functions={k: tuple(v) for k, v in (symbols.get("functions") or {}).items()},
        )
        names, basis = [], []
        for entry in _require(doc, "basis", list):
            name = entry["name"]
            coeffs = entry.get("coefficients", {})
            basis.append(VectorField.parse(coords, coeffs, table))
            names.append(name)
    except (ExpressionError, ValueError, KeyError) as exc:
        raise WorkspaceError(f"bad workspace definition: {exc}") from None
    if len(set(names)) != len(names):
        raise WorkspaceError("basis names must be distinct")

    perm = doc.get("labeling_permutation", doc.get("labeling-permutation"))
    fixtures = None
    ref = doc.get("fixtures")
    if isinstance(ref, str):
        fpath = (p.parent / ref) if not Path(ref).is_absolute() else Path(ref)
        try:
            fixtures = json.loads(fpath.read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise WorkspaceError(f"cannot load fixtures {fpath}: {exc}") from None
    elif isinstance(ref, dict):
        fixtures = ref
    return Workspace(
        name=str(doc.get("name", p.stem)),
        path=p,
        coordinates=coords,
        table=table,
        names=tuple(names),
        basis=tuple(basis),
        permutation=tuple(perm) if perm else None,
        fixtures=fixtures,
    )
