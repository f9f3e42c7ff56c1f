"""Auditing a one-dimensional optimal system by exact adjoint replay.

Vectors are rational coefficient lists ``a`` for ``Y = sum a_i Y_i`` in the
labeling of the representative list.  Every normalization is recorded as a
:class:`GroupWord` (an overall rescale followed by one-parameter adjoint
actions) and can be replayed exactly.  Scale-type actions are parametrized
by ``sigma = exp(s)`` so that all values stay rational.
"""

from __future__ import annotations

import json
import random
from collections import Counter
from collections.abc import Sequence
from dataclasses import dataclass, field
from fractions import Fraction

from .expr import Exp, Expression, Sym, substitute
from .expr.render import render
from .fields import VectorField
from .lie_algebra import AdjointMatrix, LieAlgebraPresentation, adjoint_matrix, render_combination

Vector = tuple[Fraction, ...]


class ReplayError(ValueError):
    pass


def as_vector(values: Sequence[object]) -> Vector:
    return tuple(Fraction(v) for v in values)


def _exp_rate(atom: Exp, parameter: str) -> Fraction:
    form = dict(atom.form)
    if set(form) != {parameter}:
        raise ReplayError(f"unexpected exponential {atom}")
    return form[parameter]


def evaluate_entry(e: Expression, kind: str, value: Fraction, parameter: str = "s") -> Fraction:
    """Numeric value of an adjoint-matrix entry.

    ``value`` is ``s`` for shift actions and ``sigma = exp(s)`` for scale
    actions; a scale entry may not carry polynomial factors of ``s``.
    """
    if kind != "scale":
        out = substitute(e, {Sym(parameter): value})
        if not out.is_constant():
            raise ReplayError(f"entry {e} is not polynomial in {parameter}")
        return out.constant_value()
    total = Fraction(0)
    for mono, c in e.terms():
        term = c
        for atom, p in mono:
            if not isinstance(atom, Exp):
                raise ReplayError(f"scale entry {e} has a polynomial factor in {parameter}")
            rate = _exp_rate(atom, parameter) * p
            if rate.denominator != 1:
                raise ReplayError(f"non-integer rate {rate} in {e}")
            term *= value ** int(rate)
        total += term
    return total


def apply_adjoint(Ad: AdjointMatrix, vector: Sequence[Fraction], value: Fraction) -> Vector:
    """``Ad(exp(s Y_i)) Y`` at one rational parameter value."""
    m = Ad.dim
    value = Fraction(value)
    if Ad.kind == "scale" and value <= 0:
        raise ReplayError("scale parameter exp(s) must be positive")
    M = [[evaluate_entry(Ad.entries[r][c], Ad.kind, value, Ad.parameter) for c in range(m)] for r in range(m)]
    return tuple(sum((M[r][c] * vector[c] for c in range(m)), Fraction(0)) for r in range(m))


def symbolic_action(Ad: AdjointMatrix, vector: Sequence[Fraction]) -> list[Expression]:
    """Coefficients of ``Ad(exp(s Y_i)) Y`` as expressions in ``s``."""
    return Ad.apply(vector)


@dataclass(frozen=True)
class Step:
    generator: int  # 0-based
    kind: str  # "shift" or "scale"
    value: Fraction  # s for shifts, exp(s) for scales

    def describe(self, names: Sequence[str]) -> str:
        if self.kind == "scale":
            return f"Ad(exp(s*{names[self.generator]})), exp(s) = {self.value}"
        return f"Ad(exp(s*{names[self.generator]})), s = {self.value}"

    def as_json(self, names: Sequence[str]) -> dict:
        return {"generator": names[self.generator], "kind": self.kind, "value": str(self.value)}


@dataclass(frozen=True)
class GroupWord:
    """Overall rescale by ``rescale`` followed by ``steps`` in order."""

    rescale: Fraction = Fraction(1)
    steps: tuple[Step, ...] = ()

    def replay(self, matrices: Sequence[AdjointMatrix], vector: Sequence[Fraction]) -> Vector:
        v = tuple(Fraction(a) * self.rescale for a in vector)
        for st in self.steps:
            Ad = matrices[st.generator]
            if Ad.kind != st.kind:
                raise ReplayError(f"step kind {st.kind} does not match generator kind {Ad.kind}")
            v = apply_adjoint(Ad, v, st.value)
        return v

    def extended(self, step: Step) -> GroupWord:
        return GroupWord(self.rescale, self.steps + (step,))

    def describe(self, names: Sequence[str]) -> str:
        parts = [f"rescale by {self.rescale}"] if self.rescale != 1 else []
        parts += [st.describe(names) for st in self.steps]
        return "; ".join(parts) if parts else "identity"

    def as_json(self, names: Sequence[str]) -> dict:
        return {"rescale": str(self.rescale), "steps": [st.as_json(names) for st in self.steps]}


@dataclass(frozen=True)
class Discrepancy:
    """A step of the printed argument that exact arithmetic refutes.

    ``witness`` is the relevant coefficient after the attempted action, as
    an expression in the group parameter; ``solution`` is the parameter
    value when the witness shows an unexpected elimination.
    """

    kind: str  # elimination-failed | normalization-failed | redundant-representative | unmatched
    case: str
    generator: int | None
    coefficient: int | None
    witness: Expression | None
    solution: Fraction | None
    message: str

    def describe(self) -> str:
        out = f"[{self.kind}] case {self.case}: {self.message}"
        if self.witness is not None:
            out += f"; witness {render(self.witness)}"
        if self.solution is not None:
            out += f" vanishes at s = {self.solution}"
        return out

    def as_json(self, names: Sequence[str]) -> dict:
        return {
            "kind": self.kind,
            "case": self.case,
            "generator": names[self.generator] if self.generator is not None else None,
            "coefficient": names[self.coefficient] if self.coefficient is not None else None,
            "witness": render(self.witness) if self.witness is not None else None,
            "solution": str(self.solution) if self.solution is not None else None,
            "message": self.message,
        }


@dataclass
class NormalizationReport:
    input: Vector
    case: str
    word: GroupWord
    normal_form: Vector
    representative: int | None
    discrepancies: list[Discrepancy] = field(default_factory=list)

    def certified(self, matrices: Sequence[AdjointMatrix]) -> bool:
        return self.word.replay(matrices, self.input) == self.normal_form

    def lines(self, names: Sequence[str]) -> list[str]:
        rep = f"representative {self.representative}" if self.representative else "no representative"
        out = [
            f"input: {render_combination(self.input, names)}",
            f"case {self.case}: {rep}",
            f"normal form: {render_combination(self.normal_form, names)}",
            f"word: {self.word.describe(names)}",
        ]
        out += [f"discrepancy {d.describe()}" for d in self.discrepancies]
        return out

    def as_json(self, names: Sequence[str]) -> dict:
        return {
            "input": [str(a) for a in self.input],
            "case": self.case,
            "representative": self.representative,
            "normal_form": [str(a) for a in self.normal_form],
            "word": self.word.as_json(names),
            "discrepancies": [d.as_json(names) for d in self.discrepancies],
        }


# ---------------------------------------------------------------------------
# representatives


# (a1, ..., a5) of the seventeen printed representatives, in the labeling
# Y1 = d_t, Y2 = d_x, Y3 = d_u, Y4 = t d_t + u d_u - 2f d_f - g d_g,
# Y5 = d_x + 2f d_f + g d_g
REPRESENTATIVES: tuple[Vector, ...] = tuple(
    as_vector(v)
    for v in (
        (1, 0, 0, 0, 0),
        (0, 1, 0, 0, 0),
        (0, 0, 1, 0, 0),
        (0, 0, 0, 1, 0),
        (0, 0, 0, 0, 1),
        (1, 1, 0, 0, 0),
        (-1, 1, 0, 0, 0),
        (1, 0, 0, 1, 0),
        (-1, 0, 0, 1, 0),
        (1, 0, 0, 0, 1),
        (-1, 0, 0, 0, 1),
        (0, 0, 0, 1, 1),
        (0, 0, 0, -1, 1),
        (1, 0, 0, 1, 1),
        (-1, 0, 0, 1, 1),
        (1, 0, 0, -1, 1),
        (-1, 0, 0, -1, 1),
    )
)


def representative_index(v: Sequence[Fraction]) -> int | None:
    """1-based index of ``v`` in the printed list, or ``None``."""
    v = as_vector(v)
    for k, rep in enumerate(REPRESENTATIVES, 1):
        if rep == v:
            return k
    return None


@dataclass(frozen=True)
class RepresentativeCheck:
    index: int
    vector: Vector
    machine: VectorField
    printed: VectorField | None

    @property
    def matches(self) -> bool:
        return self.printed is None or self.printed == self.machine


def representative_fields(alg: LieAlgebraPresentation) -> list[VectorField]:
    return [alg.element(v) for v in REPRESENTATIVES]


def check_printed_forms(alg: LieAlgebraPresentation, printed: Sequence[VectorField | None]) -> list[RepresentativeCheck]:
    """Compare each ``sum a_i Y_i`` against its printed operator form."""
    out = []
    for k, (v, p) in enumerate(zip(REPRESENTATIVES, printed), 1):
        out.append(RepresentativeCheck(k, v, alg.element(v), p))
    return out


# ---------------------------------------------------------------------------
# the printed decision tree


class _Normalizer:
    def __init__(self, alg: LieAlgebraPresentation, vector: Sequence[object]):
        self.alg = alg
        self.names = alg.names
        self.matrices = [adjoint_matrix(alg, i) for i in range(alg.dim)]
        self.input = as_vector(vector)
        if len(self.input) != alg.dim:
            raise ValueError(f"expected {alg.dim} coefficients, got {len(self.input)}")
        if not any(self.input):
            raise ValueError("the zero vector spans no subalgebra")
        self.v = self.input
        self.word = GroupWord()
        self.case = ""
        self.discrepancies: list[Discrepancy] = []

    # -- primitives ------------------------------------------------------
    def rescale(self, k: int, target: Fraction = Fraction(1)) -> None:
        c = target / self.v[k]
        self.v = tuple(a * c for a in self.v)
        self.word = GroupWord(self.word.rescale * c, self.word.steps)

    def action(self, i: int) -> list[Expression]:
        return symbolic_action(self.matrices[i], self.v)

    def step(self, i: int, value: Fraction) -> None:
        Ad = self.matrices[i]
        kind = "scale" if Ad.kind == "scale" else "shift"
        if (kind == "scale" and value == 1) or (kind == "shift" and value == 0):
            return
        st = Step(i, kind, Fraction(value))
        self.v = apply_adjoint(Ad, self.v, st.value)
        self.word = self.word.extended(st)

    def note(self, kind: str, i: int | None, k: int | None, witness: Expression | None, solution: Fraction | None, message: str) -> None:
        self.discrepancies.append(Discrepancy(kind, self.case, i, k, witness, solution, message))

    def _solve(self, i: int, k: int, target: Fraction) -> Fraction | None:
        """Parameter value making coefficient ``k`` equal ``target`` under generator ``i``."""
        e = self.action(i)[k] - target
        Ad = self.matrices[i]
        s = Sym(Ad.parameter)
        if Ad.kind == "scale":
            terms = e.terms()
            exp_terms = [(m, c) for m, c in terms if m]
            const = e.coefficient(())
            if len(exp_terms) != 1:
                return None
            (mono, c), = exp_terms
            if len(mono) != 1 or not isinstance(mono[0][0], Exp):
                return None
            rate = _exp_rate(mono[0][0], Ad.parameter)
            ratio = -const / c
            if ratio <= 0:
                return None
            if rate == 1:
                return ratio
            if rate == -1:
                return 1 / ratio
            return None
        if any(isinstance(a, Exp) for a in e.atoms()):
            return None
        c1 = e.coefficient(((s, 1),))
        c0 = e.coefficient(())
        if not c1 or e != Expression.of(s) * c1 + c0:
            return None
        return -c0 / c1

    def eliminate(self, i: int, k: int) -> bool:
        """Try to zero coefficient ``k`` with generator ``i``; log on failure."""
        if self.v[k] == 0:
            return True
        value = self._solve(i, k, Fraction(0))
        if value is None:
            self.note(
                "elimination-failed", i, k, self.action(i)[k], None,
                f"Ad(exp(s*{self.names[i]})) cannot remove the {self.names[k]} coefficient",
            )
            return False
        self.step(i, value)
        return True

    def normalize_sign(self, k: int, fixed: Sequence[int] = ()) -> bool:
        """Bring coefficient ``k`` to ``+1`` or ``-1``; scale generators first."""
        a = self.v[k]
        if a == 0 or abs(a) == 1:
            return True
        target = Fraction(1 if a > 0 else -1)
        order = sorted(range(self.alg.dim), key=lambda i: (self.matrices[i].kind != "scale", i))
        for i in order:
            if self.matrices[i].kind == "identity":
                continue
            value = self._solve(i, k, target)
            if value is None:
                continue
            trial = apply_adjoint(self.matrices[i], self.v, value)
            if any(trial[j] != self.v[j] for j in fixed):
                continue
            self.step(i, value)
            return True
        i = next((i for i in order if self.matrices[i].kind == "scale"), order[0])
        self.note(
            "normalization-failed", i, k, self.action(i)[k], None,
            f"no adjoint action brings the {self.names[k]} coefficient {a} to {target}",
        )
        return False

    def check_redundant(self, i: int, k: int, rep: int | None) -> None:
        """Log when generator ``i`` could still remove coefficient ``k``."""
        if self.v[k] == 0 or rep is None:
            return
        value = self._solve(i, k, Fraction(0))
        if value is not None:
            self.note(
                "redundant-representative", i, k, self.action(i)[k], value,
                f"representative {rep} is conjugate to one without {self.names[k]}",
            )

    # -- the tree --------------------------------------------------------
    def run(self) -> NormalizationReport:
        a = self.v
        Y1, Y2, Y3, Y4, Y5 = range(5)
        rep = None
        if a[Y5] != 0:
            self.case = "1"
            self.rescale(Y5)
            self.eliminate(Y2, Y2)
            self.eliminate(Y3, Y3)
            a1, a4 = self.v[Y1], self.v[Y4]
            if a1 and a4:
                self.case = "1a"
                self.normalize_sign(Y1, fixed=(Y4, Y5))
                self.normalize_sign(Y4, fixed=(Y1, Y5))
                rep = self.match()
                self.check_redundant(Y1, Y1, rep)
            elif a4:
                self.case = "1b"
                self.normalize_sign(Y4, fixed=(Y5,))
                rep = self.match()
            elif a1:
                self.case = "1c"
                self.normalize_sign(Y1, fixed=(Y5,))
                rep = self.match()
            else:
                rep = self.match()
        elif a[Y4] != 0:
            self.case = "2a"
            self.rescale(Y4)
            self.eliminate(Y2, Y2)
            self.eliminate(Y3, Y3)
            self.normalize_sign(Y1, fixed=(Y4,))
            rep = self.match()
            self.check_redundant(Y1, Y1, rep)
        elif a[Y2] != 0:
            self.case = "2b"
            self.rescale(Y2)
            self.eliminate(Y3, Y3)
            self.normalize_sign(Y1, fixed=(Y2,))
            rep = self.match()
        else:
            self.case = "2c"
            lead = Y1 if a[Y1] else Y3
            self.rescale(lead, Fraction(1))
            rep = self.match()
        if rep is None:
            self.note(
                "unmatched", None, None, None, None,
                f"normal form {render_combination(self.v, self.names)} is not a listed representative",
            )
        return NormalizationReport(self.input, self.case, self.word, self.v, rep, self.discrepancies)

    def match(self) -> int | None:
        return representative_index(self.v)


def normalize_paper(alg: LieAlgebraPresentation, vector: Sequence[object]) -> NormalizationReport:
    """Follow the printed case analysis on ``sum a_i Y_i``.

    ``alg`` must be in the representative labeling (``Y1 = d_t``).  Each step
    solves for the exact parameter; steps that exact arithmetic refutes are
    logged as discrepancies rather than skipped silently.
    """
    if alg.dim != 5:
        raise ValueError("the printed case analysis is for a five-dimensional algebra")
    return _Normalizer(alg, vector).run()


# ---------------------------------------------------------------------------
# survey


def random_vector(rng: random.Random, dim: int, region: int = 3, zero_rate: float = 0.4) -> Vector:
    while True:
        v = tuple(
            Fraction(0) if rng.random() < zero_rate else Fraction(rng.randint(-region, region) or 1, rng.randint(1, 2))
            for _ in range(dim)
        )
        if any(v):
            return v


@dataclass
class SurveyReport:
    reports: list[NormalizationReport]
    certified: int
    histogram: dict[str, int]
    discrepancy_counts: dict[str, int]

    @property
    def all_certified(self) -> bool:
        return self.certified == len(self.reports)

    def lines(self, names: Sequence[str]) -> list[str]:
        out = [f"certified: {self.certified}/{len(self.reports)} group words replay exactly"]
        out.append("representatives:")
        for key, n in self.histogram.items():
            out.append(f"  {key}: {n}")
        out.append("discrepancies:")
        for key, n in self.discrepancy_counts.items():
            out.append(f"  {key}: {n}")
        for k, r in enumerate(self.reports, 1):
            for d in r.discrepancies:
                out.append(f"  #{k} {render_combination(r.input, names)}: {d.describe()}")
        return out

    def as_json(self, names: Sequence[str]) -> dict:
        return {
            "certified": self.certified,
            "total": len(self.reports),
            "histogram": self.histogram,
            "discrepancy_counts": self.discrepancy_counts,
            "reports": [r.as_json(names) for r in self.reports],
        }


def survey(alg: LieAlgebraPresentation, count: int, seed: int, region: int = 3) -> SurveyReport:
    """Normalize ``count`` seeded random vectors and replay every word."""
    rng = random.Random(seed)
    matrices = [adjoint_matrix(alg, i) for i in range(alg.dim)]
    reports = []
    certified = 0
    hist: Counter[str] = Counter()
    kinds: Counter[str] = Counter()
    for _ in range(count):
        r = normalize_paper(alg, random_vector(rng, alg.dim, region))
        reports.append(r)
        certified += r.certified(matrices)
        hist[str(r.representative) if r.representative else "none"] += 1
        for d in r.discrepancies:
            kinds[f"{d.kind} (case {d.case})"] += 1

    def order(key: str) -> tuple:
        return (0, int(key)) if key.isdigit() else (1, key)

    histogram = {k: hist[k] for k in sorted(hist, key=order)}
    counts = {k: kinds[k] for k in sorted(kinds)}
    return SurveyReport(reports, certified, histogram, counts)


def survey_json(report: SurveyReport, names: Sequence[str]) -> str:
    return json.dumps(report.as_json(names), indent=2, sort_keys=True)
