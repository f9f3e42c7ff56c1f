"""Canonical exact expressions.

An :class:`Expression` is a finite sum of terms ``coefficient * monomial``
where the coefficient is a :class:`fractions.Fraction` and a monomial is a
product of integer powers of atoms.  Atoms are

* :class:`Sym`  -- a coordinate, group parameter or constant,
* :class:`Jet`  -- a derivative coordinate such as ``u_xt``,
* :class:`Exp`  -- ``exp(L)`` for a rational linear form ``L`` in symbols,
* :class:`App`  -- an arbitrary function (or one of its partial
  derivatives) applied to expression arguments.

Every constructor path goes through the same normalisation, so two
expressions are equal exactly when their term dictionaries are equal.
"""

from __future__ import annotations

from collections.abc import Iterable, Iterator, Mapping
from fractions import Fraction
from typing import Union

from .errors import ExpressionError

Number = Union[int, Fraction]
Monomial = tuple  # tuple[tuple[Atom, int], ...], sorted by atom key


class Atom:
    """Base class; equality, hashing and ordering all go through ``key``."""

    __slots__ = ("key", "_hash")

    def _init_key(self, key: tuple) -> None:
        self.key = key
        self._hash = hash(key)

    def __hash__(self) -> int:
        return self._hash

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Atom) and self.key == other.key

    def __lt__(self, other: Atom) -> bool:
        return self.key < other.key

    def __repr__(self) -> str:
        from .render import render_atom

        return f"{type(self).__name__}<{render_atom(self)}>"

    def __str__(self) -> str:
        from .render import render_atom

        return render_atom(self)


class Sym(Atom):
    __slots__ = ("name",)

    def __init__(self, name: str) -> None:
        self.name = name
        self._init_key((0, name))


class Jet(Atom):
    """Derivative coordinate ``dep_index``; ``index`` is already canonical."""

    __slots__ = ("dep", "index")

    def __init__(self, dep: str, index: str) -> None:
        if not index:
            raise ExpressionError("a jet coordinate needs at least one derivative")
        self.dep = dep
        self.index = index
        self._init_key((1, dep, len(index), index))

    @property
    def order(self) -> int:
        return len(self.index)


class Exp(Atom):
    """``exp`` of a rational linear form, stored as sorted ``(name, coeff)`` pairs."""

    __slots__ = ("form",)

    def __init__(self, form: Iterable[tuple[str, Fraction]]) -> None:
        cleaned = tuple(sorted((n, Fraction(c)) for n, c in form if c != 0))
        if not cleaned:
            raise ExpressionError("exp(0) is not an atom")
        self.form = cleaned
        self._init_key((2, cleaned))

    def scaled(self, k: Number) -> Exp | None:
        if k == 0:
            return None
        return Exp((n, c * k) for n, c in self.form)

    def linear_form(self) -> Expression:
        return Expression.from_terms(
            (((Sym(n), 1),), c) for n, c in self.form
        )


class App(Atom):
    """Arbitrary function ``name`` with formal slots ``formals``.

    ``orders[i]`` counts partial derivatives taken in slot ``i`` before the
    function is applied to ``args``.
    """

    __slots__ = ("name", "formals", "orders", "args")

    def __init__(
        self,
        name: str,
        formals: tuple[str, ...],
        args: Iterable[Expression],
        orders: tuple[int, ...] | None = None,
    ) -> None:
        args = tuple(args)
        formals = tuple(formals)
        if len(args) != len(formals):
            from .errors import ArityError

            raise ArityError(
                f"{name} takes {len(formals)} argument(s), got {len(args)}"
            )
        if orders is None:
            orders = (0,) * len(formals)
        orders = tuple(orders)
        if len(orders) != len(formals) or any(o < 0 for o in orders):
            raise ExpressionError(f"bad derivative multi-index {orders} for {name}")
        self.name = name
        self.formals = formals
        self.orders = orders
        self.args = args
        self._init_key((3, name, formals, orders, tuple(a.key for a in args)))

    def derived(self, slot: int, times: int = 1) -> App:
        orders = list(self.orders)
        orders[slot] += times
        return App(self.name, self.formals, self.args, tuple(orders))

    def with_args(self, args: Iterable[Expression]) -> App:
        return App(self.name, self.formals, args, self.orders)


# ---------------------------------------------------------------------------
# monomial helpers


def _mono_from_powers(powers: Mapping[Atom, int], form: Mapping[str, Fraction]) -> Monomial:
    items = [(a, p) for a, p in powers.items() if p != 0]
    if form:
        exp_form = [(n, c) for n, c in form.items() if c != 0]
        if exp_form:
            items.append((Exp(exp_form), 1))
    items.sort(key=lambda ap: ap[0].key)
    return tuple(items)


def mono_mul(a: Monomial, b: Monomial) -> Monomial:
    if not a:
        return b
    if not b:
        return a
    powers: dict[Atom, int] = {}
    form: dict[str, Fraction] = {}
    for atom, p in a + b:
        if isinstance(atom, Exp):
            for n, c in atom.form:
                form[n] = form.get(n, 0) + c * p
        else:
            powers[atom] = powers.get(atom, 0) + p
    return _mono_from_powers(powers, form)


def mono_pow(m: Monomial, k: int) -> Monomial:
    if k == 0:
        return ()
    out = []
    for atom, p in m:
        if isinstance(atom, Exp):
            out.append((atom.scaled(k), 1))
        else:
            out.append((atom, p * k))
    out.sort(key=lambda ap: ap[0].key)
    return tuple(out)


def mono_key(m: Monomial) -> tuple:
    return tuple((a.key, p) for a, p in m)


def mono_degree(m: Monomial) -> int:
    return sum(1 if isinstance(a, Exp) else p for a, p in m)


# ---------------------------------------------------------------------------


def _as_fraction(value: object) -> Fraction | None:
    if isinstance(value, bool):
        return None
    if isinstance(value, (int, Fraction)):
        return Fraction(value)
    return None


class Expression:
    """Immutable canonical sum of terms."""

    __slots__ = ("_terms", "_hash", "_key", "_sorted")

    def __init__(self, terms: Mapping[Monomial, Fraction] | None = None) -> None:
        # callers must pass canonical data: no zero coefficients
        self._terms: dict[Monomial, Fraction] = dict(terms or {})
        self._sorted: tuple | None = None
        self._key: tuple | None = None
        self._hash: int | None = None

    # -- construction -----------------------------------------------------
    @classmethod
    def from_terms(cls, terms: Iterable[tuple[Monomial, Number]]) -> Expression:
        acc: dict[Monomial, Fraction] = {}
        for mono, c in terms:
            if c == 0:
                continue
            acc[mono] = acc.get(mono, 0) + Fraction(c)
        return cls({m: c for m, c in acc.items() if c != 0})

    @classmethod
    def const(cls, value: Number) -> Expression:
        value = Fraction(value)
        return cls({(): value} if value else {})

    @classmethod
    def of(cls, atom: Atom, power: int = 1) -> Expression:
        if isinstance(atom, Exp):
            scaled = atom.scaled(power)
            return cls({((scaled, 1),): Fraction(1)}) if scaled else cls.const(1)
        if power == 0:
            return cls.const(1)
        return cls({((atom, power),): Fraction(1)})

    @classmethod
    def coerce(cls, value: object) -> Expression:
        if isinstance(value, Expression):
            return value
        if isinstance(value, Atom):
            return cls.of(value)
        f = _as_fraction(value)
        if f is None:
            raise TypeError(f"cannot use {value!r} as an expression")
        return cls.const(f)

    # -- inspection -------------------------------------------------------
    def terms(self) -> tuple[tuple[Monomial, Fraction], ...]:
        """Terms in canonical order (sorted by monomial key)."""
        if self._sorted is None:
            self._sorted = tuple(
                sorted(self._terms.items(), key=lambda mc: mono_key(mc[0]))
            )
        return self._sorted

    def __iter__(self) -> Iterator[tuple[Monomial, Fraction]]:
        return iter(self.terms())

    def __len__(self) -> int:
        return len(self._terms)

    def coefficient(self, mono: Monomial) -> Fraction:
        return self._terms.get(mono, Fraction(0))

    @property
    def key(self) -> tuple:
        if self._key is None:
            self._key = tuple((mono_key(m), c) for m, c in self.terms())
        return self._key

    def is_zero(self) -> bool:
        return not self._terms

    def is_constant(self) -> bool:
        return not self._terms or (len(self._terms) == 1 and () in self._terms)

    def constant_value(self) -> Fraction:
        if not self.is_constant():
            raise ExpressionError(f"{self} is not a constant")
        return self._terms.get((), Fraction(0))

    def is_single_term(self) -> bool:
        return len(self._terms) == 1

    def atoms(self) -> set[Atom]:
        """Atoms occurring at top level (not inside function arguments)."""
        return {a for m in self._terms for a, _ in m}

    def all_atoms(self) -> set[Atom]:
        """Every atom, descending into function arguments."""
        seen: set[Atom] = set()
        stack = [self]
        while stack:
            e = stack.pop()
            for m in e._terms:
                for a, _ in m:
                    if a in seen:
                        continue
                    seen.add(a)
                    if isinstance(a, App):
                        stack.extend(a.args)
        return seen

    def free_names(self) -> set[str]:
        """Names of symbols, including those inside exp forms and arguments."""
        names: set[str] = set()
        for a in self.all_atoms():
            if isinstance(a, Sym):
                names.add(a.name)
            elif isinstance(a, Exp):
                names.update(n for n, _ in a.form)
        return names

    def jets(self) -> set[Jet]:
        return {a for a in self.all_atoms() if isinstance(a, Jet)}

    def depends_on(self, atom: Atom) -> bool:
        if isinstance(atom, Sym):
            return atom.name in self.free_names()
        return atom in self.all_atoms()

    # -- arithmetic -------------------------------------------------------
    def __add__(self, other: object) -> Expression:
        try:
            other = Expression.coerce(other)
        except TypeError:
            return NotImplemented
        if not other._terms:
            return self
        if not self._terms:
            return other
        acc = dict(self._terms)
        for m, c in other._terms.items():
            v = acc.get(m, 0) + c
            if v:
                acc[m] = v
            else:
                acc.pop(m, None)
        return Expression(acc)

    __radd__ = __add__

    def __neg__(self) -> Expression:
        return Expression({m: -c for m, c in self._terms.items()})

    def __pos__(self) -> Expression:
        return self

    def __sub__(self, other: object) -> Expression:
        try:
            other = Expression.coerce(other)
        except TypeError:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other: object) -> Expression:
        return Expression.coerce(other) - self

    def __mul__(self, other: object) -> Expression:
        f = _as_fraction(other)
        if f is not None:
            if f == 0:
                return Expression()
            return Expression({m: c * f for m, c in self._terms.items()})
        try:
            other = Expression.coerce(other)
        except TypeError:
            return NotImplemented
        acc: dict[Monomial, Fraction] = {}
        for m1, c1 in self._terms.items():
            for m2, c2 in other._terms.items():
                m = mono_mul(m1, m2)
                acc[m] = acc.get(m, 0) + c1 * c2
        return Expression({m: c for m, c in acc.items() if c})

    __rmul__ = __mul__

    def inverse(self) -> Expression:
        """Multiplicative inverse; only single terms are invertible."""
        if len(self._terms) != 1:
            raise ExpressionError(
                f"cannot invert the non-monomial expression {self}"
            )
        (m, c), = self._terms.items()
        return Expression({mono_pow(m, -1): 1 / c})

    def __truediv__(self, other: object) -> Expression:
        f = _as_fraction(other)
        if f is not None:
            if f == 0:
                raise ZeroDivisionError("division by zero")
            return self * (1 / f)
        try:
            other = Expression.coerce(other)
        except TypeError:
            return NotImplemented
        if other.is_zero():
            raise ZeroDivisionError("division by zero")
        return self * other.inverse()

    def __rtruediv__(self, other: object) -> Expression:
        return Expression.coerce(other) / self

    def __pow__(self, k: int) -> Expression:
        if not isinstance(k, int) or isinstance(k, bool):
            raise ExpressionError("only integer powers are supported")
        if k < 0:
            return self.inverse() ** (-k)
        if len(self._terms) == 1:
            (m, c), = self._terms.items()
            return Expression({mono_pow(m, k): c**k})
        result = Expression.const(1)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    # -- comparison -------------------------------------------------------
    def __eq__(self, other: object) -> bool:
        if isinstance(other, Expression):
            return self._terms == other._terms
        f = _as_fraction(other)
        if f is not None:
            return self._terms == ({(): f} if f else {})
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self._terms.items()))
        return self._hash

    def __bool__(self) -> bool:
        return bool(self._terms)

    def __repr__(self) -> str:
        return f"Expression({str(self)!r})"

    def __str__(self) -> str:
        from .render import render

        return render(self)


ZERO = Expression()
ONE = Expression.const(1)


def sym(name: str) -> Expression:
    return Expression.of(Sym(name))


def exp_of(form: Mapping[str, Number] | Expression) -> Expression:
    """``exp`` of a linear form given as ``{name: coeff}`` or as an Expression."""
    if isinstance(form, Expression):
        form = linear_form_coefficients(form)
    cleaned = {n: Fraction(c) for n, c in form.items() if c}
    if not cleaned:
        return ONE
    return Expression.of(Exp(cleaned.items()))


def linear_form_coefficients(e: Expression) -> dict[str, Fraction]:
    """Coefficients of ``e`` viewed as a homogeneous rational linear form."""
    out: dict[str, Fraction] = {}
    for mono, c in e.terms():
        if len(mono) != 1 or mono[0][1] != 1 or not isinstance(mono[0][0], Sym):
            from .errors import TranscendentalError

            raise TranscendentalError(
                f"exp argument must be a rational linear form in symbols, got {e}"
            )
        out[mono[0][0].name] = c
    return out


def apply_function(
    name: str,
    formals: Iterable[str],
    *args: object,
    orders: tuple[int, ...] | None = None,
) -> Expression:
    return Expression.of(
        App(name, tuple(formals), [Expression.coerce(a) for a in args], orders)
    )
