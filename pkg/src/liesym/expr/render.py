"""Deterministic text rendering in the same grammar the parser reads."""

from __future__ import annotations

from fractions import Fraction

from .core import App, Atom, Exp, Expression, Jet, Monomial, Sym, mono_degree, mono_key


def render_number(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def render_atom(atom: Atom) -> str:
    if isinstance(atom, Sym):
        return atom.name
    if isinstance(atom, Jet):
        return f"{atom.dep}_{atom.index}"
    if isinstance(atom, Exp):
        return f"exp({render(atom.linear_form())})"
    if isinstance(atom, App):
        args = ",".join(render(a) for a in atom.args)
        if not any(atom.orders):
            return f"{atom.name}({args})"
        slots = [f for f, k in zip(atom.formals, atom.orders) for _ in range(k)]
        return f"D[{atom.name},{','.join(slots)}]({args})"
    raise TypeError(atom)


def _render_factor(atom: Atom, power: int) -> str:
    text = render_atom(atom)
    return text if power == 1 else f"{text}^{power}"


def _render_term(mono: Monomial, c: Fraction) -> tuple[str, str]:
    """Return (sign, body) for one term."""
    sign = "-" if c < 0 else "+"
    c = abs(c)
    factors = [_render_factor(a, p) for a, p in mono]
    if not factors:
        return sign, render_number(c)
    body = "*".join(factors)
    if c != 1:
        body = f"{render_number(c)}*{body}"
    return sign, body


def display_order(e: Expression) -> list[tuple[Monomial, Fraction]]:
    """Higher-degree terms first, then the canonical monomial order."""
    return sorted(e.terms(), key=lambda mc: (-mono_degree(mc[0]), mono_key(mc[0])))


def render(e: Expression) -> str:
    if e.is_zero():
        return "0"
    out = []
    for i, (mono, c) in enumerate(display_order(e)):
        sign, body = _render_term(mono, c)
        if i == 0:
            out.append(body if sign == "+" else f"-{body}")
        else:
            out.append(f" {sign} {body}")
    return "".join(out)


_GREEK = {"Phi": r"\Phi", "Psi": r"\Psi", "alpha": r"\alpha", "beta": r"\beta", "gamma": r"\gamma", "delta": r"\delta"}


def _latex_number(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else rf"\frac{{{c.numerator}}}{{{c.denominator}}}"


def _latex_atom(atom: Atom) -> str:
    if isinstance(atom, Sym):
        return _GREEK.get(atom.name, atom.name)
    if isinstance(atom, Jet):
        return f"{atom.dep}_{{{atom.index}}}"
    if isinstance(atom, Exp):
        return f"e^{{{render_latex(atom.linear_form())}}}"
    if isinstance(atom, App):
        name = _GREEK.get(atom.name, atom.name)
        args = ",".join(render_latex(a) for a in atom.args)
        if not any(atom.orders):
            return f"{name}({args})"
        if len(atom.orders) == 1:
            return f"{name}{chr(39) * atom.orders[0]}({args})"
        slots = "".join(f for f, k in zip(atom.formals, atom.orders) for _ in range(k))
        return f"{name}_{{{slots}}}({args})"
    raise TypeError(atom)


def render_latex(e: Expression) -> str:
    """LaTeX for table output; not parsed back."""
    if e.is_zero():
        return "0"
    out = []
    for i, (mono, c) in enumerate(display_order(e)):
        sign = "-" if c < 0 else "+"
        c = abs(c)
        factors = []
        for atom, p in mono:
            text = _latex_atom(atom)
            factors.append(text if p == 1 else f"{text}^{{{p}}}")
        body = " ".join(factors)
        if not factors:
            body = _latex_number(c)
        elif c != 1:
            body = f"{_latex_number(c)} {body}"
        out.append((body if sign == "+" else f"-{body}") if i == 0 else f" {sign} {body}")
    return "".join(out)
