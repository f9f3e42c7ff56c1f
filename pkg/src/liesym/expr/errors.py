from __future__ import annotations


class ExpressionError(ValueError):
    """Base class for errors raised by the expression kernel."""


class ParseError(ExpressionError):
    def __init__(self, message: str, position: int | None = None, text: str | None = None):
        self.position = position
        self.text = text
        if position is not None:
            message = f"{message} at position {position}"
        super().__init__(message)


class UnknownSymbolError(ParseError):
    pass


class ArityError(ExpressionError):
    pass


class TranscendentalError(ExpressionError):
    """A non-exponential transcendental, or exp of something not linear."""


class CyclicBindingError(ExpressionError):
    pass


class CollectError(ExpressionError):
    pass


class EvaluationError(ExpressionError):
    pass
