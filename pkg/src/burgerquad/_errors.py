from __future__ import annotations

from dataclasses import dataclass, fields
from typing import TYPE_CHECKING, cast

if TYPE_CHECKING:
    from burgerquad._interval import Interval


@dataclass(init=False)
class BurgerQuadError(Exception):
    """The base class that all burgerquad errors are subclasses of."""

    if not TYPE_CHECKING:
        message: str  # needed to have dataclass include message in the repr, etc

    def __init__(self, message: str, *args: object) -> None:
        super().__init__(message, *args)

    @property
    def message(self) -> str:
        return cast(str, self.args[0])

    def __str__(self) -> str:
        field_values = [
            (f.name, getattr(self, f.name)) for f in fields(self) if f.name != "message"
        ]
        values_fmt = ", ".join(f"{f}={v!r}" for (f, v) in field_values)

        if values_fmt:
            return f"{self.message}: {values_fmt}"
        return self.message


@dataclass(init=False)
class ExprSyntaxError(BurgerQuadError, ValueError):
    """Expression text does not match the expression grammar.

    `position` is the 0-based character offset of the problem in `text`;
    `line` and `column` are 1-based.
    """

    text: str
    position: int
    line: int
    column: int

    def __init__(
        self,
        message: str,
        *args: object,
        text: str,
        position: int,
        line: int = 1,
        column: int | None = None,
    ) -> None:
        super().__init__(message, *args)
        self.text = text
        self.position = position
        self.line = line
        self.column = position + 1 if column is None else column


@dataclass(init=False)
class UnknownFunctionError(ExprSyntaxError):
    name: str

    def __init__(
        self, message: str, *args: object, name: str, text: str, position: int
    ) -> None:
        super().__init__(message, *args, text=text, position=position)
        self.name = name


@dataclass(init=False)
class UnbalancedParenthesesError(ExprSyntaxError):
    pass


@dataclass(init=False)
class UnboundNameError(BurgerQuadError, LookupError):
    """An expression references a name with no value in the bindings."""

    name: str

    def __init__(self, message: str, *args: object, name: str) -> None:
        super().__init__(message, *args)
        self.name = name


@dataclass(init=False)
class EvaluationDomainError(BurgerQuadError, ArithmeticError):
    """A primitive was evaluated outside its real domain."""

    function: str
    argument: float

    def __init__(
        self, message: str, *args: object, function: str, argument: float
    ) -> None:
        super().__init__(message, *args)
        self.function = function
        self.argument = argument


@dataclass(init=False)
class DifferentiationError(BurgerQuadError, ValueError):
    function: str

    def __init__(self, message: str, *args: object, function: str) -> None:
        super().__init__(message, *args)
        self.function = function


@dataclass(init=False)
class NonConvergenceError(BurgerQuadError, ArithmeticError):
    """An iterative method stopped before meeting its tolerance.

    `estimate` is the best value available when it gave up.
    """

    estimate: float
    iterations: int

    def __init__(
        self, message: str, *args: object, estimate: float, iterations: int
    ) -> None:
        super().__init__(message, *args)
        self.estimate = estimate
        self.iterations = iterations


@dataclass(init=False)
class InvalidBracketError(BurgerQuadError, ValueError):
    bracket: tuple[float, float]
    values: tuple[float, float]

    def __init__(
        self,
        message: str,
        *args: object,
        bracket: tuple[float, float],
        values: tuple[float, float],
    ) -> None:
        super().__init__(message, *args)
        self.bracket = bracket
        self.values = values


@dataclass(init=False)
class SignChangeError(BurgerQuadError, ValueError):
    """The source term f is zero or changes sign on the validated domain."""

    u: float
    f_value: float

    def __init__(self, message: str, *args: object, u: float, f_value: float) -> None:
        super().__init__(message, *args)
        self.u = u
        self.f_value = f_value


@dataclass(init=False)
class RangeError(BurgerQuadError, ValueError):
    value: float
    attained: Interval

    def __init__(
        self, message: str, *args: object, value: float, attained: Interval
    ) -> None:
        super().__init__(message, *args)
        self.value = value
        self.attained = attained


@dataclass(init=False)
class EllNotCoveredError(BurgerQuadError, ValueError):
    m: int
    n: int

    def __init__(self, message: str, *args: object, m: int, n: int) -> None:
        super().__init__(message, *args)
        self.m = m
        self.n = n


class EmptyReportError(BurgerQuadError, ValueError):
    pass


@dataclass(init=False)
class ProblemFileError(BurgerQuadError, ValueError):
    line_number: int
    line: str

    def __init__(
        self, message: str, *args: object, line_number: int, line: str
    ) -> None:
        super().__init__(message, *args)
        self.line_number = line_number
        self.line = line
