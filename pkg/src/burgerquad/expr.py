"""One-variable mathematical expressions: parsing, printing, evaluation and
symbolic differentiation.

Expressions carry the source term f(u), the speed g(u), the profile h(s) and
closed-form candidate solutions u(x, t). The grammar, in EBNF:

```
expr    = sum ;
sum     = product , { ( "+" | "-" ) , product } ;          (* left assoc *)
product = power , { ( "*" | "/" ) , power } ;              (* left assoc *)
power   = unary , [ "^" , power ] ;                         (* right assoc *)
unary   = "-" , unary | atom ;
atom    = number | name | name , "(" , sum , ")" | "(" , sum , ")" ;
name    = letter , { letter | digit | "_" } ;
```

Unary minus binds tighter than `^` (so `-u^2` is `(-u)^2`) but looser than
function application (`-exp(u)` is `-(exp(u))`). Whitespace is insignificant.
Functions: `exp ln sqrt sin cos tanh abs lambertw0 lambertwm1`. The names `e`
and `pi` are constants unless the caller binds them.

>>> expr = parse("(a*s + b)/c")
>>> str(expr)
'(a*s + b)/c'
>>> evaluate(expr, dict(a=1, b=0, c=2, s=4))
2.0
>>> str(differentiate(parse("u^3"), "u"))
'3*u^2'
"""

from __future__ import annotations

import math
from collections.abc import Mapping, Sequence
from dataclasses import dataclass
from functools import reduce
from typing import TYPE_CHECKING, Callable, Final, Union

import numpy as np
from lark import Lark, Token, Transformer, v_args
from lark.exceptions import UnexpectedInput, VisitError

from burgerquad._errors import (
    DifferentiationError,
    EvaluationDomainError,
    ExprSyntaxError,
    UnbalancedParenthesesError,
    UnboundNameError,
    UnknownFunctionError,
)
from burgerquad._pycompat import StrEnum, slots_if310
from burgerquad.special import WBranch, lambert_w, lambert_w_array

if TYPE_CHECKING:
    from numpy.typing import ArrayLike, NDArray
    from typing_extensions import TypeAlias

    FloatArray: TypeAlias = NDArray[np.float64]

BUILTIN_CONSTANTS: Final[Mapping[str, float]] = {"e": math.e, "pi": math.pi}

GRAMMAR: Final = r"""
    ?start: sum

    ?sum: product
        | sum "+" product   -> add
        | sum "-" product   -> sub

    ?product: power
        | product "*" power -> mul
        | product "/" power -> div

    ?power: unary
        | unary "^" power   -> pow

    ?unary: atom
        | "-" unary         -> neg

    ?atom: NUMBER           -> number
        | NAME              -> name
        | NAME "(" sum ")"  -> call
        | "(" sum ")"

    NAME: /[A-Za-z_][A-Za-z0-9_]*/
    %import common.NUMBER
    %import common.WS
    %ignore WS
"""


class Func(StrEnum):
    EXP = "exp"
    LN = "ln"
    SQRT = "sqrt"
    SIN = "sin"
    COS = "cos"
    TANH = "tanh"
    ABS = "abs"
    LAMBERTW0 = "lambertw0"
    LAMBERTWM1 = "lambertwm1"


class BinaryOperator(StrEnum):
    ADD = "+"
    SUB = "-"
    MUL = "*"
    DIV = "/"
    POW = "^"


class Expr:
    """An immutable expression tree node.

    Nodes compare structurally and are hashable, so they can be shared freely
    between threads.
    """

    __slots__ = ()

    @property
    def names(self) -> frozenset[str]:
        """Every name referenced by the tree, including `e` and `pi`."""
        return _names(self)

    @property
    def free_names(self) -> frozenset[str]:
        """Names that must be bound to evaluate the tree."""
        return frozenset(n for n in _names(self) if n not in BUILTIN_CONSTANTS)

    def __str__(self) -> str:
        return to_text(self)


@dataclass(frozen=True, **slots_if310())
class Const(Expr):
    value: float

    def __post_init__(self) -> None:
        if not math.isfinite(self.value):
            raise ValueError(f"Constants must be finite: {self.value}")
        object.__setattr__(self, "value", float(self.value))


@dataclass(frozen=True, **slots_if310())
class Name(Expr):
    name: str


@dataclass(frozen=True, **slots_if310())
class Neg(Expr):
    operand: Expr


@dataclass(frozen=True, **slots_if310())
class BinOp(Expr):
    op: BinaryOperator
    left: Expr
    right: Expr


@dataclass(frozen=True, **slots_if310())
class Call(Expr):
    func: Func
    arg: Expr


ZERO: Final = Const(0.0)
ONE: Final = Const(1.0)


def _names(e: Expr) -> frozenset[str]:
    if isinstance(e, Name):
        return frozenset((e.name,))
    if isinstance(e, Const):
        return frozenset()
    if isinstance(e, Neg):
        return _names(e.operand)
    if isinstance(e, BinOp):
        return _names(e.left) | _names(e.right)
    if isinstance(e, Call):
        return _names(e.arg)
    raise TypeError(f"Not an expression node: {e!r}")


# Parsing


def _check_parentheses(text: str) -> None:
    open_positions: list[int] = []
    for pos, char in enumerate(text):
        if char == "(":
            open_positions.append(pos)
        elif char == ")":
            if not open_positions:
                raise UnbalancedParenthesesError(
                    f"Unbalanced parentheses: ')' at position {pos} has no "
                    f"matching '('",
                    text=text,
                    position=pos,
                )
            open_positions.pop()
    if open_positions:
        pos = open_positions[-1]
        raise UnbalancedParenthesesError(
            f"Unbalanced parentheses: '(' at position {pos} is never closed",
            text=text,
            position=pos,
        )


@v_args(inline=True)
class _ExprBuilder(Transformer[Token, Expr]):
    def __init__(self, text: str) -> None:
        super().__init__()
        self.text = text

    def number(self, token: Token) -> Expr:
        return Const(float(token))

    def name(self, token: Token) -> Expr:
        return Name(str(token))

    def call(self, token: Token, arg: Expr) -> Expr:
        try:
            func = Func(str(token))
        except ValueError:
            raise UnknownFunctionError(
                f"Unknown function {str(token)!r}, expected one of "
                f"{', '.join(f.value for f in Func)}",
                name=str(token),
                text=self.text,
                position=token.start_pos or 0,
            ) from None
        return Call(func, arg)

    def neg(self, operand: Expr) -> Expr:
        # Literal negative numbers parse as constants so printing round-trips.
        if isinstance(operand, Const):
            return Const(-operand.value)
        return Neg(operand)

    def add(self, left: Expr, right: Expr) -> Expr:
        return BinOp(BinaryOperator.ADD, left, right)

    def sub(self, left: Expr, right: Expr) -> Expr:
        return BinOp(BinaryOperator.SUB, left, right)

    def mul(self, left: Expr, right: Expr) -> Expr:
        return BinOp(BinaryOperator.MUL, left, right)

    def div(self, left: Expr, right: Expr) -> Expr:
        return BinOp(BinaryOperator.DIV, left, right)

    def pow(self, left: Expr, right: Expr) -> Expr:
        return BinOp(BinaryOperator.POW, left, right)


_parser: Final = Lark(GRAMMAR, parser="lalr", start="start")


def parse(text: str) -> Expr:
    """Parse infix expression text into an expression tree.

    Raises
    ------
    UnbalancedParenthesesError
        If a `(` is never closed or a `)` has no opening partner.
    UnknownFunctionError
        If a call names a function that is not supported.
    ExprSyntaxError
        For any other text that does not match the grammar. `position` is the
        offset of the first unexpected character.

    Examples
    --------
    >>> parse("exp(a - s)") == Call(
    ...     Func.EXP, BinOp(BinaryOperator.SUB, Name("a"), Name("s"))
    ... )
    True
    >>> str(parse("2^3^2")), str(parse("(2^3)^2"))
    ('2^3^2', '(2^3)^2')
    """
    _check_parentheses(text)
    try:
        tree = _parser.parse(text)
    except UnexpectedInput as e:
        position = getattr(e, "pos_in_stream", None)
        if not isinstance(position, int) or position < 0:
            position = len(text)
        found = repr(text[position]) if position < len(text) else "end of input"
        line = getattr(e, "line", None)
        column = getattr(e, "column", None)
        raise ExprSyntaxError(
            f"Invalid expression syntax: unexpected {found} at position {position}",
            text=text,
            position=position,
            line=line if isinstance(line, int) and line > 0 else 1,
            column=column if isinstance(column, int) and column > 0 else None,
        ) from None
    try:
        return _ExprBuilder(text).transform(tree)
    except VisitError as e:
        raise e.orig_exc from None


# Printing

_SUM, _PRODUCT, _POWER, _UNARY, _ATOM = 1, 2, 3, 4, 5


def format_number(value: float) -> str:
    """Format a float so that parsing it gives back the same value.

    >>> format_number(3.0), format_number(0.25), format_number(1e-06)
    ('3', '0.25', '1e-06')
    """
    if value.is_integer() and abs(value) < 1e16:
        return str(int(value))
    return repr(value)


def _precedence(e: Expr) -> int:
    if isinstance(e, Const):
        return _UNARY if e.value < 0 else _ATOM
    if isinstance(e, (Name, Call)):
        return _ATOM
    if isinstance(e, Neg):
        return _UNARY
    if isinstance(e, BinOp):
        if e.op in (BinaryOperator.ADD, BinaryOperator.SUB):
            return _SUM
        if e.op in (BinaryOperator.MUL, BinaryOperator.DIV):
            return _PRODUCT
        return _POWER
    raise TypeError(f"Not an expression node: {e!r}")


def _format(e: Expr, min_precedence: int) -> str:
    text = _format_raw(e)
    if _precedence(e) < min_precedence:
        return f"({text})"
    return text


def _format_raw(e: Expr) -> str:
    if isinstance(e, Const):
        return format_number(e.value)
    if isinstance(e, Name):
        return e.name
    if isinstance(e, Call):
        return f"{e.func}({_format(e.arg, _SUM)})"
    if isinstance(e, Neg):
        return f"-{_format(e.operand, _UNARY)}"
    if isinstance(e, BinOp):
        if e.op in (BinaryOperator.ADD, BinaryOperator.SUB):
            return f"{_format(e.left, _SUM)} {e.op} {_format(e.right, _PRODUCT)}"
        if e.op in (BinaryOperator.MUL, BinaryOperator.DIV):
            return f"{_format(e.left, _PRODUCT)}{e.op}{_format(e.right, _POWER)}"
        return f"{_format(e.left, _UNARY)}^{_format(e.right, _POWER)}"
    raise TypeError(f"Not an expression node: {e!r}")


def to_text(e: Expr) -> str:
    """Print an expression with the fewest parentheses that parse back to it."""
    return _format(e, _SUM)


# Scalar evaluation

ScalarFn: TypeAlias = Callable[[Sequence[float]], float]
ArrayFn: TypeAlias = Callable[[Sequence["FloatArray"]], "FloatArray"]


def _domain_error(function: str, argument: float, why: str) -> EvaluationDomainError:
    return EvaluationDomainError(
        f"{function} is not defined for {argument!r}: {why}",
        function=function,
        argument=argument,
    )


def _scalar_pow(base: float, exponent: float) -> float:
    if base == 0 and exponent < 0:
        raise _domain_error("^", base, "zero raised to a negative power")
    try:
        if exponent.is_integer():
            return float(base ** int(exponent))
        if base < 0:
            raise _domain_error(
                "^", base, f"negative base with non-integer exponent {exponent!r}"
            )
        return math.pow(base, exponent)
    except OverflowError:
        raise _domain_error("^", base, f"overflow with exponent {exponent!r}") from None


def _scalar_div(numerator: float, denominator: float) -> float:
    if denominator == 0:
        raise _domain_error("/", numerator, "division by zero")
    return numerator / denominator


def _scalar_exp(x: float) -> float:
    try:
        return math.exp(x)
    except OverflowError:
        raise _domain_error("exp", x, "overflow") from None


def _scalar_ln(x: float) -> float:
    if x <= 0:
        raise _domain_error("ln", x, "argument must be positive")
    return math.log(x)


def _scalar_sqrt(x: float) -> float:
    if x < 0:
        raise _domain_error("sqrt", x, "argument must be non-negative")
    return math.sqrt(x)


_SCALAR_BINARY: Final[Mapping[BinaryOperator, Callable[[float, float], float]]] = {
    BinaryOperator.ADD: lambda a, b: a + b,
    BinaryOperator.SUB: lambda a, b: a - b,
    BinaryOperator.MUL: lambda a, b: a * b,
    BinaryOperator.DIV: _scalar_div,
    BinaryOperator.POW: _scalar_pow,
}

_SCALAR_FUNCS: Final[Mapping[Func, Callable[[float], float]]] = {
    Func.EXP: _scalar_exp,
    Func.LN: _scalar_ln,
    Func.SQRT: _scalar_sqrt,
    Func.SIN: math.sin,
    Func.COS: math.cos,
    Func.TANH: math.tanh,
    Func.ABS: abs,
    Func.LAMBERTW0: lambda z: lambert_w(z, WBranch.PRINCIPAL),
    Func.LAMBERTWM1: lambda z: lambert_w(z, WBranch.LOWER),
}


def _resolve(
    name: str, variables: Sequence[str], params: Mapping[str, float]
) -> int | float:
    """The positional index of a variable, or the value of a bound name."""
    if name in variables:
        return list(variables).index(name)
    if name in params:
        return float(params[name])
    if name in BUILTIN_CONSTANTS:
        return BUILTIN_CONSTANTS[name]
    raise UnboundNameError(f"Name {name!r} is not bound", name=name)


def _compile_scalar(
    e: Expr, variables: Sequence[str], params: Mapping[str, float]
) -> ScalarFn:
    if isinstance(e, Const):
        value = e.value
        return lambda xs: value
    if isinstance(e, Name):
        resolved = _resolve(e.name, variables, params)
        if isinstance(resolved, int):
            index = resolved
            return lambda xs: xs[index]
        return lambda xs: resolved
    if isinstance(e, Neg):
        operand = _compile_scalar(e.operand, variables, params)
        return lambda xs: -operand(xs)
    if isinstance(e, BinOp):
        left = _compile_scalar(e.left, variables, params)
        right = _compile_scalar(e.right, variables, params)
        op = _SCALAR_BINARY[e.op]
        return lambda xs: op(left(xs), right(xs))
    if isinstance(e, Call):
        arg = _compile_scalar(e.arg, variables, params)
        fn = _SCALAR_FUNCS[e.func]
        return lambda xs: fn(arg(xs))
    raise TypeError(f"Not an expression node: {e!r}")


def compile_scalar(
    e: Expr,
    variables: Sequence[str] = (),
    params: Mapping[str, float] | None = None,
) -> Callable[..., float]:
    """Compile an expression into a function of its `variables`.

    Names not in `variables` are resolved once, from `params` and then the
    builtin constants. The returned function takes the variables positionally
    and raises `EvaluationDomainError` rather than returning NaN or infinity.

    >>> g = compile_scalar(parse("m*u^(m - 1)"), ["u"], {"m": 3})
    >>> g(2.0)
    12.0
    """
    fn = _compile_scalar(e, tuple(variables), params or {})

    def evaluate_compiled(*xs: float) -> float:
        result = fn(xs)
        if not math.isfinite(result):
            raise _domain_error("expression", result, "result is not finite")
        return result

    return evaluate_compiled


def evaluate(e: Expr, bindings: Mapping[str, float]) -> float:
    """Evaluate an expression with every free name bound.

    Raises
    ------
    UnboundNameError
        If a free name has no binding.
    EvaluationDomainError
        If a primitive is applied outside its real domain.
    """
    return compile_scalar(e, (), bindings)()


# Array evaluation


def _array_pow(base: FloatArray, exponent: FloatArray) -> FloatArray:
    integral = exponent == np.round(exponent)
    ok = (base > 0) | ((base == 0) & (exponent >= 0)) | ((base < 0) & integral)
    return np.where(ok, np.power(base, exponent), np.nan)


def _array_div(numerator: FloatArray, denominator: FloatArray) -> FloatArray:
    return np.where(denominator != 0, numerator / denominator, np.nan)


_ARRAY_BINARY: Final[Mapping[BinaryOperator, Callable[..., FloatArray]]] = {
    BinaryOperator.ADD: np.add,
    BinaryOperator.SUB: np.subtract,
    BinaryOperator.MUL: np.multiply,
    BinaryOperator.DIV: _array_div,
    BinaryOperator.POW: _array_pow,
}

_ARRAY_FUNCS: Final[Mapping[Func, Callable[[FloatArray], FloatArray]]] = {
    Func.EXP: np.exp,
    Func.LN: lambda x: np.where(x > 0, np.log(x), np.nan),
    Func.SQRT: lambda x: np.where(x >= 0, np.sqrt(x), np.nan),
    Func.SIN: np.sin,
    Func.COS: np.cos,
    Func.TANH: np.tanh,
    Func.ABS: np.abs,
    Func.LAMBERTW0: lambda z: lambert_w_array(z, WBranch.PRINCIPAL),
    Func.LAMBERTWM1: lambda z: lambert_w_array(z, WBranch.LOWER),
}


def _compile_array(
    e: Expr, variables: Sequence[str], params: Mapping[str, float]
) -> ArrayFn:
    if isinstance(e, Const):
        value = np.float64(e.value)
        return lambda xs: value  # type: ignore[return-value]
    if isinstance(e, Name):
        resolved = _resolve(e.name, variables, params)
        if isinstance(resolved, int):
            index = resolved
            return lambda xs: xs[index]
        constant = np.float64(resolved)
        return lambda xs: constant  # type: ignore[return-value]
    if isinstance(e, Neg):
        operand = _compile_array(e.operand, variables, params)
        return lambda xs: np.negative(operand(xs))
    if isinstance(e, BinOp):
        left = _compile_array(e.left, variables, params)
        right = _compile_array(e.right, variables, params)
        op = _ARRAY_BINARY[e.op]
        return lambda xs: op(left(xs), right(xs))
    if isinstance(e, Call):
        arg = _compile_array(e.arg, variables, params)
        fn = _ARRAY_FUNCS[e.func]
        return lambda xs: fn(np.asarray(arg(xs), dtype=np.float64))
    raise TypeError(f"Not an expression node: {e!r}")


def compile_array(
    e: Expr,
    variables: Sequence[str] = (),
    params: Mapping[str, float] | None = None,
) -> Callable[..., FloatArray]:
    """Compile an expression into an elementwise numpy function.

    Unlike `compile_scalar`, points outside a primitive's domain (and
    non-finite results) come back as NaN, so whole scans and grids can be
    evaluated at once and the invalid points dealt with afterwards.

    >>> h = compile_array(parse("sqrt(s)"), ["s"])
    >>> h(np.array([4.0, -1.0])).tolist()
    [2.0, nan]
    """
    fn = _compile_array(e, tuple(variables), params or {})

    def evaluate_compiled(*xs: ArrayLike) -> FloatArray:
        arrays = [np.asarray(x, dtype=np.float64) for x in xs]
        shape = np.broadcast_shapes(*(a.shape for a in arrays)) if arrays else ()
        with np.errstate(all="ignore"):
            result = np.broadcast_to(fn(arrays), shape).astype(np.float64)
        result[~np.isfinite(result)] = np.nan
        return result

    return evaluate_compiled


# Construction with literal constant folding


def _fold(e: BinOp) -> Expr:
    if isinstance(e.left, Const) and isinstance(e.right, Const):
        try:
            value = _SCALAR_BINARY[e.op](e.left.value, e.right.value)
        except EvaluationDomainError:
            return e
        if math.isfinite(value):
            return Const(value)
    return e


def negate(a: Expr) -> Expr:
    if isinstance(a, Const):
        return Const(-a.value)
    if isinstance(a, Neg):
        return a.operand
    return Neg(a)


def add(a: Expr, b: Expr) -> Expr:
    if a == ZERO:
        return b
    if b == ZERO:
        return a
    return _fold(BinOp(BinaryOperator.ADD, a, b))


def sub(a: Expr, b: Expr) -> Expr:
    if b == ZERO:
        return a
    if a == ZERO:
        return negate(b)
    return _fold(BinOp(BinaryOperator.SUB, a, b))


def mul(a: Expr, b: Expr) -> Expr:
    if a == ZERO or b == ZERO:
        return ZERO
    if a == ONE:
        return b
    if b == ONE:
        return a
    return _fold(BinOp(BinaryOperator.MUL, a, b))


def div(a: Expr, b: Expr) -> Expr:
    if b == ONE:
        return a
    return _fold(BinOp(BinaryOperator.DIV, a, b))


def power(a: Expr, b: Expr) -> Expr:
    if b == ONE:
        return a
    return _fold(BinOp(BinaryOperator.POW, a, b))


def call(func: Func, a: Expr) -> Expr:
    return Call(func, a)


def product(*factors: Expr) -> Expr:
    return reduce(mul, factors, ONE)


# Differentiation


def differentiate(e: Expr, var: str) -> Expr:
    """The exact derivative of `e` with respect to `var`.

    The result is only simplified by folding literal arithmetic and dropping
    multiplications by 0 and 1. The Lambert W branches use
    `dW/dz = exp(-W)/(1 + W)`, the same as `W/(z(1 + W))` but defined at
    `z = 0`.

    Raises
    ------
    DifferentiationError
        If `var` appears inside `abs(...)`, which is not differentiable at 0.

    Examples
    --------
    >>> str(differentiate(parse("exp(u)"), "u"))
    'exp(u)'
    >>> str(differentiate(parse("tanh(2*s)"), "s"))
    '(1 - tanh(2*s)^2)*2'
    """
    if var not in e.names:
        return ZERO
    if isinstance(e, Name):
        return ONE
    if isinstance(e, Neg):
        return negate(differentiate(e.operand, var))
    if isinstance(e, BinOp):
        return _differentiate_binop(e, var)
    if isinstance(e, Call):
        return mul(_differentiate_call(e), differentiate(e.arg, var))
    raise TypeError(f"Not an expression node: {e!r}")


def _differentiate_binop(e: BinOp, var: str) -> Expr:
    a, b = e.left, e.right
    da, db = differentiate(a, var), differentiate(b, var)
    if e.op is BinaryOperator.ADD:
        return add(da, db)
    if e.op is BinaryOperator.SUB:
        return sub(da, db)
    if e.op is BinaryOperator.MUL:
        return add(mul(da, b), mul(a, db))
    if e.op is BinaryOperator.DIV:
        return div(sub(mul(da, b), mul(a, db)), power(b, Const(2)))
    # a^b
    if var not in b.names:
        return product(b, power(a, sub(b, ONE)), da)
    if var not in a.names:
        return product(e, call(Func.LN, a), db)
    return mul(e, add(mul(db, call(Func.LN, a)), div(mul(b, da), a)))


def _differentiate_call(e: Call) -> Expr:
    """The derivative of the function applied at its argument (chain rule outer)."""
    a = e.arg
    if e.func is Func.EXP:
        return e
    if e.func is Func.LN:
        return div(ONE, a)
    if e.func is Func.SQRT:
        return div(ONE, mul(Const(2), e))
    if e.func is Func.SIN:
        return call(Func.COS, a)
    if e.func is Func.COS:
        return negate(call(Func.SIN, a))
    if e.func is Func.TANH:
        return sub(ONE, power(e, Const(2)))
    if e.func in (Func.LAMBERTW0, Func.LAMBERTWM1):
        return div(call(Func.EXP, negate(e)), add(ONE, e))
    raise DifferentiationError(
        f"Cannot differentiate {e.func}(...): it is not differentiable everywhere",
        function=str(e.func),
    )


def substitute(e: Expr, name: str, replacement: Expr) -> Expr:
    """Replace every occurrence of `name` in `e` with `replacement`.

    >>> str(substitute(parse("u^2 + u"), "u", parse("-tanh(s)")))
    '-tanh(s)^2 + -tanh(s)'
    """
    if isinstance(e, Name):
        return replacement if e.name == name else e
    if isinstance(e, Const):
        return e
    if isinstance(e, Neg):
        return negate(substitute(e.operand, name, replacement))
    if isinstance(e, BinOp):
        return BinOp(
            e.op,
            substitute(e.left, name, replacement),
            substitute(e.right, name, replacement),
        )
    if isinstance(e, Call):
        return Call(e.func, substitute(e.arg, name, replacement))
    raise TypeError(f"Not an expression node: {e!r}")


def is_zero(e: Expr) -> bool:
    """Whether an expression is the literal constant 0."""
    return isinstance(e, Const) and e.value == 0


ExprLike = Union[Expr, str]


def as_expr(e: ExprLike) -> Expr:
    return parse(e) if isinstance(e, str) else e
