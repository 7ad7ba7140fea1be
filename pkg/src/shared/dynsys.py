"""Vector fields of autonomous systems dx/dt = f(x).

Components are written as math expressions over x1..xn and parsed by a small
recursive-descent parser. Expressions evaluate on numpy arrays of points, so a
whole verification grid is tabulated in one call.

Grammar (whitespace is insignificant):

    expr   := term (("+" | "-") term)*
    term   := factor (("*" | "/") factor)*
    factor := "-" factor | power
    power  := base ("^" factor)?
    base   := number | var | func "(" expr ")" | "(" expr ")"
    var    := "x" digit+
    func   := sin | cos | tan | exp | ln | sqrt | abs
"""

from __future__ import annotations

import logging
import math
import re
from dataclasses import dataclass, field

try:
    from typing_extensions import Callable, Optional, Sequence, Union
except ImportError:
    from typing import Callable, Optional, Sequence, Union

import numpy as np

logger = logging.getLogger(__name__)

EQUILIBRIUM_TOLERANCE = 1e-9


class ExpressionSyntaxError(ValueError):
    """Raised on malformed expression text.

    Attributes:
        offset (int): Byte offset into the source where the problem starts.
    """

    def __init__(self, message: str, offset: int) -> None:
        super().__init__(f"{message} at byte {offset}")
        self.offset = offset


class DomainError(ValueError):
    """Raised when an expression is evaluated outside its domain."""

    def __init__(
            self, reason: str, point: Sequence[float], component: Optional[int] = None
    ) -> None:
        where = f"component f{component + 1}: " if component is not None else ""
        super().__init__(f"{where}{reason} at x={tuple(float(v) for v in point)}")
        self.reason = reason
        self.point = tuple(float(v) for v in point)
        self.component = component


class EquilibriumError(ValueError):
    """Raised when the declared equilibrium does not satisfy f(x̄) = 0."""


# Expression tree


class Expr:
    """Base class of expression nodes."""

    def evaluate(self, x: np.ndarray) -> np.ndarray:
        """Evaluate on points of shape (..., n); returns shape (...)."""
        raise NotImplementedError

    def max_variable(self) -> int:
        """Return the highest variable index referenced (0 if none)."""
        raise NotImplementedError


@dataclass(frozen=True)
class Number(Expr):
    value: float

    def evaluate(self, x: np.ndarray) -> np.ndarray:
        return np.full(np.shape(x)[:-1], self.value, dtype=float)

    def max_variable(self) -> int:
        return 0


@dataclass(frozen=True)
class Variable(Expr):
    index: int
    """One-based index, x1 is 1."""

    def evaluate(self, x: np.ndarray) -> np.ndarray:
        return np.asarray(x, dtype=float)[..., self.index - 1]

    def max_variable(self) -> int:
        return self.index


@dataclass(frozen=True)
class Negate(Expr):
    operand: Expr

    def evaluate(self, x: np.ndarray) -> np.ndarray:
        return -self.operand.evaluate(x)

    def max_variable(self) -> int:
        return self.operand.max_variable()


_BINARY: dict[str, Callable[[np.ndarray, np.ndarray], np.ndarray]] = {
    "+": np.add,
    "-": np.subtract,
    "*": np.multiply,
    "/": np.divide,
    "^": np.power,
}


@dataclass(frozen=True)
class BinaryOp(Expr):
    op: str
    left: Expr
    right: Expr

    def evaluate(self, x: np.ndarray) -> np.ndarray:
        a = self.left.evaluate(x)
        b = self.right.evaluate(x)
        with np.errstate(all="ignore"):
            result = _BINARY[self.op](a, b)
        bad = ~np.isfinite(result)
        if self.op == "^":
            bad |= (a < 0) & (b != np.floor(b))
        _raise_on(bad, x, f"{self.op!r} is undefined")
        return result

    def max_variable(self) -> int:
        return max(self.left.max_variable(), self.right.max_variable())


def _checked_log(a: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    with np.errstate(all="ignore"):
        return np.log(a), a <= 0


def _checked_sqrt(a: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    with np.errstate(all="ignore"):
        return np.sqrt(a), a < 0


FUNCTIONS: dict[str, Callable[[np.ndarray], tuple[np.ndarray, np.ndarray]]] = {
    "sin": lambda a: (np.sin(a), np.zeros(np.shape(a), dtype=bool)),
    "cos": lambda a: (np.cos(a), np.zeros(np.shape(a), dtype=bool)),
    "tan": lambda a: (np.tan(a), np.zeros(np.shape(a), dtype=bool)),
    "exp": lambda a: (np.exp(a), np.zeros(np.shape(a), dtype=bool)),
    "ln": _checked_log,
    "sqrt": _checked_sqrt,
    "abs": lambda a: (np.abs(a), np.zeros(np.shape(a), dtype=bool)),
}


@dataclass(frozen=True)
class Call(Expr):
    func: str
    argument: Expr

    def evaluate(self, x: np.ndarray) -> np.ndarray:
        with np.errstate(all="ignore"):
            result, bad = FUNCTIONS[self.func](self.argument.evaluate(x))
        _raise_on(bad | ~np.isfinite(result), x, f"{self.func} is undefined")
        return result

    def max_variable(self) -> int:
        return self.argument.max_variable()


def _raise_on(bad: np.ndarray, x: np.ndarray, message: str) -> None:
    if np.any(bad):
        points = np.asarray(x, dtype=float).reshape(-1, np.shape(x)[-1])
        first = int(np.flatnonzero(np.ravel(bad))[0])
        raise DomainError(message, points[first])


def format_expr(e: Expr) -> str:
    """Render an expression as fully parenthesised text that parses back."""
    match e:
        case Number(value=value):
            text = repr(float(value))
            return f"({text})" if value < 0 or text.startswith("-") else text
        case Variable(index=index):
            return f"x{index}"
        case Negate(operand=operand):
            return f"(-{format_expr(operand)})"
        case BinaryOp(op=op, left=left, right=right):
            return f"({format_expr(left)} {op} {format_expr(right)})"
        case Call(func=func, argument=argument):
            return f"{func}({format_expr(argument)})"
        case _:
            raise ValueError(f"Unsupported expression node: {e!r}")


# Parser

_TOKEN = re.compile(
    r"\s*(?:"
    r"(?P<number>(?:\d+(?:\.\d*)?|\.\d+)(?:[eE][+-]?\d+)?)"
    r"|(?P<name>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<op>[-+*/^()])"
    r")"
)
_VARIABLE = re.compile(r"x(\d+)")


@dataclass
class _Token:
    kind: str
    text: str
    offset: int


class _Parser:
    def __init__(self, text: str, dimension: int) -> None:
        self.text = text
        self.dimension = dimension
        self.tokens = self._tokenize(text)
        self.position = 0

    def _byte_offset(self, index: int) -> int:
        return len(self.text[:index].encode("utf-8"))

    def _tokenize(self, text: str) -> list[_Token]:
        tokens: list[_Token] = []
        index = 0
        while index < len(text):
            if text[index:].strip() == "":
                break
            match = _TOKEN.match(text, index)
            if not match or match.end() == index:
                offending = index + len(text[index:]) - len(text[index:].lstrip())
                raise ExpressionSyntaxError(
                    f"Unexpected character {text[offending]!r}",
                    self._byte_offset(offending),
                )
            kind = match.lastgroup or "op"
            start = match.start(kind)
            tokens.append(_Token(kind, match.group(kind), self._byte_offset(start)))
            index = match.end()
        tokens.append(_Token("end", "", self._byte_offset(len(text))))
        return tokens

    @property
    def current(self) -> _Token:
        return self.tokens[self.position]

    def _advance(self) -> _Token:
        token = self.current
        self.position += 1
        return token

    def _expect(self, text: str) -> None:
        if self.current.text != text:
            found = self.current.text or "end of input"
            raise ExpressionSyntaxError(
                f"Expected {text!r}, found {found!r}", self.current.offset
            )
        self._advance()

    def parse(self) -> Expr:
        expr = self._expr()
        if self.current.kind != "end":
            raise ExpressionSyntaxError(
                f"Unexpected token {self.current.text!r}", self.current.offset
            )
        return expr

    def _expr(self) -> Expr:
        node = self._term()
        while self.current.text in ("+", "-") and self.current.kind == "op":
            op = self._advance().text
            node = BinaryOp(op, node, self._term())
        return node

    def _term(self) -> Expr:
        node = self._factor()
        while self.current.text in ("*", "/") and self.current.kind == "op":
            op = self._advance().text
            node = BinaryOp(op, node, self._factor())
        return node

    def _factor(self) -> Expr:
        if self.current.kind == "op" and self.current.text == "-":
            self._advance()
            return Negate(self._factor())
        return self._power()

    def _power(self) -> Expr:
        base = self._base()
        if self.current.kind == "op" and self.current.text == "^":
            self._advance()
            return BinaryOp("^", base, self._factor())
        return base

    def _base(self) -> Expr:
        token = self.current
        if token.kind == "number":
            self._advance()
            return Number(float(token.text))
        if token.kind == "name":
            self._advance()
            variable = _VARIABLE.fullmatch(token.text)
            if variable:
                index = int(variable.group(1))
                if not 1 <= index <= self.dimension:
                    raise ExpressionSyntaxError(
                        f"Variable {token.text} out of range for dimension {self.dimension}",
                        token.offset,
                    )
                return Variable(index)
            if token.text in FUNCTIONS:
                self._expect("(")
                argument = self._expr()
                self._expect(")")
                return Call(token.text, argument)
            raise ExpressionSyntaxError(f"Unknown identifier {token.text!r}", token.offset)
        if token.kind == "op" and token.text == "(":
            self._advance()
            inner = self._expr()
            self._expect(")")
            return inner
        found = token.text or "end of input"
        raise ExpressionSyntaxError(f"Unexpected {found!r}", token.offset)


def parse_expr(text: str, dimension: int) -> Expr:
    """Parse one expression over the variables x1..x{dimension}.

    Precedence from tightest: ``^`` (right-associative), unary minus, ``* /``,
    ``+ -``. So ``-x1^2`` is ``-(x1^2)`` and ``2^3^2`` is 512.

    Raises:
        ExpressionSyntaxError: With the byte offset of the offending token.
    """
    if not text or not text.strip():
        raise ExpressionSyntaxError("Empty expression", 0)
    return _Parser(text, dimension).parse()


# Vector fields


@dataclass(frozen=True, kw_only=True)
class VectorField:
    """The right-hand side f of dx/dt = f(x) with a declared equilibrium."""

    components: tuple[Expr, ...]
    equilibrium: tuple[float, ...]
    name: Optional[str] = None
    equations: tuple[str, ...] = field(default=(), compare=False)
    """Source text of each component, when parsed from text."""

    def __post_init__(self) -> None:
        object.__setattr__(self, "components", tuple(self.components))
        object.__setattr__(self, "equilibrium", tuple(float(v) for v in self.equilibrium))
        if not self.components:
            raise ValueError("A vector field needs at least one component")
        if len(self.equilibrium) != self.dimension:
            raise ValueError(
                f"Equilibrium has {len(self.equilibrium)} entries, "
                f"field has {self.dimension} components"
            )
        for i, component in enumerate(self.components):
            if component.max_variable() > self.dimension:
                raise ValueError(
                    f"Component f{i + 1} references x{component.max_variable()} "
                    f"beyond dimension {self.dimension}"
                )
        residual = eval_field(self, self.equilibrium)
        norm = float(np.max(np.abs(residual)))
        if norm > EQUILIBRIUM_TOLERANCE:
            raise EquilibriumError(
                f"Declared equilibrium {self.equilibrium} is not an equilibrium: "
                f"|f(x̄)|∞ = {norm:.3g}"
            )

    @property
    def dimension(self) -> int:
        """Number of state variables n."""
        return len(self.components)

    @classmethod
    def from_equations(
            cls,
            equations: Sequence[str],
            equilibrium: Sequence[float],
            name: Optional[str] = None,
    ) -> "VectorField":
        """Parse one expression per component."""
        dimension = len(equations)
        components = tuple(parse_expr(text, dimension) for text in equations)
        logger.debug("Parsed %d-dimensional field %s", dimension, name or "<inline>")
        return cls(
            components=components,
            equilibrium=tuple(equilibrium),
            name=name,
            equations=tuple(equations),
        )

    def tabulate(self, points: np.ndarray) -> np.ndarray:
        """Evaluate f at each row of points, shape (P, n)."""
        points = np.atleast_2d(np.asarray(points, dtype=float))
        if points.shape[1] != self.dimension:
            raise ValueError(
                f"Point has dimension {points.shape[1]}, field expects {self.dimension}"
            )
        columns = []
        for i, component in enumerate(self.components):
            try:
                columns.append(component.evaluate(points))
            except DomainError as e:
                raise DomainError(e.reason, e.point, component=i) from e
        return np.stack(columns, axis=1)


def eval_field(vf: VectorField, x: Union[Sequence[float], np.ndarray]) -> np.ndarray:
    """Evaluate f at one point.

    Raises:
        ValueError: On a dimension mismatch or a non-finite point.
        DomainError: Naming the component and point that left the domain.
    """
    point = np.asarray(x, dtype=float)
    if point.shape != (vf.dimension,):
        raise ValueError(f"Point has shape {point.shape}, field expects ({vf.dimension},)")
    if not np.all(np.isfinite(point)):
        raise ValueError(f"Point {tuple(point)} is not finite")
    return vf.tabulate(point[None, :])[0]


# Builtins

BUILTINS = ("pendulum", "planar")


def pendulum(gravity_over_length: float = 1.0, friction: float = 1.0) -> VectorField:
    """Damped pendulum x1' = x2, x2' = -(g/l) sin(x1) - b x2, lower equilibrium."""
    if gravity_over_length == 1.0 and friction == 1.0:
        second = "-sin(x1) - x2"
    else:
        second = f"-{_literal(gravity_over_length)}*sin(x1) - {_literal(friction)}*x2"
    return VectorField.from_equations(
        ["x2", second], equilibrium=(0.0, 0.0), name="pendulum"
    )


def planar() -> VectorField:
    """Planar system x' = -x + x*y, y' = -y."""
    return VectorField.from_equations(
        ["-x1 + x1*x2", "-x2"], equilibrium=(0.0, 0.0), name="planar"
    )


def _literal(value: float) -> str:
    if not math.isfinite(value) or value < 0:
        raise ValueError(f"Builtin parameters must be finite and non-negative, got {value}")
    return repr(float(value))


def builtin(name: str, **params: float) -> VectorField:
    """Return a builtin system by name.

    Args:
        name (str): ``pendulum`` or ``planar``.
        **params: ``gravity_over_length`` and ``friction`` for the pendulum.

    Raises:
        ValueError: For an unknown name or parameter.
    """
    match name:
        case "pendulum":
            unknown = set(params) - {"gravity_over_length", "friction"}
            if unknown:
                raise ValueError(f"Unknown pendulum parameters: {sorted(unknown)}")
            field_ = pendulum(**params)
        case "planar":
            if params:
                raise ValueError(f"The planar system takes no parameters, got {sorted(params)}")
            field_ = planar()
        case _:
            raise ValueError(
                f"Unknown builtin system {name!r}. Expected one of: {', '.join(BUILTINS)}"
            )
    return field_
