"""Rational differential expressions and the differentiate-and-substitute checks.

The derivation treats ``t`` as the element with derivative 1, declared
parameter symbols as constants, and primes as derivative order, so the curve
containment and first-integral checks below are exact polynomial identities
over Q(parameter symbols).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence, Union

from .ratfunc import (
    DivisionByZeroExpression,
    RationalFunction,
    RF_ZERO,
)

T_NAME = "t"


@dataclass(frozen=True)
class DiffVar:
    """A differential indeterminate: base name plus derivative order."""

    name: str
    order: int = 0

    def sort_key(self) -> tuple:
        return (1, self.name, self.order)

    def raised(self, by: int = 1) -> "DiffVar":
        return DiffVar(self.name, self.order + by)

    def __str__(self) -> str:
        return self.name + "'" * self.order


class ExprSyntaxError(ValueError):
    """Malformed expression text, with the offending position attached."""

    def __init__(self, message: str, pos: int):
        super().__init__(f"{message} (position {pos})")
        self.pos = pos


class UnsupportedExponentError(ExprSyntaxError):
    """Exponent is not an integer literal.

    Symbolic exponents are outside the scope of exact canonical forms; the
    corresponding identities must be checked by the numeric log-relation
    route instead.
    """


class Expr:
    """Base AST node; supports operator syntax for building fixtures."""

    def __add__(self, other):
        return Add(self, _as_expr(other))

    def __radd__(self, other):
        return Add(_as_expr(other), self)

    def __sub__(self, other):
        return Sub(self, _as_expr(other))

    def __rsub__(self, other):
        return Sub(_as_expr(other), self)

    def __mul__(self, other):
        return Mul(self, _as_expr(other))

    def __rmul__(self, other):
        return Mul(_as_expr(other), self)

    def __truediv__(self, other):
        return Div(self, _as_expr(other))

    def __rtruediv__(self, other):
        return Div(_as_expr(other), self)

    def __pow__(self, exp: int):
        return Pow(self, exp)

    def __neg__(self):
        return Neg(self)

    def __str__(self) -> str:
        return expr_to_str(self)


@dataclass(frozen=True)
class Num(Expr):
    value: Fraction

    def __post_init__(self):
        object.__setattr__(self, "value", Fraction(self.value))


@dataclass(frozen=True)
class TSym(Expr):
    """The distinguished element with derivative 1."""


@dataclass(frozen=True)
class Param(Expr):
    name: str


@dataclass(frozen=True)
class Var(Expr):
    var: DiffVar


@dataclass(frozen=True)
class Add(Expr):
    a: Expr
    b: Expr


@dataclass(frozen=True)
class Sub(Expr):
    a: Expr
    b: Expr


@dataclass(frozen=True)
class Mul(Expr):
    a: Expr
    b: Expr


@dataclass(frozen=True)
class Div(Expr):
    a: Expr
    b: Expr


@dataclass(frozen=True)
class Pow(Expr):
    base: Expr
    exp: int

    def __post_init__(self):
        if not isinstance(self.exp, int) or self.exp < 0:
            raise ValueError("powers carry non-negative integer exponents; "
                             "write negative powers with division")


@dataclass(frozen=True)
class Neg(Expr):
    a: Expr


T = TSym()


def _as_expr(value) -> Expr:
    if isinstance(value, Expr):
        return value
    if isinstance(value, (int, Fraction)):
        return Num(Fraction(value))
    raise TypeError(f"cannot treat {value!r} as an expression")


def var(name: str, order: int = 0) -> Var:
    return Var(DiffVar(name, order))


def param(name: str) -> Param:
    return Param(name)


# --------------------------------------------------------------------------
# Parsing.  Grammar (EBNF); explicit '*' is required, juxtaposition is not
# multiplication:
#
#   expr    = term , { ("+" | "-") , term } ;
#   term    = unary , { ("*" | "/") , unary } ;
#   unary   = { "+" | "-" } , power ;
#   power   = atom , [ "^" , integer ] ;
#   atom    = integer | name , { "'" } | "(" , expr , ")" ;
#   name    = letter , { letter | digit | "_" } ;
#
# Names resolve to t, a declared parameter, or a differential variable;
# primes raise the derivative order.
# --------------------------------------------------------------------------

class _Parser:
    def __init__(self, text: str, params: Sequence[str], variables):
        self.text = text
        self.pos = 0
        self.params = set(params)
        self.variables = None if variables is None else set(variables)
        if T_NAME in self.params:
            raise ExprSyntaxError("'t' cannot be declared as a parameter", 0)

    def error(self, message: str, pos: int | None = None):
        raise ExprSyntaxError(message, self.pos if pos is None else pos)

    def skip_ws(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self) -> str:
        self.skip_ws()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def expect(self, ch: str):
        if self.peek() != ch:
            self.error(f"expected {ch!r}")
        self.pos += 1

    def parse(self) -> Expr:
        e = self.expr()
        if self.peek():
            self.error(f"unexpected {self.peek()!r}")
        return e

    def expr(self) -> Expr:
        e = self.term()
        while True:
            ch = self.peek()
            if ch == "+":
                self.pos += 1
                e = Add(e, self.term())
            elif ch == "-":
                self.pos += 1
                e = Sub(e, self.term())
            else:
                return e

    def term(self) -> Expr:
        e = self.unary()
        while True:
            ch = self.peek()
            if ch == "*":
                self.pos += 1
                e = Mul(e, self.unary())
            elif ch == "/":
                self.pos += 1
                e = Div(e, self.unary())
            else:
                return e

    def unary(self) -> Expr:
        negate = False
        while self.peek() in "+-":
            if self.peek() == "-":
                negate = not negate
            self.pos += 1
        e = self.power()
        return Neg(e) if negate else e

    def power(self) -> Expr:
        base = self.atom()
        if self.peek() == "^":
            self.pos += 1
            exp_pos = self.pos
            ch = self.peek()
            if ch == "-":
                self.error("negative exponents must be written with division", exp_pos)
            if ch.isalpha() or ch == "_":
                raise UnsupportedExponentError(
                    "exponent must be an integer literal; for non-integer "
                    "exponents use the numeric log-relation check", exp_pos)
            if not ch.isdigit():
                self.error("expected an integer exponent", exp_pos)
            return Pow(base, self.integer())
        return base

    def integer(self) -> int:
        self.skip_ws()
        start = self.pos
        while self.pos < len(self.text) and self.text[self.pos].isdigit():
            self.pos += 1
        if start == self.pos:
            self.error("expected an integer")
        return int(self.text[start:self.pos])

    def atom(self) -> Expr:
        ch = self.peek()
        if ch == "(":
            self.pos += 1
            e = self.expr()
            self.expect(")")
            return e
        if ch.isdigit():
            return Num(Fraction(self.integer()))
        if ch.isalpha() or ch == "_":
            return self.name()
        self.error("expected a number, a name or '('")

    def name(self) -> Expr:
        self.skip_ws()
        start = self.pos
        while self.pos < len(self.text) and (self.text[self.pos].isalnum()
                                             or self.text[self.pos] == "_"):
            self.pos += 1
        ident = self.text[start:self.pos]
        order = 0
        while self.pos < len(self.text) and self.text[self.pos] == "'":
            order += 1
            self.pos += 1
        if ident == T_NAME:
            if order:
                self.error("the time element does not take primes", start)
            return T
        if ident in self.params:
            if order:
                self.error(f"parameter {ident!r} is a constant and takes no primes",
                           start)
            return Param(ident)
        if self.variables is not None and ident not in self.variables:
            self.error(f"unknown symbol {ident!r}", start)
        return Var(DiffVar(ident, order))


def parse_expression(text: str, params: Sequence[str] = (),
                     variables: Sequence[str] | None = None) -> Expr:
    """Parse the documented grammar; unknown names become differential
    variables unless an explicit ``variables`` whitelist is given."""
    return _Parser(text, params, variables).parse()


# Printer precedences: +/- are 1, */ are 2, ^ is 3, atoms are 4.
def _precedence(e: Expr) -> int:
    if isinstance(e, (Add, Sub)):
        return 1
    if isinstance(e, (Mul, Div)):
        return 2
    if isinstance(e, Neg):
        return 1
    if isinstance(e, Pow):
        return 3
    if isinstance(e, Num):
        if e.value < 0:
            return 1
        return 4 if e.value.denominator == 1 else 2
    return 4


def _wrap(e: Expr, min_prec: int) -> str:
    s = expr_to_str(e)
    return f"({s})" if _precedence(e) < min_prec else s


def expr_to_str(e: Expr) -> str:
    """Canonical printer; emits the same grammar the parser reads."""
    if isinstance(e, Num):
        return str(e.value)
    if isinstance(e, TSym):
        return T_NAME
    if isinstance(e, Param):
        return e.name
    if isinstance(e, Var):
        return str(e.var)
    if isinstance(e, Add):
        return f"{_wrap(e.a, 1)} + {_wrap(e.b, 2)}"
    if isinstance(e, Sub):
        return f"{_wrap(e.a, 1)} - {_wrap(e.b, 2)}"
    if isinstance(e, Mul):
        return f"{_wrap(e.a, 2)}*{_wrap(e.b, 3)}"
    if isinstance(e, Div):
        return f"{_wrap(e.a, 2)}/{_wrap(e.b, 3)}"
    if isinstance(e, Pow):
        return f"{_wrap(e.base, 4)}^{e.exp}"
    if isinstance(e, Neg):
        return f"-{_wrap(e.a, 2)}"
    raise TypeError(f"not an expression node: {e!r}")


# --------------------------------------------------------------------------
# The derivation and lowering to canonical rational functions.
# --------------------------------------------------------------------------

def total_derivative(e: Expr) -> Expr:
    """Apply the derivation: t goes to 1, parameters to 0, primes go up."""
    if isinstance(e, Num) or isinstance(e, Param):
        return Num(Fraction(0))
    if isinstance(e, TSym):
        return Num(Fraction(1))
    if isinstance(e, Var):
        return Var(e.var.raised())
    if isinstance(e, Add):
        return Add(total_derivative(e.a), total_derivative(e.b))
    if isinstance(e, Sub):
        return Sub(total_derivative(e.a), total_derivative(e.b))
    if isinstance(e, Mul):
        return Add(Mul(total_derivative(e.a), e.b), Mul(e.a, total_derivative(e.b)))
    if isinstance(e, Div):
        return Div(Sub(Mul(total_derivative(e.a), e.b),
                       Mul(e.a, total_derivative(e.b))),
                   Pow(e.b, 2))
    if isinstance(e, Pow):
        if e.exp == 0:
            return Num(Fraction(0))
        if e.exp == 1:
            return total_derivative(e.base)
        return Mul(Mul(Num(Fraction(e.exp)), Pow(e.base, e.exp - 1)),
                   total_derivative(e.base))
    if isinstance(e, Neg):
        return Neg(total_derivative(e.a))
    raise TypeError(f"not an expression node: {e!r}")


def to_rational_function(e: Expr) -> RationalFunction:
    """Lower an AST to canonical form; t and parameters stay symbolic."""
    if isinstance(e, Num):
        return RationalFunction.constant(e.value)
    if isinstance(e, TSym):
        return RationalFunction.variable(T_NAME)
    if isinstance(e, Param):
        return RationalFunction.variable(e.name)
    if isinstance(e, Var):
        return RationalFunction.variable(e.var)
    if isinstance(e, Add):
        return to_rational_function(e.a) + to_rational_function(e.b)
    if isinstance(e, Sub):
        return to_rational_function(e.a) - to_rational_function(e.b)
    if isinstance(e, Mul):
        return to_rational_function(e.a) * to_rational_function(e.b)
    if isinstance(e, Div):
        return to_rational_function(e.a) / to_rational_function(e.b)
    if isinstance(e, Pow):
        return to_rational_function(e.base) ** e.exp
    if isinstance(e, Neg):
        return -to_rational_function(e.a)
    raise TypeError(f"not an expression node: {e!r}")


def rf(text: str, params: Sequence[str] = (),
       variables: Sequence[str] | None = None) -> RationalFunction:
    """Parse straight to canonical form."""
    return to_rational_function(parse_expression(text, params, variables))


ExprLike = Union[Expr, RationalFunction]


def _as_rational(e: ExprLike) -> RationalFunction:
    return e if isinstance(e, RationalFunction) else to_rational_function(e)


def canonical_equal(a: ExprLike, b: ExprLike) -> bool:
    """True iff a - b normalizes to the zero rational function."""
    return (_as_rational(a) - _as_rational(b)).is_zero()


def total_derivative_rf(f: RationalFunction) -> RationalFunction:
    """The derivation on canonical forms: sum of partials times derived vars."""
    out = RF_ZERO
    for v in f.variables():
        if isinstance(v, DiffVar):
            out = out + f.partial(v) * RationalFunction.variable(v.raised())
        elif v == T_NAME:
            out = out + f.partial(v)
        # remaining symbols are parameters, which are constants
    return out


def partial_derivative(f: RationalFunction, v) -> RationalFunction:
    """Formal partial derivative with canonical output."""
    if isinstance(v, str):
        v = DiffVar(v, 0)
    return f.partial(v)


# --------------------------------------------------------------------------
# The verification operations.
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class FirstOrderCurve:
    """An order-one curve  v' = rhs(v, t)  inside a second-order fiber."""

    variable: str
    rhs: RationalFunction

    def __post_init__(self):
        for v in self.rhs.variables():
            if isinstance(v, DiffVar):
                if v.order != 0 or v.name != self.variable:
                    raise ValueError(
                        f"curve right side may only involve {self.variable!r} "
                        f"at order zero, t and parameters; found {v}")


@dataclass(frozen=True)
class Contained:
    pass


@dataclass(frozen=True)
class NotContained:
    residual: RationalFunction


@dataclass(frozen=True)
class Conserved:
    pass


@dataclass(frozen=True)
class NotConserved:
    residual: RationalFunction


def verify_subvariety(curve: FirstOrderCurve,
                      second_order_rhs: ExprLike) -> Contained | NotContained:
    """Check that solutions of the curve satisfy  v'' = second_order_rhs.

    The curve relation is differentiated once, the first derivative is
    eliminated by substituting the curve right side, and the result is
    compared against the target with the same substitution applied.
    """
    target = _as_rational(second_order_rhs)
    y0 = DiffVar(curve.variable, 0)
    y1 = DiffVar(curve.variable, 1)
    for v in target.variables():
        if isinstance(v, DiffVar) and (v.name != curve.variable or v.order > 1):
            raise ValueError(f"target involves {v}, which is outside the "
                             f"order-one frame of the curve in {curve.variable!r}")
    implied = total_derivative_rf(curve.rhs).substitute({y1: curve.rhs})
    target_sub = target.substitute({y1: curve.rhs})
    residual = implied - target_sub
    if residual.is_zero():
        return Contained()
    return NotContained(residual)


def verify_first_integral(f: RationalFunction,
                          field_rhs: Mapping) -> Conserved | NotConserved:
    """Check that f is constant along the flow of an autonomous field."""
    rhs = {}
    for key, value in field_rhs.items():
        dv = DiffVar(key, 0) if isinstance(key, str) else key
        rhs[dv] = _as_rational(value)
    residual = RF_ZERO
    for v in f.variables():
        if isinstance(v, DiffVar):
            if v not in rhs:
                raise ValueError(f"no field component supplied for {v}")
            residual = residual + f.partial(v) * rhs[v]
        elif v == T_NAME:
            raise ValueError("first-integral check expects an autonomous candidate")
    if residual.is_zero():
        return Conserved()
    return NotConserved(residual)


def quotient_of_partials(f: RationalFunction) -> RationalFunction:
    """Return -(df/dx)/(df/dy) for a candidate in two plane variables.

    The two order-zero variables are taken in name order, so the usual
    (x, y) naming gives the slope field dy/dx implied by level sets of f.
    """
    plane = sorted((v for v in f.variables() if isinstance(v, DiffVar)),
                   key=lambda v: v.name)
    if len(plane) != 2 or any(v.order != 0 for v in plane):
        raise ValueError("expected exactly two order-zero plane variables")
    xv, yv = plane
    fy = f.partial(yv)
    if fy.is_zero():
        raise DivisionByZeroExpression(
            f"partial derivative in {yv} vanishes identically")
    return -f.partial(xv) / fy
