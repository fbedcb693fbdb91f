"""The dynamical systems, parameter groups and coordinate changes.

Families are identified by their CLI tags: ``p2 p3 p4 p5 p6 xc``.  The second
family is stored as the first-order pair (y, y1); the third through fifth
families are the usual (q, p) Hamiltonian systems with the 1/t factor moved
to the right-hand side (t = 0 is a fixed singularity); ``xc`` is the planar
field  x' = c*y + y - c,  y' = y*(y-1)/x.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence, Union

from .exactnum import ComplexRational, ParameterParseError, parse_cgauss
from .ratfunc import RationalFunction
from .symbolic import FirstOrderCurve, rf


class Family(enum.Enum):
    PII = "p2"
    PIII = "p3"
    PIV = "p4"
    PV = "p5"
    PVI = "p6"
    XC = "xc"


PARAM_COUNT = {
    Family.PII: 1,
    Family.PIII: 2,
    Family.PIV: 3,
    Family.PV: 4,
    Family.PVI: 4,
    Family.XC: 1,
}


class SpecialValue(enum.Enum):
    """Non-Q(i) parameter tags accepted on the wire."""

    GENERIC = "generic"
    NON_RATIONAL = "nonrational"


Coord = Union[ComplexRational, SpecialValue]


class ConstraintError(ValueError):
    """Parameter vector violates a family constraint (dimension, hyperplane)."""


class PoleError(ZeroDivisionError):
    """Coordinate change evaluated at its pole."""


class SystemUnavailableError(ValueError):
    """No explicit first-order system is shipped for this family."""


def _coerce_coord(value) -> Coord:
    if isinstance(value, SpecialValue):
        return value
    if isinstance(value, ComplexRational):
        return value
    if isinstance(value, (int, Fraction)):
        return ComplexRational(Fraction(value))
    raise TypeError(f"cannot treat {value!r} as a parameter coordinate")


def parse_coord(token: str) -> Coord:
    token = token.strip().lower()
    for tag in SpecialValue:
        if token == tag.value:
            return tag
    return parse_cgauss(token)


def coord_to_str(c: Coord) -> str:
    return c.value if isinstance(c, SpecialValue) else str(c)


@dataclass(frozen=True)
class FamilyInstance:
    """A family tag plus its exact parameter vector."""

    family: Family
    params: tuple[Coord, ...]

    def __post_init__(self):
        object.__setattr__(self, "params",
                           tuple(_coerce_coord(p) for p in self.params))
        expected = PARAM_COUNT[self.family]
        if len(self.params) != expected:
            raise ConstraintError(
                f"{self.family.value} takes {expected} parameter(s), "
                f"got {len(self.params)}")
        concrete = [p for p in self.params if isinstance(p, ComplexRational)]
        if self.family in (Family.PIV, Family.PV) and len(concrete) == len(self.params):
            total = sum(concrete, ComplexRational())
            if total:
                raise ConstraintError(
                    f"{self.family.value} parameters must sum to zero exactly "
                    f"(got {total})")
        if self.family is Family.XC:
            c = self.params[0]
            if isinstance(c, ComplexRational) and not c.is_real:
                raise ConstraintError("the coupling constant must be a real "
                                      "rational or tagged nonrational")

    @classmethod
    def from_strings(cls, family: Family | str, tokens: Iterable[str]) -> "FamilyInstance":
        if isinstance(family, str):
            try:
                family = Family(family)
            except ValueError:
                raise ParameterParseError(f"unknown family {family!r}") from None
        return cls(family, tuple(parse_coord(tok) for tok in tokens))

    def is_concrete(self) -> bool:
        return all(isinstance(p, ComplexRational) for p in self.params)


# --------------------------------------------------------------------------
# Affine transformation groups for the third and fourth families.
# --------------------------------------------------------------------------

class P3Generator(enum.Enum):
    S1 = "s1"
    S2 = "s2"
    S3 = "s3"
    S4 = "s4"


class P4Generator(enum.Enum):
    S0 = "s0"
    S1 = "s1"
    S2 = "s2"
    TMINUS = "tminus"


Generator = Union[P3Generator, P4Generator]

_THIRD = ComplexRational(Fraction(1, 3))
_TM_SHIFT = (-_THIRD, -_THIRD, 2 * _THIRD)


def _generator_family(g: Generator) -> Family:
    return Family.PIII if isinstance(g, P3Generator) else Family.PIV


@dataclass(frozen=True)
class GroupWord:
    """An ordered list of generators, applied left to right."""

    family: Family
    generators: tuple[Generator, ...] = ()

    def __post_init__(self):
        for g in self.generators:
            if _generator_family(g) is not self.family:
                raise ConstraintError(f"generator {g.value} does not act on "
                                      f"{self.family.value}")

    def names(self) -> list[str]:
        return [g.value for g in self.generators]

    def __len__(self) -> int:
        return len(self.generators)


def _check_params(family: Family, v: Sequence[ComplexRational]) -> tuple:
    if len(v) != PARAM_COUNT[family]:
        raise ConstraintError(f"{family.value} parameter vector has "
                              f"{PARAM_COUNT[family]} coordinates, got {len(v)}")
    out = []
    for c in v:
        c = _coerce_coord(c)
        if isinstance(c, SpecialValue):
            raise ConstraintError("transformations require concrete Q(i) values")
        out.append(c)
    return tuple(out)


def apply_generator(g: Generator, v: Sequence[ComplexRational]) -> tuple:
    """The exact affine image of a parameter vector under one generator."""
    v = _check_params(_generator_family(g), v)
    if isinstance(g, P3Generator):
        v1, v2 = v
        if g is P3Generator.S1:
            return (v2, v1)
        if g is P3Generator.S2:
            return (-v2, -v1)
        if g is P3Generator.S3:
            return (v2 + 1, v1 - 1)
        return (-v2 + 1, -v1 + 1)
    if g is P4Generator.S1:
        return (v[1], v[0], v[2])
    if g is P4Generator.S2:
        return (v[2], v[1], v[0])
    if g is P4Generator.TMINUS:
        return tuple(c + s for c, s in zip(v, _TM_SHIFT))
    # s0 is the composite tminus^-1 s1 s2 s1 tminus (rightmost acts first)
    w = tuple(c + s for c, s in zip(v, _TM_SHIFT))
    w = apply_generator(P4Generator.S1, w)
    w = apply_generator(P4Generator.S2, w)
    w = apply_generator(P4Generator.S1, w)
    return tuple(c - s for c, s in zip(w, _TM_SHIFT))


def apply_word(word: GroupWord, v: Sequence[ComplexRational]) -> tuple:
    v = _check_params(word.family, v)
    for g in word.generators:
        v = apply_generator(g, v)
    return v


def generators_for(family: Family) -> tuple[Generator, ...]:
    if family is Family.PIII:
        return tuple(P3Generator)
    if family is Family.PIV:
        return (P4Generator.S0, P4Generator.S1, P4Generator.S2)
    raise ConstraintError(f"no transformation group is shipped for {family.value}")


# --------------------------------------------------------------------------
# Fundamental region for the fourth family.
# --------------------------------------------------------------------------

class BudgetExceededError(RuntimeError):
    """Reduction step budget ran out; carries the partial word for debugging."""

    def __init__(self, partial_word: GroupWord, value: tuple):
        super().__init__(f"reduction did not reach the fundamental region "
                         f"within {len(partial_word)} steps")
        self.partial_word = partial_word
        self.value = value


_LEX_ZERO = (Fraction(0), Fraction(0))


def _wall_values(v: tuple) -> tuple[ComplexRational, ComplexRational, ComplexRational]:
    v1, v2, v3 = v
    return (v2 - v1, v1 - v3, v3 - v2 + 1)


def _require_sum_zero(v: tuple):
    if sum(v, ComplexRational()):
        raise ConstraintError("parameter vector must lie on the sum-zero plane")


def in_fundamental_region_p4(v: Sequence[ComplexRational]) -> bool:
    """The three region conditions, each read as (Re, Im) >= (0, 0) in
    lexicographic order, applied to v2-v1, v1-v3 and v3-v2+1."""
    v = _check_params(Family.PIV, v)
    _require_sum_zero(v)
    return all(w.lex_key() >= _LEX_ZERO for w in _wall_values(v))


_WALL_GENERATOR = (P4Generator.S1, P4Generator.S2, P4Generator.S0)


def reduce_to_fundamental_region_p4(v: Sequence[ComplexRational],
                                    max_steps: int = 200) -> tuple[tuple, GroupWord]:
    """Greedy wall-crossing descent into the fundamental region.

    Returns the representative and the witnessing word (replaying the word on
    the input reproduces the output exactly).  Raises
    :class:`BudgetExceededError` rather than returning a point outside the
    region.
    """
    if max_steps < 1:
        raise ValueError("max_steps must be at least 1")
    v = _check_params(Family.PIV, v)
    _require_sum_zero(v)
    word: list[Generator] = []
    current = v
    for _ in range(max_steps):
        walls = _wall_values(current)
        violated = next((i for i, w in enumerate(walls)
                         if w.lex_key() < _LEX_ZERO), None)
        if violated is None:
            return current, GroupWord(Family.PIV, tuple(word))
        g = _WALL_GENERATOR[violated]
        word.append(g)
        current = apply_generator(g, current)
    if all(w.lex_key() >= _LEX_ZERO for w in _wall_values(current)):
        return current, GroupWord(Family.PIV, tuple(word))
    raise BudgetExceededError(GroupWord(Family.PIV, tuple(word)), current)


# --------------------------------------------------------------------------
# Orbit search (breadth-first over words; the groups are infinite, so a
# negative certificate is never produced).
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class Related:
    word: GroupWord


@dataclass(frozen=True)
class Unknown:
    searched_length: int


def orbit_search(a: Sequence[ComplexRational], b: Sequence[ComplexRational],
                 family: Family, max_word_length: int) -> Related | Unknown:
    a = _check_params(family, a)
    b = _check_params(family, b)
    gens = generators_for(family)
    if a == b:
        return Related(GroupWord(family))
    frontier = {a: ()}
    seen = {a}
    for _ in range(max_word_length):
        nxt: dict[tuple, tuple] = {}
        for value, path in frontier.items():
            for g in gens:
                image = apply_generator(g, value)
                if image in seen:
                    continue
                word = path + (g,)
                if image == b:
                    return Related(GroupWord(family, word))
                seen.add(image)
                nxt[image] = word
        frontier = nxt
        if not frontier:
            break
    return Unknown(max_word_length)


# --------------------------------------------------------------------------
# The fifth-family coordinate change.
# --------------------------------------------------------------------------

def birational_pv(Q, P, v: Sequence):
    """Map (Q, P) to (q, p):  q = Q/(Q-1),  p = -(Q-1)^2 P + (v3-v1)(Q-1).

    Works over exact Q(i) values and over floating complex numbers alike.
    The pole test is exact equality with 1.
    """
    if len(v) != 4:
        raise ConstraintError("expected the four-coordinate parameter vector")
    d = Q - 1
    if not d:
        raise PoleError("Q = 1 is a pole of the coordinate change")
    q = Q / d
    p = -(d * d) * P + (v[2] - v[0]) * d
    return q, p


# --------------------------------------------------------------------------
# Right-hand sides.
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class SystemRHS:
    """First-order system with exact rational right-hand sides."""

    family: Family
    variables: tuple[str, ...]
    rhs: tuple[RationalFunction, ...]
    t_singularities: tuple[Fraction, ...] = ()

    def as_map(self) -> dict[str, RationalFunction]:
        return dict(zip(self.variables, self.rhs))

    def free_parameters(self) -> set[str]:
        out = set()
        for f in self.rhs:
            for v in f.variables():
                if isinstance(v, str) and v != "t":
                    out.add(v)
        return out

    def reversed(self) -> "SystemRHS":
        """Negated field; only meaningful for autonomous systems."""
        return SystemRHS(self.family, self.variables,
                         tuple(-f for f in self.rhs), self.t_singularities)


_SYSTEM_TEMPLATES = {
    Family.PII: (
        ("y", "y1"),
        ("a",),
        ("y1", "2*y^3 + t*y + a"),
        (),
    ),
    Family.PIII: (
        ("q", "p"),
        ("v1", "v2"),
        ("(2*q^2*p - q^2 - v1*q + t)/t",
         "(-2*q*p^2 + 2*q*p - v1*p + (v1 + v2)/2)/t"),
        (Fraction(0),),
    ),
    Family.PIV: (
        ("q", "p"),
        ("v1", "v2", "v3"),
        ("2*p*q - q^2 - 2*t*q + 2*(v1 - v2)",
         "2*p*q - p^2 + 2*t*p + 2*(v1 - v3)"),
        (),
    ),
    Family.PV: (
        ("q", "p"),
        ("v1", "v2", "v3", "v4"),
        ("(2*q^2*p - 2*q*p + t*q^2 - t*q + (v1 - v2 - v3 + v4)*q + v2 - v1)/t",
         "(-2*q*p^2 + p^2 - 2*t*p*q + t*p - (v1 - v2 - v3 + v4)*p + (v3 - v1)*t)/t"),
        (Fraction(0),),
    ),
    Family.XC: (
        ("x", "y"),
        ("c",),
        ("c*y + y - c", "y*(y-1)/x"),
        (),
    ),
}


def system_rhs(inst: FamilyInstance) -> SystemRHS:
    """Exact right-hand sides with concrete parameters substituted in.

    Coordinates tagged generic/nonrational stay as parameter symbols; the
    numeric layer refuses systems with free symbols left over.
    """
    if inst.family is Family.PVI:
        raise SystemUnavailableError(
            "no explicit first-order system is shipped for the sixth family; "
            "only classification is available")
    variables, param_names, texts, sing = _SYSTEM_TEMPLATES[inst.family]
    env: dict[str, Fraction] = {}
    for name, value in zip(param_names, inst.params):
        if isinstance(value, SpecialValue):
            continue
        if not value.is_real:
            raise ConstraintError(
                "system right-hand sides are built over the rationals; "
                f"coordinate {name}={value} has a nonzero imaginary part")
        env[name] = value.as_fraction()
    rhs = tuple(rf(text, params=param_names, variables=variables).substitute_values(env)
                for text in texts)
    return SystemRHS(inst.family, variables, rhs, sing)


def p2_second_order_rhs(alpha) -> RationalFunction:
    """The scalar second-order right side 2*y^3 + t*y + alpha."""
    alpha = _coerce_coord(alpha)
    base = rf("2*y^3 + t*y + a", params=("a",), variables=("y",))
    if isinstance(alpha, SpecialValue):
        return base
    return base.substitute_values({"a": alpha.as_fraction()})


def riccati_curve(sign: str) -> FirstOrderCurve:
    """The two signed order-one curves sitting inside the half-integer fibers.

    ``plus`` is  y' = y^2 + t/2  (contained in the alpha = +1/2 fiber) and
    ``minus`` is  y' = -y^2 - t/2  (contained in the alpha = -1/2 fiber);
    the crossed pairings leave the constant residual 1.
    """
    if sign == "plus":
        return FirstOrderCurve("y", rf("y^2 + t/2", variables=("y",)))
    if sign == "minus":
        return FirstOrderCurve("y", rf("-y^2 - t/2", variables=("y",)))
    raise ValueError("sign must be 'plus' or 'minus'")


def xc_first_integral(c: int, convention: str = "y_minus_one") -> RationalFunction:
    """The conserved quantity of the planar field, y^c*(y-1)/x by default.

    The ``one_minus_y`` convention differs by an overall sign, which does not
    affect constancy; reports should name the convention used.
    """
    if not isinstance(c, int) or c < 0:
        raise ValueError("the exact first integral is shipped for integer c >= 0")
    numerator = "(y - 1)" if convention == "y_minus_one" else "(1 - y)"
    if convention not in ("y_minus_one", "one_minus_y"):
        raise ValueError("convention must be 'y_minus_one' or 'one_minus_y'")
    text = f"y^{c}*{numerator}/x" if c else f"{numerator}/x"
    return rf(text, variables=("x", "y"))


def imp_slope_rhs(c: int) -> RationalFunction:
    """The slope field  y*(y-1)/(x*(c*y + y - c))  of the plane curve family."""
    return rf(f"y*(y-1)/(x*({c}*y + y - {c}))", variables=("x", "y"))


# The fourth family also has a scalar form in the literature, but the printed
# equation mixes the scalar variable with a system variable in one term, so it
# is recorded only as text and never used for verification.
P4_SCALAR_RHS_TEXT = "(y')^2/(2*y) + 3/2*y^3 + 4*t*q^2 + 2*(t^2 - a)*y + b/y"
P4_SCALAR_NOTE = ("scalar form is typo-suspect (a stray q^2 appears in the "
                  "y-equation); use the (q, p) system for any verification")
