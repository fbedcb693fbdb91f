"""Parameter-locus classification tables, with per-branch literature citations.

Morley rank and degree values are transcribed from the cited classification
results, never computed from first principles; parameters the cited results
do not cover are reported as outside scope rather than guessed.  Where the
sources disagree (the third-level stratum of the sixth family), both values
are reported as a conflict.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence, Union

from .exactnum import ComplexRational, Lattice, lattice_member
from .models import (
    ConstraintError,
    Coord,
    Family,
    FamilyInstance,
    SpecialValue,
    coord_to_str,
)


class _OutOfScope:
    """Singleton marker for values the cited literature does not cover."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "OUT_OF_SCOPE"


OUT_OF_SCOPE = _OutOfScope()


@dataclass(frozen=True)
class Exact:
    n: int

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("Morley degree is a positive integer")


@dataclass(frozen=True)
class Range:
    lo: int
    hi: int

    def __post_init__(self):
        if not 1 <= self.lo < self.hi:
            raise ValueError("degree range must be increasing")


@dataclass(frozen=True)
class Conflict:
    values: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(sorted(set(self.values))))
        if len(self.values) < 2:
            raise ValueError("a conflict needs at least two competing values")


DegreeValue = Union[Exact, Range, Conflict, _OutOfScope]

STRONGLY_MINIMAL = Exact(1)


def degree_to_json(d: DegreeValue):
    if isinstance(d, Exact):
        return {"exact": d.n}
    if isinstance(d, Range):
        return {"range": [d.lo, d.hi]}
    if isinstance(d, Conflict):
        return {"conflict": list(d.values)}
    return "outside_paper_scope"


def rank_to_json(r):
    return r if isinstance(r, int) else "outside_paper_scope"


@dataclass(frozen=True)
class Classification:
    family: Family
    params: tuple[Coord, ...]
    stratum: str
    morley_rank: Union[int, _OutOfScope]
    morley_degree: DegreeValue
    citation: str
    notes: tuple[str, ...] = ()

    def __post_init__(self):
        in_scope = not isinstance(self.morley_degree, _OutOfScope)
        if in_scope and self.morley_rank != 1:
            raise ValueError("all in-scope fibers have Morley rank one")
        if in_scope and not self.citation:
            raise ValueError("in-scope classifications carry a citation")

    def to_json_dict(self) -> dict:
        return {
            "family": self.family.value,
            "params": [coord_to_str(p) for p in self.params],
            "stratum": self.stratum,
            "morley_rank": rank_to_json(self.morley_rank),
            "morley_degree": degree_to_json(self.morley_degree),
            "citation": self.citation,
            "notes": list(self.notes),
        }


CITATIONS = {
    "p2_half": "Umemura-Watanabe 1997, 2.7-2.9 (pp. 169-170)",
    "p3_D1": "Umemura-Watanabe 1998, Lemma 3.2",
    "p3_W1": "Umemura-Watanabe 1998, Lemma 3.1",
    "p3_generic": "Umemura-Watanabe 1998, Theorem 1.2(iii)",
    "p4_D": "Umemura-Watanabe 1997, Lemma 3.11",
    "p4_W": "Umemura-Watanabe 1997, Lemma 3.10",
    "p4_generic": "Umemura-Watanabe 1997, Corollaries 3.5 & 3.9 (Condition J)",
    "p5_W": "Watanabe 1995, Lemmas 3.1-3.4",
    "p5_generic": "Watanabe 1995, Corollary 2.6",
    "p6_generic": "Watanabe 1998, Theorem 2.1(v)",
    "p6_M": "Watanabe 1998, Props. 4.1, 4.4 & 4.9",
    "p6_P": "Watanabe 1998, Props. 4.2 & 4.5",
    "p6_L_three": "Watanabe 1998, Props. 4.3 & 4.6 (degree three)",
    "p6_L_four": "Watanabe 1998, Prop. 4.4 (degree four)",
    "p6_D": "Watanabe 1998, Prop. 4.7",
}

_SM_NOTE = "strongly minimal"


def _diff(a: Coord, b: Coord):
    if isinstance(a, SpecialValue) or isinstance(b, SpecialValue):
        return None
    return a - b


def _sum(a: Coord, b: Coord):
    if isinstance(a, SpecialValue) or isinstance(b, SpecialValue):
        return None
    return a + b


def _member(value, lattice: Lattice) -> bool:
    """Lattice membership extended to generic values (never members)."""
    return value is not None and lattice_member(value, lattice)


# --------------------------------------------------------------------------
# The sixth family: 24 roots, integer-offset hyperplanes, rank strata.
# --------------------------------------------------------------------------

Root4 = tuple[int, int, int, int]


def _build_roots() -> tuple[Root4, ...]:
    roots = []
    for i, j in itertools.combinations(range(4), 2):
        for si in (1, -1):
            for sj in (1, -1):
                root = [0, 0, 0, 0]
                root[i] = si
                root[j] = sj
                roots.append(tuple(root))
    return tuple(sorted(roots, reverse=True))


ROOTS: tuple[Root4, ...] = _build_roots()
assert len(ROOTS) == 24

_P6_STRATUM_BY_RANK = ("generic", "M", "P", "L", "D")


def root_inner(v: Sequence[Coord], root: Root4):
    """Exact inner product; None when a generic coordinate is involved."""
    total = ComplexRational()
    for c, r in zip(v, root):
        if not r:
            continue
        if isinstance(c, SpecialValue):
            return None
        total = total + c * r
    return total


def integral_roots(v: Sequence[Coord]) -> list[Root4]:
    """Roots whose inner product with v is a (real) integer."""
    return [root for root in ROOTS
            if _member(root_inner(v, root), Lattice.INTEGERS)]


def _rank_and_pivots(rows: Sequence[Root4]) -> tuple[int, list[Root4]]:
    """Rank of the Q-span by exact elimination, plus one independent subset."""
    basis: list[tuple[int, list[Fraction]]] = []
    witnesses: list[Root4] = []
    for root in rows:
        row = [Fraction(x) for x in root]
        for piv, brow in basis:
            if row[piv]:
                factor = row[piv] / brow[piv]
                row = [a - factor * b for a, b in zip(row, brow)]
        piv = next((i for i, a in enumerate(row) if a), None)
        if piv is not None:
            basis.append((piv, row))
            witnesses.append(root)
            if len(basis) == 4:
                break
    return len(basis), witnesses


@dataclass(frozen=True)
class P6Stratum:
    stratum: str
    witnesses: tuple[Root4, ...]
    rank: int


def p6_stratum(v: Sequence[Coord]) -> P6Stratum:
    """Stratum of the root-hyperplane arrangement, by span dimension.

    The stratum letters M/P/L/D correspond to span dimensions 1 through 4 of
    the set of roots with integer inner product; since the hyperplane offsets
    range over all integers, this matches the unions-of-intersections picture
    with 2, 3 or 4 independent hyperplanes.
    """
    if len(v) != 4:
        raise ConstraintError("expected four coordinates")
    rank, witnesses = _rank_and_pivots(integral_roots(v))
    return P6Stratum(_P6_STRATUM_BY_RANK[rank], tuple(witnesses), rank)


# --------------------------------------------------------------------------
# classify
# --------------------------------------------------------------------------

def _out_of_scope(inst: FamilyInstance, note: str) -> Classification:
    return Classification(inst.family, inst.params, "outside_paper_scope",
                          OUT_OF_SCOPE, OUT_OF_SCOPE, "", (note,))


def _in_scope(inst: FamilyInstance, stratum: str, degree: DegreeValue,
              citation: str, notes: tuple[str, ...] = ()) -> Classification:
    if degree == STRONGLY_MINIMAL and _SM_NOTE not in notes:
        notes = notes + (_SM_NOTE,)
    return Classification(inst.family, inst.params, stratum, 1, degree,
                          citation, notes)


def _classify_p2(inst: FamilyInstance) -> Classification:
    alpha = inst.params[0]
    half = None if isinstance(alpha, SpecialValue) else alpha
    if _member(half, Lattice.HALF_PLUS_INTEGERS):
        return _in_scope(
            inst, "half_plus_integer", Exact(2), CITATIONS["p2_half"],
            ("the fiber splits as an order-one curve plus its strongly "
             "minimal complement",))
    return _out_of_scope(
        inst, "only parameters in 1/2 + Z are covered by the cited results")


def _classify_p3(inst: FamilyInstance) -> Classification:
    v1, v2 = inst.params
    s, d = _sum(v1, v2), _diff(v1, v2)
    integers = (_member(None if isinstance(v1, SpecialValue) else v1, Lattice.INTEGERS)
                and _member(None if isinstance(v2, SpecialValue) else v2,
                            Lattice.INTEGERS))
    if integers and _member(s, Lattice.TWO_INTEGERS):
        return _in_scope(inst, "D1", Exact(3), CITATIONS["p3_D1"])
    if _member(s, Lattice.TWO_INTEGERS) or _member(d, Lattice.TWO_INTEGERS):
        return _in_scope(inst, "W1_minus_D1", Exact(2), CITATIONS["p3_W1"])
    return _in_scope(inst, "generic", STRONGLY_MINIMAL, CITATIONS["p3_generic"])


def _classify_p4(inst: FamilyInstance) -> Classification:
    v1, v2, v3 = inst.params
    diffs = (_diff(v1, v2), _diff(v3, v2), _diff(v1, v3))
    integral = [_member(x, Lattice.INTEGERS) for x in diffs]
    if all(integral):
        return _in_scope(inst, "D", Exact(3), CITATIONS["p4_D"])
    if any(integral):
        return _in_scope(inst, "W_minus_D", Exact(2), CITATIONS["p4_W"])
    return _in_scope(inst, "generic", STRONGLY_MINIMAL, CITATIONS["p4_generic"])


def _classify_p5(inst: FamilyInstance) -> Classification:
    pairs = itertools.combinations(inst.params, 2)
    if any(_member(_diff(a, b), Lattice.INTEGERS) for a, b in pairs):
        return _in_scope(
            inst, "W", Range(2, 4), CITATIONS["p5_W"],
            ("the cited lemmas bound the degree without spelling out the "
             "exact locus for each value",))
    return _in_scope(inst, "generic", STRONGLY_MINIMAL, CITATIONS["p5_generic"])


def _classify_p6(inst: FamilyInstance) -> Classification:
    info = p6_stratum(inst.params)
    if info.rank == 0:
        return _in_scope(inst, "generic", STRONGLY_MINIMAL, CITATIONS["p6_generic"])
    if info.rank == 1:
        v1, v2, v3, v4 = inst.params
        if (_member(_diff(v1, v2), Lattice.HALF_PLUS_INTEGERS)
                and _member(_diff(v3, v4), Lattice.INTEGERS)):
            return _in_scope(
                inst, "M_minus_P", Exact(4), CITATIONS["p6_M"],
                ("degree-four subcase: v1 - v2 in 1/2 + Z and v3 - v4 in Z",))
        return _in_scope(inst, "M_minus_P", Exact(2), CITATIONS["p6_M"])
    if info.rank == 2:
        return _in_scope(inst, "P_minus_L", Exact(3), CITATIONS["p6_P"])
    if info.rank == 3:
        citation = f"{CITATIONS['p6_L_three']}; {CITATIONS['p6_L_four']}"
        return _in_scope(
            inst, "L_minus_D", Conflict((3, 4)), citation,
            ("the cited propositions assign both degree three and degree "
             "four to this stratum; the conflict is reported, not resolved",))
    return _in_scope(inst, "D", Exact(5), CITATIONS["p6_D"])


_CLASSIFIERS = {
    Family.PII: _classify_p2,
    Family.PIII: _classify_p3,
    Family.PIV: _classify_p4,
    Family.PV: _classify_p5,
    Family.PVI: _classify_p6,
}


def classify(inst: FamilyInstance) -> Classification:
    """Stratum, Morley rank and Morley degree for one parameter vector."""
    handler = _CLASSIFIERS.get(inst.family)
    if handler is None:
        raise TypeError("the planar field family is classified by classify_xc")
    return handler(inst)


# --------------------------------------------------------------------------
# The planar field family: rank table per coupling constant.
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class XcReport:
    """Fiber and family ranks for the planar field  x' = c*y + y - c,
    y' = y*(y-1)/x.

    The family totals are fixed: Lascar rank two, Morley rank three; the gap
    comes from the rational-c fibers having rank two while a generic constant
    gives a strongly minimal fiber.
    """

    c: Coord
    c_kind: str
    fiber_lascar: Union[int, _OutOfScope]
    fiber_morley: Union[int, _OutOfScope]
    family_lascar: int = 2
    family_morley: int = 3
    notes: tuple[str, ...] = ()

    def __post_init__(self):
        if self.family_lascar != 2 or self.family_morley != 3:
            raise ValueError("family totals are fixed at Lascar 2, Morley 3")

    def to_json_dict(self) -> dict:
        return {
            "family": Family.XC.value,
            "c": coord_to_str(self.c),
            "c_kind": self.c_kind,
            "fiber_lascar": rank_to_json(self.fiber_lascar),
            "fiber_morley": rank_to_json(self.fiber_morley),
            "family_lascar": self.family_lascar,
            "family_morley": self.family_morley,
            "notes": list(self.notes),
        }


_MINUS_ONE = ComplexRational(Fraction(-1))


def classify_xc(c) -> XcReport:
    """Rank table for one fiber of the planar field family."""
    if isinstance(c, (int, Fraction)):
        c = ComplexRational(Fraction(c))
    if isinstance(c, ComplexRational):
        if not c.is_real:
            raise ConstraintError("the coupling constant must be real rational "
                                  "or tagged nonrational")
        if c == _MINUS_ONE:
            return XcReport(
                c, "rational", OUT_OF_SCOPE, OUT_OF_SCOPE,
                notes=("the dichotomy argument assumes c != -1; fiber ranks "
                       "are not covered for this value",))
        return XcReport(
            c, "rational", 2, 2,
            notes=("rational coupling: the exact first integral descends to "
                   "a definable map to the constants, so the fiber has rank "
                   "two",))
    if isinstance(c, SpecialValue):
        return XcReport(
            c, "non_rational_constant", 1, 1,
            notes=("non-rational coupling: no algebraic relation links the "
                   "two coordinates over a constant extension, so the fiber "
                   "is strongly minimal",))
    raise TypeError(f"cannot classify coupling constant {c!r}")
