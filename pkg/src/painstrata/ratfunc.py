"""Sparse multivariate polynomials over Q and canonical rational functions.

A variable is any hashable object exposing ``sort_key() -> tuple`` (plain
strings are also accepted); monomials are sorted tuples of ``(var, exp)``
pairs.  Rational functions are kept fully reduced, with a monic denominator,
so two equal rational functions have structurally identical fields and
``==`` is a decision procedure for equality in the fraction field.
"""

from __future__ import annotations

from fractions import Fraction
from functools import cmp_to_key, reduce
from typing import Hashable, Iterable, Mapping

Monomial = tuple  # sorted tuple of (var, positive int exponent) pairs


class DivisionByZeroExpression(ZeroDivisionError):
    """Division by an expression that is identically zero."""


def _varkey(v: Hashable) -> tuple:
    key = getattr(v, "sort_key", None)
    if key is not None:
        return key()
    return (0, str(v), 0)


def _mono_mul(a: Monomial, b: Monomial) -> Monomial:
    exps: dict = {}
    for var, e in a:
        exps[var] = exps.get(var, 0) + e
    for var, e in b:
        exps[var] = exps.get(var, 0) + e
    return tuple(sorted(((v, e) for v, e in exps.items() if e), key=lambda p: _varkey(p[0])))

def _mono_divides(a: Monomial, b: Monomial) -> bool:
    """True iff monomial a divides monomial b."""
    exps = dict(b)
    return all(exps.get(var, 0) >= e for var, e in a)


def _mono_div(b: Monomial, a: Monomial) -> Monomial:
    exps = dict(b)
    for var, e in a:
        exps[var] = exps.get(var, 0) - e
    return tuple(sorted(((v, e) for v, e in exps.items() if e), key=lambda p: _varkey(p[0])))


def _mono_degree(m: Monomial) -> int:
    return sum(e for _, e in m)


def _mono_cmp(a: Monomial, b: Monomial) -> int:
    """Graded lexicographic order (earliest variable in key order dominates)."""
    da, db = _mono_degree(a), _mono_degree(b)
    if da != db:
        return -1 if da < db else 1
    ea = {_varkey(v): e for v, e in a}
    eb = {_varkey(v): e for v, e in b}
    for k in sorted(set(ea) | set(eb)):
        xa, xb = ea.get(k, 0), eb.get(k, 0)
        if xa != xb:
            return 1 if xa > xb else -1
    return 0


_MONO_KEY = cmp_to_key(_mono_cmp)


class Polynomial:
    """Immutable sparse polynomial with Fraction coefficients."""

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping[Monomial, Fraction] | None = None):
        pruned = {}
        if terms:
            for m, c in terms.items():
                c = Fraction(c)
                if c:
                    pruned[m] = c
        object.__setattr__(self, "terms", pruned)

    def __setattr__(self, name, value):
        raise AttributeError("Polynomial is immutable")

    @classmethod
    def constant(cls, value) -> "Polynomial":
        return cls({(): Fraction(value)})

    @classmethod
    def variable(cls, var) -> "Polynomial":
        return cls({((var, 1),): Fraction(1)})

    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return all(m == () for m in self.terms)

    def is_one(self) -> bool:
        return self.terms == {(): Fraction(1)}

    def constant_value(self) -> Fraction:
        if not self.terms:
            return Fraction(0)
        if not self.is_constant():
            raise ValueError("polynomial is not constant")
        return self.terms[()]

    def variables(self) -> set:
        out = set()
        for m in self.terms:
            for var, _ in m:
                out.add(var)
        return out

    def degree_in(self, var) -> int:
        deg = 0
        for m in self.terms:
            for v, e in m:
                if v == var and e > deg:
                    deg = e
        return deg

    def total_degree(self) -> int:
        return max((_mono_degree(m) for m in self.terms), default=0)

    def leading(self) -> tuple[Monomial, Fraction]:
        if not self.terms:
            raise ValueError("zero polynomial has no leading term")
        m = max(self.terms, key=_MONO_KEY)
        return m, self.terms[m]

    def leading_coeff(self) -> Fraction:
        return self.leading()[1]

    def __eq__(self, other):
        if isinstance(other, Polynomial):
            return self.terms == other.terms
        return NotImplemented

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __add__(self, other):
        other = _as_poly(other)
        if other is NotImplemented:
            return NotImplemented
        out = dict(self.terms)
        for m, c in other.terms.items():
            s = out.get(m, Fraction(0)) + c
            if s:
                out[m] = s
            else:
                out.pop(m, None)
        return _raw(out)

    __radd__ = __add__

    def __neg__(self):
        return _raw({m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        other = _as_poly(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = _as_poly(other)
        if other is NotImplemented:
            return NotImplemented
        out: dict = {}
        for ma, ca in self.terms.items():
            for mb, cb in other.terms.items():
                m = _mono_mul(ma, mb)
                s = out.get(m, Fraction(0)) + ca * cb
                if s:
                    out[m] = s
                else:
                    out.pop(m, None)
        return _raw(out)

    __rmul__ = __mul__

    def __pow__(self, exp: int):
        if not isinstance(exp, int) or exp < 0:
            raise ValueError("polynomial powers take non-negative integer exponents")
        result = ONE
        base = self
        while exp:
            if exp & 1:
                result = result * base
            base = base * base
            exp >>= 1
        return result

    def scale(self, factor) -> "Polynomial":
        factor = Fraction(factor)
        if factor == 0:
            return ZERO
        return _raw({m: c * factor for m, c in self.terms.items()})

    def partial(self, var) -> "Polynomial":
        """Formal partial derivative with respect to one variable."""
        out: dict = {}
        for m, c in self.terms.items():
            exps = dict(m)
            e = exps.get(var, 0)
            if not e:
                continue
            exps[var] = e - 1
            mono = tuple(sorted(((v, k) for v, k in exps.items() if k),
                                key=lambda p: _varkey(p[0])))
            s = out.get(mono, Fraction(0)) + c * e
            if s:
                out[mono] = s
            else:
                out.pop(mono, None)
        return _raw(out)

    def evaluate(self, env: Mapping) -> Fraction:
        total = Fraction(0)
        for m, c in self.terms.items():
            val = c
            for var, e in m:
                if var not in env:
                    raise KeyError(f"no value supplied for variable {var}")
                val *= Fraction(env[var]) ** e
            total += val
        return total

    def substitute_values(self, env: Mapping) -> "Polynomial":
        """Replace some variables by exact rational values."""
        out = ZERO
        for m, c in self.terms.items():
            coeff = c
            rest = []
            for var, e in m:
                if var in env:
                    coeff *= Fraction(env[var]) ** e
                else:
                    rest.append((var, e))
            out = out + _raw({tuple(rest): coeff})
        return out

    def as_univariate(self, var) -> dict[int, "Polynomial"]:
        """View as a univariate polynomial in ``var`` with Polynomial coefficients."""
        out: dict[int, dict] = {}
        for m, c in self.terms.items():
            exps = dict(m)
            e = exps.pop(var, 0)
            mono = tuple(sorted(exps.items(), key=lambda p: _varkey(p[0])))
            bucket = out.setdefault(e, {})
            bucket[mono] = bucket.get(mono, Fraction(0)) + c
        return {e: _raw(bucket) for e, bucket in out.items() if any(bucket.values())}

    def __str__(self) -> str:
        return poly_to_str(self)

    def __repr__(self) -> str:
        return f"Polynomial({poly_to_str(self)})"


def _raw(terms: dict) -> Polynomial:
    p = Polynomial.__new__(Polynomial)
    object.__setattr__(p, "terms", {m: c for m, c in terms.items() if c})
    return p


def _as_poly(value):
    if isinstance(value, Polynomial):
        return value
    if isinstance(value, (int, Fraction)):
        return Polynomial.constant(value)
    return NotImplemented


ZERO = Polynomial()
ONE = Polynomial.constant(1)


def _from_univariate(var, coeffs: Mapping[int, Polynomial]) -> Polynomial:
    total = ZERO
    xp = Polynomial.variable(var)
    for e, c in coeffs.items():
        total = total + c * xp ** e
    return total


def exact_div(f: Polynomial, g: Polynomial) -> Polynomial:
    """Exact polynomial quotient f / g; raises if g does not divide f."""
    if g.is_zero():
        raise DivisionByZeroExpression("exact division by zero polynomial")
    if f.is_zero():
        return ZERO
    if g.is_constant():
        return f.scale(Fraction(1) / g.constant_value())
    quot: dict = {}
    rem = f
    gm, gc = g.leading()
    while not rem.is_zero():
        rm, rc = rem.leading()
        if not _mono_divides(gm, rm):
            raise ValueError("exact_div: divisor does not divide dividend")
        m = _mono_div(rm, gm)
        c = rc / gc
        quot[m] = quot.get(m, Fraction(0)) + c
        rem = rem - _raw({m: c}) * g
    return _raw(quot)


def _prem(u: dict[int, Polynomial], v: dict[int, Polynomial]) -> dict[int, Polynomial]:
    """Pseudo-remainder of univariate-view polynomials (coefficients may grow)."""
    dv = max(v)
    lv = v[dv]
    r = dict(u)
    while r and max(r) >= dv:
        dr = max(r)
        lr = r[dr]
        shift = dr - dv
        new: dict[int, Polynomial] = {}
        for e, c in r.items():
            new[e] = c * lv
        for e, c in v.items():
            ee = e + shift
            new[ee] = new.get(ee, ZERO) - lr * c
        r = {e: c for e, c in new.items() if not c.is_zero()}
    return r


def _coeff_gcd(coeffs: Iterable[Polynomial]) -> Polynomial:
    return reduce(poly_gcd, coeffs)


def _content_primitive(f: Polynomial, var) -> tuple[Polynomial, dict[int, Polynomial]]:
    uni = f.as_univariate(var)
    cont = _coeff_gcd(uni.values())
    if cont.is_one():
        return cont, uni
    return cont, {e: exact_div(c, cont) for e, c in uni.items()}


def _monic(p: Polynomial) -> Polynomial:
    if p.is_zero():
        return p
    lc = p.leading_coeff()
    return p if lc == 1 else p.scale(Fraction(1) / lc)


def poly_gcd(f: Polynomial, g: Polynomial) -> Polynomial:
    """Monic greatest common divisor, by the primitive PRS algorithm."""
    if f.is_zero():
        return _monic(g)
    if g.is_zero():
        return _monic(f)
    if f.is_constant() or g.is_constant():
        return ONE
    fvars, gvars = f.variables(), g.variables()
    common = fvars & gvars
    if common:
        var = min(common, key=lambda v: (f.degree_in(v) + g.degree_in(v), _varkey(v)))
    else:
        # no shared variable: the gcd divides both contents viewed in any
        # variable of f, which here reduces to a constant
        return ONE
    cont_f, u = _content_primitive(f, var)
    cont_g, v = _content_primitive(g, var)
    c = poly_gcd(cont_f, cont_g)
    if max(u) < max(v):
        u, v = v, u
    while True:
        r = _prem(u, v)
        if not r:
            pp = v
            break
        if max(r) == 0:
            pp = {0: ONE}
            break
        rc = _coeff_gcd(r.values())
        u, v = v, {e: exact_div(p, rc) for e, p in r.items()}
    pp_cont = _coeff_gcd(pp.values())
    pp = {e: exact_div(p, pp_cont) for e, p in pp.items()}
    return _monic(c * _from_univariate(var, pp))


class RationalFunction:
    """Quotient of polynomials in canonical form (reduced, monic denominator)."""

    __slots__ = ("num", "den")

    def __init__(self, num: Polynomial, den: Polynomial = ONE):
        num = _as_poly(num)
        den = _as_poly(den)
        if den.is_zero():
            raise DivisionByZeroExpression("denominator is identically zero")
        if num.is_zero():
            num, den = ZERO, ONE
        else:
            g = poly_gcd(num, den)
            if not g.is_one():
                num = exact_div(num, g)
                den = exact_div(den, g)
            lc = den.leading_coeff()
            if lc != 1:
                inv = Fraction(1) / lc
                num = num.scale(inv)
                den = den.scale(inv)
        object.__setattr__(self, "num", num)
        object.__setattr__(self, "den", den)

    def __setattr__(self, name, value):
        raise AttributeError("RationalFunction is immutable")

    @classmethod
    def constant(cls, value) -> "RationalFunction":
        return cls(Polynomial.constant(value))

    @classmethod
    def variable(cls, var) -> "RationalFunction":
        return cls(Polynomial.variable(var))

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def is_polynomial(self) -> bool:
        return self.den.is_one()

    def variables(self) -> set:
        return self.num.variables() | self.den.variables()

    def __eq__(self, other):
        other = _as_rf(other)
        if other is NotImplemented:
            return NotImplemented
        return self.num == other.num and self.den == other.den

    def __hash__(self):
        return hash((self.num, self.den))

    def __add__(self, other):
        other = _as_rf(other)
        if other is NotImplemented:
            return NotImplemented
        return RationalFunction(self.num * other.den + other.num * self.den,
                                self.den * other.den)

    __radd__ = __add__

    def __neg__(self):
        return RationalFunction(-self.num, self.den)

    def __sub__(self, other):
        other = _as_rf(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = _as_rf(other)
        if other is NotImplemented:
            return NotImplemented
        return RationalFunction(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = _as_rf(other)
        if other is NotImplemented:
            return NotImplemented
        if other.is_zero():
            raise DivisionByZeroExpression("division by identically-zero expression")
        return RationalFunction(self.num * other.den, self.den * other.num)

    def __rtruediv__(self, other):
        other = _as_rf(other)
        if other is NotImplemented:
            return NotImplemented
        return other / self

    def __pow__(self, exp: int):
        if not isinstance(exp, int):
            raise ValueError("rational function powers take integer exponents")
        if exp < 0:
            if self.is_zero():
                raise DivisionByZeroExpression("negative power of zero expression")
            return RationalFunction(self.den ** (-exp), self.num ** (-exp))
        return RationalFunction(self.num ** exp, self.den ** exp)

    def partial(self, var) -> "RationalFunction":
        """Formal partial derivative, canonicalized."""
        n, d = self.num, self.den
        return RationalFunction(n.partial(var) * d - n * d.partial(var), d * d)

    def substitute(self, mapping: Mapping) -> "RationalFunction":
        """Replace variables by rational functions (or exact rational values)."""
        rf_map = {var: _as_rf(value) for var, value in mapping.items()}
        den_sub = _poly_sub(self.den, rf_map)
        if den_sub.is_zero():
            raise DivisionByZeroExpression(
                f"factor {poly_to_str(self.den)} vanishes under substitution")
        return _poly_sub(self.num, rf_map) / den_sub

    def substitute_values(self, env: Mapping) -> "RationalFunction":
        den = self.den.substitute_values(env)
        if den.is_zero():
            raise DivisionByZeroExpression("substitution makes the denominator vanish")
        return RationalFunction(self.num.substitute_values(env), den)

    def evaluate(self, env: Mapping) -> Fraction:
        den = self.den.evaluate(env)
        if den == 0:
            raise ZeroDivisionError("denominator vanishes at the evaluation point")
        return self.num.evaluate(env) / den

    def __str__(self) -> str:
        if self.den.is_one():
            return poly_to_str(self.num)
        num = poly_to_str(self.num)
        den = poly_to_str(self.den)
        return f"({num})/({den})"

    def __repr__(self) -> str:
        return f"RationalFunction({self})"


RF_ZERO = RationalFunction(ZERO)
RF_ONE = RationalFunction(ONE)


def _as_rf(value):
    if isinstance(value, RationalFunction):
        return value
    if isinstance(value, Polynomial):
        return RationalFunction(value)
    if isinstance(value, (int, Fraction)):
        return RationalFunction(Polynomial.constant(value))
    return NotImplemented


def _poly_sub(p: Polynomial, rf_map: Mapping) -> RationalFunction:
    total = RF_ZERO
    for m, c in p.terms.items():
        term = RationalFunction(Polynomial.constant(c))
        for var, e in m:
            base = rf_map.get(var)
            if base is None:
                base = RationalFunction.variable(var)
            term = term * base ** e
        total = total + term
    return total


def _frac_str(q: Fraction) -> str:
    return str(q)


def poly_to_str(p: Polynomial) -> str:
    """Canonical printer emitting the shared expression grammar."""
    if p.is_zero():
        return "0"
    monos = sorted(p.terms, key=_MONO_KEY, reverse=True)
    pieces = []
    for i, m in enumerate(monos):
        c = p.terms[m]
        factors = ["*".join(f"{v}^{e}" if e > 1 else f"{v}" for v, e in m)] if m else []
        mag = abs(c)
        if not factors:
            body = _frac_str(mag)
        elif mag == 1:
            body = factors[0]
        else:
            body = f"{_frac_str(mag)}*{factors[0]}"
        if i == 0:
            pieces.append(body if c > 0 else f"-{body}")
        else:
            pieces.append(f"+ {body}" if c > 0 else f"- {body}")
    return " ".join(pieces)
