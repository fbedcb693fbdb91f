"""Parser, derivation and the differentiate-and-substitute verifiers."""

from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from painstrata.ratfunc import DivisionByZeroExpression, RationalFunction
from painstrata.symbolic import (
    Contained,
    Conserved,
    DiffVar,
    ExprSyntaxError,
    FirstOrderCurve,
    Num,
    NotConserved,
    NotContained,
    Param,
    T,
    UnsupportedExponentError,
    Var,
    canonical_equal,
    expr_to_str,
    parse_expression,
    partial_derivative,
    quotient_of_partials,
    rf,
    to_rational_function,
    total_derivative,
    verify_first_integral,
    verify_subvariety,
)


def free_leaves(e):
    if isinstance(e, (Num,)):
        return set()
    if isinstance(e, (Param, Var)) or e is T or type(e).__name__ == "TSym":
        return {e}
    out = set()
    for name in ("a", "b", "base"):
        child = getattr(e, name, None)
        if child is not None and not isinstance(child, int):
            out |= free_leaves(child)
    return out


class TestParser:
    def test_polynomial_leaves(self):
        e = parse_expression("2*y^3 + t*y + a", params=["a"])
        leaves = free_leaves(e)
        assert Var(DiffVar("y", 0)) in leaves
        assert Param("a") in leaves
        assert T in leaves

    def test_primes(self):
        e = parse_expression("y' - y^2 - t/2")
        assert Var(DiffVar("y", 1)) in free_leaves(e)
        e2 = parse_expression("y''")
        assert free_leaves(e2) == {Var(DiffVar("y", 2))}

    def test_juxtaposition_rejected(self):
        with pytest.raises(ExprSyntaxError) as err:
            parse_expression("y(y-1)/x")
        assert err.value.pos == 1

    def test_unknown_symbol_with_whitelist(self):
        with pytest.raises(ExprSyntaxError, match="unknown symbol 'z'"):
            parse_expression("z + 1", variables=["x", "y"])
        parse_expression("x + 1", variables=["x", "y"])

    def test_symbolic_exponent(self):
        with pytest.raises(UnsupportedExponentError, match="log-relation"):
            parse_expression("y^c*(y-1)/x", params=["c"])

    def test_negative_exponent(self):
        with pytest.raises(ExprSyntaxError, match="division"):
            parse_expression("y^-2")

    def test_prime_on_t_and_params(self):
        with pytest.raises(ExprSyntaxError):
            parse_expression("t'")
        with pytest.raises(ExprSyntaxError):
            parse_expression("a'", params=["a"])

    def test_error_positions(self):
        with pytest.raises(ExprSyntaxError) as err:
            parse_expression("y + * 2")
        assert err.value.pos == 4

    def test_unary_minus_chain(self):
        assert canonical_equal(parse_expression("--y"), parse_expression("y"))
        assert canonical_equal(parse_expression("-y + y"), Num(Fraction(0)))

    @pytest.mark.parametrize("text", [
        "2*y^3 + t*y + a",
        "(y + 1)^2/(t - 3)",
        "-y'/(2*t) + 1/2",
        "y''*y - t^4",
    ])
    def test_printer_round_trip(self, text):
        e = parse_expression(text, params=["a"])
        again = parse_expression(expr_to_str(e), params=["a"])
        assert canonical_equal(e, again)


exprs = st.recursive(
    st.sampled_from([
        Num(Fraction(2)), Num(Fraction(-1, 2)), Num(Fraction(3)),
        T, Param("a"), Var(DiffVar("y", 0)), Var(DiffVar("y", 1)),
        Var(DiffVar("x", 0)),
    ]),
    lambda children: st.one_of(
        st.tuples(children, children).map(lambda ab: ab[0] + ab[1]),
        st.tuples(children, children).map(lambda ab: ab[0] - ab[1]),
        st.tuples(children, children).map(lambda ab: ab[0] * ab[1]),
        children.map(lambda a: a ** 2),
        children.map(lambda a: -a),
    ),
    max_leaves=8,
)


class TestDerivation:
    def test_rules(self):
        assert canonical_equal(total_derivative(T), Num(Fraction(1)))
        assert canonical_equal(total_derivative(Param("a")), Num(Fraction(0)))
        e = parse_expression("y^2 + t/2")
        assert canonical_equal(total_derivative(e), parse_expression("2*y*y' + 1/2"))
        assert canonical_equal(total_derivative(Var(DiffVar("y", 1))),
                               Var(DiffVar("y", 2)))

    def test_quotient_rule(self):
        e = parse_expression("y/t")
        assert canonical_equal(total_derivative(e),
                               parse_expression("(y'*t - y)/t^2"))

    @given(exprs, exprs)
    def test_leibniz(self, a, b):
        assert canonical_equal(total_derivative(a * b),
                               a * total_derivative(b) + b * total_derivative(a))

    @given(exprs, exprs)
    def test_additive(self, a, b):
        assert canonical_equal(total_derivative(a + b),
                               total_derivative(a) + total_derivative(b))


class TestPartials:
    # expected values frozen from the quotient rule by hand, then spot
    # checked against central finite differences below
    def test_frozen(self):
        F = rf("y^2*(y-1)/x")
        assert partial_derivative(F, "x") == rf("-y^2*(y-1)/x^2")
        assert partial_derivative(F, "y") == rf("y*(3*y-2)/x")
        assert partial_derivative(rf("5"), "x").is_zero()

    def test_finite_difference_oracle(self):
        F = rf("y^2*(y-1)/x")
        fx = partial_derivative(F, "x")
        h = 1e-6
        for x0, y0 in [(1.3, 0.4), (0.7, 2.1), (-1.1, 0.9)]:
            def val(x, y):
                env = {DiffVar("x", 0): Fraction(x), DiffVar("y", 0): Fraction(y)}
                return float(F.evaluate(env))
            numeric = (val(x0 + h, y0) - val(x0 - h, y0)) / (2 * h)
            exact = float(fx.evaluate({DiffVar("x", 0): Fraction(x0),
                                       DiffVar("y", 0): Fraction(y0)}))
            assert abs(numeric - exact) < 1e-5 * max(1.0, abs(exact))


class TestCanonicalEqual:
    def test_examples(self):
        assert canonical_equal(parse_expression("(y+1)^2"),
                               parse_expression("y^2 + 2*y + 1"))
        assert canonical_equal(parse_expression("y'*x"), parse_expression("x*y'"))
        assert not canonical_equal(parse_expression("y^3"),
                                   parse_expression("y*y*y + 1"))

    def test_division_by_zero_expression(self):
        with pytest.raises(DivisionByZeroExpression):
            canonical_equal(parse_expression("1/(y - y)"), Num(Fraction(0)))


class TestSubvariety:
    def curve(self, text):
        return FirstOrderCurve("y", rf(text))

    def test_plus_contained(self):
        out = verify_subvariety(self.curve("y^2 + t/2"), rf("2*y^3 + t*y + 1/2"))
        assert isinstance(out, Contained)

    def test_minus_contained(self):
        out = verify_subvariety(self.curve("-y^2 - t/2"), rf("2*y^3 + t*y - 1/2"))
        assert isinstance(out, Contained)

    def test_crossed_residual_one(self):
        out = verify_subvariety(self.curve("y^2 + t/2"), rf("2*y^3 + t*y - 1/2"))
        assert isinstance(out, NotContained)
        assert out.residual == RationalFunction.constant(1)

    def test_target_may_use_first_derivative(self):
        # y' = y  sits inside  y'' = y'
        out = verify_subvariety(self.curve("y"), rf("y'"))
        assert isinstance(out, Contained)

    def test_rejects_foreign_variables(self):
        with pytest.raises(ValueError):
            verify_subvariety(self.curve("y"), rf("q + y"))
        with pytest.raises(ValueError):
            verify_subvariety(self.curve("y"), rf("y''"))

    def test_curve_invariant_rejects_higher_order(self):
        with pytest.raises(ValueError):
            FirstOrderCurve("y", rf("y' + 1"))

    def test_substitution_pole_names_factor(self):
        # the target's denominator vanishes identically once y' is eliminated
        with pytest.raises(DivisionByZeroExpression, match="vanishes"):
            verify_subvariety(self.curve("y^2 + t/2"),
                              rf("1/(y' - y^2 - t/2)"))


class TestFirstIntegral:
    FIELD = {"x": rf("3*y - 2"), "y": rf("y*(y-1)/x")}

    def test_conserved(self):
        out = verify_first_integral(rf("y^2*(y-1)/x"), self.FIELD)
        assert isinstance(out, Conserved)

    def test_not_conserved(self):
        out = verify_first_integral(rf("y"), self.FIELD)
        assert isinstance(out, NotConserved)
        assert out.residual == rf("y*(y-1)/x")

    def test_missing_component(self):
        with pytest.raises(ValueError, match="field component"):
            verify_first_integral(rf("z"), self.FIELD)

    def test_non_autonomous_candidate(self):
        with pytest.raises(ValueError, match="autonomous"):
            verify_first_integral(rf("y + t"), self.FIELD)


class TestQuotientOfPartials:
    @pytest.mark.parametrize("c", range(1, 6))
    def test_identity_family(self, c):
        # c*y + y - c  =  (c+1)*y - c, so both spellings must match exactly
        F = rf(f"y^{c}*(y-1)/x")
        expected = rf(f"y*(y-1)/(x*({c + 1}*y - {c}))")
        spelled = rf(f"y*(y-1)/(x*({c}*y + y - {c}))")
        assert expected == spelled
        assert quotient_of_partials(F) == expected

    def test_direct_partials(self):
        assert quotient_of_partials(rf("x*y")) == rf("-y/x")

    def test_frozen_cubic(self):
        assert quotient_of_partials(rf("y^3*(y-1)/x")) == rf("y*(y-1)/(x*(4*y-3))")

    def test_requires_two_plane_variables(self):
        # canonical form drops y entirely, so the plane precondition trips
        with pytest.raises(ValueError):
            quotient_of_partials(rf("x + y - y"))
        with pytest.raises(ValueError):
            quotient_of_partials(rf("x*y*z"))


class TestLowering:
    def test_to_rational_function(self):
        f = to_rational_function(parse_expression("(y^2 - 1)/(y - 1)"))
        assert f == rf("y + 1")

    def test_params_stay_symbolic(self):
        f = to_rational_function(parse_expression("a*y + a", params=["a"]))
        assert "a" in f.variables()
