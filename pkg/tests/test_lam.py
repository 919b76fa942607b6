"""Spectral-parameter rationals and truncation-honest Laurent series.

Independent oracle: sympy rational functions in lambda, with jet
coefficients mapped to opaque symbols.
"""

from __future__ import annotations

import random

import sympy as sp

from heavenly.jets import Context, DiffPoly, GaussianRational
from heavenly.lam import (EXACT_ORDER, LambdaPoly, LambdaRational,
                          LaurentSeries)

from conftest import rand_poly, rand_rational

L = sp.Symbol("L")


def gr_to_sympy(c: GaussianRational) -> sp.Expr:
    return sp.Rational(c.re.numerator, c.re.denominator) \
        + sp.I * sp.Rational(c.im.numerator, c.im.denominator)


def poly_to_symbol(p: DiffPoly, table) -> sp.Expr:
    total = sp.Integer(0)
    for m, c in p.terms.items():
        term = gr_to_sympy(c)
        for j, e in m:
            term *= table.setdefault(j, sp.Symbol(f"{j[0]}_{hash(j) % 9973}")) ** e
        total += term
    return total


def rational_to_sympy(r: LambdaRational, table) -> sp.Expr:
    num = sum(poly_to_symbol(r.num.coeff(k), table) * L ** k
              for k in range(r.num.degree() + 1))
    den = sp.Integer(1)
    for p, m in r.poles.items():
        den *= (L - gr_to_sympy(p)) ** m
    return num / den


class TestRationalArithmetic:
    def test_matches_sympy(self, ctx):
        rng = random.Random(10)
        for _ in range(25):
            a = rand_rational(rng, ctx)
            b = rand_rational(rng, ctx)
            table = {}
            sa, sb = rational_to_sympy(a, table), rational_to_sympy(b, table)
            assert sp.simplify(rational_to_sympy(a * b, table) - sa * sb) == 0
            assert sp.simplify(rational_to_sympy(a + b, table) - sa - sb) == 0

    def test_common_factor_cancellation(self, ctx):
        # (L * f) / L must normalize the pole away.
        f = LambdaRational(ctx, LambdaPoly(ctx, [ctx.zero(), ctx.jet("u", "x")]),
                           {GaussianRational(0): 1})
        assert not f.poles
        assert str(f) == "u[x]"

    def test_d_lambda_matches_sympy(self, ctx):
        rng = random.Random(11)
        for _ in range(20):
            a = rand_rational(rng, ctx)
            table = {}
            got = rational_to_sympy(a.d_lambda(), table)
            want = sp.diff(rational_to_sympy(a, table), L)
            assert sp.simplify(got - want) == 0


class TestPartialFractions:
    def test_round_trip(self, ctx):
        rng = random.Random(12)
        for _ in range(40):
            f = rand_rational(rng, ctx)
            poly, principal = f.partial_fractions()
            rebuilt = LambdaRational(ctx, poly)
            for p, coeffs in principal.items():
                for k, c in enumerate(coeffs, start=1):
                    rebuilt = rebuilt + LambdaRational(
                        ctx, LambdaPoly.const(ctx, c), {p: k})
            assert (rebuilt - f).is_zero()

    def test_scalar_example_matches_apart(self, ctx):
        # (L^2 + 1) / (L (L - 1)^2)
        f = LambdaRational(ctx, LambdaPoly(ctx, [ctx.one(), ctx.zero(),
                                                 ctx.one()]),
                           {GaussianRational(0): 1, GaussianRational(1): 2})
        poly, principal = f.partial_fractions()
        want = sp.apart((L ** 2 + 1) / (L * (L - 1) ** 2), L)
        got = sum(poly_to_symbol(poly.coeff(k), {}) * L ** k
                  for k in range(poly.degree() + 1))
        for p, coeffs in principal.items():
            for k, c in enumerate(coeffs, start=1):
                got += poly_to_symbol(c, {}) / (L - gr_to_sympy(p)) ** k
        assert sp.simplify(got - want) == 0

    def test_projection_completeness(self, ctx):
        rng = random.Random(13)
        for _ in range(40):
            f = rand_rational(rng, ctx)
            plus, minus = f.split_projection()
            assert (plus + minus - f).is_zero()
            assert not plus.poles


class TestLaurentExpansion:
    def test_finite_point_matches_sympy(self, ctx):
        # u_x / ((L - 1) (L + 1)) at L = 1
        ux = ctx.jet("u", "x")
        f = LambdaRational(ctx, LambdaPoly(ctx, [ux]),
                           {GaussianRational(1): 1, GaussianRational(-1): 1})
        s = f.laurent_expand(GaussianRational(1), 3)
        mu = sp.Symbol("mu")
        a = sp.Symbol("a")
        ref = sp.series(a / ((mu) * (mu + 2)), mu, 0, 4).removeO()
        for k in range(-1, 4):
            got = poly_to_symbol(s.coeff(k), {("u", (1, 0, 0)): a})
            want = ref.coeff(mu, k)
            assert sp.simplify(got - want) == 0

    def test_infinity_matches_sympy(self, ctx):
        # (u L^2 + 1) / (L - 1) at infinity, in mu = 1/L.
        u = ctx.jet("u")
        f = LambdaRational(ctx, LambdaPoly(ctx, [ctx.one(), ctx.zero(), u]),
                           {GaussianRational(1): 1})
        s = f.laurent_expand("inf", 4)
        mu, a = sp.symbols("mu a")
        ref = sp.series((a / mu ** 2 + 1) / (1 / mu - 1), mu, 0, 5).removeO()
        ref = sp.expand(ref)
        for k in range(s.lowest_order, 5):
            got = poly_to_symbol(s.coeff(k), {("u", (0, 0, 0)): a})
            assert sp.simplify(got - ref.coeff(mu, k)) == 0

    def test_zero_is_exact(self, ctx):
        s = LambdaRational.zero(ctx).laurent_expand("inf", 2)
        assert s.known_through == EXACT_ORDER

    def test_product_trust_window(self, ctx):
        u = ctx.jet("u")
        a = LaurentSeries(ctx, "inf", -1, {-1: u}, 2)
        b = LaurentSeries(ctx, "inf", 1, {1: u}, 3)
        prod = a * b
        # trusted through min(2 + 1, 3 + (-1)) = 2
        assert prod.known_through == 2
        assert prod.coeff(0) == u * u

    def test_exact_series_does_not_degrade_products(self, ctx):
        u = ctx.jet("u")
        a = LaurentSeries(ctx, "inf", 0, {0: u}, 2)
        z = LaurentSeries(ctx, "inf", 0, {}, EXACT_ORDER)
        assert (a * z).known_through >= 2
        assert not (a * z).coeffs
