"""Differential polynomial ring: arithmetic, derivation, evaluation.

Independent oracle: sympy, with each jet mapped to a derivative of an
undetermined function so the total derivative (chain rule through the
jets) can be cross-checked against symbolic differentiation.
"""

from __future__ import annotations

import random
from fractions import Fraction

import pytest
import sympy as sp

from heavenly.jets import (Context, DiffPoly, GaussianRational, GR_I, GR_ONE,
                           render_poly)

from conftest import rand_poly, rand_scalar


X, Y, T = sp.symbols("x y t")
FUNCS = {"u": sp.Function("u")(X, Y, T), "v": sp.Function("v")(X, Y, T)}
VARS = (X, Y, T)


def to_sympy(p: DiffPoly) -> sp.Expr:
    total = sp.Integer(0)
    for m, c in p.terms.items():
        term = sp.Rational(c.re.numerator, c.re.denominator) \
            + sp.I * sp.Rational(c.im.numerator, c.im.denominator)
        for (dep, midx), e in m:
            base = FUNCS[dep]
            for v, k in zip(VARS, midx):
                if k:
                    base = sp.diff(base, v, k)
            term *= base ** e
        total += term
    return total


class TestScalars:
    def test_field_axioms_sample(self):
        rng = random.Random(1)
        for _ in range(200):
            a, b, c = (rand_scalar(rng) for _ in range(3))
            assert (a + b) + c == a + (b + c)
            assert a * b == b * a
            assert a * (b + c) == a * b + a * c
            if b:
                assert (a / b) * b == a

    def test_gaussian_unit(self):
        assert GR_I * GR_I == GaussianRational(-1)
        assert GaussianRational(2, 3).conjugate() == GaussianRational(2, -3)

    def test_to_complex(self):
        z = GaussianRational(Fraction(1, 2), Fraction(-3, 4)).to_complex()
        assert z == 0.5 - 0.75j


class TestRing:
    def test_construction_and_render(self, ctx):
        p = ctx.jet("u", "x", "t") + 2 * ctx.jet("v") * ctx.jet("u", "y")
        assert render_poly(p) == "2*v*u[y]+u[x,t]"

    def test_jet_on_constant_symbol_rejected(self):
        c = Context(1, ("u",), ("alpha",))
        with pytest.raises(ValueError):
            c.jet("alpha", "x")

    def test_arithmetic_matches_sympy(self, ctx):
        rng = random.Random(2)
        for _ in range(60):
            a = rand_poly(rng, ctx)
            b = rand_poly(rng, ctx)
            assert sp.expand(to_sympy(a * b) - to_sympy(a) * to_sympy(b)) == 0
            assert sp.expand(to_sympy(a + b) - to_sympy(a) - to_sympy(b)) == 0
            assert sp.expand(to_sympy(a - b) - to_sympy(a) + to_sympy(b)) == 0

    def test_pow(self, ctx):
        a = ctx.jet("u", "x") + 1
        assert a ** 3 == a * a * a


class TestDerivation:
    def test_total_derivative_matches_sympy(self, ctx):
        rng = random.Random(3)
        for _ in range(40):
            p = rand_poly(rng, ctx)
            v = rng.choice(("x", "y", "t"))
            got = to_sympy(p.total_derivative(v))
            want = sp.diff(to_sympy(p), {"x": X, "y": Y, "t": T}[v])
            assert sp.expand(got - want) == 0

    def test_leibniz(self, ctx):
        rng = random.Random(4)
        for _ in range(100):
            a = rand_poly(rng, ctx)
            b = rand_poly(rng, ctx)
            lhs = (a * b).total_derivative("x")
            rhs = a.total_derivative("x") * b + a * b.total_derivative("x")
            assert lhs == rhs

    def test_constants_annihilated(self):
        c = Context(1, ("u",), ("alpha",))
        p = c.jet("alpha") * c.jet("u", "x")
        assert p.total_derivative("y") == c.jet("alpha") * c.jet("u", "x", "y")


class TestNumericEvaluation:
    def test_matches_direct_substitution(self, ctx):
        rng = random.Random(5)
        for _ in range(30):
            p = rand_poly(rng, ctx)
            assignment = {j: complex(rng.uniform(-2, 2), rng.uniform(-1, 1))
                          for j in p.jets()}
            expected = 0j
            for m, c in p.terms.items():
                val = c.to_complex()
                for j, e in m:
                    val *= assignment[j] ** e
                expected += val
            assert abs(p.eval_numeric(assignment) - expected) < 1e-12

    def test_missing_jet_named(self, ctx):
        p = ctx.jet("u", "x", "y")
        with pytest.raises(KeyError, match="u\\[x,y\\]"):
            p.eval_numeric({})

    def test_constant_requires_assignment(self):
        c = Context(1, ("u",), ("alpha",))
        p = c.jet("alpha") * c.jet("u")
        zero = (0,) * len(c.vars)
        with pytest.raises(KeyError):
            p.eval_numeric({("u", zero): 1.0 + 0j})
        val = p.eval_numeric({("u", zero): 2.0 + 0j,
                              ("alpha", zero): 3.0 + 0j})
        assert val == 6.0 + 0j
