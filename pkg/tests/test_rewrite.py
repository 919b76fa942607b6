"""Oriented rewriting and ideal-membership certificates."""

from __future__ import annotations

from fractions import Fraction

import pytest

from heavenly.jets import Context
from heavenly.rewrite import (JetRule, MonomialRule, NonTerminationError,
                              PdeSystem, ideal_membership)


@pytest.fixture()
def burgers_like():
    ctx = Context(1, ("u",))
    # u_t -> u u_x, oriented by weighting t above x.
    rule = JetRule("u", (0, 0, 1), ctx.jet("u") * ctx.jet("u", "x"),
                   name="u_t")
    sys = PdeSystem(ctx, rules=[rule],
                    ranking={"x": Fraction(1), "y": Fraction(1),
                             "t": Fraction(3)})
    return ctx, sys


class TestJetRules:
    def test_head_rewrites(self, burgers_like):
        ctx, sys = burgers_like
        assert sys.reduce(ctx.jet("u", "t")) == ctx.jet("u") * ctx.jet("u", "x")

    def test_prolongation_on_demand(self, burgers_like):
        ctx, sys = burgers_like
        # u_xt reduces via the x-prolongation u_xt -> u_x^2 + u u_xx.
        got = sys.reduce(ctx.jet("u", "x", "t"))
        want = ctx.jet("u", "x") ** 2 + ctx.jet("u") * ctx.jet("u", "x", "x")
        assert got == want

    def test_nested_heads_eliminated(self, burgers_like):
        ctx, sys = burgers_like
        p = ctx.jet("u", "t") * ctx.jet("u", "t")
        got = sys.reduce(p)
        assert all(j[1][2] == 0 for j in got.jets())

    def test_on_shell_zero(self, burgers_like):
        ctx, sys = burgers_like
        p = ctx.jet("u", "t") - ctx.jet("u") * ctx.jet("u", "x")
        assert sys.reduce(p).is_zero()

    def test_ranking_audit_rejects_ascent(self):
        ctx = Context(1, ("u",))
        bad = JetRule("u", (1, 0, 0), ctx.jet("u", "t"))
        with pytest.raises(NonTerminationError):
            PdeSystem(ctx, rules=[bad],
                      ranking={"x": Fraction(1), "y": Fraction(1),
                               "t": Fraction(3)})


class TestMonomialRules:
    def test_algebraic_inverse_symbol(self):
        ctx = Context(1, ("u", "s"))
        s, ux = ctx.jet("s"), ctx.jet("u", "x")
        rel = MonomialRule(tuple((s * ux).terms)[0], ctx.one(), name="s*u_x")
        sys = PdeSystem(ctx, algebraic=[rel])
        assert sys.reduce(s * ux * ux) == ux
        assert sys.reduce(s * s * ux * ux) == ctx.one()
        assert sys.reduce(s * ctx.jet("u", "y")) == s * ctx.jet("u", "y")


class TestIdealMembership:
    @pytest.fixture()
    def pleb_like(self):
        ctx = Context(2, ("u",))
        g = (ctx.jet("u", "x1", "y") * ctx.jet("u", "x2", "t")
             - ctx.jet("u", "x2", "y") * ctx.jet("u", "x1", "t") - 1)
        return ctx, PdeSystem(ctx, generators=[g]), g

    def test_generator_itself(self, pleb_like):
        ctx, sys, g = pleb_like
        cert = ideal_membership(g, sys, max_order=1, max_degree=0)
        assert cert is not None
        assert cert.verify(sys)
        assert (cert.expand(sys) - g).is_zero()

    def test_derivative_of_generator(self, pleb_like):
        ctx, sys, g = pleb_like
        dg = g.total_derivative("x1")
        cert = ideal_membership(dg, sys, max_order=2, max_degree=0)
        assert cert is not None and cert.verify(sys)

    def test_nonmember_rejected(self, pleb_like):
        ctx, sys, _ = pleb_like
        # Every monomial of a generator multiple carries a t-jet, so a
        # t-jet-free polynomial can never be in the searched span.
        p = ctx.jet("u", "x1", "x1")
        assert ideal_membership(p, sys, max_order=2, max_degree=0) is None
        assert ideal_membership(ctx.one(), sys, max_order=1,
                                max_degree=0) is None

    def test_certificate_description_names_generator(self, pleb_like):
        ctx, sys, g = pleb_like
        cert = ideal_membership(g.total_derivative("y"), sys,
                                max_order=2, max_degree=0)
        assert cert is not None
        assert any("generator" in line or "G" in line or line
                   for line in cert.describe(sys))
