"""Shared fixtures and seeded random generators for the exact algebra.

The generators produce small, fully exact objects (Gaussian-rational
coefficients, low-degree jets, few spectral poles) so property suites can
run thousands of cases inside the time budget while every comparison
stays exact.
"""

from __future__ import annotations

import random
from fractions import Fraction

import pytest

from heavenly.jets import Context, DiffPoly, GaussianRational
from heavenly.lam import LambdaPoly, LambdaRational
from heavenly.fields import VectorField


@pytest.fixture(scope="session")
def ctx() -> Context:
    return Context(1, ("u", "v"))


def rand_scalar(rng: random.Random, imag: bool = True) -> GaussianRational:
    re = Fraction(rng.randint(-4, 4), rng.randint(1, 3))
    im = Fraction(rng.randint(-2, 2), rng.randint(1, 2)) if imag else 0
    return GaussianRational(re, im)


def jet_pool(ctx: Context):
    out = []
    for dep in ctx.dependents:
        out.append(ctx.jet(dep))
        for v in ctx.vars:
            out.append(ctx.jet(dep, v))
        out.append(ctx.jet(dep, "x", "x"))
    return out


def rand_poly(rng: random.Random, ctx: Context, max_terms: int = 2,
              max_factors: int = 2) -> DiffPoly:
    pool = jet_pool(ctx)
    out = ctx.zero()
    for _ in range(rng.randint(0, max_terms)):
        term = ctx.const(rand_scalar(rng))
        for _ in range(rng.randint(0, max_factors)):
            term = term * rng.choice(pool)
        out = out + term
    return out


def rand_lampoly(rng: random.Random, ctx: Context, max_deg: int = 2
                 ) -> LambdaPoly:
    return LambdaPoly(ctx, [rand_poly(rng, ctx)
                            for _ in range(rng.randint(0, max_deg) + 1)])


POLE_CHOICES = (GaussianRational(0), GaussianRational(1),
                GaussianRational(-1), GaussianRational(0, 1))


def rand_rational(rng: random.Random, ctx: Context, max_poles: int = 2
                  ) -> LambdaRational:
    poles = {}
    for p in rng.sample(POLE_CHOICES, rng.randint(0, max_poles)):
        poles[p] = rng.randint(1, 2)
    return LambdaRational(ctx, rand_lampoly(rng, ctx), poles)


def rand_vfield(rng: random.Random, ctx: Context, slim: bool = False
                ) -> VectorField:
    """``slim`` keeps components tiny (for triple-bracket suites whose
    cost is cubic in operand size)."""
    comps = {}
    for d in ctx.space_vars + ("lam",):
        if rng.random() < 0.8:
            if slim:
                coeffs = [rand_poly(rng, ctx, max_terms=1, max_factors=1)
                          for _ in range(rng.randint(1, 2))]
                poles = {GaussianRational(0): 1} \
                    if rng.random() < 0.3 else {}
                comps[d] = LambdaRational(ctx, LambdaPoly(ctx, coeffs),
                                          poles)
            else:
                comps[d] = rand_rational(rng, ctx, max_poles=1)
    return VectorField(ctx, comps)


def vf_equal(a: VectorField, b: VectorField) -> bool:
    return (a - b).is_zero()
