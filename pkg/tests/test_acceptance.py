"""End-to-end acceptance suite.

Nine areas, all primary: Lax verification across the catalog, family
instantiation, two pinned residual identities, the Casimir expansion
suite with negative controls, seed exactness, the conditionally
dischargeable entry, the numerics battery, and the exact-algebra
property suites (1000 randomized cases per property).
"""

from __future__ import annotations

import random
import time

import pytest
from click.testing import CliRunner

from heavenly.catalog import base_k, entry_to_json, get_entry
from heavenly.casimir import GradientExpansion, casimir_residual_order
from heavenly.cli import main
from heavenly.fields import compat_residual, extract_conditions, lie_bracket
from heavenly.jets import Context, GaussianRational
from heavenly.lam import LaurentSeries
from heavenly.numerics import (Grid2, builtin_solution, dkp_solve,
                               flow_commutator_check, flow_commutator_ratio,
                               temporal_richardson)

from conftest import rand_poly, rand_rational, rand_vfield

LAX_IDS = ("einstein_weyl", "dkp", "dunajski", "conformal1", "conformal2",
           "inverse_shabat", "pleb1", "mod_pleb", "husain", "monge")

CASIMIR_IDS = ("einstein_weyl", "conformal1", "conformal2", "inverse_shabat",
               "pleb1", "mod_pleb", "husain")

NEG1 = GaussianRational(-1)


class TestLaxSuite:
    """1: every catalog pair verifies with exact zero reduction."""

    @pytest.mark.parametrize("eid", LAX_IDS)
    def test_pass_with_exact_discharge(self, eid):
        entry = get_entry(eid)
        res = entry.verify_lax()
        assert res.status == "PASS"
        kinds = {d.kind for _, d in res.conditions}
        assert "open" not in kinds
        if eid == "pleb1":
            assert "certificate" in kinds
        else:
            assert kinds <= {"trivial", "rewrite"}
        assert res.elapsed <= 5.0


class TestFamilies:
    """2: family instantiation at k in {2, 3}; base k reproduces the base."""

    @pytest.mark.parametrize("eid", ("pleb1", "mod_pleb", "husain", "monge"))
    @pytest.mark.parametrize("k", (2, 3))
    def test_instantiation_passes(self, eid, k):
        t0 = time.monotonic()
        entry = get_entry(eid, k)
        res = entry.verify_lax()
        assert res.status == "PASS"
        assert all(d.kind != "open" for _, d in res.conditions)
        assert time.monotonic() - t0 <= 30.0

    @pytest.mark.parametrize("eid", ("pleb1", "mod_pleb", "husain", "monge"))
    def test_base_instantiation_identical(self, eid):
        assert entry_to_json(get_entry(eid, base_k(eid))) \
            == entry_to_json(get_entry(eid))


class TestPinnedIdentities:
    """3, 4: two compatibility conditions pinned exactly."""

    def test_scalar_reduction_condition(self):
        entry = get_entry("dkp")
        ctx = entry.ctx
        conds = extract_conditions(compat_residual(entry.a_y, entry.a_t))
        assert [(c.direction, c.lambda_power) for c in conds] == [("lam", 0)]
        want = (ctx.jet("u", "x", "t") + ctx.jet("u", "y", "y")
                + ctx.jet("u") * ctx.jet("u", "x", "x")
                + ctx.jet("u", "x") ** 2)
        assert conds[0].poly == want

    def test_first_conformal_condition(self):
        entry = get_entry("conformal1")
        ctx = entry.ctx
        conds = extract_conditions(compat_residual(entry.a_y, entry.a_t))
        xconds = [c for c in conds if c.direction == "x"]
        assert len(xconds) == 1
        c = xconds[0]
        assert c.denominator_str() == "L*(L-1)"
        want = (ctx.jet("u", "y", "t")
                + ctx.jet("u", "y") * ctx.jet("u", "x", "t")
                - ctx.jet("u", "t") * ctx.jet("u", "x", "y"))
        assert c.poly == want


def _mutated(entry, idx, kind, direction, order=None):
    spec = entry.casimirs[idx]
    comps = dict(spec.expansion.components)
    s = comps[direction]
    if kind == "flip_component":
        comps[direction] = s.scaled(NEG1)
    elif kind == "flip_coefficient":
        coeffs = dict(s.coeffs)
        coeffs[order] = coeffs[order] * NEG1
        comps[direction] = LaurentSeries(s.ctx, s.point, s.lowest_order,
                                         coeffs, s.known_through)
    else:  # inject a spurious u_x term
        coeffs = dict(s.coeffs)
        coeffs[order] = coeffs.get(order, entry.ctx.zero()) \
            + entry.ctx.jet("u", "x")
        comps[direction] = LaurentSeries(s.ctx, s.point,
                                         min(s.lowest_order, order),
                                         coeffs, s.known_through)
    return GradientExpansion(spec.expansion.point, comps), spec.threshold


class TestCasimirSuite:
    """5: gradients verify at the stored thresholds; structural mutations
    fail; every literal-reading disagreement is carried as a note."""

    @pytest.mark.parametrize("eid", CASIMIR_IDS)
    def test_claimed_thresholds_pass(self, eid):
        entry = get_entry(eid)
        claimed = [i for i, c in enumerate(entry.casimirs)
                   if c.threshold is not None]
        assert claimed
        for i in claimed:
            rep = entry.verify_casimir(i)
            assert rep.status == "PASS", (eid, i, rep)

    # The residual is linear in the gradient, so a global sign flip stays
    # in the kernel; the controls below break relative structure instead
    # (one component among several, one coefficient among several) or
    # inject a spurious term when the gradient has a single entry.
    @pytest.mark.parametrize("eid,mutation", [
        ("einstein_weyl", ("flip_component", "x", None)),
        ("pleb1", ("flip_component", "x1", None)),
        ("mod_pleb", ("flip_component", "x1", None)),
        ("husain", ("flip_component", "x1", None)),
        ("conformal2", ("flip_coefficient", "x", 1)),
        ("conformal1", ("inject", "x", 0)),
        ("inverse_shabat", ("inject", "x", 0)),
    ])
    def test_negative_controls_fail(self, eid, mutation):
        kind, direction, order = mutation
        entry = get_entry(eid)
        grad, threshold = _mutated(entry, 0, kind, direction, order)
        rep = casimir_residual_order(entry.seed, grad, threshold,
                                     entry.system)
        assert rep.status == "FAIL", (eid, rep)

    def test_global_sign_flip_stays_in_kernel(self):
        # Linearity makes this mutation undetectable by construction; it
        # must NOT be used as a negative control for single-entry gradients.
        entry = get_entry("conformal1")
        spec = entry.casimirs[0]
        grad = GradientExpansion(
            spec.expansion.point,
            {d: s.scaled(NEG1)
             for d, s in spec.expansion.components.items()})
        rep = casimir_residual_order(entry.seed, grad, spec.threshold,
                                     entry.system)
        assert rep.status == "PASS"

    def test_literal_reading_disagreements_are_reported(self):
        # Entries where the stored data deviates from a literal reading of
        # the source display carry the deviation in notes / casimir notes.
        assert get_entry("einstein_weyl").casimirs[1].note
        assert get_entry("pleb1").notes
        assert get_entry("conformal2").notes
        assert get_entry("mod_pleb").notes
        assert get_entry("husain").notes


class TestExactness:
    """6: closedness of the seed 1-forms, with the derived witness."""

    @pytest.mark.parametrize("eid", ("pleb1", "mod_pleb", "husain", "monge"))
    def test_closed_seeds(self, eid):
        assert get_entry(eid).verify_exactness().closed

    def test_einstein_weyl_witness(self):
        entry = get_entry("einstein_weyl")
        ctx = entry.ctx
        res = entry.verify_exactness()
        assert not res.closed
        # u_x - v_xy - 2 v_x v_xx + v_xx * lambda
        from heavenly.lam import LambdaPoly, LambdaRational
        want = LambdaRational.from_poly(LambdaPoly(ctx, [
            ctx.jet("u", "x") - ctx.jet("v", "x", "y")
            - 2 * ctx.jet("v", "x") * ctx.jet("v", "x", "x"),
            ctx.jet("v", "x", "x")]))
        assert (res.witness - want).is_zero()


class TestConditionalEntry:
    """7: the entry with a nonlocal closure either discharges or reports
    CONDITIONAL; the outcome is documented either way."""

    def test_outcome_and_documentation(self):
        entry = get_entry("mod_einstein_weyl")
        res = entry.verify_lax()
        assert res.status in ("PASS", "CONDITIONAL")
        if res.status == "PASS":
            assert all(d.kind != "open" for _, d in res.conditions)
        assert entry.notes

    def test_cli_exit_code(self):
        res = CliRunner().invoke(main, ["verify", "lax",
                                        "mod_einstein_weyl"])
        assert res.exit_code in (0, 3)


class TestNumerics:
    """8: conservation, temporal order, flow commutation, negative control."""

    started = None

    @classmethod
    def setup_class(cls):
        cls.started = time.monotonic()

    @classmethod
    def teardown_class(cls):
        assert time.monotonic() - cls.started <= 60.0

    def test_mass_conservation_unit_time(self):
        run = dkp_solve(Grid2(64, 64, 1e-3),
                        builtin_solution(get_entry("dkp"), "single_mode"),
                        tmax=1.0)
        assert run.mass_drift < 1e-10

    def test_temporal_richardson_ratio(self):
        ratio = temporal_richardson(
            32, 32, 0.02, 0.2, builtin_solution(get_entry("dkp"), "sine_x"))
        assert 12 <= ratio <= 20

    def test_flow_commutation_on_exact_solutions(self):
        entry = get_entry("dkp")
        # u = alpha*y: the characteristics are polynomial of degree <= 3 in
        # the flow parameter, which the integrator reproduces exactly, so
        # the gap sits at roundoff for every step size (stronger than any
        # finite convergence order; the ratio test is degenerate there).
        lin = flow_commutator_ratio(entry,
                                    builtin_solution(entry, "linear_y"))
        assert lin.degenerate
        assert lin.gap < 1e-13 and lin.gap_half < 1e-13
        # Fourth-order decay is exhibited on an exact solution whose
        # characteristics are not polynomial, where truncation is visible.
        fr = flow_commutator_ratio(entry,
                                   builtin_solution(entry, "shear_xt"))
        assert not fr.degenerate
        assert 12 <= fr.ratio <= 20

    def test_flow_negative_control_does_not_converge(self):
        entry = get_entry("dkp")
        sol = builtin_solution(entry, "sine_x")
        g1 = flow_commutator_check(entry, sol, h=0.05).gap
        g2 = flow_commutator_check(entry, sol, h=0.025).gap
        assert g1 > 1e-3
        assert g1 / g2 < 1.5


@pytest.fixture(scope="module")
def pctx():
    return Context(1, ("u", "v"))


class TestAlgebraProperties:
    """9: exact property suites, 1000 randomized cases per property."""

    CASES = 1000

    def test_ring_axioms(self, pctx):
        rng = random.Random(101)
        for _ in range(self.CASES):
            a, b, c = (rand_poly(rng, pctx) for _ in range(3))
            assert (a + b) + c == a + (b + c)
            assert a + b == b + a
            assert a * b == b * a
            assert (a * b) * c == a * (b * c)
            assert a * (b + c) == a * b + a * c

    def test_total_derivatives_commute(self, pctx):
        rng = random.Random(102)
        for _ in range(self.CASES):
            p = rand_poly(rng, pctx)
            v, w = rng.sample(("x", "y", "t"), 2)
            assert p.total_derivative(v).total_derivative(w) \
                == p.total_derivative(w).total_derivative(v)

    def test_bracket_antisymmetry(self, pctx):
        rng = random.Random(103)
        for _ in range(self.CASES):
            a = rand_vfield(rng, pctx, slim=True)
            b = rand_vfield(rng, pctx, slim=True)
            assert (lie_bracket(a, b) + lie_bracket(b, a)).is_zero()

    def test_bracket_jacobi(self, pctx):
        rng = random.Random(104)
        for _ in range(self.CASES):
            a, b, c = (rand_vfield(rng, pctx, slim=True) for _ in range(3))
            j = (lie_bracket(lie_bracket(a, b), c)
                 + lie_bracket(lie_bracket(b, c), a)
                 + lie_bracket(lie_bracket(c, a), b))
            assert j.is_zero()

    def test_partial_fraction_round_trip(self, pctx):
        from heavenly.lam import LambdaPoly, LambdaRational
        rng = random.Random(105)
        for _ in range(self.CASES):
            f = rand_rational(rng, pctx)
            poly, principal = f.partial_fractions()
            rebuilt = LambdaRational(pctx, poly)
            for p, coeffs in principal.items():
                for k, coeff in enumerate(coeffs, start=1):
                    rebuilt = rebuilt + LambdaRational(
                        pctx, LambdaPoly.const(pctx, coeff), {p: k})
            assert (rebuilt - f).is_zero()

    def test_projection_completeness(self, pctx):
        rng = random.Random(106)
        for _ in range(self.CASES):
            f = rand_rational(rng, pctx)
            plus, minus = f.split_projection()
            assert (plus + minus - f).is_zero()
            assert not plus.poles
