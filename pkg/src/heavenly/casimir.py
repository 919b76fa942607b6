"""Coadjoint action on spectral 1-forms and Casimir gradient verification.

A seed element is a 1-form ``l = sum_i l_i dx_i + l_lam dlambda`` with
:class:`~heavenly.lam.LambdaRational` components.  For a vector field
``a`` the coadjoint action relevant here is, componentwise,

    (ad*_a l)_i = l_i * div(a) + sum_j a_j D_j(l_i) + sum_j l_j D_i(a_j),

with j running over all directions (torus plus spectral) and D the total
derivative (d/dlambda in the spectral direction).  A gradient expansion
gamma is a Casimir gradient candidate when ``ad*_gamma l`` vanishes -- for
truncated expansions, vanishes to the order the truncation can support.

:func:`casimir_residual_order` computes the residual with truncation-honest
series arithmetic and reports the first order at which it fails to vanish,
so catalog thresholds can be checked rather than assumed.

:func:`exactness_check` decides closedness of a seed (d l = 0) and, when
it fails, returns the offending direction pair with the nonzero witness.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Mapping, Optional, Tuple

from .jets import Context, DiffPoly, render_poly
from .lam import (EXACT_ORDER, ExpansionPoint, LambdaPoly, LambdaRational,
                  LaurentSeries, render_point)
from .fields import LAM, VectorField


class OneForm:
    """A spectral 1-form; ``dlam_zero`` marks seeds written with dlambda = 0
    (lambda treated as an external parameter, so the spectral direction
    drops out of the exterior derivative)."""

    __slots__ = ("ctx", "components", "dlam_zero")

    def __init__(self, ctx: Context, components: Mapping[str, LambdaRational],
                 dlam_zero: bool = False):
        self.ctx = ctx
        for d in components:
            if d != LAM and d not in ctx.space_vars:
                raise KeyError(f"unknown direction {d!r}")
        if dlam_zero and LAM in components and not components[LAM].is_zero():
            raise ValueError("dlam_zero seed cannot carry a dlambda component")
        self.components = {d: c for d, c in components.items()
                           if not c.is_zero()}
        self.dlam_zero = dlam_zero

    @property
    def directions(self) -> Tuple[str, ...]:
        if self.dlam_zero:
            return self.ctx.space_vars
        return self.ctx.space_vars + (LAM,)

    def component(self, d: str) -> LambdaRational:
        return self.components.get(d, LambdaRational.zero(self.ctx))

    def describe(self) -> Dict[str, str]:
        return {d: str(self.component(d)) for d in self.directions
                if d in self.components}


def _deriv_rational(f: LambdaRational, direction: str) -> LambdaRational:
    return f.d_lambda() if direction == LAM else f.total_derivative(direction)


def _deriv_series(s: LaurentSeries, direction: str) -> LaurentSeries:
    return s.d_lambda() if direction == LAM else s.total_derivative(direction)


def coadjoint_action(a: VectorField, l: OneForm) -> OneForm:
    """Exact ad*_a l over the full direction set of the seed."""
    ctx = l.ctx
    dirs = ctx.space_vars + (LAM,)
    div = LambdaRational.zero(ctx)
    for j in dirs:
        div = div + _deriv_rational(a.component(j), j)
    out: Dict[str, LambdaRational] = {}
    # Residual slots follow the seed's coalgebra: dlam_zero seeds live on
    # torus vector fields with lambda a parameter, so no spectral slot.
    for i in l.directions:
        acc = l.component(i) * div
        for j in dirs:
            acc = acc + a.component(j) * _deriv_rational(l.component(i), j)
            acc = acc + l.component(j) * _deriv_rational(a.component(j), i)
        if not acc.is_zero():
            out[i] = acc
    return OneForm(ctx, out)


@dataclass
class GradientExpansion:
    """A truncated Casimir gradient candidate: one Laurent series per
    direction, all expanded at the same point."""

    point: ExpansionPoint
    components: Dict[str, LaurentSeries]

    def known_through(self) -> int:
        return min(s.known_through for s in self.components.values())

    def component(self, ctx: Context, d: str) -> LaurentSeries:
        got = self.components.get(d)
        if got is not None:
            return got
        # Absent components are identically zero, not merely unknown.
        return LaurentSeries(ctx, self.point, 0, {}, EXACT_ORDER)


def oneform_expand(l: OneForm, point: ExpansionPoint, through: int
                   ) -> Dict[str, LaurentSeries]:
    return {d: l.component(d).laurent_expand(point, through)
            for d in l.ctx.space_vars + (LAM,)}


def coadjoint_action_series(a: GradientExpansion, l: OneForm
                            ) -> Dict[str, LaurentSeries]:
    """ad*_a l with a truncated vector-field expansion.

    The seed is expanded far enough past the trust window of ``a`` that
    the residual's own window is limited by ``a``, not by the seed.
    """
    ctx = l.ctx
    dirs = ctx.space_vars + (LAM,)
    through = a.known_through()
    # Seed pole orders shift products downward; pad generously.
    pad = 2 + max((l.component(d).pole_order(a.point) for d in dirs), default=0)
    lser = oneform_expand(l, a.point, through + pad)
    div: Optional[LaurentSeries] = None
    for j in dirs:
        dj = _deriv_series(a.component(ctx, j), j)
        div = dj if div is None else div + dj
    out: Dict[str, LaurentSeries] = {}
    # Same slot convention as coadjoint_action: dlam_zero seeds have no
    # spectral residual slot.
    for i in l.directions:
        acc = lser[i] * div
        for j in dirs:
            acc = acc + a.component(ctx, j) * _deriv_series(lser[i], j)
            acc = acc + lser[j] * _deriv_series(a.component(ctx, j), i)
        out[i] = acc
    return out


@dataclass
class CasimirReport:
    point: str
    first_nonvanishing_order: Optional[int]
    trusted_through: int
    threshold: int
    status: str
    per_direction: Dict[str, Optional[int]] = field(default_factory=dict)


def casimir_residual_order(l: OneForm, grad: GradientExpansion,
                           threshold: int,
                           system=None) -> CasimirReport:
    """First order at which ad*_grad l fails to vanish, against a threshold.

    The candidate passes when the residual vanishes at every trusted order
    up to and including ``threshold``.  Residual coefficients are reduced
    through ``system`` (when given) before zero-testing, since gradients
    are only Casimir gradients on shell.
    """
    from .rewrite import ideal_membership

    res = coadjoint_action_series(grad, l)
    first: Optional[int] = None
    per: Dict[str, Optional[int]] = {}
    trusted = min(s.known_through for s in res.values())
    for d, s in res.items():
        hit: Optional[int] = None
        for k in sorted(s.coeffs):
            if k > s.known_through:
                break
            c = s.coeffs[k]
            if system is not None and not c.is_zero():
                c = system.reduce(c)
                if not c.is_zero() and system.generators:
                    # Generator-backed equations discharge on-shell-zero
                    # coefficients through an ideal-membership certificate.
                    if ideal_membership(c, system, max_order=2,
                                        max_degree=0) is not None:
                        c = c.ctx.zero()
            if not c.is_zero():
                hit = k
                break
        per[d] = hit
        if hit is not None and (first is None or hit < first):
            first = hit
    if trusted < threshold:
        status = "INCONCLUSIVE"
    elif first is None or first > threshold:
        status = "PASS"
    else:
        status = "FAIL"
    return CasimirReport(render_point(grad.point), first, trusted,
                         threshold, status, per)


# -- exactness ----------------------------------------------------------------


@dataclass
class ExactnessResult:
    closed: bool
    witness_pair: Optional[Tuple[str, str]] = None
    witness: Optional[LambdaRational] = None

    def describe(self) -> str:
        if self.closed:
            return "closed"
        i, j = self.witness_pair
        return f"d_{j}(l_{i}) - d_{i}(l_{j}) = {self.witness}"


def exactness_check(l: OneForm) -> ExactnessResult:
    """Closedness of the seed 1-form: D_j l_i - D_i l_j = 0 for all pairs.

    For dlam_zero seeds only torus direction pairs are tested.  The first
    failing pair is returned with its nonzero difference as a witness,
    oriented as D_j(l_i) - D_i(l_j) for i before j in direction order.
    """
    dirs = l.directions
    for a in range(len(dirs)):
        for b in range(a + 1, len(dirs)):
            i, j = dirs[a], dirs[b]
            w = _deriv_rational(l.component(i), j) - _deriv_rational(l.component(j), i)
            if not w.is_zero():
                return ExactnessResult(False, (i, j), w)
    return ExactnessResult(True)


# -- projections of gradient expansions ---------------------------------------


def series_plus_part(s: LaurentSeries, include_constant: bool = True
                     ) -> LambdaPoly:
    """Polynomial (in lambda) part of an expansion at infinity.

    Orders k <= 0 of the 1/lambda series are the lambda^(-k) polynomial
    coefficients; the constant term belongs to the plus part unless
    excluded.
    """
    if s.point != "inf":
        raise ValueError("plus projection defined on expansions at infinity")
    top = -s.lowest_order
    if top < 0:
        return LambdaPoly.zero(s.ctx)
    cutoff = 0 if include_constant else -1
    coeffs = [s.ctx.zero()] * (top + 1)
    for k, c in s.coeffs.items():
        if -top <= k <= cutoff:
            coeffs[-k] = c
    return LambdaPoly(s.ctx, coeffs)


def series_minus_part(s: LaurentSeries, include_constant: bool = False
                      ) -> LambdaRational:
    """Principal (negative lambda power) part of an expansion at infinity.

    All trusted orders k >= 1 (k >= 0 when the constant is pulled in, the
    convention one catalog seed uses) become an exact rational with its
    only pole at lambda = 0.
    """
    if s.point != "inf":
        raise ValueError("minus projection defined on expansions at infinity")
    lo = 1 if not include_constant else 0
    terms = {k: c for k, c in s.coeffs.items() if k >= lo}
    if not terms:
        return LambdaRational.zero(s.ctx)
    m = max(terms)
    num = [s.ctx.zero()] * (m + 1)
    for k, c in terms.items():
        num[m - k] = c
    from .jets import GaussianRational
    return LambdaRational(s.ctx, LambdaPoly(s.ctx, num),
                          {GaussianRational(0): m})
