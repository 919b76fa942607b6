"""Vector fields on the torus times the spectral line, and Lax compatibility.

A :class:`VectorField` has one :class:`LambdaRational` component per
direction, where a direction is either a torus coordinate (``x`` or
``x1..xn``) or the spectral direction ``lam``.  The evolution parameters
``y`` and ``t`` act on components only through total derivatives; they are
never directions of the fields themselves.

The compatibility residual of a pair (A_y, A_t) is

    R = d/dy A_t - d/dt A_y - [A_t, A_y],

with the Lie bracket taken componentwise:

    [a, b]_d = sum_e ( a_e * D_e(b_d) - b_e * D_e(a_d) ),

where D_e is the total derivative for a torus direction and d/dlambda for
the spectral direction.  The pair is a Lax pair on solutions exactly when
every component of R vanishes modulo the equation; :func:`verify_lax`
clears denominators, splits R into lambda-power conditions and discharges
each one through a rewrite system or an ideal-membership certificate.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Dict, List, Mapping, Optional, Tuple

from .jets import Context, DiffPoly, GaussianRational, render_poly
from .lam import LambdaPoly, LambdaRational, render_point
from .rewrite import Certificate, PdeSystem, ideal_membership

LAM = "lam"


class VectorField:
    """Spectral-parameter-dependent vector field; missing components are zero."""

    __slots__ = ("ctx", "components")

    def __init__(self, ctx: Context,
                 components: Mapping[str, LambdaRational]):
        self.ctx = ctx
        for d in components:
            if d != LAM and d not in ctx.space_vars:
                raise KeyError(f"unknown direction {d!r}")
        self.components = {d: c for d, c in components.items()
                           if not c.is_zero()}

    @property
    def directions(self) -> Tuple[str, ...]:
        return self.ctx.space_vars + (LAM,)

    def component(self, d: str) -> LambdaRational:
        if d != LAM and d not in self.ctx.space_vars:
            raise KeyError(f"unknown direction {d!r}")
        return self.components.get(d, LambdaRational.zero(self.ctx))

    def __add__(self, other: "VectorField") -> "VectorField":
        out = dict(self.components)
        for d, c in other.components.items():
            out[d] = out[d] + c if d in out else c
        return VectorField(self.ctx, out)

    def __sub__(self, other: "VectorField") -> "VectorField":
        return self + other.scaled(GaussianRational(-1))

    def scaled(self, s) -> "VectorField":
        return VectorField(self.ctx,
                           {d: c * s for d, c in self.components.items()})

    def is_zero(self) -> bool:
        return not self.components

    def apply_to(self, f: LambdaRational) -> LambdaRational:
        """Directional derivative of a scalar: sum_d comp_d * D_d(f)."""
        out = LambdaRational.zero(self.ctx)
        for d, c in self.components.items():
            df = f.d_lambda() if d == LAM else f.total_derivative(d)
            out = out + c * df
        return out

    def time_derivative(self, var: str) -> "VectorField":
        if var not in ("y", "t"):
            raise ValueError("time derivative only along y or t")
        return VectorField(self.ctx,
                           {d: c.total_derivative(var)
                            for d, c in self.components.items()})

    def describe(self) -> Dict[str, str]:
        return {d: str(self.component(d)) for d in self.directions
                if d in self.components}


def lie_bracket(a: VectorField, b: VectorField) -> VectorField:
    ctx = a.ctx
    out: Dict[str, LambdaRational] = {}
    for d in a.directions:
        acc = a.apply_to(b.component(d)) - b.apply_to(a.component(d))
        if not acc.is_zero():
            out[d] = acc
    return VectorField(ctx, out)


def compat_residual(a_y: VectorField, a_t: VectorField) -> VectorField:
    return (a_t.time_derivative("y") - a_y.time_derivative("t")
            - lie_bracket(a_t, a_y))


# -- condition extraction and discharge --------------------------------------


@dataclass
class Condition:
    """One lambda-coefficient of a cleared residual component."""

    direction: str
    lambda_power: int
    poly: DiffPoly
    denominator: Dict[GaussianRational, int]

    def denominator_str(self) -> str:
        if not self.denominator:
            return "1"
        return "*".join(
            (f"(L-{render_point(p)})" if (p.re or p.im) else "L")
            + (f"^{m}" if m > 1 else "")
            for p, m in sorted(self.denominator.items(),
                               key=lambda it: (it[0].re, it[0].im)))


@dataclass
class Discharge:
    kind: str  # "trivial" | "rewrite" | "certificate" | "open"
    detail: str = ""


@dataclass
class LaxResult:
    status: str  # "PASS" | "CONDITIONAL"
    conditions: List[Tuple[Condition, Discharge]] = field(default_factory=list)
    elapsed: float = 0.0
    notes: List[str] = field(default_factory=list)

    def open_conditions(self) -> List[Condition]:
        return [c for c, d in self.conditions if d.kind == "open"]


def extract_conditions(r: VectorField) -> List[Condition]:
    """Clear each component's denominator and split by lambda power."""
    out: List[Condition] = []
    for d in r.directions:
        comp = r.component(d)
        if comp.is_zero():
            continue
        num, poles = comp.clear_denominator()
        for k in range(num.degree() + 1):
            c = num.coeff(k)
            if not c.is_zero():
                out.append(Condition(d, k, c, poles))
    return out


def verify_lax(a_y: VectorField, a_t: VectorField, system: PdeSystem,
               max_cert_order: int = 2, max_cert_degree: int = 1
               ) -> LaxResult:
    """Compute the compatibility residual and discharge it modulo the PDE.

    Each cleared condition is first reduced through the oriented rules;
    anything left over is attempted as an ideal-membership certificate when
    the system has generators.  Undischarged conditions yield status
    CONDITIONAL together with the conditions themselves (the verifier never
    claims a failure it cannot witness: a miss may just mean the search
    bounds were too small).
    """
    t0 = time.monotonic()
    residual = compat_residual(a_y, a_t)
    result = LaxResult(status="PASS")
    for cond in extract_conditions(residual):
        if cond.poly.is_zero():
            result.conditions.append((cond, Discharge("trivial")))
            continue
        reduced = system.reduce(cond.poly)
        if reduced.is_zero():
            result.conditions.append(
                (cond, Discharge("rewrite", "normal form is 0")))
            continue
        if system.generators:
            cert = ideal_membership(reduced, system,
                                    max_order=max_cert_order,
                                    max_degree=max_cert_degree)
            if cert is not None:
                detail = " + ".join(cert.describe(system)) or "0"
                result.conditions.append(
                    (cond, Discharge("certificate", detail)))
                continue
        cond = Condition(cond.direction, cond.lambda_power, reduced,
                         cond.denominator)
        result.conditions.append((cond, Discharge("open")))
        result.status = "CONDITIONAL"
    result.elapsed = time.monotonic() - t0
    return result


def emit_lax_system(a_y: VectorField, a_t: VectorField,
                    system: Optional[PdeSystem] = None) -> List[str]:
    """Human-readable listing of the raw compatibility conditions."""
    lines = []
    for cond in extract_conditions(compat_residual(a_y, a_t)):
        poly = cond.poly if system is None else system.reduce(cond.poly)
        den = cond.denominator_str()
        where = f"[{cond.direction}] L^{cond.lambda_power}"
        if den != "1":
            where += f" / {den}"
        lines.append(f"{where}: {render_poly(poly)} = 0")
    return lines or ["residual vanishes identically"]
