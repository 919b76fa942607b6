"""Rational functions and Laurent series in the spectral parameter.

The spectral parameter ``lambda`` lives over the jet ring: a
:class:`LambdaPoly` is a polynomial in lambda whose coefficients are
differential polynomials, and a :class:`LambdaRational` is such a
polynomial divided by a product of linear factors ``(lambda - p)`` with
poles drawn from the fixed point set {0, 1, -1, i, -i}.  Keeping the
denominator factored (a pole -> multiplicity map) makes normalization,
partial fractions and Laurent expansion exact and cheap: the denominator
always has scalar coefficients, so series division only ever inverts a
scalar unit.

:class:`LaurentSeries` is truncation-honest: every series carries the
order through which its coefficients are trusted, and arithmetic
propagates the trust window (a product of series known through K_a and
K_b, with lowest orders l_a and l_b, is trusted through
``min(K_a + l_b, K_b + l_a)``).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb
from typing import Dict, List, Optional, Sequence, Tuple, Union

from .jets import (Context, DiffPoly, GaussianRational, GR_I, GR_ONE, GR_ZERO,
                   render_poly)

# A pole location: a Gaussian rational, or the string "inf" for expansion
# points only (infinity is never a denominator factor).
PolePoint = GaussianRational
ExpansionPoint = Union[GaussianRational, str]

# Trust-window sentinel for series that are exact (known at every order),
# such as expansions of the zero function.  Large enough that ordinary
# window arithmetic never exhausts it.
EXACT_ORDER = 10 ** 9

ALLOWED_POLES: Tuple[GaussianRational, ...] = (
    GaussianRational(0), GaussianRational(1), GaussianRational(-1),
    GR_I, GaussianRational(0, -1),
)


def _check_pole(p: GaussianRational) -> GaussianRational:
    p = GaussianRational.coerce(p)
    if p not in ALLOWED_POLES:
        raise ValueError(f"pole {p} outside the admissible point set")
    return p


def render_point(p: ExpansionPoint) -> str:
    return "inf" if p == "inf" else str(GaussianRational.coerce(p))


class LambdaPoly:
    """A polynomial in lambda with differential-polynomial coefficients.

    ``coeffs[k]`` is the coefficient of lambda^k; trailing zeros are
    stripped so ``degree()`` is honest (-1 for the zero polynomial).
    """

    __slots__ = ("ctx", "coeffs")

    def __init__(self, ctx: Context, coeffs: Sequence[DiffPoly]):
        self.ctx = ctx
        cs = list(coeffs)
        while cs and cs[-1].is_zero():
            cs.pop()
        self.coeffs: List[DiffPoly] = cs

    @staticmethod
    def zero(ctx: Context) -> "LambdaPoly":
        return LambdaPoly(ctx, [])

    @staticmethod
    def const(ctx: Context, p: Union[DiffPoly, int, Fraction, GaussianRational]
              ) -> "LambdaPoly":
        if not isinstance(p, DiffPoly):
            p = ctx.const(p)
        return LambdaPoly(ctx, [p])

    @staticmethod
    def monomial(ctx: Context, k: int,
                 coeff: Union[DiffPoly, int, GaussianRational, None] = None
                 ) -> "LambdaPoly":
        if coeff is None:
            coeff = ctx.one()
        elif not isinstance(coeff, DiffPoly):
            coeff = ctx.const(coeff)
        return LambdaPoly(ctx, [ctx.zero()] * k + [coeff])

    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def coeff(self, k: int) -> DiffPoly:
        if 0 <= k < len(self.coeffs):
            return self.coeffs[k]
        return self.ctx.zero()

    def __add__(self, other: "LambdaPoly") -> "LambdaPoly":
        n = max(len(self.coeffs), len(other.coeffs))
        return LambdaPoly(self.ctx,
                          [self.coeff(k) + other.coeff(k) for k in range(n)])

    def __sub__(self, other: "LambdaPoly") -> "LambdaPoly":
        return self + (-other)

    def __neg__(self) -> "LambdaPoly":
        return LambdaPoly(self.ctx, [-c for c in self.coeffs])

    def __mul__(self, other: Union["LambdaPoly", DiffPoly, int, GaussianRational]
                ) -> "LambdaPoly":
        if not isinstance(other, LambdaPoly):
            if not isinstance(other, DiffPoly):
                other = self.ctx.const(other)
            return LambdaPoly(self.ctx, [c * other for c in self.coeffs])
        if self.is_zero() or other.is_zero():
            return LambdaPoly.zero(self.ctx)
        out = [self.ctx.zero()] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a.is_zero():
                continue
            for j, b in enumerate(other.coeffs):
                out[i + j] = out[i + j] + a * b
        return LambdaPoly(self.ctx, out)

    __rmul__ = __mul__

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, LambdaPoly):
            return NotImplemented
        return self.coeffs == other.coeffs

    def __hash__(self) -> int:
        return hash(tuple(self.coeffs))

    def map_coeffs(self, fn) -> "LambdaPoly":
        return LambdaPoly(self.ctx, [fn(c) for c in self.coeffs])

    def total_derivative(self, var: str) -> "LambdaPoly":
        return self.map_coeffs(lambda c: c.total_derivative(var))

    def d_lambda(self) -> "LambdaPoly":
        return LambdaPoly(self.ctx,
                          [c * k for k, c in enumerate(self.coeffs)][1:])

    def eval_at(self, p: GaussianRational) -> DiffPoly:
        # Horner from the top coefficient down.
        acc = self.ctx.zero()
        for c in reversed(self.coeffs):
            acc = acc * p + c
        return acc

    def shifted(self, p: GaussianRational) -> "LambdaPoly":
        """Coefficients of self(mu + p), i.e. the Taylor shift to mu = lambda - p."""
        if not p:
            return self
        n = len(self.coeffs)
        out = [self.ctx.zero()] * n
        for k, c in enumerate(self.coeffs):
            if c.is_zero():
                continue
            pw = GR_ONE
            for j in range(k, -1, -1):
                out[j] = out[j] + c * (comb(k, j) * pw)
                pw = pw * p
        return LambdaPoly(self.ctx, out)

    def divide_linear(self, p: GaussianRational) -> Optional["LambdaPoly"]:
        """Exact quotient by (lambda - p), or None when p is not a root."""
        if self.is_zero():
            return self
        q = [self.ctx.zero()] * len(self.coeffs)
        rem = self.ctx.zero()
        for k in range(len(self.coeffs) - 1, -1, -1):
            q[k] = rem
            rem = self.coeffs[k] + rem * p
        if not rem.is_zero():
            return None
        # q[k] accumulated the quotient coefficient of lambda^k; the top
        # slot is always zero and is stripped by the constructor.
        return LambdaPoly(self.ctx, q)

    def eval_numeric(self, lam: complex, assignment) -> complex:
        acc = 0j
        for c in reversed(self.coeffs):
            acc = acc * lam + c.eval_numeric(assignment)
        return acc

    def __str__(self) -> str:
        if self.is_zero():
            return "0"
        parts = []
        for k, c in enumerate(self.coeffs):
            if c.is_zero():
                continue
            lam = "" if k == 0 else ("L" if k == 1 else f"L^{k}")
            body = render_poly(c)
            if lam and body == "1":
                parts.append(lam)
            elif lam:
                parts.append(f"({body})*{lam}")
            else:
                parts.append(body)
        return " + ".join(parts)


def _scalar_denominator_coeffs(poles: Dict[GaussianRational, int]
                               ) -> List[GaussianRational]:
    """Expanded coefficients of prod (lambda - p)^m, ascending powers."""
    out = [GR_ONE]
    for p, m in sorted(poles.items(), key=lambda it: (it[0].re, it[0].im)):
        for _ in range(m):
            nxt = [GR_ZERO] * (len(out) + 1)
            for k, c in enumerate(out):
                nxt[k + 1] = nxt[k + 1] + c
                nxt[k] = nxt[k] - c * p
            out = nxt
    return out


class LambdaRational:
    """num / prod (lambda - p)^mult, normalized so no pole divides num.

    The denominator is the factored pole map; poles must lie in the
    admissible set.  Construction normalizes: any factor whose point is a
    root of the numerator is cancelled.
    """

    __slots__ = ("ctx", "num", "poles")

    def __init__(self, ctx: Context, num: LambdaPoly,
                 poles: Optional[Dict[GaussianRational, int]] = None):
        self.ctx = ctx
        poles = {(_check_pole(p)): m for p, m in (poles or {}).items() if m}
        if any(m < 0 for m in poles.values()):
            raise ValueError("pole multiplicities must be positive")
        changed = True
        while changed and not num.is_zero():
            changed = False
            for p in list(poles):
                if poles[p] and num.eval_at(p).is_zero():
                    q = num.divide_linear(p)
                    if q is not None:
                        num = q
                        poles[p] -= 1
                        if poles[p] == 0:
                            del poles[p]
                        changed = True
        if num.is_zero():
            poles = {}
        self.num = num
        self.poles = poles

    @staticmethod
    def from_poly(lp: LambdaPoly) -> "LambdaRational":
        return LambdaRational(lp.ctx, lp)

    @staticmethod
    def zero(ctx: Context) -> "LambdaRational":
        return LambdaRational(ctx, LambdaPoly.zero(ctx))

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def pole_order(self, p: ExpansionPoint) -> int:
        """Multiplicity of the pole at p (0 when regular); at infinity the
        order is max(deg num - deg denom, 0)."""
        if p == "inf":
            return max(self.num.degree() - sum(self.poles.values()), 0)
        return self.poles.get(GaussianRational.coerce(p), 0)

    def _lift(self, poles: Dict[GaussianRational, int]) -> LambdaPoly:
        """Numerator re-expressed over the (larger) denominator ``poles``."""
        num = self.num
        for p, m in poles.items():
            extra = m - self.poles.get(p, 0)
            for _ in range(extra):
                num = num * LambdaPoly(self.ctx,
                                       [self.ctx.const(-p), self.ctx.one()])
        return num

    def __add__(self, other: "LambdaRational") -> "LambdaRational":
        poles = dict(self.poles)
        for p, m in other.poles.items():
            poles[p] = max(poles.get(p, 0), m)
        return LambdaRational(self.ctx,
                              self._lift(poles) + other._lift(poles), poles)

    def __sub__(self, other: "LambdaRational") -> "LambdaRational":
        return self + (-other)

    def __neg__(self) -> "LambdaRational":
        return LambdaRational(self.ctx, -self.num, dict(self.poles))

    def __mul__(self, other: Union["LambdaRational", LambdaPoly, DiffPoly, int,
                                   GaussianRational]) -> "LambdaRational":
        if isinstance(other, LambdaRational):
            poles = dict(self.poles)
            for p, m in other.poles.items():
                poles[p] = poles.get(p, 0) + m
            return LambdaRational(self.ctx, self.num * other.num, poles)
        return LambdaRational(self.ctx, self.num * other, dict(self.poles))

    __rmul__ = __mul__

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, LambdaRational):
            return NotImplemented
        return (self - other).is_zero()

    def __hash__(self) -> int:
        return hash((self.num, tuple(sorted(
            ((p.re, p.im), m) for p, m in self.poles.items()))))

    def map_coeffs(self, fn) -> "LambdaRational":
        return LambdaRational(self.ctx, self.num.map_coeffs(fn),
                              dict(self.poles))

    def total_derivative(self, var: str) -> "LambdaRational":
        # Denominator is lambda-only, so d/dvar passes to the numerator.
        return self.map_coeffs(lambda c: c.total_derivative(var))

    def d_lambda(self) -> "LambdaRational":
        """d/dlambda:  N'/D  -  sum_p m_p * N / ((lambda - p) D)."""
        out = LambdaRational(self.ctx, self.num.d_lambda(), dict(self.poles))
        for p, m in self.poles.items():
            poles = dict(self.poles)
            poles[p] = m + 1
            out = out - LambdaRational(self.ctx, self.num * m, poles)
        return out

    def eval_numeric(self, lam: complex, assignment) -> complex:
        den = 1.0 + 0j
        for p, m in self.poles.items():
            den *= (lam - p.to_complex()) ** m
        return self.num.eval_numeric(lam, assignment) / den

    def clear_denominator(self) -> Tuple[LambdaPoly, Dict[GaussianRational, int]]:
        return self.num, dict(self.poles)

    # -- decomposition -------------------------------------------------------

    def partial_fractions(self) -> Tuple[LambdaPoly,
                                         Dict[GaussianRational, List[DiffPoly]]]:
        """Split into (polynomial part, principal parts).

        The principal part at p is returned as ``[c_1, c_2, ..., c_m]`` with
        f ~ sum_k c_k / (lambda - p)^k.  Exact; the round trip
        poly + sum of principal parts reconstructs self.
        """
        principal: Dict[GaussianRational, List[DiffPoly]] = {}
        for p, m in self.poles.items():
            # g = N / (D / (lambda-p)^m), Taylor-expanded at p to order m-1.
            num_sh = self.num.shifted(p)
            others = {q: mq for q, mq in self.poles.items() if q != p}
            den = _scalar_denominator_coeffs(others)
            # shift the scalar denominator to mu = lambda - p
            den_sh = [GR_ZERO] * len(den)
            for k, c in enumerate(den):
                pw = GR_ONE
                for j in range(k, -1, -1):
                    den_sh[j] = den_sh[j] + c * comb(k, j) * pw
                    pw = pw * p
            g = _series_divide([num_sh.coeff(k) for k in range(m)],
                               den_sh, m, self.ctx)
            # g[j] is the coefficient of mu^j; it sits over mu^m, i.e. at
            # 1/(lambda-p)^(m-j).
            coeffs = [g[m - k] for k in range(1, m + 1)]
            if any(not c.is_zero() for c in coeffs):
                principal[p] = coeffs
        poly = LambdaRational(self.ctx, self.num, dict(self.poles))
        for p, coeffs in principal.items():
            for k, c in enumerate(coeffs, start=1):
                poly = poly - LambdaRational(self.ctx, LambdaPoly.const(self.ctx, c),
                                             {p: k})
        num, poles = poly.clear_denominator()
        if poles:
            raise ArithmeticError("partial fraction remainder is not polynomial")
        return num, principal

    def split_projection(self) -> Tuple["LambdaRational", "LambdaRational"]:
        """(plus, minus): plus is the polynomial part (constant term
        included), minus is the sum of all principal parts at finite poles."""
        poly, principal = self.partial_fractions()
        plus = LambdaRational(self.ctx, poly)
        minus = LambdaRational.zero(self.ctx)
        for p, coeffs in principal.items():
            for k, c in enumerate(coeffs, start=1):
                minus = minus + LambdaRational(
                    self.ctx, LambdaPoly.const(self.ctx, c), {p: k})
        return plus, minus

    def laurent_expand(self, point: ExpansionPoint, through: int
                       ) -> "LaurentSeries":
        """Laurent series at a finite point or at infinity.

        At infinity the expansion variable is mu = 1/lambda, so the
        coefficient of mu^k carries the lambda^-k behaviour.
        """
        ctx = self.ctx
        if self.is_zero():
            # Exact zero: every coefficient is known at every order.
            return LaurentSeries(ctx, point if point == "inf"
                                 else GaussianRational.coerce(point),
                                 0, {}, EXACT_ORDER)
        if point == "inf":
            dn = sum(self.poles.values())
            nn = self.num.degree()
            if nn < 0:
                return LaurentSeries(ctx, "inf", 0, {}, through)
            # f(1/mu) = mu^(dn-nn) * rev(N)(mu) / rev(D)(mu)
            lowest = dn - nn
            num_rev = [self.num.coeff(nn - k) for k in range(nn + 1)]
            den = _scalar_denominator_coeffs(self.poles)
            den_rev = list(reversed(den))
            need = through - lowest + 1
            if need <= 0:
                return LaurentSeries(ctx, "inf", lowest, {}, through)
            q = _series_divide(num_rev, den_rev, need, ctx)
            coeffs = {lowest + k: q[k] for k in range(need)
                      if not q[k].is_zero()}
            return LaurentSeries(ctx, "inf", lowest, coeffs, through)
        p = GaussianRational.coerce(point)
        m = self.poles.get(p, 0)
        num_sh = self.num.shifted(p)
        others = {q: mq for q, mq in self.poles.items() if q != p}
        den = _scalar_denominator_coeffs(others)
        den_sh = [GR_ZERO] * len(den)
        for k, c in enumerate(den):
            pw = GR_ONE
            for j in range(k, -1, -1):
                den_sh[j] = den_sh[j] + c * comb(k, j) * pw
                pw = pw * p
        need = through + m + 1
        if need <= 0:
            return LaurentSeries(ctx, p, -m, {}, through)
        q = _series_divide([num_sh.coeff(k) for k in range(need)],
                           den_sh, need, ctx)
        coeffs = {k - m: q[k] for k in range(need) if not q[k].is_zero()}
        return LaurentSeries(ctx, p, -m, coeffs, through)

    def __str__(self) -> str:
        if not self.poles:
            return str(self.num)
        den = "*".join(
            (f"(L-{render_point(p)})" if (p.re or p.im) else "L")
            + (f"^{m}" if m > 1 else "")
            for p, m in sorted(self.poles.items(),
                               key=lambda it: (it[0].re, it[0].im)))
        return f"({self.num}) / {den}"


def _series_divide(num: Sequence[DiffPoly], den: Sequence[GaussianRational],
                   n: int, ctx: Context) -> List[DiffPoly]:
    """First n coefficients of num/den as power series; den[0] must be a unit."""
    if not den or not den[0]:
        raise ZeroDivisionError("series division by a non-unit")
    inv0 = GR_ONE / den[0]
    out: List[DiffPoly] = []
    for k in range(n):
        acc = num[k] if k < len(num) else ctx.zero()
        for j in range(max(0, k - len(den) + 1), k):
            acc = acc - out[j] * den[k - j]
        out.append(acc * inv0)
    return out


@dataclass
class LaurentSeries:
    """A truncated Laurent expansion with an explicit trust window.

    ``coeffs[k]`` is the coefficient of (lambda - point)^k (or of
    lambda^-k at infinity, where k counts powers of 1/lambda);
    coefficients are trusted for lowest_order <= k <= known_through.
    """

    ctx: Context
    point: ExpansionPoint
    lowest_order: int
    coeffs: Dict[int, DiffPoly]
    known_through: int

    def coeff(self, k: int) -> DiffPoly:
        if k > self.known_through:
            raise ValueError(
                f"order {k} beyond the trusted window (through {self.known_through})")
        return self.coeffs.get(k, self.ctx.zero())

    def actual_lowest(self) -> Optional[int]:
        orders = [k for k, c in self.coeffs.items() if not c.is_zero()]
        return min(orders) if orders else None

    def __add__(self, other: "LaurentSeries") -> "LaurentSeries":
        self._compat(other)
        out = dict(self.coeffs)
        for k, c in other.coeffs.items():
            s = out.get(k)
            out[k] = c if s is None else s + c
        out = {k: c for k, c in out.items() if not c.is_zero()}
        kt = min(self.known_through, other.known_through)
        return LaurentSeries(self.ctx, self.point,
                             min(self.lowest_order, other.lowest_order),
                             {k: c for k, c in out.items() if k <= kt}, kt)

    def __sub__(self, other: "LaurentSeries") -> "LaurentSeries":
        return self + other.scaled(GaussianRational(-1))

    def scaled(self, s: Union[DiffPoly, int, GaussianRational]) -> "LaurentSeries":
        if isinstance(s, DiffPoly):
            return LaurentSeries(self.ctx, self.point, self.lowest_order,
                                 {k: c * s for k, c in self.coeffs.items()},
                                 self.known_through)
        return LaurentSeries(self.ctx, self.point, self.lowest_order,
                             {k: c * s for k, c in self.coeffs.items()},
                             self.known_through)

    def __mul__(self, other: "LaurentSeries") -> "LaurentSeries":
        self._compat(other)
        # Trust: unknown tail of one factor first pollutes the product at
        # known_through + other's lowest order + 1.
        kt = min(self.known_through + other.lowest_order,
                 other.known_through + self.lowest_order)
        lo = self.lowest_order + other.lowest_order
        out: Dict[int, DiffPoly] = {}
        for ka, ca in self.coeffs.items():
            for kb, cb in other.coeffs.items():
                k = ka + kb
                if k > kt:
                    continue
                s = out.get(k)
                out[k] = ca * cb if s is None else s + ca * cb
        out = {k: c for k, c in out.items() if not c.is_zero()}
        return LaurentSeries(self.ctx, self.point, lo, out, kt)

    def shift(self, k: int) -> "LaurentSeries":
        """Multiply by (lambda - point)^k (by lambda^-k at infinity)."""
        return LaurentSeries(self.ctx, self.point, self.lowest_order + k,
                             {o + k: c for o, c in self.coeffs.items()},
                             self.known_through + k)

    def map_coeffs(self, fn) -> "LaurentSeries":
        out = {k: fn(c) for k, c in self.coeffs.items()}
        return LaurentSeries(self.ctx, self.point, self.lowest_order,
                             {k: c for k, c in out.items() if not c.is_zero()},
                             self.known_through)

    def total_derivative(self, var: str) -> "LaurentSeries":
        return self.map_coeffs(lambda c: c.total_derivative(var))

    def d_lambda(self) -> "LaurentSeries":
        """Derivative in lambda.

        At a finite point (mu = lambda - p) this maps c_k mu^k to
        k c_k mu^(k-1); at infinity (mu = 1/lambda, d/dlambda =
        -mu^2 d/dmu) it maps c_k mu^k to -k c_k mu^(k+1).
        """
        if self.point == "inf":
            out = {k + 1: c * (-k) for k, c in self.coeffs.items() if k}
            return LaurentSeries(self.ctx, self.point, self.lowest_order + 1,
                                 {k: c for k, c in out.items() if not c.is_zero()},
                                 self.known_through + 1)
        out = {k - 1: c * k for k, c in self.coeffs.items() if k}
        return LaurentSeries(self.ctx, self.point, self.lowest_order - 1,
                             {k: c for k, c in out.items() if not c.is_zero()},
                             self.known_through - 1)

    def truncate(self, through: int) -> "LaurentSeries":
        kt = min(self.known_through, through)
        return LaurentSeries(self.ctx, self.point, self.lowest_order,
                             {k: c for k, c in self.coeffs.items() if k <= kt},
                             kt)

    def _compat(self, other: "LaurentSeries") -> None:
        if self.point != other.point:
            raise ValueError("series expanded at different points")

    def __str__(self) -> str:
        var = "1/L" if self.point == "inf" else (
            "L" if not (GaussianRational.coerce(self.point).re
                        or GaussianRational.coerce(self.point).im)
            else f"(L-{render_point(self.point)})")
        parts = []
        for k in sorted(self.coeffs):
            c = self.coeffs[k]
            pw = "" if k == 0 else (var if k == 1 else f"{var}^{k}")
            body = render_poly(c)
            parts.append(f"({body})" + (f"*{pw}" if pw else ""))
        tail = f" + O({var}^{self.known_through + 1})"
        return (" + ".join(parts) if parts else "0") + tail


def series_of_poly(lp: LambdaPoly, point: ExpansionPoint, through: int
                   ) -> LaurentSeries:
    return LambdaRational.from_poly(lp).laurent_expand(point, through)
