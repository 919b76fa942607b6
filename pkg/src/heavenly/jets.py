"""Exact sparse differential polynomials in jet variables.

A jet variable is a dependent symbol together with a multi-index of total
derivative counts over the independent variables (the torus coordinates
``x_1..x_n`` plus the evolution parameters ``y`` and ``t``).  The spectral
parameter ``lambda`` is *not* a jet-differentiation direction here; it is
handled one level up, in :mod:`heavenly.lam`.

Representation:

  Jet      = (dep, midx)           dep: symbol name, midx: tuple[int, ...]
  Monomial = tuple[(Jet, exp), ...]   sorted, exponents > 0
  DiffPoly = {Monomial: GaussianRational}   no zero coefficients stored

The ground field is Q(i) (Gaussian rationals, exact ``Fraction`` pairs):
several catalog entries have spectral poles at +-i, so real rationals are
not enough, and exactness is required for reliable zero-testing.

Besides ordinary field symbols a context may declare *constant* symbols
(all total derivatives vanish; used for free parameters such as the
``alpha``/``beta`` of the second conformal seed) and may use the torus
coordinates themselves as factors (their total derivative is the Kronecker
delta; needed for seeds containing explicit ``x_1 + x_2`` terms).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterable, Mapping, Tuple, Union

Scalar = Union[int, Fraction, "GaussianRational"]


class GaussianRational:
    """An exact element of Q(i): re + im*i with Fraction components."""

    __slots__ = ("re", "im")

    def __init__(self, re: Union[int, Fraction] = 0, im: Union[int, Fraction] = 0):
        self.re = Fraction(re)
        self.im = Fraction(im)

    @staticmethod
    def coerce(v: Scalar) -> "GaussianRational":
        if isinstance(v, GaussianRational):
            return v
        return GaussianRational(v)

    def __add__(self, other: Scalar) -> "GaussianRational":
        o = GaussianRational.coerce(other)
        return GaussianRational(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __sub__(self, other: Scalar) -> "GaussianRational":
        o = GaussianRational.coerce(other)
        return GaussianRational(self.re - o.re, self.im - o.im)

    def __rsub__(self, other: Scalar) -> "GaussianRational":
        return GaussianRational.coerce(other) - self

    def __mul__(self, other: Scalar) -> "GaussianRational":
        o = GaussianRational.coerce(other)
        return GaussianRational(self.re * o.re - self.im * o.im,
                                self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def __truediv__(self, other: Scalar) -> "GaussianRational":
        o = GaussianRational.coerce(other)
        d = o.re * o.re + o.im * o.im
        if d == 0:
            raise ZeroDivisionError("division by zero in Q(i)")
        return GaussianRational((self.re * o.re + self.im * o.im) / d,
                                (self.im * o.re - self.re * o.im) / d)

    def __rtruediv__(self, other: Scalar) -> "GaussianRational":
        return GaussianRational.coerce(other) / self

    def __neg__(self) -> "GaussianRational":
        return GaussianRational(-self.re, -self.im)

    def __eq__(self, other: object) -> bool:
        if isinstance(other, (int, Fraction)):
            other = GaussianRational(other)
        if not isinstance(other, GaussianRational):
            return NotImplemented
        return self.re == other.re and self.im == other.im

    def __hash__(self) -> int:
        return hash((self.re, self.im))

    def __bool__(self) -> bool:
        return self.re != 0 or self.im != 0

    def conjugate(self) -> "GaussianRational":
        return GaussianRational(self.re, -self.im)

    def to_complex(self) -> complex:
        return complex(self.re) + 1j * complex(self.im)

    def __repr__(self) -> str:
        return f"GaussianRational({self.re!r}, {self.im!r})"

    def __str__(self) -> str:
        if self.im == 0:
            return str(self.re)
        im = "i" if self.im == 1 else ("-i" if self.im == -1 else f"{self.im}i")
        if self.re == 0:
            return im
        sign = "+" if self.im > 0 else ""
        return f"({self.re}{sign}{im})"


GR_ZERO = GaussianRational(0)
GR_ONE = GaussianRational(1)
GR_I = GaussianRational(0, 1)

Jet = Tuple[str, Tuple[int, ...]]
Monomial = Tuple[Tuple[Jet, int], ...]


@dataclass(frozen=True)
class Context:
    """Fixes the independent variables and dependent symbols of a problem.

    ``n`` is the torus dimension; the derivation variables are
    ``x`` (n == 1) or ``x1..xn``, followed by ``y`` and ``t``.
    ``dependents`` are ordinary field symbols carrying jets,
    ``constants`` are derivative-free parameters, and torus coordinates may
    appear as factors whenever ``allow_coords`` is set.
    """

    n: int
    dependents: Tuple[str, ...]
    constants: Tuple[str, ...] = ()
    allow_coords: bool = False

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("torus dimension must be >= 1")
        names = set(self.dependents) | set(self.constants)
        if len(names) != len(self.dependents) + len(self.constants):
            raise ValueError("dependent/constant symbol names must be unique")

    @property
    def vars(self) -> Tuple[str, ...]:
        xs = ("x",) if self.n == 1 else tuple(f"x{i}" for i in range(1, self.n + 1))
        return xs + ("y", "t")

    @property
    def space_vars(self) -> Tuple[str, ...]:
        return self.vars[: self.n]

    def var_index(self, var: str) -> int:
        try:
            return self.vars.index(var)
        except ValueError:
            raise KeyError(f"unknown derivation variable {var!r}") from None

    def symbol_kind(self, name: str) -> str:
        if name in self.dependents:
            return "field"
        if name in self.constants:
            return "constant"
        if self.allow_coords and name in self.space_vars:
            return "coord"
        raise KeyError(f"unknown symbol {name!r} in context")

    def dep_order(self, name: str) -> int:
        # Canonical ordering: fields first (declaration order), then
        # constants, then coordinates.
        if name in self.dependents:
            return self.dependents.index(name)
        if name in self.constants:
            return len(self.dependents) + self.constants.index(name)
        return len(self.dependents) + len(self.constants) + self.space_vars.index(name)

    # -- construction helpers ------------------------------------------------

    def jet(self, dep: str, *derivs: str) -> "DiffPoly":
        """The jet variable ``dep`` differentiated once per listed variable.

        ``ctx.jet("u", "x", "x", "t")`` is u_{xxt}.
        """
        kind = self.symbol_kind(dep)
        midx = [0] * len(self.vars)
        for v in derivs:
            midx[self.var_index(v)] += 1
        if kind != "field" and any(midx):
            raise ValueError(f"{dep!r} is a {kind} symbol and carries no jets")
        j: Jet = (dep, tuple(midx))
        return DiffPoly(self, {((j, 1),): GR_ONE})

    def const(self, value: Scalar) -> "DiffPoly":
        v = GaussianRational.coerce(value)
        if not v:
            return DiffPoly(self, {})
        return DiffPoly(self, {(): v})

    def zero(self) -> "DiffPoly":
        return DiffPoly(self, {})

    def one(self) -> "DiffPoly":
        return self.const(1)


def jet_key(ctx: Context, j: Jet) -> tuple:
    """Canonical total order on jets: dep id, then graded-lex multi-index."""
    dep, midx = j
    return (ctx.dep_order(dep), sum(midx), midx)


def monomial_key(ctx: Context, m: Monomial) -> tuple:
    """Graded-lex order on monomials, for deterministic rendering/reduction."""
    deg = sum(e for _, e in m)
    return (deg, tuple((jet_key(ctx, j), e) for j, e in m))


def _sort_monomial(ctx: Context, factors: Iterable[Tuple[Jet, int]]) -> Monomial:
    merged: Dict[Jet, int] = {}
    for j, e in factors:
        merged[j] = merged.get(j, 0) + e
    items = [(j, e) for j, e in merged.items() if e != 0]
    items.sort(key=lambda it: jet_key(ctx, it[0]), reverse=True)
    return tuple(items)


class DiffPoly:
    """A sparse multivariate polynomial in jet variables over Q(i).

    Instances are immutable in use (operations return fresh objects);
    equality is structural equality of normal forms.
    """

    __slots__ = ("ctx", "terms")

    def __init__(self, ctx: Context, terms: Mapping[Monomial, GaussianRational]):
        self.ctx = ctx
        self.terms: Dict[Monomial, GaussianRational] = {
            m: c for m, c in terms.items() if c
        }

    # -- predicates ----------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return all(m == () for m in self.terms)

    def constant_value(self) -> GaussianRational:
        if not self.is_constant():
            raise ValueError("polynomial is not constant")
        return self.terms.get((), GR_ZERO)

    def degree(self) -> int:
        if not self.terms:
            return 0
        return max(sum(e for _, e in m) for m in self.terms)

    def jets(self) -> set:
        out = set()
        for m in self.terms:
            for j, _ in m:
                out.add(j)
        return out

    # -- ring operations -----------------------------------------------------

    def _check(self, other: "DiffPoly") -> None:
        if self.ctx is not other.ctx and self.ctx != other.ctx:
            raise ValueError("operands come from different contexts")

    def __add__(self, other: Union["DiffPoly", Scalar]) -> "DiffPoly":
        if not isinstance(other, DiffPoly):
            other = self.ctx.const(other)
        self._check(other)
        out = dict(self.terms)
        for m, c in other.terms.items():
            s = out.get(m, GR_ZERO) + c
            if s:
                out[m] = s
            else:
                out.pop(m, None)
        return DiffPoly(self.ctx, out)

    __radd__ = __add__

    def __sub__(self, other: Union["DiffPoly", Scalar]) -> "DiffPoly":
        if not isinstance(other, DiffPoly):
            other = self.ctx.const(other)
        return self + (-other)

    def __rsub__(self, other: Scalar) -> "DiffPoly":
        return (-self) + other

    def __neg__(self) -> "DiffPoly":
        return DiffPoly(self.ctx, {m: -c for m, c in self.terms.items()})

    def __mul__(self, other: Union["DiffPoly", Scalar]) -> "DiffPoly":
        if not isinstance(other, DiffPoly):
            c = GaussianRational.coerce(other)
            if not c:
                return DiffPoly(self.ctx, {})
            return DiffPoly(self.ctx, {m: v * c for m, v in self.terms.items()})
        self._check(other)
        if not self.terms or not other.terms:
            return DiffPoly(self.ctx, {})
        out: Dict[Monomial, GaussianRational] = {}
        for ma, ca in self.terms.items():
            for mb, cb in other.terms.items():
                m = _sort_monomial(self.ctx, ma + mb)
                s = out.get(m, GR_ZERO) + ca * cb
                if s:
                    out[m] = s
                else:
                    out.pop(m, None)
        return DiffPoly(self.ctx, out)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "DiffPoly":
        if k < 0:
            raise ValueError("negative powers are not polynomials")
        out = self.ctx.one()
        base = self
        while k:
            if k & 1:
                out = out * base
            k >>= 1
            if k:
                base = base * base
        return out

    def __eq__(self, other: object) -> bool:
        if isinstance(other, (int, Fraction, GaussianRational)):
            other = self.ctx.const(other)
        if not isinstance(other, DiffPoly):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self) -> int:
        return hash(frozenset(self.terms.items()))

    # -- calculus ------------------------------------------------------------

    def total_derivative(self, var: str) -> "DiffPoly":
        """Total derivative along a derivation variable (Leibniz over monomials).

        Each jet factor u_alpha contributes u_{alpha+var}; constants give 0;
        a coordinate symbol gives the Kronecker delta.
        """
        vi = self.ctx.var_index(var)  # also rejects lambda/unknown names
        out: Dict[Monomial, GaussianRational] = {}
        for m, c in self.terms.items():
            for pos, (j, e) in enumerate(m):
                dep, midx = j
                kind = self.ctx.symbol_kind(dep)
                rest = list(m[:pos] + m[pos + 1:])
                if e > 1:
                    rest.append((j, e - 1))
                if kind == "field":
                    nm = list(midx)
                    nm[vi] += 1
                    rest.append(((dep, tuple(nm)), 1))
                    dm = _sort_monomial(self.ctx, rest)
                    dc = c * e
                elif kind == "coord":
                    if self.ctx.vars[vi] != dep:
                        continue
                    dm = _sort_monomial(self.ctx, rest)
                    dc = c * e
                else:  # constant
                    continue
                s = out.get(dm, GR_ZERO) + dc
                if s:
                    out[dm] = s
                else:
                    out.pop(dm, None)
        return DiffPoly(self.ctx, out)

    def total_derivative_multi(self, midx: Iterable[int]) -> "DiffPoly":
        p = self
        for vi, k in enumerate(midx):
            for _ in range(k):
                p = p.total_derivative(p.ctx.vars[vi])
        return p

    # -- evaluation ----------------------------------------------------------

    def eval_numeric(self, assignment: Mapping[Jet, complex]) -> complex:
        """Evaluate with complex double substitution for every jet.

        Constants must be assigned too (keyed as ``(name, (0,..,0))``).
        Raises ``KeyError`` naming any missing jet.
        """
        zero_midx = (0,) * len(self.ctx.vars)
        total = 0j
        for m, c in self.terms.items():
            val = c.to_complex()
            for j, e in m:
                dep, midx = j
                if self.ctx.symbol_kind(dep) == "coord" and j not in assignment:
                    raise KeyError(f"missing assignment for coordinate {dep}")
                try:
                    base = assignment[j]
                except KeyError:
                    label = render_jet(j, self.ctx) if midx != zero_midx else dep
                    raise KeyError(f"missing assignment for jet {label}") from None
                val *= base ** e
            total += val
        return total

    # -- rendering -----------------------------------------------------------

    def __str__(self) -> str:
        return render_poly(self)

    def __repr__(self) -> str:
        return f"DiffPoly({render_poly(self)})"


def render_jet(j: Jet, ctx: Context) -> str:
    dep, midx = j
    if not any(midx):
        return dep
    inner = ",".join(
        v for v, k in zip(ctx.vars, midx) for _ in range(k)
    )
    return f"{dep}[{inner}]"


def render_poly(p: DiffPoly) -> str:
    """Canonical text form ``coeff*dep[indices]^exp*...``, sorted terms."""
    if not p.terms:
        return "0"
    items = sorted(p.terms.items(),
                   key=lambda it: monomial_key(p.ctx, it[0]), reverse=True)
    parts = []
    for m, c in items:
        factors = [f"{render_jet(j, p.ctx)}" + (f"^{e}" if e > 1 else "")
                   for j, e in m]
        if not factors:
            parts.append(str(c))
        elif c == GR_ONE:
            parts.append("*".join(factors))
        elif c == GaussianRational(-1):
            parts.append("-" + "*".join(factors))
        else:
            parts.append("*".join([str(c)] + factors))
    out = parts[0]
    for part in parts[1:]:
        out += part if part.startswith("-") else "+" + part
    return out
