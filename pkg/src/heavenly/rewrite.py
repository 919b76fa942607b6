"""Oriented rewrite systems for differential polynomials.

A PDE enters the engine in one of two shapes:

* *jet rules* -- oriented rewrites ``leading jet -> rhs`` where the leading
  side is a single jet pattern (a dependent plus a minimal multi-index;
  any jet whose multi-index dominates the pattern is reducible via a total
  derivative of the rule, generated on demand and cached);
* *generators* -- plain polynomials for the ideal-membership backend, used
  when the equation is not linearly orientable in any single jet.

Auxiliary *monomial rules* encode algebraic relations such as
``s * u_x -> 1`` for an inverse-derivative symbol ``s``; they rewrite any
monomial divisible by the pattern.

Termination is audited, not assumed: each system carries a rational weight
for every derivation variable and (optionally) per-dependent weights, and
the audit checks that every right-hand-side jet ranks strictly below the
rule head.  Because prolongation adds the same derivative counts to both
sides, strict descent is preserved for all prolonged rules.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from .jets import (Context, DiffPoly, GaussianRational, GR_ONE, GR_ZERO, Jet,
                   Monomial, _sort_monomial, jet_key, monomial_key, render_jet,
                   render_poly)


class NonTerminationError(RuntimeError):
    """Raised when reduction exceeds its fuel or a ranking audit fails."""


@dataclass(frozen=True)
class JetRule:
    """An oriented rewrite ``dep_{pattern} -> rhs``."""

    dep: str
    pattern: Tuple[int, ...]
    rhs: DiffPoly
    name: str = ""

    def matches(self, j: Jet) -> bool:
        return j[0] == self.dep and all(a >= b for a, b in zip(j[1], self.pattern))


@dataclass(frozen=True)
class MonomialRule:
    """An algebraic relation ``pattern monomial -> rhs`` (degree-decreasing)."""

    pattern: Monomial
    rhs: DiffPoly
    name: str = ""

    def divides(self, m: Monomial) -> bool:
        have = dict(m)
        return all(have.get(j, 0) >= e for j, e in self.pattern)


class PdeSystem:
    """A PDE (or PDE system) in verification-ready form.

    ``ranking`` maps derivation-variable names to rational weights and may
    also assign weights to dependents (keys that are dependent names); the
    rank of a jet is ``dep_weight + sum(var_weight * derivative count)``.
    """

    def __init__(self,
                 ctx: Context,
                 rules: Sequence[JetRule] = (),
                 algebraic: Sequence[MonomialRule] = (),
                 generators: Sequence[DiffPoly] = (),
                 ranking: Optional[Mapping[str, Fraction]] = None,
                 name: str = ""):
        self.ctx = ctx
        self.rules = list(rules)
        self.algebraic = list(algebraic)
        self.generators = list(generators)
        self.ranking = dict(ranking or {})
        self.name = name
        self._prolonged: Dict[Tuple[int, Tuple[int, ...]], DiffPoly] = {}
        if self.rules:
            self.audit()

    # -- ranking audit -------------------------------------------------------

    def _rank(self, j: Jet) -> Fraction:
        dep, midx = j
        r = Fraction(self.ranking.get(dep, 0))
        for v, k in zip(self.ctx.vars, midx):
            if k:
                r += Fraction(self.ranking.get(v, 0)) * k
        return r

    def audit(self) -> None:
        """Check strict rank descent and pattern-freeness of every rule."""
        for rule in self.rules:
            head_rank = self._rank((rule.dep, rule.pattern))
            for j in rule.rhs.jets():
                if self.ctx.symbol_kind(j[0]) != "field":
                    continue
                if any(r.matches(j) for r in self.rules):
                    raise NonTerminationError(
                        f"rule {rule.name or rule.dep}: rhs jet "
                        f"{render_jet(j, self.ctx)} matches a leading pattern")
                if self._rank(j) >= head_rank:
                    raise NonTerminationError(
                        f"rule {rule.name or rule.dep}: rhs jet "
                        f"{render_jet(j, self.ctx)} does not rank below the head")
        for arule in self.algebraic:
            pat_deg = sum(e for _, e in arule.pattern)
            if arule.rhs.degree() >= pat_deg:
                raise NonTerminationError(
                    f"algebraic rule {arule.name}: rhs degree does not decrease")

    # -- reduction -----------------------------------------------------------

    def _prolong(self, idx: int, delta: Tuple[int, ...]) -> DiffPoly:
        key = (idx, delta)
        got = self._prolonged.get(key)
        if got is not None:
            return got
        if not any(delta):
            out = self.rules[idx].rhs
        else:
            # Step down one derivative and differentiate the cached result.
            vi = next(i for i, k in enumerate(delta) if k)
            prev = list(delta)
            prev[vi] -= 1
            out = self._prolong(idx, tuple(prev)).total_derivative(self.ctx.vars[vi])
        self._prolonged[key] = out
        return out

    def _find_jet_rule(self, j: Jet) -> Optional[int]:
        for idx, rule in enumerate(self.rules):
            if rule.matches(j):
                return idx
        return None

    def reduce(self, p: DiffPoly, max_passes: int = 10000) -> DiffPoly:
        """Normal form of ``p`` modulo the oriented rules and their prolongations.

        Deterministic: within each pass, terms are visited in descending
        canonical order and the highest reducible jet of a term is replaced.
        """
        if not self.rules and not self.algebraic:
            return p
        ctx = self.ctx
        for _ in range(max_passes):
            changed = False
            out = ctx.zero()
            items = sorted(p.terms.items(),
                           key=lambda it: monomial_key(ctx, it[0]), reverse=True)
            for m, c in items:
                hit = None
                for j, e in m:  # factors stored in descending jet order
                    idx = self._find_jet_rule(j)
                    if idx is not None:
                        hit = (j, e, idx)
                        break
                if hit is None:
                    out = out + DiffPoly(ctx, {m: c})
                    continue
                j, e, idx = hit
                rule = self.rules[idx]
                delta = tuple(a - b for a, b in zip(j[1], rule.pattern))
                repl = self._prolong(idx, delta)
                rest = [(jj, ee) for jj, ee in m if jj != j]
                if e > 1:
                    rest.append((j, e - 1))
                out = out + DiffPoly(ctx, {_sort_monomial(ctx, rest): c}) * repl
                changed = True
            p = out
            if changed:
                continue
            # Jet-rule fixpoint reached; one algebraic pass, then recheck.
            out = ctx.zero()
            for m, c in sorted(p.terms.items(),
                               key=lambda it: monomial_key(ctx, it[0]), reverse=True):
                arule = next((r for r in self.algebraic if r.divides(m)), None)
                if arule is None:
                    out = out + DiffPoly(ctx, {m: c})
                    continue
                have = dict(m)
                for j, e in arule.pattern:
                    have[j] -= e
                rest = _sort_monomial(ctx, [(j, e) for j, e in have.items() if e])
                out = out + DiffPoly(ctx, {rest: c}) * arule.rhs
                changed = True
            p = out
            if not changed:
                return p
        raise NonTerminationError(
            f"reduction did not reach a normal form in {max_passes} passes"
            + (f" (system {self.name})" if self.name else ""))

    def describe(self) -> List[str]:
        lines = []
        for rule in self.rules:
            head = render_jet((rule.dep, rule.pattern), self.ctx)
            lines.append(f"{head} -> {render_poly(rule.rhs)}")
        for arule in self.algebraic:
            pat = "*".join(render_jet(j, self.ctx) + (f"^{e}" if e > 1 else "")
                           for j, e in arule.pattern)
            lines.append(f"{pat} -> {render_poly(arule.rhs)}")
        for g in self.generators:
            lines.append(f"generator: {render_poly(g)} = 0")
        return lines


# -- ideal membership --------------------------------------------------------


@dataclass
class CertificateTerm:
    generator_index: int
    derivative_word: Tuple[int, ...]  # multi-index over ctx.vars
    coefficient: DiffPoly


@dataclass
class Certificate:
    """An explicit representation p = sum c * D_word(generator)."""

    target: DiffPoly
    terms: List[CertificateTerm] = field(default_factory=list)

    def expand(self, sys: PdeSystem) -> DiffPoly:
        acc = sys.ctx.zero()
        for t in self.terms:
            g = sys.generators[t.generator_index].total_derivative_multi(
                t.derivative_word)
            acc = acc + t.coefficient * g
        return acc

    def verify(self, sys: PdeSystem) -> bool:
        return (self.expand(sys) - self.target).is_zero()

    def describe(self, sys: PdeSystem) -> List[str]:
        ctx = sys.ctx
        out = []
        for t in self.terms:
            word = "".join(f"D_{v}" for v, k in zip(ctx.vars, t.derivative_word)
                           for _ in range(k)) or "1"
            out.append(f"({render_poly(t.coefficient)}) * {word}"
                       f"(G{t.generator_index})")
        return out


def _derivative_words(ctx: Context, max_order: int) -> List[Tuple[int, ...]]:
    nv = len(ctx.vars)
    words = [(0,) * nv]
    frontier = list(words)
    for _ in range(max_order):
        nxt = []
        for w in frontier:
            for i in range(nv):
                neww = list(w)
                neww[i] += 1
                neww = tuple(neww)
                if neww not in nxt:
                    nxt.append(neww)
        # Deduplicate against everything collected so far, preserving order.
        fresh = [w for w in nxt if w not in words]
        words.extend(fresh)
        frontier = fresh
    return words


def _coefficient_monomials(ctx: Context, jets: List[Jet], max_degree: int
                           ) -> List[Monomial]:
    jets = sorted(set(jets), key=lambda j: jet_key(ctx, j))
    monos: List[Monomial] = [()]
    frontier: List[Monomial] = [()]
    for _ in range(max_degree):
        nxt: List[Monomial] = []
        for m in frontier:
            for j in jets:
                nm = _sort_monomial(ctx, list(m) + [(j, 1)])
                if nm not in nxt and nm not in monos:
                    nxt.append(nm)
        monos.extend(nxt)
        frontier = nxt
    return monos


def ideal_membership(p: DiffPoly, sys: PdeSystem,
                     max_order: int = 2, max_degree: int = 0
                     ) -> Optional[Certificate]:
    """Search for p = sum c_a * D_a(generator) by exact sparse linear algebra.

    Candidate combinations range over total-derivative words of length at
    most ``max_order`` and polynomial coefficients of degree at most
    ``max_degree`` (built from jets occurring in p and the derived
    generators).  Returns None when no certificate exists within the bounds
    -- which is a search failure, not a proof of non-membership.  Any
    certificate found is re-verified by direct expansion before return.
    """
    if not sys.generators:
        raise ValueError("system has no generators for the certificate backend")
    ctx = sys.ctx
    if p.is_zero():
        return Certificate(target=p, terms=[])

    words = _derivative_words(ctx, max_order)
    derived: List[Tuple[int, Tuple[int, ...], DiffPoly]] = []
    for gi, g in enumerate(sys.generators):
        for w in words:
            dg = g.total_derivative_multi(w)
            if not dg.is_zero():
                derived.append((gi, w, dg))

    jet_pool: List[Jet] = list(p.jets())
    for _, _, dg in derived:
        jet_pool.extend(dg.jets())
    coeff_monos = _coefficient_monomials(ctx, jet_pool, max_degree)

    # Columns: one per (derived generator, coefficient monomial).
    columns: List[Tuple[int, Tuple[int, ...], Monomial, Dict[Monomial, GaussianRational]]] = []
    for gi, w, dg in derived:
        for cm in coeff_monos:
            prod = DiffPoly(ctx, {cm: GR_ONE}) * dg
            columns.append((gi, w, cm, dict(prod.terms)))

    # Row index: every monomial appearing anywhere.
    row_of: Dict[Monomial, int] = {}
    for _, _, _, col in columns:
        for m in col:
            row_of.setdefault(m, len(row_of))
    for m in p.terms:
        row_of.setdefault(m, len(row_of))

    nrows, ncols = len(row_of), len(columns)
    # Dense Gaussian elimination over Q(i); sizes stay small at desk scale.
    mat = [[GR_ZERO] * (ncols + 1) for _ in range(nrows)]
    for ci, (_, _, _, col) in enumerate(columns):
        for m, c in col.items():
            mat[row_of[m]][ci] = c
    for m, c in p.terms.items():
        mat[row_of[m]][ncols] = c

    pivots: List[Tuple[int, int]] = []
    r = 0
    for c in range(ncols):
        pr = next((i for i in range(r, nrows) if mat[i][c]), None)
        if pr is None:
            continue
        mat[r], mat[pr] = mat[pr], mat[r]
        inv = GR_ONE / mat[r][c]
        mat[r] = [v * inv for v in mat[r]]
        for i in range(nrows):
            if i != r and mat[i][c]:
                f = mat[i][c]
                mat[i] = [a - f * b for a, b in zip(mat[i], mat[r])]
        pivots.append((r, c))
        r += 1
        if r == nrows:
            break
    # Inconsistent if a zeroed row still has a nonzero rhs.
    for i in range(nrows):
        if mat[i][ncols] and not any(mat[i][c] for c in range(ncols)):
            return None

    solution = [GR_ZERO] * ncols
    for pr, pc in pivots:
        solution[pc] = mat[pr][ncols]

    cert = Certificate(target=p)
    acc: Dict[Tuple[int, Tuple[int, ...]], DiffPoly] = {}
    for (gi, w, cm, _), val in zip(columns, solution):
        if not val:
            continue
        add = DiffPoly(ctx, {cm: val})
        key = (gi, w)
        acc[key] = acc[key] + add if key in acc else add
    for (gi, w), coeff in sorted(acc.items()):
        if not coeff.is_zero():
            cert.terms.append(CertificateTerm(gi, w, coeff))
    if not cert.verify(sys):
        return None
    return cert
