"""Parametric fractional-power series at infinity and exact substitution.

A parametric series describes a window of curve branches at x -> infinity:

    phi(x, s) = sum_k a_k * x^(1 - k/m)  +  s * x^(1 - n/m)

with finitely many fixed terms and a trailing parameter term.  Substituting
phi into a bivariate polynomial is exact polynomial algebra in s and x^(1/m),
and the highest surviving x-exponent carries the leading coefficient
polynomial used everywhere else in the engine.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .algebra import BiPoly, MapPair, ONE, Scalar, UniPoly, ZERO, I
from .errors import NotARefinement, PreconditionFailed


@dataclass(frozen=True)
class ParamSeries:
    """Window of branches: fixed steps plus a free parameter term.

    ``steps`` is an ascending tuple of (k, coeff) pairs, the term coeff *
    x^(1 - k/mult); ``param_index`` is the k-slot of the parameter term.  The
    canonical form divides mult, param_index and all step indices by their
    gcd, making the representation of a window unique.
    """

    mult: int
    steps: Tuple[Tuple[int, Scalar], ...]
    param_index: int

    @property
    def param_exponent(self) -> Fraction:
        return 1 - Fraction(self.param_index, self.mult)

    def step_exponents(self) -> List[Tuple[Fraction, Scalar]]:
        return [(1 - Fraction(k, self.mult), c) for k, c in self.steps]

    def coeff_at(self, e: Fraction) -> Scalar:
        """Coefficient of x^e among the fixed steps (zero when absent)."""
        for k, c in self.steps:
            if 1 - Fraction(k, self.mult) == e:
                return c
        return ZERO

    def fix_param(self, c: Scalar) -> List[Tuple[Fraction, Scalar]]:
        """Concrete prefix obtained by pinning the parameter to c."""
        prefix = self.step_exponents()
        if not c.is_zero():
            prefix.append((self.param_exponent, c))
        return prefix

    def sort_key(self) -> tuple:
        return (
            self.param_exponent,
            tuple((1 - Fraction(k, self.mult), c.sort_key()) for k, c in self.steps),
        )

    def conjugates(self) -> List["ParamSeries"]:
        """All windows obtained by x^(1/m) -> zeta * x^(1/m), zeta in Q(i).

        Only roots of unity available in Q(i) apply: order dividing 4 and
        dividing the multiplicity.
        """
        units = [ONE]
        if self.mult % 2 == 0:
            units.append(-ONE)
        if self.mult % 4 == 0:
            units.extend([I, -I])
        seen = []
        for z in units:
            steps = tuple((k, c * z ** (-k)) for k, c in self.steps)
            cand = ParamSeries(self.mult, steps, self.param_index)
            if cand not in seen:
                seen.append(cand)
        return seen

    def __repr__(self) -> str:
        from .parsing import format_series

        return f"ParamSeries({format_series(self)})"


def series(
    mult: int,
    steps: Iterable[Tuple[int, Scalar]] = (),
    param_index: int = 0,
) -> ParamSeries:
    """Validated, canonicalized constructor for ParamSeries."""
    if mult <= 0:
        raise ValueError("multiplicity must be positive")
    cleaned = sorted((k, c) for k, c in steps if not c.is_zero())
    ks = [k for k, _ in cleaned]
    if len(set(ks)) != len(ks):
        raise ValueError("duplicate step exponents")
    if any(k < 0 for k in ks):
        raise ValueError("step indices must be non-negative")
    if ks and param_index <= max(ks):
        raise ValueError("parameter term must sit strictly below every step")
    if param_index < 0:
        raise ValueError("parameter index must be non-negative")
    g = math.gcd(mult, param_index)
    for k in ks:
        g = math.gcd(g, k)
    if g > 1:
        mult //= g
        param_index //= g
        cleaned = [(k // g, c) for k, c in cleaned]
    return ParamSeries(mult, tuple(cleaned), param_index)


def series_from_exponents(
    steps: Iterable[Tuple[Fraction, Scalar]], param_exp: Fraction
) -> ParamSeries:
    """Build a canonical series from exponent/coefficient data."""
    steps = list(steps)
    denoms = [(1 - e).denominator for e, _ in steps] + [(1 - param_exp).denominator]
    m = 1
    for d in denoms:
        m = m * d // math.gcd(m, d)
    ks = []
    for e, c in steps:
        k = (1 - e) * m
        ks.append((int(k), c))
    n = (1 - param_exp) * m
    return series(m, ks, int(n))


ROOT_WINDOW = ParamSeries(1, (), 0)  # the series s*x, ancestor of every window


@dataclass(frozen=True)
class ConcreteBranch:
    """A single Newton-Puiseux root at infinity, possibly truncated.

    ``terms`` lists (k, coeff) for the term coeff * x^(1 - k/mult).  A branch
    with ``truncation_k`` None is exact (the stored terms are the whole
    root); otherwise terms with index up to truncation_k are complete and
    nothing below is known.
    """

    mult: int
    terms: Tuple[Tuple[int, Scalar], ...]
    truncation_k: Optional[int]

    def exponents(self) -> List[Tuple[Fraction, Scalar]]:
        return [(1 - Fraction(k, self.mult), c) for k, c in self.terms]

    def coeff_at(self, e: Fraction) -> Optional[Scalar]:
        """Coefficient of x^e, or None when e lies below the known range.

        Indices up to truncation_k are complete; anything strictly below
        exponent 1 - truncation_k/mult is unknown.
        """
        if self.truncation_k is not None:
            known_floor = 1 - Fraction(self.truncation_k, self.mult)
            if e < known_floor:
                return None
        for k, c in self.terms:
            if 1 - Fraction(k, self.mult) == e:
                return c
        return ZERO

    def sort_key(self) -> tuple:
        return tuple(
            (1 - Fraction(k, self.mult), c.sort_key()) for k, c in self.terms
        )

    def evaluate_complex(self, xv: complex) -> complex:
        acc = 0j
        for e, c in self.exponents():
            acc += c.to_complex() * xv ** float(e)
        return acc


def branch_from_prefix(
    prefix: Sequence[Tuple[Fraction, Scalar]], omitted_exp: Optional[Fraction]
) -> ConcreteBranch:
    """Normalize an (exponent, coeff) prefix into a ConcreteBranch.

    ``omitted_exp`` is the exponent of the first term NOT computed; the
    stored truncation index is one step above it, the last known index.
    """
    denoms = [(1 - e).denominator for e, _ in prefix]
    if omitted_exp is not None:
        denoms.append((1 - omitted_exp).denominator)
    m = 1
    for d in denoms:
        m = m * d // math.gcd(m, d)
    terms = tuple(sorted((int((1 - e) * m), c) for e, c in prefix if not c.is_zero()))
    if omitted_exp is None:
        g = m
        for k, _ in terms:
            g = math.gcd(g, k)
        if g > 1:
            m //= g
            terms = tuple((k // g, c) for k, c in terms)
        return ConcreteBranch(m, terms, None)
    trunc_k = int((1 - omitted_exp) * m) - 1
    return ConcreteBranch(m, terms, trunc_k)


@dataclass(frozen=True)
class LeadingData:
    """Leading coefficient polynomials and x-exponents along a window.

    Exponents are integer numerators over the window multiplicity: the first
    map component grows like p_lead(s) * x^(p_exp/mult), and similarly for
    the second component and the Jacobian determinant.
    """

    p_lead: UniPoly
    p_exp: int
    q_lead: UniPoly
    q_exp: int
    jac_lead: UniPoly
    jac_exp: int
    mult: int


# ---------------------------------------------------------------------------
# Exact substitution
# ---------------------------------------------------------------------------


def full_expansion(f: BiPoly, phi: ParamSeries) -> Dict[int, UniPoly]:
    """Exact expansion of f(x, phi(x, s)) as {r: c_r(s)} with x-exponent r/mult.

    The series has finitely many terms, so this is plain polynomial algebra
    in s and x^(1/mult); nothing is truncated.
    """
    if f.is_zero():
        raise PreconditionFailed("cannot expand the zero polynomial")
    m = phi.mult
    # phi as an element of Q(i)[s][X^{+-1}], X = x^(1/m)
    y_elem: Dict[int, UniPoly] = {}
    for k, c in phi.steps:
        y_elem[m - k] = y_elem.get(m - k, UniPoly.zero()) + UniPoly.const(c)
    pslot = m - phi.param_index
    y_elem[pslot] = y_elem.get(pslot, UniPoly.zero()) + UniPoly.xpow(1)

    max_ydeg = f.deg_y
    powers: List[Dict[int, UniPoly]] = [{0: UniPoly.const(ONE)}]
    for _ in range(max_ydeg):
        prev = powers[-1]
        nxt: Dict[int, UniPoly] = {}
        for ra, pa in prev.items():
            for rb, pb in y_elem.items():
                r = ra + rb
                nxt[r] = nxt.get(r, UniPoly.zero()) + pa * pb
        powers.append({r: p for r, p in nxt.items() if not p.is_zero()})

    out: Dict[int, UniPoly] = {}
    for (dx, dy), c in f.terms.items():
        shift = dx * m
        for r, poly in powers[dy].items():
            key = r + shift
            out[key] = out.get(key, UniPoly.zero()) + poly.scale(c)
    return {r: p for r, p in out.items() if not p.is_zero()}


def substitute(f: BiPoly, phi: ParamSeries) -> Tuple[UniPoly, int]:
    """Leading coefficient polynomial of f along the window and its exponent.

    Returns (lead, e) with f(x, phi(x, s)) = lead(s) * x^(e/mult) + lower
    terms in x.
    """
    exp = full_expansion(f, phi)
    if not exp:
        raise PreconditionFailed("expansion vanished identically")
    r = max(exp)
    return exp[r], r


def leading_data(f: MapPair, phi: ParamSeries) -> LeadingData:
    """Leading data of both map components and the Jacobian along a window."""
    if f.jac.is_zero():
        raise PreconditionFailed("map has identically vanishing Jacobian")
    p_lead, p_exp = substitute(f.p, phi)
    q_lead, q_exp = substitute(f.q, phi)
    jac_lead, jac_exp = substitute(f.jac, phi)
    return LeadingData(p_lead, p_exp, q_lead, q_exp, jac_lead, jac_exp, phi.mult)


# ---------------------------------------------------------------------------
# Refinement
# ---------------------------------------------------------------------------


def refine(
    psi: ParamSeries, c: Scalar, next_k: int, next_mult: int
) -> ParamSeries:
    """Pin psi's parameter to c and open a fresh parameter term lower down.

    The new parameter exponent 1 - next_k/next_mult must be strictly smaller
    than psi's; the result is re-canonicalized.
    """
    new_exp = 1 - Fraction(next_k, next_mult)
    if new_exp >= psi.param_exponent:
        raise PreconditionFailed("refinement must strictly decrease the exponent")
    m = psi.mult * next_mult // math.gcd(psi.mult, next_mult)
    scale_old = m // psi.mult
    steps = [(k * scale_old, coeff) for k, coeff in psi.steps]
    if not c.is_zero():
        steps.append((psi.param_index * scale_old, c))
    n = next_k * (m // next_mult)
    return series(m, steps, n)


def refine_to_exponent(psi: ParamSeries, c: Scalar, e: Fraction) -> ParamSeries:
    frac = 1 - e
    return refine(psi, c, frac.numerator, frac.denominator)


def is_refinement(
    psi: ParamSeries, phi: ParamSeries
) -> Tuple[bool, Optional[Scalar], List[Tuple[Fraction, Scalar]]]:
    """Does phi refine psi?  Returns (flag, witness c, intermediate coeffs).

    phi refines psi when phi's fixed terms above psi's parameter slot agree
    exactly with psi's steps; the witness c is phi's coefficient at psi's
    parameter exponent and the intermediate list covers exponents strictly
    between the two parameter slots (zeros omitted).
    """
    if phi == psi:
        return True, None, []
    e_cut = psi.param_exponent
    if phi.param_exponent >= e_cut:
        return False, None, []
    upper = [(e, c) for e, c in phi.step_exponents() if e > e_cut]
    if upper != psi.step_exponents():
        return False, None, []
    c = phi.coeff_at(e_cut)
    mids = [
        (e, coeff)
        for e, coeff in phi.step_exponents()
        if phi.param_exponent < e < e_cut
    ]
    return True, c, mids


def window_at(phi: ParamSeries, e: Fraction) -> ParamSeries:
    """The prefix window of phi with the parameter slot moved up to exponent e."""
    if e < phi.param_exponent:
        raise PreconditionFailed("window exponent below the series parameter")
    keep = [(ee, c) for ee, c in phi.step_exponents() if ee > e]
    return series_from_exponents(keep, e)


# ---------------------------------------------------------------------------
# Expansion around a concrete prefix
# ---------------------------------------------------------------------------


def prefix_expansion(
    f: BiPoly, prefix: Sequence[Tuple[Fraction, Scalar]]
) -> Dict[int, Dict[Fraction, Scalar]]:
    """Exact expansion of f(x, s(x) + z) as {z-degree: {x-exponent: coeff}}.

    s(x) is the concrete fractional-power sum described by ``prefix``.  The
    result drives Newton polygon steps: for each z-degree j the inner dict
    lists all surviving x-exponents with exact coefficients.
    """
    spowers: List[Dict[Fraction, Scalar]] = [{Fraction(0): ONE}]
    base = {e: c for e, c in prefix if not c.is_zero()}
    for _ in range(f.deg_y):
        prev = spowers[-1]
        if not base:
            spowers.append({})
            continue
        nxt: Dict[Fraction, Scalar] = {}
        for ea, ca in prev.items():
            for eb, cb in base.items():
                e = ea + eb
                acc = nxt.get(e, ZERO) + ca * cb
                if acc.is_zero():
                    nxt.pop(e, None)
                else:
                    nxt[e] = acc
        spowers.append(nxt)

    out: Dict[int, Dict[Fraction, Scalar]] = {}
    for (dx, dy), c in f.terms.items():
        for j in range(dy + 1):
            binom = Scalar.of(math.comb(dy, j))
            for e, sc in spowers[dy - j].items():
                key = e + dx
                coeff = c * binom * sc
                slot = out.setdefault(j, {})
                acc = slot.get(key, ZERO) + coeff
                if acc.is_zero():
                    slot.pop(key, None)
                else:
                    slot[key] = acc
    return {j: d for j, d in out.items() if d}
