"""Exact coefficient and polynomial arithmetic over the Gaussian rationals.

Everything downstream works over Q(i): scalars are pairs of
``fractions.Fraction`` values, univariate polynomials are dense coefficient
tuples, bivariate polynomials are sparse exponent maps.  All operations are
exact; no floating point enters this module.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Optional, Union

from .errors import PreconditionFailed

RatInput = Union[int, Fraction]


# ---------------------------------------------------------------------------
# Scalars: elements of Q(i)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Scalar:
    """A Gaussian rational a + b*i with both parts in canonical reduced form.

    Fraction keeps numerator/denominator reduced with positive denominator,
    so structural equality is exact arithmetic equality.
    """

    re: Fraction
    im: Fraction

    @staticmethod
    def of(re: RatInput = 0, im: RatInput = 0) -> "Scalar":
        return Scalar(Fraction(re), Fraction(im))

    def is_zero(self) -> bool:
        return not self.re and not self.im

    def is_rational(self) -> bool:
        return not self.im

    def __add__(self, other: "Scalar") -> "Scalar":
        return Scalar(self.re + other.re, self.im + other.im)

    def __sub__(self, other: "Scalar") -> "Scalar":
        return Scalar(self.re - other.re, self.im - other.im)

    def __neg__(self) -> "Scalar":
        return Scalar(-self.re, -self.im)

    def __mul__(self, other: "Scalar") -> "Scalar":
        return Scalar(
            self.re * other.re - self.im * other.im,
            self.re * other.im + self.im * other.re,
        )

    def conjugate(self) -> "Scalar":
        return Scalar(self.re, -self.im)

    def norm2(self) -> Fraction:
        """Squared modulus, a non-negative rational."""
        return self.re * self.re + self.im * self.im

    def inverse(self) -> "Scalar":
        n = self.norm2()
        if not n:
            raise ZeroDivisionError("inverse of zero scalar")
        return Scalar(self.re / n, -self.im / n)

    def __truediv__(self, other: "Scalar") -> "Scalar":
        return self * other.inverse()

    def __pow__(self, n: int) -> "Scalar":
        if n < 0:
            return self.inverse() ** (-n)
        result = ONE
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def sort_key(self) -> tuple:
        """Total order used for deterministic output: lexicographic on (re, im)."""
        return (self.re, self.im)

    def to_complex(self) -> complex:
        return complex(float(self.re), float(self.im))

    def __str__(self) -> str:
        if not self.im:
            return str(self.re)
        if self.im == 1:
            imtxt = "i"
        elif self.im == -1:
            imtxt = "-i"
        else:
            imtxt = f"{self.im}i"
        if not self.re:
            return imtxt
        sign = "+" if self.im > 0 else ""
        return f"{self.re}{sign}{imtxt}"


ZERO = Scalar.of(0)
ONE = Scalar.of(1)
I = Scalar.of(0, 1)


def _sqrt_fraction(q: Fraction) -> Optional[Fraction]:
    """Exact square root of a non-negative rational, or None if irrational."""
    if q < 0:
        return None
    rn = math.isqrt(q.numerator)
    rd = math.isqrt(q.denominator)
    if rn * rn == q.numerator and rd * rd == q.denominator:
        return Fraction(rn, rd)
    return None


def sqrt_scalar(w: Scalar) -> Optional[Scalar]:
    """A square root of w inside Q(i), or None when no such root exists.

    For w = a+bi a root c+di needs c^2-d^2 = a and 2cd = b, which forces
    (c^2+d^2)^2 = a^2+b^2; squareness of the norm and of the derived real
    parts is decidable exactly.
    """
    if w.is_zero():
        return ZERO
    n = _sqrt_fraction(w.norm2())
    if n is None:
        return None
    c2 = (w.re + n) / 2
    c = _sqrt_fraction(c2)
    if c is not None and c != 0:
        cand = Scalar(c, w.im / (2 * c))
        if cand * cand == w:
            return cand
    d2 = (n - w.re) / 2
    d = _sqrt_fraction(d2)
    if d is not None:
        cand = Scalar(Fraction(0), d)
        if cand * cand == w:
            return cand
    return None


# ---------------------------------------------------------------------------
# Univariate polynomials (dense)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class UniPoly:
    """Polynomial in one indeterminate; coeffs[k] is the degree-k coefficient.

    Invariant: the tuple carries no trailing zeros, so the zero polynomial is
    the empty tuple and the leading coefficient is always nonzero otherwise.
    """

    coeffs: tuple

    @staticmethod
    def make(coeffs: Iterable[Scalar]) -> "UniPoly":
        cs = list(coeffs)
        while cs and cs[-1].is_zero():
            cs.pop()
        return UniPoly(tuple(cs))

    @staticmethod
    def zero() -> "UniPoly":
        return UniPoly(())

    @staticmethod
    def const(s: Scalar) -> "UniPoly":
        return UniPoly.make([s])

    @staticmethod
    def of(*ints: RatInput) -> "UniPoly":
        """Convenience constructor from rational coefficients, low degree first."""
        return UniPoly.make([Scalar.of(v) for v in ints])

    @staticmethod
    def xpow(k: int, coeff: Scalar = ONE) -> "UniPoly":
        return UniPoly.make([ZERO] * k + [coeff])

    @property
    def degree(self) -> int:
        """Degree, with the zero polynomial assigned -1."""
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def is_constant(self) -> bool:
        return len(self.coeffs) <= 1

    def is_monomial(self) -> bool:
        return bool(self.coeffs) and all(
            c.is_zero() for c in self.coeffs[:-1]
        )

    def lcoeff(self) -> Scalar:
        if not self.coeffs:
            return ZERO
        return self.coeffs[-1]

    def coeff(self, k: int) -> Scalar:
        if 0 <= k < len(self.coeffs):
            return self.coeffs[k]
        return ZERO

    def __add__(self, other: "UniPoly") -> "UniPoly":
        n = max(len(self.coeffs), len(other.coeffs))
        return UniPoly.make(
            [self.coeff(k) + other.coeff(k) for k in range(n)]
        )

    def __sub__(self, other: "UniPoly") -> "UniPoly":
        n = max(len(self.coeffs), len(other.coeffs))
        return UniPoly.make(
            [self.coeff(k) - other.coeff(k) for k in range(n)]
        )

    def __neg__(self) -> "UniPoly":
        return UniPoly(tuple(-c for c in self.coeffs))

    def __mul__(self, other: "UniPoly") -> "UniPoly":
        if self.is_zero() or other.is_zero():
            return UniPoly.zero()
        out = [ZERO] * (len(self.coeffs) + len(other.coeffs) - 1)
        for ka, ca in enumerate(self.coeffs):
            if ca.is_zero():
                continue
            for kb, cb in enumerate(other.coeffs):
                out[ka + kb] = out[ka + kb] + ca * cb
        return UniPoly.make(out)

    def scale(self, s: Scalar) -> "UniPoly":
        return UniPoly.make([c * s for c in self.coeffs])

    def __pow__(self, n: int) -> "UniPoly":
        if n < 0:
            raise ValueError("negative polynomial power")
        result = UniPoly.const(ONE)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def derivative(self) -> "UniPoly":
        """Formal derivative with respect to the indeterminate."""
        return UniPoly.make(
            [self.coeffs[k] * Scalar.of(k) for k in range(1, len(self.coeffs))]
        )

    def evaluate(self, s: Scalar) -> Scalar:
        acc = ZERO
        for c in reversed(self.coeffs):
            acc = acc * s + c
        return acc

    def compose(self, inner: "UniPoly") -> "UniPoly":
        """Substitution of a polynomial for the indeterminate (Horner)."""
        acc = UniPoly.zero()
        for c in reversed(self.coeffs):
            acc = acc * inner + UniPoly.const(c)
        return acc

    def divmod(self, d: "UniPoly") -> tuple:
        """Exact field division with remainder."""
        if d.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        rem = list(self.coeffs)
        dd = d.degree
        inv = d.lcoeff().inverse()
        quo = [ZERO] * max(0, len(rem) - dd)
        for k in range(len(rem) - 1, dd - 1, -1):
            c = rem[k]
            if c.is_zero():
                continue
            q = c * inv
            quo[k - dd] = q
            for j, dc in enumerate(d.coeffs):
                rem[k - dd + j] = rem[k - dd + j] - q * dc
        return UniPoly.make(quo), UniPoly.make(rem)

    def monic(self) -> "UniPoly":
        if self.is_zero():
            return self
        return self.scale(self.lcoeff().inverse())

    def valuation(self) -> int:
        """Index of the lowest nonzero coefficient (0 for nonzero constants)."""
        for k, c in enumerate(self.coeffs):
            if not c.is_zero():
                return k
        return 0

    def __str__(self) -> str:
        if self.is_zero():
            return "0"
        parts = []
        for k in range(len(self.coeffs) - 1, -1, -1):
            c = self.coeffs[k]
            if c.is_zero():
                continue
            ctxt = str(c)
            if k == 0:
                parts.append(ctxt)
            else:
                xtxt = "s" if k == 1 else f"s^{k}"
                if ctxt == "1":
                    parts.append(xtxt)
                elif ctxt == "-1":
                    parts.append(f"-{xtxt}")
                elif c.im and c.re:
                    parts.append(f"({ctxt})*{xtxt}")
                else:
                    parts.append(f"{ctxt}*{xtxt}")
        out = parts[0]
        for p in parts[1:]:
            out += p if p.startswith("-") else "+" + p
        return out


def poly_gcd(a: UniPoly, b: UniPoly) -> UniPoly:
    """Monic greatest common divisor via the Euclidean algorithm."""
    while not b.is_zero():
        a, b = b, a.divmod(b)[1]
    return a.monic() if not a.is_zero() else a


# ---------------------------------------------------------------------------
# Bivariate polynomials (sparse)
# ---------------------------------------------------------------------------


class BiPoly:
    """Sparse polynomial in (x, y) over Q(i); keys are (deg_x, deg_y)."""

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping[tuple, Scalar]):
        self.terms = {k: v for k, v in terms.items() if not v.is_zero()}

    @staticmethod
    def zero() -> "BiPoly":
        return BiPoly({})

    @staticmethod
    def const(s: Scalar) -> "BiPoly":
        return BiPoly({(0, 0): s})

    @staticmethod
    def var_x() -> "BiPoly":
        return BiPoly({(1, 0): ONE})

    @staticmethod
    def var_y() -> "BiPoly":
        return BiPoly({(0, 1): ONE})

    def __eq__(self, other: object) -> bool:
        return isinstance(other, BiPoly) and self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return all(k == (0, 0) for k in self.terms)

    @property
    def total_degree(self) -> int:
        if not self.terms:
            return -1
        return max(i + j for (i, j) in self.terms)

    @property
    def deg_y(self) -> int:
        if not self.terms:
            return -1
        return max(j for (_, j) in self.terms)

    @property
    def deg_x(self) -> int:
        if not self.terms:
            return -1
        return max(i for (i, _) in self.terms)

    def coeff(self, i: int, j: int) -> Scalar:
        return self.terms.get((i, j), ZERO)

    def __add__(self, other: "BiPoly") -> "BiPoly":
        out = dict(self.terms)
        for k, v in other.terms.items():
            out[k] = out.get(k, ZERO) + v
        return BiPoly(out)

    def __sub__(self, other: "BiPoly") -> "BiPoly":
        out = dict(self.terms)
        for k, v in other.terms.items():
            out[k] = out.get(k, ZERO) - v
        return BiPoly(out)

    def __neg__(self) -> "BiPoly":
        return BiPoly({k: -v for k, v in self.terms.items()})

    def __mul__(self, other: "BiPoly") -> "BiPoly":
        out: dict = {}
        for (ia, ja), ca in self.terms.items():
            for (ib, jb), cb in other.terms.items():
                k = (ia + ib, ja + jb)
                out[k] = out.get(k, ZERO) + ca * cb
        return BiPoly(out)

    def scale(self, s: Scalar) -> "BiPoly":
        return BiPoly({k: v * s for k, v in self.terms.items()})

    def __pow__(self, n: int) -> "BiPoly":
        if n < 0:
            raise ValueError("negative polynomial power")
        result = BiPoly.const(ONE)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def diff_x(self) -> "BiPoly":
        return BiPoly(
            {(i - 1, j): c * Scalar.of(i) for (i, j), c in self.terms.items() if i}
        )

    def diff_y(self) -> "BiPoly":
        return BiPoly(
            {(i, j - 1): c * Scalar.of(j) for (i, j), c in self.terms.items() if j}
        )

    def evaluate(self, xs: Scalar, ys: Scalar) -> Scalar:
        acc = ZERO
        for (i, j), c in self.terms.items():
            acc = acc + c * (xs ** i) * (ys ** j)
        return acc

    def evaluate_complex(self, xv: complex, yv: complex) -> complex:
        acc = 0j
        for (i, j), c in self.terms.items():
            acc += c.to_complex() * (xv ** i) * (yv ** j)
        return acc

    def shear(self, t: int) -> "BiPoly":
        """Source substitution x -> x + t*y, a determinant-one coordinate change."""
        if t == 0:
            return self
        out: dict = {}
        ts = Scalar.of(t)
        for (i, j), c in self.terms.items():
            # (x + t y)^i expanded by binomials
            for r in range(i + 1):
                k = (r, j + i - r)
                coeff = c * Scalar.of(math.comb(i, r)) * ts ** (i - r)
                out[k] = out.get(k, ZERO) + coeff
        return BiPoly(out)

    def top_form_value(self, t: int) -> Scalar:
        """Value of the top-degree form at (x, y) = (t, 1)."""
        d = self.total_degree
        acc = ZERO
        ts = Scalar.of(t)
        for (i, j), c in self.terms.items():
            if i + j == d:
                acc = acc + c * ts ** i
        return acc

    def sorted_terms(self) -> list:
        """Terms in canonical display order: total degree, then x-degree, descending."""
        return sorted(
            self.terms.items(), key=lambda kv: (-(kv[0][0] + kv[0][1]), -kv[0][0])
        )

    def __repr__(self) -> str:
        from .parsing import format_poly

        return f"BiPoly({format_poly(self)})"


def bipoly(entries: Mapping[tuple, RatInput | Scalar]) -> BiPoly:
    """Build a BiPoly from {(deg_x, deg_y): coefficient} with plain numbers allowed."""
    out = {}
    for k, v in entries.items():
        out[k] = v if isinstance(v, Scalar) else Scalar.of(v)
    return BiPoly(out)


def jacobian(p: BiPoly, q: BiPoly) -> BiPoly:
    """Jacobian determinant p_x q_y - p_y q_x of the pair (p, q)."""
    return p.diff_x() * q.diff_y() - p.diff_y() * q.diff_x()


# ---------------------------------------------------------------------------
# Normalized map pairs
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class MapPair:
    """A polynomial map of the plane, stored monic in y with its Jacobian.

    ``shear`` records the source substitution x -> x + shear*y that produced
    the stored coordinates; it does not change the image of the map.
    """

    p: BiPoly
    q: BiPoly
    jac: BiPoly
    shear: int

    @property
    def deg_p(self) -> int:
        return self.p.total_degree

    @property
    def deg_q(self) -> int:
        return self.q.total_degree


def normalize_monic(p: BiPoly, q: BiPoly) -> MapPair:
    """Shear the source coordinates until both components are monic in y.

    Monic means deg_y equals the total degree; the coefficient of y^deg is the
    top form evaluated at (t, 1), a nonzero polynomial in t of degree at most
    deg p + deg q, so scanning t = 0, 1, 2, ... terminates quickly.
    """
    if p.is_constant() or q.is_constant():
        raise PreconditionFailed("both map components must be nonconstant")
    bound = p.total_degree + q.total_degree + 1
    for t in range(bound + 1):
        if not p.top_form_value(t).is_zero() and not q.top_form_value(t).is_zero():
            ps = p.shear(t)
            qs = q.shear(t)
            return MapPair(ps, qs, jacobian(ps, qs), t)
    raise PreconditionFailed("no shear parameter found; inputs degenerate")
