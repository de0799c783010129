"""Newton-polygon expansion at infinity.

Three related computations live here:

* ``curve_branches`` enumerates all Newton-Puiseux roots at infinity of a
  single curve that is monic in y, with conjugates listed explicitly and
  exact termination or controlled truncation.
* ``expansion_tree`` grows the window tree of a map pair: children follow
  roots of the product of the two leading polynomials, stopping at the
  exponents where a leading polynomial changes shape or a leading exponent
  crosses zero.
* ``associated_sequence`` / ``root_index_data`` extract the maximal chain of
  windows between two series together with branch bookkeeping, and verify
  the structural side conditions.

Root extraction over Q(i) uses rational-root search on cleared Gaussian
integer coefficients plus the explicit quadratic formula; anything that
fails to split raises or records ExtensionRequired rather than falling back
to numerics.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .algebra import (
    BiPoly,
    MapPair,
    ONE,
    Scalar,
    UniPoly,
    ZERO,
    sqrt_scalar,
)
from .errors import (
    EngineError,
    ExtensionRequired,
    NotARefinement,
    PreconditionFailed,
    VerificationFailure,
)
from .puiseux import (
    ConcreteBranch,
    LeadingData,
    ParamSeries,
    ROOT_WINDOW,
    branch_from_prefix,
    is_refinement,
    leading_data,
    prefix_expansion,
    refine_to_exponent,
    window_at,
)

# ---------------------------------------------------------------------------
# Root finding over Q(i)
# ---------------------------------------------------------------------------


def _factor_integer(n: int) -> Dict[int, int]:
    """Prime factorization by trial division; inputs stay desk-scale."""
    out: Dict[int, int] = {}
    n = abs(n)
    d = 2
    while d * d <= n:
        while n % d == 0:
            out[d] = out.get(d, 0) + 1
            n //= d
        d += 1 if d == 2 else 2
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def _gaussian_prime_above(p: int) -> Tuple[int, int]:
    """A Gaussian prime a+bi of norm p, for p = 2 or p = 1 mod 4."""
    for a in range(1, math.isqrt(p) + 1):
        b2 = p - a * a
        b = math.isqrt(b2)
        if b * b == b2:
            return (a, b)
    raise EngineError(f"no two-square decomposition for {p}")


def _gi_mul(a: Tuple[int, int], b: Tuple[int, int]) -> Tuple[int, int]:
    return (a[0] * b[0] - a[1] * b[1], a[0] * b[1] + a[1] * b[0])


def _gi_divides(d: Tuple[int, int], g: Tuple[int, int]) -> bool:
    n = d[0] * d[0] + d[1] * d[1]
    re = g[0] * d[0] + g[1] * d[1]
    im = g[1] * d[0] - g[0] * d[1]
    return n != 0 and re % n == 0 and im % n == 0


def _gi_exact_div(g: Tuple[int, int], d: Tuple[int, int]) -> Tuple[int, int]:
    n = d[0] * d[0] + d[1] * d[1]
    return ((g[0] * d[0] + g[1] * d[1]) // n, (g[1] * d[0] - g[0] * d[1]) // n)


def _gaussian_divisors(g: Tuple[int, int]) -> List[Tuple[int, int]]:
    """All divisors of a nonzero Gaussian integer, up to unit multiples."""
    primes: List[Tuple[int, int]] = []
    rest = g
    norm = g[0] * g[0] + g[1] * g[1]
    for p, e in sorted(_factor_integer(norm).items()):
        if p == 2:
            pi = (1, 1)
            while _gi_divides(pi, rest):
                primes.append(pi)
                rest = _gi_exact_div(rest, pi)
        elif p % 4 == 1:
            a, b = _gaussian_prime_above(p)
            for pi in ((a, b), (a, -b)):
                while _gi_divides(pi, rest):
                    primes.append(pi)
                    rest = _gi_exact_div(rest, pi)
        else:
            pi = (p, 0)
            while _gi_divides(pi, rest):
                primes.append(pi)
                rest = _gi_exact_div(rest, pi)
    divisors = [(1, 0)]
    for pi in primes:
        divisors += [_gi_mul(d, pi) for d in divisors]
    uniq = {}
    for d in divisors:
        # canonical representative among unit multiples
        best = min(
            [d, (-d[0], -d[1]), (-d[1], d[0]), (d[1], -d[0])]
        )
        uniq[best] = best
    return list(uniq.values())


def _clear_denominators(h: UniPoly) -> List[Tuple[int, int]]:
    """Coefficients as Gaussian integers after multiplying by a common lcm."""
    lcm = 1
    for c in h.coeffs:
        for q in (c.re, c.im):
            lcm = lcm * q.denominator // math.gcd(lcm, q.denominator)
    out = []
    for c in h.coeffs:
        out.append((int(c.re * lcm), int(c.im * lcm)))
    return out


def _rational_roots(h: UniPoly) -> List[Scalar]:
    """Gaussian-rational roots of h (no multiplicities), h(0) != 0, deg >= 1."""
    ints = _clear_denominators(h)
    lead = ints[-1]
    const = ints[0]
    num_divs = _gaussian_divisors(const)
    den_divs = _gaussian_divisors(lead)
    units = [Scalar.of(1), Scalar.of(-1), Scalar.of(0, 1), Scalar.of(0, -1)]
    found = []
    seen = set()
    for r in num_divs:
        rs = Scalar.of(Fraction(r[0]), Fraction(r[1]))
        for s in den_divs:
            ss = Scalar.of(Fraction(s[0]), Fraction(s[1]))
            base = rs / ss
            for u in units:
                cand = base * u
                key = (cand.re, cand.im)
                if key in seen:
                    continue
                seen.add(key)
                if h.evaluate(cand).is_zero():
                    found.append(cand)
    return found


def _quadratic_roots(h: UniPoly) -> Optional[List[Scalar]]:
    """Both roots of a quadratic when its discriminant is a square in Q(i)."""
    a, b, c = h.coeff(2), h.coeff(1), h.coeff(0)
    disc = b * b - Scalar.of(4) * a * c
    s = sqrt_scalar(disc)
    if s is None:
        return None
    two_a = (Scalar.of(2) * a).inverse()
    return [(-b + s) * two_a, (-b - s) * two_a]


def all_roots(h: UniPoly) -> Tuple[List[Tuple[Scalar, int]], UniPoly]:
    """Roots of h in Q(i) with multiplicities, plus the unsplit remainder.

    The remainder is a constant when h splits completely; otherwise it is
    the product of factors with no Gaussian-rational root (degree >= 2).
    """
    if h.is_zero():
        raise PreconditionFailed("root search on the zero polynomial")
    roots: List[Tuple[Scalar, int]] = []
    v = h.valuation()
    if v:
        roots.append((ZERO, v))
        h = UniPoly(h.coeffs[v:])
    while h.degree >= 1:
        if h.degree == 1:
            roots.append((-h.coeff(0) / h.coeff(1), 1))
            h = UniPoly.const(h.lcoeff())
            break
        cands = _rational_roots(h)
        if not cands:
            if h.degree == 2:
                pair = _quadratic_roots(h)
                if pair is not None:
                    for r in pair:
                        roots.append((r, 1))
                    h = UniPoly.const(h.lcoeff())
                    # merge duplicates from a double root
                    break
            return _merge_roots(roots), h
        for r in cands:
            mult = 0
            while True:
                quo, rem = h.divmod(UniPoly.make([-r, ONE]))
                if not rem.is_zero():
                    break
                h = quo
                mult += 1
            if mult:
                roots.append((r, mult))
    return _merge_roots(roots), h


def _merge_roots(roots: List[Tuple[Scalar, int]]) -> List[Tuple[Scalar, int]]:
    acc: Dict[tuple, Tuple[Scalar, int]] = {}
    for r, m in roots:
        key = (r.re, r.im)
        if key in acc:
            acc[key] = (r, acc[key][1] + m)
        else:
            acc[key] = (r, m)
    return sorted(acc.values(), key=lambda rm: rm[0].sort_key())


def roots_in_field(h: UniPoly) -> List[Tuple[Scalar, int]]:
    """Roots over Q(i); raises ExtensionRequired when a factor fails to split."""
    roots, rest = all_roots(h)
    if rest.degree >= 1:
        raise ExtensionRequired(rest, "irreducible factor over Q(i)")
    return roots


# ---------------------------------------------------------------------------
# Newton polygon utilities
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SupportPoint:
    """One z-degree of an expansion with its top x-exponent and coefficient."""

    j: int
    top: Fraction
    lead: Scalar


@dataclass(frozen=True)
class PolygonEdge:
    """An edge of the upper Newton hull: slope and characteristic polynomial."""

    slope: Fraction
    j_lo: int
    j_hi: int
    chi: UniPoly  # coefficient of c^(j - j_lo) indexes the on-edge points


def support_points(expansion: Dict[int, Dict[Fraction, Scalar]]) -> List[SupportPoint]:
    pts = []
    for j in sorted(expansion):
        top = max(expansion[j])
        pts.append(SupportPoint(j, top, expansion[j][top]))
    return pts


def upper_hull(pts: Sequence[SupportPoint]) -> List[SupportPoint]:
    """Vertices of the upper concave hull of (j, top), ascending in j."""
    hull: List[SupportPoint] = []
    for p in pts:
        while len(hull) >= 2:
            a, b = hull[-2], hull[-1]
            # keep concavity: slope(a,b) must strictly exceed slope(b,p)
            lhs = (b.top - a.top) * (p.j - b.j)
            rhs = (p.top - b.top) * (b.j - a.j)
            if lhs <= rhs:
                hull.pop()
            else:
                break
        hull.append(p)
    return hull


def hull_edges(pts: Sequence[SupportPoint]) -> List[PolygonEdge]:
    """All edges of the upper hull, with characteristic polynomials.

    Points that lie on an edge line but are not vertices contribute their
    leading coefficients to that edge's characteristic polynomial.
    """
    if len(pts) < 2:
        return []
    hull = upper_hull(pts)
    edges = []
    for a, b in zip(hull, hull[1:]):
        slope = (a.top - b.top) / (b.j - a.j)
        coeffs = [ZERO] * (b.j - a.j + 1)
        for p in pts:
            if a.j <= p.j <= b.j and p.top == a.top - slope * (p.j - a.j):
                coeffs[p.j - a.j] = p.lead
        edges.append(PolygonEdge(slope, a.j, b.j, UniPoly.make(coeffs)))
    return edges


def envelope_value(pts: Sequence[SupportPoint], e: Fraction) -> Fraction:
    """max_j (top_j + e*j): the x-exponent of the expansion at parameter slope e."""
    return max(p.top + e * p.j for p in pts)


def envelope_zero(pts: Sequence[SupportPoint], below: Fraction) -> Optional[Fraction]:
    """Largest e < below where the envelope value is exactly zero, if any."""
    cands = set()
    for p in pts:
        if p.j > 0:
            cands.add(-p.top / Fraction(p.j))
    for edge in hull_edges(pts):
        cands.add(edge.slope)
    best = None
    for e in cands:
        if e < below and envelope_value(pts, e) == 0:
            if best is None or e > best:
                best = e
    return best


# ---------------------------------------------------------------------------
# Curve branches (Newton-Puiseux roots at infinity)
# ---------------------------------------------------------------------------


def curve_branches(f: BiPoly, depth_k: int) -> List[ConcreteBranch]:
    """All deg(f) Newton-Puiseux roots at infinity, truncated at index depth_k.

    Requires f monic in y (deg_y f = total degree), which guarantees every
    root has the shape sum c_k x^(1-k/m).  Conjugate roots appear as separate
    entries; a repeated root appears once per multiplicity.  Raises
    ExtensionRequired when a characteristic polynomial fails to split over
    Q(i); the unsplit factor rides on the exception.
    """
    if f.is_zero() or f.total_degree < 1:
        raise PreconditionFailed("curve must be nonconstant")
    if f.deg_y != f.total_degree:
        raise PreconditionFailed("curve must be monic in y")
    if depth_k < 0:
        raise PreconditionFailed("depth must be non-negative")
    out: List[ConcreteBranch] = []
    _expand_curve(f, [], None, depth_k, out)
    total = len(out)
    if total != f.total_degree:
        raise EngineError(
            f"branch count {total} does not match degree {f.total_degree}"
        )
    return sorted(out, key=lambda b: b.sort_key())


def _expand_curve(
    f: BiPoly,
    prefix: List[Tuple[Fraction, Scalar]],
    bound: Optional[Fraction],
    depth_k: int,
    out: List[ConcreteBranch],
) -> None:
    expansion = prefix_expansion(f, prefix)
    j0 = min(expansion)
    if j0 > 0:
        exact = branch_from_prefix(prefix, None)
        out.extend([exact] * j0)
    pts = support_points(expansion)
    cur_mult = _prefix_mult(prefix)
    for edge in hull_edges(pts):
        if bound is not None and edge.slope >= bound:
            continue
        e = edge.slope
        m_next = cur_mult * (1 - e).denominator // math.gcd(
            cur_mult, (1 - e).denominator
        )
        k_next = (1 - e) * m_next
        span = edge.j_hi - edge.j_lo
        if k_next > depth_k:
            trunc = branch_from_prefix(prefix, e)
            out.extend([trunc] * span)
            continue
        roots, rest = all_roots(edge.chi)
        if rest.degree >= 1:
            raise ExtensionRequired(rest, "characteristic polynomial of an edge")
        produced = 0
        for c, mult in roots:
            if c.is_zero():
                continue  # the edge polynomial never vanishes at zero
            before = len(out)
            _expand_curve(f, prefix + [(e, c)], e, depth_k, out)
            got = len(out) - before
            if got != mult:
                raise EngineError("edge multiplicity mismatch during expansion")
            produced += mult
        if produced != span:
            raise EngineError("edge span not exhausted by its roots")


def _prefix_mult(prefix: Sequence[Tuple[Fraction, Scalar]]) -> int:
    m = 1
    for e, _ in prefix:
        d = (1 - e).denominator
        m = m * d // math.gcd(m, d)
    return m


# ---------------------------------------------------------------------------
# Expansion tree of a map pair
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Caps:
    """Expansion limits; hitting one is visible in output, never silent."""

    max_mult: int = 12
    max_k: int = 64
    max_depth: int = 32


STATUS_OPEN = "open"
STATUS_DICRITICAL = "dicritical"
STATUS_DEAD = "dead"
STATUS_CAPPED = "depth_capped"
STATUS_EXTENSION = "extension_required"


@dataclass
class ExpansionNode:
    series: ParamSeries
    lead: LeadingData
    chosen_c: Optional[Scalar]
    status: str
    children: List["ExpansionNode"] = field(default_factory=list)
    note: str = ""

    def walk(self) -> Iterable["ExpansionNode"]:
        yield self
        for ch in self.children:
            yield from ch.walk()


def _is_dicritical(lead: LeadingData) -> bool:
    from .classify import classify  # local import: classify is a leaf module

    return classify(lead).dicritical


@dataclass(frozen=True)
class CoordEvents:
    """Per-component polygon data for one direction of refinement."""

    edges: Tuple[Fraction, ...]   # edge slopes strictly below the parent slot
    zero: Optional[Fraction]      # exponent-zero crossing below the slot
    frozen: bool                  # exponent is pinned positive forever
    pts: Tuple[SupportPoint, ...]


def _coord_events(g: BiPoly, prefix, e_cur: Fraction) -> CoordEvents:
    expansion = prefix_expansion(g, prefix)
    pts = tuple(support_points(expansion))
    edges = tuple(ed.slope for ed in hull_edges(pts) if ed.slope < e_cur)
    zero = envelope_zero(pts, e_cur)
    frozen = False
    if pts[0].j == 0:
        r0 = pts[0].top
        # terms added below the slot can cancel the constant part's top
        # monomial only when some z-degree reaches above it at the slot
        if r0 > 0 and all(p.top + p.j * e_cur <= r0 for p in pts if p.j >= 1):
            frozen = True
    return CoordEvents(edges, zero, frozen, pts)


def next_event_exponent(
    f: MapPair, parent: ParamSeries, c: Scalar
) -> Optional[Fraction]:
    """Largest exponent below the parent slot where the leading data of either
    component changes shape (polygon edge) or its exponent crosses zero.

    Directions that can never reach a window with both exponents at most
    zero are cut: a component frozen at a positive exponent blocks every
    descendant, and once both exponents have gone negative nothing can fire
    again (leading exponents only decrease under refinement).
    """
    prefix = parent.fix_param(c)
    e_cur = parent.param_exponent
    ev_p = _coord_events(f.p, prefix, e_cur)
    ev_q = _coord_events(f.q, prefix, e_cur)
    if ev_p.frozen and ev_q.frozen:
        return None
    if ev_p.frozen or ev_q.frozen:
        # only the live component can still produce a horizontal window, and
        # only while its exponent has not gone negative
        live = ev_q if ev_p.frozen else ev_p
        cands = list(live.edges)
        if live.zero is not None:
            cands.append(live.zero)
        cands = [e for e in cands if envelope_value(live.pts, e) >= 0]
        return max(cands) if cands else None
    cands = []
    for ev in (ev_p, ev_q):
        if ev.zero is not None:
            cands.append(ev.zero)
        cands.extend(ev.edges)
    cands = [
        e
        for e in cands
        if max(envelope_value(ev_p.pts, e), envelope_value(ev_q.pts, e)) >= 0
    ]
    if not cands:
        return None
    return max(cands)


def expansion_tree(f: MapPair, caps: Caps = Caps()) -> ExpansionNode:
    """Grow the window tree from the root window s*x.

    Children of a node follow the Q(i)-roots of the product of its two
    leading polynomials (zero always included); each child sits at the next
    event exponent of its direction.  Leaves are dicritical windows, dead
    directions, cap hits, or unsplittable root polynomials.
    """
    root_lead = leading_data(f, ROOT_WINDOW)
    root = ExpansionNode(ROOT_WINDOW, root_lead, None, STATUS_OPEN)
    _expand_node(f, root, caps, depth=0)
    return root


def _expand_node(f: MapPair, node: ExpansionNode, caps: Caps, depth: int) -> None:
    if _is_dicritical(node.lead):
        node.status = STATUS_DICRITICAL
        return
    if depth >= caps.max_depth:
        node.status = STATUS_CAPPED
        node.note = "max_depth"
        return
    product = node.lead.p_lead * node.lead.q_lead
    try:
        roots = roots_in_field(product)
    except ExtensionRequired as exc:
        node.status = STATUS_EXTENSION
        node.note = str(exc.factor)
        return
    cands = [r for r, _ in roots]
    if not any(r.is_zero() for r in cands):
        cands.append(ZERO)
    cands.sort(key=lambda s: s.sort_key())
    children = []
    for c in cands:
        e_next = next_event_exponent(f, node.series, c)
        synthetic = e_next is None
        if synthetic:
            e_next = node.series.param_exponent - 1
        child_series = refine_to_exponent(node.series, c, e_next)
        child_lead = leading_data(f, child_series)
        child = ExpansionNode(child_series, child_lead, c, STATUS_OPEN)
        n_index = child_series.param_index
        if child_series.mult > caps.max_mult or n_index > caps.max_k:
            child.status = STATUS_CAPPED
            child.note = "max_mult" if child_series.mult > caps.max_mult else "max_k"
        elif synthetic:
            child.status = STATUS_DEAD
        else:
            _expand_node(f, child, caps, depth + 1)
            if child.status == STATUS_OPEN and not child.children:
                child.status = STATUS_DEAD
        children.append(child)
    node.children = children
    if not children:
        node.status = STATUS_DEAD


# ---------------------------------------------------------------------------
# Associated sequences and branch index data
# ---------------------------------------------------------------------------


@dataclass
class SequenceLevel:
    series: ParamSeries
    c: Optional[Scalar]  # coefficient toward the next level; None at the top
    n: int
    m: int
    lead: LeadingData
    s2_ok: Optional[bool] = None  # None on the final level
    s3_ok: Optional[bool] = None


@dataclass
class AssociatedSequence:
    levels: List[SequenceLevel]

    @property
    def K(self) -> int:
        return len(self.levels) - 1

    def all_structure_ok(self) -> bool:
        return all(
            (lv.s2_ok is not False) and (lv.s3_ok is not False) for lv in self.levels
        )


def _branch_departure(
    u: ConcreteBranch, phi: ParamSeries
) -> Tuple[Optional[Fraction], bool]:
    """Largest exponent where branch and window disagree, above phi's slot.

    Returns (exponent, known).  exponent None with known=True means the
    branch agrees with the window everywhere above the parameter slot; known
    False means the branch was truncated before the comparison finished.
    """
    exps = set(e for e, _ in u.exponents())
    exps.update(e for e, _ in phi.step_exponents())
    floor = phi.param_exponent
    for e in sorted((e for e in exps if e > floor), reverse=True):
        cu = u.coeff_at(e)
        if cu is None:
            return None, False
        if cu != phi.coeff_at(e):
            return e, True
    if u.truncation_k is not None:
        known_floor = 1 - Fraction(u.truncation_k, u.mult)
        if known_floor > floor:
            return None, False
    return None, True


def _branches_for_matching(
    f: MapPair, phi: ParamSeries
) -> Tuple[List[ConcreteBranch], List[ConcreteBranch]]:
    """Roots of both components, deep enough to match against phi's window."""
    dmax = max(f.deg_p, f.deg_q)
    depth = math.ceil((1 - phi.param_exponent) * dmax) + dmax + 4
    return (
        curve_branches(f.p, depth),
        curve_branches(f.q, depth),
    )


def associated_sequence(
    psi: ParamSeries, phi: ParamSeries, f: MapPair
) -> AssociatedSequence:
    """The maximal admissible chain of windows from psi down to phi.

    An interior exponent becomes a level when a root of either component
    tracks the window that far: exponents carrying a nonzero coefficient of
    phi require a root matching the window above them, and zero-coefficient
    exponents require a root departing exactly there (so padding levels
    cannot be inserted for free).  Structural conditions: multiplicity
    bookkeeping is enforced, and the two polynomial shape conditions are
    recorded per level (they are theorems only under the hypotheses of the
    calling context, so violations are flags, not errors).
    """
    ok, c_top, _ = is_refinement(psi, phi)
    if not ok:
        raise NotARefinement("second series does not refine the first")
    if psi == phi:
        lv = _make_level(f, phi, None)
        return AssociatedSequence([lv])

    p_roots, q_roots = _branches_for_matching(f, phi)
    roots = list(p_roots) + list(q_roots)
    departures = []
    for u in roots:
        d, known = _branch_departure(u, phi)
        if not known:
            raise VerificationFailure(
                "branch truncated before the matching window; increase depth"
            )
        departures.append((u, d))

    e_top = psi.param_exponent
    e_bot = phi.param_exponent
    candidate_exps = set()
    for e, coeff in phi.step_exponents():
        if e_bot < e < e_top:
            candidate_exps.add(e)
    for u, d in departures:
        if d is not None and e_bot < d < e_top:
            candidate_exps.add(d)

    kept: List[Fraction] = []
    for e in sorted(candidate_exps, reverse=True):
        c_here = phi.coeff_at(e)
        if c_here.is_zero():
            admissible = any(d == e for _, d in departures)
        else:
            # window match above e: departure strictly above e disqualifies
            admissible = any(d is None or d <= e for _, d in departures)
            if not admissible:
                raise VerificationFailure(
                    "nonzero coefficient level without a tracking root"
                )
        if admissible:
            kept.append(e)

    exps = [e_top] + kept + [e_bot]
    levels: List[SequenceLevel] = []
    for idx, e in enumerate(exps):
        last = idx == len(exps) - 1
        w = phi if last else window_at(phi, e)
        # the coefficient pinned at this level's slot when descending
        c = None if last else phi.coeff_at(e)
        levels.append(_make_level(f, w, c))
    # structural checks: a polynomial has a nonzero root iff it is neither
    # constant nor a monomial
    for idx, lv in enumerate(levels[:-1]):
        lv.s2_ok = _has_nonzero_root(lv.lead.p_lead) or _has_nonzero_root(
            lv.lead.q_lead
        )
        lv.s3_ok = _segment_is_quiet(
            f, levels[idx].series, levels[idx].c, exps[idx + 1]
        )
    return AssociatedSequence(levels)


def _has_nonzero_root(p: UniPoly) -> bool:
    return not p.is_constant() and not p.is_monomial()


def _segment_is_quiet(
    f: MapPair, upper: ParamSeries, c: Optional[Scalar], e_next: Fraction
) -> bool:
    """No polygon edge of either component strictly between two chain levels."""
    if c is None:
        return True
    prefix = upper.fix_param(c)
    for g in (f.p, f.q):
        expansion = prefix_expansion(g, prefix)
        if not expansion:
            continue
        for edge in hull_edges(support_points(expansion)):
            if e_next < edge.slope < upper.param_exponent:
                return False
    return True


def _make_level(f: MapPair, w: ParamSeries, c: Optional[Scalar]) -> SequenceLevel:
    lead = leading_data(f, w)
    n = w.param_index
    m = w.mult
    frac = 1 - w.param_exponent
    if frac * m != n:
        raise VerificationFailure("level exponent inconsistent with multiplicity")
    return SequenceLevel(w, c, n, m, lead)


@dataclass
class LevelIndexData:
    s_members: List[Scalar]  # coefficients a_ik of matching first-component roots
    t_members: List[Scalar]
    s0_count: int
    t0_count: int
    a_lead: Scalar
    b_lead: Scalar
    pbar: UniPoly
    qbar: UniPoly
    factor_ok: bool


@dataclass
class RootIndexData:
    levels: List[LevelIndexData]
    inferred: bool = False  # True when branch lists were unavailable


def root_index_data(seq: AssociatedSequence, f: MapPair) -> RootIndexData:
    """Branch membership per chain level plus the exact factorization check.

    For each level the matching roots of each component are collected with
    their coefficient at the level slot; the leading polynomial must equal
    lead_coeff * (s - c_i)^(count at c_i) * prod (s - other coefficients),
    which is asserted exactly.  When branch enumeration needs a field
    extension the data degrades to cardinalities inferred from degrees.
    """
    phi = seq.levels[-1].series
    try:
        p_roots, q_roots = _branches_for_matching(f, phi)
    except ExtensionRequired:
        levels = []
        for lv in seq.levels:
            levels.append(
                LevelIndexData(
                    [], [], 0, 0,
                    lv.lead.p_lead.lcoeff(), lv.lead.q_lead.lcoeff(),
                    UniPoly.const(ONE), UniPoly.const(ONE), True,
                )
            )
        return RootIndexData(levels, inferred=True)

    out = []
    for lv in seq.levels:
        e = lv.series.param_exponent
        s_members = _matching_coeffs(p_roots, lv.series)
        t_members = _matching_coeffs(q_roots, lv.series)
        c = lv.c
        s0 = sum(1 for a in s_members if c is not None and a == c)
        t0 = sum(1 for b in t_members if c is not None and b == c)
        a_lead = lv.lead.p_lead.lcoeff()
        b_lead = lv.lead.q_lead.lcoeff()
        pbar = UniPoly.const(ONE)
        for a in s_members:
            if c is None or a != c:
                pbar = pbar * UniPoly.make([-a, ONE])
        qbar = UniPoly.const(ONE)
        for b in t_members:
            if c is None or b != c:
                qbar = qbar * UniPoly.make([-b, ONE])
        ok = True
        rebuilt_p = pbar.scale(a_lead)
        rebuilt_q = qbar.scale(b_lead)
        if c is not None:
            fac = UniPoly.make([-c, ONE])
            rebuilt_p = rebuilt_p * fac ** s0
            rebuilt_q = rebuilt_q * fac ** t0
        ok = rebuilt_p == lv.lead.p_lead and rebuilt_q == lv.lead.q_lead
        out.append(
            LevelIndexData(s_members, t_members, s0, t0, a_lead, b_lead, pbar, qbar, ok)
        )
    return RootIndexData(out)


def _matching_coeffs(
    roots: Sequence[ConcreteBranch], w: ParamSeries
) -> List[Scalar]:
    """Slot coefficients of the roots that track the window w."""
    out = []
    for u in roots:
        d, known = _branch_departure(u, w)
        if not known:
            raise VerificationFailure("branch truncated inside the window")
        if d is None:
            cu = u.coeff_at(w.param_exponent)
            if cu is None:
                raise VerificationFailure("branch truncated at the window slot")
            out.append(cu)
        elif d == w.param_exponent:
            out.append(u.coeff_at(d))
    return sorted(out, key=lambda s: s.sort_key())
