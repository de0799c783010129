"""Non-proper value set assembly and the machine-checked invariant suite.

A dicritical window sends the map to a finite limit curve: the component
parameterization takes each coordinate's leading polynomial when its
exponent is zero and the constant zero when the exponent is negative.  The
checkers in this module assert, exactly and per instance, the structural
identities the engine relies on: the chain recurrences, the delta-form
identities with their global signs, the exponent/vanishing pattern along
chains, the degree-ratio law, the refinement leading-term law, and the
reconstruction of a curve from its branches.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from .algebra import BiPoly, MapPair, ONE, Scalar, UniPoly, ZERO, poly_gcd
from .classify import classify, delta
from .errors import ExtensionRequired, NotARefinement, PreconditionFailed
from .expansion import (
    AssociatedSequence,
    Caps,
    ExpansionNode,
    RootIndexData,
    STATUS_CAPPED,
    STATUS_DICRITICAL,
    STATUS_EXTENSION,
    all_roots,
    associated_sequence,
    curve_branches,
    envelope_value,
    expansion_tree,
    hull_edges,
    prefix_expansion,
    root_index_data,
    support_points,
)
from .puiseux import (
    ConcreteBranch,
    LeadingData,
    ParamSeries,
    ROOT_WINDOW,
    is_refinement,
    leading_data,
    window_at,
)

SIGMA = 1         # global sign of the delta identity, fixed on the corpus
SIGMA_PRIME = 1   # global sign of the horizontal-exponent identity


@dataclass
class CheckReport:
    """Outcome of one checker: overall status plus per-instance items."""

    name: str
    status: str  # pass | fail | vacuous | skip
    data: dict = field(default_factory=dict)
    items: List[dict] = field(default_factory=list)

    @staticmethod
    def combine(name: str, items: List[dict], data: Optional[dict] = None) -> "CheckReport":
        if not items:
            return CheckReport(name, "vacuous", data or {}, [])
        status = "pass" if all(it.get("ok", False) for it in items) else "fail"
        return CheckReport(name, status, data or {}, items)


# ---------------------------------------------------------------------------
# Dicritical windows and the value set
# ---------------------------------------------------------------------------


@dataclass
class DicriticalScan:
    found: List[Tuple[ParamSeries, LeadingData]]
    unresolved: List[dict]  # capped or unsplittable leaves
    tree: ExpansionNode


def dicritical_series(f: MapPair, caps: Caps = Caps()) -> DicriticalScan:
    """All dicritical leaves of the expansion tree, deduplicated up to the
    conjugacy x^(1/m) -> zeta*x^(1/m); unresolved leaves are reported, not
    silently dropped."""
    tree = expansion_tree(f, caps)
    found: List[Tuple[ParamSeries, LeadingData]] = []
    unresolved: List[dict] = []
    seen: set = set()
    for node in tree.walk():
        if node.status == STATUS_DICRITICAL:
            family = node.series.conjugates()
            key = min(s.sort_key() for s in family)
            if key in seen:
                continue
            seen.add(key)
            found.append((node.series, node.lead))
        elif node.status in (STATUS_CAPPED, STATUS_EXTENSION):
            unresolved.append({"status": node.status, "note": node.note})
    found.sort(key=lambda pair: pair[0].sort_key())
    return DicriticalScan(found, unresolved, tree)


@dataclass
class ValueSetComponent:
    """One polynomially parameterized component of the non-proper value set."""

    u: UniPoly
    v: UniPoly
    source: ParamSeries
    u_is_limit_zero: bool  # first coordinate tends to 0 (negative exponent)
    v_is_limit_zero: bool


def _component_of(series_: ParamSeries, lead: LeadingData) -> ValueSetComponent:
    if lead.p_exp == 0:
        u, uz = lead.p_lead, False
    else:
        u, uz = UniPoly.const(ZERO), True
    if lead.q_exp == 0:
        v, vz = lead.q_lead, False
    else:
        v, vz = UniPoly.const(ZERO), True
    comp = ValueSetComponent(u, v, series_, uz, vz)
    if u.is_constant() and v.is_constant():
        raise PreconditionFailed("dicritical window with constant limit map")
    return comp


@dataclass
class ValueSet:
    components: List[ValueSetComponent]
    unresolved: List[dict]  # nonempty means the list is only a lower bound


def nonproper_value_set(f: MapPair, caps: Caps = Caps()) -> ValueSet:
    """Components of the non-proper value set, merged when images coincide.

    Merging is decided exactly: components whose constant coordinate and
    image line agree are one; otherwise two parameterizations are merged
    only when an affine change of parameter transforms one into the other.
    """
    scan = dicritical_series(f, caps)
    comps = [_component_of(s, lead) for s, lead in scan.found]
    merged: List[ValueSetComponent] = []
    for comp in comps:
        if any(_same_image(comp, kept) for kept in merged):
            continue
        merged.append(comp)
    return ValueSet(merged, scan.unresolved)


def _same_image(c1: ValueSetComponent, c2: ValueSetComponent) -> bool:
    u1c, v1c = c1.u.is_constant(), c1.v.is_constant()
    u2c, v2c = c2.u.is_constant(), c2.v.is_constant()
    if u1c != u2c or v1c != v2c:
        return False
    if u1c and not v1c:
        # vertical line u = const: a nonconstant polynomial covers all of C
        return c1.u.coeff(0) == c2.u.coeff(0)
    if v1c and not u1c:
        return c1.v.coeff(0) == c2.v.coeff(0)
    return _affinely_equal(c1, c2)


def _affinely_equal(c1: ValueSetComponent, c2: ValueSetComponent) -> bool:
    """Is (u1, v1) = (u2, v2) composed with some affine reparameterization?"""
    du, dv = c1.u.degree, c1.v.degree
    if (du, dv) != (c2.u.degree, c2.v.degree):
        return False
    ru = c1.u.lcoeff() / c2.u.lcoeff()
    rv = c1.v.lcoeff() / c2.v.lcoeff()
    g = math.gcd(du, dv)
    # alpha^du = ru and alpha^dv = rv force alpha^g = ru^x rv^y (Bezout)
    x, y = _bezout(du, dv)
    target = (ru ** x) * (rv ** y)
    try:
        alphas, rest = _power_roots(g, target)
    except ZeroDivisionError:
        return False
    for alpha in alphas:
        if alpha ** du != ru or alpha ** dv != rv:
            continue
        # solve for the shift from the next-highest coefficient of the
        # higher-degree coordinate, then verify both identities exactly
        lead_poly_1, lead_poly_2, dd = (
            (c1.u, c2.u, du) if du >= dv else (c1.v, c2.v, dv)
        )
        beta = (
            lead_poly_1.coeff(dd - 1) / (alpha ** (dd - 1)) - lead_poly_2.coeff(dd - 1)
        ) / (lead_poly_2.lcoeff() * Scalar.of(dd))
        sub = UniPoly.make([beta, alpha])
        if c2.u.compose(sub) == c1.u and c2.v.compose(sub) == c1.v:
            return True
    return False


def _bezout(a: int, b: int) -> Tuple[int, int]:
    if b == 0:
        return 1, 0
    x, y = _bezout(b, a % b)
    return y, x - (a // b) * y


def _power_roots(g: int, target: Scalar) -> Tuple[List[Scalar], UniPoly]:
    """Solutions of z^g = target inside Q(i)."""
    coeffs = [-target] + [ZERO] * (g - 1) + [ONE]
    poly = UniPoly.make(coeffs)
    roots, rest = all_roots(poly)
    return [r for r, _ in roots], rest


# ---------------------------------------------------------------------------
# Refinement leading-term law (two-part certificate)
# ---------------------------------------------------------------------------


@dataclass
class Theorem1Certificate:
    psi: Optional[ParamSeries]
    phi: Optional[ParamSeries]
    hypothesis_met: bool
    M: Optional[int] = None
    d: Optional[int] = None
    e: Optional[int] = None
    N: Optional[int] = None
    D: Optional[int] = None
    C: Optional[Scalar] = None
    conclusion_i_ok: Optional[bool] = None
    conclusion_ii_ok: Optional[bool] = None

    def counterexample(self) -> bool:
        return self.hypothesis_met and not (
            self.conclusion_i_ok and self.conclusion_ii_ok
        )


def theorem1_from_leads(
    lead_psi: LeadingData,
    lead_phi: LeadingData,
    psi: Optional[ParamSeries] = None,
    phi: Optional[ParamSeries] = None,
) -> Theorem1Certificate:
    """Arithmetic core of the coarse-to-dicritical leading-term law.

    With both coarse exponents positive, (a, b) = (M*d, M*e) in lowest terms
    (d, e); the law predicts degree pairs proportional to (d, e) at both
    ends and leading coefficients scaled by C^d and C^e for one common C.
    Since gcd(d, e) = 1, a consistent C is unique and solvable by Bezout, so
    existence is checked constructively.
    """
    a, b = lead_psi.p_exp, lead_psi.q_exp
    hyp = a > 0 and b > 0 and lead_psi.jac_lead.degree == 0
    cert = Theorem1Certificate(psi, phi, hyp)
    if a <= 0 or b <= 0:
        return cert
    m_ = math.gcd(a, b)
    d, e = a // m_, b // m_
    cert.M, cert.d, cert.e = m_, d, e
    dp, dq = lead_psi.p_lead.degree, lead_psi.q_lead.degree
    cert.conclusion_i_ok = (
        dp > 0 and dq > 0 and dp % d == 0 and dq % e == 0 and dp // d == dq // e
    )
    if cert.conclusion_i_ok:
        cert.N = dp // d
    exps_zero = lead_phi.p_exp == 0 and lead_phi.q_exp == 0
    dpk, dqk = lead_phi.p_lead.degree, lead_phi.q_lead.degree
    degs_ok = (
        dpk > 0 and dqk > 0 and dpk % d == 0 and dqk % e == 0 and dpk // d == dqk // e
    )
    coeff_ok = False
    if degs_ok:
        cert.D = dpk // d
        ru = lead_phi.p_lead.lcoeff() / lead_psi.p_lead.lcoeff()
        rv = lead_phi.q_lead.lcoeff() / lead_psi.q_lead.lcoeff()
        x, y = _bezout(d, e)
        c_val = (ru ** x) * (rv ** y)
        coeff_ok = (c_val ** d == ru) and (c_val ** e == rv)
        if coeff_ok:
            cert.C = c_val
    cert.conclusion_ii_ok = exps_zero and degs_ok and coeff_ok
    return cert


def verify_theorem1(
    f: MapPair, psi: ParamSeries, phi: ParamSeries
) -> Theorem1Certificate:
    ok, _, _ = is_refinement(psi, phi)
    if not ok:
        raise NotARefinement("coarse window does not contain the fine one")
    lead_phi = leading_data(f, phi)
    if not classify(lead_phi).dicritical:
        raise PreconditionFailed("fine window must be dicritical")
    lead_psi = leading_data(f, psi)
    return theorem1_from_leads(lead_psi, lead_phi, psi, phi)


# ---------------------------------------------------------------------------
# Horizontal-witness law for line-shaped components
# ---------------------------------------------------------------------------


@dataclass
class Theorem2Certificate:
    phi: ParamSeries
    phi_singular: bool
    witness_psi: Optional[ParamSeries]
    witness_singular: bool

    def valid(self) -> bool:
        return self.phi_singular or (
            self.witness_psi is not None and self.witness_singular
        )


def horizontal_q_prefixes(
    f: MapPair, phi: ParamSeries
) -> List[Tuple[ParamSeries, LeadingData]]:
    """Prefix windows of phi along which the second component has exponent
    zero and a nonconstant limit, ordered from coarsest down.

    The prefix fixed above a candidate slot is piecewise constant between
    phi's step exponents, so each segment needs one exact expansion; segment
    endpoints use the strictly-above prefix because the window's parameter
    replaces any step sitting exactly there.
    """
    boundaries = [Fraction(1)]
    for e, _ in sorted(phi.step_exponents(), key=lambda t: t[0], reverse=True):
        if e < 1:
            boundaries.append(e)
    boundaries.append(phi.param_exponent)
    out: List[Tuple[ParamSeries, LeadingData]] = []
    seen: set = set()
    for idx in range(len(boundaries) - 1):
        hi, lo = boundaries[idx], boundaries[idx + 1]
        prefix_end = [(e, c) for e, c in phi.step_exponents() if e > hi]
        if hi in _exponent_zero_candidates(f.q, prefix_end):
            _collect_window(f, phi, hi, out, seen)
        prefix_in = [(e, c) for e, c in phi.step_exponents() if e >= hi]
        for e in _exponent_zero_candidates(f.q, prefix_in):
            if lo < e < hi:
                _collect_window(f, phi, e, out, seen)
    out.sort(key=lambda t: -t[0].param_exponent)
    return out


def _exponent_zero_candidates(
    g: BiPoly, prefix: List[Tuple[Fraction, Scalar]]
) -> set:
    expansion = prefix_expansion(g, prefix)
    pts = support_points(expansion)
    cands = set()
    for p in pts:
        if p.j > 0:
            cands.add(-p.top / Fraction(p.j))
    for edge in hull_edges(pts):
        cands.add(edge.slope)
    return {e for e in cands if envelope_value(pts, e) == 0}


def _collect_window(f, phi, e, out, seen) -> None:
    if e <= phi.param_exponent:
        return
    w = window_at(phi, e)
    if w.sort_key() in seen:
        return
    seen.add(w.sort_key())
    lead = leading_data(f, w)
    if lead.q_exp == 0 and lead.q_lead.degree > 0:
        out.append((w, lead))


def verify_theorem2(f: MapPair, phi: ParamSeries) -> Theorem2Certificate:
    """Certificate that a dicritical window with first exponent zero and
    second negative is singular itself or has a singular horizontal prefix
    for the second component."""
    lead = leading_data(f, phi)
    if not (lead.p_exp == 0 and lead.q_exp < 0 and classify(lead).dicritical):
        raise PreconditionFailed(
            "window must be dicritical with exponents (0, negative)"
        )
    phi_singular = lead.jac_lead.degree > 0
    witness: Optional[ParamSeries] = None
    witness_singular = False
    for w, wlead in horizontal_q_prefixes(f, phi):
        if wlead.jac_lead.degree > 0:
            witness = w
            witness_singular = True
            break
        if witness is None:
            witness = w
    return Theorem2Certificate(phi, phi_singular, witness, witness_singular)


# ---------------------------------------------------------------------------
# Chain recurrences
# ---------------------------------------------------------------------------


def check_lemma2(seq: AssociatedSequence, data: RootIndexData) -> CheckReport:
    """Exact per-level recurrences along a chain.

    For each step: the leading coefficient advances by the off-slot factor
    evaluated at the pinned coefficient; the degree equals the count of
    tracking roots, which equals the previous on-slot count; and the
    exponent drops by the on-slot count times the exponent gap.  All three
    hold for each map component.
    """
    items = []
    for i in range(1, len(seq.levels)):
        prev, cur = seq.levels[i - 1], seq.levels[i]
        dprev, dcur = data.levels[i - 1], data.levels[i]
        c_prev = prev.c if prev.c is not None else ZERO
        gap = Fraction(prev.n, prev.m) - Fraction(cur.n, cur.m)
        if data.inferred:
            s_count = cur.lead.p_lead.degree
            t_count = cur.lead.q_lead.degree
            s0_prev = _root_multiplicity(prev.lead.p_lead, c_prev)
            t0_prev = _root_multiplicity(prev.lead.q_lead, c_prev)
            pbar_prev = _off_slot_factor(prev.lead.p_lead, c_prev, s0_prev)
            qbar_prev = _off_slot_factor(prev.lead.q_lead, c_prev, t0_prev)
        else:
            s_count = len(dcur.s_members)
            t_count = len(dcur.t_members)
            s0_prev = dprev.s0_count
            t0_prev = dprev.t0_count
            pbar_prev = dprev.pbar
            qbar_prev = dprev.qbar
        ok_a_lead = cur.lead.p_lead.lcoeff() == dprev.a_lead * pbar_prev.evaluate(
            c_prev
        )
        ok_b_lead = cur.lead.q_lead.lcoeff() == dprev.b_lead * qbar_prev.evaluate(
            c_prev
        )
        ok_p_deg = cur.lead.p_lead.degree == s_count == s0_prev
        ok_q_deg = cur.lead.q_lead.degree == t_count == t0_prev
        ok_a_exp = Fraction(cur.lead.p_exp, cur.m) == Fraction(
            prev.lead.p_exp, prev.m
        ) + s0_prev * gap
        ok_b_exp = Fraction(cur.lead.q_exp, cur.m) == Fraction(
            prev.lead.q_exp, prev.m
        ) + t0_prev * gap
        items.append(
            {
                "level": i,
                "ok": ok_a_lead and ok_b_lead and ok_p_deg and ok_q_deg
                and ok_a_exp and ok_b_exp,
                "lead_coeff_p": ok_a_lead,
                "lead_coeff_q": ok_b_lead,
                "degree_p": ok_p_deg,
                "degree_q": ok_q_deg,
                "exponent_p": ok_a_exp,
                "exponent_q": ok_b_exp,
            }
        )
    data_out = {"K": seq.K, "inferred_counts": data.inferred}
    return CheckReport.combine("lemma2", items, data_out)


def _root_multiplicity(p: UniPoly, c: Scalar) -> int:
    mult = 0
    factor = UniPoly.make([-c, ONE])
    while not p.is_zero():
        quo, rem = p.divmod(factor)
        if not rem.is_zero():
            break
        p = quo
        mult += 1
    return mult


def _off_slot_factor(p: UniPoly, c: Scalar, mult: int) -> UniPoly:
    factor = UniPoly.make([-c, ONE])
    for _ in range(mult):
        p = p.divmod(factor)[0]
    return p.scale(p.lcoeff().inverse()) if not p.is_zero() else p


# ---------------------------------------------------------------------------
# Delta identity and horizontal identity
# ---------------------------------------------------------------------------


def check_lemma3(lead: LeadingData, param_index: int, sign: int = SIGMA) -> CheckReport:
    """Delta identity at a window with both exponents positive and constant
    Jacobian lead: on exponent balance the delta form equals sign * mult *
    jac lead; above balance it vanishes; it vanishes precisely when the two
    leading polynomials share a root, and then their reduced powers are
    proportional."""
    if not (lead.p_exp > 0 and lead.q_exp > 0 and lead.jac_lead.degree == 0):
        raise PreconditionFailed("requires positive exponents and constant jac lead")
    dd = delta(lead, param_index)
    items = []
    if dd.exponent_lhs == dd.exponent_rhs:
        ok = dd.delta == dd.scaled_jac.scale(Scalar.of(sign))
        items.append({"case": "balanced", "ok": ok})
    elif dd.exponent_lhs > dd.exponent_rhs:
        items.append({"case": "above_balance", "ok": dd.delta.is_zero()})
    else:
        items.append({"case": "below_balance", "ok": True, "note": "no assertion"})
    p, q = lead.p_lead, lead.q_lead
    if p.is_constant() and q.is_constant():
        items.append({"case": "vanishing_iff", "ok": True, "note": "both constant"})
    else:
        common = poly_gcd(p, q).degree > 0
        items.append({"case": "vanishing_iff", "ok": dd.delta.is_zero() == common})
    if dd.delta.is_zero() and not (p.is_constant() and q.is_constant()):
        g = math.gcd(lead.p_exp, lead.q_exp)
        bp, aq = lead.q_exp // g, lead.p_exp // g
        lhs = p ** bp
        rhs = q ** aq
        cc = lhs.lcoeff() / rhs.lcoeff()
        items.append({"case": "proportionality", "ok": lhs == rhs.scale(cc)})
    return CheckReport.combine("lemma3", items, {"sign": sign})


def check_section5_identity(
    lead: LeadingData, param_index: int, sign: int = SIGMA_PRIME
) -> CheckReport:
    """Horizontal identity: at a window where one exponent is positive and
    the other is zero with nonconstant limit, mult times the Jacobian lead
    equals sign times (positive exponent) * (that side's lead) * (derivative
    of the horizontal lead).  Orientation is detected; the swapped
    orientation flips the Jacobian's sign."""
    if lead.p_exp > 0 and lead.q_exp == 0 and lead.q_lead.degree > 0:
        a, p, q, j = lead.p_exp, lead.p_lead, lead.q_lead, lead.jac_lead
    elif lead.q_exp > 0 and lead.p_exp == 0 and lead.p_lead.degree > 0:
        a, p, q, j = lead.q_exp, lead.q_lead, lead.p_lead, -lead.jac_lead
    else:
        raise PreconditionFailed("requires exponents (positive, zero) either way")
    lhs = j.scale(Scalar.of(lead.mult))
    rhs = (p * q.derivative()).scale(Scalar.of(sign * a))
    items = [{"case": "identity", "ok": lhs == rhs}]
    qual = (j.degree > 0) == ((p * q.derivative()).degree > 0)
    items.append({"case": "degree_correspondence", "ok": qual})
    return CheckReport.combine("section5", items, {"sign": sign})


# ---------------------------------------------------------------------------
# Ratio law, exponent pattern, degree law, reconstruction
# ---------------------------------------------------------------------------


def check_lemma4(seq: AssociatedSequence, data: RootIndexData) -> CheckReport:
    """Ratio law along a hypothesis-satisfying chain: below the final level
    both exponents stay positive, exponent and root-count ratios equal d/e,
    on-slot count ratios equal d/e, and the off-slot factors satisfy
    pbar^e = qbar^d."""
    top = seq.levels[0].lead
    if not (top.p_exp > 0 and top.q_exp > 0):
        raise PreconditionFailed("chain must start with positive exponents")
    g = math.gcd(top.p_exp, top.q_exp)
    d, e = top.p_exp // g, top.q_exp // g
    items = []
    for i, lv in enumerate(seq.levels[:-1]):
        a_i, b_i = lv.lead.p_exp, lv.lead.q_exp
        ok_pos = a_i > 0 and b_i > 0
        if data.inferred:
            s_i = lv.lead.p_lead.degree
            t_i = lv.lead.q_lead.degree
            c_i = lv.c if lv.c is not None else ZERO
            s0_i = _root_multiplicity(lv.lead.p_lead, c_i)
            t0_i = _root_multiplicity(lv.lead.q_lead, c_i)
            pbar = _off_slot_factor(lv.lead.p_lead, c_i, s0_i)
            qbar = _off_slot_factor(lv.lead.q_lead, c_i, t0_i)
        else:
            dl = data.levels[i]
            s_i, t_i = len(dl.s_members), len(dl.t_members)
            s0_i, t0_i = dl.s0_count, dl.t0_count
            pbar, qbar = dl.pbar, dl.qbar
        ok_ratio = a_i * e == b_i * d and s_i * e == t_i * d
        ok_slot_ratio = s0_i * e == t0_i * d
        ok_prop = pbar ** e == qbar ** d
        items.append(
            {
                "level": i,
                "ok": ok_pos and ok_ratio and ok_slot_ratio and ok_prop,
                "positive": ok_pos,
                "ratios": ok_ratio,
                "slot_ratio": ok_slot_ratio,
                "proportional": ok_prop,
            }
        )
    return CheckReport.combine("lemma4", items, {"d": d, "e": e})


def check_eq9(seq: AssociatedSequence) -> CheckReport:
    """Vanishing/positivity pattern along a chain into a dicritical window:
    at every level below the last, the vanishing coordinate's lead kills the
    pinned coefficient while its exponent is still positive, and the other
    coordinate's lead kills it whenever that exponent is positive."""
    last = seq.levels[-1].lead
    if last.p_exp == 0 and last.p_lead.degree > 0:
        direct = True
    elif last.q_exp == 0 and last.q_lead.degree > 0:
        direct = False
    else:
        raise PreconditionFailed("chain must end at a dicritical window")
    items = []
    for i, lv in enumerate(seq.levels[:-1]):
        c = lv.c if lv.c is not None else ZERO
        p, a = lv.lead.p_lead, lv.lead.p_exp
        q, b = lv.lead.q_lead, lv.lead.q_exp
        if not direct:
            p, a, q, b = q, b, p, a
        ok_main = p.evaluate(c).is_zero() and a > 0
        ok_other = q.evaluate(c).is_zero() if b > 0 else True
        items.append(
            {"level": i, "ok": ok_main and ok_other, "main": ok_main, "other": ok_other}
        )
    return CheckReport.combine("eq9", items, {"orientation": "pq" if direct else "qp"})


def check_eq4(components: Sequence[ValueSetComponent], f: MapPair) -> CheckReport:
    """Degree-ratio law for constant-Jacobian maps: each component satisfies
    deg u / deg v = deg P / deg Q."""
    if not (f.jac.is_constant() and not f.jac.is_zero()):
        raise PreconditionFailed("requires a nonzero constant Jacobian")
    items = []
    for comp in components:
        du, dv = comp.u.degree, comp.v.degree
        ok = du > 0 and dv > 0 and du * f.deg_q == dv * f.deg_p
        items.append({"ok": ok, "deg_u": du, "deg_v": dv})
    return CheckReport.combine("eq4", items, {"deg_p": f.deg_p, "deg_q": f.deg_q})


def check_newton_factorization(
    curve: BiPoly, branches: Sequence[ConcreteBranch], depth_k: int
) -> CheckReport:
    """Reconstruct the curve as lead * product of (y - branch) and compare.

    With exact branches the product equals the curve everywhere.  With
    truncated branches the comparison is restricted to monomials whose
    x-exponent exceeds the truncation bound for their y-degree: one factor
    contributes the unknown tail, each remaining factor at most x^1.
    """
    d = curve.total_degree
    lead = curve.coeff(0, d)
    prod: Dict[Tuple[Fraction, int], Scalar] = {(Fraction(0), 0): lead}
    tau: Optional[Fraction] = None
    for br in branches:
        factor: Dict[Tuple[Fraction, int], Scalar] = {(Fraction(0), 1): ONE}
        for e, c in br.exponents():
            factor[(e, 0)] = factor.get((e, 0), ZERO) - c
        if br.truncation_k is not None:
            t = 1 - Fraction(br.truncation_k, br.mult)
            tau = t if tau is None else max(tau, t)
        prod = _poly_mul_frac(prod, factor)
    items = []
    for (e, s), coeff in sorted(prod.items()):
        bound = None if tau is None else tau + (d - 1 - s)
        if bound is not None and e <= bound:
            continue
        want = _curve_coeff(curve, e, s)
        items.append({"monomial": f"x^{e}*y^{s}", "ok": coeff == want})
    for (i, j), coeff in sorted(curve.terms.items()):
        e = Fraction(i)
        bound = None if tau is None else tau + (d - 1 - j)
        if bound is not None and e <= bound:
            continue
        got = prod.get((e, j), ZERO)
        items.append({"monomial": f"x^{i}*y^{j}", "ok": got == coeff})
    data = {"exact": tau is None, "truncation_exponent": str(tau) if tau else None}
    report = CheckReport.combine("factorization", items, data)
    if not items:
        report.status = "pass" if tau is None else "vacuous"
    return report


def _poly_mul_frac(a: dict, b: dict) -> dict:
    out: dict = {}
    for (ea, sa), ca in a.items():
        for (eb, sb), cb in b.items():
            k = (ea + eb, sa + sb)
            acc = out.get(k, ZERO) + ca * cb
            if acc.is_zero():
                out.pop(k, None)
            else:
                out[k] = acc
    return out


def _curve_coeff(curve: BiPoly, e: Fraction, s: int) -> Scalar:
    if e.denominator != 1 or e < 0:
        return ZERO
    return curve.coeff(int(e), s)


# ---------------------------------------------------------------------------
# Whole-map verification run
# ---------------------------------------------------------------------------


@dataclass
class VerificationRun:
    checks: List[CheckReport]
    signs: Dict[str, int]
    unresolved: List[dict]

    def counterexample(self) -> bool:
        return any(c.status == "fail" for c in self.checks)


def run_all_checks(
    f: MapPair, caps: Caps = Caps(), what: str = "all", branch_depth: int = 8
) -> VerificationRun:
    """Run the requested checkers over a map's expansion tree and chains.

    ``what`` is one of theorem1, theorem2, lemma2, lemma3, lemma4, eq4, eq9,
    section5, factorization, or all.  Instance counts make vacuity visible:
    a check that never fired reports status vacuous, never silent success.
    """
    wanted = (
        ["theorem1", "theorem2", "lemma2", "lemma3", "lemma4", "eq4", "eq9",
         "section5", "factorization"]
        if what == "all"
        else [what]
    )
    scan = dicritical_series(f, caps)
    nodes = list(scan.tree.walk())
    chains: List[Tuple[ParamSeries, AssociatedSequence, Optional[RootIndexData]]] = []
    chain_skips: List[dict] = []
    for s, _lead in scan.found:
        try:
            seq = associated_sequence(ROOT_WINDOW, s, f)
        except ExtensionRequired as exc:
            chain_skips.append({"series": repr(s), "reason": str(exc)})
            continue
        try:
            rid = root_index_data(seq, f)
        except ExtensionRequired:
            rid = None
        chains.append((s, seq, rid))

    checks: List[CheckReport] = []
    for name in wanted:
        if name == "theorem1":
            items = []
            met = 0
            for s, seq, _rid in chains:
                for lv in seq.levels[:-1]:
                    if lv.lead.p_exp > 0 and lv.lead.q_exp > 0:
                        cert = theorem1_from_leads(lv.lead, seq.levels[-1].lead,
                                                   lv.series, s)
                        met += cert.hypothesis_met
                        items.append(
                            {
                                "ok": not cert.counterexample(),
                                "hypothesis_met": cert.hypothesis_met,
                            }
                        )
            rep = CheckReport.combine("theorem1", items, {"non_vacuous": met})
            checks.append(rep)
        elif name == "theorem2":
            items = []
            for s, lead in scan.found:
                if lead.p_exp == 0 and lead.q_exp < 0:
                    cert = verify_theorem2(f, s)
                    items.append(
                        {
                            "ok": cert.valid(),
                            "phi_singular": cert.phi_singular,
                            "witness_found": cert.witness_psi is not None
                            and cert.witness_singular,
                        }
                    )
            checks.append(CheckReport.combine("theorem2", items))
        elif name == "lemma2":
            reports = [check_lemma2(seq, rid) for _s, seq, rid in chains
                       if rid is not None]
            checks.append(_merge_reports("lemma2", reports, chain_skips))
        elif name == "lemma3":
            items = []
            for node in nodes:
                lead = node.lead
                if lead.p_exp > 0 and lead.q_exp > 0 and lead.jac_lead.degree == 0:
                    rep = check_lemma3(lead, node.series.param_index, SIGMA)
                    items.append({"ok": rep.status == "pass"})
            checks.append(
                CheckReport.combine("lemma3", items, {"sign": SIGMA,
                                                      "non_vacuous": len(items)})
            )
        elif name == "lemma4":
            reports = []
            vacuous = 0
            for _s, seq, rid in chains:
                top = seq.levels[0].lead
                if (
                    rid is not None
                    and top.p_exp > 0
                    and top.q_exp > 0
                    and top.jac_lead.degree == 0
                ):
                    reports.append(check_lemma4(seq, rid))
                else:
                    vacuous += 1
            merged = _merge_reports("lemma4", reports, [])
            merged.data["hypothesis_vacuous_chains"] = vacuous
            checks.append(merged)
        elif name == "eq4":
            if f.jac.is_constant() and not f.jac.is_zero():
                comps = nonproper_value_set(f, caps).components
                checks.append(check_eq4(comps, f))
            else:
                checks.append(
                    CheckReport("eq4", "skip", {"reason": "jacobian not constant"})
                )
        elif name == "eq9":
            reports = [check_eq9(seq) for _s, seq, _rid in chains]
            checks.append(_merge_reports("eq9", reports, chain_skips))
        elif name == "section5":
            items = []
            for node in nodes:
                lead = node.lead
                direct = (
                    lead.p_exp > 0 and lead.q_exp == 0 and lead.q_lead.degree > 0
                )
                swapped = (
                    lead.q_exp > 0 and lead.p_exp == 0 and lead.p_lead.degree > 0
                )
                if direct or swapped:
                    rep = check_section5_identity(
                        lead, node.series.param_index, SIGMA_PRIME
                    )
                    items.append({"ok": rep.status == "pass"})
            checks.append(
                CheckReport.combine(
                    "section5", items,
                    {"sign": SIGMA_PRIME, "non_vacuous": len(items)},
                )
            )
        elif name == "factorization":
            items = []
            for label, g in (("first", f.p), ("second", f.q)):
                try:
                    brs = curve_branches(g, branch_depth)
                except ExtensionRequired as exc:
                    items.append({"component": label, "ok": True,
                                  "skipped": str(exc)})
                    continue
                rep = check_newton_factorization(g, brs, branch_depth)
                items.append({"component": label, "ok": rep.status != "fail"})
            checks.append(CheckReport.combine("factorization", items))
    return VerificationRun(
        checks,
        {"sigma": SIGMA, "sigma_prime": SIGMA_PRIME},
        scan.unresolved + chain_skips,
    )


def _merge_reports(
    name: str, reports: List[CheckReport], skips: List[dict]
) -> CheckReport:
    items = []
    for idx, rep in enumerate(reports):
        for it in rep.items:
            entry = dict(it)
            entry["chain"] = idx
            items.append(entry)
    merged = CheckReport.combine(name, items, {"chains": len(reports)})
    if skips:
        merged.data["skipped_chains"] = len(skips)
    return merged
