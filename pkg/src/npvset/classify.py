"""Classification of windows from their leading data, and the delta form.

A window is horizontal for a map component when that component tends to a
nonconstant finite limit function of the parameter (exponent zero, leading
polynomial of positive degree); dicritical when horizontal for one component
while neither exponent is positive; singular when the Jacobian's leading
polynomial has positive degree.
"""

from __future__ import annotations

from dataclasses import dataclass

from .algebra import Scalar, UniPoly
from .puiseux import LeadingData


@dataclass(frozen=True)
class SeriesClass:
    horizontal_p: bool
    horizontal_q: bool
    dicritical: bool
    singular: bool


def classify(lead: LeadingData) -> SeriesClass:
    """Flags computed literally from exponents and leading-degree data.

    A constant leading polynomial never qualifies as horizontal: the limit
    must genuinely vary with the parameter.
    """
    hp = lead.p_exp == 0 and lead.p_lead.degree > 0
    hq = lead.q_exp == 0 and lead.q_lead.degree > 0
    dic = (hp or hq) and max(lead.p_exp, lead.q_exp) == 0
    sing = lead.jac_lead.degree > 0
    return SeriesClass(hp, hq, dic, sing)


@dataclass(frozen=True)
class DeltaData:
    """The combination a*p*q' - b*p'*q and its exponent balance.

    ``scaled_jac`` is mult times the Jacobian leading polynomial;
    ``exponent_lhs`` is p_exp + q_exp and ``exponent_rhs`` is
    2*mult - param_index + jac_exp.  When the two sides agree the delta form
    reproduces the scaled Jacobian lead up to one global sign.
    """

    delta: UniPoly
    scaled_jac: UniPoly
    exponent_lhs: int
    exponent_rhs: int


def delta(lead: LeadingData, param_index: int) -> DeltaData:
    """Compute the delta form of a window; judgment is left to the verifiers."""
    d = lead.p_lead.scale(Scalar.of(lead.p_exp)) * lead.q_lead.derivative() - (
        lead.p_lead.derivative() * lead.q_lead.scale(Scalar.of(lead.q_exp))
    )
    mj = lead.jac_lead.scale(Scalar.of(lead.mult))
    lhs = lead.p_exp + lead.q_exp
    rhs = 2 * lead.mult - param_index + lead.jac_exp
    return DeltaData(d, mj, lhs, rhs)
