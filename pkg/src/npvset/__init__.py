"""Exact Newton-Puiseux analysis at infinity for polynomial maps of the plane.

The package computes, over exact Gaussian-rational arithmetic: curve
branches at infinity, the window expansion tree of a map pair, horizontal /
dicritical / singular classification, polynomial parameterizations of the
non-proper value set, and a suite of machine-checked structural identities,
cross-validated by a floating-point sampling oracle.
"""

from .algebra import (
    BiPoly,
    MapPair,
    Scalar,
    UniPoly,
    bipoly,
    jacobian,
    normalize_monic,
)
from .classify import SeriesClass, classify, delta
from .expansion import (
    AssociatedSequence,
    Caps,
    ExpansionNode,
    RootIndexData,
    associated_sequence,
    curve_branches,
    expansion_tree,
    root_index_data,
)
from .puiseux import (
    ConcreteBranch,
    LeadingData,
    ParamSeries,
    is_refinement,
    leading_data,
    refine,
    series,
    substitute,
)
from .valueset import (
    Theorem1Certificate,
    Theorem2Certificate,
    ValueSetComponent,
    check_eq4,
    check_eq9,
    check_lemma2,
    check_lemma3,
    check_lemma4,
    check_newton_factorization,
    check_section5_identity,
    dicritical_series,
    nonproper_value_set,
    run_all_checks,
    verify_theorem1,
    verify_theorem2,
)
from .oracle import SampleReport, branch_limit_sample, properness_probe

__all__ = [name for name in dir() if not name.startswith("_")]
