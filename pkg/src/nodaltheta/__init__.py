"""Exact local multiplicity invariants on nodal models and theta divisors.

The library computes, in exact rational arithmetic: orders of vanishing and
leading forms of truncated power series; branch-sum multiplicities of
divisors on standard nodal local rings, cross-checked by a brute-force
Hilbert-Samuel oracle; contact orders of test arcs; and cohomology, theta
multiplicity, and one-parameter family invariants of rank-1 torsion-free
sheaves on integral rational nodal curves, verifying the multiplicity
identity  mult = 2^n * h0  at every theta point.
"""

from .errors import IndeterminateAtTruncation, PreconditionError, VerificationError
from .series import INFINITE, LeadingForm, PowerSeries
from .parsing import parse_series
from .localmodel import (
    BranchOrder,
    LocalModel,
    ModelElement,
    branch_orders,
    branch_project,
    reduce,
)
from .multiplicity import (
    BranchSum,
    HilbertSamuelTable,
    RingSpec,
    check_eqnmat,
    hilbert_samuel,
    model_ringspec,
    mult_divisor_branchsum,
    mult_model,
    ord_at_origin,
)
from .arcs import (
    Arc,
    ArcInsideDivisor,
    ArcSampleReport,
    GeneralArc,
    MinimalArc,
    ZArcNotFound,
    arc_contact,
    general_arc_contact,
    make_arc,
    make_general_arc,
    minimal_arc,
    minimal_arc_through_Z,
    parametrization_from_powers,
    sample_arcs_check,
    sample_parametrized_arcs_check,
)
from .curve import (
    INFINITY,
    Classification,
    FamilyCohomology,
    MovingPoint,
    RationalNodalCurve,
    SheafFamily,
    TFSheaf,
    ThetaReport,
    TheoremAReport,
    classify_theta_point,
    cohomology,
    constant_family,
    family_cohomology,
    general_drop_check,
    h0,
    h1,
    make_minimal_family,
    theta_invariants,
    twist_by_point,
    verify_theorem_A,
)

__version__ = "0.1.0"

__all__ = [
    "Arc",
    "ArcInsideDivisor",
    "ArcSampleReport",
    "BranchOrder",
    "BranchSum",
    "Classification",
    "FamilyCohomology",
    "GeneralArc",
    "HilbertSamuelTable",
    "INFINITE",
    "INFINITY",
    "IndeterminateAtTruncation",
    "LeadingForm",
    "LocalModel",
    "MinimalArc",
    "ModelElement",
    "MovingPoint",
    "PowerSeries",
    "PreconditionError",
    "RationalNodalCurve",
    "RingSpec",
    "SheafFamily",
    "TFSheaf",
    "TheoremAReport",
    "ThetaReport",
    "VerificationError",
    "ZArcNotFound",
    "arc_contact",
    "branch_orders",
    "branch_project",
    "check_eqnmat",
    "classify_theta_point",
    "cohomology",
    "constant_family",
    "family_cohomology",
    "general_arc_contact",
    "general_drop_check",
    "h0",
    "h1",
    "hilbert_samuel",
    "make_arc",
    "make_general_arc",
    "make_minimal_family",
    "minimal_arc",
    "minimal_arc_through_Z",
    "model_ringspec",
    "mult_divisor_branchsum",
    "mult_model",
    "ord_at_origin",
    "parametrization_from_powers",
    "parse_series",
    "reduce",
    "sample_arcs_check",
    "sample_parametrized_arcs_check",
    "theta_invariants",
    "twist_by_point",
    "verify_theorem_A",
]
