"""Discrete laboratory for Muckenhoupt weights, maximal operators and
extrapolation with flat weights."""

__version__ = "0.1.0"

from .characteristics import (
    CharacteristicReport,
    a1_characteristic,
    ap_characteristic,
    duality_identity_check,
    is_flat,
)
from .exceptions import (
    CertificateFailure,
    DomainEscape,
    DynamicRangeError,
    EmptyNeighborhood,
    GridMismatch,
    MuckenhouptError,
    NonNegativityViolation,
)
from .extrapolation import (
    ExtrapolationReport,
    FlatFormBound,
    Hypothesis,
    NormProfile,
    PowerBound,
    TableBound,
    certify,
    j_bound,
    neighborhood,
    weak_norm,
)
from .grid import (
    Exponent,
    Grid1D,
    Interval,
    IntervalFamily,
    Sampled,
    Weight,
    conjugate,
    dual_weight,
    interval_average,
    lp_norm,
    make_weight,
)
from .maximal import MaximalOperator, NormEstimate, apply_dual_maximal, apply_maximal, estimate_operator_norm, iterate_maximal
from .operators import TestOperator, make_operator
from .rdf import Majorant, RdFParams, a1_properties, build_dual_majorant, build_majorant
