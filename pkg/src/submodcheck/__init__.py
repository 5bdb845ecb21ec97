"""Exhaustive submodularity verification for small set functions."""

from .check import (
    CheckMode,
    ViolationCertificate,
    check_monotone,
    check_submodular,
    verify_certificate,
)
from .iou import (
    Case,
    CaseOutsideParams,
    closed_form_r_inside,
    closed_form_r_outside,
    direct_r,
    enumerate_counterexamples,
    refute_property11,
)
from .lovasz import lovasz_evaluate, midpoint_probe, probe_convexity, witness_from_lattice_violation
from .setfn import (
    GroundSet,
    SetFunction,
    SetFunctionError,
    SubsetMask,
    cardinality,
    coverage,
    evaluate,
    graph_cut,
    iou,
    marginal_gain,
    neg_iou,
    negate,
    parse_function,
    table,
    truncation,
)

__version__ = "0.1.0"
