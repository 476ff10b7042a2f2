"""Exact arithmetic for surfaces built by blow-ups and class T contractions."""

__version__ = "0.1.0"

from .config import (
    AmbientInvariants,
    Configuration,
    ConstructionScript,
    Curve,
    K3,
    intersection_matrix,
    parse_script,
    validate,
)
from .blowup import blow_up, run_script
from .tsing import (
    TType,
    discrepancies,
    generate_T,
    hj_expand,
    hj_value,
    k2_correction_via_discrepancies,
    recognize_T,
)
from .surgery import check_disjoint, extract_chain, smooth, verify_fixture
from .lattice import (
    AbelianGroupShape,
    GramLattice,
    discriminant_group,
    quotient_torsion,
    rank_lower_bound,
    smith_normal_form,
)
from .chase import parse_system, solve

__all__ = [
    "AmbientInvariants",
    "Configuration",
    "ConstructionScript",
    "Curve",
    "K3",
    "intersection_matrix",
    "parse_script",
    "validate",
    "TType",
    "discrepancies",
    "generate_T",
    "hj_expand",
    "hj_value",
    "k2_correction_via_discrepancies",
    "recognize_T",
    "AbelianGroupShape",
    "GramLattice",
    "discriminant_group",
    "quotient_torsion",
    "rank_lower_bound",
    "smith_normal_form",
    "blow_up",
    "run_script",
    "check_disjoint",
    "extract_chain",
    "smooth",
    "verify_fixture",
    "parse_system",
    "solve",
]
