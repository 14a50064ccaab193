"""Quantum feedback networks in bordered coefficient-matrix form.

Build star-unitary coefficient matrices from Hudson-Parthasarathy (S, L, H)
triples, compose components by concatenation and series products, eliminate
internal network edges through the feedback fractional transformation, and
verify the structural identities (star-unitarity, the involution identity,
the Siegel factorizations) numerically.
"""

from .belavkin import (
    BelavkinMatrix,
    ItoMatrix,
    SLHDiagnostics,
    SLHTriple,
    StarUnitarityReport,
    ZERO,
    ZERO_PRIME,
    bel_identity,
    bel_swap,
    belavkin_embed,
    belavkin_matrix,
    default_channels,
    from_slh,
    is_star_unitary,
    ito_correspondence_defects,
    ito_matrix,
    ito_projector,
    make_slh,
    polynomial_ito_matrix,
    star,
    to_slh,
    validate_slh,
)
from .dynamics import EvolveResult, Superoperator, evolve, generator_equivalence, lindblad_generator
from .errors import (
    AlgebraicLoop,
    DimensionMismatch,
    InvalidPartition,
    InvalidState,
    MalformedStructure,
    NotHermitian,
    NotStarUnitary,
    NotUnitaryScattering,
    ParseError,
    QfnError,
)
from .network import (
    DomainReport,
    ReducedModel,
    ReductionReport,
    Wiring,
    cascade_via_feedback,
    concatenate,
    domain_check,
    feedback_reduce,
    involution_identity_defect,
    reduced_slh,
    series,
    series_slh,
    siegel_defects,
)
from .opmatrix import (
    BlockMatrix,
    adjoint,
    approx_eq,
    defect_scale,
    embed_scalar,
    inv,
    mul,
    norm_inf,
)

__version__ = "0.1.0"

__all__ = [
    "AlgebraicLoop",
    "BelavkinMatrix",
    "BlockMatrix",
    "DimensionMismatch",
    "DomainReport",
    "EvolveResult",
    "InvalidPartition",
    "InvalidState",
    "ItoMatrix",
    "MalformedStructure",
    "NotHermitian",
    "NotStarUnitary",
    "NotUnitaryScattering",
    "ParseError",
    "QfnError",
    "ReducedModel",
    "ReductionReport",
    "SLHDiagnostics",
    "SLHTriple",
    "StarUnitarityReport",
    "Superoperator",
    "Wiring",
    "ZERO",
    "ZERO_PRIME",
    "adjoint",
    "approx_eq",
    "bel_identity",
    "bel_swap",
    "belavkin_embed",
    "belavkin_matrix",
    "cascade_via_feedback",
    "concatenate",
    "default_channels",
    "defect_scale",
    "domain_check",
    "embed_scalar",
    "evolve",
    "feedback_reduce",
    "from_slh",
    "generator_equivalence",
    "inv",
    "involution_identity_defect",
    "is_star_unitary",
    "ito_correspondence_defects",
    "ito_matrix",
    "ito_projector",
    "lindblad_generator",
    "make_slh",
    "mul",
    "norm_inf",
    "polynomial_ito_matrix",
    "reduced_slh",
    "series",
    "series_slh",
    "siegel_defects",
    "star",
    "to_slh",
    "validate_slh",
]
