"""Temperley-Lieb categories with coloured regions, in exact arithmetic."""
from __future__ import annotations

from .analysis import (
    GramReport,
    SemisimpleReport,
    TensorDecomposition,
    VerificationError,
    adapted_basis_gram,
    endomorphism_basis,
    gram,
    meander_eval,
    meander_halves,
    nilpotent_witness,
    overlap_r,
    quantum_dimension,
    semisimple_check,
    tensor_decompose,
    tensor_end_dimension,
    tensor_idempotents,
)
from .diagram import (
    ColouredDiagram,
    Matching,
    WrappingMatrix,
    colouring_consistent,
    compose_diagrams,
    enumerate_coloured_diagrams,
    enumerate_matchings,
    generator_h,
    regions,
    tensor_diagrams,
    transpose_diagram,
)
from .exact import (
    BivarPoly,
    Rational,
    check_expanded_formula,
    check_swap_identity,
    chebychev2,
    chebychev2_eval,
    poly_divides,
    poly_swap,
)
from .jw import (
    AlternatingBlock,
    ChebyshevZero,
    JWProjector,
    alternating_blocks,
    check_annihilation,
    check_uniqueness,
    jw,
    jw_alternating,
)
from .morphism import Morphism, add, compose, pairing, scale, tensor, trace, transpose

__version__ = "0.1.0"

__all__ = [
    "AlternatingBlock",
    "BivarPoly",
    "ChebyshevZero",
    "ColouredDiagram",
    "GramReport",
    "JWProjector",
    "Matching",
    "Morphism",
    "Rational",
    "SemisimpleReport",
    "TensorDecomposition",
    "VerificationError",
    "WrappingMatrix",
    "adapted_basis_gram",
    "add",
    "alternating_blocks",
    "chebychev2",
    "chebychev2_eval",
    "check_annihilation",
    "check_expanded_formula",
    "check_swap_identity",
    "check_uniqueness",
    "colouring_consistent",
    "compose",
    "compose_diagrams",
    "endomorphism_basis",
    "enumerate_coloured_diagrams",
    "enumerate_matchings",
    "generator_h",
    "gram",
    "jw",
    "jw_alternating",
    "meander_eval",
    "meander_halves",
    "nilpotent_witness",
    "overlap_r",
    "pairing",
    "poly_divides",
    "poly_swap",
    "quantum_dimension",
    "regions",
    "scale",
    "semisimple_check",
    "tensor",
    "tensor_decompose",
    "tensor_diagrams",
    "tensor_end_dimension",
    "tensor_idempotents",
    "trace",
    "transpose",
    "transpose_diagram",
]
