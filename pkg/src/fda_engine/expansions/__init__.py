"""Univariate basis expansions used as the first MFPCA step.

Provides:
- Expansion specs (fpca / dct / given) parsed with pydantic
- Grid FPCA, tensor DCT with thresholding, projection on a given basis
- Orthonormalization and reconstruction of expansion results
"""

from fda_engine.expansions.base import (
    ExpansionResult,
    gram_matrix,
    grid_weights,
    is_orthonormal,
    orthonormalize,
    reconstruct,
)
from fda_engine.expansions.dct import expand_dct
from fda_engine.expansions.dispatch import expand
from fda_engine.expansions.fpca import expand_fpca, fix_signs
from fda_engine.expansions.given import expand_given
from fda_engine.expansions.specs import (
    DctSpec,
    ExpansionSpec,
    FpcaSpec,
    GivenSpec,
    parse_expansion_specs,
)

__all__ = [
    "DctSpec",
    "ExpansionResult",
    "ExpansionSpec",
    "FpcaSpec",
    "GivenSpec",
    "expand",
    "expand_dct",
    "expand_fpca",
    "expand_given",
    "fix_signs",
    "gram_matrix",
    "grid_weights",
    "is_orthonormal",
    "orthonormalize",
    "parse_expansion_specs",
    "reconstruct",
]
