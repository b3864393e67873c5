"""Operations on functional data.

Provides:
- Pointwise arithmetic and Math-group maps, mean functions, tensor products
- Quadrature weights and integration
- Scalar products, norms and sign alignment
"""

from fda_engine.ops.arith import arith, elementwise_map, mean_function, scale_obs, tensor_product
from fda_engine.ops.products import as_weights, flip_funs, norm, scalar_product
from fda_engine.ops.quadrature import (
    IrregIntegrationPolicy,
    QuadRule,
    as_rule,
    integrate,
    quad_weights,
)

__all__ = [
    "IrregIntegrationPolicy",
    "QuadRule",
    "arith",
    "as_rule",
    "as_weights",
    "elementwise_map",
    "flip_funs",
    "integrate",
    "mean_function",
    "norm",
    "quad_weights",
    "scalar_product",
    "scale_obs",
    "tensor_product",
]
