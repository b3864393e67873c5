"""Scalar products, norms and sign alignment.

For multivariate data the (weighted) scalar product is
    <<f, g>>_w = sum_j w_j <f^(j), g^(j)>
with unit weights by default. Element contributions are accumulated in
element order so the result does not depend on how the call is arranged.
"""

from __future__ import annotations

import logging
from typing import Any

import numpy as np

from fda_engine.config import get_default
from fda_engine.core.models import FunData, MultiFunData
from fda_engine.errors import NumericError, ValidationError
from fda_engine.ops.arith import arith, scale_obs
from fda_engine.ops.quadrature import IrregIntegrationPolicy, QuadRule, integrate

logger = logging.getLogger(__name__)


def as_weights(weights: Any, p: int) -> np.ndarray:
    """Validate a weight vector for a p-element object.

    Returns:
        Read-only float array of length p (all ones when ``weights`` is None).

    Raises:
        ValidationError: Wrong length, non-finite or non-positive entries.
    """
    if weights is None:
        w = np.ones(p)
    else:
        w = np.array(weights, dtype=np.float64).ravel()
    if w.size != p:
        raise ValidationError(f"Need {p} weights, got {w.size}")
    if not np.all(np.isfinite(w)) or np.any(w <= 0):
        raise ValidationError(f"Weights must be positive and finite, got {w.tolist()}")
    w.setflags(write=False)
    return w


def scalar_product(
    f: FunData,
    g: FunData,
    weights: Any = None,
    rule: QuadRule | str | None = None,
    policy: IrregIntegrationPolicy | None = None,
) -> np.ndarray:
    """<f_i, g_i> per observation, or <f_i, g> when one side has a single observation.

    Raises:
        ValidationError: Mismatched kinds / argvals / counts, or weights on
            univariate data.
    """
    product = arith("*", f, g)
    if not isinstance(product, MultiFunData):
        if weights is not None:
            raise ValidationError("Weights apply to multivariate data only")
        return integrate(product, rule, policy)
    w = as_weights(weights, product.n_elements)
    total = w[0] * integrate(product.elements[0], rule)
    for j in range(1, product.n_elements):
        total = total + w[j] * integrate(product.elements[j], rule)
    return total


def norm(
    data: FunData,
    squared: bool = False,
    weights: Any = None,
    rule: QuadRule | str | None = None,
    policy: IrregIntegrationPolicy | None = None,
) -> np.ndarray:
    """L2 norm (or squared norm) of every observation.

    Squared norms slightly below zero from round-off are clamped to 0.

    Raises:
        NumericError: If a squared norm falls below the negative tolerance.
    """
    sq = scalar_product(data, data, weights, rule, policy)
    tol = get_default("quadrature", "negative_norm_tol")
    if np.any(sq < -tol):
        worst = int(np.argmin(sq))
        raise NumericError(
            f"Negative squared norm {sq[worst]:.3g} for observation {data.names[worst]}"
        )
    sq = np.maximum(sq, 0.0)
    return sq if squared else np.sqrt(sq)


def flip_funs(
    reference: FunData,
    data: FunData,
    weights: Any = None,
    rule: QuadRule | str | None = None,
) -> FunData:
    """Flip signs so that every <reference_i, data_i> is non-negative.

    ``reference`` may hold a single function that all observations of
    ``data`` are aligned to.
    """
    sp = scalar_product(reference, data, weights, rule)
    if sp.size != data.n_obs:
        raise ValidationError("Reference has more observations than the data to align")
    signs = np.where(sp < 0, -1.0, 1.0)
    if np.any(signs < 0):
        logger.debug("flip_funs: flipping %d of %d functions", int((signs < 0).sum()), sp.size)
    return scale_obs(data, signs)
