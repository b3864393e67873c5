"""Expansion in a user-supplied basis."""

from __future__ import annotations

import logging
from typing import Any

import numpy as np
from scipy import linalg

from fda_engine.config import get_default
from fda_engine.core.models import DenseFunData
from fda_engine.errors import NumericError, ValidationError
from fda_engine.expansions.base import ExpansionResult, gram_matrix, grid_weights
from fda_engine.ops.quadrature import QuadRule

logger = logging.getLogger(__name__)


def expand_given(
    data: DenseFunData,
    functions: DenseFunData,
    scores: Any = None,
    ortho: bool = False,
    rule: QuadRule | str | None = None,
) -> ExpansionResult:
    """Represent ``data`` in the basis ``functions``.

    Without ``scores`` the coefficients are <x_i, B_k> for an orthonormal basis
    (``ortho=True``) and the least-squares projection G^{-1} <x_i, B> otherwise.

    Raises:
        ValidationError: Mismatched grids or score shapes, missing values.
        NumericError: Gram matrix condition number above the configured limit.
    """
    if functions.dim_supp != data.dim_supp or not all(
        np.array_equal(a, b) for a, b in zip(functions.argvals, data.argvals, strict=True)
    ):
        raise ValidationError("Basis functions must share the data's observation points")
    K = functions.n_obs
    if scores is not None:
        scores = np.array(scores, dtype=np.float64)
        if scores.shape != (data.n_obs, K):
            raise ValidationError(f"Scores must have shape ({data.n_obs}, {K}), got {scores.shape}")
        return ExpansionResult(scores=scores, functions=functions, orthonormal=bool(ortho))
    if data.has_missing:
        raise ValidationError("Projection onto a given basis needs data without missing values")

    w = grid_weights(data.argvals, rule)
    B = functions.X.reshape(K, -1)
    inner = (data.X.reshape(data.n_obs, -1) * w) @ B.T
    if ortho:
        return ExpansionResult(scores=inner, functions=functions, orthonormal=True)

    G = gram_matrix(functions, rule)
    cond = np.linalg.cond(G)
    limit = get_default("given", "max_condition")
    if not np.isfinite(cond) or cond > limit:
        raise NumericError(f"Gram matrix of the given basis is singular (condition {cond:.3g})")
    logger.debug("expand_given: K=%d, cond(G)=%.3g", K, cond)
    coef = linalg.solve(G, inner.T, assume_a="pos").T
    return ExpansionResult(scores=coef, functions=functions, orthonormal=False)
