"""Tensor cosine (DCT-II) expansion of images and 3-D data with thresholding.

Coefficients come from the orthonormal separable DCT-II over the grid axes.
All coefficients of all observations are pooled and the ceil(q_thresh * n)
smallest in magnitude are set to zero (ties broken by position, at least one
kept); only basis indices that stay nonzero for at least one observation
are kept.

Basis functions are the discrete cosine vectors divided by sqrt(prod h_r)
(h_r = grid spacing), scores the coefficients times sqrt(prod h_r), so the
fitted values equal the inverse transform of the thresholded coefficients.
"""

from __future__ import annotations

import logging
import math

import numpy as np
from scipy import fft, sparse

from fda_engine.core.models import DenseFunData
from fda_engine.errors import ValidationError
from fda_engine.expansions.base import ExpansionResult, is_orthonormal
from fda_engine.ops.quadrature import QuadRule

logger = logging.getLogger(__name__)


def _spacing(axis: np.ndarray) -> float:
    if axis.size < 2:
        raise ValidationError("DCT needs at least two points per axis")
    steps = np.diff(axis)
    if not np.allclose(steps, steps[0], rtol=1e-8, atol=0):
        raise ValidationError("DCT needs equispaced axes")
    return float(steps[0])


def pooled_drop_mask(magnitudes: np.ndarray, q_thresh: float) -> np.ndarray:
    """True for the ceil(q_thresh * n) smallest magnitudes, capped at n - 1."""
    flat = magnitudes.ravel()
    drop = np.zeros(flat.size, dtype=bool)
    if q_thresh > 0:
        k = min(math.ceil(q_thresh * flat.size - 1e-9), flat.size - 1)
        drop[np.argsort(flat, kind="stable")[:k]] = True
    return drop.reshape(magnitudes.shape)


def expand_dct(
    data: DenseFunData,
    q_thresh: float = 0.0,
    rule: QuadRule | str | None = None,
) -> ExpansionResult:
    """DCT-II expansion with pooled thresholding.

    Raises:
        ValidationError: d not in {2, 3}, non-equispaced axes, missing values
            or q_thresh outside [0, 1).
    """
    d = data.dim_supp
    if d not in (2, 3):
        raise ValidationError(f"DCT expansion needs d in {{2, 3}}, got d = {d}")
    if data.has_missing:
        raise ValidationError("DCT expansion needs data without missing values")
    if not 0 <= q_thresh < 1:
        raise ValidationError(f"q_thresh must lie in [0, 1), got {q_thresh}")
    cell = math.prod(_spacing(a) for a in data.argvals)

    coef = fft.dctn(data.X, type=2, axes=tuple(range(1, d + 1)), norm="ortho")
    drop = pooled_drop_mask(np.abs(coef), q_thresh)
    coef = np.where(drop, 0.0, coef)
    keep = (coef != 0).any(axis=0)
    if not keep.any():
        raise ValidationError("Thresholding removed every coefficient")

    # rows of each matrix are the discrete cosine vectors of one axis
    cosines = [fft.dct(np.eye(a.size), type=2, norm="ortho", axis=0) for a in data.argvals]
    retained = np.argwhere(keep)
    basis = []
    for index in retained:
        vector = cosines[0][index[0]]
        for r in range(1, d):
            vector = np.multiply.outer(vector, cosines[r][index[r]])
        basis.append(vector)
    functions = DenseFunData(argvals=data.argvals, X=np.stack(basis) / np.sqrt(cell))
    scores = coef.reshape(data.n_obs, -1)[:, np.flatnonzero(keep.ravel())] * np.sqrt(cell)

    orthonormal = is_orthonormal(functions, rule)
    if not orthonormal:
        logger.warning("DCT basis is not orthonormal under the quadrature rule; "
                       "it will be orthonormalized before MFPCA")
    logger.debug("expand_dct: kept %d of %d basis functions (%d coefficients zeroed)",
                 retained.shape[0], keep.size, int(drop.sum()))
    return ExpansionResult(
        scores=sparse.csr_matrix(scores),
        functions=functions,
        orthonormal=orthonormal,
    )
