"""Functional PCA on a one-dimensional grid, without smoothing.

With the sample covariance C(t_s, t_u) = sum_i x_i(t_s) x_i(t_u) / (N - 1) and
quadrature weights W = diag(w), the eigenproblem of the integral operator is
solved through the symmetric matrix W^{1/2} C W^{1/2}:

    phi = W^{-1/2} v    (unit L2 norm under the quadrature rule)

Grid points with zero weight (the last point under the midpoint rule) are
filled by the Nystrom extension phi(t) = sum_u C(t, t_u) w_u phi(t_u) / lambda.
"""

from __future__ import annotations

import logging

import numpy as np
from scipy import linalg

from fda_engine.config import get_default
from fda_engine.core.models import DenseFunData
from fda_engine.errors import NumericError, ValidationError
from fda_engine.expansions.base import ExpansionResult
from fda_engine.ops.quadrature import QuadRule, quad_weights

logger = logging.getLogger(__name__)


def _n_components(values: np.ndarray, n_pos: int, pve: float, npc: int | None) -> int:
    if npc is not None:
        if npc > n_pos:
            raise ValidationError(
                f"npc = {npc} exceeds the {n_pos} positive covariance eigenvalues"
            )
        return int(npc)
    explained = np.cumsum(values[:n_pos]) / np.sum(values[:n_pos])
    return min(int(np.searchsorted(explained, pve, side="left")) + 1, n_pos)


def fix_signs(vectors: np.ndarray) -> np.ndarray:
    """Flip columns so that each column's largest-magnitude entry is positive."""
    idx = np.argmax(np.abs(vectors), axis=0)
    signs = np.sign(vectors[idx, np.arange(vectors.shape[1])])
    signs[signs == 0] = 1.0
    return vectors * signs


def expand_fpca(
    data: DenseFunData,
    pve: float | None = None,
    npc: int | None = None,
    rule: QuadRule | str | None = None,
) -> ExpansionResult:
    """Eigen decomposition of the raw grid covariance of demeaned curves.

    Truncates at the smallest number of components explaining ``pve`` of the
    positive eigenvalue mass (at least one), or at exactly ``npc``.

    Raises:
        ValidationError: d != 1, missing values, N < 2 or npc too large.
        NumericError: If the covariance has no positive eigenvalue.
    """
    if data.dim_supp != 1:
        raise ValidationError(f"FPCA needs one-dimensional data, got d = {data.dim_supp}")
    if data.has_missing:
        raise ValidationError("FPCA needs data without missing values")
    if data.n_obs < 2:
        raise ValidationError("FPCA needs at least two observations")
    pve = get_default("fpca", "pve") if pve is None else float(pve)
    if not 0 < pve <= 1:
        raise ValidationError(f"pve must lie in (0, 1], got {pve}")

    X = data.X
    w = quad_weights(data.argvals[0], rule)
    cov = X.T @ X / (data.n_obs - 1)
    sqrt_w = np.sqrt(w)
    values, vectors = linalg.eigh(sqrt_w[:, None] * cov * sqrt_w[None, :])
    values, vectors = values[::-1], vectors[:, ::-1]

    rtol = get_default("fpca", "positive_eigenvalue_rtol")
    top = values[0]
    n_pos = int(np.sum(values > rtol * top)) if top > 0 else 0
    if n_pos == 0:
        raise NumericError("Covariance has no positive eigenvalue (constant data?)")
    values = np.maximum(values, 0.0)
    M = _n_components(values, n_pos, pve, npc)

    v = vectors[:, :M]
    phi = np.zeros_like(v)
    positive = w > 0
    phi[positive] = v[positive] / sqrt_w[positive, None]
    if not positive.all():
        phi[~positive] = cov[~positive] @ (w[:, None] * phi) / values[:M]
    phi = fix_signs(phi)

    scores = X @ (w[:, None] * phi)
    logger.debug("expand_fpca: %d of %d positive eigenvalues kept", M, n_pos)
    return ExpansionResult(
        scores=scores,
        functions=DenseFunData(argvals=data.argvals, X=phi.T),
        values=values[:M].copy(),
        orthonormal=True,
    )
