"""Univariate expansion results, Gram matrices and orthonormalization."""

from __future__ import annotations

import logging
from dataclasses import dataclass, replace

import numpy as np
from scipy import linalg, sparse

from fda_engine.config import get_default
from fda_engine.core.models import DenseFunData
from fda_engine.errors import NumericError, ValidationError
from fda_engine.ops.quadrature import QuadRule, as_rule, quad_weights

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class ExpansionResult:
    """Scores and basis functions of one element.

    Attributes:
        scores: N x M_j matrix, dense or scipy sparse (DCT coefficients).
        functions: M_j basis functions on the element's grid.
        values: Eigenvalues (FPCA only).
        orthonormal: Whether the functions are orthonormal under the rule used.
    """

    scores: np.ndarray | sparse.csr_matrix
    functions: DenseFunData
    values: np.ndarray | None = None
    orthonormal: bool = False

    def __post_init__(self) -> None:
        if self.scores.ndim != 2 or self.scores.shape[1] != self.functions.n_obs:
            raise ValidationError(
                f"Scores of shape {self.scores.shape} do not match "
                f"{self.functions.n_obs} basis functions"
            )

    @property
    def n_components(self) -> int:
        return self.functions.n_obs

    def dense_scores(self) -> np.ndarray:
        if sparse.issparse(self.scores):
            return np.asarray(self.scores.toarray())
        return np.asarray(self.scores)


def grid_weights(argvals: tuple[np.ndarray, ...], rule: QuadRule | str | None = None) -> np.ndarray:
    """Tensor-product quadrature weights, flattened in row-major grid order."""
    rule = as_rule(rule)
    w = quad_weights(argvals[0], rule)
    for axis in argvals[1:]:
        w = np.multiply.outer(w, quad_weights(axis, rule))
    return np.asarray(w).reshape(-1)


def gram_matrix(functions: DenseFunData, rule: QuadRule | str | None = None) -> np.ndarray:
    """G_kl = <B_k, B_l> by quadrature."""
    if functions.has_missing:
        raise ValidationError("Basis functions contain missing values")
    B = functions.X.reshape(functions.n_obs, -1)
    w = grid_weights(functions.argvals, rule)
    G = (B * w) @ B.T
    return (G + G.T) / 2


def is_orthonormal(functions: DenseFunData, rule: QuadRule | str | None = None) -> bool:
    tol = get_default("orthonormal_tol")
    G = gram_matrix(functions, rule)
    return bool(np.max(np.abs(G - np.eye(G.shape[0]))) <= tol)


def orthonormalize(result: ExpansionResult, rule: QuadRule | str | None = None) -> ExpansionResult:
    """Turn the basis into an orthonormal one spanning the same space.

    With G = L L^T, the new functions are L^{-1} B and the new scores xi L,
    so the fitted values sum_k xi_k B_k are unchanged.

    Raises:
        NumericError: If the Gram matrix is not positive definite.
    """
    G = gram_matrix(result.functions, rule)
    try:
        L = linalg.cholesky(G, lower=True)
    except linalg.LinAlgError as e:
        raise NumericError("Gram matrix of the basis is not positive definite") from e
    B = result.functions.X.reshape(result.n_components, -1)
    new_B = linalg.solve_triangular(L, B, lower=True)
    functions = DenseFunData(
        argvals=result.functions.argvals,
        X=new_B.reshape(result.functions.X.shape),
    )
    scores = result.scores @ L
    if sparse.issparse(scores):
        scores = sparse.csr_matrix(scores)
    logger.debug("orthonormalize: %d functions, cond(G) = %.3g", G.shape[0], np.linalg.cond(G))
    return replace(result, scores=scores, functions=functions, orthonormal=True)


def reconstruct(result: ExpansionResult) -> np.ndarray:
    """Fitted values sum_k xi_{i,k} B_k as an (N, S_1, ..., S_d) array."""
    B = result.functions.X.reshape(result.n_components, -1)
    fitted = result.scores @ B
    return np.asarray(fitted).reshape(-1, *result.functions.n_obs_points)
