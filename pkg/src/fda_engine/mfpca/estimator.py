"""Multivariate functional PCA from univariate expansions.

Steps:
  1. Demean, scale element j by sqrt(w_j) and expand every element in an
     orthonormal basis (non-orthonormal results are orthonormalized).
  2. Stack the univariate scores into Xi (N x M_+), Z = Xi^T Xi / (N - 1).
  3. Eigen decomposition of Z, eigenvalues descending, each eigenvector's
     largest-magnitude entry positive.
  4. psi_m^(j) = sum_n [c_m]_n^(j) phi_n^(j) / sqrt(w_j),  rho = Xi c.
Eigenfunctions are orthonormal under sum_j w_j <., .>; scores are the
weighted projections of the demeaned data.
"""

from __future__ import annotations

import logging
from collections.abc import Sequence
from dataclasses import replace
from typing import Any

import numpy as np
from scipy import linalg

from fda_engine.core.models import DenseFunData, MultiFunData
from fda_engine.errors import NumericError, ValidationError
from fda_engine.expansions.base import ExpansionResult, orthonormalize
from fda_engine.expansions.dispatch import expand
from fda_engine.expansions.fpca import fix_signs
from fda_engine.expansions.specs import DctSpec, FpcaSpec, GivenSpec
from fda_engine.mfpca.models import MFPCAFit
from fda_engine.ops.arith import arith, mean_function
from fda_engine.ops.products import as_weights
from fda_engine.ops.quadrature import QuadRule, integrate

logger = logging.getLogger(__name__)

Spec = FpcaSpec | DctSpec | GivenSpec


def integrated_variance_weights(
    data: MultiFunData, rule: QuadRule | str | None = None
) -> np.ndarray:
    """w_j = 1 / integral of the pointwise sample variance of element j.

    Raises:
        ValidationError: N < 2 or missing values.
        NumericError: An element with zero integrated variance.
    """
    if data.n_obs < 2:
        raise ValidationError("Variance weights need at least two observations")
    weights = np.empty(data.n_elements)
    for j, element in enumerate(data.elements):
        if element.has_missing:
            raise ValidationError(f"Element {j + 1} contains missing values")
        variance = np.var(element.X, axis=0, ddof=1)
        total = float(integrate(DenseFunData(argvals=element.argvals, X=variance[None]), rule)[0])
        if not total > 0:
            raise NumericError(f"Element {j + 1} has zero integrated variance")
        weights[j] = 1.0 / total
    logger.debug("integrated_variance_weights: %s", weights.tolist())
    return as_weights(weights, data.n_elements)


def _resolve_weights(weights: Any, data: MultiFunData, rule: QuadRule | str | None) -> np.ndarray:
    if isinstance(weights, str):
        if weights != "auto":
            raise ValidationError(f"Unknown weights option: {weights!r}")
        return integrated_variance_weights(data, rule)
    return as_weights(weights, data.n_elements)


def _expand_element(
    spec: Spec, element: DenseFunData, sqrt_w: float, rule: QuadRule | str | None
) -> ExpansionResult:
    result = expand(spec, element, rule)
    if isinstance(spec, GivenSpec) and spec.scores is not None:
        # supplied scores describe the unweighted element
        result = ExpansionResult(
            scores=result.dense_scores() * sqrt_w,
            functions=result.functions,
            orthonormal=result.orthonormal,
        )
    if not result.orthonormal:
        result = orthonormalize(result, rule)
    return result


def mfpca(
    data: MultiFunData,
    M: int,
    uni: Sequence[Spec],
    weights: Any = None,
    fit: bool = False,
    rule: QuadRule | str | None = None,
    bootstrap: int | None = None,
    alpha: float | None = None,
    seed: int | None = None,
    strata: Sequence[Any] | None = None,
) -> MFPCAFit:
    """Estimate M multivariate principal components.

    Args:
        data: Multivariate functional data without missing values.
        M: Number of components, 1 <= M <= M_+ (total univariate components).
        uni: One expansion spec per element.
        weights: Element weights (default ones) or "auto" for inverse
            integrated variance weights.
        fit: Attach reconstructions of the data.
        rule: Quadrature rule.
        bootstrap: Number of bootstrap replicates; attaches bands when set.
        alpha: Bootstrap level.
        seed: Bootstrap seed.
        strata: Optional per-observation labels for stratified resampling.

    Raises:
        ValidationError: N < 2, wrong spec count, M out of range.
        NumericError: Numeric failures in expansions or the eigen step.
    """
    if not isinstance(data, MultiFunData):
        raise ValidationError(f"MFPCA needs multivariate data, got {type(data).__name__}")
    if data.n_obs < 2:
        raise ValidationError("MFPCA needs at least two observations")
    if len(uni) != data.n_elements:
        raise ValidationError(f"Need {data.n_elements} expansion specs, got {len(uni)}")
    w = _resolve_weights(weights, data, rule)
    sqrt_w = np.sqrt(w)

    mean = mean_function(data)
    centered = arith("-", data, mean)
    expansions = tuple(
        _expand_element(spec, arith("*", element, float(s)), float(s), rule)
        for spec, element, s in zip(uni, centered.elements, sqrt_w, strict=True)
    )
    sizes = [r.n_components for r in expansions]
    m_plus = int(sum(sizes))
    if not 1 <= int(M) <= m_plus:
        raise ValidationError(f"M must lie in 1..{m_plus} (total univariate components), got {M}")
    M = int(M)

    xi = np.hstack([r.dense_scores() for r in expansions])
    n = data.n_obs
    z = xi.T @ xi / (n - 1)
    z = (z + z.T) / 2
    values, vectors = linalg.eigh(z)
    values, vectors = values[::-1][:M], vectors[:, ::-1][:, :M]
    if values[-1] < -1e-10 * max(values[0], 1.0):
        logger.warning("Score covariance has a negative eigenvalue %.3g", values[-1])
    values = np.maximum(values, 0.0)
    vectors = fix_signs(vectors)
    if not values[0] > 0:
        raise NumericError("All multivariate eigenvalues are zero")

    offsets = np.concatenate([[0], np.cumsum(sizes)])
    elements = []
    for j, r in enumerate(expansions):
        block = vectors[offsets[j]:offsets[j + 1]]
        phi = r.functions.X.reshape(r.n_components, -1)
        psi = (block.T @ phi) / sqrt_w[j]
        elements.append(DenseFunData(
            argvals=r.functions.argvals,
            X=psi.reshape(M, *r.functions.n_obs_points),
        ))
    functions = MultiFunData(tuple(elements))
    scores = xi @ vectors
    logger.info("mfpca: N=%d, p=%d, M_+=%d, M=%d, nu_1=%.4g", n, data.n_elements, m_plus, M,
                values[0])

    result = MFPCAFit(
        mean_function=mean,
        functions=functions,
        values=values,
        scores=scores,
        vectors=vectors,
        norm_factors=np.ones(M),
        weights=w,
        names=data.names,
        uni_scores=xi,
        score_covariance=z,
        uni_expansions=expansions,
    )
    if fit:
        result = replace(result, fit=predict(result).rename(data.names))
    if bootstrap is not None:
        from fda_engine.mfpca.bootstrap import bootstrap_bands

        bands = bootstrap_bands(
            data, M, uni, weights=w, B=bootstrap, alpha=alpha, seed=seed, rule=rule,
            strata=strata, reference=result,
        )
        result = replace(result, bootstrap=bands)
    return result


def predict(fit: MFPCAFit, scores: Any = None) -> MultiFunData:
    """mu + sum_m scores[:, m] psi_m for every row of ``scores`` (default: the fit's).

    Raises:
        ValidationError: If ``scores`` does not have M columns.
    """
    rho = fit.scores if scores is None else np.asarray(scores, dtype=np.float64)
    if rho.ndim == 1:
        rho = rho[None, :]
    if rho.ndim != 2 or rho.shape[1] != fit.n_components:
        raise ValidationError(
            f"Scores need {fit.n_components} columns, got shape {np.shape(rho)}"
        )
    elements = []
    for mu, psi in zip(fit.mean_function.elements, fit.functions.elements, strict=True):
        X = mu.X + np.tensordot(rho, psi.X, axes=(1, 0))
        elements.append(DenseFunData(argvals=mu.argvals, X=X))
    return MultiFunData(tuple(elements))
