"""Nonparametric bootstrap bands for MFPCA eigenfunctions and eigenvalues.

Replicate b draws its resample from its own generator, spawned from
SeedSequence(seed), so each replicate depends only on (seed, b). Replicate
components are matched greedily to the reference components (largest
reference eigenvalue first, largest |weighted inner product| wins) and
flipped to a non-negative inner product before the percentile bands are
taken.
"""

from __future__ import annotations

import logging
from collections.abc import Sequence
from typing import Any

import numpy as np

from fda_engine.config import get_default
from fda_engine.core.models import DenseFunData, MultiFunData
from fda_engine.errors import NumericError, ValidationError
from fda_engine.expansions.base import grid_weights
from fda_engine.expansions.specs import GivenSpec
from fda_engine.mfpca.models import BootstrapBands, MFPCAFit
from fda_engine.ops.quadrature import QuadRule

logger = logging.getLogger(__name__)


def _resample(
    rng: np.random.Generator, n: int, groups: list[np.ndarray] | None
) -> np.ndarray:
    if groups is None:
        return rng.integers(0, n, size=n)
    return np.concatenate([g[rng.integers(0, g.size, size=g.size)] for g in groups])


def _resample_specs(uni: Sequence[Any], idx: np.ndarray) -> list[Any]:
    """Given-basis specs with supplied scores follow the resampled observations."""
    return [
        spec.model_copy(update={"scores": spec.scores[idx]})
        if isinstance(spec, GivenSpec) and spec.scores is not None
        else spec
        for spec in uni
    ]


def _strata_groups(strata: Sequence[Any] | None, n: int) -> list[np.ndarray] | None:
    if strata is None:
        return None
    labels = np.asarray(strata)
    if labels.shape != (n,):
        raise ValidationError(f"strata needs {n} labels, got shape {labels.shape}")
    return [np.flatnonzero(labels == value) for value in np.unique(labels)]


def weighted_inner_products(
    a: MultiFunData,
    b: MultiFunData,
    weights: np.ndarray,
    rule: QuadRule | str | None = None,
) -> np.ndarray:
    """Matrix P[m, n] = sum_j w_j <a_m^(j), b_n^(j)>."""
    P = np.zeros((a.n_obs, b.n_obs))
    for w, ea, eb in zip(weights, a.elements, b.elements, strict=True):
        q = grid_weights(ea.argvals, rule)
        A = ea.X.reshape(a.n_obs, -1)
        B = eb.X.reshape(b.n_obs, -1)
        P += w * ((A * q) @ B.T)
    return P


def align_components(
    reference: MFPCAFit, replicate: MFPCAFit, rule: QuadRule | str | None = None
) -> tuple[list[np.ndarray], np.ndarray]:
    """Reorder and sign-flip replicate components to match the reference.

    Returns:
        Per-element arrays of aligned eigenfunctions (M, S...) and the
        matching eigenvalues.
    """
    P = weighted_inner_products(reference.functions, replicate.functions, reference.weights, rule)
    M = reference.n_components
    free = list(range(replicate.n_components))
    order, signs = [], []
    for m in range(M):
        best = max(free, key=lambda n: abs(P[m, n]))
        free.remove(best)
        order.append(best)
        signs.append(-1.0 if P[m, best] < 0 else 1.0)
    sign_arr = np.array(signs)
    functions = [
        e.X[order] * sign_arr.reshape((M,) + (1,) * e.dim_supp)
        for e in replicate.functions.elements
    ]
    return functions, replicate.values[order]


def bootstrap_bands(
    data: MultiFunData,
    M: int,
    uni: Sequence[Any],
    weights: Any = None,
    B: int = 100,
    alpha: float | None = None,
    seed: int | None = None,
    rule: QuadRule | str | None = None,
    strata: Sequence[Any] | None = None,
    reference: MFPCAFit | None = None,
) -> BootstrapBands:
    """Percentile bands from B resamples of the observations.

    Resamples with fewer than two distinct observations are redrawn; at most
    ``max_attempt_factor * B`` resamples are drawn in total. Replicates use
    the reference fit's weights.

    Raises:
        ValidationError: B < 2 or alpha outside (0, 1).
        NumericError: If the attempt budget runs out.
    """
    from fda_engine.mfpca.estimator import mfpca

    if int(B) < 2:
        raise ValidationError(f"Bootstrap needs B >= 2, got {B}")
    alpha = get_default("bootstrap", "alpha") if alpha is None else float(alpha)
    if not 0 < alpha < 1:
        raise ValidationError(f"alpha must lie in (0, 1), got {alpha}")
    B = int(B)
    if reference is None:
        reference = mfpca(data, M, uni, weights=weights, rule=rule)
    n = data.n_obs
    groups = _strata_groups(strata, n)
    budget = get_default("bootstrap", "max_attempt_factor") * B

    children = np.random.SeedSequence(seed).spawn(B)
    aligned: list[list[np.ndarray]] = [[] for _ in range(data.n_elements)]
    values = np.empty((B, reference.n_components))
    attempts = 0
    for b, child in enumerate(children):
        rng = np.random.default_rng(child)
        while True:
            attempts += 1
            if attempts > budget:
                raise NumericError(f"Bootstrap drew {budget} degenerate resamples; giving up")
            idx = _resample(rng, n, groups)
            if np.unique(idx).size >= 2:
                break
            logger.warning("Bootstrap replicate %d: degenerate resample, redrawing", b + 1)
        replicate = mfpca(
            data.take_obs(idx), M, _resample_specs(uni, idx), weights=reference.weights, rule=rule
        )
        functions, values[b] = align_components(reference, replicate, rule)
        for j, f in enumerate(functions):
            aligned[j].append(f)
        logger.debug("Bootstrap replicate %d/%d done", b + 1, B)

    lower, upper = [], []
    for j, element in enumerate(reference.functions.elements):
        stack = np.stack(aligned[j])
        lo, hi = np.quantile(stack, [alpha / 2, 1 - alpha / 2], axis=0)
        lower.append(DenseFunData(argvals=element.argvals, X=lo))
        upper.append(DenseFunData(argvals=element.argvals, X=hi))
    values_ci = np.quantile(values, [alpha / 2, 1 - alpha / 2], axis=0).T
    logger.info("bootstrap_bands: B=%d, alpha=%.3g, %d resamples drawn", B, alpha, attempts)
    return BootstrapBands(
        lower=MultiFunData(tuple(lower)),
        upper=MultiFunData(tuple(upper)),
        values_ci=values_ci,
        alpha=alpha,
        B=B,
    )
