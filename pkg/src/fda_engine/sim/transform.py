"""Noise injection and sparsification of simulated data."""

from __future__ import annotations

import logging
from collections.abc import Sequence
from typing import Any

import numpy as np

from fda_engine.core.models import DenseFunData, FunData, IrregFunData, MultiFunData
from fda_engine.errors import ValidationError

logger = logging.getLogger(__name__)


def _per_element(value: Any, p: int, what: str) -> list[Any]:
    if isinstance(value, np.ndarray):
        value = value.tolist()
    if isinstance(value, Sequence) and not isinstance(value, str):
        if len(value) != p:
            raise ValidationError(f"Need {p} {what} values (one per element), got {len(value)}")
        return list(value)
    return [value] * p


def _noisy_dense(data: DenseFunData, sd: float, rng: np.random.Generator) -> DenseFunData:
    noise = rng.standard_normal(data.X.shape) * sd
    # NaN + noise stays NaN
    return DenseFunData(argvals=data.argvals, X=data.X + noise, names=data.names)


def add_error(data: FunData, sd: float | Sequence[float], seed: int | None = None) -> FunData:
    """Add iid N(0, sd^2) noise to every observed value.

    ``sd`` may hold one value per element for multivariate data. Draws run over
    elements in order, then over the value array in row-major order.

    Raises:
        ValidationError: For sd <= 0.
    """
    p = data.n_elements if isinstance(data, MultiFunData) else 1
    sds = [float(s) for s in _per_element(sd, p, "sd")]
    if any(not np.isfinite(s) or s <= 0 for s in sds):
        raise ValidationError(f"Noise standard deviations must be positive, got {sds}")
    rng = np.random.default_rng(seed)
    if isinstance(data, MultiFunData):
        return MultiFunData(tuple(
            _noisy_dense(e, s, rng) for e, s in zip(data.elements, sds, strict=True)
        ))
    if isinstance(data, DenseFunData):
        return _noisy_dense(data, sds[0], rng)
    if isinstance(data, IrregFunData):
        values = tuple(x + rng.standard_normal(x.size) * sds[0] for x in data.X)
        return IrregFunData(argvals=data.argvals, X=values, names=data.names)
    raise ValidationError(f"Not a functional data object: {type(data).__name__}")


def _sparsify_dense(
    data: DenseFunData, min_obs: int, max_obs: int, rng: np.random.Generator
) -> DenseFunData:
    cells = int(np.prod(data.n_obs_points))
    if not 1 <= min_obs <= max_obs:
        raise ValidationError(
            f"Sparsify bounds must satisfy 1 <= min <= max, got {min_obs}:{max_obs}"
        )
    if max_obs > cells:
        raise ValidationError(f"max_obs = {max_obs} exceeds the {cells} grid cells")
    flat = data.X.reshape(data.n_obs, cells)
    out = np.full_like(flat, np.nan)
    for i in range(data.n_obs):
        k = int(rng.integers(min_obs, max_obs + 1))
        keep = rng.choice(cells, size=k, replace=False)
        out[i, keep] = flat[i, keep]
    return DenseFunData(argvals=data.argvals, X=out.reshape(data.X.shape), names=data.names)


def sparsify(
    data: DenseFunData | MultiFunData,
    min_obs: int | Sequence[int],
    max_obs: int | Sequence[int],
    seed: int | None = None,
) -> DenseFunData | MultiFunData:
    """Keep between ``min_obs`` and ``max_obs`` randomly chosen cells per curve.

    For every curve the number of kept cells k is drawn uniformly from
    {min_obs, ..., max_obs}, then k cells of the flattened grid are drawn
    without replacement; all other cells become missing. Multivariate data
    take per-element bounds.

    Raises:
        ValidationError: Invalid bounds or max_obs larger than the grid.
    """
    rng = np.random.default_rng(seed)
    if isinstance(data, MultiFunData):
        lows = _per_element(min_obs, data.n_elements, "min_obs")
        highs = _per_element(max_obs, data.n_elements, "max_obs")
        return MultiFunData(tuple(
            _sparsify_dense(e, int(lo), int(hi), rng)
            for e, lo, hi in zip(data.elements, lows, highs, strict=True)
        ))
    if isinstance(data, DenseFunData):
        if isinstance(min_obs, Sequence) or isinstance(max_obs, Sequence):
            raise ValidationError("Univariate data take a single pair of bounds")
        return _sparsify_dense(data, int(min_obs), int(max_obs), rng)
    raise ValidationError(f"sparsify needs dense or multivariate data, got {type(data).__name__}")
