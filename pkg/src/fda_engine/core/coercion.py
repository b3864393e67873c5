"""Coercion between the container kinds."""

from __future__ import annotations

import numpy as np

from fda_engine.core.models import DenseFunData, IrregFunData, MultiFunData
from fda_engine.errors import ValidationError


def dense_to_irreg(data: DenseFunData) -> IrregFunData:
    """Keep each curve's non-missing (t_j, x_ij) pairs.

    Raises:
        ValidationError: If the domain is not one-dimensional or a curve is fully missing.
    """
    if data.dim_supp != 1:
        raise ValidationError(
            f"Only one-dimensional dense data can become irregular (d={data.dim_supp})"
        )
    axis = data.argvals[0]
    argvals, values = [], []
    for i in range(data.n_obs):
        observed = ~np.isnan(data.X[i])
        if not observed.any():
            raise ValidationError(f"Curve {data.names[i]} has no observed values")
        argvals.append(axis[observed])
        values.append(data.X[i][observed])
    return IrregFunData(argvals=tuple(argvals), X=tuple(values), names=data.names)


def irreg_to_dense(data: IrregFunData) -> DenseFunData:
    """Place all curves on the sorted union of observation points; gaps become NaN."""
    axis = np.unique(np.concatenate(data.argvals))
    X = np.full((data.n_obs, axis.size), np.nan)
    for i, (t, x) in enumerate(zip(data.argvals, data.X, strict=True)):
        X[i, np.searchsorted(axis, t)] = x
    return DenseFunData(argvals=(axis,), X=X, names=data.names)


def dense_to_multi(data: DenseFunData) -> MultiFunData:
    """Wrap dense data as a one-element multivariate object."""
    return MultiFunData((data,))
