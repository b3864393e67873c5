"""Tables derived from an MFPCA fit: scree, scores, summary and mean perturbations."""

from __future__ import annotations

from typing import Any

import numpy as np
import pandas as pd

from fda_engine.config import get_default
from fda_engine.core.models import DenseFunData, MultiFunData
from fda_engine.errors import NumericError, ValidationError
from fda_engine.mfpca.models import MFPCAFit


def screeplot_data(fit: MFPCAFit) -> pd.DataFrame:
    """Columns component (1-based), value, proportion, cumulative."""
    values = fit.values
    total = values.sum()
    if not total > 0:
        raise NumericError("Eigenvalues sum to zero")
    running = np.cumsum(values)
    return pd.DataFrame({
        "component": np.arange(1, values.size + 1),
        "value": values,
        "proportion": values / total,
        "cumulative": running / running[-1],
    })


def _component(fit: MFPCAFit, m: int) -> int:
    if not 1 <= int(m) <= fit.n_components:
        raise ValidationError(f"Component {m} outside 1..{fit.n_components}")
    return int(m) - 1


def scoreplot_data(fit: MFPCAFit, dims: tuple[int, int] = (1, 2)) -> pd.DataFrame:
    """Scores of two components (1-based ``dims``) per observation label.

    Columns: label, x (scores of dims[0]), y (scores of dims[1]).
    """
    a, b = (_component(fit, d) for d in dims)
    table = pd.DataFrame({
        "label": list(fit.names or ()),
        "x": fit.scores[:, a],
        "y": fit.scores[:, b],
    })
    table.attrs["dims"] = (a + 1, b + 1)
    return table


def summarize(fit: MFPCAFit) -> dict[str, Any]:
    """Component table plus the dimensions of the fit."""
    return {
        "nObs": fit.n_obs,
        "nElements": fit.n_elements,
        "nComponents": fit.n_components,
        "nUnivariate": int(fit.vectors.shape[0]),
        "weights": fit.weights.tolist(),
        "components": screeplot_data(fit),
    }


def mean_perturbation(fit: MFPCAFit, m: int, factor: float | None = None) -> MultiFunData:
    """Two observations mu + factor * sqrt(nu_m) psi_m and mu - factor * sqrt(nu_m) psi_m."""
    k = _component(fit, m)
    factor = get_default("perturbation_factor") if factor is None else float(factor)
    shift = factor * np.sqrt(fit.values[k])
    elements = []
    for mu, psi in zip(fit.mean_function.elements, fit.functions.elements, strict=True):
        X = np.stack([mu.X[0] + shift * psi.X[k], mu.X[0] - shift * psi.X[k]])
        elements.append(DenseFunData(argvals=mu.argvals, X=X, names=("plus", "minus")))
    return MultiFunData(tuple(elements))
