"""Multivariate functional principal component analysis.

Provides:
- Inverse integrated-variance element weights
- The MFPCA estimator and reconstruction from scores
- Scree / score tables, fit summaries and mean perturbations
- Nonparametric bootstrap bands
"""

from fda_engine.mfpca.bootstrap import align_components, bootstrap_bands, weighted_inner_products
from fda_engine.mfpca.estimator import integrated_variance_weights, mfpca, predict
from fda_engine.mfpca.models import BootstrapBands, MFPCAFit
from fda_engine.mfpca.summaries import (
    mean_perturbation,
    scoreplot_data,
    screeplot_data,
    summarize,
)

__all__ = [
    "BootstrapBands",
    "MFPCAFit",
    "align_components",
    "bootstrap_bands",
    "integrated_variance_weights",
    "mean_perturbation",
    "mfpca",
    "predict",
    "scoreplot_data",
    "screeplot_data",
    "summarize",
    "weighted_inner_products",
]
