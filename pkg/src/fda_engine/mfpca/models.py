"""MFPCA result types and their JSON form.

Serialized fit:
  {"meanFunction": <multi>, "functions": <multi>, "values": [...],
   "scores": [[...]], "vectors": [[...]], "normFactors": [...],
   "weights": [...], "fit": <multi>?, "bootstrap": {...}?}
Inspection fields (univariate scores and expansions, score covariance) are
kept in memory only.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

import numpy as np

from fda_engine.core.models import MultiFunData
from fda_engine.core.serializer import fundata_from_dict, fundata_to_dict
from fda_engine.errors import ValidationError


def _matrix(values: Any) -> np.ndarray:
    arr = np.array(values, dtype=np.float64)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class BootstrapBands:
    """Pointwise percentile bands for eigenfunctions and intervals for eigenvalues.

    Attributes:
        lower, upper: M functions each (per element), lower <= upper pointwise.
        values_ci: M x 2 matrix of eigenvalue intervals.
        alpha: Level; the bands cover 1 - alpha.
        B: Number of replicates.
    """

    lower: MultiFunData
    upper: MultiFunData
    values_ci: np.ndarray
    alpha: float
    B: int

    def to_dict(self) -> dict:
        return {
            "lower": fundata_to_dict(self.lower),
            "upper": fundata_to_dict(self.upper),
            "valuesCI": self.values_ci.tolist(),
            "alpha": self.alpha,
            "B": self.B,
        }

    @classmethod
    def from_dict(cls, d: dict) -> BootstrapBands:
        return cls(
            lower=fundata_from_dict(d["lower"]),
            upper=fundata_from_dict(d["upper"]),
            values_ci=_matrix(d["valuesCI"]),
            alpha=float(d["alpha"]),
            B=int(d["B"]),
        )


@dataclass(frozen=True, eq=False)
class MFPCAFit:
    """Multivariate functional principal components.

    Attributes:
        mean_function: Pointwise mean (one observation).
        functions: Eigenfunctions psi_m (M observations), orthonormal under the
            weighted scalar product.
        values: Eigenvalues nu_m, non-increasing.
        scores: N x M matrix rho.
        vectors: M_+ x M matrix whose columns are the eigenvectors c_m.
        norm_factors: Ones; all expansions are orthonormal before step two.
        weights: Element weights used.
        names: Observation labels of the input.
        fit: Reconstructions of the input (optional).
        uni_scores: N x M_+ matrix of stacked univariate scores.
        score_covariance: M_+ x M_+ covariance of ``uni_scores``.
        uni_expansions: Per-element expansion results (on weighted data).
        bootstrap: Bootstrap bands (optional).
    """

    mean_function: MultiFunData
    functions: MultiFunData
    values: np.ndarray
    scores: np.ndarray
    vectors: np.ndarray
    norm_factors: np.ndarray
    weights: np.ndarray
    names: tuple[str, ...] | None = None
    fit: MultiFunData | None = None
    uni_scores: np.ndarray | None = None
    score_covariance: np.ndarray | None = None
    uni_expansions: tuple[Any, ...] = field(default=())
    bootstrap: BootstrapBands | None = None

    def __post_init__(self) -> None:
        for name in ("values", "scores", "vectors", "norm_factors", "weights"):
            object.__setattr__(self, name, _matrix(getattr(self, name)))
        M = self.values.size
        if self.functions.n_obs != M or self.scores.shape[1] != M or self.vectors.shape[1] != M:
            raise ValidationError(
                f"Inconsistent fit: {M} values, {self.functions.n_obs} functions, "
                f"scores {self.scores.shape}, vectors {self.vectors.shape}"
            )
        if self.names is None:
            object.__setattr__(self, "names", tuple(str(i + 1) for i in range(self.n_obs)))

    @property
    def n_components(self) -> int:
        return int(self.values.size)

    @property
    def n_obs(self) -> int:
        return int(self.scores.shape[0])

    @property
    def n_elements(self) -> int:
        return self.functions.n_elements

    def to_dict(self) -> dict:
        out: dict[str, Any] = {
            "meanFunction": fundata_to_dict(self.mean_function),
            "functions": fundata_to_dict(self.functions),
            "values": self.values.tolist(),
            "scores": self.scores.tolist(),
            "vectors": self.vectors.tolist(),
            "normFactors": self.norm_factors.tolist(),
            "weights": self.weights.tolist(),
            "names": list(self.names or ()),
        }
        if self.fit is not None:
            out["fit"] = fundata_to_dict(self.fit)
        if self.bootstrap is not None:
            out["bootstrap"] = self.bootstrap.to_dict()
        return out

    @classmethod
    def from_dict(cls, d: dict) -> MFPCAFit:
        """Rebuild a fit from its JSON form.

        Raises:
            ValidationError: On missing fields or inconsistent shapes.
        """
        try:
            return cls(
                mean_function=fundata_from_dict(d["meanFunction"]),
                functions=fundata_from_dict(d["functions"]),
                values=d["values"],
                scores=d["scores"],
                vectors=d["vectors"],
                norm_factors=d["normFactors"],
                weights=d["weights"],
                names=tuple(d["names"]) if d.get("names") else None,
                fit=fundata_from_dict(d["fit"]) if d.get("fit") else None,
                bootstrap=BootstrapBands.from_dict(d["bootstrap"]) if d.get("bootstrap") else None,
            )
        except KeyError as e:
            raise ValidationError(f"MFPCA fit lacks field {e}") from e
