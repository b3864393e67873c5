"""Karhunen-Loeve simulation of univariate and multivariate functional data.

x_i(t) = sum_m xi_{i,m} phi_m(t),  xi_{i,m} ~ N(0, lambda_m) independently,
with a zero mean function. All randomness comes from one numpy PCG64
generator seeded per call; scores are drawn as an (M, N) standard-normal block
(component-major) so a seed reproduces the same data everywhere.
"""

from __future__ import annotations

import logging
from collections.abc import Sequence
from dataclasses import dataclass
from enum import StrEnum
from typing import Any

import numpy as np

from fda_engine.core.models import DenseFunData, MultiFunData, as_axis
from fda_engine.core.serializer import fundata_from_dict, fundata_to_dict
from fda_engine.errors import ValidationError
from fda_engine.sim.basis import BasisKind, DecayKind, eigenvalues, eval_basis, eval_basis_on

logger = logging.getLogger(__name__)


class Construction(StrEnum):
    SPLIT = "split"
    WEIGHTED = "weighted"


@dataclass(frozen=True)
class SimResult:
    """Simulated data with the eigenvalues and eigenfunctions that generated it."""

    data: DenseFunData | MultiFunData
    true_values: np.ndarray
    true_functions: DenseFunData | MultiFunData

    def __post_init__(self) -> None:
        values = np.array(self.true_values, dtype=np.float64)
        if values.size != self.true_functions.n_obs:
            raise ValidationError(
                f"{values.size} eigenvalues for {self.true_functions.n_obs} eigenfunctions"
            )
        values.setflags(write=False)
        object.__setattr__(self, "true_values", values)

    def to_dict(self) -> dict:
        return {
            "data": fundata_to_dict(self.data),
            "trueVals": self.true_values.tolist(),
            "trueFuns": fundata_to_dict(self.true_functions),
        }

    @classmethod
    def from_dict(cls, d: dict) -> SimResult:
        try:
            return cls(
                data=fundata_from_dict(d["data"]),
                true_values=np.asarray(d["trueVals"], dtype=np.float64),
                true_functions=fundata_from_dict(d["trueFuns"]),
            )
        except KeyError as e:
            raise ValidationError(f"Simulation result lacks field {e}") from e


# ---------------------------------------------------------------------------
# Helpers
# ---------------------------------------------------------------------------


def _tensor_system(systems: Sequence[np.ndarray]) -> np.ndarray:
    """Lexicographic tensor products of marginal systems (first marginal slowest)."""
    X = systems[0]
    for marginal in systems[1:]:
        outer = np.multiply.outer(X, marginal)
        # (M_prev, S_1..S_k, M_next, S_next) -> (M_prev, M_next, S_1..S_k, S_next)
        outer = np.moveaxis(outer, X.ndim, 1)
        X = outer.reshape(-1, *outer.shape[2:])
    return X


def _element_system(
    argvals: Sequence[Any], M: Sequence[int], kinds: Sequence[BasisKind | str]
) -> tuple[tuple[np.ndarray, ...], np.ndarray]:
    if not (len(argvals) == len(M) == len(kinds)) or not argvals:
        raise ValidationError(
            f"argvals, M and kinds need one entry per dimension, got "
            f"{len(argvals)}, {len(M)}, {len(kinds)}"
        )
    axes = tuple(as_axis(a) for a in argvals)
    marginals = [eval_basis(k, m, a).X for k, m, a in zip(kinds, M, axes, strict=True)]
    return axes, _tensor_system(marginals)


def _draw_scores(rng: np.random.Generator, values: np.ndarray, n: int) -> np.ndarray:
    """(N, M) scores with variances ``values``; draws are component-major."""
    z = rng.standard_normal((values.size, n))
    return (z * np.sqrt(values)[:, None]).T


def _combine(scores: np.ndarray, functions: np.ndarray) -> np.ndarray:
    return np.tensordot(scores, functions, axes=(1, 0))


def _check_n(N: int) -> int:
    if int(N) < 1:
        raise ValidationError(f"N must be at least 1, got {N}")
    return int(N)


# ---------------------------------------------------------------------------
# Public API
# ---------------------------------------------------------------------------


def sim_fundata(
    argvals: Sequence[Any],
    M: Sequence[int],
    kinds: Sequence[BasisKind | str],
    decay: DecayKind | str | Any,
    N: int,
    seed: int | None = None,
) -> SimResult:
    """Simulate N curves (d = 1) or images (d >= 2) from a truncated KL expansion.

    Args:
        argvals: One axis per domain dimension.
        M: Number of marginal eigenfunctions per dimension.
        kinds: Basis kind per dimension.
        decay: DecayKind or an explicit eigenvalue vector over prod(M) components.
        N: Number of observations.
        seed: Generator seed.
    """
    N = _check_n(N)
    axes, functions = _element_system(argvals, M, kinds)
    values = eigenvalues(decay, functions.shape[0])
    rng = np.random.default_rng(seed)
    scores = _draw_scores(rng, values, N)
    logger.debug("sim_fundata: d=%d, M=%d, N=%d, seed=%s", len(axes), values.size, N, seed)
    return SimResult(
        data=DenseFunData(argvals=axes, X=_combine(scores, functions)),
        true_values=values,
        true_functions=DenseFunData(argvals=axes, X=functions),
    )


def _split_system(
    argvals: Sequence[Any], M: int, kind: BasisKind | str
) -> list[tuple[np.ndarray, np.ndarray]]:
    """Cut one system on [0, sum |T_j|] into consecutive pieces shifted onto each T_j."""
    axes = []
    for j, element in enumerate(argvals):
        element = list(element) if _is_axis_list(element) else [element]
        if len(element) != 1:
            raise ValidationError(
                f"Split construction works only for one-dimensional elements (element {j + 1})"
            )
        axis = as_axis(element[0])
        if axis.size < 2:
            raise ValidationError(f"Element {j + 1} needs at least two observation points")
        axes.append(axis)
    lengths = np.array([a[-1] - a[0] for a in axes])
    starts = np.concatenate([[0.0], np.cumsum(lengths)[:-1]])
    master = (0.0, float(lengths.sum()))
    return [
        (axis, eval_basis_on(kind, M, start + (axis - axis[0]), master))
        for axis, start in zip(axes, starts, strict=True)
    ]


def _is_axis_list(element: Any) -> bool:
    """True for [[t...], ...] (per-dimension axes), False for a bare axis."""
    if isinstance(element, np.ndarray):
        return element.ndim == 2 or element.dtype == object
    return len(element) > 0 and isinstance(element[0], Sequence | np.ndarray)


def sim_multifundata(
    construction: Construction | str,
    argvals: Sequence[Any],
    M: int | Sequence[Any],
    kinds: BasisKind | str | Sequence[Any],
    decay: DecayKind | str | Any,
    N: int,
    seed: int | None = None,
) -> SimResult:
    """Simulate multivariate functional data from a multivariate KL expansion.

    split: ``argvals`` holds one axis per element, ``M`` and ``kinds`` are
    single values. One system orthonormal on an interval of length
    sum_j |T_j| is cut into p consecutive pieces, so the pieces together are
    orthonormal under sum_j <., .>.

    weighted: ``argvals[j]``, ``M[j]`` and ``kinds[j]`` describe element j
    (tensor systems allowed); every element system must have the same size.
    Element j of psi_m is alpha_j phi_m^(j) with alpha drawn uniform on (0, 1)
    once per call and normalized to unit Euclidean length.

    Raises:
        ValidationError: Non 1-D elements for split, mismatched system sizes
            for weighted.
    """
    N = _check_n(N)
    try:
        construction = Construction(construction)
    except ValueError as e:
        raise ValidationError(f"Unknown construction: {construction!r}") from e
    if not argvals:
        raise ValidationError("Need at least one element")
    rng = np.random.default_rng(seed)

    if construction == Construction.SPLIT:
        if not isinstance(M, int | np.integer) or not isinstance(kinds, str):
            raise ValidationError("Split construction takes a single M and a single kind")
        pieces = _split_system(argvals, int(M), kinds)
        axes_list = [(axis,) for axis, _ in pieces]
        systems = [values for _, values in pieces]
    else:
        if isinstance(M, int | np.integer) or isinstance(kinds, str):
            raise ValidationError("Weighted construction takes per-element M and kinds")
        if not (len(argvals) == len(M) == len(kinds)):
            raise ValidationError("argvals, M and kinds need one entry per element")
        axes_list, systems = [], []
        for element, m, k in zip(argvals, M, kinds, strict=True):
            element = list(element) if _is_axis_list(element) else [element]
            m = [m] if isinstance(m, int | np.integer) else list(m)
            k = [k] if isinstance(k, str) else list(k)
            axes, system = _element_system(element, m, k)
            axes_list.append(axes)
            systems.append(system)
        sizes = [s.shape[0] for s in systems]
        if len(set(sizes)) != 1:
            raise ValidationError(f"Weighted construction needs equal system sizes, got {sizes}")
        alpha = rng.uniform(size=len(systems))
        alpha = alpha / np.linalg.norm(alpha)
        systems = [a * s for a, s in zip(alpha, systems, strict=True)]
        logger.debug("sim_multifundata: weights alpha=%s", np.round(alpha, 6).tolist())

    values = eigenvalues(decay, systems[0].shape[0])
    scores = _draw_scores(rng, values, N)
    data = MultiFunData(tuple(
        DenseFunData(argvals=axes, X=_combine(scores, s))
        for axes, s in zip(axes_list, systems, strict=True)
    ))
    functions = MultiFunData(tuple(
        DenseFunData(argvals=axes, X=s) for axes, s in zip(axes_list, systems, strict=True)
    ))
    return SimResult(data=data, true_values=values, true_functions=functions)
