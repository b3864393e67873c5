"""Pointwise algebra: Arith/Math group operations, mean functions and tensor products.

Container operands must be of the same kind with equal observation points and
either the same number of observations or a single observation, which is then
applied to every observation of the other operand. Missing cells propagate.
Division by zero and non-finite results on observed cells raise NumericError.
"""

from __future__ import annotations

import logging
from collections.abc import Callable
from numbers import Real
from typing import Any

import numpy as np

from fda_engine.core.models import DenseFunData, FunData, IrregFunData, MultiFunData
from fda_engine.errors import NumericError, ValidationError

logger = logging.getLogger(__name__)

_OPS: dict[str, Callable[[Any, Any], Any]] = {
    "+": np.add,
    "-": np.subtract,
    "*": np.multiply,
    "/": np.divide,
    "^": np.power,
    "**": np.power,
}


def _is_scalar(x: Any) -> bool:
    return isinstance(x, Real | np.floating | np.integer) and not isinstance(x, bool)


def _first_bad_obs(bad: np.ndarray) -> int:
    return int(np.flatnonzero(bad.reshape(bad.shape[0], -1).any(axis=1))[0])


def _checked(op: str, x: Any, y: Any, names: tuple[str, ...]) -> np.ndarray:
    """Apply ``op`` and reject non-finite output on observed cells."""
    x_arr = np.asarray(x, dtype=np.float64)
    y_arr = np.asarray(y, dtype=np.float64)
    observed = ~np.isnan(x_arr) & ~np.isnan(y_arr)
    if op == "/" and np.any(observed & (y_arr == 0)):
        zero = np.broadcast_to(observed & (y_arr == 0), np.broadcast(x_arr, y_arr).shape)
        raise NumericError(f"Division by zero in observation {names[_first_bad_obs(zero)]}")
    with np.errstate(all="ignore"):
        out = _OPS[op](x_arr, y_arr)
    bad = np.broadcast_to(observed, out.shape) & ~np.isfinite(out)
    if bad.any():
        raise NumericError(
            f"Operation '{op}' produced a non-finite value in observation "
            f"{names[_first_bad_obs(bad)]}"
        )
    return out


def _check_counts(n_a: int, n_b: int) -> int:
    if n_a != n_b and n_a != 1 and n_b != 1:
        raise ValidationError(
            f"Incompatible numbers of observations: {n_a} and {n_b} "
            "(must be equal or one of them 1)"
        )
    return max(n_a, n_b)


def _same_axes(a: tuple[np.ndarray, ...], b: tuple[np.ndarray, ...]) -> bool:
    return len(a) == len(b) and all(np.array_equal(x, y) for x, y in zip(a, b, strict=True))


def _arith_dense(op: str, a: Any, b: Any) -> DenseFunData:
    if _is_scalar(b):
        return DenseFunData(a.argvals, _checked(op, a.X, b, a.names), a.names)
    if _is_scalar(a):
        return DenseFunData(b.argvals, _checked(op, a, b.X, b.names), b.names)
    if not _same_axes(a.argvals, b.argvals):
        raise ValidationError("Functions must have the same observation points")
    _check_counts(a.n_obs, b.n_obs)
    names = a.names if a.n_obs >= b.n_obs else b.names
    return DenseFunData(a.argvals, _checked(op, a.X, b.X, names), names)


def _arith_irreg(op: str, a: Any, b: Any) -> IrregFunData:
    if _is_scalar(b):
        pairs = zip(a.X, a.names, strict=True)
        values = tuple(_checked(op, x[None], b, (n,))[0] for x, n in pairs)
        return IrregFunData(a.argvals, values, a.names)
    if _is_scalar(a):
        pairs = zip(b.X, b.names, strict=True)
        values = tuple(_checked(op, a, x[None], (n,))[0] for x, n in pairs)
        return IrregFunData(b.argvals, values, b.names)
    n = _check_counts(a.n_obs, b.n_obs)
    ref = a if a.n_obs >= b.n_obs else b
    values: list[np.ndarray] = []
    for i in range(n):
        ia, ib = (i if a.n_obs > 1 else 0), (i if b.n_obs > 1 else 0)
        if not np.array_equal(a.argvals[ia], b.argvals[ib]):
            raise ValidationError(
                f"Functions must have the same observation points (observation {ref.names[i]})"
            )
        values.append(_checked(op, a.X[ia][None], b.X[ib][None], (ref.names[i],))[0])
    return IrregFunData(ref.argvals, tuple(values), ref.names)


def arith(op: str, a: Any, b: Any) -> FunData:
    """Pointwise ``a op b`` for op in + - * / ^.

    Either operand may be a real scalar.

    Raises:
        ValidationError: Mismatched kinds, observation points or counts.
        NumericError: Division by zero or non-finite results.
    """
    if op not in _OPS:
        raise ValidationError(f"Unknown operator: {op!r}")
    if _is_scalar(a) and _is_scalar(b):
        raise ValidationError("At least one operand must be a functional data object")
    container = b if _is_scalar(a) else a
    if not _is_scalar(a) and not _is_scalar(b) and type(a) is not type(b):
        raise ValidationError(
            f"Operands must be of the same kind, got {type(a).__name__} and {type(b).__name__}"
        )
    if isinstance(container, DenseFunData):
        return _arith_dense(op, a, b)
    if isinstance(container, IrregFunData):
        return _arith_irreg(op, a, b)
    if isinstance(container, MultiFunData):
        p = container.n_elements
        if not _is_scalar(a) and not _is_scalar(b) and a.n_elements != b.n_elements:
            raise ValidationError(f"Element counts differ: {a.n_elements} and {b.n_elements}")
        return MultiFunData(tuple(
            _arith_dense(op, a if _is_scalar(a) else a.elements[j],
                         b if _is_scalar(b) else b.elements[j])
            for j in range(p)
        ))
    raise ValidationError(f"Not a functional data object: {type(container).__name__}")


def elementwise_map(data: FunData, fn: Callable[[np.ndarray], np.ndarray]) -> FunData:
    """Apply a vectorized real function to every observed value.

    Raises:
        NumericError: If ``fn`` yields a non-finite value on an observed cell.
    """
    if isinstance(data, MultiFunData):
        return MultiFunData(tuple(elementwise_map(e, fn) for e in data.elements))
    if isinstance(data, DenseFunData):
        observed = ~np.isnan(data.X)
        with np.errstate(all="ignore"):
            out = np.asarray(fn(data.X), dtype=np.float64)
        out = np.where(observed, out, np.nan)
        bad = observed & ~np.isfinite(out)
        if bad.any():
            raise NumericError(
                f"Function produced a non-finite value in observation "
                f"{data.names[_first_bad_obs(bad)]}"
            )
        return DenseFunData(data.argvals, out, data.names)
    if isinstance(data, IrregFunData):
        values = []
        for x, name in zip(data.X, data.names, strict=True):
            with np.errstate(all="ignore"):
                y = np.asarray(fn(x), dtype=np.float64)
            if not np.all(np.isfinite(y)):
                raise NumericError(f"Function produced a non-finite value in observation {name}")
            values.append(y)
        return IrregFunData(data.argvals, tuple(values), data.names)
    raise ValidationError(f"Not a functional data object: {type(data).__name__}")


def scale_obs(data: FunData, factors: Any) -> FunData:
    """Multiply observation i by ``factors[i]``."""
    factors = np.asarray(factors, dtype=np.float64)
    if factors.shape != (data.n_obs,):
        raise ValidationError(f"Need {data.n_obs} factors, got shape {factors.shape}")
    if isinstance(data, MultiFunData):
        return MultiFunData(tuple(scale_obs(e, factors) for e in data.elements))
    if isinstance(data, DenseFunData):
        shape = (data.n_obs,) + (1,) * data.dim_supp
        return DenseFunData(data.argvals, data.X * factors.reshape(shape), data.names)
    return IrregFunData(
        data.argvals, tuple(x * f for x, f in zip(data.X, factors, strict=True)), data.names
    )


def mean_function(data: FunData) -> FunData:
    """Pointwise mean over observations (one observation in the result).

    Dense data skip missing values cell-wise; irregular data need identical
    observation points for all curves.

    Raises:
        ValidationError: All-missing cells or differing irregular grids.
    """
    if isinstance(data, MultiFunData):
        return MultiFunData(tuple(mean_function(e) for e in data.elements))
    if isinstance(data, DenseFunData):
        missing = np.isnan(data.X)
        if missing.all(axis=0).any():
            raise ValidationError("Mean function undefined: a grid cell is missing everywhere")
        if missing.any():
            mean = np.nanmean(data.X, axis=0, keepdims=True)
        else:
            mean = data.X.mean(axis=0, keepdims=True)
        return DenseFunData(data.argvals, mean)
    if isinstance(data, IrregFunData):
        first = data.argvals[0]
        if any(not np.array_equal(first, t) for t in data.argvals[1:]):
            raise ValidationError("Mean function needs identical observation points for all curves")
        return IrregFunData((first,), (np.mean(np.stack(data.X), axis=0),))
    raise ValidationError(f"Not a functional data object: {type(data).__name__}")


def tensor_product(f: DenseFunData, g: DenseFunData) -> DenseFunData:
    """Tensor product f_i(t) * g_k(u) on the product domain.

    Observation (i, k) lands at row i * N_g + k (f index varies slowest).

    Raises:
        ValidationError: For non one-dimensional inputs or missing values.
    """
    for name, obj in (("f", f), ("g", g)):
        if not isinstance(obj, DenseFunData) or obj.dim_supp != 1:
            raise ValidationError(f"{name} must be dense data on a one-dimensional domain")
        if obj.has_missing:
            raise ValidationError(f"{name} contains missing values")
    X = f.X[:, None, :, None] * g.X[None, :, None, :]
    return DenseFunData(
        argvals=(f.argvals[0], g.argvals[0]),
        X=X.reshape(f.n_obs * g.n_obs, f.n_obs_points[0], g.n_obs_points[0]),
    )
