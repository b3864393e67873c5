"""Functional data containers: dense grids, irregular curves and multivariate tuples.

Three immutable containers:
  - DenseFunData: N functions on one rectangular grid over a d-dimensional
    domain, values in an array of shape (N, S_1, ..., S_d); NaN marks missing.
  - IrregFunData: N curves on one-dimensional domains, each with its own
    observation points.
  - MultiFunData: an ordered tuple of p DenseFunData sharing N.

Observation indices are 0-based throughout the Python API.
"""

from __future__ import annotations

import logging
from collections.abc import Callable, Sequence
from dataclasses import dataclass, field
from typing import Any, ClassVar

import numpy as np

from fda_engine.errors import ValidationError

logger = logging.getLogger(__name__)

Window = tuple[float, float]


# ---------------------------------------------------------------------------
# Helpers
# ---------------------------------------------------------------------------


def _frozen(values: Any) -> np.ndarray:
    arr = np.array(values, dtype=np.float64, copy=True)
    arr.setflags(write=False)
    return arr


def as_axis(points: Any) -> np.ndarray:
    """Validate observation points of one domain dimension.

    Raises:
        ValidationError: If empty, non-finite, not 1-D or not strictly increasing.
    """
    axis = _frozen(points)
    if axis.ndim != 1 or axis.size < 1:
        raise ValidationError(f"Axis must be a non-empty 1-D vector, got shape {axis.shape}")
    if not np.all(np.isfinite(axis)):
        raise ValidationError("Axis contains non-finite values")
    if axis.size > 1 and np.any(np.diff(axis) <= 0):
        raise ValidationError("Axis must be strictly increasing")
    return axis


def default_names(n: int) -> tuple[str, ...]:
    """1-based decimal labels."""
    return tuple(str(i) for i in range(1, n + 1))


def _check_names(names: Sequence[str] | None, n: int) -> tuple[str, ...]:
    if names is None:
        return default_names(n)
    names = tuple(str(s) for s in names)
    if len(names) != n:
        raise ValidationError(f"Expected {n} names, got {len(names)}")
    if len(set(names)) != n:
        raise ValidationError("Names must be unique")
    return names


def _check_indices(indices: Sequence[int] | None, n: int) -> list[int]:
    if indices is None:
        return list(range(n))
    idx = [int(i) for i in indices]
    if not idx:
        raise ValidationError("Empty observation selection")
    if any(i < 0 or i >= n for i in idx):
        raise ValidationError(f"Observation index out of range 0..{n - 1}")
    if len(set(idx)) != len(idx):
        raise ValidationError("Observation indices must be unique")
    return idx


def _in_window(points: np.ndarray, window: Window | None) -> np.ndarray:
    if window is None:
        return np.ones(points.shape, dtype=bool)
    lo, hi = window
    return (points >= lo) & (points <= hi)


class _ArithMixin:
    """Arith group generics delegating to fda_engine.ops.arith."""

    def _arith(self, op: str, other: Any, reflected: bool = False) -> Any:
        from fda_engine.ops.arith import arith

        if reflected:
            return arith(op, other, self)
        return arith(op, self, other)

    def __add__(self, other: Any) -> Any:
        return self._arith("+", other)

    def __radd__(self, other: Any) -> Any:
        return self._arith("+", other, reflected=True)

    def __sub__(self, other: Any) -> Any:
        return self._arith("-", other)

    def __rsub__(self, other: Any) -> Any:
        return self._arith("-", other, reflected=True)

    def __mul__(self, other: Any) -> Any:
        return self._arith("*", other)

    def __rmul__(self, other: Any) -> Any:
        return self._arith("*", other, reflected=True)

    def __truediv__(self, other: Any) -> Any:
        return self._arith("/", other)

    def __rtruediv__(self, other: Any) -> Any:
        return self._arith("/", other, reflected=True)

    def __pow__(self, other: Any) -> Any:
        return self._arith("^", other)

    def __neg__(self) -> Any:
        return self._arith("*", -1.0)

    def map(self, fn: Callable[[np.ndarray], np.ndarray]) -> Any:
        """Apply a Math-group function to every observed value."""
        from fda_engine.ops.arith import elementwise_map

        return elementwise_map(self, fn)


# ---------------------------------------------------------------------------
# Containers
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class DenseFunData(_ArithMixin):
    """N functions sampled on a common grid.

    Attributes:
        argvals: One strictly increasing axis per domain dimension.
        X: Values of shape (N, S_1, ..., S_d); NaN marks a missing cell.
        names: N unique observation labels (1-based decimal strings by default).
    """

    argvals: tuple[np.ndarray, ...]
    X: np.ndarray
    names: tuple[str, ...] | None = None

    kind: ClassVar[str] = "dense"

    def __post_init__(self) -> None:
        argvals = tuple(as_axis(a) for a in self.argvals)
        if not argvals:
            raise ValidationError("Dense data needs at least one axis")
        X = _frozen(self.X)
        expected = tuple(a.size for a in argvals)
        if X.ndim != len(argvals) + 1 or X.shape[1:] != expected:
            raise ValidationError(
                f"Values of shape {X.shape} do not match axes {expected}; "
                f"expected (N, {', '.join(map(str, expected))})"
            )
        if X.shape[0] < 1:
            raise ValidationError("Dense data needs at least one observation")
        if np.any(np.isinf(X)):
            raise ValidationError("Values contain infinities; use NaN for missing cells")
        object.__setattr__(self, "argvals", argvals)
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "names", _check_names(self.names, X.shape[0]))

    @property
    def n_obs(self) -> int:
        return int(self.X.shape[0])

    @property
    def n_obs_points(self) -> tuple[int, ...]:
        return tuple(a.size for a in self.argvals)

    @property
    def dim_supp(self) -> int:
        return len(self.argvals)

    @property
    def has_missing(self) -> bool:
        return bool(np.isnan(self.X).any())

    def extract_obs(
        self,
        obs: Sequence[int] | None = None,
        window: Sequence[Window | None] | None = None,
    ) -> DenseFunData:
        """Restrict to the selected observations and to grid points inside ``window``.

        ``window`` holds one closed interval (or None) per domain dimension.
        """
        idx = _check_indices(obs, self.n_obs)
        if window is not None and len(window) != self.dim_supp:
            raise ValidationError(f"Window needs {self.dim_supp} intervals, got {len(window)}")
        masks = [
            _in_window(a, None if window is None else window[k])
            for k, a in enumerate(self.argvals)
        ]
        if any(not m.any() for m in masks):
            raise ValidationError("Window leaves an empty axis")
        X = self.X[idx]
        for k, mask in enumerate(masks):
            X = np.compress(mask, X, axis=k + 1)
        return DenseFunData(
            argvals=tuple(a[m] for a, m in zip(self.argvals, masks, strict=True)),
            X=X,
            names=[self.names[i] for i in idx],
        )

    def take_obs(self, indices: Sequence[int]) -> DenseFunData:
        """Observations at ``indices`` (repeats allowed), relabelled with default names."""
        return DenseFunData(argvals=self.argvals, X=self.X[list(indices)])

    def rename(self, names: Sequence[str]) -> DenseFunData:
        return DenseFunData(argvals=self.argvals, X=self.X, names=names)

    def describe(self) -> dict[str, Any]:
        observed = self.X[~np.isnan(self.X)]
        return {
            "kind": self.kind,
            "nObs": self.n_obs,
            "nObsPoints": list(self.n_obs_points),
            "dimSupp": self.dim_supp,
            "argvalRanges": [[float(a[0]), float(a[-1])] for a in self.argvals],
            "valueRange": _value_summary(observed),
            "missingCells": int(np.isnan(self.X).sum()),
            "observedPerCurve": _count_summary(
                (~np.isnan(self.X)).reshape(self.n_obs, -1).sum(axis=1)
            ),
        }


@dataclass(frozen=True, eq=False)
class IrregFunData(_ArithMixin):
    """N curves with individual observation points on a one-dimensional domain.

    Attributes:
        argvals: Per-curve strictly increasing observation points.
        X: Per-curve observed values, no missing markers.
        names: N unique observation labels.
        dropped: Labels of curves removed by the operation that produced this
            object (e.g. an argument window that emptied them).
    """

    argvals: tuple[np.ndarray, ...]
    X: tuple[np.ndarray, ...]
    names: tuple[str, ...] | None = None
    dropped: tuple[str, ...] = field(default=())

    kind: ClassVar[str] = "irregular"

    def __post_init__(self) -> None:
        if len(self.argvals) != len(self.X):
            raise ValidationError(
                f"argvals has {len(self.argvals)} curves but X has {len(self.X)}"
            )
        if len(self.X) < 1:
            raise ValidationError("Irregular data needs at least one curve")
        argvals = tuple(as_axis(a) for a in self.argvals)
        X = tuple(_frozen(x) for x in self.X)
        for i, (t, x) in enumerate(zip(argvals, X, strict=True)):
            if x.ndim != 1 or x.size != t.size:
                raise ValidationError(
                    f"Curve {i}: {x.size} values for {t.size} observation points"
                )
            if not np.all(np.isfinite(x)):
                raise ValidationError(f"Curve {i} contains missing or non-finite values")
        object.__setattr__(self, "argvals", argvals)
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "names", _check_names(self.names, len(X)))
        object.__setattr__(self, "dropped", tuple(self.dropped))

    @property
    def n_obs(self) -> int:
        return len(self.X)

    @property
    def n_obs_points(self) -> tuple[int, ...]:
        return tuple(x.size for x in self.X)

    @property
    def dim_supp(self) -> int:
        return 1

    def extract_obs(
        self,
        obs: Sequence[int] | None = None,
        window: Sequence[Window | None] | None = None,
    ) -> IrregFunData:
        """Restrict to the selected curves and to points inside ``window``.

        Curves left without points are dropped; their labels are recorded in
        ``dropped`` on the result.
        """
        idx = _check_indices(obs, self.n_obs)
        if window is not None and len(window) != 1:
            raise ValidationError(f"Irregular data takes one interval, got {len(window)}")
        interval = None if window is None else window[0]
        argvals, values, names, dropped = [], [], [], []
        for i in idx:
            mask = _in_window(self.argvals[i], interval)
            if not mask.any():
                dropped.append(self.names[i])
                continue
            argvals.append(self.argvals[i][mask])
            values.append(self.X[i][mask])
            names.append(self.names[i])
        if not values:
            raise ValidationError("Window leaves no observed curve")
        if dropped:
            logger.warning("extract_obs dropped %d emptied curve(s): %s", len(dropped), dropped)
        return IrregFunData(argvals=tuple(argvals), X=tuple(values), names=names, dropped=dropped)

    def take_obs(self, indices: Sequence[int]) -> IrregFunData:
        return IrregFunData(
            argvals=tuple(self.argvals[i] for i in indices),
            X=tuple(self.X[i] for i in indices),
        )

    def rename(self, names: Sequence[str]) -> IrregFunData:
        return IrregFunData(argvals=self.argvals, X=self.X, names=names)

    def describe(self) -> dict[str, Any]:
        counts = np.array(self.n_obs_points)
        points = np.concatenate(self.argvals)
        return {
            "kind": self.kind,
            "nObs": self.n_obs,
            "nObsPoints": counts.tolist(),
            "dimSupp": 1,
            "argvalRanges": [[float(points.min()), float(points.max())]],
            "pointsPerCurve": _count_summary(counts),
            "valueRange": _value_summary(np.concatenate(self.X)),
        }


@dataclass(frozen=True, eq=False)
class MultiFunData(_ArithMixin):
    """p dense elements sharing the number of observations."""

    elements: tuple[DenseFunData, ...]

    kind: ClassVar[str] = "multi"

    def __post_init__(self) -> None:
        elements = tuple(self.elements)
        if not elements:
            raise ValidationError("Multivariate data needs at least one element")
        for e in elements:
            if not isinstance(e, DenseFunData):
                raise ValidationError(f"Elements must be DenseFunData, got {type(e).__name__}")
        counts = {e.n_obs for e in elements}
        if len(counts) != 1:
            raise ValidationError(f"Elements differ in number of observations: {sorted(counts)}")
        object.__setattr__(self, "elements", elements)

    def __len__(self) -> int:
        return len(self.elements)

    def __getitem__(self, j: int) -> DenseFunData:
        return self.elements[j]

    def __iter__(self):
        return iter(self.elements)

    @property
    def n_elements(self) -> int:
        return len(self.elements)

    @property
    def n_obs(self) -> int:
        return self.elements[0].n_obs

    @property
    def n_obs_points(self) -> list[tuple[int, ...]]:
        return [e.n_obs_points for e in self.elements]

    @property
    def dim_supp(self) -> tuple[int, ...]:
        return tuple(e.dim_supp for e in self.elements)

    @property
    def names(self) -> tuple[str, ...]:
        return self.elements[0].names

    def extract_obs(
        self,
        obs: Sequence[int] | None = None,
        window: Sequence[Sequence[Window | None] | None] | None = None,
    ) -> MultiFunData:
        """Element-wise extraction; ``window`` holds one per-element window (or None)."""
        if window is not None and len(window) != self.n_elements:
            raise ValidationError(f"Need {self.n_elements} element windows, got {len(window)}")
        return MultiFunData(
            tuple(
                e.extract_obs(obs, None if window is None else window[j])
                for j, e in enumerate(self.elements)
            )
        )

    def take_obs(self, indices: Sequence[int]) -> MultiFunData:
        return MultiFunData(tuple(e.take_obs(indices) for e in self.elements))

    def rename(self, names: Sequence[str]) -> MultiFunData:
        return MultiFunData(tuple(e.rename(names) for e in self.elements))

    def describe(self) -> dict[str, Any]:
        return {
            "kind": self.kind,
            "nObs": self.n_obs,
            "nObsPoints": [list(p) for p in self.n_obs_points],
            "dimSupp": list(self.dim_supp),
            "elements": [e.describe() for e in self.elements],
        }


FunData = DenseFunData | IrregFunData | MultiFunData


def _count_summary(counts: np.ndarray) -> dict[str, float]:
    return {"min": int(counts.min()), "mean": float(counts.mean()), "max": int(counts.max())}


def _value_summary(observed: np.ndarray) -> dict[str, float | None]:
    if observed.size == 0:
        return {"min": None, "mean": None, "max": None}
    return {
        "min": float(observed.min()),
        "mean": float(observed.mean()),
        "max": float(observed.max()),
    }


# ---------------------------------------------------------------------------
# Constructors and accessors
# ---------------------------------------------------------------------------


def make_dense(
    argvals: Sequence[Any], values: Any, names: Sequence[str] | None = None
) -> DenseFunData:
    """Create a validated DenseFunData; NaN cells are kept as missing."""
    return DenseFunData(argvals=tuple(argvals), X=values, names=names)


def make_irreg(
    argvals: Sequence[Any], values: Sequence[Any], names: Sequence[str] | None = None
) -> IrregFunData:
    """Create a validated IrregFunData.

    Each curve's points are sorted ascending with values co-sorted; duplicate
    points are rejected.

    Raises:
        ValidationError: On length mismatch, empty curves, duplicates or missing values.
    """
    if len(argvals) != len(values):
        raise ValidationError(f"argvals has {len(argvals)} curves but values has {len(values)}")
    sorted_t, sorted_x = [], []
    for i, (t, x) in enumerate(zip(argvals, values, strict=True)):
        t = np.asarray(t, dtype=np.float64).ravel()
        x = np.asarray(x, dtype=np.float64).ravel()
        if t.size == 0:
            raise ValidationError(f"Curve {i} is empty")
        if t.size != x.size:
            raise ValidationError(f"Curve {i}: {x.size} values for {t.size} observation points")
        order = np.argsort(t, kind="stable")
        t, x = t[order], x[order]
        if np.any(np.diff(t) == 0):
            raise ValidationError(f"Curve {i} has duplicate observation points")
        sorted_t.append(t)
        sorted_x.append(x)
    return IrregFunData(argvals=tuple(sorted_t), X=tuple(sorted_x), names=names)


def make_multi(elements: Sequence[DenseFunData]) -> MultiFunData:
    """Combine dense elements into a multivariate container, preserving order."""
    return MultiFunData(tuple(elements))


def n_obs(obj: FunData) -> int:
    return obj.n_obs


def n_obs_points(obj: FunData) -> tuple[int, ...] | list[tuple[int, ...]]:
    return obj.n_obs_points


def dim_supp(obj: FunData) -> int | tuple[int, ...]:
    return obj.dim_supp


def extract_obs(obj: FunData, obs: Sequence[int] | None = None, window: Any = None) -> FunData:
    return obj.extract_obs(obs, window)


def rename(obj: FunData, names: Sequence[str]) -> FunData:
    return obj.rename(names)


def describe(obj: FunData) -> dict[str, Any]:
    """Summary in the style of show/summary printouts."""
    return obj.describe()


def concat_obs(a: FunData, b: FunData) -> FunData:
    """Append the observations of ``b`` after those of ``a``.

    Default labels on both sides are regenerated; otherwise labels are kept and
    must stay unique.
    """
    if type(a) is not type(b):
        raise ValidationError(f"Cannot concatenate {a.kind} and {b.kind} data")
    if isinstance(a, MultiFunData):
        if a.n_elements != b.n_elements:
            raise ValidationError("Multivariate objects differ in number of elements")
        return MultiFunData(
            tuple(concat_obs(ea, eb) for ea, eb in zip(a.elements, b.elements, strict=True))
        )
    both_default = a.names == default_names(a.n_obs) and b.names == default_names(b.n_obs)
    names = None if both_default else a.names + b.names
    if isinstance(a, IrregFunData):
        return IrregFunData(argvals=a.argvals + b.argvals, X=a.X + b.X, names=names)
    if a.dim_supp != b.dim_supp or not all(
        np.array_equal(x, y) for x, y in zip(a.argvals, b.argvals, strict=True)
    ):
        raise ValidationError("Dense objects must share argvals to be concatenated")
    return DenseFunData(argvals=a.argvals, X=np.concatenate([a.X, b.X]), names=names)
