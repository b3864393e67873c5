"""Container serializer: canonical JSON and long-format tables / CSV.

JSON schema:
  {"kind": "dense", "argvals": [[...], ...], "X": [[...], ...], "names": [...]}
  {"kind": "irregular", "argvals": [[...], ...], "X": [[...], ...], "names": [...]}
  {"kind": "multi", "elements": [<dense>, ...]}
Missing cells are written as null.

Long format columns: obs, element, arg1[, arg2, ...], value with 1-based
obs / element indices and one row per observed cell.
"""

from __future__ import annotations

import io
import json
import os
import tempfile
from pathlib import Path
from typing import Any

import numpy as np
import pandas as pd
from pandas.api.types import is_bool_dtype, is_integer_dtype, is_numeric_dtype

from fda_engine.core.models import DenseFunData, FunData, IrregFunData, MultiFunData
from fda_engine.errors import ValidationError

# ---------------------------------------------------------------------------
# JSON
# ---------------------------------------------------------------------------


def _nested_with_nulls(X: np.ndarray) -> list:
    obj = X.astype(object)
    obj[np.isnan(X)] = None
    return obj.tolist()


def _dense_to_dict(data: DenseFunData) -> dict:
    return {
        "kind": "dense",
        "argvals": [a.tolist() for a in data.argvals],
        "X": _nested_with_nulls(data.X),
        "names": list(data.names),
    }


def _dense_from_dict(d: dict) -> DenseFunData:
    # null becomes NaN under a float dtype
    return DenseFunData(
        argvals=tuple(d["argvals"]),
        X=np.array(d["X"], dtype=np.float64),
        names=d.get("names"),
    )


def _irreg_to_dict(data: IrregFunData) -> dict:
    return {
        "kind": "irregular",
        "argvals": [a.tolist() for a in data.argvals],
        "X": [x.tolist() for x in data.X],
        "names": list(data.names),
    }


def _irreg_from_dict(d: dict) -> IrregFunData:
    for i, x in enumerate(d["X"]):
        if any(v is None for v in x):
            raise ValidationError(f"Irregular curve {i} contains null values")
    return IrregFunData(
        argvals=tuple(d["argvals"]),
        X=tuple(d["X"]),
        names=d.get("names"),
    )


def fundata_to_dict(data: FunData) -> dict:
    """Convert a container to a JSON-serializable dict."""
    if isinstance(data, DenseFunData):
        return _dense_to_dict(data)
    if isinstance(data, IrregFunData):
        return _irreg_to_dict(data)
    if isinstance(data, MultiFunData):
        return {"kind": "multi", "elements": [_dense_to_dict(e) for e in data.elements]}
    raise ValidationError(f"Not a functional data object: {type(data).__name__}")


def fundata_from_dict(d: dict) -> FunData:
    """Reconstruct a container from parsed JSON.

    Raises:
        ValidationError: On an unknown kind or malformed content.
    """
    kind = d.get("kind")
    try:
        if kind == "dense":
            return _dense_from_dict(d)
        if kind == "irregular":
            return _irreg_from_dict(d)
        if kind == "multi":
            return MultiFunData(tuple(_dense_from_dict(e) for e in d["elements"]))
    except ValidationError:
        raise
    except (KeyError, TypeError, ValueError) as e:
        raise ValidationError(f"Malformed {kind} object: {e}") from e
    raise ValidationError(f"Unknown kind: {kind!r}")


def atomic_write_text(path: str | Path, text: str) -> None:
    """Write through a temporary file in the target directory, then rename."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as f:
            f.write(text)
        os.replace(tmp, path)
    except BaseException:
        Path(tmp).unlink(missing_ok=True)
        raise


def save_json(obj: dict, path: str | Path) -> None:
    atomic_write_text(path, json.dumps(obj, indent=2, ensure_ascii=False) + "\n")


def load_json(path: str | Path) -> dict:
    """Read a JSON file.

    Raises:
        FileNotFoundError: If the file does not exist.
        ValidationError: If the content is not valid JSON.
    """
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"File not found: {path}")
    with open(path, encoding="utf-8") as f:
        try:
            return json.load(f)
        except json.JSONDecodeError as e:
            raise ValidationError(f"{path}: invalid JSON ({e})") from e


def save_fundata(data: FunData, path: str | Path) -> None:
    save_json(fundata_to_dict(data), path)


def load_fundata(path: str | Path) -> FunData:
    return fundata_from_dict(load_json(path))


# ---------------------------------------------------------------------------
# Long format
# ---------------------------------------------------------------------------


def _arg_columns(d: int) -> list[str]:
    return [f"arg{k + 1}" for k in range(d)]


def _dense_long(data: DenseFunData, element: int, d_max: int) -> pd.DataFrame:
    grid = np.indices(data.X.shape).reshape(data.X.ndim, -1)
    values = data.X.reshape(-1)
    keep = ~np.isnan(values)
    frame: dict[str, Any] = {
        "obs": grid[0][keep] + 1,
        "element": np.full(int(keep.sum()), element),
    }
    for k, col in enumerate(_arg_columns(d_max)):
        if k < data.dim_supp:
            frame[col] = data.argvals[k][grid[k + 1][keep]]
        else:
            frame[col] = np.full(int(keep.sum()), np.nan)
    frame["value"] = values[keep]
    return pd.DataFrame(frame)


def to_long(data: FunData) -> pd.DataFrame:
    """Long table with one row per observed cell; missing cells are omitted."""
    if isinstance(data, DenseFunData):
        return _dense_long(data, 1, data.dim_supp)
    if isinstance(data, IrregFunData):
        counts = np.array(data.n_obs_points)
        return pd.DataFrame({
            "obs": np.repeat(np.arange(1, data.n_obs + 1), counts),
            "element": np.ones(int(counts.sum()), dtype=int),
            "arg1": np.concatenate(data.argvals),
            "value": np.concatenate(data.X),
        })
    if isinstance(data, MultiFunData):
        d_max = max(data.dim_supp)
        frames = [_dense_long(e, j + 1, d_max) for j, e in enumerate(data.elements)]
        return pd.concat(frames, ignore_index=True)
    raise ValidationError(f"Not a functional data object: {type(data).__name__}")


def _check_table(table: pd.DataFrame) -> list[str]:
    missing = {"obs", "element", "value"} - set(table.columns)
    if missing:
        raise ValidationError(f"Long table lacks columns: {sorted(missing)}")
    args = [c for c in table.columns if c.startswith("arg")]
    if args != _arg_columns(len(args)) or not args:
        raise ValidationError(f"Argument columns must be arg1..argD, got {args}")
    if table.empty:
        raise ValidationError("Long table has no rows")
    for column in ("obs", "element"):
        if not is_integer_dtype(table[column]):
            raise ValidationError(f"Column {column} must hold integers")
    for column in [*args, "value"]:
        if not is_numeric_dtype(table[column]) or is_bool_dtype(table[column]):
            raise ValidationError(f"Column {column} must be numeric")
    if table["value"].isna().any():
        raise ValidationError("Long table rows must not carry missing values")
    if table.duplicated(subset=["obs", "element", *args]).any():
        raise ValidationError("Duplicate (obs, element, coordinate) rows")
    if (table["obs"] < 1).any() or (table["element"] < 1).any():
        raise ValidationError("obs and element indices are 1-based")
    return args


def _element_args(rows: pd.DataFrame, args: list[str]) -> list[str]:
    used = [c for c in args if rows[c].notna().any()]
    if used != args[: len(used)] or rows[used].isna().any().any():
        raise ValidationError("Inconsistent coordinates within an element")
    return used


def _dense_from_rows(
    rows: pd.DataFrame,
    args: list[str],
    n: int,
    axes: list[Any] | None,
    fill: bool,
) -> DenseFunData:
    coords = rows[args].to_numpy(dtype=np.float64)
    grid_axes = []
    index = [rows["obs"].to_numpy(dtype=int) - 1]
    for k in range(len(args)):
        axis = np.unique(coords[:, k]) if axes is None else np.asarray(axes[k], dtype=np.float64)
        pos = np.clip(np.searchsorted(axis, coords[:, k]), 0, axis.size - 1)
        if not np.array_equal(axis[pos], coords[:, k]):
            raise ValidationError(f"Coordinates in {args[k]} do not lie on the given axis")
        grid_axes.append(axis)
        index.append(pos)
    X = np.full((n, *(a.size for a in grid_axes)), np.nan)
    X[tuple(index)] = rows["value"].to_numpy(dtype=np.float64)
    if not fill and np.isnan(X).any():
        raise ValidationError("Coordinates do not form a full grid (pass fill=True)")
    return DenseFunData(argvals=tuple(grid_axes), X=X)


def from_long(
    table: pd.DataFrame,
    kind: str = "dense",
    axes: list[Any] | None = None,
    fill: bool = False,
) -> FunData:
    """Rebuild a container from a long table.

    Args:
        table: Columns obs, element, arg1..argD, value.
        kind: "dense", "irregular" or "multi".
        axes: Optional grid axes for dense output (per dimension).
        fill: Allow incomplete grids, filling unobserved cells with NaN.

    Raises:
        ValidationError: On duplicate rows, missing values, or coordinates
            that do not form a grid when ``fill`` is False.
    """
    args = _check_table(table)
    n = int(table["obs"].max())
    elements = sorted(table["element"].unique())
    if kind == "multi":
        if elements != list(range(1, len(elements) + 1)):
            raise ValidationError(f"Element indices must be 1..p, got {elements}")
        out = []
        for j in elements:
            rows = table[table["element"] == j]
            out.append(_dense_from_rows(rows, _element_args(rows, args), n, None, fill))
        return MultiFunData(tuple(out))
    if elements != [1]:
        raise ValidationError(f"{kind} data holds a single element, got {elements}")
    used = _element_args(table, args)
    if kind == "dense":
        return _dense_from_rows(table, used, n, axes, fill)
    if kind == "irregular":
        if len(used) != 1:
            raise ValidationError("Irregular data lives on a one-dimensional domain")
        argvals, values = [], []
        for i in range(1, n + 1):
            rows = table[table["obs"] == i].sort_values("arg1", kind="stable")
            if rows.empty:
                raise ValidationError(f"Observation {i} has no rows")
            argvals.append(rows["arg1"].to_numpy(dtype=np.float64))
            values.append(rows["value"].to_numpy(dtype=np.float64))
        return IrregFunData(argvals=tuple(argvals), X=tuple(values))
    raise ValidationError(f"Unknown kind: {kind!r}")


def long_to_csv(table: pd.DataFrame) -> str:
    buf = io.StringIO()
    table.to_csv(buf, index=False, lineterminator="\n")
    return buf.getvalue()


def save_long_csv(table: pd.DataFrame, path: str | Path) -> None:
    atomic_write_text(path, long_to_csv(table))


def load_long_csv(path: str | Path) -> pd.DataFrame:
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"File not found: {path}")
    return pd.read_csv(path, float_precision="round_trip")
