"""Batch command-line front end.

Usage:
    fda simulate --kind fourier --m 10 --decay linear --n 8 --grid 0:1:101 --seed 1 \\
        --out sim.json --truth truth.json
    fda transform --in sim.json --sparsify 5:10 --seed 1 --out sparse.json
    fda info --in sparse.json
    fda convert --in sparse.json --to long --out sparse.csv
    fda integrate --in sim.json --rule trapezoidal
    fda norm --in sim.json --squared
    fda mfpca --in multi.json --expansions expansions.json --m 5 --weights auto --out fit.json
    fda plotdata --in fit.json --out functions.csv

Exit codes: 0 success, 1 usage error (E_USAGE), 2 input or validation error
(E_INPUT), 3 numeric failure (E_NUMERIC). Errors go to stderr as one line
prefixed with the code. Values that start with "-" need the --flag=value form.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from collections.abc import Sequence
from pathlib import Path
from typing import Any

import numpy as np
import pandas as pd

from fda_engine.config import configure_logging
from fda_engine.core.coercion import dense_to_irreg, dense_to_multi, irreg_to_dense
from fda_engine.core.models import DenseFunData, FunData, IrregFunData, MultiFunData
from fda_engine.core.serializer import (
    fundata_from_dict,
    fundata_to_dict,
    from_long,
    load_json,
    load_long_csv,
    save_json,
    save_long_csv,
    to_long,
)
from fda_engine.errors import FunDataError, ValidationError
from fda_engine.expansions.specs import parse_expansion_specs
from fda_engine.mfpca.estimator import mfpca
from fda_engine.mfpca.models import MFPCAFit
from fda_engine.mfpca.summaries import summarize
from fda_engine.ops.arith import arith, elementwise_map, mean_function
from fda_engine.ops.products import norm
from fda_engine.ops.quadrature import IrregIntegrationPolicy, QuadRule, integrate
from fda_engine.sim.basis import BasisKind, DecayKind
from fda_engine.sim.simulate import Construction, sim_fundata, sim_multifundata
from fda_engine.sim.transform import add_error, sparsify

logger = logging.getLogger(__name__)

_EXIT_CODES = {"E_USAGE": 1, "E_INPUT": 2, "E_NUMERIC": 3}


class UsageError(FunDataError):
    """Malformed command line."""

    code = "E_USAGE"


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # type: ignore[override]
        raise UsageError(message)


# ---------------------------------------------------------------------------
# Flag parsing helpers
# ---------------------------------------------------------------------------


def parse_grid(text: str) -> np.ndarray:
    """'a:b:n' -> n equispaced points from a to b inclusive."""
    parts = text.split(":")
    try:
        a, b, n = float(parts[0]), float(parts[1]), int(parts[2])
    except (IndexError, ValueError) as e:
        raise UsageError(f"Grid must look like a:b:n, got {text!r}") from e
    if len(parts) != 3 or n < 2 or not b > a:
        raise UsageError(f"Grid must look like a:b:n with b > a and n >= 2, got {text!r}")
    return np.linspace(a, b, n)


def _split_list(text: str) -> list[str]:
    return [item.strip() for item in text.split(",") if item.strip()]


def _floats(text: str, what: str) -> list[float]:
    try:
        return [float(x) for x in _split_list(text)]
    except ValueError as e:
        raise UsageError(f"{what} must be comma-separated numbers, got {text!r}") from e


def _ints(text: str, what: str) -> list[int]:
    try:
        return [int(x) for x in _split_list(text)]
    except ValueError as e:
        raise UsageError(f"{what} must be comma-separated integers, got {text!r}") from e


def _bounds(text: str) -> list[tuple[int, int]]:
    out = []
    for item in _split_list(text):
        lo, _, hi = item.partition(":")
        try:
            out.append((int(lo), int(hi)))
        except ValueError as e:
            raise UsageError(f"Sparsify bounds must look like lo:hi, got {item!r}") from e
    return out


def _interval(text: str) -> tuple[float, float]:
    lo, _, hi = text.partition(":")
    try:
        return float(lo), float(hi)
    except ValueError as e:
        raise UsageError(f"Domain must look like a:b, got {text!r}") from e


def _element_spec(text: str) -> dict[str, str]:
    """'kinds=fourier,wiener;m=4,3;grid=0:1:51,-1:1:41' -> mapping."""
    spec = {}
    for part in text.split(";"):
        key, sep, value = part.partition("=")
        if not sep or key.strip() not in {"kinds", "m", "grid"}:
            raise UsageError(f"Element spec entries are kinds=, m= and grid=, got {part!r}")
        spec[key.strip()] = value.strip()
    if "grid" not in spec:
        raise UsageError(f"Element spec needs grid=, got {text!r}")
    return spec


def _choice(value: str, enum: Any, what: str) -> Any:
    try:
        return enum(value)
    except ValueError as e:
        choices = ", ".join(m.value for m in enum)
        raise UsageError(f"Unknown {what} {value!r} (choose from {choices})") from e


# ---------------------------------------------------------------------------
# File helpers
# ---------------------------------------------------------------------------


def _load_document(path: str) -> dict:
    doc = load_json(path)
    if not isinstance(doc, dict):
        raise ValidationError(f"{path}: expected a JSON object")
    return doc


def load_input(path: str, kind: str = "dense", fill: bool = False) -> FunData | MFPCAFit:
    """Read a container (JSON or long CSV), a simulation result or an MFPCA fit."""
    if Path(path).suffix.lower() == ".csv":
        return from_long(load_long_csv(path), kind=kind, fill=fill)
    doc = _load_document(path)
    if "meanFunction" in doc:
        return MFPCAFit.from_dict(doc)
    if "data" in doc and "kind" not in doc:
        return fundata_from_dict(doc["data"])
    return fundata_from_dict(doc)


def _load_fundata(path: str, kind: str = "dense", fill: bool = False) -> FunData:
    obj = load_input(path, kind, fill)
    if isinstance(obj, MFPCAFit):
        raise ValidationError(f"{path}: expected functional data, found an MFPCA fit")
    return obj


def _print_values(values: np.ndarray) -> None:
    for v in values:
        print(repr(float(v)))


def _side_file(out: Path, suffix: str) -> Path:
    return out.with_name(f"{out.stem}_{suffix}{out.suffix or '.csv'}")


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------


def cmd_simulate(args: argparse.Namespace) -> int:
    decay = _choice(args.decay, DecayKind, "decay")
    if args.construction is None:
        if not args.kind or not args.m or not args.grid:
            raise UsageError("Univariate simulation needs --kind, --m and --grid")
        kinds = [_choice(k, BasisKind, "basis kind") for k in _split_list(args.kind)]
        grids = [parse_grid(g) for g in _split_list(args.grid)]
        result = sim_fundata(grids, _ints(args.m, "--m"), kinds, decay, args.n, args.seed)
    else:
        construction = _choice(args.construction, Construction, "construction")
        if not args.element:
            raise UsageError("Multivariate simulation needs one --element per element")
        elements = [_element_spec(e) for e in args.element]
        if construction == Construction.SPLIT:
            if not args.kind or not args.m:
                raise UsageError("Split simulation needs a shared --kind and --m")
            grids = [[parse_grid(e["grid"])] for e in elements]
            kind = _choice(args.kind, BasisKind, "basis kind")
            result = sim_multifundata(
                construction, grids, _ints(args.m, "--m")[0], kind, decay, args.n, args.seed
            )
        else:
            grids = [[parse_grid(g) for g in _split_list(e["grid"])] for e in elements]
            ms = [_ints(e.get("m", ""), "m=") for e in elements]
            kinds = [
                [_choice(k, BasisKind, "basis kind") for k in _split_list(e.get("kinds", ""))]
                for e in elements
            ]
            result = sim_multifundata(construction, grids, ms, kinds, decay, args.n, args.seed)
    save_json(fundata_to_dict(result.data), args.out)
    if args.truth:
        truth = result.to_dict()
        del truth["data"]
        save_json(truth, args.truth)
    logger.info("simulate: wrote %s", args.out)
    return 0


def cmd_transform(args: argparse.Namespace) -> int:
    data = _load_fundata(args.input)
    if (args.noise or args.sparsify) and args.seed is None:
        raise UsageError("--noise and --sparsify need --seed")
    if args.demean:
        data = arith("-", data, mean_function(data))
    if args.affine:
        scale, shift = (_floats(args.affine, "--affine") + [0.0])[:2]
        data = arith("+", arith("*", data, scale), shift)
    if args.log:
        data = elementwise_map(data, np.log)
    if args.noise:
        sds = _floats(args.noise, "--noise")
        data = add_error(data, sds if len(sds) > 1 else sds[0], args.seed)
    if args.sparsify:
        bounds = _bounds(args.sparsify)
        if isinstance(data, MultiFunData):
            lows, highs = [b[0] for b in bounds], [b[1] for b in bounds]
            if len(bounds) == 1:
                lows, highs = lows[0], highs[0]
            data = sparsify(data, lows, highs, args.seed + 1)
        elif isinstance(data, DenseFunData):
            data = sparsify(data, bounds[0][0], bounds[0][1], args.seed + 1)
        else:
            raise ValidationError("--sparsify needs dense or multivariate data")
    save_json(fundata_to_dict(data), args.out)
    return 0


def cmd_info(args: argparse.Namespace) -> int:
    obj = load_input(args.input, args.kind, args.fill)
    if isinstance(obj, MFPCAFit):
        summary = summarize(obj)
        summary["components"] = summary["components"].to_dict(orient="records")
        info: dict[str, Any] = {"kind": "mfpca", **summary}
    else:
        info = obj.describe()
        if isinstance(obj, IrregFunData) and obj.dropped:
            info["dropped"] = list(obj.dropped)
    print(json.dumps(info, indent=2))
    return 0


def _coerce(data: FunData, to: str) -> FunData:
    if to == data.kind:
        return data
    if to == "irregular" and isinstance(data, DenseFunData):
        return dense_to_irreg(data)
    if to == "dense" and isinstance(data, IrregFunData):
        return irreg_to_dense(data)
    if to == "multi" and isinstance(data, DenseFunData):
        return dense_to_multi(data)
    raise ValidationError(f"Cannot convert {data.kind} data to {to}")


def cmd_convert(args: argparse.Namespace) -> int:
    data = _load_fundata(args.input, args.kind, args.fill)
    if args.to == "long":
        save_long_csv(to_long(data), args.out)
    else:
        save_json(fundata_to_dict(_coerce(data, args.to)), args.out)
    return 0


def _policy(args: argparse.Namespace) -> IrregIntegrationPolicy | None:
    if args.domain is None:
        return None
    return IrregIntegrationPolicy.extrapolate_full_domain(*_interval(args.domain))


def cmd_integrate(args: argparse.Namespace) -> int:
    data = _load_fundata(args.input, args.kind, args.fill)
    _print_values(integrate(data, args.rule, _policy(args)))
    return 0


def cmd_norm(args: argparse.Namespace) -> int:
    data = _load_fundata(args.input, args.kind, args.fill)
    weights = _floats(args.weights, "--weights") if args.weights else None
    _print_values(norm(data, args.squared, weights, args.rule, _policy(args)))
    return 0


def cmd_mfpca(args: argparse.Namespace) -> int:
    data = _load_fundata(args.input)
    if isinstance(data, DenseFunData):
        data = dense_to_multi(data)
    if not isinstance(data, MultiFunData):
        raise ValidationError("MFPCA needs dense or multivariate data")
    if args.bootstrap is not None and args.seed is None:
        raise UsageError("--bootstrap needs --seed")
    raw_specs = load_json(args.expansions)
    specs = parse_expansion_specs(raw_specs, base_dir=Path(args.expansions).parent)
    weights: Any = None
    if args.weights == "auto":
        weights = "auto"
    elif args.weights:
        weights = _floats(args.weights, "--weights")
    fit = mfpca(
        data, args.m, specs, weights=weights, fit=args.fit, rule=args.rule,
        bootstrap=args.bootstrap, alpha=args.alpha, seed=args.seed,
    )
    save_json(fit.to_dict(), args.out)
    return 0


def cmd_plotdata(args: argparse.Namespace) -> int:
    obj = load_input(args.input, args.kind, args.fill)
    out = Path(args.out)
    if not isinstance(obj, MFPCAFit):
        save_long_csv(to_long(obj), out)
        return 0
    # obs 1 is the mean, obs m + 1 is psi_m; component repeats that as 0..M
    functions = to_long(obj.functions)
    functions["obs"] += 1
    table = pd.concat([to_long(obj.mean_function), functions], ignore_index=True)
    table.insert(0, "component", table["obs"] - 1)
    save_long_csv(table, out)
    scores = pd.DataFrame(obj.scores, columns=[f"score{m + 1}" for m in range(obj.n_components)])
    scores.insert(0, "label", list(obj.names or ()))
    scores.insert(0, "obs", np.arange(1, obj.n_obs + 1))
    save_long_csv(scores, _side_file(out, "scores"))
    return 0


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--verbose", action="store_true", help="Log at DEBUG level")

    readers = _Parser(add_help=False)
    readers.add_argument("--in", dest="input", required=True, help="Input JSON or long CSV")
    readers.add_argument("--kind", default="dense", choices=["dense", "irregular", "multi"],
                         help="Container kind when reading long CSV")
    readers.add_argument("--fill", action="store_true",
                         help="Allow incomplete grids when reading long CSV")

    quad = _Parser(add_help=False)
    quad.add_argument("--rule", default=None, choices=[r.value for r in QuadRule],
                      help="Quadrature rule (default from config)")

    parser = _Parser(prog="fda", description="Functional data simulation and MFPCA",
                     parents=[common])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("simulate", parents=[common], help="Simulate KL data")
    p.add_argument("--kind", help="Basis kind(s), one per dimension")
    p.add_argument("--m", help="Number of eigenfunctions, one per dimension")
    p.add_argument("--grid", help="Grid(s) a:b:n, one per dimension")
    p.add_argument("--construction", choices=[c.value for c in Construction])
    p.add_argument("--element", action="append",
                   help="Element spec 'kinds=..;m=..;grid=..' (repeat per element)")
    p.add_argument("--decay", required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--truth", help="Write true eigenvalues and eigenfunctions here")
    p.set_defaults(handler=cmd_simulate)

    p = sub.add_parser("transform", parents=[common], help="Demean, map, add noise, sparsify")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--demean", action="store_true")
    p.add_argument("--affine", help="a,b: x -> a * x + b")
    p.add_argument("--log", action="store_true")
    p.add_argument("--noise", help="Noise sd (one per element for multivariate data)")
    p.add_argument("--sparsify", help="lo:hi kept cells per curve (one per element)")
    p.add_argument("--seed", type=int)
    p.set_defaults(handler=cmd_transform)

    p = sub.add_parser("info", parents=[common, readers], help="Print a summary")
    p.set_defaults(handler=cmd_info)

    p = sub.add_parser("convert", parents=[common, readers], help="Coerce or export to long CSV")
    p.add_argument("--to", required=True, choices=["dense", "irregular", "multi", "long"])
    p.add_argument("--out", required=True)
    p.set_defaults(handler=cmd_convert)

    p = sub.add_parser("integrate", parents=[common, readers, quad], help="Integrate curves")
    p.add_argument("--domain", help="a:b full domain for irregular data")
    p.set_defaults(handler=cmd_integrate)

    p = sub.add_parser("norm", parents=[common, readers, quad], help="L2 norms")
    p.add_argument("--squared", action="store_true")
    p.add_argument("--weights", help="w1,w2,... for multivariate data")
    p.add_argument("--domain", help="a:b full domain for irregular data")
    p.set_defaults(handler=cmd_norm)

    p = sub.add_parser("mfpca", parents=[common, quad], help="Fit MFPCA")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--expansions", required=True, help="JSON array of expansion specs")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--weights", help="auto or w1,w2,...")
    p.add_argument("--fit", action="store_true", help="Store reconstructions")
    p.add_argument("--bootstrap", type=int, help="Number of bootstrap replicates")
    p.add_argument("--alpha", type=float)
    p.add_argument("--seed", type=int)
    p.add_argument("--out", required=True)
    p.set_defaults(handler=cmd_mfpca)

    p = sub.add_parser("plotdata", parents=[common, readers], help="Export plot-ready long CSV")
    p.add_argument("--out", required=True)
    p.set_defaults(handler=cmd_plotdata)
    return parser


def _one_line(message: object) -> str:
    return " ".join(str(message).split())


def run(argv: Sequence[str] | None = None) -> int:
    """Parse ``argv``, run one command and return the exit status."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        configure_logging(args.verbose)
        return int(args.handler(args))
    except SystemExit as e:  # --help
        return int(e.code or 0)
    except FunDataError as e:
        print(f"{e.code}: {_one_line(e)}", file=sys.stderr)
        return _EXIT_CODES[e.code]
    except (FileNotFoundError, pd.errors.ParserError, pd.errors.EmptyDataError) as e:
        print(f"E_INPUT: {_one_line(e)}", file=sys.stderr)
        return _EXIT_CODES["E_INPUT"]


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
