#!/usr/bin/env python3
"""Run a small simulate -> transform -> MFPCA chain through the CLI.

Usage:
    # Two elements cut from one Fourier system on [0, 1], N = 200:
    python scripts/run_pipeline.py

    # Shapes of a named preset from configs/defaults.json:
    python scripts/run_pipeline.py --preset weather_like
    python scripts/run_pipeline.py --preset cd4_like

Outputs go to data/pipeline/<name>/.
"""

import argparse
import json
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from fda_engine.cli import run
from fda_engine.config import get_preset

OUTPUT_ROOT = Path(__file__).resolve().parents[1] / "data" / "pipeline"
SEED = 1


def _step(argv: list[str]) -> None:
    print(f"fda {' '.join(argv)}")
    status = run(argv)
    if status != 0:
        print(f"  failed with exit code {status}")
        sys.exit(status)


def _mfpca_chain(out: Path, grids: list[str], n_obs: int, noise: str) -> None:
    sim = out / "sim.json"
    truth = out / "truth.json"
    noisy = out / "noisy.json"
    expansions = out / "expansions.json"
    fit = out / "fit.json"

    elements = []
    for grid in grids:
        elements += ["--element", f"grid={grid}"]
    _step([
        "simulate", "--construction", "split", "--kind", "fourier", "--m", "5", *elements,
        "--decay", "linear", "--n", str(n_obs), "--seed", str(SEED),
        "--out", str(sim), "--truth", str(truth),
    ])
    _step(["transform", "--in", str(sim), "--noise", noise, "--seed", str(SEED),
           "--out", str(noisy)])

    expansions.write_text(
        json.dumps([{"type": "fpca", "npc": 5}] * len(grids)) + "\n", encoding="utf-8"
    )
    _step(["mfpca", "--in", str(noisy), "--expansions", str(expansions), "--m", "5",
           "--weights", "auto", "--fit", "--out", str(fit)])
    _step(["info", "--in", str(fit)])
    _step(["plotdata", "--in", str(fit), "--out", str(out / "functions.csv")])

    true_values = json.loads(truth.read_text(encoding="utf-8"))["trueVals"]
    print(f"\nTrue eigenvalues: {true_values}")


def _sparse_chain(out: Path, preset: dict) -> None:
    sim = out / "sim.json"
    sparse = out / "sparse.json"
    irregular = out / "irregular.json"

    _step([
        "simulate", "--kind", "wiener", "--m", "5", f"--grid={preset['grid']}",
        "--decay", "wiener", "--n", str(preset["n_obs"]), "--seed", str(SEED),
        "--out", str(sim),
    ])
    _step([
        "transform", "--in", str(sim), "--noise", "0.1",
        "--sparsify", f"{preset['min_obs']}:{preset['max_obs']}",
        "--seed", str(SEED), "--out", str(sparse),
    ])
    _step(["convert", "--in", str(sparse), "--to", "irregular", "--out", str(irregular)])
    _step(["info", "--in", str(irregular)])
    _step(["plotdata", "--in", str(irregular), "--out", str(out / "curves.csv")])


def main():
    parser = argparse.ArgumentParser(description="FDA Engine demo pipeline")
    parser.add_argument("--preset", choices=["weather_like", "cd4_like"],
                        help="Data shapes from configs/defaults.json")
    args = parser.parse_args()

    out = OUTPUT_ROOT / (args.preset or "split")
    out.mkdir(parents=True, exist_ok=True)

    if args.preset is None:
        _mfpca_chain(out, ["0:1:101", "0:1:101"], 200, "0.05")
    elif args.preset == "weather_like":
        preset = get_preset(args.preset)
        _mfpca_chain(out, preset["grids"], preset["n_obs"], "0.05,0.05")
    else:
        _sparse_chain(out, get_preset(args.preset))

    print(f"Done! Outputs in {out}")


if __name__ == "__main__":
    main()
