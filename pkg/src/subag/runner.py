"""Experiment orchestration: cells to CSV rows, manifest, worker pool."""

from __future__ import annotations

import json
import math
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np
import scipy

from . import __version__
from .config import ExperimentConfig, config_from_dict, validate
from .models import gen_data, save_dataset
from .sweep import Cell, cells_for, columns_for, compute_cell


def _fmt(value) -> str:
    """Deterministic cell formatting: shortest round-trip float repr."""
    if value is None:
        return ""
    if isinstance(value, str):
        return value
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    value = float(value)
    if math.isnan(value):
        return "nan"
    return repr(value)


def _cell_worker(payload: tuple[dict, Cell]) -> tuple[int, list[dict]]:
    config_dict, cell = payload
    config = config_from_dict(config_dict)
    return cell.index, compute_cell(config, cell)


def run(config: ExperimentConfig, out_dir, workers: int = 1) -> int:
    """Execute the experiment; write results.csv and manifest.json under out_dir.

    Returns 0 on success.  Per-cell solver failures are recorded in the
    status column and do not abort the run.
    """
    t0 = time.time()
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    diagnostics = validate(config)

    cells = cells_for(config)
    if workers > 1 and len(cells) > 1:
        config_dict = config.to_dict()
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = dict(pool.map(_cell_worker, [(config_dict, c) for c in cells]))
        rows_by_cell = [results[c.index] for c in cells]
    else:
        rows_by_cell = [compute_cell(config, c) for c in cells]

    columns = columns_for(config)
    rows = [row for cell_rows in rows_by_cell for row in cell_rows]
    csv_path = out_dir / "results.csv"
    with csv_path.open("w", newline="") as fh:
        fh.write(",".join(columns) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(row.get(col)) for col in columns) + "\n")

    manifest = {
        "config": config.to_dict(),
        "versions": {
            "subag": __version__,
            "numpy": np.__version__,
            "scipy": scipy.__version__,
            "python": sys.version.split()[0],
        },
        "diagnostics": diagnostics,
        "rows": len(rows),
        "wall_time_s": round(time.time() - t0, 3),
    }
    if config.mode == "sweep":
        manifest["argmin"] = _argmin_markers(rows)
    (out_dir / "manifest.json").write_text(json.dumps(manifest, indent=2, sort_keys=True))

    if config.dump_datasets and config.n and config.p:
        seed = int(
            np.random.SeedSequence([config.base_seed, 0, 0]).generate_state(
                1, dtype=np.uint64
            )[0]
        )
        ds = gen_data(config.n, config.p, config.signal, config.noise, seed)
        save_dataset(ds, out_dir / "dataset.bin")
    return 0


def _argmin_markers(rows: list[dict]) -> dict:
    """Per ensemble size, the grid point minimizing RM; ties go to the smallest c."""
    best: dict[str, dict] = {}
    for row in rows:
        rm = row.get("RM")
        if rm is None or row.get("status") != "ok":
            continue
        key = str(row["M"])
        cur = best.get(key)
        if (
            cur is None
            or rm < cur["RM"]
            or (rm == cur["RM"] and row["c"] < cur["c"])
        ):
            best[key] = {"c": row["c"], "lambda": row["lambda"], "RM": rm}
            if "rho" in row:
                best[key]["rho"] = row["rho"]
    return best
