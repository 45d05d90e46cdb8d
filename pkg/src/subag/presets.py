"""Figure-protocol presets: ready-made experiment configurations.

Each builder returns a plain config dict (the same tree the CLI reads from
YAML), so presets can be dumped, edited, and re-run.  Overrides are applied
as dotted-path assignments, e.g. override("replications", 5).
"""

from __future__ import annotations

from .config import ExperimentConfig, config_from_dict


def _effect_of_m() -> dict:
    # lasso ensembles near the interpolation peak: risk vs subsample size for
    # several ensemble sizes, theory against simulation
    return {
        "mode": "compare",
        "model": {
            "signal": {"kind": "two_point_sparse", "strength": 2.0, "support": 0.1},
            "noise": {"kind": "gaussian", "sigma": 1.0},
            "n": 2000,
            "p": 200,
        },
        "ensemble": {
            "loss": {"kind": "square"},
            "reg": {"kind": "lasso", "lam": 0.001},
            "c": [0.02, 0.05, 0.125, 0.25, 0.5, 1.0],
            "M": [1, 2, 5],
        },
        "replications": 50,
        "base_seed": 20240,
    }


def _optimal_subsample() -> dict:
    # full-ensemble lassoless risk over subsample ratios: the argmin lands in
    # the overparameterized regime
    return {
        "mode": "sweep",
        "model": {
            "signal": {"kind": "two_point_sparse", "strength": 2.0, "support": 0.01},
            "noise": {"kind": "gaussian", "sigma": 1.0},
            "delta": 10.0,
        },
        "ensemble": {
            "loss": {"kind": "square"},
            "reg": {"kind": "lasso", "lam": 0.0},
            "c": [0.02, 0.04, 0.06, 0.08, 0.095, 0.12, 0.15, 0.2, 0.3, 0.5, 0.8, 1.0],
            "M": [1, "inf"],
        },
        "base_seed": 0,
    }


def _lambda_vs_c_heatmap() -> dict:
    # full lasso-ensemble risk heatmap over regularization level and
    # subsample ratio
    return {
        "mode": "sweep",
        "model": {
            "signal": {"kind": "two_point_sparse", "strength": 0.5, "support": 0.2},
            "noise": {"kind": "gaussian", "sigma": 1.0},
            "delta": 10.0,
        },
        "ensemble": {
            "loss": {"kind": "square"},
            "reg": {"kind": "lasso", "lam": 1.0},
            "c": [0.02, 0.04, 0.08, 0.15, 0.3, 0.6, 1.0],
            "M": ["inf"],
        },
        "grids": {"lam": [0.01, 0.03, 0.1, 0.3, 1.0]},
        "base_seed": 0,
    }


def _huber_threshold_heatmap() -> dict:
    # l1-regularized Huber under heavy-tailed noise: risk over the Huber
    # threshold and the subsample ratio
    return {
        "mode": "sweep",
        "model": {
            "signal": {"kind": "gauss_point_mass", "eps": 0.1, "variance": 1.0},
            "noise": {"kind": "student_t", "dof": 2.0, "scale": 1.0},
            "delta": 10.0,
        },
        "ensemble": {
            "loss": {"kind": "huber", "rho": 1.0},
            "reg": {"kind": "lasso", "lam": 0.5},
            "c": [0.05, 0.1, 0.2, 0.4, 0.7],
            "M": ["inf"],
        },
        "grids": {"rho": [0.5, 1.0, 2.0, 5.0, 10.0]},
        "base_seed": 0,
    }


PRESETS = {
    "effect-of-M": _effect_of_m,
    "optimal-subsample": _optimal_subsample,
    "lambda-vs-c-heatmap": _lambda_vs_c_heatmap,
    "huber-threshold-heatmap": _huber_threshold_heatmap,
}


def _assign(tree: dict, dotted: str, value) -> None:
    parts = dotted.split(".")
    cur = tree
    for part in parts[:-1]:
        cur = cur.setdefault(part, {})
    cur[parts[-1]] = value


def preset_dict(name: str, overrides: dict | None = None) -> dict:
    if name not in PRESETS:
        raise KeyError(f"unknown preset {name!r}; available: {sorted(PRESETS)}")
    tree = PRESETS[name]()
    for dotted, value in (overrides or {}).items():
        _assign(tree, dotted, value)
    return tree


def make_preset(name: str, overrides: dict | None = None) -> ExperimentConfig:
    return config_from_dict(preset_dict(name, overrides))
