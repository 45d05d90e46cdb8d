"""Data-driven risk estimation from residuals, loss gradients, df and tr[V].

The component estimator for subsamples I, I~ is

    (1/n) sum_i (r_i + 1{i in I} (df/trV) l'(r_i)) (r~_i + 1{i in I~} (df~/trV~) l~'(r~_i))

with residuals r_i = y_i - x_i' theta_hat computed on the full sample (the
indicator only gates the correction term).  The ensemble estimator averages
all M^2 ordered pairs, which equals ||mean corrected residual||^2 / n.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .dof import DfReport, compute_df
from .errors import DegenerateCorrectionError
from .fitting import EnsembleFit
from .models import Dataset
from .prox import LossSpec, RegSpec, loss_grad

_TRV_FLOOR = 1e-8  # tr[V] below floor * |I| counts as an interpolating fit


@dataclass(frozen=True)
class EstReport:
    value: float
    guarantee: str  # "proved" for strongly convex penalties, else "empirical"


def _corrected_residual(X, y, theta, indices, loss, df, tr_v):
    if tr_v < _TRV_FLOOR * len(indices):
        raise DegenerateCorrectionError(
            f"tr[V] = {tr_v:.3e} vanishes on a subsample of size {len(indices)}"
        )
    r = y - X @ theta
    out = r.copy()
    out[indices] += (df / tr_v) * loss_grad(loss, r[indices])
    return out


def est_component(
    X: np.ndarray,
    y: np.ndarray,
    theta_a: np.ndarray,
    idx_a: np.ndarray,
    loss_a: LossSpec,
    df_a: float,
    trv_a: float,
    theta_b: np.ndarray,
    idx_b: np.ndarray,
    loss_b: LossSpec,
    df_b: float,
    trv_b: float,
) -> float:
    """Pair term of the risk estimator for two (possibly identical) fits."""
    ta = _corrected_residual(X, y, theta_a, idx_a, loss_a, df_a, trv_a)
    tb = _corrected_residual(X, y, theta_b, idx_b, loss_b, df_b, trv_b)
    return float(ta @ tb) / len(y)


def est_ensemble(
    dataset: Dataset,
    ensemble: EnsembleFit,
    specs: Sequence[tuple[LossSpec, RegSpec]],
    df_reports: Sequence[DfReport] | None = None,
) -> EstReport:
    """Average of all M^2 pair terms (including m = l).

    Uses the algebraic identity EST = ||(1/M) sum_m t_m||^2 / n where t_m is
    the corrected residual vector of component m.
    """
    if len(specs) != len(ensemble.parts):
        raise ValueError("one (loss, reg) spec is required per ensemble component")
    if df_reports is None:
        df_reports = [
            compute_df(res, dataset.X[ss.indices], loss, reg)
            for (ss, res), (loss, reg) in zip(ensemble.parts, specs)
        ]
    terms = [
        _corrected_residual(
            dataset.X, dataset.y, res.theta_hat, ss.indices, loss, rep.df, rep.tr_v
        )
        for (ss, res), (loss, _), rep in zip(ensemble.parts, specs, df_reports)
    ]
    mean_term = np.mean(terms, axis=0)
    value = float(mean_term @ mean_term) / dataset.n
    guarantee = "proved" if all(reg.strongly_convex for _, reg in specs) else "empirical"
    return EstReport(value=value, guarantee=guarantee)
