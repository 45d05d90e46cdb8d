"""Closed-form degrees of freedom and residual degrees of freedom.

df is the trace sensitivity of the fitted values to the responses; tr[V] the
trace sensitivity of the loss gradient.  For square loss tr[V] = |I| - df;
for Huber with threshold rho the curvature on inliers is 1/rho, giving
tr[V] = (|T| - df) / rho (the unit-threshold case reduces to |T| - df).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .fitting import FitResult
from .prox import ElasticNet, Huber, Lasso, LossSpec, NoPenalty, RegSpec, Ridge, Square


@dataclass(frozen=True)
class DfReport:
    df: float
    tr_v: float
    formula_used: str

    def __post_init__(self):
        if self.df < -1e-9 or self.tr_v < -1e-9:
            raise ValueError(f"degrees of freedom must be non-negative: {self}")

    @property
    def kappa_hat(self) -> float:
        """Observable counterpart of the resolvent-trace limit: df / tr[V]."""
        return self.df / self.tr_v


def _resolvent_trace(G: np.ndarray, lam1: float) -> float:
    """tr[(G + lam1 I)^-1 G]; raises LinAlgError when the system is singular."""
    if G.shape[0] == 0:
        return 0.0
    return float(np.trace(np.linalg.solve(G + lam1 * np.eye(G.shape[0]), G)))


def compute_df(fit: FitResult, X_I: np.ndarray, loss: LossSpec, reg: RegSpec) -> DfReport:
    """Dispatch to the closed-form table row for (loss, penalty)."""
    size = X_I.shape[0]
    active = fit.active_set

    if isinstance(loss, Square):
        if isinstance(reg, (Ridge, NoPenalty)):
            lam1 = reg.lam1 if isinstance(reg, Ridge) else 0.0
            df = _resolvent_trace(X_I.T @ X_I, lam1)
            row = "square+ridge"
        elif isinstance(reg, Lasso):
            df = float(active.size)
            row = "square+lasso"
        elif isinstance(reg, ElasticNet):
            if reg.lam1 == 0.0:  # degenerates to the lasso row
                df = float(active.size)
                row = "square+lasso"
            else:
                Xs = X_I[:, active]
                df = _resolvent_trace(Xs.T @ Xs, reg.lam1)
                row = "square+elastic_net"
        else:
            raise NotImplementedError(f"no df formula for square loss with {reg!r}")
        return DfReport(df=df, tr_v=size - df, formula_used=row)

    if isinstance(loss, Huber):
        d = loss.curvature(fit.residuals)
        n_inlier = float(fit.inlier_set.size)
        if isinstance(reg, (Ridge, NoPenalty)):
            lam1 = reg.lam1 if isinstance(reg, Ridge) else 0.0
            df = _resolvent_trace(X_I.T @ (d[:, None] * X_I), lam1)
            row = "huber+ridge"
        elif isinstance(reg, Lasso):
            df = float(active.size)
            row = "huber+lasso"
        elif isinstance(reg, ElasticNet):
            if reg.lam1 == 0.0:
                df = float(active.size)
                row = "huber+lasso"
            else:
                Xs = X_I[:, active]
                df = _resolvent_trace(Xs.T @ (d[:, None] * Xs), reg.lam1)
                row = "huber+elastic_net"
        else:
            raise NotImplementedError(f"no df formula for Huber loss with {reg!r}")
        return DfReport(df=df, tr_v=(n_inlier - df) / loss.rho, formula_used=row)

    raise NotImplementedError(f"no df formulas for loss {loss!r}")
