"""Empirical engine: subsample draws, convex M-estimator fits, ensembles.

Square-loss problems route to a direct linear solve (ridge) or the
coordinate-descent kernel (lasso / elastic net); everything else runs a
monotone FISTA.  The CD kernel is compiled (Cython) when available, with a
pure-numpy fallback selected at import.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import EnsembleFitError, NoConvergenceError
from .models import Dataset
from .prox import (
    Lasso,
    LossSpec,
    NoPenalty,
    RegSpec,
    Ridge,
    Square,
    is_null_penalty,
    loss_grad,
    reg_levels,
)

try:
    from . import _cdfast as _cd

    CD_BACKEND = "cython"
except ImportError:  # pragma: no cover - build without the extension
    from . import _cd_py as _cd

    CD_BACKEND = "python"


# ---------------------------------------------------------------------------
# subsampling
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SubsampleSet:
    indices: np.ndarray
    k: int
    seed: int

    def __post_init__(self):
        object.__setattr__(self, "indices", np.asarray(self.indices, dtype=np.intp))


def draw_subsamples(n: int, sizes: Sequence[int], seed: int) -> list[SubsampleSet]:
    """Independent uniform without-replacement draws, deterministic per seed."""
    out = []
    for m, k in enumerate(sizes):
        if not 1 <= k <= n:
            raise ValueError(f"subsample size must lie in [1, n], got k={k}, n={n}")
        rng = np.random.default_rng(np.random.SeedSequence([seed, m]))
        idx = np.sort(rng.choice(n, size=k, replace=False))
        out.append(SubsampleSet(indices=idx, k=k, seed=seed))
    return out


# ---------------------------------------------------------------------------
# single fit
# ---------------------------------------------------------------------------

@dataclass
class FitOptions:
    tol: float = 1e-8
    max_iter: int = 100_000
    interpolator: bool = False
    homotopy_floor: float = 1e-8   # stop homotopy at lam = floor * lam_max


@dataclass
class FitResult:
    theta_hat: np.ndarray
    residuals: np.ndarray
    active_set: np.ndarray
    inlier_set: np.ndarray
    kkt_residual: float
    loss_grad_vec: np.ndarray
    iterations: int
    objective: float
    backend: str
    meta: dict = field(default_factory=dict)


def _objective(X, y, loss, reg, w):
    return float(np.sum(loss.value(y - X @ w)) + np.sum(reg.value(w)))


def kkt_residual(X, y, w, loss: LossSpec, reg: RegSpec) -> float:
    """Stationarity defect with subgradient selection on inactive lasso coords."""
    lam1, lam2 = reg_levels(reg)
    s = X.T @ loss_grad(loss, y - X @ w) - lam1 * w
    active = w != 0.0
    defect = np.where(
        active,
        np.abs(s - lam2 * np.sign(w)),
        np.maximum(np.abs(s) - lam2, 0.0),
    )
    return float(np.max(defect)) if defect.size else 0.0


def _opnorm2(X, iters: int = 20) -> float:
    """Power-method estimate of ||X||_op^2 (20 iterations, 5% headroom)."""
    p = X.shape[1]
    v = np.ones(p) / math.sqrt(p)
    for _ in range(iters):
        u = X.T @ (X @ v)
        nrm = np.linalg.norm(u)
        if nrm == 0.0:
            return 1.0
        v = u / nrm
    return 1.05 * float(v @ (X.T @ (X @ v)))


def _finish(X, y, w, loss, reg, iterations, backend, meta=None) -> FitResult:
    r = y - X @ w
    return FitResult(
        theta_hat=w,
        residuals=r,
        active_set=np.flatnonzero(w != 0.0),
        inlier_set=np.flatnonzero(loss.curvature(r) > 0.0),
        kkt_residual=kkt_residual(X, y, w, loss, reg),
        loss_grad_vec=loss_grad(loss, r),
        iterations=iterations,
        objective=_objective(X, y, loss, reg, w),
        backend=backend,
        meta=meta or {},
    )


def _ridge_direct(X, y, lam1: float, interpolator: bool):
    k, p = X.shape
    if lam1 > 0.0:
        if p <= k:
            w = np.linalg.solve(X.T @ X + lam1 * np.eye(p), X.T @ y)
        else:  # dual form, cheaper and stable when overparameterized
            w = X.T @ np.linalg.solve(X @ X.T + lam1 * np.eye(k), y)
        return w, "ridge-direct"
    if k < p and not interpolator:
        raise ValueError(
            "unpenalized fit with k < p is underdetermined; request interpolator mode"
        )
    w = np.linalg.lstsq(X, y, rcond=None)[0]  # min-norm when k < p
    return w, "lstsq"


def _cd_fit(X, y, lam1, lam2, w0, tol, max_passes):
    Xf = np.asfortranarray(X)
    col_sq = np.einsum("ij,ij->j", Xf, Xf)
    w = w0.copy()
    r = y - X @ w
    scale = float(np.max(col_sq) + lam1) or 1.0
    wtol = tol / scale
    total = 0
    chunk = 50
    while total < max_passes:
        used = _cd.cd_enet(Xf, lam1, lam2, w, r, col_sq, chunk, wtol)
        total += used
        kkt = _cd_kkt(Xf, r, w, lam1, lam2)
        if kkt < tol:
            return w, total, kkt
        if used < chunk:  # converged on wtol but not on KKT: tighten
            wtol = max(wtol / 16.0, 1e-18)
    return w, total, _cd_kkt(Xf, r, w, lam1, lam2)


def _cd_kkt(X, r, w, lam1, lam2):
    s = X.T @ r - lam1 * w
    defect = np.where(
        w != 0.0, np.abs(s - lam2 * np.sign(w)), np.maximum(np.abs(s) - lam2, 0.0)
    )
    return float(np.max(defect)) if defect.size else 0.0


def _fista(X, y, loss, reg, w0, tol, max_iter, trace=None):
    """Monotone FISTA: accepted iterates never increase the objective."""
    step = 1.0 / (loss.grad_lipschitz * _opnorm2(X))
    w = w0.copy()
    v = w.copy()
    t = 1.0
    fw = _objective(X, y, loss, reg, w)
    if trace is not None:
        trace.append(fw)
    kkt = math.inf
    stalled = 0
    for it in range(1, max_iter + 1):
        grad = -(X.T @ loss_grad(loss, y - X @ v))
        w_new = reg.prox(v - step * grad, step)
        f_new = _objective(X, y, loss, reg, w_new)
        if f_new > fw:  # restart momentum and step from w instead
            grad = -(X.T @ loss_grad(loss, y - X @ w))
            w_new = reg.prox(w - step * grad, step)
            f_new = _objective(X, y, loss, reg, w_new)
            t = 1.0
            if f_new > fw + 1e-12 * max(1.0, abs(fw)):
                step *= 0.5
                v = w.copy()
                continue
        t_new = 0.5 * (1.0 + math.sqrt(1.0 + 4.0 * t * t))
        v = w_new + ((t - 1.0) / t_new) * (w_new - w)
        rel_drop = abs(fw - f_new) / max(1.0, abs(f_new))
        stalled = stalled + 1 if rel_drop < 1e-12 else 0
        w, fw, t = w_new, f_new, t_new
        if trace is not None:
            trace.append(fw)
        if it % 10 == 0 or stalled >= 25:
            kkt = kkt_residual(X, y, w, loss, reg)
            if kkt < tol or stalled >= 25:
                return w, it, kkt
    kkt = kkt_residual(X, y, w, loss, reg)
    if kkt >= tol:
        raise NoConvergenceError(
            f"proximal gradient hit the iteration cap with KKT defect {kkt:.3e}",
            iterate=w,
            residual=kkt,
        )
    return w, max_iter, kkt


def _lasso_homotopy(X, y, lam1, opts):
    """lam_t = lam_max 2^-t with warm starts down to the interpolator scale."""
    lam_max = float(np.max(np.abs(X.T @ y)))
    if lam_max == 0.0:
        return np.zeros(X.shape[1]), 0, 0.0, 0.0
    lam = lam_max
    floor = opts.homotopy_floor * lam_max
    w = np.zeros(X.shape[1])
    total = 0
    while lam > floor:
        lam = max(lam / 2.0, floor)
        w, used, _ = _cd_fit(X, y, lam1, lam, w, max(opts.tol, 1e-10 * lam_max), 20_000)
        total += used
        if lam <= floor:
            break
    w, used, kkt = _cd_fit(X, y, lam1, floor, w, opts.tol * max(1.0, lam_max), 50_000)
    return w, total + used, kkt, floor


def fit(X, y, loss: LossSpec, reg: RegSpec, opts: FitOptions | None = None) -> FitResult:
    """Minimize sum_i loss(y_i - x_i'w) + sum_j reg(w_j)."""
    opts = opts or FitOptions()
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    k, p = X.shape
    lam1, lam2 = reg_levels(reg)

    if isinstance(loss, Square):
        if lam2 > 0.0:
            w, passes, kkt = _cd_fit(X, y, lam1, lam2, np.zeros(p), opts.tol, 200_000)
            if kkt >= opts.tol:
                raise NoConvergenceError(
                    f"coordinate descent hit the pass cap with KKT defect {kkt:.3e}",
                    iterate=w,
                    residual=kkt,
                )
            return _finish(X, y, w, loss, reg, passes, f"cd-{CD_BACKEND}")
        if isinstance(reg, Lasso) and opts.interpolator and k < p:
            w, it, kkt, lam_end = _lasso_homotopy(X, y, lam1, opts)
            return _finish(X, y, w, loss, reg, it, "homotopy", {"lam_end": lam_end})
        w, backend = _ridge_direct(X, y, lam1, opts.interpolator)
        return _finish(X, y, w, loss, reg, 1, backend)

    if is_null_penalty(reg) and k < p:
        raise ValueError(
            "unpenalized fit with k < p is underdetermined; interpolator mode "
            "is only supported for square loss"
        )
    w, it, kkt = _fista(X, y, loss, reg, np.zeros(p), opts.tol, opts.max_iter)
    return _finish(X, y, w, loss, reg, it, "fista")


def fit_interpolator(X, y, reg_kind: str, opts: FitOptions | None = None) -> FitResult:
    """Minimum-norm interpolator (lam -> 0+) for square loss, q in {1, 2}."""
    opts = opts or FitOptions()
    opts = FitOptions(
        tol=opts.tol,
        max_iter=opts.max_iter,
        interpolator=True,
        homotopy_floor=opts.homotopy_floor,
    )
    if reg_kind == "ridgeless":
        return fit(X, y, Square(), Ridge(0.0), opts)
    if reg_kind == "lassoless":
        X = np.asarray(X, dtype=float)
        y = np.asarray(y, dtype=float)
        if X.shape[0] >= X.shape[1]:
            return fit(X, y, Square(), NoPenalty(), opts)
        w, it, kkt, lam_end = _lasso_homotopy(X, y, 0.0, opts)
        return _finish(X, y, w, Square(), Lasso(0.0), it, "homotopy", {"lam_end": lam_end})
    raise ValueError(f"reg_kind must be 'ridgeless' or 'lassoless', got {reg_kind!r}")


# ---------------------------------------------------------------------------
# ensembles
# ---------------------------------------------------------------------------

@dataclass
class EnsembleFit:
    parts: list[tuple[SubsampleSet, FitResult]]
    theta_tilde: np.ndarray


def ensemble_fit(
    dataset: Dataset,
    components: Sequence[tuple[LossSpec, RegSpec, int]],
    seed: int,
    opts: FitOptions | None = None,
) -> EnsembleFit:
    """Fit every component on its own subsample and average the coefficients."""
    sets = draw_subsamples(dataset.n, [k for _, _, k in components], seed)
    parts = []
    failures = {}
    for m, ((loss, reg, _), ss) in enumerate(zip(components, sets)):
        try:
            res = fit(dataset.X[ss.indices], dataset.y[ss.indices], loss, reg, opts)
            parts.append((ss, res))
        except Exception as exc:  # noqa: BLE001 - aggregate and report below
            failures[m] = exc
    if failures:
        raise EnsembleFitError(failures)
    theta_tilde = np.mean([res.theta_hat for _, res in parts], axis=0)
    return EnsembleFit(parts=parts, theta_tilde=theta_tilde)


def empirical_risk(ensemble: EnsembleFit | np.ndarray, theta_star: np.ndarray) -> float:
    """Squared coefficient error per feature: ||theta_tilde - theta*||^2 / p."""
    theta = ensemble.theta_tilde if isinstance(ensemble, EnsembleFit) else ensemble
    theta = np.asarray(theta, dtype=float)
    if theta.shape != np.shape(theta_star):
        raise ValueError("estimator and signal dimensions differ")
    return float(np.sum((theta - theta_star) ** 2) / theta.size)
