"""Independent oracles shared by the test modules.

These deliberately avoid the package's solver paths: the ridge oracle
integrates the explicit Marchenko-Pastur density, the lasso oracle does a
dense residual-grid search with local refinement, and the Jacobian oracles
use central finite differences through complete refits.
"""

from __future__ import annotations

import numpy as np
from scipy.optimize import minimize
from scipy.stats import norm

from subag.fitting import FitOptions, fit
from subag.prox import loss_grad


# ---------------------------------------------------------------------------
# Marchenko-Pastur ridge-risk oracle
# ---------------------------------------------------------------------------

def mp_nodes(cdelta: float, nodes: int = 4000):
    """Spectral nodes/weights for S = X'X, X k x p with N(0, 1/p) entries, k/p = cdelta.

    S = MP(y)/y with y = p/k; the Chebyshev substitution absorbs the sqrt
    edge factors of the Marchenko-Pastur density.
    """
    y = 1.0 / cdelta
    a, b = (1 - np.sqrt(y)) ** 2, (1 + np.sqrt(y)) ** 2
    mid, hw = 0.5 * (a + b), 0.5 * (b - a)
    t = np.linspace(0.0, np.pi, nodes + 2)[1:-1]
    shat = mid + hw * np.cos(t)
    wts = (np.pi / (nodes + 1)) * hw * hw * np.sin(t) ** 2 / (2 * np.pi * y * shat)
    atom = max(0.0, 1.0 - 1.0 / y)
    return shat / y, wts, atom


def ridge_alpha2_mp(cdelta: float, lam1: float, r2: float, s2: float) -> float:
    """Asymptotic ridge excess risk: bias + variance from the MP law."""
    s, w, atom = mp_nodes(cdelta)
    bias = lam1 ** 2 * r2 * (atom / lam1 ** 2 + np.sum(w / (s + lam1) ** 2))
    var = s2 * np.sum(w * s / (s + lam1) ** 2)
    return float(bias + var)


def ridge_df_mp(cdelta: float, lam1: float) -> float:
    """Limiting df/p for ridge: int s/(s + lam1) d mu."""
    s, w, _ = mp_nodes(cdelta)
    return float(np.sum(w * s / (s + lam1)))


# ---------------------------------------------------------------------------
# brute-force (tau, a) oracle for lasso least squares with zero signal
# ---------------------------------------------------------------------------

def lasso_zero_signal_residuals(tau, a, cdelta, lam, sigma2):
    """Residuals of the two (tau, a) equations for Theta = 0 (closed Gaussians)."""
    s_mom = 2 * ((1 + a * a) * norm.cdf(-a) - a * norm.pdf(a))  # E soft(H; a)^2
    eq1 = (tau * tau / cdelta) * s_mom + sigma2 - tau * tau
    eq2 = a * tau * (1 - (2.0 / cdelta) * norm.cdf(-a)) - lam / np.sqrt(cdelta)
    return eq1, eq2


def lasso_zero_signal_brute(cdelta, lam, sigma2):
    """Dense grid over (tau, a) plus Nelder-Mead refinement of the residuals."""
    taus = np.linspace(np.sqrt(sigma2) * 1.0001, np.sqrt(sigma2) * 4, 220)
    avals = np.linspace(1e-3, 4.0, 220)
    best, arg = np.inf, None
    for t in taus:
        for a in avals:
            e1, e2 = lasso_zero_signal_residuals(t, a, cdelta, lam, sigma2)
            v = e1 * e1 + e2 * e2
            if v < best:
                best, arg = v, (t, a)

    def obj(x):
        e1, e2 = lasso_zero_signal_residuals(x[0], x[1], cdelta, lam, sigma2)
        return e1 * e1 + e2 * e2

    res = minimize(obj, arg, method="Nelder-Mead", options={"xatol": 1e-12, "fatol": 1e-24})
    return res.x[0], res.x[1]


# ---------------------------------------------------------------------------
# finite-difference Jacobian traces (df and tr[V] oracles)
# ---------------------------------------------------------------------------

def fd_df(X, y, loss, reg, h: float = 1e-5) -> float:
    """Central-difference trace of d(X theta_hat)/dy."""
    opts = FitOptions(tol=1e-12)
    total = 0.0
    for i in range(len(y)):
        yp, ym = y.copy(), y.copy()
        yp[i] += h
        ym[i] -= h
        fp = fit(X, yp, loss, reg, opts).theta_hat
        fm = fit(X, ym, loss, reg, opts).theta_hat
        total += float(X[i] @ (fp - fm)) / (2 * h)
    return total


def fd_trv(X, y, loss, reg, h: float = 1e-5) -> float:
    """Central-difference trace of d loss'(y - X theta_hat)/dy."""
    opts = FitOptions(tol=1e-12)
    total = 0.0
    for i in range(len(y)):
        yp, ym = y.copy(), y.copy()
        yp[i] += h
        ym[i] -= h
        pp = loss_grad(loss, yp - X @ fit(X, yp, loss, reg, opts).theta_hat)
        pm = loss_grad(loss, ym - X @ fit(X, ym, loss, reg, opts).theta_hat)
        total += float(pp[i] - pm[i]) / (2 * h)
    return total


# ---------------------------------------------------------------------------
# generic second-order convex-optimizer oracle for fits
# ---------------------------------------------------------------------------

def scipy_fit_oracle(X, y, loss, reg, x0=None):
    """High-accuracy L-BFGS solve of the (smooth) fitting objective."""
    from subag.prox import reg_levels

    lam1, lam2 = reg_levels(reg)
    if lam2 != 0.0:
        raise ValueError("oracle supports smooth penalties only")

    def f(w):
        r = y - X @ w
        val = float(np.sum(loss.value(r))) + 0.5 * lam1 * float(w @ w)
        grad = -(X.T @ loss_grad(loss, r)) + lam1 * w
        return val, grad

    w0 = np.zeros(X.shape[1]) if x0 is None else x0
    res = minimize(f, w0, jac=True, method="L-BFGS-B",
                   options={"ftol": 1e-16, "gtol": 1e-12, "maxiter": 50_000})
    return res.x
