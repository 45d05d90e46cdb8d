"""Closed-form Gaussian smoothing of the piecewise-linear proximal maps.

Every supported loss and penalty has a proximal map that is piecewise linear
in x with at most two symmetric breakpoints.  For x = u + s W with W
standard normal, the moments the scalar systems need (squared prox error,
prox error times W, mean prox derivative, squared envelope gradient,
envelope gradient times W) therefore reduce to truncated Gaussian moments
and are evaluated exactly here.  This keeps the remaining outer integrands
smooth, so the node-count convergence of the outer quadrature is spectral
even for lasso (discontinuous prox') and Huber (kinked envelope gradient).
"""

from __future__ import annotations

import numpy as np
from scipy.special import ndtr

from .prox import ElasticNet, Huber, Lasso, NoPenalty, Ridge, Square

_INV_SQRT_2PI = 1.0 / np.sqrt(2.0 * np.pi)


def _phi(x):
    return _INV_SQRT_2PI * np.exp(-0.5 * np.square(x))


def prox_pieces(spec, t: float) -> list[tuple[float, float, float, float]]:
    """Pieces (lo, hi, a, b) with prox_spec(x; t) = a + b x for x in [lo, hi)."""
    if isinstance(spec, Square):
        return [(-np.inf, np.inf, 0.0, 1.0 / (1.0 + t))]
    if isinstance(spec, Huber):
        edge = spec.rho + t
        slope = spec.rho / edge
        return [(-np.inf, -edge, t, 1.0), (-edge, edge, 0.0, slope), (edge, np.inf, -t, 1.0)]
    if isinstance(spec, Ridge):
        return [(-np.inf, np.inf, 0.0, 1.0 / (1.0 + spec.lam1 * t))]
    if isinstance(spec, Lasso):
        thr = spec.lam2 * t
        if thr == 0.0:
            return [(-np.inf, np.inf, 0.0, 1.0)]
        return [(-np.inf, -thr, thr, 1.0), (-thr, thr, 0.0, 0.0), (thr, np.inf, -thr, 1.0)]
    if isinstance(spec, ElasticNet):
        thr = spec.lam2 * t
        shrink = 1.0 / (1.0 + spec.lam1 * t)
        if thr == 0.0:
            return [(-np.inf, np.inf, 0.0, shrink)]
        return [
            (-np.inf, -thr, thr * shrink, shrink),
            (-thr, thr, 0.0, 0.0),
            (thr, np.inf, -thr * shrink, shrink),
        ]
    if isinstance(spec, NoPenalty):
        return [(-np.inf, np.inf, 0.0, 1.0)]
    raise TypeError(f"no piecewise-linear prox for {spec!r}")


def _piece_moments(lo, hi, u, s):
    """Truncated standard-normal moments over {lo < u + s W < hi}.

    Returns (M0, M1, M2) = E[W^k ; A < W < B] for k = 0, 1, 2.
    """
    A = (lo - u) / s
    B = (hi - u) / s
    pA, pB = _phi(A), _phi(B)
    m0 = ndtr(B) - ndtr(A)
    m1 = pA - pB
    # phi vanishes at infinite bounds; zero the bound first to avoid inf * 0
    m2 = m0 + np.where(np.isfinite(A), A, 0.0) * pA - np.where(np.isfinite(B), B, 0.0) * pB
    return m0, m1, m2


def _affine_moments(spec, t, u, s, c0_of, c1_of):
    """Sum over pieces of E[(c0 + c1 W)^2], E[(c0 + c1 W) W], E[b] restricted.

    c0_of(a, b, u) and c1_of(b) give the affine representation on each piece
    of the function being integrated.  Returns (sq, cross, mean_slope).
    """
    u = np.asarray(u, dtype=float)
    sq = np.zeros_like(u)
    cross = np.zeros_like(u)
    mean_slope = np.zeros_like(u)
    for lo, hi, a, b in prox_pieces(spec, t):
        m0, m1, m2 = _piece_moments(lo, hi, u, s)
        c0 = c0_of(a, b, u)
        c1 = c1_of(b)
        sq += c0 * c0 * m0 + 2.0 * c0 * c1 * m1 + c1 * c1 * m2
        cross += c0 * m1 + c1 * m2
        mean_slope += b * m0
    return sq, cross, mean_slope


def reg_err_moments(reg, h: float, s: float, theta):
    """(E[(prox(th + hW; s) - th)^2], E[(prox(th + hW; s) - th) W]) per theta.

    Exact in W; vectorized over the theta nodes.
    """
    sq, cross, _ = _affine_moments(
        reg, s, theta, h,
        c0_of=lambda a, b, u: a + (b - 1.0) * u,
        c1_of=lambda b: b * h,
    )
    return sq, cross


def reg_prox_prime_mean(reg, h: float, s: float, theta):
    """E[prox'(theta + h W; s)] per theta node, exact in W."""
    _, _, mean_slope = _affine_moments(
        reg, s, theta, h,
        c0_of=lambda a, b, u: 0.0 * u,
        c1_of=lambda b: 0.0,
    )
    return mean_slope


def loss_env_moments(loss, alpha: float, kappa: float, z):
    """(E[env'(z + a W; k)^2], E[env'(z + a W; k) W]) per noise node z.

    env'(x; k) = (x - prox(x; k)) / k is piecewise affine with the prox pieces.
    """
    sq, cross, _ = _affine_moments(
        loss, kappa, z, alpha,
        c0_of=lambda a, b, u: ((1.0 - b) * u - a) / kappa,
        c1_of=lambda b: (1.0 - b) * alpha / kappa,
    )
    return sq, cross
