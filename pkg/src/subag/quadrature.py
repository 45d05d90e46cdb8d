"""Deterministic expectation engine for the scalar-system integrals.

Gaussian coordinates use Gauss-Hermite quadrature; discrete signal laws are
enumerated exactly; Student-t noise defaults to seeded Monte Carlo (the
system integrands are bounded there) with an optional truncated-quadrature
mode.  Correlated pairs (G, G~) with correlation eta are realized as
G~ = eta G + sqrt(1 - eta^2) Gbar over a tensor grid.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import stats

from .models import Gaussian, NoiseDist, SignalDist, StudentT

_CHUNK = 1 << 22  # max tensor elements per evaluation block


class IntegrationError(RuntimeError):
    """Raised when an integrand evaluates to a non-finite value."""


@dataclass(frozen=True)
class QuadratureConfig:
    gauss_nodes: int = 64
    noise_nodes: int | None = None      # truncated-quadrature mode for Student-t
    mc_samples: int = 100_000           # Monte Carlo mode for Student-t
    mc_seed: int = 0
    tail_truncation: float = 40.0       # Student-t integration bound, scale units

    def __post_init__(self):
        if self.gauss_nodes < 8:
            raise ValueError(f"gauss_nodes must be >= 8, got {self.gauss_nodes}")
        if self.mc_samples < 1:
            raise ValueError("mc_samples must be positive")
        if self.tail_truncation <= 0:
            raise ValueError("tail_truncation must be positive")


@lru_cache(maxsize=32)
def gauss_hermite(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights for E[f(H)], H ~ N(0, 1); weights sum to 1."""
    x, w = np.polynomial.hermite_e.hermegauss(n)
    return x, w / w.sum()


def signal_nodes(signal: SignalDist, cfg: QuadratureConfig) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights for E over the signal marginal (atoms enumerated exactly)."""
    vals = [v for v, _ in signal.atoms()]
    wts = [w for _, w in signal.atoms()]
    gp = signal.gaussian_part()
    if gp is not None:
        mass, var = gp
        x, w = gauss_hermite(cfg.gauss_nodes)
        vals.extend(np.sqrt(var) * x)
        wts.extend(mass * w)
    return np.asarray(vals, dtype=float), np.asarray(wts, dtype=float)


@lru_cache(maxsize=32)
def _student_t_mc(dof: float, scale: float, samples: int, seed: int) -> tuple[np.ndarray, np.ndarray]:
    # stream derived from (seed, distribution parameters) so concurrent use
    # never reorders randomness
    ss = np.random.SeedSequence([seed, hash((dof, scale)) & 0x7FFFFFFF])
    u = np.random.default_rng(ss).random(samples)
    z = scale * stats.t.ppf(u, dof)
    return z, np.full(samples, 1.0 / samples)


@lru_cache(maxsize=32)
def _student_t_nodes(dof: float, scale: float, nodes: int, bound: float) -> tuple[np.ndarray, np.ndarray]:
    x, w = np.polynomial.legendre.leggauss(nodes)
    z = bound * scale * x
    wts = w * bound * scale * stats.t.pdf(z / scale, dof) / scale
    return z, wts / wts.sum()


def noise_nodes(noise: NoiseDist, cfg: QuadratureConfig) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights for E over the noise marginal."""
    if isinstance(noise, Gaussian):
        x, w = gauss_hermite(cfg.noise_nodes or cfg.gauss_nodes)
        return noise.sigma * x, w
    if isinstance(noise, StudentT):
        if cfg.noise_nodes is not None:
            return _student_t_nodes(noise.dof, noise.scale, cfg.noise_nodes, cfg.tail_truncation)
        return _student_t_mc(noise.dof, noise.scale, cfg.mc_samples, cfg.mc_seed)
    raise TypeError(f"unknown noise distribution {noise!r}")


def _check_finite(vals: np.ndarray, what: str) -> None:
    if not np.all(np.isfinite(vals)):
        bad = np.argwhere(~np.isfinite(np.atleast_1d(vals)))[0]
        raise IntegrationError(f"non-finite integrand value in {what} at grid index {tuple(bad)}")


def _check_eta(eta: float) -> None:
    if abs(eta) > 1.0 + 1e-12:
        raise ValueError(f"correlation must lie in [-1, 1], got {eta}")


def expect_theta_h(f, cfg: QuadratureConfig, signal: SignalDist) -> float:
    """E[f(Theta, H)] with H ~ N(0,1) independent of Theta."""
    tv, tw = signal_nodes(signal, cfg)
    hv, hw = gauss_hermite(cfg.gauss_nodes)
    vals = f(tv[:, None], hv[None, :])
    _check_finite(vals, "expect_theta_h")
    return float(np.einsum("i,j,ij->", tw, hw, vals))


def expect_theta_pair(f, eta: float, cfg: QuadratureConfig, signal: SignalDist) -> float:
    """E[f(Theta, H, H~)] with (H, H~) standard bivariate normal, corr eta."""
    _check_eta(eta)
    eta = min(1.0, max(-1.0, eta))
    tv, tw = signal_nodes(signal, cfg)
    hv, hw = gauss_hermite(cfg.gauss_nodes)
    ht = eta * hv[:, None] + np.sqrt(max(0.0, 1.0 - eta * eta)) * hv[None, :]
    vals = f(tv[:, None, None], hv[None, :, None], ht[None, :, :])
    _check_finite(vals, "expect_theta_pair")
    return float(np.einsum("i,j,k,ijk->", tw, hw, hw, vals))


def expect_noise_g(f, cfg: QuadratureConfig, noise: NoiseDist) -> float:
    """E[f(Z, G)] with G ~ N(0,1) independent of the noise Z."""
    zv, zw = noise_nodes(noise, cfg)
    gv, gw = gauss_hermite(cfg.gauss_nodes)
    out = 0.0
    step = max(1, _CHUNK // gv.size)
    for lo in range(0, zv.size, step):
        z, wz = zv[lo:lo + step], zw[lo:lo + step]
        vals = f(z[:, None], gv[None, :])
        _check_finite(vals, "expect_noise_g")
        out += np.einsum("i,j,ij->", wz, gw, vals)
    return float(out)


def expect_corr_pair(f, eta: float, cfg: QuadratureConfig, noise: NoiseDist) -> float:
    """E[f(Z, G, G~)] with (G, G~) standard bivariate normal, corr eta.

    Realized as G~ = eta G + sqrt(1 - eta^2) Gbar with independent Gbar;
    the noise dimension is processed in chunks to bound memory.
    """
    _check_eta(eta)
    eta = min(1.0, max(-1.0, eta))
    zv, zw = noise_nodes(noise, cfg)
    gv, gw = gauss_hermite(cfg.gauss_nodes)
    gt = eta * gv[:, None] + np.sqrt(max(0.0, 1.0 - eta * eta)) * gv[None, :]
    out = 0.0
    step = max(1, _CHUNK // (gv.size * gv.size))
    for lo in range(0, zv.size, step):
        z, wz = zv[lo:lo + step], zw[lo:lo + step]
        vals = f(z[:, None, None], gv[None, :, None], gt[None, :, :])
        _check_finite(vals, "expect_corr_pair")
        out += np.einsum("i,j,k,ijk->", wz, gw, gw, vals)
    return float(out)
