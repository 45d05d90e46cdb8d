"""Scalar proximal calculus for the supported loss and penalty families.

Conventions: prox_f(x; tau) = argmin_y f(y) + (x - y)^2 / (2 tau) for tau > 0,
and env_f'(x; tau) = (x - prox_f(x; tau)) / tau is the derivative of the
Moreau envelope in x.  All maps are vectorized over numpy arrays in x.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np


def soft_threshold(x, t):
    """Soft threshold: sign(x) * (|x| - t)_+."""
    x = np.asarray(x, dtype=float)
    return np.sign(x) * np.maximum(np.abs(x) - t, 0.0)


def _check_tau(tau):
    if not np.all(np.asarray(tau) > 0):
        raise ValueError(f"prox parameter must be positive, got tau={tau!r}")


# ---------------------------------------------------------------------------
# losses
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Square:
    """Least-squares loss f(x) = x^2 / 2."""

    @property
    def grad_lipschitz(self) -> float:
        return 1.0

    def value(self, x):
        return 0.5 * np.square(np.asarray(x, dtype=float))

    def grad(self, r):
        return np.asarray(r, dtype=float).copy()

    def curvature(self, r):
        """Second derivative of the loss at each residual."""
        return np.ones_like(np.asarray(r, dtype=float))

    def prox(self, x, tau):
        return np.asarray(x, dtype=float) / (1.0 + tau)

    def prox_prime(self, x, tau):
        return np.full_like(np.asarray(x, dtype=float), 1.0 / (1.0 + tau))

    def env_prime(self, x, tau):
        return np.asarray(x, dtype=float) / (1.0 + tau)


@dataclass(frozen=True)
class Huber:
    """Huber loss with threshold rho: x^2/(2 rho) inside, |x| - rho/2 outside.

    This is itself the Moreau envelope of |.| with parameter rho, so envelopes
    compose: env(x; tau) = env_{|.|}(x; rho + tau).  The derivative is
    (1/rho)-Lipschitz.
    """

    rho: float

    def __post_init__(self):
        if self.rho <= 0:
            raise ValueError(f"Huber threshold must be positive, got {self.rho}")

    @property
    def grad_lipschitz(self) -> float:
        return 1.0 / self.rho

    def value(self, x):
        x = np.asarray(x, dtype=float)
        ax = np.abs(x)
        return np.where(ax <= self.rho, 0.5 * x * x / self.rho, ax - 0.5 * self.rho)

    def grad(self, r):
        return np.clip(np.asarray(r, dtype=float) / self.rho, -1.0, 1.0)

    def curvature(self, r):
        # boundary |r| = rho counts as inlier
        r = np.asarray(r, dtype=float)
        return (np.abs(r) <= self.rho) / self.rho

    def prox(self, x, tau):
        x = np.asarray(x, dtype=float)
        edge = self.rho + tau
        return np.where(np.abs(x) <= edge, x * self.rho / edge, x - tau * np.sign(x))

    def prox_prime(self, x, tau):
        x = np.asarray(x, dtype=float)
        edge = self.rho + tau
        return np.where(np.abs(x) <= edge, self.rho / edge, 1.0)

    def env_prime(self, x, tau):
        x = np.asarray(x, dtype=float)
        return np.clip(x / (self.rho + tau), -1.0, 1.0)


# ---------------------------------------------------------------------------
# penalties (coordinate-wise, levels baked into the spec)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Ridge:
    """Quadratic penalty g(x) = lam1 * x^2 / 2."""

    lam1: float

    def __post_init__(self):
        if self.lam1 < 0:
            raise ValueError(f"ridge level must be non-negative, got {self.lam1}")

    @property
    def strongly_convex(self) -> bool:
        return self.lam1 > 0

    def value(self, x):
        return 0.5 * self.lam1 * np.square(np.asarray(x, dtype=float))

    def prox(self, x, tau):
        return np.asarray(x, dtype=float) / (1.0 + self.lam1 * tau)

    def prox_prime(self, x, tau):
        return np.full_like(np.asarray(x, dtype=float), 1.0 / (1.0 + self.lam1 * tau))

    def env_prime(self, x, tau):
        x = np.asarray(x, dtype=float)
        return x * self.lam1 / (1.0 + self.lam1 * tau)


@dataclass(frozen=True)
class Lasso:
    """Absolute penalty g(x) = lam2 * |x|."""

    lam2: float

    def __post_init__(self):
        if self.lam2 < 0:
            raise ValueError(f"lasso level must be non-negative, got {self.lam2}")

    @property
    def strongly_convex(self) -> bool:
        return False

    def value(self, x):
        return self.lam2 * np.abs(np.asarray(x, dtype=float))

    def prox(self, x, tau):
        return soft_threshold(x, self.lam2 * tau)

    def prox_prime(self, x, tau):
        # kink |x| = lam2 tau resolved as 1 (right limit in |x|)
        x = np.asarray(x, dtype=float)
        return (np.abs(x) >= self.lam2 * tau).astype(float)

    def env_prime(self, x, tau):
        x = np.asarray(x, dtype=float)
        return np.sign(x) * np.minimum(np.abs(x) / tau, self.lam2)


@dataclass(frozen=True)
class ElasticNet:
    """Combined penalty g(x) = lam1 * x^2 / 2 + lam2 * |x|.

    prox is soft-threshold then shrink: soft(x; lam2 tau) / (1 + lam1 tau).
    """

    lam1: float
    lam2: float

    def __post_init__(self):
        if self.lam1 < 0 or self.lam2 < 0:
            raise ValueError(f"elastic-net levels must be non-negative, got {self}")

    @property
    def strongly_convex(self) -> bool:
        return self.lam1 > 0

    def value(self, x):
        x = np.asarray(x, dtype=float)
        return 0.5 * self.lam1 * x * x + self.lam2 * np.abs(x)

    def prox(self, x, tau):
        return soft_threshold(x, self.lam2 * tau) / (1.0 + self.lam1 * tau)

    def prox_prime(self, x, tau):
        x = np.asarray(x, dtype=float)
        return (np.abs(x) >= self.lam2 * tau) / (1.0 + self.lam1 * tau)

    def env_prime(self, x, tau):
        x = np.asarray(x, dtype=float)
        return (x - self.prox(x, tau)) / tau


@dataclass(frozen=True)
class NoPenalty:
    """Null penalty g = 0 (prox is the identity)."""

    @property
    def strongly_convex(self) -> bool:
        return False

    def value(self, x):
        return np.zeros_like(np.asarray(x, dtype=float))

    def prox(self, x, tau):
        return np.asarray(x, dtype=float).copy()

    def prox_prime(self, x, tau):
        return np.ones_like(np.asarray(x, dtype=float))

    def env_prime(self, x, tau):
        return np.zeros_like(np.asarray(x, dtype=float))


LossSpec = Union[Square, Huber]
RegSpec = Union[Ridge, Lasso, ElasticNet, NoPenalty]


def reg_levels(reg: RegSpec) -> tuple[float, float]:
    """Return (lam1, lam2): the quadratic and absolute levels of a penalty."""
    if isinstance(reg, Ridge):
        return reg.lam1, 0.0
    if isinstance(reg, Lasso):
        return 0.0, reg.lam2
    if isinstance(reg, ElasticNet):
        return reg.lam1, reg.lam2
    if isinstance(reg, NoPenalty):
        return 0.0, 0.0
    raise TypeError(f"not a penalty spec: {reg!r}")


def is_null_penalty(reg: RegSpec) -> bool:
    lam1, lam2 = reg_levels(reg)
    return lam1 == 0.0 and lam2 == 0.0


# ---------------------------------------------------------------------------
# dispatching front-ends
# ---------------------------------------------------------------------------

def prox(spec, x, tau):
    """Proximal map of the loss or penalty at x with parameter tau > 0."""
    _check_tau(tau)
    return spec.prox(x, tau)


def prox_prime(spec, x, tau):
    """Derivative of the proximal map in x (in [0, 1] by non-expansiveness)."""
    _check_tau(tau)
    return spec.prox_prime(x, tau)


def env_prime(spec, x, tau):
    """Derivative of the Moreau envelope in x: (x - prox(x; tau)) / tau."""
    _check_tau(tau)
    return spec.env_prime(x, tau)


def loss_grad(spec: LossSpec, r):
    """Coordinate-wise derivative of the loss at residuals r."""
    return spec.grad(r)
