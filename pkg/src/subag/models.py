"""Signal and noise marginals, synthetic data generation, dataset round-trip."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Union

import numpy as np
from scipy import stats


# ---------------------------------------------------------------------------
# signal marginals
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TwoPointSparse:
    """theta = strength / sqrt(support) with prob. support, else 0.

    Second moment is strength^2 regardless of the support proportion.
    """

    strength: float
    support: float

    def __post_init__(self):
        if not 0 < self.support <= 1:
            raise ValueError(f"support must lie in (0, 1], got {self.support}")

    def second_moment(self) -> float:
        return self.strength ** 2

    def atoms(self) -> list[tuple[float, float]]:
        spike = self.strength / math.sqrt(self.support)
        if self.support == 1.0:
            return [(spike, 1.0)]
        return [(spike, self.support), (0.0, 1.0 - self.support)]

    def gaussian_part(self):
        return None

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        spike = self.strength / math.sqrt(self.support)
        return np.where(rng.random(size) < self.support, spike, 0.0)


@dataclass(frozen=True)
class GaussPointMass:
    """theta ~ eps * N(0, variance) + (1 - eps) * point mass at 0."""

    eps: float
    variance: float

    def __post_init__(self):
        if not 0 < self.eps <= 1:
            raise ValueError(f"eps must lie in (0, 1], got {self.eps}")
        if self.variance <= 0:
            raise ValueError(f"variance must be positive, got {self.variance}")

    def second_moment(self) -> float:
        return self.eps * self.variance

    def atoms(self) -> list[tuple[float, float]]:
        return [] if self.eps == 1.0 else [(0.0, 1.0 - self.eps)]

    def gaussian_part(self):
        return self.eps, self.variance

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        mask = rng.random(size) < self.eps
        return np.where(mask, rng.normal(0.0, math.sqrt(self.variance), size), 0.0)


@dataclass(frozen=True)
class PointMass:
    """Degenerate signal: every coordinate equals value."""

    value: float = 0.0

    def second_moment(self) -> float:
        return self.value ** 2

    def atoms(self) -> list[tuple[float, float]]:
        return [(self.value, 1.0)]

    def gaussian_part(self):
        return None

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        return np.full(size, self.value)


SignalDist = Union[TwoPointSparse, GaussPointMass, PointMass]


# ---------------------------------------------------------------------------
# noise marginals
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Gaussian:
    """Centered Gaussian noise with standard deviation sigma."""

    sigma: float

    def __post_init__(self):
        if self.sigma < 0:
            raise ValueError(f"sigma must be non-negative, got {self.sigma}")

    @property
    def heavy_tailed(self) -> bool:
        return False

    def second_moment(self) -> float:
        return self.sigma ** 2

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        return rng.normal(0.0, self.sigma, size)


@dataclass(frozen=True)
class StudentT:
    """Student-t noise with dof degrees of freedom, scaled by scale.

    dof = 2 is allowed: the variance is infinite and the distribution is
    flagged heavy_tailed.  Sampling uses the inverse CDF on a deterministic
    uniform stream so results are reproducible per seed.
    """

    dof: float
    scale: float = 1.0

    def __post_init__(self):
        if self.dof < 2:
            raise ValueError(f"dof must be >= 2, got {self.dof}")
        if self.scale <= 0:
            raise ValueError(f"scale must be positive, got {self.scale}")

    @property
    def heavy_tailed(self) -> bool:
        return self.dof <= 2

    def second_moment(self) -> float:
        if self.dof <= 2:
            return math.inf
        return self.scale ** 2 * self.dof / (self.dof - 2.0)

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        return self.scale * stats.t.ppf(rng.random(size), self.dof)


NoiseDist = Union[Gaussian, StudentT]


# ---------------------------------------------------------------------------
# dict round-trip (used by the CLI config layer and dataset sidecars)
# ---------------------------------------------------------------------------

_SIGNAL_KINDS = {
    "two_point_sparse": TwoPointSparse,
    "gauss_point_mass": GaussPointMass,
    "point_mass": PointMass,
}
_NOISE_KINDS = {"gaussian": Gaussian, "student_t": StudentT}


def dist_to_dict(dist) -> dict:
    for name, cls in {**_SIGNAL_KINDS, **_NOISE_KINDS}.items():
        if type(dist) is cls:
            d = {"kind": name}
            d.update({k: getattr(dist, k) for k in dist.__dataclass_fields__})
            return d
    raise TypeError(f"unknown distribution {dist!r}")


def signal_from_dict(d: dict) -> SignalDist:
    d = dict(d)
    kind = d.pop("kind")
    if kind not in _SIGNAL_KINDS:
        raise ValueError(f"unknown signal kind {kind!r}")
    return _SIGNAL_KINDS[kind](**d)


def noise_from_dict(d: dict) -> NoiseDist:
    d = dict(d)
    kind = d.pop("kind")
    if kind not in _NOISE_KINDS:
        raise ValueError(f"unknown noise kind {kind!r}")
    return _NOISE_KINDS[kind](**d)


# ---------------------------------------------------------------------------
# data generation
# ---------------------------------------------------------------------------

@dataclass
class Dataset:
    X: np.ndarray
    y: np.ndarray
    theta_star: np.ndarray
    n: int
    p: int
    seed: int


def gen_data(n: int, p: int, signal: SignalDist, noise: NoiseDist, seed: int) -> Dataset:
    """Simulate y = X theta + eps with X entries iid N(0, 1/p).

    Deterministic for a fixed seed: theta, eps, and X draw from three
    independent child streams of SeedSequence(seed).
    """
    if n < 1 or p < 1:
        raise ValueError(f"dimensions must be positive, got n={n}, p={p}")
    kt, ke, kx = np.random.SeedSequence(seed).spawn(3)
    theta = signal.sample(np.random.default_rng(kt), p)
    eps = noise.sample(np.random.default_rng(ke), n)
    X = np.random.default_rng(kx).standard_normal((n, p)) / math.sqrt(p)
    return Dataset(X=X, y=X @ theta + eps, theta_star=theta, n=n, p=p, seed=seed)


def save_dataset(ds: Dataset, path) -> None:
    """Write X, y, theta as one flat float64 binary plus a JSON sidecar."""
    path = Path(path)
    flat = np.concatenate([ds.X.ravel(order="C"), ds.y, ds.theta_star]).astype("<f8")
    flat.tofile(path)
    sidecar = {
        "n": ds.n,
        "p": ds.p,
        "seed": ds.seed,
        "layout": "X (n*p, C order) | y (n) | theta (p), little-endian float64",
    }
    path.with_suffix(path.suffix + ".json").write_text(json.dumps(sidecar, indent=2))


def load_dataset(path) -> Dataset:
    path = Path(path)
    meta = json.loads(path.with_suffix(path.suffix + ".json").read_text())
    n, p = meta["n"], meta["p"]
    flat = np.fromfile(path, dtype="<f8")
    if flat.size != n * p + n + p:
        raise ValueError(f"binary size {flat.size} does not match sidecar n={n}, p={p}")
    X = flat[: n * p].reshape(n, p)
    y = flat[n * p: n * p + n]
    theta = flat[n * p + n:]
    return Dataset(X=X, y=y, theta_star=theta, n=n, p=p, seed=meta["seed"])
