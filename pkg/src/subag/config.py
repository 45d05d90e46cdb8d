"""Experiment configuration: plain-text (YAML/JSON) tree, validation, round-trip."""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path

import yaml

from .models import (
    NoiseDist,
    SignalDist,
    dist_to_dict,
    noise_from_dict,
    signal_from_dict,
)
from .prox import (
    ElasticNet,
    Huber,
    Lasso,
    LossSpec,
    NoPenalty,
    RegSpec,
    Ridge,
    Square,
    is_null_penalty,
    reg_levels,
)
from .quadrature import QuadratureConfig

MODES = ("theory", "simulate", "estimate", "compare", "sweep")


class ConfigError(ValueError):
    """Schema error; carries the offending field path."""

    def __init__(self, field_path: str, message: str):
        self.field = field_path
        super().__init__(f"{field_path}: {message}")


def loss_from_dict(d: dict) -> LossSpec:
    d = dict(d)
    kind = d.pop("kind", None)
    if kind == "square":
        return Square()
    if kind == "huber":
        return Huber(rho=float(d.pop("rho")))
    raise ConfigError("ensemble.loss.kind", f"unknown loss kind {kind!r}")


def reg_from_dict(d: dict) -> RegSpec:
    d = dict(d)
    kind = d.pop("kind", None)
    if kind == "ridge":
        return Ridge(lam1=float(d.pop("lam")))
    if kind == "lasso":
        return Lasso(lam2=float(d.pop("lam")))
    if kind == "elastic_net":
        return ElasticNet(lam1=float(d.pop("lam1")), lam2=float(d.pop("lam2")))
    if kind == "none":
        return NoPenalty()
    raise ConfigError("ensemble.reg.kind", f"unknown penalty kind {kind!r}")


def loss_to_dict(loss: LossSpec) -> dict:
    if isinstance(loss, Square):
        return {"kind": "square"}
    if isinstance(loss, Huber):
        return {"kind": "huber", "rho": loss.rho}
    raise TypeError(f"unknown loss {loss!r}")


def reg_to_dict(reg: RegSpec) -> dict:
    if isinstance(reg, Ridge):
        return {"kind": "ridge", "lam": reg.lam1}
    if isinstance(reg, Lasso):
        return {"kind": "lasso", "lam": reg.lam2}
    if isinstance(reg, ElasticNet):
        return {"kind": "elastic_net", "lam1": reg.lam1, "lam2": reg.lam2}
    if isinstance(reg, NoPenalty):
        return {"kind": "none"}
    raise TypeError(f"unknown penalty {reg!r}")


@dataclass
class ExperimentConfig:
    mode: str
    signal: SignalDist
    noise: NoiseDist
    loss: LossSpec
    reg: RegSpec
    c_grid: tuple[float, ...]
    m_grid: tuple[float, ...]
    delta: float | None = None
    n: int | None = None
    p: int | None = None
    lam_grid: tuple[float, ...] | None = None
    rho_grid: tuple[float, ...] | None = None
    replications: int = 1
    base_seed: int = 0
    quadrature: QuadratureConfig = field(default_factory=QuadratureConfig)
    dump_datasets: bool = False

    def __post_init__(self):
        if self.mode not in MODES:
            raise ConfigError("mode", f"must be one of {MODES}, got {self.mode!r}")
        if not self.c_grid:
            raise ConfigError("ensemble.c", "at least one subsample ratio is required")
        for c in self.c_grid:
            if not 0 < c <= 1:
                raise ConfigError("ensemble.c", f"ratios must lie in (0, 1], got {c}")
        if not self.m_grid:
            raise ConfigError("ensemble.M", "at least one ensemble size is required")
        for M in self.m_grid:
            if M != math.inf and (M < 1 or int(M) != M):
                raise ConfigError("ensemble.M", f"sizes must be positive integers or inf, got {M}")
        if self.mode == "sweep" and not (self.lam_grid or self.rho_grid or len(self.c_grid) > 1):
            raise ConfigError("grids", "sweep mode needs a non-trivial grid")
        if self.mode in ("simulate", "estimate", "compare"):
            if self.n is None or self.p is None:
                raise ConfigError("model.n", f"{self.mode} mode requires n and p")
            if self.replications < 1:
                raise ConfigError("replications", "at least one replication is required")
        if self.delta is None:
            if self.n is None or self.p is None:
                raise ConfigError("model.delta", "delta is required when n, p are absent")
            self.delta = self.n / self.p

    @property
    def needs_theory(self) -> bool:
        return self.mode in ("theory", "sweep", "compare")

    @property
    def needs_empirical(self) -> bool:
        return self.mode in ("simulate", "estimate", "compare")

    @property
    def needs_estimator(self) -> bool:
        return self.mode in ("estimate", "compare")

    def to_dict(self) -> dict:
        d = {
            "mode": self.mode,
            "model": {
                "signal": dist_to_dict(self.signal),
                "noise": dist_to_dict(self.noise),
            },
            "ensemble": {
                "loss": loss_to_dict(self.loss),
                "reg": reg_to_dict(self.reg),
                "c": list(self.c_grid),
                "M": ["inf" if m == math.inf else int(m) for m in self.m_grid],
            },
            "replications": self.replications,
            "base_seed": self.base_seed,
            "quadrature": asdict(self.quadrature),
            "output": {"dump_datasets": self.dump_datasets},
        }
        if self.delta is not None:
            d["model"]["delta"] = self.delta
        if self.n is not None:
            d["model"]["n"] = self.n
        if self.p is not None:
            d["model"]["p"] = self.p
        grids = {}
        if self.lam_grid is not None:
            grids["lam"] = list(self.lam_grid)
        if self.rho_grid is not None:
            grids["rho"] = list(self.rho_grid)
        if grids:
            d["grids"] = grids
        return d


def _get(d: dict, path: str, default=None, required=False):
    cur = d
    for part in path.split("."):
        if not isinstance(cur, dict) or part not in cur:
            if required:
                raise ConfigError(path, "missing required field")
            return default
        cur = cur[part]
    return cur


def _parse_m(values) -> tuple[float, ...]:
    out = []
    for v in values:
        if isinstance(v, str) and v.lower() in ("inf", "infinity"):
            out.append(math.inf)
        else:
            out.append(float(v))
    return tuple(out)


def config_from_dict(d: dict) -> ExperimentConfig:
    if "config" in d and isinstance(d["config"], dict):
        d = d["config"]  # accept a manifest for round-trip re-runs
    mode = _get(d, "mode", required=True)
    try:
        signal = signal_from_dict(_get(d, "model.signal", required=True))
    except (TypeError, ValueError, KeyError) as exc:
        raise ConfigError("model.signal", str(exc)) from exc
    try:
        noise = noise_from_dict(_get(d, "model.noise", required=True))
    except (TypeError, ValueError, KeyError) as exc:
        raise ConfigError("model.noise", str(exc)) from exc
    loss = loss_from_dict(_get(d, "ensemble.loss", {"kind": "square"}))
    reg = reg_from_dict(_get(d, "ensemble.reg", {"kind": "none"}))
    c_raw = _get(d, "ensemble.c", required=True)
    c_grid = tuple(float(c) for c in (c_raw if isinstance(c_raw, (list, tuple)) else [c_raw]))
    m_raw = _get(d, "ensemble.M", [1])
    m_grid = _parse_m(m_raw if isinstance(m_raw, (list, tuple)) else [m_raw])
    lam_grid = _get(d, "grids.lam")
    rho_grid = _get(d, "grids.rho")
    q = _get(d, "quadrature", {}) or {}
    try:
        quad = QuadratureConfig(**q)
    except (TypeError, ValueError) as exc:
        raise ConfigError("quadrature", str(exc)) from exc
    n = _get(d, "model.n")
    p = _get(d, "model.p")
    return ExperimentConfig(
        mode=mode,
        signal=signal,
        noise=noise,
        loss=loss,
        reg=reg,
        c_grid=c_grid,
        m_grid=m_grid,
        delta=_get(d, "model.delta"),
        n=None if n is None else int(n),
        p=None if p is None else int(p),
        lam_grid=None if lam_grid is None else tuple(float(x) for x in lam_grid),
        rho_grid=None if rho_grid is None else tuple(float(x) for x in rho_grid),
        replications=int(_get(d, "replications", 1)),
        base_seed=int(_get(d, "base_seed", 0)),
        quadrature=quad,
        dump_datasets=bool(_get(d, "output.dump_datasets", False)),
    )


def load_config(path) -> ExperimentConfig:
    text = Path(path).read_text()
    if str(path).endswith(".json"):
        return config_from_dict(json.loads(text))
    return config_from_dict(yaml.safe_load(text))


def validate(config: ExperimentConfig) -> list[str]:
    """Pure diagnostics: empty list iff the run should be clean."""
    out = []
    if any(c == 1.0 for c in config.c_grid) and any(m != 1 for m in config.m_grid):
        out.append(
            "c = 1 with M > 1: contraction hypothesis min{c, c~} < 1 violated; "
            "identical full-sample components are reported with degenerate correlations"
        )
    if config.needs_estimator and not config.reg.strongly_convex:
        out.append(
            "risk-estimator consistency is proved for strongly convex penalties only; "
            "outputs for this penalty are tagged guarantee=empirical"
        )
    lam_levels = config.lam_grid if config.lam_grid is not None else [None]
    for lam in lam_levels:
        reg = effective_reg(config.reg, lam)
        if is_null_penalty(reg):
            for c in config.c_grid:
                if abs(c * config.delta - 1.0) < 1e-12:
                    out.append(
                        f"interpolation threshold c*delta = 1 at c={c}: "
                        "theory cell will be skipped"
                    )
    if isinstance(config.loss, Square) and config.noise.heavy_tailed:
        out.append(
            "square loss with infinite-variance noise: theory cells will fail "
            "(finite noise second moment required)"
        )
    return out


def effective_reg(reg: RegSpec, lam: float | None) -> RegSpec:
    """Apply a lam-axis value to the base penalty (scales the whole penalty)."""
    if lam is None:
        return reg
    if isinstance(reg, Ridge):
        return Ridge(lam)
    if isinstance(reg, Lasso):
        return Lasso(lam)
    if isinstance(reg, ElasticNet):
        return ElasticNet(reg.lam1 * lam, reg.lam2 * lam)
    if isinstance(reg, NoPenalty):
        raise ConfigError("grids.lam", "lam grid is meaningless with a null penalty")
    raise TypeError(f"unknown penalty {reg!r}")


def effective_loss(loss: LossSpec, rho: float | None) -> LossSpec:
    """Apply a rho-axis value to the base loss (Huber threshold)."""
    if rho is None:
        return loss
    if isinstance(loss, Huber):
        return Huber(rho)
    raise ConfigError("grids.rho", "rho grid requires the Huber loss")


def primary_level(reg: RegSpec) -> float:
    lam1, lam2 = reg_levels(reg)
    if isinstance(reg, Ridge):
        return lam1
    if isinstance(reg, (Lasso, ElasticNet)):
        return lam2
    return 0.0
