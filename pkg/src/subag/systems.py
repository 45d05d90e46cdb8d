"""Solvers for the deterministic scalar systems behind the ensemble risk.

Naming follows the limiting quantities: alpha^2 is the squared estimator
error, beta^2 the squared loss-gradient norm, nu the residual degrees of
freedom per feature, kappa their ratio df/tr[V]; (eta_g, eta_h) are the
limiting correlations between estimator errors and between loss gradients of
two estimators fit on overlapping subsamples.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np
from scipy.optimize import brentq

from .errors import (
    ContractionUnavailableError,
    InterpolationThresholdError,
    NoConvergenceError,
    PerfectRecoveryError,
)
from .models import NoiseDist, SignalDist
from .prox import (
    Huber,
    Lasso,
    LossSpec,
    NoPenalty,
    RegSpec,
    Ridge,
    Square,
    env_prime,
    is_null_penalty,
    prox,
    prox_prime,
    reg_levels,
)
from .quadrature import (
    QuadratureConfig,
    expect_corr_pair,
    expect_noise_g,
    expect_theta_h,
    expect_theta_pair,
    noise_nodes,
    signal_nodes,
)
from .smoothed import loss_env_moments, reg_err_moments, reg_prox_prime_mean


@dataclass(frozen=True)
class SystemSolution:
    alpha: float
    beta: float
    kappa: float
    nu: float
    residual: float


@dataclass(frozen=True)
class CorrSolution:
    eta_g: float
    eta_h: float
    iterations: int
    iterates: tuple[float, ...] = ()


@dataclass(frozen=True)
class LsqSolution:
    tau: float
    a: float
    xi: float | None = None


@dataclass(frozen=True)
class EnsembleConfig:
    delta: float
    components: tuple[tuple[LossSpec, RegSpec, float], ...]
    M: float  # positive integer, or math.inf for the full ensemble

    def __post_init__(self):
        if self.delta <= 0:
            raise ValueError(f"delta must be positive, got {self.delta}")
        for _, _, c in self.components:
            if not 0 < c <= 1:
                raise ValueError(f"subsample ratio must lie in (0, 1], got {c}")
        if self.M != math.inf and (self.M < 1 or int(self.M) != self.M):
            raise ValueError(f"M must be a positive integer or inf, got {self.M}")

    @property
    def homogeneous(self) -> bool:
        return len(set(self.components)) == 1


# ---------------------------------------------------------------------------
# expectation building blocks
# ---------------------------------------------------------------------------

def _loss_moments(loss, alpha, kappa, noise, cfg):
    """(E[env'(Z + a G; k)^2], E[env'(Z + a G; k) G]): exact in G per noise node."""
    zv, zw = noise_nodes(noise, cfg)
    sq, cross = loss_env_moments(loss, alpha, kappa, zv)
    return float(zw @ sq), float(zw @ cross)


def _loss_m2(loss, alpha, kappa, noise, cfg):
    return _loss_moments(loss, alpha, kappa, noise, cfg)[0]


def _prox_err(reg, h_scale, s):
    """Map (theta, h) -> prox_g(theta + h_scale h; s) - theta."""
    return lambda th, h: prox(reg, th + h_scale * h, s) - th


def _reg_moments(reg, h_scale, s, signal, cfg):
    """(E[D^2], E[D H]) for the prox error D; exact in H per signal node."""
    tv, tw = signal_nodes(signal, cfg)
    sq, cross = reg_err_moments(reg, h_scale, s, tv)
    return float(tw @ sq), float(tw @ cross)


def _reg_prox_prime(reg, h_scale, s, signal, cfg):
    """E[prox'_g(theta + h_scale H; s)]: exact in H per signal node."""
    tv, tw = signal_nodes(signal, cfg)
    return float(tw @ reg_prox_prime_mean(reg, h_scale, s, tv))


def system1a_defect(loss, reg, cdelta, signal, noise, cfg, sol: SystemSolution) -> float:
    """Max absolute defect of the four fixed-point equations at sol."""
    alpha, beta, kappa, nu = sol.alpha, sol.beta, sol.kappa, sol.nu
    m2, mg = _loss_moments(loss, alpha, kappa, noise, cfg)
    a2, kb = _reg_moments(reg, beta / nu, 1.0 / nu, signal, cfg)
    return max(
        abs(a2 - alpha ** 2),
        abs(cdelta * m2 - beta ** 2),
        abs(kb - kappa * beta),
        abs(cdelta * mg - nu * alpha),
    )


def _check_degenerate(signal, noise):
    if signal.second_moment() == 0.0 and noise.second_moment() == 0.0:
        raise PerfectRecoveryError(
            "zero signal with zero noise: perfect recovery, solution not unique"
        )


# ---------------------------------------------------------------------------
# square-loss systems (tau, a) and their full-ensemble extension xi
# ---------------------------------------------------------------------------

def _sys2_nu(reg, cdelta, tau, signal, cfg):
    """Root of nu + E[prox'_g(theta + (tau/sqrt(cd)) h; 1/nu)] = cdelta on (0, cdelta]."""
    h_scale = tau / math.sqrt(cdelta)

    def psi(nu):
        return nu + _reg_prox_prime(reg, h_scale, 1.0 / nu, signal, cfg) - cdelta

    lo = 1e-12
    if psi(lo) >= 0:
        raise NoConvergenceError(
            f"no residual-dof root: unpenalized system needs cdelta > 1 (cdelta={cdelta})"
        )
    return brentq(psi, lo, cdelta, xtol=1e-14, rtol=8.9e-16)


def solve_sys2(
    reg: RegSpec,
    cdelta: float,
    sigma2: float,
    signal: SignalDist,
    cfg: QuadratureConfig,
    *,
    c: float | None = None,
    want_xi: bool = False,
    tol: float = 1e-12,
) -> LsqSolution:
    """Risk system for penalized least squares at subsample aspect cdelta.

    Solves for (tau, a); with want_xi also the full-ensemble scale xi via the
    contractive fixed point on eta_h = c xi^2 / tau^2.  Requires a strictly
    penalized g unless cdelta > 1 (where the unpenalized system is regular).
    """
    if cdelta <= 0:
        raise ValueError(f"cdelta must be positive, got {cdelta}")
    if sigma2 < 0:
        raise ValueError(f"sigma2 must be non-negative, got {sigma2}")
    if not math.isfinite(sigma2):
        raise ValueError("square loss requires a finite noise second moment")
    if sigma2 == 0.0 and signal.second_moment() == 0.0:
        raise PerfectRecoveryError("zero signal with zero noise")
    if is_null_penalty(reg) and cdelta <= 1:
        raise ValueError(
            "unpenalized least squares needs cdelta > 1; use solve_sys4 for interpolators"
        )

    def excess(tau):
        nu = _sys2_nu(reg, cdelta, tau, signal, cfg)
        risk, _ = _reg_moments(reg, tau / math.sqrt(cdelta), 1.0 / nu, signal, cfg)
        return risk, nu

    def phi(tau):
        risk, _ = excess(tau)
        return risk + sigma2 - tau * tau

    lo = math.sqrt(sigma2) + 1e-9
    hi = max(2.0 * lo, math.sqrt(sigma2 + signal.second_moment() + 1.0))
    for _ in range(200):
        if phi(hi) < 0:
            break
        hi *= 2.0
    else:
        raise NoConvergenceError("could not bracket the tau equation", residual=phi(hi))
    if phi(lo) < 0:
        lo = math.sqrt(max(sigma2, 1e-30)) * (1 - 1e-12) if sigma2 > 0 else 1e-12
    tau = brentq(phi, lo, hi, xtol=1e-14, rtol=8.9e-16)
    risk, nu = excess(tau)

    lam1, lam2 = reg_levels(reg)
    level = lam1 if isinstance(reg, Ridge) else lam2 if isinstance(reg, Lasso) else 1.0
    beta = tau * nu / math.sqrt(cdelta)
    a = level / beta

    xi = None
    if want_xi:
        if c is None:
            raise ValueError("want_xi requires the subsample ratio c")
        xi = _square_loss_xi(reg, cdelta, c, sigma2, tau, nu, signal, cfg, tol)
    return LsqSolution(tau=tau, a=a, xi=xi)


def _square_loss_xi(reg, cdelta, c, sigma2, tau, nu, signal, cfg, tol=1e-12):
    """Full-ensemble scale: xi^2 = E[D D~] + sigma^2 with corr(H, H~) = c xi^2/tau^2."""
    h_scale, s = tau / math.sqrt(cdelta), 1.0 / nu
    err = _prox_err(reg, h_scale, s)

    def cross(eta):
        return expect_theta_pair(
            lambda th, h, ht: err(th, h) * err(th, ht), eta, cfg, signal
        )

    eta = 0.0
    for _ in range(400):
        xi2 = cross(eta) + sigma2
        eta_new = min(1.0, max(-1.0, c * xi2 / tau ** 2))
        if abs(eta_new - eta) < tol:
            eta = eta_new
            break
        eta = eta_new
    else:
        raise NoConvergenceError("xi fixed point did not converge", iterate=eta)
    return math.sqrt(cross(eta) + sigma2)


def _ls_closed_forms(cdelta, delta, sigma2):
    """Underparameterized least-squares limits: only delta matters for R_inf."""
    r1 = sigma2 / (cdelta - 1.0)
    rinf = sigma2 / (delta - 1.0)
    return r1, rinf


def solve_sys4(
    reg_kind: str,
    c: float,
    delta: float,
    sigma2: float,
    signal: SignalDist,
    cfg: QuadratureConfig,
    *,
    want_xi: bool = False,
    tol: float = 1e-12,
) -> LsqSolution:
    """Vanishing-regularization (interpolator) system for q in {1, 2}.

    reg_kind is "ridgeless" or "lassoless".  For cdelta > 1 the estimator is
    plain least squares and the closed forms are returned; cdelta = 1 is the
    interpolation threshold and raises.
    """
    if reg_kind not in ("ridgeless", "lassoless"):
        raise ValueError(f"reg_kind must be 'ridgeless' or 'lassoless', got {reg_kind!r}")
    if not 0 < c <= 1:
        raise ValueError(f"subsample ratio must lie in (0, 1], got {c}")
    cdelta = c * delta
    if abs(cdelta - 1.0) < 1e-12:
        raise InterpolationThresholdError(
            f"c * delta = 1 (c={c}, delta={delta}): single-estimator risk diverges"
        )
    if cdelta > 1:
        r1, rinf = _ls_closed_forms(cdelta, delta, sigma2)
        xi = math.sqrt(rinf + sigma2) if want_xi else None
        return LsqSolution(tau=math.sqrt(r1 + sigma2), a=0.0, xi=xi)

    if sigma2 == 0.0 and signal.second_moment() == 0.0:
        raise PerfectRecoveryError("zero signal with zero noise")
    unit = Ridge(1.0) if reg_kind == "ridgeless" else Lasso(1.0)

    def threshold(tau):
        # 1 = (1/cdelta) E[prox'(theta + (tau/sqrt(cd)) h; u)], decreasing in u
        h_scale = tau / math.sqrt(cdelta)

        def gap(u):
            return cdelta - _reg_prox_prime(unit, h_scale, u, signal, cfg)

        lo, hi = 1e-12, 1.0
        for _ in range(200):
            if gap(hi) > 0:
                break
            hi *= 2.0
        else:
            raise NoConvergenceError("could not bracket the interpolator threshold")
        return brentq(gap, lo, hi, xtol=1e-15, rtol=8.9e-16)

    def risk_at(tau):
        u = threshold(tau)
        risk, _ = _reg_moments(unit, tau / math.sqrt(cdelta), u, signal, cfg)
        return risk, u

    floor = sigma2 / (1.0 - cdelta)
    t2 = floor + signal.second_moment() + 1e-6
    omega, last_gap = 1.0, math.inf
    u = None
    for _ in range(500):
        risk, u = risk_at(math.sqrt(t2))
        target = risk + sigma2
        gap = abs(target - t2)
        if gap < tol * max(1.0, t2):
            t2 = target
            break
        if gap > last_gap:
            omega = max(omega / 2.0, 1e-3)
        last_gap = gap
        t2 = max((1.0 - omega) * t2 + omega * target, floor)
    else:
        raise NoConvergenceError("interpolator tau iteration did not converge", residual=last_gap)

    tau = math.sqrt(t2)
    risk, u = risk_at(tau)
    h_scale = tau / math.sqrt(cdelta)
    a = u / h_scale
    xi = None
    if want_xi:
        nu_equiv = 1.0 / u  # prox parameter u corresponds to s = 1/nu
        xi = _square_loss_xi(unit, cdelta, c, sigma2, tau, nu_equiv, signal, cfg, tol)
    return LsqSolution(tau=tau, a=a, xi=xi)


# ---------------------------------------------------------------------------
# general-loss systems
# ---------------------------------------------------------------------------

def _sys2_to_solution(loss, reg, cdelta, sigma2, lsq, signal, noise, cfg) -> SystemSolution:
    nu = _sys2_nu(reg, cdelta, lsq.tau, signal, cfg)
    kappa = cdelta / nu - 1.0
    beta = lsq.tau * nu / math.sqrt(cdelta)
    alpha = math.sqrt(max(lsq.tau ** 2 - sigma2, 0.0))
    sol = SystemSolution(alpha=alpha, beta=beta, kappa=kappa, nu=nu, residual=0.0)
    defect = system1a_defect(loss, reg, cdelta, signal, noise, cfg, sol)
    return SystemSolution(alpha=alpha, beta=beta, kappa=kappa, nu=nu, residual=defect)


def solve_sys3(
    loss: LossSpec,
    lam_ridge: float,
    cdelta: float,
    signal: SignalDist,
    noise: NoiseDist,
    cfg: QuadratureConfig,
    *,
    tol: float = 1e-11,
    max_iter: int = 600,
) -> SystemSolution:
    """Ridge-penalized general-loss system, reduced to two scalars (alpha, kappa).

    beta and nu follow algebraically: beta^2 = alpha^2/kappa^2 - lam^2 E[Theta^2],
    nu = 1/kappa - lam.
    """
    if lam_ridge <= 0:
        raise ValueError(f"ridge level must be positive, got {lam_ridge}")
    _check_degenerate(signal, noise)
    r2 = signal.second_moment()
    if not math.isfinite(r2):
        raise ValueError("ridge system requires a finite signal second moment")

    alpha, kappa = _init_alpha_kappa(loss, lam_ridge, cdelta, signal, noise, cfg)
    omega, best = 1.0, math.inf
    for _ in range(max_iter):
        m2, mg = _loss_moments(loss, alpha, kappa, noise, cfg)
        res = max(
            abs(alpha ** 2 - cdelta * kappa ** 2 * m2 - lam_ridge ** 2 * kappa ** 2 * r2),
            abs(alpha * (1.0 - lam_ridge * kappa) - cdelta * kappa * mg),
        )
        if res < tol:
            break
        alpha_t = kappa * math.sqrt(cdelta * m2 + lam_ridge ** 2 * r2)
        kappa_t = alpha / (cdelta * mg + lam_ridge * alpha)
        if res > best:
            omega = max(omega / 2.0, 1e-3)
        best = min(best, res)
        alpha = max((1.0 - omega) * alpha + omega * alpha_t, 1e-12)
        kappa = max((1.0 - omega) * kappa + omega * kappa_t, 1e-12)
    else:
        raise NoConvergenceError(
            "ridge-penalized system did not converge", iterate=(alpha, kappa), residual=best
        )

    beta2 = alpha ** 2 / kappa ** 2 - lam_ridge ** 2 * r2
    if beta2 <= 0:
        raise ArithmeticError(
            f"beta^2 = {beta2} <= 0 from roundoff (alpha={alpha}, kappa={kappa})"
        )
    sol = SystemSolution(
        alpha=alpha,
        beta=math.sqrt(beta2),
        kappa=kappa,
        nu=1.0 / kappa - lam_ridge,
        residual=0.0,
    )
    defect = system1a_defect(loss, Ridge(lam_ridge), cdelta, signal, noise, cfg, sol)
    return SystemSolution(sol.alpha, sol.beta, sol.kappa, sol.nu, residual=defect)


def _init_alpha_kappa(loss, lam, cdelta, signal, noise, cfg):
    """Initial point from the square-loss/ridge solution at matched moments."""
    s2 = noise.second_moment()
    if not math.isfinite(s2):
        s2 = getattr(noise, "scale", 1.0) ** 2 * 3.0
    try:
        lsq = solve_sys2(Ridge(lam), cdelta, s2, signal, cfg)
        nu = _sys2_nu(Ridge(lam), cdelta, lsq.tau, signal, cfg)
        alpha0 = math.sqrt(max(lsq.tau ** 2 - s2, 1e-8))
        kappa0 = cdelta / nu - 1.0
        return alpha0, kappa0
    except Exception:
        return max(math.sqrt(signal.second_moment() + min(s2, 10.0)), 0.1), 1.0


def _solve_sys1a_generic(loss, reg, cdelta, signal, noise, cfg, tol, max_iter):
    lam1, lam2 = reg_levels(reg)
    if is_null_penalty(reg) and cdelta <= 1:
        raise ValueError("unpenalized fits need cdelta > 1; use solve_sys4 for interpolators")
    alpha, kappa = _init_alpha_kappa(loss, max(lam1, lam2, 1.0), cdelta, signal, noise, cfg)
    beta = nu = None
    omega, best = 1.0, math.inf
    for _ in range(max_iter):
        m2, mg = _loss_moments(loss, alpha, kappa, noise, cfg)
        beta = math.sqrt(cdelta * m2)
        nu = cdelta * mg / alpha
        a2, kb = _reg_moments(reg, beta / nu, 1.0 / nu, signal, cfg)
        res = max(abs(a2 - alpha ** 2), abs(kb - kappa * beta))
        if res < tol:
            break
        alpha_t = math.sqrt(a2)
        kappa_t = kb / beta
        if res > best:
            omega = max(omega / 2.0, 1e-3)
        best = min(best, res)
        alpha = max((1.0 - omega) * alpha + omega * alpha_t, 1e-12)
        kappa = max((1.0 - omega) * kappa + omega * kappa_t, 1e-12)
    else:
        raise NoConvergenceError(
            "generic system did not converge",
            iterate=(alpha, beta, kappa, nu),
            residual=best,
        )
    sol = SystemSolution(alpha=alpha, beta=beta, kappa=kappa, nu=nu, residual=0.0)
    defect = system1a_defect(loss, reg, cdelta, signal, noise, cfg, sol)
    return SystemSolution(alpha, beta, kappa, nu, residual=defect)


def solve_sys1a(
    loss: LossSpec,
    reg: RegSpec,
    cdelta: float,
    signal: SignalDist,
    noise: NoiseDist,
    cfg: QuadratureConfig,
    *,
    tol: float = 1e-11,
    max_iter: int = 600,
    method: str = "auto",
) -> SystemSolution:
    """Solve the four-scalar single-estimator system for (alpha, beta, kappa, nu).

    method="auto" routes square loss through the (tau, a) system and ridge
    penalties through the reduced ridge system; method="generic" forces the
    damped fixed-point on the raw equations.
    """
    if cdelta <= 0:
        raise ValueError(f"cdelta must be positive, got {cdelta}")
    _check_degenerate(signal, noise)
    if method == "generic":
        return _solve_sys1a_generic(loss, reg, cdelta, signal, noise, cfg, tol, max_iter)
    if method != "auto":
        raise ValueError(f"unknown method {method!r}")
    if isinstance(loss, Square):
        sigma2 = noise.second_moment()
        if not math.isfinite(sigma2):
            raise ValueError("square loss requires a finite noise second moment")
        lsq = solve_sys2(reg, cdelta, sigma2, signal, cfg)
        return _sys2_to_solution(loss, reg, cdelta, sigma2, lsq, signal, noise, cfg)
    if isinstance(reg, Ridge) and reg.lam1 > 0:
        return solve_sys3(loss, reg.lam1, cdelta, signal, noise, cfg, tol=tol, max_iter=max_iter)
    return _solve_sys1a_generic(loss, reg, cdelta, signal, noise, cfg, tol, max_iter)


# ---------------------------------------------------------------------------
# pair system
# ---------------------------------------------------------------------------

def eval_F_loss(
    eta_g: float,
    sol_a: SystemSolution,
    sol_b: SystemSolution,
    c_a: float,
    c_b: float,
    loss_a: LossSpec,
    loss_b: LossSpec,
    noise: NoiseDist,
    cfg: QuadratureConfig,
) -> float:
    """Loss-side map: sqrt(c c~) times the envelope-gradient correlation.

    Numerator and denominators share one tensor measure so the
    Cauchy-Schwarz bound |F| <= sqrt(c c~) holds to machine precision.
    """
    fa = lambda z, g: env_prime(loss_a, z + sol_a.alpha * g, sol_a.kappa)  # noqa: E731
    fb = lambda z, gt: env_prime(loss_b, z + sol_b.alpha * gt, sol_b.kappa)  # noqa: E731
    num = expect_corr_pair(lambda z, g, gt: fa(z, g) * fb(z, gt), eta_g, cfg, noise)
    den_a = expect_noise_g(lambda z, g: fa(z, g) ** 2, cfg, noise)
    den_b = expect_corr_pair(lambda z, g, gt: fb(z, gt) ** 2, eta_g, cfg, noise)
    return math.sqrt(c_a * c_b) * num / math.sqrt(den_a * den_b)


def eval_F_reg(
    eta_h: float,
    sol_a: SystemSolution,
    sol_b: SystemSolution,
    reg_a: RegSpec,
    reg_b: RegSpec,
    signal: SignalDist,
    cfg: QuadratureConfig,
) -> float:
    """Penalty-side map: correlation of the two prox errors.

    As in eval_F_loss, one shared tensor measure keeps |F| <= 1 exact.
    """
    err_a = _prox_err(reg_a, sol_a.beta / sol_a.nu, 1.0 / sol_a.nu)
    err_b = _prox_err(reg_b, sol_b.beta / sol_b.nu, 1.0 / sol_b.nu)
    num = expect_theta_pair(
        lambda th, h, ht: err_a(th, h) * err_b(th, ht), eta_h, cfg, signal
    )
    den_a = expect_theta_h(lambda th, h: err_a(th, h) ** 2, cfg, signal)
    den_b = expect_theta_pair(
        lambda th, h, ht: err_b(th, ht) ** 2, eta_h, cfg, signal
    )
    return num / math.sqrt(den_a * den_b)


def solve_sys1b(
    sol_a: SystemSolution,
    sol_b: SystemSolution,
    c_a: float,
    c_b: float,
    loss_a: LossSpec,
    loss_b: LossSpec,
    reg_a: RegSpec,
    reg_b: RegSpec,
    signal: SignalDist,
    noise: NoiseDist,
    cfg: QuadratureConfig,
    *,
    tol: float = 1e-10,
    max_iter: int = 200,
) -> CorrSolution:
    """Iterate eta_h <- F_loss(F_reg(eta_h)) from 0; geometric with rate min{c, c~}."""
    if min(c_a, c_b) >= 1.0:
        raise ContractionUnavailableError(
            f"contraction hypothesis min(c, c~) < 1 violated (c={c_a}, c~={c_b})"
        )

    def F_reg(eta_h):
        return eval_F_reg(eta_h, sol_a, sol_b, reg_a, reg_b, signal, cfg)

    def F_loss(eta_g):
        return eval_F_loss(eta_g, sol_a, sol_b, c_a, c_b, loss_a, loss_b, noise, cfg)

    eta_h = 0.0
    iterates = [eta_h]
    for k in range(max_iter):
        eta_h_new = F_loss(F_reg(eta_h))
        iterates.append(eta_h_new)
        done = abs(eta_h_new - eta_h) < tol
        eta_h = eta_h_new
        if done:
            break
    else:
        raise NoConvergenceError("pair system did not converge", iterate=eta_h)
    return CorrSolution(
        eta_g=F_reg(eta_h), eta_h=eta_h, iterations=k + 1, iterates=tuple(iterates)
    )


def sign_pattern(
    sol_a: SystemSolution,
    sol_b: SystemSolution,
    c_a: float,
    c_b: float,
    loss_a: LossSpec,
    loss_b: LossSpec,
    reg_a: RegSpec,
    reg_b: RegSpec,
    signal: SignalDist,
    noise: NoiseDist,
    cfg: QuadratureConfig,
) -> tuple[int, int]:
    """Signs of (eta_g, eta_h): (sign F_reg(F_loss(0)), sign F_loss(F_reg(0)))."""
    fl0 = eval_F_loss(0.0, sol_a, sol_b, c_a, c_b, loss_a, loss_b, noise, cfg)
    fg0 = eval_F_reg(0.0, sol_a, sol_b, reg_a, reg_b, signal, cfg)
    g_val = eval_F_reg(fl0, sol_a, sol_b, reg_a, reg_b, signal, cfg)
    h_val = eval_F_loss(fg0, sol_a, sol_b, c_a, c_b, loss_a, loss_b, noise, cfg)

    def sgn(x):
        return 0 if x == 0.0 else (1 if x > 0 else -1)

    return sgn(g_val), sgn(h_val)


# ---------------------------------------------------------------------------
# ensemble risk assembly
# ---------------------------------------------------------------------------

def homogeneous_risk(alpha2: float, eta_g: float, M) -> float:
    """R_M = R_1/M + (1 - 1/M) R_inf with R_1 = alpha^2, R_inf = eta_g alpha^2."""
    if M == math.inf:
        return eta_g * alpha2
    if M < 1 or int(M) != M:
        raise ValueError(f"M must be a positive integer or inf, got {M}")
    return alpha2 / M + (1.0 - 1.0 / M) * eta_g * alpha2


def ensemble_risk(
    config: EnsembleConfig,
    solutions: Sequence[SystemSolution],
    corr: Mapping[tuple[int, int], CorrSolution] | CorrSolution | None,
) -> float:
    """Asymptotic risk of the M-ensemble from per-component solutions and pair correlations.

    Homogeneous configs take a single CorrSolution (or None when M = 1);
    heterogeneous configs need corr[(m, l)] for every unordered pair.
    """
    if config.homogeneous:
        alpha2 = solutions[0].alpha ** 2
        if config.M == 1:
            return alpha2
        _, _, c = config.components[0]
        if c == 1.0:
            # identical full-sample components: the average is the single fit
            return alpha2
        if corr is None:
            raise ValueError("homogeneous M > 1 requires the pair correlation")
        if not isinstance(corr, CorrSolution):
            corr = corr[(0, 0)] if (0, 0) in corr else next(iter(corr.values()))
        return homogeneous_risk(alpha2, corr.eta_g, config.M)

    M = len(config.components)
    if config.M != M:
        raise ValueError(
            f"heterogeneous config needs M = len(components), got M={config.M} with {M}"
        )
    total = sum(sol.alpha ** 2 for sol in solutions)
    missing = []
    for m in range(M):
        for l in range(M):
            if m == l:
                continue
            pair = corr.get((m, l)) or corr.get((l, m)) if corr else None
            if pair is None:
                missing.append((m, l))
                continue
            total += pair.eta_g * solutions[m].alpha * solutions[l].alpha
    if missing:
        raise ValueError(f"missing pair correlations for {sorted(set(map(tuple, map(sorted, missing))))}")
    return total / (M * M)
