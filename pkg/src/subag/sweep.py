"""Grid evaluation: theory cells, empirical cells, and the tidy row schema.

A cell is one (lam, rho, c) combination; every ensemble size M in the grid
becomes its own output row.  Empirical replications fit max(M) components
once and reuse prefixes for the smaller ensemble sizes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import product

import numpy as np

from .config import ExperimentConfig, effective_loss, effective_reg, primary_level
from .dof import compute_df
from .errors import DegenerateCorrectionError
from .fitting import FitOptions, draw_subsamples, fit
from .models import gen_data
from .prox import Lasso, NoPenalty, Ridge, Square, is_null_penalty
from .risk_estimator import _corrected_residual
from .systems import (
    _sys2_nu,
    homogeneous_risk,
    solve_sys1a,
    solve_sys1b,
    solve_sys2,
    solve_sys4,
)

BASE_COLUMNS = (
    "delta", "c", "lambda", "M", "alpha2", "eta_g", "eta_h",
    "R1", "Rinf", "RM", "tau", "a", "xi", "status",
)
THEORY_EXTRAS = ("beta", "kappa", "nu")
EMPIRICAL_EXTRAS = ("emp_risk", "emp_se", "est_mean", "est_se", "reps")


def columns_for(config: ExperimentConfig) -> tuple[str, ...]:
    cols = list(BASE_COLUMNS)
    if config.rho_grid is not None:
        cols.append("rho")
    if config.needs_theory:
        cols.extend(THEORY_EXTRAS)
    if config.needs_empirical:
        cols.extend(EMPIRICAL_EXTRAS)
    return tuple(cols)


@dataclass(frozen=True)
class Cell:
    index: int
    lam: float | None
    rho: float | None
    c: float


def cells_for(config: ExperimentConfig) -> list[Cell]:
    lam_axis = config.lam_grid if config.lam_grid is not None else [None]
    rho_axis = config.rho_grid if config.rho_grid is not None else [None]
    return [
        Cell(index=i, lam=lam, rho=rho, c=c)
        for i, (lam, rho, c) in enumerate(product(lam_axis, rho_axis, config.c_grid))
    ]


# ---------------------------------------------------------------------------
# theory
# ---------------------------------------------------------------------------

def theory_cell(config: ExperimentConfig, cell: Cell) -> dict:
    """Solve the systems for one cell; returns the theory column values."""
    loss = effective_loss(config.loss, cell.rho)
    reg = effective_reg(config.reg, cell.lam)
    delta, c = config.delta, cell.c
    cdelta = c * delta
    signal, noise, q = config.signal, config.noise, config.quadrature

    if isinstance(loss, Square):
        sigma2 = noise.second_moment()
        if not math.isfinite(sigma2):
            raise ValueError("square loss requires a finite noise second moment")
        if is_null_penalty(reg):
            if isinstance(reg, Ridge):
                kind = "ridgeless"
            elif isinstance(reg, Lasso):
                kind = "lassoless"
            elif isinstance(reg, NoPenalty) and cdelta > 1:
                kind = "ridgeless"  # least squares; limit shape is irrelevant
            else:
                raise ValueError(
                    "interpolator type is ambiguous for a null penalty with c*delta <= 1"
                )
            lsq = solve_sys4(kind, c, delta, sigma2, signal, q, want_xi=True)
        else:
            lsq = solve_sys2(reg, cdelta, sigma2, signal, q, c=c, want_xi=True)
        tau, a, xi = lsq.tau, lsq.a, lsq.xi
        alpha2 = tau ** 2 - sigma2
        r1 = alpha2
        rinf = xi ** 2 - sigma2
        eta_g = rinf / alpha2 if alpha2 > 0 else 1.0
        eta_h = c * xi ** 2 / tau ** 2
        if is_null_penalty(reg):
            if cdelta > 1:  # least squares
                nu = cdelta - 1.0
                kappa = 1.0 / (cdelta - 1.0)
                beta = tau * nu / math.sqrt(cdelta)
            else:  # interpolator: zero residuals in the limit
                beta, nu, kappa = 0.0, 0.0, math.inf
        else:
            nu = _sys2_nu(reg, cdelta, tau, signal, q)
            kappa = cdelta / nu - 1.0
            beta = tau * nu / math.sqrt(cdelta)
        out = {
            "alpha2": alpha2, "eta_g": eta_g, "eta_h": eta_h,
            "R1": r1, "Rinf": rinf, "tau": tau, "a": a, "xi": xi,
            "beta": beta, "kappa": kappa, "nu": nu,
        }
    else:
        sol = solve_sys1a(loss, reg, cdelta, signal, noise, q)
        alpha2 = sol.alpha ** 2
        if c < 1.0:
            corr = solve_sys1b(
                sol, sol, c, c, loss, loss, reg, reg, signal, noise, q
            )
            eta_g, eta_h = corr.eta_g, corr.eta_h
        else:
            eta_g, eta_h = 1.0, 1.0  # identical full-sample components
        tau = math.sqrt(cdelta) * sol.beta / sol.nu
        out = {
            "alpha2": alpha2, "eta_g": eta_g, "eta_h": eta_h,
            "R1": alpha2, "Rinf": eta_g * alpha2,
            "tau": tau, "a": None, "xi": None,
            "beta": sol.beta, "kappa": sol.kappa, "nu": sol.nu,
        }
    return out


def risk_for_m(theory: dict, M: float) -> float:
    return homogeneous_risk(theory["alpha2"], theory["eta_g"], M)


# ---------------------------------------------------------------------------
# empirical
# ---------------------------------------------------------------------------

def empirical_cell(config: ExperimentConfig, cell: Cell) -> dict:
    """Simulate, fit prefix ensembles, and average risks (and EST) over replications."""
    loss = effective_loss(config.loss, cell.rho)
    reg = effective_reg(config.reg, cell.lam)
    n, p = config.n, config.p
    k = max(1, round(cell.c * n))
    ms = sorted({int(m) for m in config.m_grid if m != math.inf})
    if not ms:
        return {}
    m_max = ms[-1]
    interpolator = is_null_penalty(reg) and k < p
    opts = FitOptions(interpolator=interpolator)

    risks = {m: [] for m in ms}
    ests = {m: [] for m in ms}
    for r in range(config.replications):
        ss = np.random.SeedSequence([config.base_seed, cell.index, r])
        seed_data, seed_sub = (int(s) for s in ss.generate_state(2, dtype=np.uint64))
        data = gen_data(n, p, config.signal, config.noise, seed_data)
        sets = draw_subsamples(n, [k] * m_max, seed_sub)
        thetas, terms = [], []
        for sset in sets:
            res = fit(data.X[sset.indices], data.y[sset.indices], loss, reg, opts)
            thetas.append(res.theta_hat)
            if config.needs_estimator:
                rep = compute_df(res, data.X[sset.indices], loss, reg)
                try:
                    terms.append(
                        _corrected_residual(
                            data.X, data.y, res.theta_hat, sset.indices,
                            loss, rep.df, rep.tr_v,
                        )
                    )
                except DegenerateCorrectionError:
                    terms.append(None)
        theta_sum = np.zeros(p)
        term_sum = np.zeros(n)
        term_ok = True
        for m_count, (theta, idx) in enumerate(zip(thetas, range(m_max)), start=1):
            theta_sum += theta
            if config.needs_estimator:
                if terms[idx] is None:
                    term_ok = False
                else:
                    term_sum += terms[idx]
            if m_count in risks:
                avg = theta_sum / m_count
                risks[m_count].append(float(np.sum((avg - data.theta_star) ** 2) / p))
                if config.needs_estimator and term_ok:
                    t = term_sum / m_count
                    ests[m_count].append(float(t @ t) / n)
    out = {}
    for m in ms:
        vals = np.asarray(risks[m])
        row = {
            "emp_risk": float(vals.mean()),
            "emp_se": float(vals.std(ddof=1) / math.sqrt(len(vals))) if len(vals) > 1 else 0.0,
            "reps": len(vals),
        }
        if config.needs_estimator and ests[m]:
            evals = np.asarray(ests[m])
            row["est_mean"] = float(evals.mean())
            row["est_se"] = (
                float(evals.std(ddof=1) / math.sqrt(len(evals))) if len(evals) > 1 else 0.0
            )
        out[m] = row
    return out


# ---------------------------------------------------------------------------
# row assembly
# ---------------------------------------------------------------------------

def compute_cell(config: ExperimentConfig, cell: Cell) -> list[dict]:
    """All output rows (one per M) for a single grid cell; failures land in status."""
    theory = None
    status = "ok"
    if config.needs_theory:
        try:
            theory = theory_cell(config, cell)
        except Exception as exc:  # noqa: BLE001 - recorded per row, sweep continues
            status = f"theory_error: {exc}"
    empirical = {}
    if config.needs_empirical:
        try:
            empirical = empirical_cell(config, cell)
        except Exception as exc:  # noqa: BLE001
            status = f"empirical_error: {exc}" if status == "ok" else status + "; empirical failed"

    rows = []
    for M in config.m_grid:
        row = {
            "delta": config.delta,
            "c": cell.c,
            "lambda": cell.lam if cell.lam is not None else primary_level(
                effective_reg(config.reg, cell.lam)
            ),
            "M": "inf" if M == math.inf else int(M),
            "status": status,
        }
        if config.rho_grid is not None:
            row["rho"] = cell.rho
        if theory is not None:
            row.update(theory)
            try:
                row["RM"] = risk_for_m(theory, M)
            except ValueError:
                row["RM"] = None
        emp = empirical.get(int(M)) if M != math.inf else None
        if emp:
            row.update(emp)
        rows.append(row)
    return rows
