"""Benchmark the compiled coordinate-descent kernel against the numpy fallback.

Usage: python benchmarks/bench_solvers.py
"""

from __future__ import annotations

import time

import numpy as np

from subag import _cd_py
from subag.fitting import CD_BACKEND, _cd_fit, _fista
from subag.prox import Lasso, Square

try:
    from subag import _cdfast
except ImportError:
    _cdfast = None


def _bench_kernel(kernel, X, y, lam2, repeats=3):
    Xf = np.asfortranarray(X)
    col_sq = np.einsum("ij,ij->j", Xf, Xf)
    best = np.inf
    for _ in range(repeats):
        w = np.zeros(X.shape[1])
        r = y - X @ w
        t0 = time.perf_counter()
        passes = kernel(Xf, 0.0, lam2, w, r, col_sq, 5000, 1e-12)
        best = min(best, time.perf_counter() - t0)
    return best, passes, w


def main():
    rng = np.random.default_rng(0)
    print(f"active fit backend: {CD_BACKEND}")
    print(f"{'n':>6} {'p':>5} {'lam2':>8} {'cython':>10} {'python':>10} {'speedup':>8} {'fista':>10}")
    for n, p, lam2 in [(400, 200, 0.05), (1000, 200, 0.01), (2000, 200, 0.001), (200, 500, 0.01)]:
        X = rng.standard_normal((n, p)) / np.sqrt(p)
        theta = np.where(rng.random(p) < 0.1, 2.0, 0.0)
        y = X @ theta + rng.standard_normal(n)

        rows = {}
        if _cdfast is not None:
            rows["cython"], passes_c, w_c = _bench_kernel(_cdfast.cd_enet, X, y, lam2)
        rows["python"], passes_p, w_p = _bench_kernel(_cd_py.cd_enet, X, y, lam2)
        if _cdfast is not None:
            assert np.allclose(w_c, w_p, atol=1e-9), "backends disagree"

        t0 = time.perf_counter()
        _fista(X, y, Square(), Lasso(lam2), np.zeros(p), 1e-8, 100_000)
        t_fista = time.perf_counter() - t0

        t_cy = rows.get("cython", float("nan"))
        t_py = rows["python"]
        print(
            f"{n:>6} {p:>5} {lam2:>8} {t_cy:>9.4f}s {t_py:>9.4f}s "
            f"{t_py / t_cy if t_cy == t_cy else float('nan'):>7.1f}x {t_fista:>9.4f}s"
        )


if __name__ == "__main__":
    main()
