"""Pure-numpy fallback for the coordinate-descent kernel.

Same contract and sweep order as the compiled version in _cdfast.pyx, so the
two backends produce identical iterates up to floating-point associativity.
"""

from __future__ import annotations

import numpy as np


def cd_enet(X, lam1, lam2, w, r, col_sq, max_pass, wtol):
    """Run up to max_pass sweeps; return passes used.  w and r update in place."""
    p = X.shape[1]
    for it in range(max_pass):
        maxd = 0.0
        for j in range(p):
            denom = col_sq[j] + lam1
            if denom <= 0.0:
                continue
            xj = X[:, j]
            rho = col_sq[j] * w[j] + xj @ r
            if rho > lam2:
                wnew = (rho - lam2) / denom
            elif rho < -lam2:
                wnew = (rho + lam2) / denom
            else:
                wnew = 0.0
            d = wnew - w[j]
            if d != 0.0:
                r -= xj * d
                w[j] = wnew
                maxd = max(maxd, abs(d))
        if maxd <= wtol:
            return it + 1
    return max_pass
