# cython: boundscheck=False, wraparound=False, cdivision=True
"""Cyclic coordinate descent for 0.5||y - Xw||^2 + lam1/2 ||w||^2 + lam2 ||w||_1.

Hot kernel of the fitting engine; X must be Fortran-ordered so column sweeps
are contiguous.  The residual r = y - Xw is maintained in place.
"""

from libc.math cimport fabs


def cd_enet(double[::1, :] X, double lam1, double lam2,
            double[::1] w, double[::1] r, double[::1] col_sq,
            int max_pass, double wtol):
    """Run up to max_pass sweeps; return passes used.  w and r update in place."""
    cdef Py_ssize_t n = X.shape[0]
    cdef Py_ssize_t p = X.shape[1]
    cdef Py_ssize_t i, j, it
    cdef double wj, rho, wnew, d, maxd, denom

    for it in range(max_pass):
        maxd = 0.0
        for j in range(p):
            denom = col_sq[j] + lam1
            if denom <= 0.0:
                continue
            wj = w[j]
            rho = col_sq[j] * wj
            for i in range(n):
                rho += X[i, j] * r[i]
            if rho > lam2:
                wnew = (rho - lam2) / denom
            elif rho < -lam2:
                wnew = (rho + lam2) / denom
            else:
                wnew = 0.0
            d = wnew - wj
            if d != 0.0:
                for i in range(n):
                    r[i] -= X[i, j] * d
                w[j] = wnew
                if fabs(d) > maxd:
                    maxd = fabs(d)
        if maxd <= wtol:
            return it + 1
    return max_pass
