"""Shared exception types for solvers and the fitting engine."""

from __future__ import annotations


class NoConvergenceError(RuntimeError):
    """An iterative solver hit its iteration cap.

    Carries the last iterate and the residual/KKT defect at that point.
    """

    def __init__(self, message: str, iterate=None, residual: float | None = None):
        super().__init__(message)
        self.iterate = iterate
        self.residual = residual


class PerfectRecoveryError(ValueError):
    """Zero signal and zero noise: the system solution is not unique."""


class ContractionUnavailableError(ValueError):
    """min{c, c~} = 1 violates the contraction hypothesis of the pair system."""


class InterpolationThresholdError(ValueError):
    """c * delta = 1: single-estimator risk diverges at the interpolation threshold."""


class DegenerateCorrectionError(ValueError):
    """Residual degrees of freedom vanish; the risk-estimator correction is undefined."""


class EnsembleFitError(RuntimeError):
    """One or more component fits failed; lists the failing component indices."""

    def __init__(self, failures: dict):
        self.failures = failures
        detail = ", ".join(f"m={m}: {exc}" for m, exc in failures.items())
        super().__init__(f"component fits failed ({detail})")
