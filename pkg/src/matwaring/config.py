"""Tolerance settings shared across the package.

All tolerances are relative unless stated otherwise; the quantity they are
measured against is documented on the operation that uses them.
"""

from dataclasses import dataclass, replace


@dataclass(frozen=True)
class Tolerances:
    # minimum admissible eigenvalue gap, relative to the spectral scale
    gap_tol: float = 1e-8
    # numerical-rank cutoff, relative to the largest singular value
    rank_tol: float = 1e-10
    # Sylvester solve relative residual
    solve_tol: float = 1e-10
    # similarity certificates: inverse residual and (condition-weighted) map residual
    cert_tol: float = 1e-9
    # eigenvalue clustering, relative to max |eigenvalue|
    cluster_tol: float = 1e-7
    # zero-diagonal forms: |M_ii| <= hollow_tol * ||M||_F, and the trace-zero gate
    hollow_tol: float = 1e-8
    # hollow-split reconstruction residual, relative to max(1, ||M||_F)
    split_tol: float = 1e-9
    # end-to-end decomposition residual, relative to max(1, ||target||_F)
    end_tol: float = 1e-6
    # spectra comparison after similarity steps
    eig_tol: float = 1e-6
    # nonzero-trace witness gate, relative to max(1, ||image||_F)
    trace_tol: float = 1e-8

    def with_overrides(self, **kwargs) -> "Tolerances":
        return replace(self, **kwargs)


DEFAULT_TOLS = Tolerances()

# polynomial classification defaults
CLASSIFY_TOL = 1e-8
CLASSIFY_SAMPLES = 32
CLASSIFY_KMAX = 4

DEFAULT_BUDGET = 1000
