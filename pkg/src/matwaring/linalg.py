"""Dense complex matrix substrate.

Eigen/Schur wrappers, a Sylvester solver, subspace and commutant rank
computations, and similarity certificates. Matrices are numpy complex
arrays; everything here targets desk scale (n <= 64).
"""

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .config import DEFAULT_TOLS, Tolerances
from .errors import (
    IllConditionedError,
    SpectraOverlapError,
)


def as_cmatrix(A):
    A = np.asarray(A, dtype=complex)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise ValueError("matrix entries must be finite")
    return A


def fro(A):
    return float(np.linalg.norm(A))


def blkdiag(blocks):
    return scipy.linalg.block_diag(*[as_cmatrix(b) for b in blocks]).astype(complex)


def eigendecompose(A):
    """Complex Schur form. Returns (eigenvalues, schur_form, schur_unitary)
    with A = Q T Q*, Q unitary, T upper triangular, eigenvalues = diag(T)."""
    A = as_cmatrix(A)
    T, Q = scipy.linalg.schur(A, output="complex")
    return np.diag(T).copy(), T, Q


def spectral_gap(eigs1, eigs2):
    """Minimum |lambda_i - mu_j| over the two spectra."""
    d = np.abs(np.subtract.outer(np.asarray(eigs1), np.asarray(eigs2)))
    return float(d.min()) if d.size else np.inf


def sylvester_solve(A1, A2, C, tols: Tolerances = DEFAULT_TOLS):
    """Solve A1 X - X A2 = C. Requires disjoint spectra.

    Uses the Schur-based dense solver; the dense Kronecker linearization is
    kept as an independent oracle in the test suite.
    """
    A1, A2, C = as_cmatrix(A1), as_cmatrix(A2), np.asarray(C, dtype=complex)
    p, q = A1.shape[0], A2.shape[0]
    if C.shape != (p, q):
        raise ValueError(f"C must be {p}x{q}, got {C.shape}")
    e1 = np.linalg.eigvals(A1)
    e2 = np.linalg.eigvals(A2)
    scale = max(np.abs(e1).max(initial=0.0), np.abs(e2).max(initial=0.0))
    gap = spectral_gap(e1, e2)
    if gap <= tols.gap_tol * max(scale, np.finfo(float).tiny):
        raise SpectraOverlapError(
            f"spectra of the operands are not disjoint (gap {gap:.3e}, "
            f"scale {scale:.3e})"
        )
    X = scipy.linalg.solve_sylvester(A1, -A2, C)
    denom = fro(C) or 1.0
    residual = fro(A1 @ X - X @ A2 - C) / denom
    if residual > tols.solve_tol:
        raise IllConditionedError(
            f"Sylvester solve residual {residual:.3e} exceeds {tols.solve_tol:.1e}"
        )
    return X


@dataclass(frozen=True)
class SubspaceBasis:
    """Basis matrices spanning a linear subspace of M_n(C)."""

    n: int
    mats: tuple

    @classmethod
    def from_matrices(cls, mats):
        mats = tuple(as_cmatrix(M) for M in mats)
        if not mats:
            raise ValueError("a subspace basis needs at least one matrix")
        n = mats[0].shape[0]
        for M in mats:
            if M.shape != (n, n):
                raise ValueError("basis matrices must share the ambient size")
        return cls(n, mats)

    def conjugated(self, U):
        U = as_cmatrix(U)
        return SubspaceBasis(self.n, tuple(U @ M @ U.conj().T for M in self.mats))


def _numerical_rank(columns, rank_tol):
    if columns.size == 0:
        return 0
    s = np.linalg.svd(columns, compute_uv=False)
    if s.size == 0 or s[0] == 0:
        return 0
    return int(np.sum(s > rank_tol * s[0]))


def subspace_sum_rank(V1: SubspaceBasis, V2: SubspaceBasis,
                      tols: Tolerances = DEFAULT_TOLS):
    """Numerical rank of the span of V1 together with V2."""
    if V1.n != V2.n:
        raise ValueError("ambient sizes differ")
    cols = np.stack([M.ravel() for M in V1.mats + V2.mats], axis=1)
    return _numerical_rank(cols, tols.rank_tol)


def joint_commutant_dimension(mats, tols: Tolerances = DEFAULT_TOLS):
    """Dimension of {A : AM = MA for every M in mats}.

    Stacks the linearized commutator operators and counts the null space.
    With row-major vec, vec(MA - AM) = (kron(M, I) - kron(I, M^T)) vec(A).
    """
    mats = [as_cmatrix(M) for M in mats]
    if not mats:
        raise ValueError("need at least one matrix")
    n = mats[0].shape[0]
    eye = np.eye(n)
    rows = [np.kron(M, eye) - np.kron(eye, M.T) for M in mats]
    K = np.vstack(rows)
    return n * n - _numerical_rank(K, tols.rank_tol)


def project_traceless(A):
    A = as_cmatrix(A)
    n = A.shape[0]
    return A - (np.trace(A) / n) * np.eye(n)


# ---------------------------------------------------------------------------
# similarity certificates
# ---------------------------------------------------------------------------

@dataclass
class SimilarityCertificate:
    """Explicit invertible T with its inverse, certifying T source T^-1 = target.

    Checkable from stored data alone: residual_inverse = ||T Tinv - I||_F and
    residual_map = ||T source Tinv - target||_F, with condition_estimate =
    ||T||_F ||Tinv||_F.
    """

    t: np.ndarray
    t_inv: np.ndarray
    source: np.ndarray
    target: np.ndarray
    residual_inverse: float
    residual_map: float
    condition_estimate: float
    label: str = ""

    def compose_left(self, S, new_target, tols: Tolerances = DEFAULT_TOLS,
                     label=""):
        """Certificate for (S T) source (S T)^-1 = new_target."""
        return certify_similarity(S @ self.t, self.source, new_target, tols,
                                  label=label)


def certify_similarity(T, source, target, tols: Tolerances = DEFAULT_TOLS,
                       label=""):
    """Build a certificate for T source T^-1 = target, validating both
    residual bounds before returning."""
    T = as_cmatrix(T)
    source = as_cmatrix(source)
    target = as_cmatrix(target)
    n = T.shape[0]
    T_inv = np.linalg.inv(T)
    residual_inverse = fro(T @ T_inv - np.eye(n))
    cond = fro(T) * fro(T_inv)
    residual_map = fro(T @ source @ T_inv - target)
    cert = SimilarityCertificate(T, T_inv, source, target, residual_inverse,
                                 residual_map, cond, label)
    if residual_inverse > tols.cert_tol:
        raise IllConditionedError(
            f"certificate inverse residual {residual_inverse:.3e} exceeds "
            f"{tols.cert_tol:.1e} ({label or 'unlabeled'})"
        )
    if residual_map > tols.cert_tol * cond * fro(source):
        raise IllConditionedError(
            f"certificate map residual {residual_map:.3e} exceeds bound "
            f"({label or 'unlabeled'})"
        )
    return cert


# ---------------------------------------------------------------------------
# block-triangular similarity (diagonal blocks with pairwise disjoint spectra)
# ---------------------------------------------------------------------------

def _block_slices(sizes):
    edges = np.concatenate([[0], np.cumsum(sizes)])
    return [slice(int(a), int(b)) for a, b in zip(edges[:-1], edges[1:])]


def _check_strictly_block_upper(off, slices, scale):
    n = off.shape[0]
    mask = np.ones((n, n), dtype=bool)
    for i, si in enumerate(slices):
        for j, sj in enumerate(slices):
            if j > i:
                mask[si, sj] = False
    bad = np.abs(off[mask]).max(initial=0.0)
    if bad > 1e-13 * max(scale, 1.0):
        raise ValueError("off-diagonal part must vanish on and below the "
                         f"block diagonal (max violation {bad:.3e})")


def _unit_upper_transform(blocks, off, slices, tols):
    """T with T blkdiag(blocks) T^-1 = blkdiag + off, T unit block upper."""
    k = len(blocks)
    n = off.shape[0]
    if k == 1:
        return np.eye(n, dtype=complex)
    s0 = slices[0]
    rest = slice(s0.stop, n)
    sub_slices = [slice(s.start - s0.stop, s.stop - s0.stop) for s in slices[1:]]
    T22 = _unit_upper_transform(blocks[1:], off[rest, rest], sub_slices, tols)
    D2 = blkdiag(blocks[1:])
    C1r = off[s0, rest]
    X = sylvester_solve(blocks[0], D2, -C1r @ T22, tols)
    T = np.eye(n, dtype=complex)
    T[s0, rest] = X
    T[rest, rest] = T22
    return T


def block_triangular_similarity(blocks, off_diag, orientation="upper",
                                tols: Tolerances = DEFAULT_TOLS):
    """Certify blkdiag(blocks) similar to blkdiag + off_diag.

    off_diag must be strictly block upper (or lower) triangular in the block
    pattern of `blocks`; spectra of the blocks must be pairwise disjoint.
    The transform is I + N with N strictly block triangular, assembled from
    pairwise Sylvester solves.
    """
    blocks = [as_cmatrix(b) for b in blocks]
    off = as_cmatrix(off_diag)
    sizes = [b.shape[0] for b in blocks]
    n = int(sum(sizes))
    if off.shape != (n, n):
        raise ValueError(f"off-diagonal part must be {n}x{n}")
    if orientation not in ("upper", "lower"):
        raise ValueError("orientation must be 'upper' or 'lower'")

    spectra = [np.linalg.eigvals(b) for b in blocks]
    scale = max((np.abs(e).max(initial=0.0) for e in spectra), default=0.0)
    for i in range(len(blocks)):
        for j in range(i + 1, len(blocks)):
            gap = spectral_gap(spectra[i], spectra[j])
            if gap <= tols.gap_tol * max(scale, np.finfo(float).tiny):
                raise SpectraOverlapError(
                    f"blocks {i} and {j} have overlapping spectra (gap {gap:.3e})"
                )

    slices = _block_slices(sizes)
    if orientation == "upper":
        _check_strictly_block_upper(off, slices, fro(off))
        T = _unit_upper_transform(blocks, off, slices, tols)
    else:
        _check_strictly_block_upper(off.T, slices, fro(off))
        S = _unit_upper_transform([b.T for b in blocks], off.T, slices, tols)
        T = np.linalg.inv(S).T

    D = blkdiag(blocks)
    return certify_similarity(T, D, D + off, tols,
                              label=f"block-triangular-{orientation}")
