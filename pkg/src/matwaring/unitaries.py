"""Explicit unitary machinery for splitting hollow matrices.

Builds the rank-one projector family R_q, the decoupling unitary U whose
joint commutant with the pattern projectors collapses to the diagonal
matrices, and the splitting M = C1 + U C2 U* of any hollow matrix into two
members of the hollow-block subspace V(pattern).

A pattern is either (h, h) with h = n/2 (two equal blocks, n even) or
(p, q, r) with p + q + r = n and p, q, r < n/2.
"""

from dataclasses import dataclass

import numpy as np

from .config import DEFAULT_TOLS, Tolerances
from .errors import ResidualTooLargeError
from .linalg import SubspaceBasis, as_cmatrix, fro


@dataclass(frozen=True)
class ProjectorPair:
    """2x2 rank-one idempotent [[q, s],[s, 1-q]] with s = sign * sqrt(q(1-q))."""

    q: float
    sign: int
    matrix: np.ndarray


@dataclass(frozen=True)
class ParameterAssignment:
    """Rotation parameters: qs and ts jointly distinct, the reflections 1-t
    jointly distinct from ss; with the odd corner all values (and 1-t) avoid
    1/2 and 1/3."""

    qs: tuple
    ts: tuple
    ss: tuple


@dataclass(frozen=True)
class DecouplingLayout:
    """Bookkeeping for the permuted frame.

    perm[i] is the original index sitting at permuted position i; cells lists
    the 2x2 (or corner 3x3) groups with their rotation parameter.
    """

    perm: tuple
    cells: tuple
    params: ParameterAssignment
    corner: bool


@dataclass
class HollowSplit:
    """M = c1 + U c2 U* with c1, c2 vanishing on the pattern's diagonal blocks."""

    u: np.ndarray
    pattern: tuple
    c1: np.ndarray
    c2: np.ndarray
    residual: float


def make_projector(q, sign="+"):
    if not 0 < q < 1:
        raise ValueError(f"q must lie in (0, 1), got {q}")
    s = {"+": 1, "-": -1, 1: 1, -1: -1}[sign]
    root = np.sqrt(q * (1 - q))
    M = np.array([[q, s * root], [s * root, 1 - q]], dtype=complex)
    return ProjectorPair(float(q), s, M)


def conjugating_rotation(q):
    """Real orthogonal G with G P2 G* = R_q, where P2 = diag(1, 0).

    The complement transforms as G (I - P2) G* = I - R_q, which equals the
    minus-signed projector at parameter 1 - q."""
    if not 0 < q < 1:
        raise ValueError(f"q must lie in (0, 1), got {q}")
    a, b = np.sqrt(q), np.sqrt(1 - q)
    return np.array([[a, -b], [b, a]], dtype=complex)


def corner_unitary():
    """The 3x3 unitary taking diag(1,0,0) and diag(0,1,0) to the explicit
    rank-one projections K0 and L0 used in the odd-size construction."""
    u1 = np.array([1, 1, 0], dtype=complex) / np.sqrt(2)
    u2 = np.array([1, -1, 1], dtype=complex) / np.sqrt(3)
    u3 = np.array([1, -1, -2], dtype=complex) / np.sqrt(6)
    return np.column_stack([u1, u2, u3])


CORNER_K0 = np.array([[0.5, 0.5, 0.0], [0.5, 0.5, 0.0], [0.0, 0.0, 0.0]],
                     dtype=complex)
CORNER_L0 = np.array([[1, -1, 1], [-1, 1, -1], [1, -1, 1]], dtype=complex) / 3.0

_EXCLUDED = (0.5, 1 / 3, 2 / 3)


def assign_parameters(r1, r2, r3, odd_corner=False):
    """Deterministic rotation parameters satisfying all distinctness rules.

    Takes the grid i/d, drops 1/2, 1/3 and 2/3 (which also keeps every
    reflection 1-t away from 1/2 and 1/3), assigns qs then ts, then fills ss
    skipping any value colliding with a reflection. The grid grows until all
    three lists are filled; the invariants are re-verified before returning.
    """
    if min(r1, r2, r3) < 0:
        raise ValueError("counts must be nonnegative")
    need = r1 + r2 + r3
    d = need + 2
    while True:
        pool = [i / d for i in range(1, d)]
        pool = [x for x in pool if all(abs(x - e) > 1e-12 for e in _EXCLUDED)]
        qs = pool[:r1]
        ts = pool[r1 : r1 + r2]
        ss = []
        reflections = {round(1 - t, 15) for t in ts}
        for x in pool[r1 + r2 :]:
            if len(ss) == r3:
                break
            if round(x, 15) not in reflections:
                ss.append(x)
        if len(qs) == r1 and len(ts) == r2 and len(ss) == r3:
            break
        d += 1
    assignment = ParameterAssignment(tuple(qs), tuple(ts), tuple(ss))
    _verify_assignment(assignment, odd_corner)
    return assignment


def _verify_assignment(a, odd_corner):
    joint = list(a.qs) + list(a.ts)
    if len(set(joint)) != len(joint):
        raise AssertionError(f"qs and ts collide: {a}")
    refl = [1 - t for t in a.ts] + list(a.ss)
    if len({round(x, 15) for x in refl}) != len(refl):
        raise AssertionError(f"reflections of ts collide with ss: {a}")
    if odd_corner:
        for x in joint + list(a.ss) + [1 - t for t in a.ts]:
            if any(abs(x - e) <= 1e-12 for e in (0.5, 1 / 3)):
                raise AssertionError(f"odd-corner exclusion violated: {a}")
    for x in joint + list(a.ss):
        if not 0 < x < 1:
            raise AssertionError(f"parameter out of (0,1): {a}")


def _validate_pattern(n, pattern):
    pattern = tuple(int(s) for s in pattern)
    if any(s < 1 for s in pattern) or sum(pattern) != n:
        raise ValueError(f"pattern {pattern} must have positive sizes summing to {n}")
    if len(pattern) == 2:
        if n % 2 or pattern != (n // 2, n // 2):
            raise ValueError(f"two-block pattern must be (n/2, n/2), got {pattern}")
    elif len(pattern) == 3:
        if any(2 * s >= n for s in pattern):
            raise ValueError(f"three-block pattern {pattern} needs p, q, r < n/2")
    else:
        raise ValueError(f"pattern must have 2 or 3 blocks, got {pattern}")
    return pattern


def pattern_projectors(n, pattern):
    """The diagonal 0/1 projectors whose commutant cuts out V(pattern)-perp:
    one for (h, h), two for (p, q, r)."""
    pattern = _validate_pattern(n, pattern)
    if len(pattern) == 2:
        h = pattern[0]
        return [np.diag([1.0] * h + [0.0] * h).astype(complex)]
    p, q, _ = pattern
    d1 = [1.0] * p + [0.0] * (n - p)
    d2 = [0.0] * p + [1.0] * q + [0.0] * (n - p - q)
    return [np.diag(d1).astype(complex), np.diag(d2).astype(complex)]


def _cells_for_pattern(n, pattern):
    """Cell plan in the permuted frame.

    Each cell is (kind, types) where types gives, per position, which index
    class of the original frame it consumes: 'a' (first block), 'b' (second),
    'c' (last). Kinds 'q'/'t'/'s' take a 2x2 rotation; 'corner' takes the
    3x3 corner unitary.
    """
    if len(pattern) == 2:
        h = pattern[0]
        cells = [("q", ("a", "c"))] * h
        return cells, (h, 0, 0), False
    p, q, _ = pattern
    if n % 2 == 0:
        r1 = n // 2 - q
        r2 = p + q - n // 2
        r3 = n // 2 - p
        corner = False
        cells = []
    else:
        r1 = (n - 1) // 2 - q
        r2 = p + q - (n + 1) // 2
        r3 = (n - 1) // 2 - p
        corner = True
        cells = [("corner", ("a", "b", "c"))]
    cells += [("q", ("a", "c"))] * r1
    cells += [("t", ("a", "b"))] * r2
    cells += [("s", ("b", "c"))] * r3
    return cells, (r1, r2, r3), corner


def build_decoupling_unitary(n, pattern, tols: Tolerances = DEFAULT_TOLS):
    """Unitary U such that anything commuting with the pattern projectors and
    their U-conjugates is diagonal (verified downstream via the commutant
    dimension). Deterministic in (n, pattern)."""
    pattern = _validate_pattern(n, pattern)
    cells, (r1, r2, r3), corner = _cells_for_pattern(n, pattern)
    params = assign_parameters(r1, r2, r3, odd_corner=corner)

    if len(pattern) == 2:
        type_pools = {"a": list(range(pattern[0])), "c": list(range(pattern[0], n))}
    else:
        p, q, _ = pattern
        type_pools = {
            "a": list(range(p)),
            "b": list(range(p, p + q)),
            "c": list(range(p + q, n)),
        }

    perm = []
    rotations = []
    counters = dict.fromkeys("qts", 0)
    for kind, types in cells:
        for t in types:
            perm.append(type_pools[t].pop(0))
        if kind == "corner":
            rotations.append(corner_unitary())
        else:
            values = {"q": params.qs, "t": params.ts, "s": params.ss}[kind]
            rotations.append(conjugating_rotation(values[counters[kind]]))
            counters[kind] += 1
    if any(type_pools.values()):
        raise AssertionError("cell plan did not consume every index")

    S = np.zeros((n, n), dtype=complex)
    for tilde, orig in enumerate(perm):
        S[orig, tilde] = 1.0
    U_tilde = np.zeros((n, n), dtype=complex)
    pos = 0
    for R in rotations:
        d = R.shape[0]
        U_tilde[pos : pos + d, pos : pos + d] = R
        pos += d
    U = S @ U_tilde @ S.conj().T
    layout = DecouplingLayout(tuple(perm), tuple(cells), params, corner)

    unitarity = fro(U.conj().T @ U - np.eye(n))
    if unitarity > 1e-12:
        raise AssertionError(f"constructed U is not unitary ({unitarity:.3e})")
    return U, layout


def hollow_block_basis(n, pattern):
    """Matrix units E_ij for every position outside the diagonal blocks."""
    pattern = _validate_pattern(n, pattern)
    edges = np.concatenate([[0], np.cumsum(pattern)]).astype(int)
    block_of = np.zeros(n, dtype=int)
    for b, (lo, hi) in enumerate(zip(edges[:-1], edges[1:])):
        block_of[lo:hi] = b
    mats = []
    positions = []
    for i in range(n):
        for j in range(n):
            if block_of[i] != block_of[j]:
                E = np.zeros((n, n), dtype=complex)
                E[i, j] = 1.0
                mats.append(E)
                positions.append((i, j))
    return SubspaceBasis(n, tuple(mats)), positions


def split_hollow(M, pattern, tols: Tolerances = DEFAULT_TOLS, unitary=None):
    """Write a hollow M as C1 + U C2 U* with C1, C2 in V(pattern).

    Minimal-norm least squares on the column system assembled from the
    pattern's matrix units and their U-conjugates; existence is guaranteed
    for every valid pattern, so a large residual is a numerical failure.
    """
    M = as_cmatrix(M)
    n = M.shape[0]
    pattern = _validate_pattern(n, pattern)
    diag_mag = float(np.abs(np.diag(M)).max(initial=0.0))
    if diag_mag > tols.hollow_tol * max(fro(M), np.finfo(float).tiny):
        raise ValueError(f"input is not hollow (max diagonal {diag_mag:.3e})")

    if unitary is None:
        unitary, _ = build_decoupling_unitary(n, pattern, tols)
    U = unitary
    basis, positions = hollow_block_basis(n, pattern)
    m = len(positions)
    cols = np.empty((n * n, 2 * m), dtype=complex)
    for k, E in enumerate(basis.mats):
        cols[:, k] = E.ravel()
        cols[:, m + k] = (U @ E @ U.conj().T).ravel()
    coeffs, *_ = np.linalg.lstsq(cols, M.ravel(), rcond=None)

    C1 = np.zeros((n, n), dtype=complex)
    C2 = np.zeros((n, n), dtype=complex)
    for k, (i, j) in enumerate(positions):
        C1[i, j] = coeffs[k]
        C2[i, j] = coeffs[m + k]
    residual = fro(M - C1 - U @ C2 @ U.conj().T)
    if residual > tols.split_tol * max(1.0, fro(M)):
        raise ResidualTooLargeError(
            "hollow split failed; this should be impossible for a valid "
            "pattern and indicates a numerical breakdown", residual
        )
    return HollowSplit(U, pattern, C1, C2, residual)
