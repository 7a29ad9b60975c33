"""Dense complex-Hermitian linear algebra with explicit contracts.

All solver modules funnel their matrix work through these helpers so the
Hermitian checks, the positive-definiteness error, and the deterministic
eigenvector phase convention live in one place. Problems here are small
(n <= ~64), so everything is dense LAPACK.
"""

import numpy as np
from scipy.linalg import cho_factor, cho_solve

from .errors import DimensionMismatchError, NotPositiveDefiniteError

HERMITIAN_RTOL = 1e-12


def check_hermitian(m: np.ndarray, rtol: float = HERMITIAN_RTOL) -> np.ndarray:
    """Validate conjugate symmetry and return the exactly hermitized matrix."""
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionMismatchError(f"expected a square matrix, got shape {m.shape}")
    scale = max(np.max(np.abs(m)), 1e-300)
    if np.max(np.abs(m - m.conj().T)) > rtol * scale:
        raise ValueError("matrix is not Hermitian within tolerance")
    return 0.5 * (m + m.conj().T)


def solve_hpd(m: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Solve M x = b for Hermitian positive definite M via Cholesky."""
    m = check_hermitian(m)
    b = np.asarray(b, dtype=complex)
    if b.shape[0] != m.shape[0]:
        raise DimensionMismatchError("right-hand side length does not match matrix")
    try:
        factor = cho_factor(m, lower=True, check_finite=False)
    except np.linalg.LinAlgError as exc:
        raise NotPositiveDefiniteError(str(exc)) from exc
    return cho_solve(factor, b, check_finite=False)


def _fix_phase(q: np.ndarray) -> np.ndarray:
    """Rotate a vector so its largest-magnitude entry is real non-negative.

    Ties (e.g. unit-modulus steering vectors) resolve to the first entry
    within a relative tolerance of the maximum, keeping the pivot stable
    under rounding noise.
    """
    mags = np.abs(q)
    top = float(np.max(mags))
    if top == 0.0:
        return q
    i = int(np.argmax(mags >= top * (1.0 - 1e-8)))
    pivot = q[i]
    return q * (pivot.conj() / abs(pivot))


def eig_hermitian(m: np.ndarray):
    """Full spectrum of a Hermitian matrix: ascending eigenvalues, unitary eigenvectors."""
    m = check_hermitian(m)
    w, v = np.linalg.eigh(m)
    for j in range(v.shape[1]):
        v[:, j] = _fix_phase(v[:, j])
    return w, v


def dominant_eigpair(m: np.ndarray):
    """Largest eigenvalue and its unit eigenvector, phase-canonicalized."""
    w, v = eig_hermitian(m)
    return float(w[-1]), v[:, -1]
