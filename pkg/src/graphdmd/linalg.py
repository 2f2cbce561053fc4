"""Dense linear-algebra primitives shared by every decomposition routine.

Thin contracts over LAPACK (via numpy.linalg): tolerance-truncated SVD,
general complex eigendecomposition and Moore-Penrose pseudo-inverse.
All functions are pure and accept/return plain ndarrays.
"""

from __future__ import annotations

import numpy as np

__all__ = ["DegenerateInputError", "svd", "eig", "pinv"]

# Relative cutoff used by pinv when no tolerance is given; machine-epsilon
# scale so near-null directions are not amplified.
PINV_DEFAULT_RTOL = 1e-12


class DegenerateInputError(ValueError):
    """Raised when an input has no positive singular values (all zero)."""


def _as_matrix(m: np.ndarray, name: str = "matrix") -> np.ndarray:
    m = np.asarray(m)
    if m.ndim != 2 or m.shape[0] < 1 or m.shape[1] < 1:
        raise ValueError(f"{name} must be a 2-D array, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError(f"{name} contains non-finite entries")
    return m


def svd(m: np.ndarray, tol: float = 0.0) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Truncated singular value decomposition ``m ~= U @ diag(s) @ V.conj().T``.

    Trailing singular values are dropped while the discarded tail satisfies
    ``sqrt(sum(tail**2)) <= tol * ||m||_F``, so the reconstruction error stays
    within ``tol`` relative Frobenius norm.  Exact zeros are always dropped.

    Returns ``(U, s, V)`` with orthonormal columns in U and V and ``s``
    strictly positive, descending.  Raises DegenerateInputError for an
    all-zero input.
    """
    m = _as_matrix(m)
    if tol < 0:
        raise ValueError("tol must be non-negative")
    u, s, vh = np.linalg.svd(m, full_matrices=False)
    rank = _truncation_rank(s, tol * np.linalg.norm(s))
    if rank == 0:
        raise DegenerateInputError("input has no positive singular values")
    return u[:, :rank], s[:rank], vh[:rank].conj().T


def _truncation_rank(s: np.ndarray, budget: float) -> int:
    """Smallest rank whose discarded tail has l2 norm within ``budget``.

    Never truncates below rank 1 unless every singular value is zero.
    """
    positive = int(np.count_nonzero(s > 0))
    if positive == 0:
        return 0
    tail = np.sqrt(np.cumsum(s[::-1] ** 2))[::-1]  # tail[r] = ||s[r:]||_2
    rank = positive
    while rank > 1 and tail[rank - 1] <= budget:
        rank -= 1
    return rank


def eig(m: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition of a general square matrix.

    Returns ``(eigenvalues, eigenvectors)`` with unit-norm eigenvector
    columns; for real input the spectrum is closed under conjugation.
    """
    m = _as_matrix(m)
    if m.shape[0] != m.shape[1]:
        raise ValueError(f"eig requires a square matrix, got shape {m.shape}")
    values, vectors = np.linalg.eig(m)
    norms = np.linalg.norm(vectors, axis=0)
    vectors = vectors / np.where(norms > 0, norms, 1.0)
    return values, vectors


def pinv(m: np.ndarray, tol: float | None = None) -> np.ndarray:
    """Moore-Penrose pseudo-inverse with singular values below
    ``tol * sigma_max`` treated as zero (default ``1e-12 * sigma_max``)."""
    m = _as_matrix(m)
    rtol = PINV_DEFAULT_RTOL if tol is None else tol
    if rtol < 0:
        raise ValueError("tol must be non-negative")
    return np.linalg.pinv(m, rcond=rtol)
