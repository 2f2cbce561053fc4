"""Order-3 tensors and their tensor-train (TT) decomposition.

The TT-SVD runs a left-to-right sweep of matricisations and truncated SVDs.
For a tensor of shape ``(n1, n2, n3)`` it yields three cores

    G1: (1, n1, r1)    G2: (r1, n2, r2)    G3: (r2, n3, 1)

with the first two cores left-orthogonal.  Contracting G1 with G2 and
flattening the (row, column) pair gives an orthonormal spatial basis M of
shape ``(n1*n2, r2)``, while G3 splits into a positive diagonal ``Sigma``
and time factors ``N`` such that ``unfold12(T) ~= M @ diag(Sigma) @ N``.
These are the factors the graph decomposition consumes in place of a plain
SVD of the unfolded data.

All index flattening is row-major (numpy C order) throughout the package.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .linalg import DegenerateInputError, _truncation_rank

__all__ = ["TTCores", "DmdFactors", "tt_svd", "tt_reconstruct", "dmd_factors", "unfold12"]


@dataclass
class TTCores:
    """Tensor-train cores of an order-3 tensor plus the tolerance used."""

    g1: np.ndarray  # (1, n1, r1)
    g2: np.ndarray  # (r1, n2, r2)
    g3: np.ndarray  # (r2, n3, 1)
    epsilon: float

    @property
    def ranks(self) -> tuple[int, int]:
        return self.g1.shape[2], self.g2.shape[2]

    @property
    def dims(self) -> tuple[int, int, int]:
        return self.g1.shape[1], self.g2.shape[1], self.g3.shape[1]


@dataclass
class DmdFactors:
    """Matricised TT factors: orthonormal basis, singular values, time factors.

    ``basis`` is (n1*n2, r2) with orthonormal columns, ``singular_values`` is
    the positive descending diagonal and ``time_factors`` is (r2, n3), so
    ``unfold12(T) ~= basis @ diag(singular_values) @ time_factors``.
    """

    basis: np.ndarray
    singular_values: np.ndarray
    time_factors: np.ndarray

    @property
    def rank(self) -> int:
        return self.singular_values.shape[0]


def _as_tensor3(t: np.ndarray) -> np.ndarray:
    t = np.asarray(t, dtype=float)
    if t.ndim != 3 or min(t.shape) < 1:
        raise ValueError(f"expected an order-3 tensor, got shape {t.shape}")
    if not np.all(np.isfinite(t)):
        raise ValueError("tensor contains non-finite entries")
    return t


def unfold12(t: np.ndarray) -> np.ndarray:
    """Flatten the first two axes: ``(n1, n2, n3) -> (n1*n2, n3)``, row-major."""
    t = np.asarray(t)
    return t.reshape(t.shape[0] * t.shape[1], t.shape[2])


def tt_svd(t: np.ndarray, epsilon: float) -> TTCores:
    """Tensor-train decomposition with relative accuracy ``epsilon``.

    Each of the two truncating SVDs gets an error budget of
    ``epsilon * ||T||_F / sqrt(2)``, which guarantees
    ``||T - reconstruction||_F <= epsilon * ||T||_F``.  At least one singular
    value is kept per step, so ranks are >= 1 for any nonzero tensor.
    """
    t = _as_tensor3(t)
    if epsilon < 0:
        raise ValueError("epsilon must be non-negative")
    n1, n2, n3 = t.shape
    norm = np.linalg.norm(t)
    if norm == 0:
        raise DegenerateInputError("zero tensor has no positive singular values")
    delta = epsilon * norm / np.sqrt(2.0)

    u1, s1, v1h = np.linalg.svd(t.reshape(n1, n2 * n3), full_matrices=False)
    r1 = _truncation_rank(s1, delta)
    g1 = u1[:, :r1].reshape(1, n1, r1)

    rest = (s1[:r1, None] * v1h[:r1]).reshape(r1 * n2, n3)
    u2, s2, v2h = np.linalg.svd(rest, full_matrices=False)
    r2 = _truncation_rank(s2, delta)
    g2 = u2[:, :r2].reshape(r1, n2, r2)
    g3 = (s2[:r2, None] * v2h[:r2]).reshape(r2, n3, 1)

    return TTCores(g1=g1, g2=g2, g3=g3, epsilon=epsilon)


def tt_reconstruct(cores: TTCores) -> np.ndarray:
    """Contract three TT cores back into the full order-3 tensor."""
    g1, g2, g3 = cores.g1, cores.g2, cores.g3
    if g1.shape[2] != g2.shape[0] or g2.shape[2] != g3.shape[0]:
        raise ValueError(
            f"inconsistent core ranks: {g1.shape}, {g2.shape}, {g3.shape}"
        )
    return np.einsum("ia,ajb,bt->ijt", g1[0], g2, g3[:, :, 0])


def dmd_factors(t: np.ndarray, epsilon: float) -> DmdFactors:
    """TT-based analogue of a truncated SVD of ``unfold12(t)``.

    The basis comes from contracting the two left-orthogonal cores; the
    diagonal and time factors come from the second SVD step directly, so no
    accuracy is lost relative to the TT cores themselves.
    """
    t = _as_tensor3(t)
    if epsilon < 0:
        raise ValueError("epsilon must be non-negative")
    n1, n2, n3 = t.shape
    norm = np.linalg.norm(t)
    if norm == 0:
        raise DegenerateInputError("zero tensor has no positive singular values")
    delta = epsilon * norm / np.sqrt(2.0)

    u1, s1, v1h = np.linalg.svd(t.reshape(n1, n2 * n3), full_matrices=False)
    r1 = _truncation_rank(s1, delta)
    rest = (s1[:r1, None] * v1h[:r1]).reshape(r1 * n2, n3)
    u2, s2, v2h = np.linalg.svd(rest, full_matrices=False)
    r2 = _truncation_rank(s2, delta)

    basis = np.einsum("ia,ajb->ijb", u1[:, :r1], u2[:, :r2].reshape(r1, n2, r2))
    return DmdFactors(
        basis=basis.reshape(n1 * n2, r2),
        singular_values=s2[:r2].copy(),
        time_factors=v2h[:r2].copy(),
    )
