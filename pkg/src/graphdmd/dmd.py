"""Exact dynamic mode decomposition on snapshot matrices.

Given snapshots ``y_0 .. y_tau`` (columns), the reduced operator is built
from a truncated SVD of the unshifted block and eigendecomposed; each
eigenvalue carries a spatial mode and a scalar amplitude so that

    y_t ~= sum_j  modes[:, j] * eigenvalues[j]**t * amplitudes[j]

Eigenvalue phase encodes frequency, magnitude encodes growth per step.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from . import linalg

__all__ = ["SpectralResult", "exact_dmd", "amplitudes", "reconstruct", "to_continuous"]

# Modes with |eigenvalue| below this are dropped: the mode formula divides
# by the eigenvalue, so they would blow up numerically.
EIGENVALUE_FLOOR = 1e-14

DEFAULT_SVD_TOL = 1e-10


@dataclass
class SpectralResult:
    """Eigenvalues, mode columns and amplitudes of one decomposition."""

    eigenvalues: np.ndarray  # (p,) complex
    modes: np.ndarray        # (d, p) complex, column j is mode j
    amplitudes: np.ndarray   # (p,) complex
    dt: float                # seconds per frame

    def __post_init__(self) -> None:
        p = self.eigenvalues.shape[0]
        if p < 1:
            raise ValueError("a spectral result needs at least one mode")
        if self.modes.shape[1] != p or self.amplitudes.shape[0] != p:
            raise ValueError("eigenvalue/mode/amplitude counts differ")
        if self.dt <= 0:
            raise ValueError("dt must be positive")

    @property
    def n_modes(self) -> int:
        return self.eigenvalues.shape[0]

    def frequencies_hz(self) -> np.ndarray:
        return np.array([to_continuous(lam, self.dt)[0] for lam in self.eigenvalues])

    def growth_rates(self) -> np.ndarray:
        return np.array([to_continuous(lam, self.dt)[1] for lam in self.eigenvalues])


def exact_dmd(snapshots: np.ndarray, svd_tol: float = DEFAULT_SVD_TOL, dt: float = 1.0) -> SpectralResult:
    """Exact DMD of a ``(d, tau+1)`` snapshot matrix.

    ``svd_tol`` is the relative truncation tolerance for the SVD of the
    unshifted snapshot block.  Modes with near-zero eigenvalues are dropped
    with a warning.
    """
    snapshots = np.asarray(snapshots)
    if not np.iscomplexobj(snapshots):
        snapshots = snapshots.astype(float)  # real path keeps LAPACK's exact conjugate pairing
    if snapshots.ndim != 2 or snapshots.shape[1] < 3:
        raise ValueError("need at least 3 snapshot columns (tau >= 2)")
    if not np.all(np.isfinite(snapshots)):
        raise ValueError("snapshots contain non-finite entries")

    x = snapshots[:, :-1]
    y = snapshots[:, 1:]
    u, s, v = linalg.svd(x, svd_tol)
    yv_sinv = y @ v / s  # Y V Sigma^-1, shared by operator and modes
    f_hat = u.conj().T @ yv_sinv
    eigenvalues, w = linalg.eig(f_hat)

    keep = np.abs(eigenvalues) >= EIGENVALUE_FLOOR
    if not np.all(keep):
        warnings.warn(
            f"dropping {int(np.count_nonzero(~keep))} mode(s) with |eigenvalue| < {EIGENVALUE_FLOOR}",
            stacklevel=2,
        )
    eigenvalues = eigenvalues[keep]
    if eigenvalues.shape[0] == 0:
        raise linalg.DegenerateInputError("all eigenvalues below the magnitude floor")
    modes = (yv_sinv @ w[:, keep]) / eigenvalues

    b = amplitudes(modes, snapshots[:, 0])
    return SpectralResult(eigenvalues=eigenvalues, modes=modes, amplitudes=b, dt=dt)


def amplitudes(modes: np.ndarray, y0: np.ndarray) -> np.ndarray:
    """Project the first snapshot onto the modes: ``pinv(modes) @ y0``."""
    modes = np.asarray(modes)
    y0 = np.asarray(y0).reshape(-1)
    if modes.ndim != 2 or modes.shape[1] < 1:
        raise ValueError("mode matrix must have at least one column")
    if modes.shape[0] != y0.shape[0]:
        raise ValueError(
            f"mode length {modes.shape[0]} does not match snapshot length {y0.shape[0]}"
        )
    return linalg.pinv(modes) @ y0


def reconstruct(result: SpectralResult, t: int) -> np.ndarray:
    """Complex state at frame ``t``: ``sum_j mode_j * lambda_j**t * b_j``."""
    if t < 0:
        raise ValueError("frame index must be non-negative")
    return result.modes @ (result.eigenvalues**t * result.amplitudes)


def to_continuous(eigenvalue: complex, dt: float) -> tuple[float, float]:
    """Continuous-time view of a discrete eigenvalue.

    Returns ``(freq_hz, growth_per_s)`` from the principal complex log:
    frequency is the magnitude of the imaginary part over ``2*pi*dt``,
    growth is the real part over ``dt``.
    """
    if dt <= 0:
        raise ValueError("dt must be positive")
    if eigenvalue == 0:
        raise ValueError("frequency undefined for a zero eigenvalue")
    log_lam = np.log(complex(eigenvalue))
    return abs(log_lam.imag) / (2.0 * np.pi * dt), log_lam.real / dt
