"""Graph dynamic mode decomposition of adjacency-matrix series.

The series is split into unshifted and shifted tensors, each is factorised
through the tensor train (keeping the graph structure instead of flattening
into a plain SVD), and the reduced evolution operator

    F = (M* P) (Q pinv(N)) Sigma^-1

is eigendecomposed.  M, Sigma, N are the unshifted factors; P is the shifted
tensor's orthonormal basis and Q carries its singular values times its time
factors, so P @ Q reproduces the shifted unfolding.  Each eigenvalue gets a
matrix-shaped spatial mode and a scalar amplitude:

    A_t ~= sum_j  Z_j * eigenvalue_j**t * amplitude_j

Per-mode quality is scored by VAF, one minus the relative squared error of
that mode's own reconstruction of the full series.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from . import linalg
from .dmd import EIGENVALUE_FLOOR, SpectralResult, amplitudes, to_continuous
from .ingest import AdjacencySeries
from .tensor import dmd_factors, unfold12

__all__ = [
    "GraphDmdResult",
    "EmptySpectrumError",
    "graph_dmd",
    "gdmd_reconstruct",
    "reconstruct_series",
    "vaf",
    "dominant_frequency",
]


class EmptySpectrumError(RuntimeError):
    """Raised when every eigenvalue falls below the magnitude floor."""


@dataclass
class GraphDmdResult:
    """Spectral decomposition of a graph series: the flat result plus the
    node count needed to shape modes back into matrices, and per-mode VAF."""

    base: SpectralResult
    m: int
    vaf: np.ndarray  # (p,) real, <= 1

    def __post_init__(self) -> None:
        if self.base.modes.shape[0] != self.m * self.m:
            raise ValueError("mode length must be m*m")
        if self.vaf.shape[0] != self.base.n_modes:
            raise ValueError("need one VAF per mode")

    @property
    def eigenvalues(self) -> np.ndarray:
        return self.base.eigenvalues

    @property
    def amplitudes(self) -> np.ndarray:
        return self.base.amplitudes

    @property
    def dt(self) -> float:
        return self.base.dt

    @property
    def n_modes(self) -> int:
        return self.base.n_modes

    def mode_matrix(self, j: int) -> np.ndarray:
        """Spatial mode j as an m x m complex matrix (view of the flat column)."""
        return self.base.modes[:, j].reshape(self.m, self.m)

    def frequencies_hz(self) -> np.ndarray:
        return self.base.frequencies_hz()


def graph_dmd(series: AdjacencySeries, epsilon: float, dt: float | None = None) -> GraphDmdResult:
    """Decompose an adjacency series into graph modes and eigenvalues.

    ``epsilon`` is the tensor-train truncation tolerance; ``dt`` defaults to
    ``1 / series.fps``.  Near-zero eigenvalues are dropped with a warning,
    and an all-dropped spectrum raises EmptySpectrumError.
    """
    if series.n_frames < 3:
        raise ValueError("need at least 3 frames (tau >= 2)")
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    if dt is None:
        dt = 1.0 / series.fps

    x = series.tensor[:, :, :-1]
    y = series.tensor[:, :, 1:]
    fx = dmd_factors(x, epsilon)
    fy = dmd_factors(y, epsilon)

    m_basis = fx.basis
    sigma = fx.singular_values
    n_pinv = linalg.pinv(fx.time_factors)
    p_basis = fy.basis
    q = fy.singular_values[:, None] * fy.time_factors

    # propagate Y's column space through X's factors, then scale out Sigma
    qn_sinv = (q @ n_pinv) / sigma
    f_hat = (m_basis.T @ p_basis) @ qn_sinv
    eigenvalues, w = linalg.eig(f_hat)

    keep = np.abs(eigenvalues) >= EIGENVALUE_FLOOR
    if not np.all(keep):
        warnings.warn(
            f"dropping {int(np.count_nonzero(~keep))} mode(s) with |eigenvalue| < {EIGENVALUE_FLOOR}",
            stacklevel=2,
        )
        eigenvalues, w = eigenvalues[keep], w[:, keep]
    if eigenvalues.shape[0] == 0:
        raise EmptySpectrumError("all eigenvalues below the magnitude floor")

    modes = (p_basis @ (qn_sinv @ w)) / eigenvalues
    b = amplitudes(modes, series.tensor[:, :, 0].reshape(-1))
    base = SpectralResult(eigenvalues=eigenvalues, modes=modes, amplitudes=b, dt=dt)
    result = GraphDmdResult(base=base, m=series.m, vaf=np.zeros(eigenvalues.shape[0]))
    result.vaf = np.array([vaf(series, result, j) for j in range(result.n_modes)])
    return result


def gdmd_reconstruct(
    result: GraphDmdResult, t: int, mode_subset: list[int] | None = None
) -> np.ndarray:
    """Real m x m reconstruction at frame ``t`` from the chosen modes."""
    if t < 0:
        raise ValueError("frame index must be non-negative")
    idx = np.arange(result.n_modes) if mode_subset is None else np.asarray(mode_subset)
    coeffs = result.eigenvalues[idx] ** t * result.amplitudes[idx]
    flat = result.base.modes[:, idx] @ coeffs
    return flat.real.reshape(result.m, result.m)


def reconstruct_series(result: GraphDmdResult, n_frames: int) -> np.ndarray:
    """Real ``(m, m, n_frames)`` reconstruction from all modes."""
    if n_frames < 1:
        raise ValueError("need at least one frame")
    t = np.arange(n_frames)
    dynamics = result.eigenvalues[:, None] ** t[None, :] * result.amplitudes[:, None]
    flat = (result.base.modes @ dynamics).real
    return flat.reshape(result.m, result.m, n_frames)


def vaf(series: AdjacencySeries, result: GraphDmdResult, j: int) -> float:
    """Variability accounted for by mode ``j`` over the whole series.

    A complex-conjugate pair only reconstructs real data jointly, so a mode
    with a rotating eigenvalue is scored together with its partner (twice
    the real part); both partners therefore share one VAF.  Always <= 1,
    negative when the mode reconstructs worse than predicting zero.
    """
    data = unfold12(series.tensor)
    norm_sq = float(np.linalg.norm(data) ** 2)
    if norm_sq == 0:
        raise linalg.DegenerateInputError("zero series has no variability to account for")
    lam = result.eigenvalues[j]
    t = np.arange(series.n_frames)
    trajectory = lam**t * result.amplitudes[j]
    contribution = np.outer(result.base.modes[:, j], trajectory)
    if abs(lam.imag) > 1e-12:
        estimate = 2.0 * contribution.real
    else:
        estimate = contribution.real
    return 1.0 - float(np.linalg.norm(data - estimate) ** 2) / norm_sq


def dominant_frequency(
    result: GraphDmdResult, fmin: float = 0.1, fmax: float = 2.0
) -> tuple[float, complex]:
    """Frequency and eigenvalue of the highest-VAF mode in ``(fmin, fmax]`` Hz.

    The lower bound excludes the static mode so the answer is comparable to
    a mean-removed spectrum peak.
    """
    freqs = result.frequencies_hz()
    in_band = np.flatnonzero((freqs > fmin) & (freqs <= fmax))
    if in_band.size == 0:
        raise ValueError(f"no mode with frequency in ({fmin}, {fmax}] Hz")
    best = in_band[int(np.argmax(result.vaf[in_band]))]
    return float(freqs[best]), complex(result.eigenvalues[best])
