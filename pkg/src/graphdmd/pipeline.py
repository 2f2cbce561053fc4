"""Sliding-window decomposition of a segment and mode aggregation.

Each window is decomposed independently; a window whose best mode accounts
for less than 1% of the variability (max VAF < 0.01) is rejected.  The modes
of every valid window are narrowed to the frequency band of interest,
reduced to element-wise magnitudes, averaged, symmetrised and normalised,
and finally the per-window matrices are averaged into a single matrix per
segment, re-normalised to peak 1.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dmd import exact_dmd
from .gdmd import GraphDmdResult, graph_dmd, vaf
from .ingest import AdjacencySeries, Config
from .tensor import unfold12

__all__ = [
    "WindowedModes",
    "NoValidWindowsError",
    "sliding_windows",
    "decompose_segment",
    "postprocess",
    "aggregate",
    "band_mode_indices",
]

MIN_VALID_VAF = 0.01


class NoValidWindowsError(RuntimeError):
    """Raised when every window of a segment fails the VAF threshold."""

    def __init__(self, message: str, max_vafs: list[float]):
        super().__init__(message)
        self.max_vafs = max_vafs


@dataclass
class WindowedModes:
    """Per-window decompositions of one segment plus their aggregate."""

    starts: list[int]
    results: list[GraphDmdResult]
    max_vafs: list[float]
    valid_flags: list[bool]
    window_matrices: list[np.ndarray | None]  # postprocessed, None when invalid
    averaged_mode: np.ndarray
    band_hz: float

    @property
    def n_windows(self) -> int:
        return len(self.starts)

    @property
    def n_valid(self) -> int:
        return sum(self.valid_flags)


def sliding_windows(series: AdjacencySeries, window: int, overlap: int) -> list[AdjacencySeries]:
    """Cut a series into windows starting every ``window - overlap`` frames.

    Trailing frames that do not fill a whole window are dropped.
    """
    if not 0 <= overlap < window:
        raise ValueError("need window > overlap >= 0")
    if series.n_frames < window:
        raise ValueError(
            f"series has {series.n_frames} frames, shorter than one {window}-frame window"
        )
    step = window - overlap
    starts = range(0, series.n_frames - window + 1, step)
    return [series.window(s, window) for s in starts]


def _decompose_window(series: AdjacencySeries, epsilon: float, method: str) -> GraphDmdResult:
    if method == "gdmd":
        return graph_dmd(series, epsilon)
    if method == "exact":
        base = exact_dmd(unfold12(series.tensor), svd_tol=epsilon, dt=1.0 / series.fps)
        result = GraphDmdResult(base=base, m=series.m, vaf=np.zeros(base.n_modes))
        result.vaf = np.array([vaf(series, result, j) for j in range(base.n_modes)])
        return result
    raise ValueError(f"unknown decomposition method {method!r}")


def decompose_segment(series: AdjacencySeries, config: Config, method: str = "gdmd") -> WindowedModes:
    """Windowed decomposition of a full segment.

    ``method`` selects the per-window decomposition: ``"gdmd"`` (tensor-train
    route) or ``"exact"`` (plain DMD of the flattened series, the spectrum
    baseline).  Raises NoValidWindowsError when no window passes the VAF
    threshold; the per-window scores ride along on the exception.
    """
    windows = sliding_windows(series, config.window, config.overlap)
    step = config.window - config.overlap
    starts, results, max_vafs, valid_flags, matrices = [], [], [], [], []
    for k, win in enumerate(windows):
        result = _decompose_window(win, config.epsilon, method)
        best = float(np.max(result.vaf))
        valid = best >= MIN_VALID_VAF
        starts.append(k * step)
        results.append(result)
        max_vafs.append(best)
        valid_flags.append(valid)
        matrices.append(postprocess(result, config.cutoff_hz) if valid else None)

    if not any(valid_flags):
        raise NoValidWindowsError(
            f"all {len(windows)} windows have max VAF < {MIN_VALID_VAF}", max_vafs
        )
    wm = WindowedModes(
        starts=starts,
        results=results,
        max_vafs=max_vafs,
        valid_flags=valid_flags,
        window_matrices=matrices,
        averaged_mode=np.empty(0),
        band_hz=config.cutoff_hz,
    )
    wm.averaged_mode = aggregate(wm)
    return wm


def band_mode_indices(result: GraphDmdResult, cutoff_hz: float) -> list[int]:
    """Modes with frequency within the band, one representative per
    conjugate pair (the one rotating forward, so magnitudes are unchanged)."""
    freqs = result.frequencies_hz()
    return [
        j
        for j in range(result.n_modes)
        if freqs[j] <= cutoff_hz and result.eigenvalues[j].imag >= 0.0
    ]


def postprocess(result: GraphDmdResult, cutoff_hz: float) -> np.ndarray:
    """Collapse one window's in-band modes to a normalised spatial matrix.

    Band-select, take element-wise magnitudes, average, symmetrise, then
    scale the peak to 1.  Magnitudes are taken before averaging so opposite
    phases cannot cancel.
    """
    selected = band_mode_indices(result, cutoff_hz)
    if not selected:
        raise ValueError(f"no modes within the 0-{cutoff_hz} Hz band")
    stack = np.stack([np.abs(result.mode_matrix(j)) for j in selected])
    mean = stack.mean(axis=0)
    sym = (mean + mean.T) / 2.0
    peak = float(sym.max())
    if peak <= 0:
        raise ValueError("degenerate modes: all-zero magnitudes")
    return sym / peak


def aggregate(windows: WindowedModes) -> np.ndarray:
    """Element-wise mean of the valid windows' matrices, re-peaked to 1."""
    valid = [m for m, ok in zip(windows.window_matrices, windows.valid_flags) if ok]
    if not valid:
        raise NoValidWindowsError("no valid windows to aggregate", windows.max_vafs)
    mean = np.mean(valid, axis=0)
    return mean / float(mean.max())


def to_json_record(segment_id: str, wm: WindowedModes, config: Config) -> dict:
    """Serialisable record of one segment's windowed decomposition."""
    windows = []
    for start, result, best, valid in zip(wm.starts, wm.results, wm.max_vafs, wm.valid_flags):
        freqs = result.frequencies_hz()
        growths = result.base.growth_rates()
        windows.append(
            {
                "start": start,
                "eigenvalues": [
                    {"re": float(lam.real), "im": float(lam.imag)} for lam in result.eigenvalues
                ],
                "freq_hz": [float(f) for f in freqs],
                "growth_per_s": [float(g) for g in growths],
                "vaf": [float(v) for v in result.vaf],
                "max_vaf": best,
                "valid": valid,
            }
        )
    return {
        "segment_id": segment_id,
        "m": int(wm.averaged_mode.shape[0]),
        "window": config.window,
        "overlap": config.overlap,
        "epsilon": config.epsilon,
        "cutoff_hz": config.cutoff_hz,
        "windows": windows,
        "aggregated_mode": [float(v) for v in wm.averaged_mode.reshape(-1)],
    }
