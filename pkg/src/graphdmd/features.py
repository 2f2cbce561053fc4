"""Fixed-length feature vectors from aggregated mode matrices or raw series.

Basketball tasks select index sets over the 11-node layout A1..A5, D1..D5,
Ring:

    defence  — defender pairs (10), attacker x defender (25), ring x defender (5)
    offence  — attacker pairs (10), attacker x defender (25)
    all_pairs — every unordered off-diagonal pair, any node count

Feature order is row-major over those sets and stable across runs, so
columns line up between extractors and datasets.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .ingest import BASKETBALL_LABELS, AdjacencySeries, Config
from .pipeline import decompose_segment

__all__ = [
    "FeatureVector",
    "gdmd_spectrum",
    "laplacian_eigs",
    "handcrafted",
    "dmd_spectrum_baseline",
    "task_pairs",
]

BASKETBALL_M = 11
ATTACKERS = range(0, 5)
DEFENDERS = range(5, 10)
RING = 10

# Eigenvalues at or below this count as the structural zero of the Laplacian.
POSITIVE_EIG_FLOOR = 1e-10


@dataclass
class FeatureVector:
    """Values with aligned, unique names."""

    values: np.ndarray
    names: list[str]

    def __post_init__(self) -> None:
        self.values = np.asarray(self.values, dtype=float)
        if self.values.ndim != 1 or self.values.shape[0] != len(self.names):
            raise ValueError("values and names must align")
        if len(set(self.names)) != len(self.names):
            raise ValueError("feature names must be unique")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("feature values must be finite")


def _pair_name(labels: tuple[str, ...], i: int, j: int) -> str:
    return f"{labels[i]}-{labels[j]}"


def task_pairs(task: str, labels: tuple[str, ...]) -> list[tuple[int, int]]:
    """Index pairs selected by a task, in feature order."""
    m = len(labels)
    if task == "all_pairs":
        return [(i, j) for i in range(m) for j in range(i + 1, m)]
    if m != BASKETBALL_M:
        raise ValueError(f"task {task!r} needs the 11-node basketball layout, got m={m}")
    if task == "defence":
        pairs = [(i, j) for i in DEFENDERS for j in DEFENDERS if i < j]
        pairs += [(i, j) for i in ATTACKERS for j in DEFENDERS]
        pairs += [(RING, j) for j in DEFENDERS]
        return pairs
    if task == "offence":
        pairs = [(i, j) for i in ATTACKERS for j in ATTACKERS if i < j]
        pairs += [(i, j) for i in ATTACKERS for j in DEFENDERS]
        return pairs
    raise ValueError(f"unknown task {task!r}")


def gdmd_spectrum(
    avg_mode: np.ndarray, task: str, labels: tuple[str, ...] | None = None
) -> FeatureVector:
    """Vectorise the selected entries of an averaged mode matrix."""
    avg_mode = np.asarray(avg_mode)
    if labels is None:
        labels = (
            BASKETBALL_LABELS
            if avg_mode.shape[0] == BASKETBALL_M
            else tuple(f"N{k}" for k in range(avg_mode.shape[0]))
        )
    pairs = task_pairs(task, labels)
    values = np.array([avg_mode[i, j] for i, j in pairs])
    names = [_pair_name(labels, i, j) for i, j in pairs]
    return FeatureVector(values=values, names=names)


def laplacian_eigs(avg_mode: np.ndarray, k: int = 10) -> FeatureVector:
    """Smallest ``k`` positive eigenvalues of the normalised graph Laplacian.

    The input matrix acts as a weighted adjacency; degrees are its row sums.
    Eigenvalues at the structural zero are excluded and the remainder is
    returned ascending.  Raises when a node is isolated or fewer than ``k``
    positive eigenvalues exist.
    """
    a = np.asarray(avg_mode, dtype=float)
    m = a.shape[0]
    if a.shape != (m, m) or not np.allclose(a, a.T):
        raise ValueError("adjacency must be square and symmetric")
    if np.any(a < 0):
        raise ValueError("adjacency must be non-negative")
    degrees = a.sum(axis=1)
    if np.any(degrees <= 0):
        raise ValueError(f"isolated node(s) at indices {np.flatnonzero(degrees <= 0).tolist()}")
    d_isqrt = 1.0 / np.sqrt(degrees)
    lap = np.diag(degrees) - a
    norm_lap = d_isqrt[:, None] * lap * d_isqrt[None, :]
    eigs = np.linalg.eigvalsh(norm_lap)
    positive = eigs[eigs > POSITIVE_EIG_FLOOR]
    if positive.shape[0] < k:
        raise ValueError(
            f"only {positive.shape[0]} positive eigenvalue(s), need {k}; "
            "the graph may be disconnected"
        )
    values = positive[:k]
    return FeatureVector(values=values, names=[f"lap_eig_{i + 1}" for i in range(k)])


def handcrafted(series: AdjacencySeries, task: str) -> FeatureVector:
    """Temporal mean, max and min of each selected edge of the raw series."""
    pairs = task_pairs(task, series.node_labels)
    values, names = [], []
    for i, j in pairs:
        edge = series.edge(i, j)
        pair = _pair_name(series.node_labels, i, j)
        for stat, value in (("mean", edge.mean()), ("max", edge.max()), ("min", edge.min())):
            values.append(float(value))
            names.append(f"{stat}_{pair}")
    return FeatureVector(values=np.array(values), names=names)


def dmd_spectrum_baseline(series: AdjacencySeries, task: str, config: Config) -> FeatureVector:
    """Same windowed pipeline, but plain DMD of the flattened series.

    The per-window decomposition ignores the tensor structure (flattened
    snapshots, ordinary SVD); post-processing, aggregation and feature
    selection are identical to the graph route.
    """
    wm = decompose_segment(series, config, method="exact")
    return gdmd_spectrum(wm.averaged_mode, task, labels=series.node_labels)
