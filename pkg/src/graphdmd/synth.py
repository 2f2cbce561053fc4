"""Synthetic graph dynamics with known ground truth, plus an FFT oracle.

Two generator families: direct adjacency series with planted oscillating
edges (fast path for decomposition benchmarks) and circular-orbit agent
trajectories with the basketball roster (exercises ingestion end to end).
``fft_edge_oracle`` measures an edge's dominant frequency by brute-force
spectrum peak, independent of any decomposition code.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np

from .ingest import BASKETBALL_LABELS, AdjacencySeries, Frame, Segment

__all__ = [
    "EdgeComponent",
    "OscillatorSpec",
    "OrbitAgent",
    "TrajectorySpec",
    "DominantFrequency",
    "NoDominantFrequencyError",
    "gen_adjacency",
    "gen_trajectories",
    "fft_edge_oracle",
    "gen_labeled_dataset",
    "write_trajectories_csv",
    "write_labels_csv",
]

CLAMP_FLOOR = 1e-6  # kernel weights never reach exactly 0
MAX_CLAMPED_FRACTION = 0.01


class NoDominantFrequencyError(ValueError):
    """Raised when an edge series is flat and has no spectral peak."""


@dataclass
class EdgeComponent:
    """One planted oscillation: a set of edges sharing a cosine."""

    edges: tuple[tuple[int, int], ...]
    freq_hz: float
    amplitude: float
    phase: float = 0.0


@dataclass
class OscillatorSpec:
    """Recipe for a synthetic adjacency series."""

    m: int
    components: tuple[EdgeComponent, ...] = ()
    baseline: float | np.ndarray = 0.5
    fps: float = 25.0
    duration_s: float = 10.0
    noise_sd: float = 0.0
    node_labels: tuple[str, ...] | None = None

    def __post_init__(self) -> None:
        if self.m < 2:
            raise ValueError("need at least 2 nodes")
        for comp in self.components:
            if not 0 < comp.freq_hz < self.fps / 2:
                raise ValueError(f"frequency {comp.freq_hz} outside (0, Nyquist)")
            for i, j in comp.edges:
                if i == j or not (0 <= i < self.m and 0 <= j < self.m):
                    raise ValueError(f"bad edge ({i}, {j})")
        if self.node_labels is not None and len(self.node_labels) != self.m:
            raise ValueError("node labels must match m")

    @property
    def n_frames(self) -> int:
        return int(round(self.duration_s * self.fps))

    def baseline_matrix(self) -> np.ndarray:
        c = np.asarray(self.baseline, dtype=float)
        if c.ndim == 0:
            c = np.full((self.m, self.m), float(c))
        if c.shape != (self.m, self.m):
            raise ValueError("baseline matrix shape must be (m, m)")
        c = (c + c.T) / 2.0
        np.fill_diagonal(c, 1.0)
        return c


def gen_adjacency(spec: OscillatorSpec, seed: int = 0) -> AdjacencySeries:
    """Materialise an OscillatorSpec into a valid adjacency series.

    Entries are baseline + planted cosines + Gaussian noise, clamped to
    (0, 1]; symmetric with unit diagonal.  If more than 1% of the generated
    off-diagonal samples need clamping the spec is rejected as infeasible.
    """
    rng = np.random.default_rng(seed)
    n = spec.n_frames
    t = np.arange(n)
    tensor = np.repeat(spec.baseline_matrix()[:, :, None], n, axis=2)

    for comp in spec.components:
        wave = comp.amplitude * np.cos(2.0 * np.pi * comp.freq_hz * t / spec.fps + comp.phase)
        for i, j in comp.edges:
            tensor[i, j, :] += wave
            tensor[j, i, :] = tensor[i, j, :]

    iu, ju = np.triu_indices(spec.m, k=1)
    if spec.noise_sd > 0:
        noise = rng.normal(0.0, spec.noise_sd, size=(iu.size, n))
        tensor[iu, ju, :] += noise
        tensor[ju, iu, :] = tensor[iu, ju, :]

    off_diag = tensor[iu, ju, :]
    clamped = np.count_nonzero((off_diag < CLAMP_FLOOR) | (off_diag > 1.0))
    if off_diag.size and clamped / off_diag.size > MAX_CLAMPED_FRACTION:
        raise ValueError(
            f"spec infeasible: {clamped / off_diag.size:.1%} of samples outside (0, 1]"
        )
    tensor = np.clip(tensor, CLAMP_FLOOR, 1.0)
    labels = spec.node_labels or tuple(f"N{k}" for k in range(spec.m))
    return AdjacencySeries(tensor=tensor, node_labels=labels, fps=spec.fps)


@dataclass
class OrbitAgent:
    """Agent on a circular track: position = center + radius * (cos, sin)(angle)."""

    agent_id: str
    role: str
    center: tuple[float, float]
    radius: float = 0.0
    freq_hz: float = 0.0
    phase: float = 0.0


@dataclass
class TrajectorySpec:
    """Circular-orbit trajectory recipe with an explicit agent roster."""

    agents: tuple[OrbitAgent, ...]
    fps: float = 25.0
    duration_s: float = 4.0
    pos_noise_sd: float = 0.0


def gen_trajectories(spec: TrajectorySpec, seed: int = 0, segment_id: str = "synthetic") -> Segment:
    """Sample a TrajectorySpec into a Segment of per-frame positions."""
    rng = np.random.default_rng(seed)
    n = int(round(spec.duration_s * spec.fps))
    ids = tuple(a.agent_id for a in spec.agents)
    roles = tuple(a.role for a in spec.agents)
    frames = []
    for k in range(n):
        xy = np.empty((len(spec.agents), 2))
        for a_idx, agent in enumerate(spec.agents):
            angle = 2.0 * np.pi * agent.freq_hz * k / spec.fps + agent.phase
            xy[a_idx, 0] = agent.center[0] + agent.radius * math.cos(angle)
            xy[a_idx, 1] = agent.center[1] + agent.radius * math.sin(angle)
        if spec.pos_noise_sd > 0:
            xy += rng.normal(0.0, spec.pos_noise_sd, size=xy.shape)
        frames.append(Frame(agent_ids=ids, roles=roles, xy=xy))
    return Segment(segment_id=segment_id, fps=spec.fps, frames=frames)


@dataclass
class DominantFrequency:
    """Spectrum peak of one edge, with the bin resolution it was read at."""

    freq_hz: float
    resolution_hz: float


def fft_edge_oracle(series: AdjacencySeries, edge: tuple[int, int]) -> DominantFrequency:
    """Dominant frequency of one edge by discrete Fourier transform.

    The series is mean-removed, so the DC bin never wins.  The peak is
    resolved to ``fps / n_frames`` Hz.  A flat series has no peak and raises.
    """
    values = series.edge(*edge)
    if values.shape[0] < 2 * series.fps:
        raise ValueError("need at least 2 seconds of data")
    centered = values - values.mean()
    if float(np.std(centered)) < 1e-12:
        raise NoDominantFrequencyError(f"edge {edge} is flat; no dominant frequency")
    spectrum = np.abs(np.fft.rfft(centered))
    freqs = np.fft.rfftfreq(values.shape[0], d=1.0 / series.fps)
    peak = int(np.argmax(spectrum[1:])) + 1  # skip the (empty) DC bin
    return DominantFrequency(freq_hz=float(freqs[peak]), resolution_hz=series.fps / values.shape[0])


PLANTED_EDGE = (5, 6)  # the two defenders nearest the ball (D1-D2)
PLANTED_FREQ_HZ = 0.5


def gen_labeled_dataset(
    n_per_class: int,
    seed: int = 0,
    *,
    duration_s: float = 4.0,
    fps: float = 25.0,
    amplitude: float = 0.3,
    amplitude_jitter: float = 0.05,
    baseline_jitter: float = 0.05,
    noise_sd: float = 0.01,
) -> tuple[list[AdjacencySeries], list[int]]:
    """Binary-labeled adjacency series: class 1 plants a 0.5 Hz oscillation
    on the edge between the two nearest defenders, class 0 does not.

    Amplitude, baseline and phase are jittered per sample from the seed.
    Set the jitters and ``noise_sd`` to 0 for a deterministic, perfectly
    separable dataset.
    """
    rng = np.random.default_rng(seed)
    series: list[AdjacencySeries] = []
    labels: list[int] = []
    for label in (0, 1):
        for _ in range(n_per_class):
            base = 0.5 + (rng.uniform(-baseline_jitter, baseline_jitter) if baseline_jitter else 0.0)
            components: tuple[EdgeComponent, ...] = ()
            if label == 1:
                amp = amplitude + (rng.normal(0.0, amplitude_jitter) if amplitude_jitter else 0.0)
                amp = float(np.clip(amp, 0.1, 0.45))
                phase = rng.uniform(0.0, 2.0 * np.pi) if amplitude_jitter else 0.0
                components = (
                    EdgeComponent(edges=(PLANTED_EDGE,), freq_hz=PLANTED_FREQ_HZ, amplitude=amp, phase=phase),
                )
            spec = OscillatorSpec(
                m=11,
                components=components,
                baseline=base,
                fps=fps,
                duration_s=duration_s,
                noise_sd=noise_sd,
                node_labels=BASKETBALL_LABELS,
            )
            series.append(gen_adjacency(spec, seed=int(rng.integers(0, 2**31))))
            labels.append(label)
    return series, labels


def write_trajectories_csv(path: str, segments: list[Segment]) -> None:
    """Write segments in the trajectory CSV format ``load_segments`` reads."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["segment_id", "frame", "agent_id", "role", "x", "y"])
        for seg in segments:
            for t, frame in enumerate(seg.frames):
                for a, role, (x, y) in zip(frame.agent_ids, frame.roles, frame.xy):
                    writer.writerow([seg.segment_id, t, a, role, repr(float(x)), repr(float(y))])


def write_labels_csv(path: str, labels: dict[str, int]) -> None:
    """Write a ``segment_id,label`` CSV."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["segment_id", "label"])
        for sid, label in labels.items():
            writer.writerow([sid, label])
