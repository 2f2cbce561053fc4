"""Trajectory ingestion: CSV parsing, agent ordering and adjacency series.

Trajectory files are UTF-8 CSV with header ``segment_id,frame,agent_id,role,x,y``.
Frame indices run contiguously from 0 within each segment, every frame of a
segment carries the same agent roster, positions are in metres and roles are
one of ``attacker``, ``defender``, ``ball``, ``ring`` or ``generic``.

Labels files are CSV ``segment_id,label`` with label 0 or 1.

Config files are plain text ``key = value`` lines (``#`` comments allowed)
with keys fps, sigma_player, sigma_ring, cutoff_hz, window, overlap, epsilon.

With the basketball roster (5 attackers, 5 defenders, one ball, one ring)
agents are re-ordered in every frame by proximity to the ball: the two
attackers nearest the ball come first, each further attacker is the one
minimising the summed distance to the attackers already placed, defenders
follow the same rule, and the ring closes the list.  The ball itself is not
a node; it only anchors the ordering.  Node labels are A1..A5, D1..D5, Ring.
With all-generic rosters the ordering is the identity (by agent id) and a
single kernel width applies.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field, replace

import numpy as np
import scipy.signal

from .tensor import _as_tensor3

__all__ = [
    "Config",
    "Frame",
    "Segment",
    "AdjacencySeries",
    "BASKETBALL_LABELS",
    "kernel_weight",
    "order_agents",
    "build_adjacency_series",
    "lowpass",
    "load_segments",
    "load_labels",
]

# Kernel widths calibrated so the weight is 0.5 at a meaningful proximity:
# 1.5 m between players, 6 m between a player and the ring.
DEFAULT_SIGMA_PLAYER = 1.5**2 / (2.0 * math.log(2.0))
DEFAULT_SIGMA_RING = 6.0**2 / (2.0 * math.log(2.0))

BASKETBALL_LABELS = ("A1", "A2", "A3", "A4", "A5", "D1", "D2", "D3", "D4", "D5", "Ring")

ROLES = ("attacker", "defender", "ball", "ring", "generic")

TRAJECTORY_FIELDS = ("segment_id", "frame", "agent_id", "role", "x", "y")


@dataclass
class Config:
    """Processing parameters, with defaults for the 25 fps basketball setup."""

    fps: float = 25.0
    sigma_player: float = DEFAULT_SIGMA_PLAYER
    sigma_ring: float = DEFAULT_SIGMA_RING
    cutoff_hz: float = 2.0
    window: int = 50
    overlap: int = 25
    epsilon: float = 1e-5

    def __post_init__(self) -> None:
        if self.fps <= 0:
            raise ValueError("fps must be positive")
        if self.sigma_player <= 0 or self.sigma_ring <= 0:
            raise ValueError("kernel widths must be positive")
        if not 0 <= self.overlap < self.window:
            raise ValueError("need window > overlap >= 0")
        if self.epsilon <= 0:
            raise ValueError("epsilon must be positive")

    @classmethod
    def from_file(cls, path: str) -> "Config":
        """Parse a ``key = value`` config file; unknown keys are rejected."""
        values: dict[str, float] = {}
        int_keys = {"window", "overlap"}
        valid = {f for f in cls.__dataclass_fields__}
        with open(path, encoding="utf-8") as fh:
            for lineno, raw in enumerate(fh, start=1):
                line = raw.split("#", 1)[0].strip()
                if not line:
                    continue
                if "=" not in line:
                    raise ValueError(f"{path}:{lineno}: expected 'key = value', got {raw!r}")
                key, _, value = line.partition("=")
                key = key.strip()
                if key not in valid:
                    raise ValueError(f"{path}:{lineno}: unknown config key {key!r}")
                try:
                    values[key] = int(value) if key in int_keys else float(value)
                except ValueError as exc:
                    raise ValueError(f"{path}:{lineno}: bad value for {key!r}: {value.strip()!r}") from exc
        return cls(**values)


@dataclass
class Frame:
    """One time stamp: agent ids, their roles and 2-D positions in metres."""

    agent_ids: tuple[str, ...]
    roles: tuple[str, ...]
    xy: np.ndarray  # (n_agents, 2)

    def __post_init__(self) -> None:
        n = len(self.agent_ids)
        if len(self.roles) != n or self.xy.shape != (n, 2):
            raise ValueError("agent ids, roles and positions must align")
        if not np.all(np.isfinite(self.xy)):
            raise ValueError("positions must be finite")
        for role in self.roles:
            if role not in ROLES:
                raise ValueError(f"unknown role {role!r}")

    def indices_with_role(self, role: str) -> list[int]:
        return [i for i, r in enumerate(self.roles) if r == role]


@dataclass
class Segment:
    """A labeled trajectory episode: contiguous frames at a fixed rate."""

    segment_id: str
    fps: float
    frames: list[Frame]

    def __post_init__(self) -> None:
        if self.fps <= 0:
            raise ValueError("fps must be positive")
        if not self.frames:
            raise ValueError("segment needs at least one frame")
        roster = (self.frames[0].agent_ids, self.frames[0].roles)
        for k, frame in enumerate(self.frames):
            if (frame.agent_ids, frame.roles) != roster:
                raise ValueError(
                    f"segment {self.segment_id}: frame {k} roster differs from frame 0"
                )


@dataclass
class AdjacencySeries:
    """Time series of symmetric kernel-weight matrices over a fixed node set."""

    tensor: np.ndarray  # (m, m, n_frames)
    node_labels: tuple[str, ...]
    fps: float

    def __post_init__(self) -> None:
        self.tensor = _as_tensor3(self.tensor)
        m = self.tensor.shape[0]
        if self.tensor.shape[1] != m:
            raise ValueError("adjacency slices must be square")
        if len(self.node_labels) != m:
            raise ValueError("node labels must match the node count")
        if not np.allclose(self.tensor, self.tensor.transpose(1, 0, 2), atol=1e-12):
            raise ValueError("adjacency slices must be symmetric")

    @property
    def m(self) -> int:
        return self.tensor.shape[0]

    @property
    def n_frames(self) -> int:
        return self.tensor.shape[2]

    def window(self, start: int, length: int) -> "AdjacencySeries":
        if start < 0 or start + length > self.n_frames:
            raise ValueError(f"window [{start}, {start + length}) out of range")
        return replace(self, tensor=self.tensor[:, :, start : start + length])

    def edge(self, i: int, j: int) -> np.ndarray:
        return self.tensor[i, j, :]


def kernel_weight(distance_m: float, sigma: float) -> float:
    """Gaussian proximity weight ``exp(-d**2 / (2*sigma))`` in (0, 1]."""
    if sigma <= 0:
        raise ValueError("sigma must be positive")
    return math.exp(-(distance_m**2) / (2.0 * sigma))


def _greedy_group_order(frame: Frame, members: list[int], ball_xy: np.ndarray) -> list[int]:
    """Order one team: two nearest the ball first, then by summed distance
    to the already-placed teammates.  Distance ties break on agent id."""
    dist_to_ball = {i: float(np.linalg.norm(frame.xy[i] - ball_xy)) for i in members}
    by_ball = sorted(members, key=lambda i: (dist_to_ball[i], frame.agent_ids[i]))
    placed = by_ball[:2]
    remaining = set(members) - set(placed)
    while remaining:
        def summed(i: int) -> float:
            return float(sum(np.linalg.norm(frame.xy[i] - frame.xy[j]) for j in placed))

        nxt = min(remaining, key=lambda i: (summed(i), frame.agent_ids[i]))
        placed.append(nxt)
        remaining.discard(nxt)
    return placed


def order_agents(frame: Frame) -> list[int]:
    """Node ordering of a basketball frame: attacker indices 1..5, defender
    indices 6..10 (both ball-anchored greedy order), ring last.

    Returns positions into the frame's agent arrays, length 11.
    """
    attackers = frame.indices_with_role("attacker")
    defenders = frame.indices_with_role("defender")
    balls = frame.indices_with_role("ball")
    rings = frame.indices_with_role("ring")
    if len(attackers) != 5 or len(defenders) != 5 or len(balls) != 1 or len(rings) != 1:
        raise ValueError(
            "basketball roster needs 5 attackers, 5 defenders, 1 ball, 1 ring; got "
            f"{len(attackers)}/{len(defenders)}/{len(balls)}/{len(rings)}"
        )
    ball_xy = frame.xy[balls[0]]
    order = _greedy_group_order(frame, attackers, ball_xy)
    order += _greedy_group_order(frame, defenders, ball_xy)
    order.append(rings[0])
    return order


def _is_generic(segment: Segment) -> bool:
    roles = set(segment.frames[0].roles)
    if roles == {"generic"}:
        return True
    if "generic" in roles:
        raise ValueError(
            f"segment {segment.segment_id}: mixed generic and basketball roles"
        )
    return False


def build_adjacency_series(segment: Segment, config: Config) -> AdjacencySeries:
    """Kernel-weight adjacency tensor of a segment, one slice per frame.

    Basketball segments are re-ordered per frame (node identity is the
    role-by-rank, not a fixed player); pairs involving the ring use the ring
    kernel width.  Generic segments keep agent-id order and use the player
    width throughout.  Diagonals are exactly 1.
    """
    first = segment.frames[0]
    if _is_generic(segment):
        node_order_fn = None
        order0 = sorted(range(len(first.agent_ids)), key=lambda i: first.agent_ids[i])
        labels = tuple(first.agent_ids[i] for i in order0)
        ring_node = None
    else:
        node_order_fn = order_agents
        labels = BASKETBALL_LABELS
        ring_node = 10

    m = len(labels)
    tensor = np.empty((m, m, len(segment.frames)))
    for t, frame in enumerate(segment.frames):
        order = node_order_fn(frame) if node_order_fn else order0
        xy = frame.xy[order]
        sq_dist = np.sum((xy[:, None, :] - xy[None, :, :]) ** 2, axis=2)
        denom = np.full((m, m), 2.0 * config.sigma_player)
        if ring_node is not None:
            denom[ring_node, :] = denom[:, ring_node] = 2.0 * config.sigma_ring
        slab = np.exp(-sq_dist / denom)
        np.fill_diagonal(slab, 1.0)
        tensor[:, :, t] = slab
    return AdjacencySeries(tensor=tensor, node_labels=labels, fps=segment.fps)


def lowpass(series: AdjacencySeries, cutoff_hz: float) -> AdjacencySeries:
    """Zero-phase low-pass filter of every edge series, clamped to [0, 1].

    Second-order Butterworth run forward then backward, so mode phases are
    untouched.  ``cutoff_hz`` must sit strictly below the Nyquist rate.
    """
    nyquist = series.fps / 2.0
    if not 0 < cutoff_hz < nyquist:
        raise ValueError(f"cutoff must lie in (0, {nyquist}) Hz, got {cutoff_hz}")
    b, a = scipy.signal.butter(2, cutoff_hz / nyquist, btype="low")
    filtered = scipy.signal.filtfilt(b, a, series.tensor, axis=2)
    return replace(series, tensor=np.clip(filtered, 0.0, 1.0))


def load_segments(path: str, fps: float = 25.0) -> list[Segment]:
    """Parse a trajectory CSV into segments, validating the documented format."""
    per_segment: dict[str, dict[int, list[tuple[str, str, float, float]]]] = {}
    segment_order: list[str] = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        missing = set(TRAJECTORY_FIELDS) - set(reader.fieldnames or ())
        if missing:
            raise ValueError(f"{path}: missing columns {sorted(missing)}")
        for lineno, row in enumerate(reader, start=2):
            sid = row["segment_id"]
            try:
                t = int(row["frame"])
                x = float(row["x"])
                y = float(row["y"])
            except (TypeError, ValueError) as exc:
                raise ValueError(f"{path}:{lineno}: bad numeric field") from exc
            role = row["role"]
            if role not in ROLES:
                raise ValueError(f"{path}:{lineno}: unknown role {role!r}")
            if sid not in per_segment:
                per_segment[sid] = {}
                segment_order.append(sid)
            per_segment[sid].setdefault(t, []).append((row["agent_id"], role, x, y))

    segments = []
    for sid in segment_order:
        frames_raw = per_segment[sid]
        expected = list(range(len(frames_raw)))
        if sorted(frames_raw) != expected:
            raise ValueError(f"{path}: segment {sid}: frames not contiguous from 0")
        frames = []
        for t in expected:
            rows = sorted(frames_raw[t])  # stable per-frame agent order by id
            frames.append(
                Frame(
                    agent_ids=tuple(r[0] for r in rows),
                    roles=tuple(r[1] for r in rows),
                    xy=np.array([[r[2], r[3]] for r in rows], dtype=float),
                )
            )
        segments.append(Segment(segment_id=sid, fps=fps, frames=frames))
    return segments


def load_labels(path: str) -> dict[str, int]:
    """Parse a ``segment_id,label`` CSV with binary labels."""
    labels: dict[str, int] = {}
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        missing = {"segment_id", "label"} - set(reader.fieldnames or ())
        if missing:
            raise ValueError(f"{path}: missing columns {sorted(missing)}")
        for lineno, row in enumerate(reader, start=2):
            if row["label"] not in ("0", "1"):
                raise ValueError(f"{path}:{lineno}: label must be 0 or 1")
            labels[row["segment_id"]] = int(row["label"])
    return labels
