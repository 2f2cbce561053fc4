#!/usr/bin/env python3
"""From raw agent trajectories to one averaged mode matrix per segment.

A full-roster scene (5 attackers, 5 defenders, ball, ring) where the two
defenders nearest the ball oscillate their mutual distance at 0.5 Hz.
Ingestion re-orders agents by ball proximity every frame, converts distances
to Gaussian kernel weights, low-pass filters, then the sliding-window
decomposition averages the in-band mode magnitudes into a single matrix.
"""

import numpy as np

import graphdmd as g

# --- a scene with an oscillating defender pair -----------------------------

agents = [
    g.OrbitAgent("ring", "ring", (0.0, 0.0)),
    g.OrbitAgent("ball", "ball", (2.0, 0.0)),
    g.OrbitAgent("a0", "attacker", (3.5, 1.0)),
    g.OrbitAgent("a1", "attacker", (4.5, -1.0)),
    g.OrbitAgent("a2", "attacker", (5.5, 1.5)),
    g.OrbitAgent("a3", "attacker", (6.5, -1.5)),
    g.OrbitAgent("a4", "attacker", (7.5, 2.0)),
    g.OrbitAgent("d0", "defender", (2.5, -2.0)),
    # d1 circles a point 1.3 m from d0: their distance oscillates at 0.5 Hz
    g.OrbitAgent("d1", "defender", (3.8, -2.0), radius=0.5, freq_hz=0.5),
    g.OrbitAgent("d2", "defender", (6.0, -3.0)),
    g.OrbitAgent("d3", "defender", (7.0, -3.5)),
    g.OrbitAgent("d4", "defender", (8.0, -4.0)),
]
spec = g.TrajectorySpec(agents=tuple(agents), fps=25.0, duration_s=6.0, pos_noise_sd=0.02)
segment = g.gen_trajectories(spec, seed=1, segment_id="demo")

# --- ingest: order agents, kernel weights, low-pass ------------------------

config = g.Config()  # 25 fps, window 50/overlap 25, epsilon 1e-5, cutoff 2 Hz
series = g.lowpass(g.build_adjacency_series(segment, config), config.cutoff_hz)
print(f"adjacency series: {series.m} nodes ({', '.join(series.node_labels)})")
print(f"frames: {series.n_frames}, entries in ({series.tensor.min():.3g}, {series.tensor.max():.3g}]")

# --- windowed decomposition -------------------------------------------------

wm = g.decompose_segment(series, config)
print(f"\nwindows: {wm.n_windows} (starts {wm.starts}), valid: {wm.n_valid}")
for start, best, flag in zip(wm.starts, wm.max_vafs, wm.valid_flags):
    print(f"  window @{start:3d}: max VAF {best:.3f} {'valid' if flag else 'REJECTED'}")

# --- the averaged mode matrix ----------------------------------------------

print("\naveraged in-band mode matrix (rows/cols A1..A5, D1..D5, Ring):")
with np.printoptions(precision=2, suppress=True, linewidth=120):
    print(wm.averaged_mode)

d1d2 = wm.averaged_mode[5, 6]
others = [
    wm.averaged_mode[i, j]
    for i in range(5, 10)
    for j in range(i + 1, 10)
    if (i, j) != (5, 6)
]
print(f"\nD1-D2 entry: {d1d2:.3f} vs other defender pairs max: {max(others):.3f}")
print("the oscillating pair dominates the defender block, as planted")
