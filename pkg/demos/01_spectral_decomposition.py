#!/usr/bin/env python3
"""Decompose a weighted-graph time series into spatial modes and eigenvalues.

We plant a single 1 Hz oscillation into a 6-node adjacency series (on two
edges a quarter period apart, so the rotation plane is present in the data),
decompose it, and read the frequency straight off the recovered eigenvalue.
"""

import numpy as np

import graphdmd as g

# --- build a synthetic series with known ground truth --------------------

FREQ_HZ = 1.0
spec = g.OscillatorSpec(
    m=6,
    components=(
        g.EdgeComponent(edges=((0, 1),), freq_hz=FREQ_HZ, amplitude=0.3, phase=0.0),
        g.EdgeComponent(edges=((2, 3),), freq_hz=FREQ_HZ, amplitude=0.3, phase=np.pi / 2),
    ),
    baseline=0.5,
    fps=25.0,
    duration_s=10.0,
    noise_sd=0.01,
)
series = g.gen_adjacency(spec, seed=0)
print(f"series: {series.m} nodes x {series.n_frames} frames at {series.fps} fps")

# --- decompose ------------------------------------------------------------

result = g.graph_dmd(series, epsilon=1e-5)
print(f"retained modes: {result.n_modes}")

order = np.argsort(result.vaf)[::-1]
print("\ntop modes by variability accounted for:")
print(f"{'VAF':>8}  {'|lambda|':>8}  {'freq Hz':>8}  {'growth/s':>9}")
for j in order[:5]:
    freq, growth = g.to_continuous(result.eigenvalues[j], result.dt)
    print(f"{result.vaf[j]:8.4f}  {abs(result.eigenvalues[j]):8.4f}  {freq:8.3f}  {growth:9.3f}")

# --- compare against the brute-force spectrum oracle ----------------------

freq_est, lam = g.dominant_frequency(result, fmin=0.1, fmax=2.0)
oracle = g.fft_edge_oracle(series, (0, 1))
print(f"\ndominant oscillation: {freq_est:.3f} Hz (|lambda| = {abs(lam):.4f})")
print(f"FFT oracle on the planted edge: {oracle.freq_hz:.3f} Hz "
      f"(resolution {oracle.resolution_hz:.3f} Hz)")

# --- the matrix mode shows WHERE the oscillation lives --------------------

freqs = result.frequencies_hz()
j = int(np.argmax(np.where(np.abs(freqs - freq_est) < 1e-9, result.vaf, -np.inf)))
z_abs = np.abs(result.mode_matrix(j))
print("\n|Z| of the oscillatory mode (planted edges (0,1) and (2,3) light up):")
with np.printoptions(precision=2, suppress=True):
    print(z_abs / z_abs.max())

# --- reconstruction sanity -------------------------------------------------

frames = g.reconstruct_series(result, series.n_frames)
err = np.max(np.abs(frames - series.tensor))
print(f"\nmax-abs reconstruction error over all frames: {err:.4f}")
