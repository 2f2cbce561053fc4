"""Generators and the FFT oracle."""

import math

import numpy as np
import pytest

from graphdmd.ingest import Config, build_adjacency_series, load_labels, load_segments
from graphdmd.synth import (
    EdgeComponent,
    NoDominantFrequencyError,
    OrbitAgent,
    OscillatorSpec,
    TrajectorySpec,
    fft_edge_oracle,
    gen_adjacency,
    gen_labeled_dataset,
    gen_trajectories,
    write_labels_csv,
    write_trajectories_csv,
)


def test_no_components_no_noise_gives_constant_baseline():
    spec = OscillatorSpec(m=4, baseline=0.6, duration_s=2.0)
    series = gen_adjacency(spec, seed=0)
    assert np.allclose(series.tensor[0, 1, :], 0.6)
    assert np.allclose(series.tensor[np.arange(4), np.arange(4), :], 1.0)


def test_planted_edge_oscillates_in_expected_range():
    # 0.5 Hz at 25 fps samples both extremes exactly (t = 0 and t = 25)
    spec = OscillatorSpec(
        m=4,
        components=(EdgeComponent(edges=((0, 1),), freq_hz=0.5, amplitude=0.3),),
        baseline=0.5,
        duration_s=4.0,
    )
    series = gen_adjacency(spec, seed=0)
    edge = series.edge(0, 1)
    assert edge.max() == pytest.approx(0.8, abs=1e-9)
    assert edge.min() == pytest.approx(0.2, abs=1e-9)
    assert np.allclose(series.edge(2, 3), 0.5)


def test_seeded_generation_is_bit_identical():
    spec = OscillatorSpec(m=5, baseline=0.5, noise_sd=0.05, duration_s=2.0)
    a = gen_adjacency(spec, seed=42)
    b = gen_adjacency(spec, seed=42)
    assert np.array_equal(a.tensor, b.tensor)
    c = gen_adjacency(spec, seed=43)
    assert not np.array_equal(a.tensor, c.tensor)


def test_infeasible_amplitude_rejected():
    spec = OscillatorSpec(
        m=4,
        components=(EdgeComponent(edges=((0, 1),), freq_hz=1.0, amplitude=0.9),),
        baseline=0.5,
        duration_s=4.0,
    )
    with pytest.raises(ValueError, match="infeasible"):
        gen_adjacency(spec, seed=0)


def test_generated_series_meets_adjacency_invariants():
    for seed in range(5):
        spec = OscillatorSpec(
            m=6,
            components=(EdgeComponent(edges=((0, 1), (2, 3)), freq_hz=0.8, amplitude=0.2),),
            baseline=0.5,
            noise_sd=0.02,
            duration_s=3.0,
        )
        series = gen_adjacency(spec, seed=seed)
        assert np.all(series.tensor > 0) and np.all(series.tensor <= 1)
        assert np.allclose(series.tensor, series.tensor.transpose(1, 0, 2), atol=0)
        assert np.allclose(series.tensor[np.arange(6), np.arange(6), :], 1.0)


# ---------------------------------------------------------------- oracle


def test_oracle_reads_on_bin_frequency_exactly():
    spec = OscillatorSpec(
        m=3,
        components=(EdgeComponent(edges=((0, 1),), freq_hz=1.0, amplitude=0.3),),
        baseline=0.5,
        duration_s=10.0,  # 250 frames at 25 fps: 1 Hz sits on bin 10
    )
    series = gen_adjacency(spec, seed=0)
    peak = fft_edge_oracle(series, (0, 1))
    assert peak.freq_hz == 1.0
    assert peak.resolution_hz == pytest.approx(0.1)


def test_oracle_flat_series_raises():
    spec = OscillatorSpec(m=3, baseline=0.5, duration_s=4.0)
    series = gen_adjacency(spec, seed=0)
    with pytest.raises(NoDominantFrequencyError):
        fft_edge_oracle(series, (0, 1))


def test_oracle_off_bin_peak_within_half_resolution():
    spec = OscillatorSpec(
        m=3,
        components=(EdgeComponent(edges=((0, 1),), freq_hz=0.7, amplitude=0.3),),
        baseline=0.5,
        duration_s=9.2,  # 230 frames: 0.7 Hz falls between bins
    )
    series = gen_adjacency(spec, seed=0)
    peak = fft_edge_oracle(series, (0, 1))
    assert abs(peak.freq_hz - 0.7) <= peak.resolution_hz / 2


def test_oracle_needs_two_seconds():
    spec = OscillatorSpec(m=3, baseline=0.5, duration_s=1.0)
    series = gen_adjacency(spec, seed=0)
    with pytest.raises(ValueError, match="2 seconds"):
        fft_edge_oracle(series, (0, 1))


# ----------------------------------------------------------- trajectories


def _static_roster():
    agents = [
        OrbitAgent("ball", "ball", (0.0, 0.0)),
        OrbitAgent("ring", "ring", (10.0, 0.0)),
    ]
    for i in range(5):
        agents.append(OrbitAgent(f"a{i}", "attacker", (1.0 + i, 2.0)))
        agents.append(OrbitAgent(f"d{i}", "defender", (1.0 + i, -2.0)))
    return agents


def test_static_agents_give_constant_adjacency():
    spec = TrajectorySpec(agents=tuple(_static_roster()), duration_s=2.0)
    segment = gen_trajectories(spec, seed=0)
    series = build_adjacency_series(segment, Config())
    spread = series.tensor.max(axis=2) - series.tensor.min(axis=2)
    assert np.max(spread) <= 1e-12


def test_counter_rotation_doubles_the_distance_frequency():
    # two agents on one circle, equal and opposite angular rates: the chord
    # length 2*r*|sin(delta/2)| oscillates at twice the rotation frequency
    f_rot = 0.5
    agents = [
        OrbitAgent("p", "generic", (0.0, 0.0), radius=1.0, freq_hz=f_rot, phase=0.0),
        OrbitAgent("q", "generic", (0.0, 0.0), radius=1.0, freq_hz=-f_rot, phase=0.0),
    ]
    spec = TrajectorySpec(agents=tuple(agents), duration_s=10.0)
    segment = gen_trajectories(spec, seed=0)
    series = build_adjacency_series(segment, Config())
    peak = fft_edge_oracle(series, (0, 1))
    assert abs(peak.freq_hz - 2 * f_rot) <= peak.resolution_hz

    frame0 = segment.frames[0].xy
    assert math.dist(frame0[0], frame0[1]) == pytest.approx(0.0, abs=1e-12)


def test_trajectories_reproducible():
    spec = TrajectorySpec(agents=tuple(_static_roster()), duration_s=1.0, pos_noise_sd=0.05)
    a = gen_trajectories(spec, seed=9)
    b = gen_trajectories(spec, seed=9)
    for fa, fb in zip(a.frames, b.frames):
        assert np.array_equal(fa.xy, fb.xy)


# -------------------------------------------------------- labeled dataset


def test_zero_jitter_dataset_separable_on_planted_feature():
    series, labels = gen_labeled_dataset(
        4, seed=0, amplitude_jitter=0.0, baseline_jitter=0.0, noise_sd=0.0
    )
    assert labels == [0] * 4 + [1] * 4
    spans = [s.edge(5, 6).max() - s.edge(5, 6).min() for s in series]
    class0 = [sp for sp, lab in zip(spans, labels) if lab == 0]
    class1 = [sp for sp, lab in zip(spans, labels) if lab == 1]
    assert max(class0) < 1e-12 < min(class1)


def test_class_mean_difference_peaks_at_planted_edge():
    series, labels = gen_labeled_dataset(6, seed=1)
    means = {0: np.zeros((11, 11)), 1: np.zeros((11, 11))}
    counts = {0: 0, 1: 0}
    for s, lab in zip(series, labels):
        spread = s.tensor.max(axis=2) - s.tensor.min(axis=2)
        means[lab] += spread
        counts[lab] += 1
    diff = means[1] / counts[1] - means[0] / counts[0]
    np.fill_diagonal(diff, -np.inf)
    peak = np.unravel_index(np.argmax(diff), diff.shape)
    assert set(peak) == {5, 6}


def test_labeled_dataset_reproducible():
    a_series, a_labels = gen_labeled_dataset(3, seed=5)
    b_series, b_labels = gen_labeled_dataset(3, seed=5)
    assert a_labels == b_labels
    for sa, sb in zip(a_series, b_series):
        assert np.array_equal(sa.tensor, sb.tensor)


# ------------------------------------------------------------- round-trip


def test_csv_roundtrip_through_ingest(tmp_path):
    spec = TrajectorySpec(agents=tuple(_static_roster()), duration_s=1.0)
    segments = [
        gen_trajectories(spec, seed=k, segment_id=f"seg{k}") for k in range(2)
    ]
    traj = tmp_path / "trajectories.csv"
    labs = tmp_path / "labels.csv"
    write_trajectories_csv(str(traj), segments)
    write_labels_csv(str(labs), {"seg0": 0, "seg1": 1})

    loaded = load_segments(str(traj), fps=25.0)
    assert [s.segment_id for s in loaded] == ["seg0", "seg1"]
    for orig, back in zip(segments, loaded):
        assert len(orig.frames) == len(back.frames)
        orig_ids = sorted(orig.frames[0].agent_ids)
        assert list(back.frames[0].agent_ids) == orig_ids
        lookup = {a: i for i, a in enumerate(orig.frames[0].agent_ids)}
        for fo, fb in zip(orig.frames, back.frames):
            for pos, agent in enumerate(fb.agent_ids):
                assert np.allclose(fb.xy[pos], fo.xy[lookup[agent]], atol=0)
    assert load_labels(str(labs)) == {"seg0": 0, "seg1": 1}
