"""Ingestion: kernel calibration, agent ordering, adjacency building, filtering."""

import itertools
import math

import numpy as np
import pytest

from graphdmd.ingest import (
    BASKETBALL_LABELS,
    DEFAULT_SIGMA_PLAYER,
    DEFAULT_SIGMA_RING,
    AdjacencySeries,
    Config,
    Frame,
    Segment,
    build_adjacency_series,
    kernel_weight,
    load_labels,
    load_segments,
    lowpass,
    order_agents,
)


def _basketball_frame(attackers, defenders, ball, ring):
    ids = tuple(f"a{i}" for i in range(5)) + tuple(f"d{i}" for i in range(5)) + ("ball", "ring")
    roles = ("attacker",) * 5 + ("defender",) * 5 + ("ball", "ring")
    xy = np.array(list(attackers) + list(defenders) + [ball, ring], dtype=float)
    return Frame(agent_ids=ids, roles=roles, xy=xy)


# ------------------------------------------------------------- kernel


def test_kernel_calibration_at_half_weight():
    assert abs(kernel_weight(1.5, DEFAULT_SIGMA_PLAYER) - 0.5) <= 1e-12
    assert abs(kernel_weight(6.0, DEFAULT_SIGMA_RING) - 0.5) <= 1e-12


def test_kernel_at_zero_distance():
    assert kernel_weight(0.0, DEFAULT_SIGMA_PLAYER) == 1.0


def test_kernel_strictly_decreasing():
    distances = np.linspace(0.0, 20.0, 50)
    weights = [kernel_weight(d, DEFAULT_SIGMA_PLAYER) for d in distances]
    assert all(b < a for a, b in zip(weights[:-1], weights[1:]))


def test_kernel_rejects_bad_sigma():
    with pytest.raises(ValueError):
        kernel_weight(1.0, 0.0)


# ------------------------------------------------------- agent ordering


def _greedy_oracle(points, ball, ids):
    """Independent stepwise enumeration of the documented ordering rule."""
    members = list(range(len(points)))
    dist = lambda i, j: math.dist(points[i], points[j])
    to_ball = {i: math.dist(points[i], ball) for i in members}
    placed = sorted(members, key=lambda i: (to_ball[i], ids[i]))[:2]
    while len(placed) < len(members):
        best = None
        for cand in members:
            if cand in placed:
                continue
            score = (sum(dist(cand, p) for p in placed), ids[cand])
            if best is None or score < best[1]:
                best = (cand, score)
        placed.append(best[0])
    return placed


def test_order_collinear_attackers_by_distance():
    attackers = [(float(k), 0.0) for k in (1, 2, 3, 4, 5)]
    defenders = [(float(k), 10.0) for k in (1, 2, 3, 4, 5)]
    frame = _basketball_frame(attackers, defenders, ball=(0.0, 0.0), ring=(20.0, 0.0))
    order = order_agents(frame)
    assert order[:5] == [0, 1, 2, 3, 4]
    oracle = _greedy_oracle(attackers, (0.0, 0.0), [f"a{i}" for i in range(5)])
    assert order[:5] == oracle


def test_order_ties_break_on_agent_id():
    attackers = [(1.0, 0.0), (-1.0, 0.0), (3.0, 0.0), (4.0, 0.0), (5.0, 0.0)]
    defenders = [(float(k), 10.0) for k in (1, 2, 3, 4, 5)]
    frame = _basketball_frame(attackers, defenders, ball=(0.0, 0.0), ring=(20.0, 0.0))
    order = order_agents(frame)
    # a0 and a1 are both 1 m from the ball: a0 wins on id
    assert order[0] == 0 and order[1] == 1


def test_order_defenders_mirror_attackers():
    attackers = [(1.0, 1.0), (2.0, 1.5), (3.5, 1.0), (4.0, 2.0), (5.5, 1.0)]
    defenders = [(x, -y) for x, y in attackers]
    frame = _basketball_frame(attackers, defenders, ball=(0.0, 0.0), ring=(20.0, 0.0))
    order = order_agents(frame)
    assert [i - 5 for i in order[5:10]] == order[:5]


def test_order_matches_enumeration_oracle_on_random_frames():
    rng = np.random.default_rng(0)
    for _ in range(20):
        attackers = [tuple(p) for p in rng.uniform(-7, 7, size=(5, 2))]
        defenders = [tuple(p) for p in rng.uniform(-7, 7, size=(5, 2))]
        ball = tuple(rng.uniform(-7, 7, size=2))
        frame = _basketball_frame(attackers, defenders, ball=ball, ring=(0.0, 0.0))
        order = order_agents(frame)
        # bijective over the 11 nodes (frame indices 0-9 plus the ring at 11)
        assert sorted(order) == list(range(10)) + [11]
        assert order[10] == 11  # ring closes the list
        oracle_a = _greedy_oracle(attackers, ball, [f"a{i}" for i in range(5)])
        oracle_d = _greedy_oracle(defenders, ball, [f"d{i}" for i in range(5)])
        assert order[:5] == oracle_a
        assert order[5:10] == [i + 5 for i in oracle_d]


def test_order_rejects_wrong_roster():
    ids = ("a0", "a1", "ball", "ring")
    roles = ("attacker", "attacker", "ball", "ring")
    frame = Frame(agent_ids=ids, roles=roles, xy=np.zeros((4, 2)))
    with pytest.raises(ValueError):
        order_agents(frame)


# --------------------------------------------------- adjacency building


def test_stacked_agents_give_all_ones():
    frame = _basketball_frame([(0, 0)] * 5, [(0, 0)] * 5, ball=(0, 0), ring=(0, 0))
    segment = Segment(segment_id="s", fps=25.0, frames=[frame])
    series = build_adjacency_series(segment, Config())
    assert np.allclose(series.tensor, 1.0)
    assert series.node_labels == BASKETBALL_LABELS


def test_distant_clusters_have_negligible_cross_weights():
    near = [(0.0, 0.0), (0.5, 0.0), (1.0, 0.0), (0.0, 0.5), (0.5, 0.5)]
    far = [(100.0, 0.0), (100.5, 0.0), (101.0, 0.0), (100.0, 0.5), (100.5, 0.5)]
    frame = _basketball_frame(near, far, ball=(0.0, 0.1), ring=(0.2, 0.2))
    segment = Segment(segment_id="s", fps=25.0, frames=[frame])
    series = build_adjacency_series(segment, Config())
    cross = series.tensor[np.ix_(range(0, 5), range(5, 10), [0])]
    assert np.max(cross) < 1e-100
    within = series.tensor[0, 1, 0]
    assert within == pytest.approx(math.exp(-0.25 / (2 * DEFAULT_SIGMA_PLAYER)))


def test_three_frame_segment_matches_manual_computation():
    rng = np.random.default_rng(1)
    frames = []
    for _ in range(3):
        attackers = [tuple(p) for p in rng.uniform(-5, 5, size=(5, 2))]
        defenders = [tuple(p) for p in rng.uniform(-5, 5, size=(5, 2))]
        ball = tuple(rng.uniform(-5, 5, size=2))
        frames.append(_basketball_frame(attackers, defenders, ball=ball, ring=(6.0, 0.0)))
    segment = Segment(segment_id="s", fps=25.0, frames=frames)
    config = Config()
    series = build_adjacency_series(segment, config)

    for t, frame in enumerate(frames):
        order = order_agents(frame)
        for a in range(11):
            for b in range(11):
                if a == b:
                    expected = 1.0
                else:
                    d2 = sum((frame.xy[order[a]][k] - frame.xy[order[b]][k]) ** 2 for k in range(2))
                    sigma = config.sigma_ring if 10 in (a, b) else config.sigma_player
                    expected = math.exp(-d2 / (2.0 * sigma))
                assert abs(series.tensor[a, b, t] - expected) <= 1e-12


def test_generic_segment_identity_order_single_sigma():
    ids = ("n2", "n1", "n3")
    roles = ("generic",) * 3
    frames = [
        Frame(agent_ids=ids, roles=roles, xy=np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 2.0]]))
    ]
    series = build_adjacency_series(Segment("g", 25.0, frames), Config())
    assert series.node_labels == ("n1", "n2", "n3")  # ordered by agent id
    assert series.tensor[0, 1, 0] == pytest.approx(kernel_weight(1.0, DEFAULT_SIGMA_PLAYER))
    assert np.allclose(np.diagonal(series.tensor[:, :, 0]), 1.0)


def test_mixed_roles_rejected():
    ids = ("x", "y")
    roles = ("generic", "attacker")
    frames = [Frame(agent_ids=ids, roles=roles, xy=np.zeros((2, 2)))]
    with pytest.raises(ValueError):
        build_adjacency_series(Segment("bad", 25.0, frames), Config())


def test_series_invariants_hold_after_build():
    rng = np.random.default_rng(2)
    frames = []
    for _ in range(20):
        frames.append(
            _basketball_frame(
                [tuple(p) for p in rng.uniform(-7, 7, size=(5, 2))],
                [tuple(p) for p in rng.uniform(-7, 7, size=(5, 2))],
                ball=tuple(rng.uniform(-7, 7, size=2)),
                ring=(0.0, 0.0),
            )
        )
    series = build_adjacency_series(Segment("s", 25.0, frames), Config())
    assert np.all(series.tensor > 0) and np.all(series.tensor <= 1)
    assert np.allclose(series.tensor, series.tensor.transpose(1, 0, 2), atol=0)
    assert np.allclose(series.tensor[np.arange(11), np.arange(11), :], 1.0)


# -------------------------------------------------------------- lowpass


def _edge_series(values, fps=25.0):
    n = values.shape[0]
    tensor = np.full((2, 2, n), 0.5)
    tensor[0, 0, :] = tensor[1, 1, :] = 1.0
    tensor[0, 1, :] = tensor[1, 0, :] = values
    return AdjacencySeries(tensor=tensor, node_labels=("x", "y"), fps=fps)


def _steady_amplitude(series):
    n = series.n_frames
    mid = series.edge(0, 1)[n // 4 : 3 * n // 4]
    return (mid.max() - mid.min()) / 2


def test_lowpass_keeps_constant_series():
    series = _edge_series(np.full(250, 0.7))
    out = lowpass(series, cutoff_hz=2.0)
    assert np.allclose(out.tensor, series.tensor, atol=1e-9)


def test_lowpass_attenuates_above_cutoff():
    t = np.arange(500)
    series = _edge_series(0.5 + 0.3 * np.sin(2 * np.pi * 5.0 * t / 25.0))
    out = lowpass(series, cutoff_hz=2.0)
    assert _steady_amplitude(out) <= 0.05 * 0.3


def test_lowpass_passes_below_cutoff():
    t = np.arange(500)
    series = _edge_series(0.5 + 0.3 * np.sin(2 * np.pi * 0.5 * t / 25.0))
    out = lowpass(series, cutoff_hz=2.0)
    assert _steady_amplitude(out) >= 0.95 * 0.3


def test_lowpass_rejects_cutoff_at_nyquist():
    series = _edge_series(np.full(100, 0.5))
    with pytest.raises(ValueError):
        lowpass(series, cutoff_hz=12.5)


def test_lowpass_output_stays_symmetric_and_clamped():
    rng = np.random.default_rng(3)
    vals = np.clip(0.5 + 0.5 * rng.normal(size=300), 0.01, 1.0)
    out = lowpass(_edge_series(vals), cutoff_hz=2.0)
    assert np.allclose(out.tensor, out.tensor.transpose(1, 0, 2), atol=0)
    assert np.all(out.tensor >= 0) and np.all(out.tensor <= 1)


# ------------------------------------------------------------ files/config


def test_trajectory_csv_roundtrip(tmp_path):
    path = tmp_path / "traj.csv"
    path.write_text(
        "segment_id,frame,agent_id,role,x,y\n"
        "s1,0,p1,generic,0.0,0.0\n"
        "s1,0,p2,generic,1.0,0.0\n"
        "s1,1,p1,generic,0.5,0.0\n"
        "s1,1,p2,generic,1.5,0.0\n"
    )
    segments = load_segments(str(path), fps=10.0)
    assert len(segments) == 1
    seg = segments[0]
    assert seg.segment_id == "s1"
    assert len(seg.frames) == 2
    assert seg.frames[0].agent_ids == ("p1", "p2")
    assert np.allclose(seg.frames[1].xy, [[0.5, 0.0], [1.5, 0.0]])


def test_trajectory_csv_rejects_gaps(tmp_path):
    path = tmp_path / "traj.csv"
    path.write_text(
        "segment_id,frame,agent_id,role,x,y\n"
        "s1,0,p1,generic,0.0,0.0\n"
        "s1,2,p1,generic,0.5,0.0\n"
    )
    with pytest.raises(ValueError, match="contiguous"):
        load_segments(str(path))


def test_trajectory_csv_rejects_missing_columns(tmp_path):
    path = tmp_path / "traj.csv"
    path.write_text("segment_id,frame,agent_id,x,y\ns1,0,p1,0.0,0.0\n")
    with pytest.raises(ValueError, match="missing columns"):
        load_segments(str(path))


def test_labels_csv(tmp_path):
    path = tmp_path / "labels.csv"
    path.write_text("segment_id,label\ns1,0\ns2,1\n")
    assert load_labels(str(path)) == {"s1": 0, "s2": 1}
    bad = tmp_path / "bad.csv"
    bad.write_text("segment_id,label\ns1,2\n")
    with pytest.raises(ValueError):
        load_labels(str(bad))


def test_config_defaults_and_file(tmp_path):
    config = Config()
    assert config.fps == 25.0
    assert config.window == 50 and config.overlap == 25
    assert config.epsilon == 1e-5 and config.cutoff_hz == 2.0
    assert config.sigma_player == pytest.approx(1.5**2 / (2 * math.log(2)))
    assert config.sigma_ring == pytest.approx(36 / (2 * math.log(2)))

    path = tmp_path / "run.cfg"
    path.write_text("# sample\nfps = 10\nwindow = 30\noverlap = 10\nepsilon = 1e-6\n")
    loaded = Config.from_file(str(path))
    assert loaded.fps == 10.0 and loaded.window == 30
    assert loaded.overlap == 10 and loaded.epsilon == 1e-6

    bad = tmp_path / "bad.cfg"
    bad.write_text("nonsense = 1\n")
    with pytest.raises(ValueError, match="unknown config key"):
        Config.from_file(str(bad))
