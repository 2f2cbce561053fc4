"""Command-line front end: synth, ingest-check, decompose, features,
classify, reconstruct.

Every command is deterministic given ``--seed``.  Exit codes: 0 success,
1 runtime or numerical failure, 2 usage or configuration error.  Output
files are written atomically (temp file + rename), JSON with sorted keys,
CSV floats via ``repr`` so reruns are byte-identical.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import classify, features, gdmd, ingest, pipeline, synth

__all__ = ["main", "entry_point"]

EXTRACTORS = ("gdmd", "laplacian", "handcrafted", "dmd_baseline")
TASKS = ("defence", "offence", "all_pairs")

EPSILON_SWEEP = (1e-3, 1e-5, 1e-8)
WINDOW_SWEEP = (25, 50, 75)
CUTOFF_SWEEP = (1.0, 2.0, 3.0)


class UsageError(Exception):
    """Bad arguments, paths or configuration; maps to exit code 2."""


def _write_atomic(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(text, encoding="utf-8")
    os.replace(tmp, path)


def _write_json(path: Path, record: dict) -> None:
    _write_atomic(path, json.dumps(record, indent=2, sort_keys=True) + "\n")


def _write_csv(path: Path, header: list[str], rows: list[list]) -> None:
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(header)
    writer.writerows(rows)
    _write_atomic(path, buf.getvalue())


def _load_config(path: str | None) -> ingest.Config:
    if path is None:
        return ingest.Config()
    if not os.path.exists(path):
        raise UsageError(f"config file not found: {path}")
    try:
        return ingest.Config.from_file(path)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def _require_file(path: str) -> str:
    if not os.path.exists(path):
        raise UsageError(f"input file not found: {path}")
    return path


def _map_jobs(fn, items, jobs: int):
    if jobs <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, items))


# ---------------------------------------------------------------- synth

def _planted_edge_segments(n_per_class: int, seed: int, fps: float) -> tuple[list, dict[str, int]]:
    """Trajectory segments where class 1 makes the two nearest defenders'
    distance oscillate at 0.5 Hz and class 0 keeps it fixed."""
    rng = np.random.default_rng(seed)
    segments, labels = [], {}
    statics = [
        synth.OrbitAgent("ring", "ring", (0.0, 0.0)),
        synth.OrbitAgent("ball", "ball", (2.0, 0.0)),
        synth.OrbitAgent("a0", "attacker", (3.5, 1.0)),
        synth.OrbitAgent("a1", "attacker", (4.5, -1.0)),
        synth.OrbitAgent("a2", "attacker", (5.5, 1.5)),
        synth.OrbitAgent("a3", "attacker", (6.5, -1.5)),
        synth.OrbitAgent("a4", "attacker", (7.5, 2.0)),
        synth.OrbitAgent("d0", "defender", (2.5, -2.0)),
        synth.OrbitAgent("d2", "defender", (6.0, -3.0)),
        synth.OrbitAgent("d3", "defender", (7.0, -3.5)),
        synth.OrbitAgent("d4", "defender", (8.0, -4.0)),
    ]
    idx = 0
    for label in (0, 1):
        for _ in range(n_per_class):
            phase = float(rng.uniform(0.0, 2.0 * np.pi))
            oscillator = synth.OrbitAgent(
                "d1",
                "defender",
                (3.8, -2.0),
                radius=0.5,
                freq_hz=synth.PLANTED_FREQ_HZ if label == 1 else 0.0,
                phase=phase,
            )
            spec = synth.TrajectorySpec(
                agents=tuple(statics + [oscillator]),
                fps=fps,
                duration_s=4.0,
                pos_noise_sd=0.02,
            )
            sid = f"seg{idx:04d}"
            segments.append(
                synth.gen_trajectories(spec, seed=int(rng.integers(0, 2**31)), segment_id=sid)
            )
            labels[sid] = label
            idx += 1
    return segments, labels


def cmd_synth(args: argparse.Namespace) -> int:
    if args.preset != "planted-edge":
        raise UsageError(f"unknown preset {args.preset!r}")
    config = _load_config(args.config)
    try:
        segments, labels = _planted_edge_segments(args.n, args.seed, config.fps)
    except ValueError as exc:
        raise UsageError(f"infeasible preset: {exc}") from exc
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    synth.write_trajectories_csv(str(out / "trajectories.csv.tmp"), segments)
    os.replace(out / "trajectories.csv.tmp", out / "trajectories.csv")
    synth.write_labels_csv(str(out / "labels.csv.tmp"), labels)
    os.replace(out / "labels.csv.tmp", out / "labels.csv")
    print(f"wrote {len(segments)} segments to {out / 'trajectories.csv'} and {out / 'labels.csv'}")
    return 0


# ---------------------------------------------------------- ingest-check

def cmd_ingest_check(args: argparse.Namespace) -> int:
    config = _load_config(args.config)
    segments = ingest.load_segments(_require_file(args.trajectories), fps=config.fps)
    for seg in segments:
        series = ingest.build_adjacency_series(seg, config)
        lo = float(series.tensor.min())
        hi = float(series.tensor.max())
        if not (0.0 < lo and hi <= 1.0):
            raise ValueError(f"segment {seg.segment_id}: adjacency outside (0, 1]: [{lo}, {hi}]")
        print(
            f"segment {seg.segment_id}: frames={series.n_frames} nodes={series.m} "
            f"labels={','.join(series.node_labels)} range=[{lo:.3g}, {hi:.3g}]"
        )
    print(f"OK: {len(segments)} segment(s)")
    return 0


# ------------------------------------------------------------- decompose

def _filtered_series(seg: ingest.Segment, config: ingest.Config) -> ingest.AdjacencySeries:
    return ingest.lowpass(ingest.build_adjacency_series(seg, config), config.cutoff_hz)


def cmd_decompose(args: argparse.Namespace) -> int:
    config = _load_config(args.config)
    segments = ingest.load_segments(_require_file(args.trajectories), fps=config.fps)
    out = Path(args.out)

    def process(seg: ingest.Segment) -> tuple[str, dict]:
        wm = pipeline.decompose_segment(_filtered_series(seg, config), config)
        return seg.segment_id, pipeline.to_json_record(seg.segment_id, wm, config)

    for sid, record in _map_jobs(process, segments, args.jobs):
        _write_json(out / f"{sid}.json", record)
    print(f"decomposed {len(segments)} segment(s) into {out}")
    return 0


# -------------------------------------------------------------- features

def _extract_one(
    series: ingest.AdjacencySeries, extractor: str, task: str, config: ingest.Config
) -> features.FeatureVector:
    if extractor == "handcrafted":
        return features.handcrafted(series, task)
    if extractor == "dmd_baseline":
        return features.dmd_spectrum_baseline(series, task, config)
    wm = pipeline.decompose_segment(series, config)
    if extractor == "gdmd":
        return features.gdmd_spectrum(wm.averaged_mode, task, labels=series.node_labels)
    if extractor == "laplacian":
        return features.laplacian_eigs(wm.averaged_mode, k=series.m - 1)
    raise UsageError(f"unknown extractor {extractor!r}")


def cmd_features(args: argparse.Namespace) -> int:
    config = _load_config(args.config)
    segments = ingest.load_segments(_require_file(args.trajectories), fps=config.fps)
    labels = ingest.load_labels(_require_file(args.labels)) if args.labels else None
    if labels is not None:
        missing = [s.segment_id for s in segments if s.segment_id not in labels]
        if missing:
            raise UsageError(f"labels file lacks segments: {missing[:5]}")

    def process(seg: ingest.Segment) -> features.FeatureVector:
        return _extract_one(_filtered_series(seg, config), args.extractor, args.task, config)

    vectors = _map_jobs(process, segments, args.jobs)
    names = vectors[0].names
    header = ["segment_id"] + names + (["label"] if labels is not None else [])
    rows = []
    for seg, fv in zip(segments, vectors):
        if fv.names != names:
            raise ValueError(f"segment {seg.segment_id}: feature names differ")
        row = [seg.segment_id] + [repr(float(v)) for v in fv.values]
        if labels is not None:
            row.append(str(labels[seg.segment_id]))
        rows.append(row)
    out = Path(args.out)
    _write_csv(out / "features.csv", header, rows)
    print(f"wrote {len(rows)} x {len(names)} feature matrix to {out / 'features.csv'}")
    return 0


# -------------------------------------------------------------- classify

def _read_features_csv(path: str) -> classify.LabeledDataset:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if not header or header[0] != "segment_id" or header[-1] != "label":
            raise UsageError(f"{path}: expected header segment_id,<features...>,label")
        names = header[1:-1]
        feats, labels = [], []
        for row in reader:
            feats.append([float(v) for v in row[1:-1]])
            labels.append(int(row[-1]))
    return classify.LabeledDataset(np.array(feats), np.array(labels), names)


def cmd_classify(args: argparse.Namespace) -> int:
    dataset = _read_features_csv(_require_file(args.features))
    result = classify.cross_validate(
        dataset, l2=args.l2, repeats=args.repeats, folds=args.folds, seed=args.seed
    )
    out = Path(args.out)
    _write_json(
        out / "metrics.json",
        {
            "n_evaluations": result.n_evaluations,
            "repeats": args.repeats,
            "folds": args.folds,
            "seed": args.seed,
            "l2": args.l2,
            "metrics": {
                key: {"mean": result.means[key], "sd": result.sds[key]} for key in result.means
            },
        },
    )
    pooled = classify.evaluate(result.pooled_scores, result.pooled_labels)
    _write_csv(out / "roc.csv", ["fpr", "tpr"], [[repr(x), repr(y)] for x, y in pooled.roc_points])
    _write_csv(
        out / "pr.csv", ["recall", "precision"], [[repr(x), repr(y)] for x, y in pooled.pr_points]
    )
    for key in ("accuracy", "auc", "f_measure"):
        print(f"{key}: {result.means[key]:.3f} +- {result.sds[key]:.3f}")
    print(f"wrote metrics.json, roc.csv, pr.csv to {out}")
    return 0


# ------------------------------------------------------------ reconstruct

def _mean_abs_error(series: ingest.AdjacencySeries, config: ingest.Config) -> float:
    """Mean element-wise reconstruction error over every window, evaluated
    on the frames the operator was built from (all but each window's last)."""
    windows = pipeline.sliding_windows(series, config.window, config.overlap)
    errors = []
    for win in windows:
        result = gdmd.graph_dmd(win, config.epsilon)
        n_eval = win.n_frames - 1
        estimate = gdmd.reconstruct_series(result, n_eval)
        errors.append(float(np.mean(np.abs(win.tensor[:, :, :n_eval] - estimate))))
    return float(np.mean(errors))


def cmd_reconstruct(args: argparse.Namespace) -> int:
    config = _load_config(args.config)
    segments = ingest.load_segments(_require_file(args.trajectories), fps=config.fps)
    raw_series = [ingest.build_adjacency_series(seg, config) for seg in segments]
    base_filtered = [ingest.lowpass(s, config.cutoff_hz) for s in raw_series]

    def sweep(values, make_config, series_for):
        rows = []
        for value in values:
            cfg = make_config(value)
            per_segment = [_mean_abs_error(s, cfg) for s in series_for(value)]
            rows.append({"value": value, "mean_abs_error": float(np.mean(per_segment))})
        return rows

    record = {
        "epsilon_sweep": sweep(
            EPSILON_SWEEP,
            lambda eps: ingest.Config(
                fps=config.fps, cutoff_hz=config.cutoff_hz, window=config.window,
                overlap=config.overlap, epsilon=eps,
            ),
            lambda _: base_filtered,
        ),
        "window_sweep": sweep(
            WINDOW_SWEEP,
            lambda w: ingest.Config(
                fps=config.fps, cutoff_hz=config.cutoff_hz, window=w,
                overlap=w // 2, epsilon=config.epsilon,
            ),
            lambda _: base_filtered,
        ),
        "cutoff_sweep": sweep(
            CUTOFF_SWEEP,
            lambda c: ingest.Config(
                fps=config.fps, cutoff_hz=c, window=config.window,
                overlap=config.overlap, epsilon=config.epsilon,
            ),
            lambda c: [ingest.lowpass(s, c) for s in raw_series],
        ),
    }
    out = Path(args.out)
    _write_json(out / "reconstruction.json", record)
    for row in record["epsilon_sweep"]:
        print(f"epsilon={row['value']:g}: mean abs error {row['mean_abs_error']:.3g}")
    print(f"wrote reconstruction.json to {out}")
    return 0


# ------------------------------------------------------------------ main

def _build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="key = value config file")
    common.add_argument("--seed", type=int, default=0, help="random seed (default 0)")
    common.add_argument("--jobs", type=int, default=1, help="parallel workers (default 1)")
    common.add_argument("--out", default=".", help="output directory (default .)")

    parser = argparse.ArgumentParser(
        prog="graphdmd",
        description="Spectral decomposition and classification of weighted-graph time series.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", parents=[common], help="generate synthetic trajectories + labels")
    p.add_argument("--preset", default="planted-edge", help="dataset preset")
    p.add_argument("--n", type=int, default=100, help="segments per class")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("ingest-check", parents=[common], help="validate a trajectory file")
    p.add_argument("trajectories", help="trajectory CSV")
    p.set_defaults(func=cmd_ingest_check)

    p = sub.add_parser("decompose", parents=[common], help="windowed decomposition per segment")
    p.add_argument("trajectories", help="trajectory CSV")
    p.set_defaults(func=cmd_decompose)

    p = sub.add_parser("features", parents=[common], help="extract a feature matrix")
    p.add_argument("trajectories", help="trajectory CSV")
    p.add_argument("--labels", help="labels CSV (adds a label column)")
    p.add_argument("--task", choices=TASKS, default="defence")
    p.add_argument("--extractor", choices=EXTRACTORS, default="gdmd")
    p.set_defaults(func=cmd_features)

    p = sub.add_parser("classify", parents=[common], help="cross-validated logistic regression")
    p.add_argument("features", help="features CSV with a label column")
    p.add_argument("--l2", type=float, default=1e-4)
    p.add_argument("--repeats", type=int, default=5)
    p.add_argument("--folds", type=int, default=5)
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("reconstruct", parents=[common], help="reconstruction-error parameter sweeps")
    p.add_argument("trajectories", help="trajectory CSV")
    p.set_defaults(func=cmd_reconstruct)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # runtime/numerical failure
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


def entry_point() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry_point()
