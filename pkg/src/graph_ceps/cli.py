"""Command-line interface.

Subcommands cover the whole pipeline: ``graph build``, ``basis``,
``simulate``, ``features``, ``train``, ``eval``, ``sweep``, ``verify-ring``.
Exit codes: 0 success, 2 invalid configuration, 3 data error, 4 numerical
failure.  The environment variable ``GRAPH_CEPS_SEED`` overrides the master
seed of ``simulate`` and ``sweep``.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from .audio import read_wav
from .classify import evaluate, load_models, save_model, train_gmm
from .errors import (
    InvalidInputError,
    InvalidMatrixError,
    InvalidParameterError,
    InvalidTopologyError,
    NumericalError,
)
from .experiment import (
    basis_dump_rows,
    default_experiment_config,
    load_corpus_config,
    load_experiment_config,
    run_sweep,
    with_master_seed,
)
from .features import (
    FEATURE_KINDS,
    CovarianceModel,
    concat_frames,
    fit_covariance,
    frame_log_power,
    pca_basis,
    read_features_csv,
    transform_frames,
    write_features_csv,
)
from .simulate import build_corpus
from .spectral import gft_basis, verify_ring_equivalence
from .topology import laplacian, load_topology
from .util import read_csv_rows, subseed, write_csv, write_matrix_csv

ACCEPTANCE_RING_SIZES = (3, 4, 8, 16, 64)


def _env_seed() -> int | None:
    raw = os.environ.get("GRAPH_CEPS_SEED")
    if raw is None:
        return None
    try:
        return int(raw)
    except ValueError as exc:
        raise InvalidParameterError(f"GRAPH_CEPS_SEED must be an integer, got {raw!r}") from exc


def _resolve_seed(flag_value: int | None) -> int | None:
    env = _env_seed()
    return env if env is not None else flag_value


def cmd_graph_build(args) -> int:
    graph = load_topology(args.topology)
    write_matrix_csv(args.out, laplacian(graph).matrix)
    print(f"wrote {graph.n_channels}x{graph.n_channels} Laplacian to {args.out}")
    return 0


def cmd_basis(args) -> int:
    graph = load_topology(args.topology)
    eigenvalues, rows = basis_dump_rows(graph)
    write_matrix_csv(args.out, rows, extra_first_row=eigenvalues)
    print(f"wrote eigenvalues + transform rows for N={graph.n_channels} to {args.out}")
    return 0


def cmd_simulate(args) -> int:
    seed = _resolve_seed(args.seed)
    config = load_corpus_config(args.config if args.config else {}, master_seed=seed)
    records = build_corpus(config, args.out)
    n_train = sum(1 for r in records if r.split == "train")
    print(f"wrote {len(records)} clips ({n_train} train) to {args.out}")
    return 0


def _sc_basis_for_clip(args, frames):
    if args.cov:
        header, rows = read_csv_rows(args.cov)
        matrix = np.array([[float(v) for v in row] for row in rows])
        cov = CovarianceModel(matrix, 0)
    else:
        cov = fit_covariance(frames)
    return pca_basis(cov)


def cmd_features(args) -> int:
    if (args.wav is None) == (args.corpus is None):
        raise InvalidParameterError("exactly one of --wav or --corpus is required")
    if args.wav is not None:
        return _features_single(args)
    return _features_corpus(args)


def _features_single(args) -> int:
    frames = frame_log_power(read_wav(args.wav), args.frame_ms, args.hop_ms)
    if args.kind == "gc":
        basis = gft_basis(laplacian(load_topology(args.topology)))
    else:
        basis = _sc_basis_for_clip(args, frames)
    features = transform_frames(frames, basis, args.order, args.kind)
    write_features_csv(args.out, features)
    print(f"wrote {features.n_frames} x {features.order} {args.kind} features to {args.out}")
    return 0


def _features_corpus(args) -> int:
    manifest_path = Path(args.corpus)
    corpus_dir = manifest_path.parent
    header, rows = read_csv_rows(manifest_path)
    if header[:3] != ["path", "scene", "split"]:
        raise InvalidInputError(f"{manifest_path}: not a corpus manifest")
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)

    clip_frames = [
        (row[0], row[1], row[2], frame_log_power(read_wav(corpus_dir / row[0]), args.frame_ms, args.hop_ms))
        for row in rows
    ]
    if args.kind == "gc":
        basis = gft_basis(laplacian(load_topology(args.topology)))
    else:
        train_frames = [f for _, _, split, f in clip_frames if split == "train"]
        if not train_frames:
            raise InvalidInputError("corpus has no train split to fit the feature basis on")
        cov = fit_covariance(concat_frames(train_frames))
        write_matrix_csv(out_dir / "sc_covariance.csv", cov.r_q)
        basis = pca_basis(cov)

    manifest_rows = []
    for path, scene, split, frames in clip_frames:
        features = transform_frames(frames, basis, args.order, args.kind)
        feature_name = Path(path).stem + ".csv"
        write_features_csv(out_dir / feature_name, features)
        manifest_rows.append((feature_name, scene, split))
    write_csv(out_dir / "manifest.csv", ["feature_path", "scene", "split"], manifest_rows)
    print(f"wrote {len(manifest_rows)} {args.kind} feature files to {out_dir}")
    return 0


def _read_feature_manifest(features_dir):
    features_dir = Path(features_dir)
    header, rows = read_csv_rows(features_dir / "manifest.csv")
    if header[:3] != ["feature_path", "scene", "split"]:
        raise InvalidInputError(f"{features_dir}: not a feature manifest")
    return features_dir, rows


def cmd_train(args) -> int:
    features_dir, rows = _read_feature_manifest(args.features)
    by_scene: dict[str, list] = {}
    for path, scene, split in (r[:3] for r in rows):
        if split == "train":
            by_scene.setdefault(scene, []).append(read_features_csv(features_dir / path))
    if not by_scene:
        raise InvalidInputError("feature manifest has no train rows")
    out_dir = Path(args.out)
    for scene_idx, scene in enumerate(sorted(by_scene)):
        model = train_gmm(
            scene, by_scene[scene], k=args.k, seed=subseed(args.seed, "train", scene_idx)
        )
        save_model(out_dir / f"{scene}.json", model)
    print(f"trained {len(by_scene)} scene models (k={args.k}) into {out_dir}")
    return 0


def cmd_eval(args) -> int:
    features_dir, rows = _read_feature_manifest(args.features)
    models = load_models(args.models)
    testset = [
        (read_features_csv(features_dir / path), scene)
        for path, scene, split in (r[:3] for r in rows)
        if split == "test"
    ]
    report = evaluate(testset, models)
    out_rows = [
        ("confusion", true, pred, int(report.confusion[i, j]))
        for i, true in enumerate(report.scenes)
        for j, pred in enumerate(report.scenes)
    ]
    out_rows.append(("accuracy", "", "", report.accuracy))
    write_csv(args.out, ["metric", "scene_true", "scene_pred", "value"], out_rows)
    print(f"accuracy {report.accuracy:.4f} over {len(testset)} clips; report in {args.out}")
    return 0


def cmd_sweep(args) -> int:
    seed = _resolve_seed(args.seed)
    if args.config:
        config = load_experiment_config(args.config, master_seed=seed)
    else:
        config = default_experiment_config()
        if seed is not None:
            config = with_master_seed(config, seed)
    if args.trials is not None:
        config = replace(config, trials=args.trials)
    if args.kinds is not None:
        config = replace(config, kinds=tuple(args.kinds.split(",")))
    if args.sigma_grid is not None:
        grid = tuple(float(s) for s in args.sigma_grid.split(","))
        config = replace(config, sigma_grid_s=grid)

    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    result = run_sweep(config, out_path=out_dir / "sweep.csv")
    for row in result.summary_rows:
        print(
            f"{row.kind}  sigma={row.sigma_s:g}s  "
            f"accuracy={row.mean_accuracy:.4f} +/- {row.std_accuracy:.4f}"
        )
    print(f"wrote {out_dir / 'sweep.csv'}")
    return 0


def cmd_verify_ring(args) -> int:
    sizes = args.n if args.n else list(ACCEPTANCE_RING_SIZES)
    rows = []
    all_passed = True
    for n in sizes:
        report = verify_ring_equivalence(n, tol=args.tol)
        all_passed = all_passed and report.passed
        rows.append(
            (report.n, report.max_projector_mismatch, report.max_column_residual,
             "pass" if report.passed else "FAIL")
        )
        print(
            f"N={report.n}: projector mismatch {report.max_projector_mismatch:.3e}, "
            f"column residual {report.max_column_residual:.3e} -> "
            f"{'pass' if report.passed else 'FAIL'}"
        )
    if args.out:
        write_csv(args.out, ["n", "max_projector_mismatch", "max_column_residual", "result"], rows)
    return 0 if all_passed else 4


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="graph-ceps",
        description="Graph-cepstrum spatial features for distributed microphone arrays",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_graph = sub.add_parser("graph", help="topology utilities")
    graph_sub = p_graph.add_subparsers(dest="graph_command", required=True)
    p_build = graph_sub.add_parser("build", help="build a Laplacian from a topology file")
    p_build.add_argument("--topology", required=True)
    p_build.add_argument("--out", required=True)
    p_build.set_defaults(func=cmd_graph_build)

    p_basis = sub.add_parser("basis", help="dump eigenvalues and the transform matrix")
    p_basis.add_argument("--topology", required=True)
    p_basis.add_argument("--out", required=True)
    p_basis.set_defaults(func=cmd_basis)

    p_sim = sub.add_parser("simulate", help="synthesize a labeled corpus")
    p_sim.add_argument("--config", help="simulation config JSON (defaults used if omitted)")
    p_sim.add_argument("--out", required=True)
    p_sim.add_argument("--seed", type=int, help="override the master seed")
    p_sim.set_defaults(func=cmd_simulate)

    p_feat = sub.add_parser("features", help="extract gc/sc features from WAV audio")
    p_feat.add_argument("--wav", help="a single multichannel WAV file")
    p_feat.add_argument("--corpus", help="a corpus manifest.csv for batch extraction")
    p_feat.add_argument("--topology", help="topology JSON (required for --kind gc)")
    p_feat.add_argument("--kind", choices=FEATURE_KINDS, required=True)
    p_feat.add_argument("--order", type=int, default=None)
    p_feat.add_argument("--frame-ms", type=float, default=20.0)
    p_feat.add_argument("--hop-ms", type=float, default=None)
    p_feat.add_argument("--cov", help="covariance CSV for --kind sc (default: fit on input)")
    p_feat.add_argument("--out", required=True)
    p_feat.set_defaults(func=cmd_features)

    p_train = sub.add_parser("train", help="train per-scene GMMs on extracted features")
    p_train.add_argument("--features", required=True, help="feature directory from `features`")
    p_train.add_argument("--k", type=int, default=8)
    p_train.add_argument("--seed", type=int, default=0)
    p_train.add_argument("--out", required=True)
    p_train.set_defaults(func=cmd_train)

    p_eval = sub.add_parser("eval", help="classify the test split and report accuracy")
    p_eval.add_argument("--features", required=True)
    p_eval.add_argument("--models", required=True)
    p_eval.add_argument("--out", required=True)
    p_eval.set_defaults(func=cmd_eval)

    p_sweep = sub.add_parser("sweep", help="run the accuracy-vs-sync-error experiment")
    p_sweep.add_argument("--config", help="experiment config JSON (defaults used if omitted)")
    p_sweep.add_argument("--out", required=True)
    p_sweep.add_argument("--seed", type=int, help="override the master seed")
    p_sweep.add_argument("--trials", type=int, default=None)
    p_sweep.add_argument("--kinds", help="comma-separated subset of gc,sc")
    p_sweep.add_argument("--sigma-grid", help="comma-separated sigmas in seconds")
    p_sweep.set_defaults(func=cmd_sweep)

    p_ring = sub.add_parser("verify-ring", help="check ring-graph basis vs. DFT")
    p_ring.add_argument("--n", type=int, nargs="*", help=f"sizes (default {ACCEPTANCE_RING_SIZES})")
    p_ring.add_argument("--tol", type=float, default=1e-9)
    p_ring.add_argument("--out")
    p_ring.set_defaults(func=cmd_verify_ring)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (InvalidTopologyError, InvalidParameterError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (InvalidInputError, InvalidMatrixError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except NumericalError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    sys.exit(main())
