"""Sweep harness: corpus -> features -> GMMs -> accuracy vs. sync error.

For every trial the per-scene GMMs are trained on the clean training split;
synchronization errors of each sigma in the grid are injected into the test
split only, and both feature kinds are classified on the same perturbed
audio.  All randomness derives from one master seed, so a sweep is a pure
function of its configuration.
"""

from __future__ import annotations

import json
import statistics
from dataclasses import dataclass, replace
from pathlib import Path

from .classify import DEFAULT_COMPONENTS, GmmModel, classify_clip, train_gmm
from .defaults import (
    DEFAULT_MASTER_SEED,
    DEFAULT_SIGMA_GRID_S,
    DEFAULT_TRIALS,
    default_corpus_config,
    default_topology,
)
from .errors import GraphCepsError, InvalidParameterError
from .features import (
    FEATURE_KINDS,
    concat_frames,
    fit_covariance,
    frame_log_power,
    pca_basis,
    transform_frames,
)
from .spectral import gft_basis
from .simulate import (
    TEST_SPLIT,
    TRAIN_SPLIT,
    ArrayLayout,
    CorpusConfig,
    SceneSpec,
    SyncErrorSpec,
    inject_sync_error,
    make_layout,
    synthesize_corpus,
)
from .topology import MicArrayGraph, laplacian, load_topology
from .util import subseed, write_csv


@dataclass(frozen=True)
class ExperimentConfig:
    """Full description of one robustness sweep."""

    topology: MicArrayGraph
    corpus: CorpusConfig
    kinds: tuple[str, ...] = FEATURE_KINDS
    order: int | None = None
    gmm_k: int = DEFAULT_COMPONENTS
    sigma_grid_s: tuple[float, ...] = DEFAULT_SIGMA_GRID_S
    trials: int = DEFAULT_TRIALS
    master_seed: int = DEFAULT_MASTER_SEED


@dataclass(frozen=True)
class TrialRow:
    kind: str
    sigma_s: float
    trial: int
    accuracy: float


@dataclass(frozen=True)
class SummaryRow:
    kind: str
    sigma_s: float
    mean_accuracy: float
    std_accuracy: float


@dataclass(frozen=True)
class SweepResult:
    trial_rows: tuple[TrialRow, ...]
    summary_rows: tuple[SummaryRow, ...]

    def mean_accuracy(self, kind: str, sigma_s: float) -> float:
        for row in self.summary_rows:
            if row.kind == kind and row.sigma_s == sigma_s:
                return row.mean_accuracy
        raise KeyError(f"no summary row for kind={kind!r}, sigma={sigma_s}")


def default_experiment_config(master_seed: int = DEFAULT_MASTER_SEED) -> ExperimentConfig:
    return ExperimentConfig(
        topology=default_topology(),
        corpus=default_corpus_config(subseed(master_seed, "corpus")),
        master_seed=master_seed,
    )


def _validate_experiment_config(config: ExperimentConfig) -> None:
    for kind in config.kinds:
        if kind not in FEATURE_KINDS:
            raise InvalidParameterError(f"unknown feature kind {kind!r}")
    if not config.kinds:
        raise InvalidParameterError("at least one feature kind is required")
    if config.trials < 1:
        raise InvalidParameterError("trials must be >= 1")
    if any(s < 0.0 for s in config.sigma_grid_s) or not config.sigma_grid_s:
        raise InvalidParameterError("sigma grid must be non-empty and nonnegative")
    if config.topology.n_channels != config.corpus.layout.n_channels:
        raise InvalidParameterError(
            f"topology has {config.topology.n_channels} channels but the layout has "
            f"{config.corpus.layout.n_channels}"
        )
    if config.topology.groups != config.corpus.layout.groups:
        raise InvalidParameterError("topology groups and layout groups must agree")


def run_sweep(config: ExperimentConfig, out_path=None) -> SweepResult:
    """Execute the sweep; optionally stream the result CSV to ``out_path``.

    On a stage failure the rows gathered so far are flushed to ``out_path``
    before a stage-tagged error propagates.
    """
    _validate_experiment_config(config)
    master = config.master_seed
    rows: list[TrialRow] = []
    stage = "simulate"
    try:
        corpus = synthesize_corpus(config.corpus)
        train_clips = [(r, c) for r, c in corpus if r.split == TRAIN_SPLIT]
        test_clips = [(r, c) for r, c in corpus if r.split == TEST_SPLIT]

        stage = "features"
        train_frames = [(r.scene, frame_log_power(c)) for r, c in train_clips]
        bases = {}
        if "gc" in config.kinds:
            bases["gc"] = gft_basis(laplacian(config.topology))
        if "sc" in config.kinds:
            cov = fit_covariance(concat_frames([f for _, f in train_frames]))
            bases["sc"] = pca_basis(cov)

        stage = "train"
        scene_ids = [spec.scene_id for spec in config.corpus.scenes]
        models: dict[tuple[int, str], dict[str, GmmModel]] = {}
        for trial in range(config.trials):
            for kind in config.kinds:
                per_scene = {}
                for scene_idx, scene in enumerate(scene_ids):
                    feats = [
                        transform_frames(frames, bases[kind], config.order, kind)
                        for label, frames in train_frames
                        if label == scene
                    ]
                    per_scene[scene] = train_gmm(
                        scene,
                        feats,
                        k=config.gmm_k,
                        seed=subseed(master, "train", trial, kind, scene_idx),
                    )
                models[(trial, kind)] = per_scene

        stage = "evaluate"
        groups = config.topology.groups
        for trial in range(config.trials):
            for sigma_idx, sigma in enumerate(config.sigma_grid_s):
                correct = {kind: 0 for kind in config.kinds}
                for clip_idx, (record, clip) in enumerate(test_clips):
                    spec = SyncErrorSpec(
                        sigma_s=sigma,
                        seed=subseed(master, "sync", trial, sigma_idx, clip_idx),
                    )
                    frames = frame_log_power(inject_sync_error(clip, groups, spec))
                    for kind in config.kinds:
                        feats = transform_frames(frames, bases[kind], config.order, kind)
                        if classify_clip(feats, models[(trial, kind)]) == record.scene:
                            correct[kind] += 1
                for kind in config.kinds:
                    rows.append(
                        TrialRow(kind, float(sigma), trial, correct[kind] / len(test_clips))
                    )
    except Exception as exc:
        if out_path is not None:
            _write_sweep_csv(out_path, rows, [])
        if isinstance(exc, GraphCepsError):
            raise type(exc)(f"sweep stage '{stage}' failed: {exc}") from exc
        raise GraphCepsError(f"sweep stage '{stage}' failed: {exc}") from exc

    summaries = []
    for kind in config.kinds:
        for sigma in config.sigma_grid_s:
            accs = [r.accuracy for r in rows if r.kind == kind and r.sigma_s == float(sigma)]
            summaries.append(
                SummaryRow(
                    kind,
                    float(sigma),
                    statistics.fmean(accs),
                    statistics.pstdev(accs) if len(accs) > 1 else 0.0,
                )
            )

    trial_rows = tuple(sorted(rows, key=lambda r: (r.kind, r.sigma_s, r.trial)))
    summary_rows = tuple(sorted(summaries, key=lambda r: (r.kind, r.sigma_s)))
    result = SweepResult(trial_rows, summary_rows)
    if out_path is not None:
        write_sweep_csv(out_path, result)
    return result


def _write_sweep_csv(path, trial_rows, summary_rows) -> None:
    header = ["row_type", "kind", "sigma_s", "trial", "accuracy", "accuracy_std"]
    out = []
    for row in sorted(trial_rows, key=lambda r: (r.kind, r.sigma_s, r.trial)):
        out.append(["trial", row.kind, row.sigma_s, row.trial, row.accuracy, ""])
    for row in sorted(summary_rows, key=lambda r: (r.kind, r.sigma_s)):
        out.append(["summary", row.kind, row.sigma_s, "", row.mean_accuracy, row.std_accuracy])
    write_csv(path, header, out)


def write_sweep_csv(path, result: SweepResult) -> None:
    """Persist a sweep: per-trial rows first, then one summary row per (kind, sigma)."""
    _write_sweep_csv(path, result.trial_rows, result.summary_rows)


def basis_dump_rows(topology: MicArrayGraph):
    """Eigenvalues (first row) followed by the transposed eigenvector matrix."""
    basis = gft_basis(laplacian(topology))
    return basis.eigenvalues, basis.eigenvectors.T


def _as_tuple2(value, name: str) -> tuple[float, float]:
    if not isinstance(value, (list, tuple)) or len(value) != 2:
        raise InvalidParameterError(f"{name} must be a [x, y] pair, got {value!r}")
    return (float(value[0]), float(value[1]))


def _load_doc(source, what: str) -> dict:
    if isinstance(source, (str, Path)):
        try:
            with open(source, encoding="utf-8") as fh:
                source = json.load(fh)
        except json.JSONDecodeError as exc:
            raise InvalidParameterError(f"{what} file is not valid JSON: {exc}") from exc
    if not isinstance(source, dict):
        raise InvalidParameterError(f"{what} must be a JSON object")
    return source


def load_layout(source) -> ArrayLayout:
    """Layout schema: ``{"mic_positions": [[x, y], ...], "groups": [[int,...],...]}``."""
    doc = _load_doc(source, "layout")
    for key in ("mic_positions", "groups"):
        if key not in doc:
            raise InvalidParameterError(f"layout is missing '{key}'")
    return make_layout(doc["mic_positions"], doc["groups"])


def load_corpus_config(source, master_seed: int | None = None) -> CorpusConfig:
    """Build a corpus configuration from a JSON document, filling defaults."""
    doc = _load_doc(source, "simulation config")
    base = default_corpus_config()

    layout = load_layout(doc["layout"]) if "layout" in doc else base.layout
    if "scenes" in doc:
        scenes = []
        for entry in doc["scenes"]:
            if "id" not in entry:
                raise InvalidParameterError(f"scene entry missing 'id': {entry!r}")
            scenes.append(
                SceneSpec(
                    scene_id=str(entry["id"]),
                    position=_as_tuple2(entry.get("position", (0.0, 0.0)), "scene position"),
                    band_hz=_as_tuple2(entry.get("band_hz", (100.0, 4000.0)), "scene band_hz"),
                    level_db=float(entry.get("level_db", -20.0)),
                    mod_depth_db=float(entry.get("mod_depth_db", 0.0)),
                    mod_rate_hz=float(entry.get("mod_rate_hz", 0.0)),
                )
            )
        scenes = tuple(scenes)
    else:
        scenes = base.scenes

    seed = master_seed if master_seed is not None else int(doc.get("master_seed", base.master_seed))
    return CorpusConfig(
        scenes=scenes,
        layout=layout,
        clips_per_scene=int(doc.get("clips_per_scene", base.clips_per_scene)),
        train_fraction=float(doc.get("train_fraction", base.train_fraction)),
        sample_rate=int(doc.get("sample_rate", base.sample_rate)),
        clip_seconds=float(doc.get("clip_seconds", base.clip_seconds)),
        noise_floor_db=float(doc.get("noise_floor_db", base.noise_floor_db)),
        diffuse_db=float(doc.get("diffuse_db", base.diffuse_db)),
        position_jitter_m=float(doc.get("position_jitter_m", base.position_jitter_m)),
        level_jitter_db=float(doc.get("level_jitter_db", base.level_jitter_db)),
        master_seed=seed,
    )


def load_experiment_config(source, master_seed: int | None = None) -> ExperimentConfig:
    """Build an experiment configuration from a JSON document, filling defaults.

    ``master_seed`` (e.g. from the CLI or environment) overrides the config's
    seed; the corpus seed is always derived from the experiment seed.
    """
    doc = _load_doc(source, "experiment config")
    seed = master_seed if master_seed is not None else int(doc.get("master_seed", DEFAULT_MASTER_SEED))
    topology = load_topology(doc["topology"]) if "topology" in doc else default_topology()
    corpus = load_corpus_config(doc.get("sim", {}), master_seed=subseed(seed, "corpus"))

    order = doc.get("order")
    return ExperimentConfig(
        topology=topology,
        corpus=corpus,
        kinds=tuple(doc.get("kinds", FEATURE_KINDS)),
        order=None if order is None else int(order),
        gmm_k=int(doc.get("gmm_k", DEFAULT_COMPONENTS)),
        sigma_grid_s=tuple(float(s) for s in doc.get("sigma_grid_s", DEFAULT_SIGMA_GRID_S)),
        trials=int(doc.get("trials", DEFAULT_TRIALS)),
        master_seed=seed,
    )


def with_master_seed(config: ExperimentConfig, master_seed: int) -> ExperimentConfig:
    """Re-key an experiment (and its derived corpus seed) to a new master seed."""
    corpus = replace(config.corpus, master_seed=subseed(master_seed, "corpus"))
    return replace(config, corpus=corpus, master_seed=master_seed)
