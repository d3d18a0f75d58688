"""Synthetic multichannel scenes and group synchronization errors.

Clips are rendered with a free-field inverse-distance model: one band-limited
noise source per scene, attenuated by 1/max(r, 0.3 m), delayed by r/c, plus
an independent white noise floor per channel.  Scenes can carry a slow
amplitude modulation so that time offsets between device groups actually
change the joint frame-power statistics; a stationary source would be
invisible to power-based features under any shift.

Synchronization errors follow the evaluation protocol: one Gaussian offset
per device group, rounded to whole samples, applied to every channel of the
group with zero padding at the clip boundary.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from .audio import AudioClip, make_clip, write_wav
from .errors import InvalidInputError, InvalidParameterError, InvalidTopologyError
from .topology import Groups, normalize_groups
from .util import subseed, write_csv

SPEED_OF_SOUND_M_S = 343.0
MIN_SOURCE_DISTANCE_M = 0.3

TRAIN_SPLIT = "train"
TEST_SPLIT = "test"


@dataclass(frozen=True)
class ScenePlan:
    """Recipe for one synthetic clip of a labeled scene.

    The source is band-limited noise at ``level_db`` (dB re full scale, RMS)
    optionally amplitude-modulated by ``mod_depth_db`` dB at ``mod_rate_hz``
    with a random phase.  ``level_db = -inf`` renders the noise floor only.

    ``diffuse_db`` sets a spatially uniform reverberant field relative to the
    direct sound at 1 m: independent same-band noise per channel that tracks
    the source envelope.  It decorrelates per-frame channel powers the way a
    real room does; ``-inf`` (default) disables it.
    """

    scene_id: str
    source_position: tuple[float, float]
    band_hz: tuple[float, float]
    level_db: float
    duration_s: float
    noise_floor_db: float
    mod_depth_db: float = 0.0
    mod_rate_hz: float = 0.0
    diffuse_db: float = -math.inf


@dataclass(frozen=True)
class ArrayLayout:
    """Microphone coordinates in meters plus the device-group partition."""

    mic_positions: np.ndarray
    groups: Groups

    @property
    def n_channels(self) -> int:
        return self.mic_positions.shape[0]


@dataclass(frozen=True)
class SyncErrorSpec:
    """Gaussian per-group time offsets: std ``sigma_s`` seconds, seeded.

    ``offsets_s`` forces explicit per-group offsets instead of sampling
    (useful for oracles and calibration).
    """

    sigma_s: float
    seed: int = 0
    offsets_s: tuple[float, ...] | None = None


def make_layout(mic_positions, groups) -> ArrayLayout:
    positions = np.asarray(mic_positions, dtype=float)
    if positions.ndim != 2 or positions.shape[1] != 2 or positions.shape[0] < 2:
        raise InvalidTopologyError(
            f"mic_positions must be (N>=2, 2) coordinates, got shape {positions.shape}"
        )
    if not np.all(np.isfinite(positions)):
        raise InvalidTopologyError("mic positions contain non-finite coordinates")
    return ArrayLayout(positions, normalize_groups(positions.shape[0], groups))


def _band_noise(rng: np.random.Generator, n: int, band_hz, sample_rate: int) -> np.ndarray:
    """Unit-RMS noise restricted to [lo, hi] Hz via an FFT brick-wall mask."""
    lo, hi = band_hz
    white = rng.standard_normal(n)
    spectrum = np.fft.rfft(white)
    freqs = np.fft.rfftfreq(n, 1.0 / sample_rate)
    spectrum[(freqs < lo) | (freqs > hi)] = 0.0
    shaped = np.fft.irfft(spectrum, n)
    rms = math.sqrt(float(np.mean(shaped * shaped)))
    if rms <= 0.0:
        raise InvalidInputError(f"band {band_hz} leaves no spectral content at {sample_rate} Hz")
    return shaped / rms


def synthesize_clip(
    plan: ScenePlan,
    layout: ArrayLayout,
    sample_rate: int,
    seed: int,
    position_jitter_m: float = 0.0,
) -> AudioClip:
    """Render one multichannel clip; a pure function of its arguments.

    The seeded generator is consumed in a fixed order (position jitter,
    source noise, modulation phase, channel noise) so identical inputs give
    bit-identical clips.
    """
    if plan.duration_s <= 0.0:
        raise InvalidInputError(f"duration must be positive, got {plan.duration_s}")
    lo, hi = plan.band_hz
    if not (0.0 <= lo < hi <= sample_rate / 2.0):
        raise InvalidInputError(
            f"band edges {plan.band_hz} must satisfy 0 <= lo < hi <= Nyquist ({sample_rate / 2:g})"
        )
    rng = np.random.default_rng(seed)
    n = int(round(plan.duration_s * sample_rate))
    n_ch = layout.n_channels

    position = np.asarray(plan.source_position, dtype=float)
    if position_jitter_m > 0.0:
        position = position + position_jitter_m * rng.standard_normal(2)

    distances = np.hypot(
        layout.mic_positions[:, 0] - position[0], layout.mic_positions[:, 1] - position[1]
    )
    delays = np.rint(distances / SPEED_OF_SOUND_M_S * sample_rate).astype(int)
    gains = 1.0 / np.maximum(distances, MIN_SOURCE_DISTANCE_M)
    max_delay = int(delays.max())

    data = np.zeros((n, n_ch))
    if np.isfinite(plan.level_db):
        amp = 10.0 ** (plan.level_db / 20.0)
        source = amp * _band_noise(rng, n + max_delay, plan.band_hz, sample_rate)
        envelope = np.ones(n + max_delay)
        if plan.mod_depth_db > 0.0 and plan.mod_rate_hz > 0.0:
            phase = rng.uniform(0.0, 2.0 * math.pi)
            t = np.arange(n + max_delay) / sample_rate
            envelope = 10.0 ** (
                plan.mod_depth_db * np.sin(2.0 * math.pi * plan.mod_rate_hz * t + phase) / 20.0
            )
            source = source * envelope
        for ch in range(n_ch):
            start = max_delay - delays[ch]
            data[:, ch] = gains[ch] * source[start : start + n]
        if np.isfinite(plan.diffuse_db):
            diffuse_amp = amp * 10.0 ** (plan.diffuse_db / 20.0)
            for ch in range(n_ch):
                start = max_delay - delays[ch]
                tail = diffuse_amp * _band_noise(rng, n, plan.band_hz, sample_rate)
                data[:, ch] += tail * envelope[start : start + n]

    if np.isfinite(plan.noise_floor_db):
        data += 10.0 ** (plan.noise_floor_db / 20.0) * rng.standard_normal((n, n_ch))
    return make_clip(data, sample_rate)


def inject_sync_error(clip: AudioClip, groups, spec: SyncErrorSpec) -> AudioClip:
    """Shift every channel of each device group by its group's time offset.

    Offsets are drawn from N(0, sigma_s^2) seconds (or taken from
    ``spec.offsets_s``), rounded to the nearest sample, and applied with zero
    padding at the boundary; channels within a group stay mutually aligned
    and the shift never rescales samples.
    """
    if spec.sigma_s < 0.0:
        raise InvalidParameterError(f"sigma must be nonnegative, got {spec.sigma_s}")
    norm_groups = normalize_groups(clip.n_channels, groups)
    if spec.offsets_s is not None:
        if len(spec.offsets_s) != len(norm_groups):
            raise InvalidParameterError(
                f"{len(spec.offsets_s)} explicit offsets for {len(norm_groups)} groups"
            )
        offsets = np.asarray(spec.offsets_s, dtype=float)
    else:
        rng = np.random.default_rng(spec.seed)
        offsets = rng.normal(0.0, spec.sigma_s, len(norm_groups))

    n = clip.n_samples
    out = clip.data.copy()
    for group, offset in zip(norm_groups, offsets):
        shift = int(np.rint(offset * clip.sample_rate))
        if abs(shift) >= n:
            raise InvalidParameterError(
                f"offset of {shift} samples exceeds the clip length {n}"
            )
        if shift == 0:
            continue
        channels = [c - 1 for c in group]
        shifted = np.zeros((n, len(channels)))
        if shift > 0:
            shifted[shift:] = clip.data[: n - shift, channels]
        else:
            shifted[: n + shift] = clip.data[-shift:, channels]
        out[:, channels] = shifted
    return AudioClip(out, clip.sample_rate)


@dataclass(frozen=True)
class SceneSpec:
    """Scene template: where the source sits and what it sounds like."""

    scene_id: str
    position: tuple[float, float]
    band_hz: tuple[float, float]
    level_db: float
    mod_depth_db: float = 0.0
    mod_rate_hz: float = 0.0


@dataclass(frozen=True)
class CorpusConfig:
    """Everything needed to generate a labeled train/test corpus.

    ``position_jitter_m`` and ``level_jitter_db`` add per-clip variation
    (source moves a little, activity loudness varies) so that scene models
    see realistic spread instead of degenerate point distributions.
    """

    scenes: tuple[SceneSpec, ...]
    layout: ArrayLayout
    clips_per_scene: int
    train_fraction: float = 0.7
    sample_rate: int = 16000
    clip_seconds: float = 8.0
    noise_floor_db: float = -40.0
    diffuse_db: float = -9.0
    position_jitter_m: float = 0.15
    level_jitter_db: float = 1.5
    master_seed: int = 0


@dataclass(frozen=True)
class ClipRecord:
    """One manifest entry: file name, scene label, split, synthesis seed."""

    path: str
    scene: str
    split: str
    seed: int


def _validate_corpus_config(config: CorpusConfig) -> None:
    if len(config.scenes) < 2:
        raise InvalidParameterError("a corpus needs at least 2 scenes")
    if config.clips_per_scene < 2:
        raise InvalidParameterError("a corpus needs at least 2 clips per scene")
    ids = [spec.scene_id for spec in config.scenes]
    if len(set(ids)) != len(ids):
        raise InvalidParameterError(f"duplicate scene ids: {ids}")
    for scene_id in ids:
        if not scene_id or not all(c.isalnum() or c in "_-" for c in scene_id):
            raise InvalidParameterError(f"scene id {scene_id!r} is not a safe file-name token")
    if not 0.0 < config.train_fraction < 1.0:
        raise InvalidParameterError("train_fraction must lie strictly between 0 and 1")


def _scene_plan(config: CorpusConfig, spec: SceneSpec) -> ScenePlan:
    return ScenePlan(
        scene_id=spec.scene_id,
        source_position=spec.position,
        band_hz=spec.band_hz,
        level_db=spec.level_db,
        duration_s=config.clip_seconds,
        noise_floor_db=config.noise_floor_db,
        mod_depth_db=spec.mod_depth_db,
        mod_rate_hz=spec.mod_rate_hz,
        diffuse_db=config.diffuse_db,
    )


def plan_corpus(config: CorpusConfig) -> list[tuple[ClipRecord, ScenePlan]]:
    """Deterministic corpus plan: per-clip records with derived seeds.

    The first ``round(train_fraction * clips_per_scene)`` clips of each scene
    go to the train split (at least one clip on each side); scene order
    follows the configuration.
    """
    _validate_corpus_config(config)
    n_train = int(round(config.train_fraction * config.clips_per_scene))
    n_train = min(max(n_train, 1), config.clips_per_scene - 1)

    entries = []
    for scene_idx, spec in enumerate(config.scenes):
        base_plan = _scene_plan(config, spec)
        for i in range(config.clips_per_scene):
            plan = base_plan
            if config.level_jitter_db > 0.0:
                level_rng = np.random.default_rng(
                    subseed(config.master_seed, "level", scene_idx, i)
                )
                jitter = config.level_jitter_db * float(level_rng.standard_normal())
                plan = replace(base_plan, level_db=base_plan.level_db + jitter)
            record = ClipRecord(
                path=f"{spec.scene_id}_{i:03d}.wav",
                scene=spec.scene_id,
                split=TRAIN_SPLIT if i < n_train else TEST_SPLIT,
                seed=subseed(config.master_seed, "clip", scene_idx, i),
            )
            entries.append((record, plan))
    return entries


def synthesize_corpus(config: CorpusConfig) -> list[tuple[ClipRecord, AudioClip]]:
    """Render every planned clip in memory."""
    return [
        (record, synthesize_clip(plan, config.layout, config.sample_rate, record.seed,
                                 config.position_jitter_m))
        for record, plan in plan_corpus(config)
    ]


def build_corpus(config: CorpusConfig, out_dir) -> list[ClipRecord]:
    """Render the corpus to WAV files plus a ``manifest.csv`` in ``out_dir``."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    records = []
    for record, clip in synthesize_corpus(config):
        write_wav(out_dir / record.path, clip)
        records.append(record)
    write_csv(
        out_dir / "manifest.csv",
        ["path", "scene", "split", "seed"],
        ((r.path, r.scene, r.split, r.seed) for r in records),
    )
    return records
