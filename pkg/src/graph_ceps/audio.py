"""Multichannel audio clips and 16-bit PCM WAV I/O."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.io import wavfile

from .errors import InvalidInputError


@dataclass(frozen=True)
class AudioClip:
    """Multichannel samples, shape (n_samples, n_channels), plus sample rate."""

    data: np.ndarray
    sample_rate: int

    @property
    def n_samples(self) -> int:
        return self.data.shape[0]

    @property
    def n_channels(self) -> int:
        return self.data.shape[1]

    @property
    def duration_s(self) -> float:
        return self.n_samples / self.sample_rate


def make_clip(data, sample_rate: int) -> AudioClip:
    """Validate raw samples and wrap them as an :class:`AudioClip`."""
    arr = np.asarray(data, dtype=float)
    if arr.ndim == 1:
        arr = arr[:, np.newaxis]
    if arr.ndim != 2 or arr.shape[0] == 0 or arr.shape[1] == 0:
        raise InvalidInputError(f"expected (n_samples, n_channels) samples, got shape {arr.shape}")
    if sample_rate <= 0:
        raise InvalidInputError(f"sample rate must be positive, got {sample_rate}")
    if not np.all(np.isfinite(arr)):
        raise InvalidInputError("clip contains non-finite samples")
    return AudioClip(arr, int(sample_rate))


def read_wav(path) -> AudioClip:
    """Read a RIFF WAV file; integer PCM is scaled to [-1, 1) floats."""
    rate, data = wavfile.read(str(path))
    if data.dtype == np.int16:
        samples = data.astype(float) / 32768.0
    elif data.dtype == np.int32:
        samples = data.astype(float) / 2147483648.0
    elif data.dtype == np.uint8:
        samples = (data.astype(float) - 128.0) / 128.0
    elif data.dtype in (np.float32, np.float64):
        samples = data.astype(float)
    else:
        raise InvalidInputError(f"unsupported WAV sample format {data.dtype}")
    return make_clip(samples, rate)


def write_wav(path, clip: AudioClip) -> None:
    """Write a clip as 16-bit PCM WAV, clipping samples outside [-1, 1]."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    scaled = np.clip(np.rint(clip.data * 32767.0), -32768, 32767).astype(np.int16)
    wavfile.write(str(path), clip.sample_rate, scaled)
