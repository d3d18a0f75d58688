"""Per-frame log-power vectors and their cepstral transforms.

The pipeline keeps only the scalar power of each channel per frame (phase
across unsynchronized devices is unreliable), takes its natural log, and
projects the resulting vector onto one of two orthonormal bases:

* graph cepstrum: ascending eigenvectors of the connection-graph Laplacian;
* spatial cepstrum: descending eigenvectors of the (non-centered) frame
  covariance, i.e. a PCA basis estimated from training frames.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .audio import AudioClip
from .errors import InvalidInputError, InvalidParameterError
from .spectral import ASCENDING, DESCENDING, SpectralBasis, eig_sym
from .util import read_csv_rows, write_csv

GRAPH_CEPSTRUM = "gc"
SPATIAL_CEPSTRUM = "sc"
FEATURE_KINDS = (GRAPH_CEPSTRUM, SPATIAL_CEPSTRUM)

# Floor for the frame mean-square power (relative to full scale squared);
# keeps the log finite on silent frames.
LOG_POWER_FLOOR = 1e-12

DEFAULT_FRAME_MS = 20.0


@dataclass(frozen=True)
class FrameSeries:
    """Per-frame, per-channel log-power values, shape (n_frames, n_channels)."""

    q: np.ndarray
    frame_len_ms: float
    hop_ms: float

    @property
    def n_frames(self) -> int:
        return self.q.shape[0]

    @property
    def n_channels(self) -> int:
        return self.q.shape[1]


@dataclass(frozen=True)
class FeatureSeries:
    """Per-frame feature vectors of one kind, truncated to ``order`` coefficients."""

    kind: str
    order: int
    vectors: np.ndarray

    @property
    def n_frames(self) -> int:
        return self.vectors.shape[0]


@dataclass(frozen=True)
class CovarianceModel:
    """Non-centered second-moment matrix of log-power frames."""

    r_q: np.ndarray
    n_frames_used: int


def frame_log_power(
    clip: AudioClip,
    frame_len_ms: float = DEFAULT_FRAME_MS,
    hop_ms: float | None = None,
) -> FrameSeries:
    """Log of the per-frame mean squared amplitude for every channel.

    Frames advance by ``hop_ms`` (default: the frame length, i.e.
    non-overlapping); only full frames are kept.  The mean square is floored
    at 1e-12 so silent frames stay finite.
    """
    if hop_ms is None:
        hop_ms = frame_len_ms
    x = clip.data
    n_samples = x.shape[0]
    flen = int(round(frame_len_ms * clip.sample_rate / 1000.0))
    hop = int(round(hop_ms * clip.sample_rate / 1000.0))
    if flen < 1 or hop < 1:
        raise InvalidInputError(
            f"frame ({frame_len_ms} ms) and hop ({hop_ms} ms) must cover at least one sample"
        )
    if flen > n_samples:
        raise InvalidInputError(
            f"frame of {flen} samples does not fit in a clip of {n_samples} samples"
        )
    n_frames = (n_samples - flen) // hop + 1

    # cumulative sum of squares gives every frame's power in O(n)
    csum = np.vstack([np.zeros((1, x.shape[1])), np.cumsum(x * x, axis=0)])
    starts = hop * np.arange(n_frames)
    mean_sq = (csum[starts + flen] - csum[starts]) / flen
    q = np.log(np.maximum(mean_sq, LOG_POWER_FLOOR))
    return FrameSeries(q, float(frame_len_ms), float(hop_ms))


def concat_frames(series: Sequence[FrameSeries]) -> FrameSeries:
    """Stack several frame series (same channel count and framing) into one."""
    if not series:
        raise InvalidInputError("no frame series to concatenate")
    first = series[0]
    for fs in series[1:]:
        if fs.n_channels != first.n_channels:
            raise InvalidInputError("frame series have different channel counts")
    q = np.vstack([fs.q for fs in series])
    return FrameSeries(q, first.frame_len_ms, first.hop_ms)


def transform_frames(
    frames: FrameSeries, basis: SpectralBasis, order: int | None, kind: str
) -> FeatureSeries:
    """Project frames onto the columns of ``basis`` and truncate to ``order``."""
    if kind not in FEATURE_KINDS:
        raise InvalidParameterError(f"unknown feature kind {kind!r}")
    n = frames.n_channels
    if basis.n != n:
        raise InvalidInputError(
            f"basis size {basis.n} does not match channel count {n}"
        )
    if order is None:
        order = n
    if not 1 <= order <= n:
        raise InvalidInputError(f"order must lie in 1..{n}, got {order}")
    vectors = frames.q @ basis.eigenvectors[:, :order]
    return FeatureSeries(kind, int(order), vectors)


def graph_cepstrum(
    frames: FrameSeries, basis: SpectralBasis, order: int | None = None
) -> FeatureSeries:
    """Graph cepstrum: coefficient k is the inner product of the k-th ascending
    Laplacian eigenvector with the frame's log-power vector.

    On a connected graph the first coefficient equals the channel sum of the
    log powers divided by sqrt(N) (the average sound level up to scale).
    """
    if basis.ordering != ASCENDING:
        raise InvalidInputError("graph cepstrum requires an ascending-ordered basis")
    return transform_frames(frames, basis, order, GRAPH_CEPSTRUM)


def fit_covariance(frames: FrameSeries, center: bool = False) -> CovarianceModel:
    """Second-moment matrix (1/T) sum q q^T of the frames.

    Non-centered by default; ``center=True`` subtracts the mean frame first
    (classical PCA) for callers that want it.
    """
    if frames.n_frames < 1:
        raise InvalidInputError("need at least one frame to fit a covariance")
    q = frames.q
    if center:
        q = q - q.mean(axis=0)
    r = q.T @ q / frames.n_frames
    r = 0.5 * (r + r.T)
    return CovarianceModel(r, frames.n_frames)


def pca_basis(cov: CovarianceModel) -> SpectralBasis:
    """Descending-ordered eigenvectors of the frame second-moment matrix."""
    return eig_sym(cov.r_q, DESCENDING)


def spatial_cepstrum(
    frames: FrameSeries, cov: CovarianceModel, order: int | None = None
) -> FeatureSeries:
    """Spatial cepstrum: frames projected onto the PCA basis of ``cov``."""
    if cov.r_q.shape[0] != frames.n_channels:
        raise InvalidInputError(
            f"covariance size {cov.r_q.shape[0]} does not match channel count {frames.n_channels}"
        )
    return transform_frames(frames, pca_basis(cov), order, SPATIAL_CEPSTRUM)


def write_features_csv(path, features: FeatureSeries) -> None:
    """One row per frame; header names the coefficients, e.g. gc_1..gc_P."""
    header = [f"{features.kind}_{k + 1}" for k in range(features.order)]
    write_csv(path, header, (list(row) for row in features.vectors))


def read_features_csv(path) -> FeatureSeries:
    """Read a feature CSV written by :func:`write_features_csv`."""
    header, rows = read_csv_rows(path)
    if not header or "_" not in header[0]:
        raise InvalidInputError(f"{path}: not a feature CSV (bad header)")
    kind = header[0].rsplit("_", 1)[0]
    if kind not in FEATURE_KINDS:
        raise InvalidInputError(f"{path}: unknown feature kind {kind!r}")
    vectors = np.array([[float(v) for v in row] for row in rows], dtype=float)
    if vectors.ndim != 2 or vectors.shape[1] != len(header):
        raise InvalidInputError(f"{path}: malformed feature rows")
    return FeatureSeries(kind, len(header), vectors)
