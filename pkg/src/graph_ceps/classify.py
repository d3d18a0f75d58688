"""Per-scene diagonal-covariance Gaussian mixtures and clip classification.

Each scene gets its own GMM trained by EM on that scene's feature frames.
A clip is assigned to the scene whose model maximizes the product of
per-frame likelihoods, computed as a log-sum for numerical stability.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np
from scipy.special import logsumexp

from .errors import InvalidInputError, InvalidParameterError
from .features import FeatureSeries

DEFAULT_COMPONENTS = 8
EM_MAX_ITER = 200
EM_REL_TOL = 1e-6

# Variances are floored at 1e-6 times the per-dimension global data variance
# (with a tiny absolute floor so constant dimensions stay nonsingular).
VARIANCE_FLOOR_SCALE = 1e-6
VARIANCE_FLOOR_ABS = 1e-12


@dataclass(frozen=True)
class GmmModel:
    """Diagonal-covariance Gaussian mixture for one scene."""

    scene: str
    weights: np.ndarray
    means: np.ndarray
    variances: np.ndarray
    feature_kind: str
    order: int
    seed: int

    @property
    def n_components(self) -> int:
        return self.weights.shape[0]


@dataclass(frozen=True)
class EvaluationReport:
    """Confusion matrix (rows: true scene, columns: predicted) plus accuracy."""

    scenes: tuple[str, ...]
    confusion: np.ndarray
    accuracy: float


def _log_component_densities(x: np.ndarray, means: np.ndarray, variances: np.ndarray) -> np.ndarray:
    """Log density of each frame under each diagonal Gaussian, shape (T, K)."""
    diff = x[:, np.newaxis, :] - means[np.newaxis, :, :]
    maha = np.sum(diff * diff / variances[np.newaxis, :, :], axis=2)
    log_norm = -0.5 * (
        x.shape[1] * math.log(2.0 * math.pi) + np.sum(np.log(variances), axis=1)
    )
    return log_norm[np.newaxis, :] - 0.5 * maha


def _log_weights(weights: np.ndarray) -> np.ndarray:
    out = np.full(weights.shape, -np.inf)
    positive = weights > 0.0
    out[positive] = np.log(weights[positive])
    return out


def frame_log_likelihood(x: np.ndarray, model: GmmModel) -> np.ndarray:
    """Per-frame mixture log likelihood under ``model``, shape (T,)."""
    log_dens = _log_component_densities(x, model.means, model.variances)
    return logsumexp(log_dens + _log_weights(model.weights)[np.newaxis, :], axis=1)


def _kmeanspp_init(x: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    """k-means++ center seeding: first uniform, the rest proportional to D^2."""
    n = x.shape[0]
    centers = [x[int(rng.integers(n))]]
    d2 = np.sum((x - centers[0]) ** 2, axis=1)
    for _ in range(1, k):
        total = float(d2.sum())
        if total <= 0.0:
            idx = int(rng.integers(n))
        else:
            idx = int(rng.choice(n, p=d2 / total))
        centers.append(x[idx])
        d2 = np.minimum(d2, np.sum((x - centers[-1]) ** 2, axis=1))
    return np.array(centers)


def em_fit(
    x: np.ndarray,
    k: int,
    seed: int,
    max_iter: int = EM_MAX_ITER,
    rel_tol: float = EM_REL_TOL,
) -> tuple[np.ndarray, np.ndarray, np.ndarray, list[float]]:
    """EM fit of a diagonal-covariance GMM from a seeded k-means++ start.

    Returns (weights, means, variances, log_likelihood_history); the history
    holds the total data log likelihood at every E-step and is non-decreasing
    up to variance-floor activations.
    """
    n, dim = x.shape
    if k < 1:
        raise InvalidParameterError(f"component count must be >= 1, got {k}")
    if n < k:
        raise InvalidInputError(f"{n} frames cannot support {k} mixture components")

    floor = np.maximum(VARIANCE_FLOOR_SCALE * x.var(axis=0), VARIANCE_FLOOR_ABS)
    rng = np.random.default_rng(seed)

    centers = _kmeanspp_init(x, k, rng)
    assign = np.argmin(
        np.sum((x[:, np.newaxis, :] - centers[np.newaxis, :, :]) ** 2, axis=2), axis=1
    )
    weights = np.zeros(k)
    means = centers.copy()
    variances = np.tile(np.maximum(x.var(axis=0), floor), (k, 1))
    for j in range(k):
        members = x[assign == j]
        weights[j] = len(members) / n
        if len(members) > 0:
            means[j] = members.mean(axis=0)
            variances[j] = np.maximum(members.var(axis=0), floor)
    if weights.sum() <= 0.0:
        weights = np.full(k, 1.0 / k)
    weights = weights / weights.sum()

    history: list[float] = []
    prev_ll = -math.inf
    for _ in range(max_iter):
        log_joint = (
            _log_component_densities(x, means, variances)
            + _log_weights(weights)[np.newaxis, :]
        )
        frame_ll = logsumexp(log_joint, axis=1)
        ll = float(frame_ll.sum())
        history.append(ll)
        if ll - prev_ll < rel_tol * max(1.0, abs(prev_ll)):
            break
        prev_ll = ll

        resp = np.exp(log_joint - frame_ll[:, np.newaxis])
        counts = resp.sum(axis=0)
        weights = counts / n
        for j in range(k):
            if counts[j] <= 0.0:
                continue  # dead component keeps its parameters at weight 0
            means[j] = resp[:, j] @ x / counts[j]
            second = resp[:, j] @ (x * x) / counts[j]
            variances[j] = np.maximum(second - means[j] ** 2, floor)

    return weights, means, variances, history


def train_gmm(
    scene: str,
    features: Sequence[FeatureSeries] | FeatureSeries,
    k: int = DEFAULT_COMPONENTS,
    seed: int = 0,
) -> GmmModel:
    """Train one scene's GMM on its feature series (all frames pooled)."""
    if isinstance(features, FeatureSeries):
        features = [features]
    if not features:
        raise InvalidInputError("no feature series supplied for training")
    kind = features[0].kind
    order = features[0].order
    for fs in features:
        if fs.kind != kind or fs.order != order:
            raise InvalidInputError("training features mix kinds or orders")
    x = np.vstack([fs.vectors for fs in features])
    weights, means, variances, _ = em_fit(x, k, seed)
    return GmmModel(str(scene), weights, means, variances, kind, order, int(seed))


def score_clip(features: FeatureSeries, models: Mapping[str, GmmModel]) -> dict[str, float]:
    """Total log likelihood of the clip's frames under each scene model."""
    if not models:
        raise InvalidInputError("no scene models supplied")
    for scene, model in models.items():
        if model.order != features.order:
            raise InvalidInputError(
                f"model for {scene!r} has order {model.order}, features have {features.order}"
            )
    return {
        scene: float(frame_log_likelihood(features.vectors, model).sum())
        for scene, model in models.items()
    }


def classify_clip(features: FeatureSeries, models: Mapping[str, GmmModel]) -> str:
    """Scene with the highest product of per-frame likelihoods (log-sum form).

    Ties break toward the lexicographically smallest scene id.
    """
    scores = score_clip(features, models)
    best_scene = None
    best_score = -math.inf
    for scene in sorted(scores):
        if scores[scene] > best_score:
            best_scene = scene
            best_score = scores[scene]
    return best_scene


def evaluate(
    testset: Sequence[tuple[FeatureSeries, str]], models: Mapping[str, GmmModel]
) -> EvaluationReport:
    """Classify every labeled clip and tabulate a confusion matrix."""
    if not testset:
        raise InvalidInputError("empty test set")
    scenes = tuple(sorted(models))
    index = {scene: i for i, scene in enumerate(scenes)}
    confusion = np.zeros((len(scenes), len(scenes)), dtype=int)
    for features, true_scene in testset:
        if true_scene not in index:
            raise InvalidInputError(f"test clip labeled with unknown scene {true_scene!r}")
        predicted = classify_clip(features, models)
        confusion[index[true_scene], index[predicted]] += 1
    accuracy = float(np.trace(confusion)) / len(testset)
    return EvaluationReport(scenes, confusion, accuracy)


def model_to_dict(model: GmmModel) -> dict:
    return {
        "scene": model.scene,
        "feature_kind": model.feature_kind,
        "order": model.order,
        "seed": model.seed,
        "weights": model.weights.tolist(),
        "means": model.means.tolist(),
        "variances": model.variances.tolist(),
    }


def model_from_dict(doc: Mapping) -> GmmModel:
    try:
        return GmmModel(
            scene=str(doc["scene"]),
            weights=np.asarray(doc["weights"], dtype=float),
            means=np.asarray(doc["means"], dtype=float),
            variances=np.asarray(doc["variances"], dtype=float),
            feature_kind=str(doc["feature_kind"]),
            order=int(doc["order"]),
            seed=int(doc["seed"]),
        )
    except KeyError as exc:
        raise InvalidInputError(f"model document is missing key {exc}") from exc


def save_model(path, model: GmmModel) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(model_to_dict(model), fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_model(path) -> GmmModel:
    with open(path, encoding="utf-8") as fh:
        return model_from_dict(json.load(fh))


def load_models(directory) -> dict[str, GmmModel]:
    """Load every ``*.json`` model in a directory, keyed by scene id."""
    models = {}
    for path in sorted(Path(directory).glob("*.json")):
        model = load_model(path)
        models[model.scene] = model
    if not models:
        raise InvalidInputError(f"no model files found in {directory}")
    return models
