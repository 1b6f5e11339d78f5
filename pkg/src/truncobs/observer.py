"""The truncated ideal observer.

An image's features are thresholded, the survivors are corrupted by internal
noise, and the observer rates the image with the log-likelihood ratio of the
surviving (noised) values under the two class models.  Images with no
surviving feature are returned as unrated.

Random streams are always explicit.  Batch sampling is split into fixed-size
chunks, each with its own :class:`numpy.random.SeedSequence` child keyed by
``(seed, stream, chunk)``, so results never depend on how chunks are spread
over workers.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Union

import numpy as np

from .distributions import ClassParams, InternalNoise, log_acceptance_prob, truncated_noised_logpdf
from .distributions import MIN_ACCEPTANCE, DegenerateTruncationError
from .extraction import ExtractionPattern, TruncationVector, pattern_from_features, pattern_masks

__all__ = [
    "FeatureModel",
    "Rated",
    "Unrated",
    "UNRATED",
    "RatingOutcome",
    "CHUNK_SIZE",
    "substream",
    "llr",
    "llr_batch",
    "rate_image",
    "rate_batch",
    "sample_external",
    "simulate_ratings",
]

CHUNK_SIZE = 1 << 16

# stream tags keep the analytic estimator, the oracle and the roc sampler on disjoint substreams
STREAM_RATINGS = 0
STREAM_ORACLE = 1


@dataclass(frozen=True)
class FeatureModel:
    """Two independent-Gaussian class models plus shared internal noise."""

    class0: ClassParams
    class1: ClassParams
    noise: InternalNoise = InternalNoise(0.0)

    def __post_init__(self):
        if self.class0.M != self.class1.M:
            raise ValueError("class models disagree on the number of features")
        if self.class0.label != 0:
            object.__setattr__(self, "class0", ClassParams(self.class0.means, self.class0.stddevs, 0))
        if self.class1.label != 1:
            object.__setattr__(self, "class1", ClassParams(self.class1.means, self.class1.stddevs, 1))

    @classmethod
    def from_arrays(cls, mu0, sd0, mu1, sd1, sigma: float = 0.0) -> "FeatureModel":
        return cls(ClassParams(mu0, sd0, 0), ClassParams(mu1, sd1, 1), InternalNoise(sigma))

    @property
    def M(self) -> int:
        return self.class0.M

    def params(self, label: int) -> ClassParams:
        if label == 0:
            return self.class0
        if label == 1:
            return self.class1
        raise ValueError("class label must be 0 or 1")

    def with_noise(self, sigma: float) -> "FeatureModel":
        return FeatureModel(self.class0, self.class1, InternalNoise(sigma))

    def swapped(self) -> "FeatureModel":
        """Model with the class roles exchanged."""
        return FeatureModel.from_arrays(
            self.class1.means, self.class1.stddevs, self.class0.means, self.class0.stddevs, self.noise.sigma
        )


@dataclass(frozen=True)
class Rated:
    lam: float
    alpha: ExtractionPattern

    def __post_init__(self):
        if self.alpha.unrated:
            raise ValueError("a rated outcome needs at least one extracted feature")
        if not np.isfinite(self.lam):
            raise ValueError("rating must be finite")


@dataclass(frozen=True)
class Unrated:
    pass


UNRATED = Unrated()
RatingOutcome = Union[Rated, Unrated]


def substream(seed: int, *key: int) -> np.random.Generator:
    """Independent generator for ``(seed, key...)``; same inputs give the same stream."""
    return np.random.default_rng(np.random.SeedSequence(int(seed), spawn_key=tuple(int(k) for k in key)))


def check_truncation(model: FeatureModel, i: int, tau: float) -> None:
    """Raise if either class keeps too little mass above ``tau`` on feature ``i``."""
    for params in (model.class0, model.class1):
        if log_acceptance_prob(params, i, tau) < np.log(MIN_ACCEPTANCE):
            raise DegenerateTruncationError(f"feature {i} has no mass above tau={tau} for class {params.label}")


def _feature_llr(values, model: FeatureModel, i: int, tau: float):
    l1 = truncated_noised_logpdf(values, model.class1, i, tau, model.noise)
    l0 = truncated_noised_logpdf(values, model.class0, i, tau, model.noise)
    return l1 - l0


def llr(e, alpha: ExtractionPattern, model: FeatureModel, taus: TruncationVector) -> float:
    """Log-likelihood ratio of the extracted values ``e`` (ordered as ``alpha.indices``).

    Independence makes the ratio a sum of per-feature terms.
    """
    if alpha.unrated:
        raise ValueError("cannot rate an image with no extracted features")
    if alpha.M != model.M or taus.M != model.M:
        raise ValueError("pattern, thresholds and model disagree on M")
    e = np.atleast_1d(np.asarray(e, dtype=float))
    idx = alpha.indices
    if len(e) != len(idx):
        raise ValueError(f"expected {len(idx)} extracted values, got {len(e)}")
    total = 0.0
    for value, i in zip(e, idx):
        check_truncation(model, i, taus[i])
        total += float(_feature_llr(value, model, i, taus[i]))
    return total


def llr_batch(E, mask, model: FeatureModel, taus: TruncationVector) -> np.ndarray:
    """Ratings for an ``(n, M)`` batch; ``mask`` marks extracted entries.

    Rows with no extracted entry get ``nan``.
    """
    E = np.atleast_2d(np.asarray(E, dtype=float))
    mask = np.atleast_2d(np.asarray(mask, dtype=bool))
    lam = np.zeros(E.shape[0])
    for i in range(model.M):
        rows = mask[:, i]
        if not rows.any():
            continue
        check_truncation(model, i, taus[i])
        lam[rows] += _feature_llr(E[rows, i], model, i, taus[i])
    lam[~mask.any(axis=1)] = np.nan
    return lam


def sample_external(label: int, model: FeatureModel, n: int, rng: np.random.Generator) -> np.ndarray:
    """``n`` draws of the class feature vector, shape ``(n, M)``."""
    if n < 1:
        raise ValueError("n must be >= 1")
    p = model.params(label)
    return rng.normal(p.means, p.stddevs, size=(n, model.M))


def rate_batch(F, model: FeatureModel, taus: TruncationVector, rng: np.random.Generator) -> np.ndarray:
    """Threshold, add internal noise to kept entries, rate. ``nan`` marks unrated rows.

    A full ``(n, M)`` block of unit noise is always drawn so that the stream is
    consumed identically for every threshold and noise level.
    """
    F = np.atleast_2d(np.asarray(F, dtype=float))
    mask = pattern_masks(F, taus)
    z = rng.standard_normal(F.shape)
    E = np.where(mask, F + model.noise.sigma * z, F)
    return llr_batch(E, mask, model, taus)


def rate_image(f, label: int, model: FeatureModel, taus: TruncationVector, rng: np.random.Generator) -> RatingOutcome:
    """Rate one image with feature vector ``f`` drawn from class ``label``.

    ``label`` is not used by the observer; it is carried for the caller's bookkeeping.
    """
    model.params(label)
    f = np.asarray(f, dtype=float).ravel()
    alpha = pattern_from_features(f, taus)
    z = rng.standard_normal(len(f))
    if alpha.unrated:
        return UNRATED
    idx = list(alpha.indices)
    e = f[idx] + model.noise.sigma * z[idx]
    return Rated(llr(e, alpha, model, taus), alpha)


def _ratings_chunk(label, model, taus, n, seed, stream, chunk):
    rng = substream(seed, stream, label, chunk)
    return rate_batch(sample_external(label, model, n, rng), model, taus, rng)


def simulate_ratings(
    label: int,
    model: FeatureModel,
    taus: TruncationVector,
    n: int,
    seed: int,
    *,
    stream: int = STREAM_RATINGS,
    workers: int = 1,
) -> np.ndarray:
    """Ratings of ``n`` simulated class images (``nan`` = unrated).

    Output is identical for any ``workers`` value.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    sizes = [CHUNK_SIZE] * (n // CHUNK_SIZE)
    if n % CHUNK_SIZE:
        sizes.append(n % CHUNK_SIZE)
    jobs = [(label, model, taus, size, seed, stream, k) for k, size in enumerate(sizes)]
    if workers > 1 and len(jobs) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda a: _ratings_chunk(*a), jobs))
    else:
        parts = [_ratings_chunk(*a) for a in jobs]
    return np.concatenate(parts)
