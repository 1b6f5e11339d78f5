"""Brute-force forced-choice simulation.

Each trial shows the observer one positive and one negative image and scores
whether it picks the positive one.  No rank statistics or area formulas are
used, so agreement with :func:`truncobs.roc.total_auc` is a genuine check.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .extraction import TruncationVector
from .observer import CHUNK_SIZE, STREAM_ORACLE, FeatureModel, rate_batch, sample_external, substream

__all__ = ["ForcedChoiceResult", "forced_choice_auc", "empirical_rejection"]


@dataclass(frozen=True)
class ForcedChoiceResult:
    n_pairs: int
    wins: float
    auc_hat: float
    se: float


def _score_chunk(model, taus, n, seed, chunk, literal_guess):
    rng = substream(seed, STREAM_ORACLE, 2, chunk)
    pos = rate_batch(sample_external(1, model, n, rng), model, taus, rng)
    neg = rate_batch(sample_external(0, model, n, rng), model, taus, rng)
    pos_rated = ~np.isnan(pos)
    neg_rated = ~np.isnan(neg)

    both = pos_rated & neg_rated
    wins = np.sum(pos[both] > neg[both]) + 0.5 * np.sum(pos[both] == neg[both])
    # unrated negative loses to any rated positive; the reverse scores nothing
    wins += np.sum(pos_rated & ~neg_rated)
    neither = int(np.sum(~pos_rated & ~neg_rated))
    if literal_guess:
        wins += rng.binomial(neither, 0.5) if neither else 0
    else:
        wins += 0.5 * neither
    return float(wins)


def forced_choice_auc(
    model: FeatureModel,
    taus: TruncationVector,
    n_pairs: int,
    seed: int,
    *,
    literal_guess: bool = False,
    workers: int = 1,
) -> ForcedChoiceResult:
    """Fraction of correctly identified positives over ``n_pairs`` simulated trials.

    With ``literal_guess=False`` each both-unrated pair contributes its
    expected score of 1/2 instead of a coin flip.
    """
    if n_pairs < 1:
        raise ValueError("n_pairs must be >= 1")
    sizes = [CHUNK_SIZE] * (n_pairs // CHUNK_SIZE)
    if n_pairs % CHUNK_SIZE:
        sizes.append(n_pairs % CHUNK_SIZE)
    args = [(model, taus, size, seed, k, literal_guess) for k, size in enumerate(sizes)]
    if workers > 1 and len(args) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda a: _score_chunk(*a), args))
    else:
        parts = [_score_chunk(*a) for a in args]
    wins = math.fsum(parts)
    p = wins / n_pairs
    return ForcedChoiceResult(n_pairs, wins, p, math.sqrt(p * (1.0 - p) / n_pairs))


def empirical_rejection(model: FeatureModel, taus: TruncationVector, label: int, n: int, seed: int) -> float:
    """Observed fraction of class-``label`` images with every feature rejected."""
    if n < 10_000:
        raise ValueError("n must be >= 10**4")
    unrated = 0
    done = 0
    chunk = 0
    thr = taus.as_array()
    while done < n:
        size = min(CHUNK_SIZE, n - done)
        F = sample_external(label, model, size, substream(seed, STREAM_ORACLE, label, chunk))
        unrated += int(np.sum(~np.any(F >= thr, axis=1)))
        done += size
        chunk += 1
    return unrated / n
