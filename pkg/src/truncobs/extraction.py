"""Extraction patterns: which features survive lower truncation.

A pattern is an ``M``-bit indicator; bit ``i`` set means feature ``i`` was
kept (``f_i >= tau_i``).  The all-zero pattern means the image goes unrated.
Thresholds at exactly ``f_i == tau_i`` count as extracted.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np
from scipy.special import ndtr

from .distributions import NEG_INF, ClassParams, acceptance_prob

__all__ = [
    "MAX_FEATURES",
    "TruncationVector",
    "ExtractionPattern",
    "all_patterns",
    "composite_step",
    "pattern_from_features",
    "pattern_masks",
    "extraction_prob",
    "full_rejection_prob",
]

MAX_FEATURES = 20


def _parse_tau(t) -> float:
    if isinstance(t, str):
        if t.strip().lower() in ("-inf", "-infinity"):
            return NEG_INF
        raise ValueError(f"unrecognised threshold {t!r}")
    t = float(t)
    if math.isnan(t) or t == math.inf:
        raise ValueError(f"threshold must be finite or -inf, got {t}")
    return t


@dataclass(frozen=True)
class TruncationVector:
    """Per-feature lower thresholds; ``-inf`` entries never truncate."""

    taus: tuple[float, ...]

    def __post_init__(self):
        taus = tuple(_parse_tau(t) for t in np.atleast_1d(np.asarray(self.taus, dtype=object)))
        if not taus:
            raise ValueError("empty truncation vector")
        if len(taus) > MAX_FEATURES:
            raise ValueError(f"at most {MAX_FEATURES} features supported")
        object.__setattr__(self, "taus", taus)

    @classmethod
    def untruncated(cls, M: int) -> "TruncationVector":
        return cls((NEG_INF,) * M)

    @classmethod
    def shared(cls, tau: float, M: int) -> "TruncationVector":
        return cls((tau,) * M)

    @property
    def M(self) -> int:
        return len(self.taus)

    @property
    def is_untruncated(self) -> bool:
        return all(t == NEG_INF for t in self.taus)

    def as_array(self) -> np.ndarray:
        return np.array(self.taus, dtype=float)

    def __iter__(self):
        return iter(self.taus)

    def __len__(self):
        return len(self.taus)

    def __getitem__(self, i):
        return self.taus[i]


@dataclass(frozen=True)
class ExtractionPattern:
    """Bitmask over features; bit ``i`` set means feature ``i`` was extracted."""

    mask: int
    M: int

    def __post_init__(self):
        if not 1 <= self.M <= MAX_FEATURES:
            raise ValueError(f"M must be in [1, {MAX_FEATURES}]")
        if not 0 <= self.mask < (1 << self.M):
            raise ValueError("mask out of range for M")

    @classmethod
    def from_bits(cls, bits: Sequence[int]) -> "ExtractionPattern":
        mask = 0
        for i, b in enumerate(bits):
            if b not in (0, 1, True, False):
                raise ValueError("bits must be 0/1")
            mask |= int(b) << i
        return cls(mask, len(bits))

    @property
    def bits(self) -> tuple[int, ...]:
        return tuple((self.mask >> i) & 1 for i in range(self.M))

    @property
    def m(self) -> int:
        return bin(self.mask).count("1")

    @property
    def unrated(self) -> bool:
        return self.mask == 0

    @property
    def indices(self) -> tuple[int, ...]:
        return tuple(i for i in range(self.M) if (self.mask >> i) & 1)

    def __repr__(self):
        return f"ExtractionPattern({''.join(map(str, self.bits))})"


def all_patterns(M: int) -> Iterator[ExtractionPattern]:
    """All ``2**M`` patterns, unrated first."""
    if not 1 <= M <= MAX_FEATURES:
        raise ValueError(f"M must be in [1, {MAX_FEATURES}]")
    for mask in range(1 << M):
        yield ExtractionPattern(mask, M)


def composite_step(f, taus: TruncationVector, alpha: ExtractionPattern) -> int:
    """1 if ``f`` lies in the region of feature space that yields ``alpha``."""
    f = np.asarray(f, dtype=float).ravel()
    if not (len(f) == taus.M == alpha.M):
        raise ValueError("feature vector, thresholds and pattern must have equal length")
    kept = f >= taus.as_array()
    return int(np.array_equal(kept, np.array(alpha.bits, dtype=bool)))


def pattern_masks(F, taus: TruncationVector) -> np.ndarray:
    """Boolean ``(n, M)`` array of extracted entries for a batch of feature vectors."""
    F = np.atleast_2d(np.asarray(F, dtype=float))
    if F.shape[1] != taus.M:
        raise ValueError("feature dimension does not match thresholds")
    return F >= taus.as_array()


def pattern_from_features(f, taus: TruncationVector) -> ExtractionPattern:
    """The unique pattern whose region contains ``f``."""
    f = np.asarray(f, dtype=float).ravel()
    if len(f) != taus.M:
        raise ValueError("feature dimension does not match thresholds")
    return ExtractionPattern.from_bits((f >= taus.as_array()).astype(int).tolist())


def _accept_reject(params: ClassParams, taus: TruncationVector) -> list[tuple[float, float]]:
    if params.M != taus.M:
        raise ValueError("class parameters and thresholds disagree on M")
    out = []
    for i, t in enumerate(taus):
        # rejection from the opposite tail keeps precision when acceptance ~ 1
        rej = 0.0 if t == NEG_INF else float(ndtr((t - params.means[i]) / params.stddevs[i]))
        out.append((acceptance_prob(params, i, t), rej))
    return out


def extraction_prob(alpha: ExtractionPattern, params: ClassParams, taus: TruncationVector) -> float:
    """Probability that a class image yields exactly pattern ``alpha`` (independent features)."""
    ar = _accept_reject(params, taus)
    if alpha.M != len(ar):
        raise ValueError("pattern length does not match M")
    p = 1.0
    for (a, r), bit in zip(ar, alpha.bits):
        p *= a if bit else r
    return p


def full_rejection_prob(params: ClassParams, taus: TruncationVector) -> float:
    """Probability that every feature is rejected, i.e. the image is unrated."""
    p = 1.0
    for _, r in _accept_reject(params, taus):
        p *= r
    return p
