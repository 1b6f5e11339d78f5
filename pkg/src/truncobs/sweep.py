"""Threshold scans, grid optimisation and truncation efficiency."""

from __future__ import annotations

import itertools
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .extraction import TruncationVector
from .observer import FeatureModel
from .roc import AucDecomposition, Method, asymptotic_auc, total_auc

__all__ = [
    "DegenerateModelError",
    "Axis",
    "SweepGrid",
    "SweepRecord",
    "sweep",
    "best_record",
    "optimize",
    "truncation_efficiency",
]


class DegenerateModelError(ValueError):
    """The untruncated reference observer is not reliably above chance."""


@dataclass(frozen=True)
class Axis:
    lo: float
    hi: float
    n_steps: int

    def __post_init__(self):
        if not self.lo < self.hi:
            raise ValueError("axis needs lo < hi")
        if self.n_steps < 2:
            raise ValueError("axis needs n_steps >= 2")

    def values(self) -> np.ndarray:
        return np.linspace(self.lo, self.hi, self.n_steps)


@dataclass(frozen=True)
class SweepGrid:
    """Threshold grid.

    ``shared=True`` scans one threshold applied to every feature (identically
    distributed features); otherwise one axis per feature is expected.  The
    untruncated point, if included, comes first.
    """

    axes: tuple[Axis, ...]
    include_neg_infinity: bool = True
    shared: bool = False

    def __post_init__(self):
        axes = tuple(self.axes) if not isinstance(self.axes, Axis) else (self.axes,)
        if not axes:
            raise ValueError("grid needs at least one axis")
        if self.shared and len(axes) != 1:
            raise ValueError("a shared-threshold grid has exactly one axis")
        object.__setattr__(self, "axes", axes)

    @classmethod
    def default(cls, M: int = 1, shared: bool = False) -> "SweepGrid":
        if M == 1 or shared:
            return cls((Axis(-3.0, 4.0, 141),), True, shared)
        return cls(tuple(Axis(-3.0, 4.0, 71) for _ in range(M)), True, False)

    def points(self, M: int) -> list[TruncationVector]:
        if self.shared:
            pts = [TruncationVector.shared(float(t), M) for t in self.axes[0].values()]
        else:
            if len(self.axes) != M:
                raise ValueError(f"grid has {len(self.axes)} axes but the model has {M} features")
            pts = [TruncationVector(tuple(float(t) for t in combo))
                   for combo in itertools.product(*(a.values() for a in self.axes))]
        if self.include_neg_infinity:
            pts.insert(0, TruncationVector.untruncated(M))
        return pts


@dataclass(frozen=True)
class SweepRecord:
    taus: TruncationVector
    auc: AucDecomposition
    asymptote: float

    @property
    def rej0(self) -> float:
        return self.auc.rej0

    @property
    def rej1(self) -> float:
        return self.auc.rej1


def _evaluate(model: FeatureModel, taus: TruncationVector, method: Method) -> SweepRecord:
    return SweepRecord(taus, total_auc(model, taus, method), asymptotic_auc(model, taus))


def sweep(model: FeatureModel, grid: SweepGrid | Sequence[TruncationVector], method: Method,
          workers: int = 1) -> list[SweepRecord]:
    """Evaluate the AUC decomposition at every grid point, in grid order.

    Every point reuses the same Monte Carlo seed (common random numbers), so
    differences between points are not swamped by sampling noise.
    """
    points = grid.points(model.M) if isinstance(grid, SweepGrid) else list(grid)
    if workers > 1 and len(points) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(lambda t: _evaluate(model, t, method), points))
    return [_evaluate(model, t, method) for t in points]


def _sort_key(taus: TruncationVector):
    return tuple(taus.taus)


def best_record(records: Sequence[SweepRecord], atol: float = 1e-12) -> SweepRecord:
    """Highest ``az``; values within ``atol`` of the maximum are ties, won by the
    lexicographically smallest threshold vector."""
    if not records:
        raise ValueError("no records")
    top = max(r.auc.az for r in records)
    return min((r for r in records if r.auc.az >= top - atol), key=lambda r: _sort_key(r.taus))


def optimize(model: FeatureModel, grid: SweepGrid | Sequence[TruncationVector], method: Method,
             workers: int = 1) -> tuple[TruncationVector, AucDecomposition]:
    rec = best_record(sweep(model, grid, method, workers))
    return rec.taus, rec.auc


def truncation_efficiency(model: FeatureModel, grid: SweepGrid, sigma: float, method: Method,
                          workers: int = 1) -> float:
    """Best truncated area at internal noise ``sigma`` over the untruncated noiseless area."""
    reference = total_auc(model.with_noise(0.0), TruncationVector.untruncated(model.M), method)
    if reference.az <= 0.5 + 2.0 * reference.se:
        raise DegenerateModelError(
            f"untruncated noiseless area {reference.az:.6f} is not above chance (se {reference.se:.2g})"
        )
    _, best = optimize(model.with_noise(sigma), grid, method, workers)
    return best.az / reference.az

