"""AUC decomposition and ROC curves for the truncated ideal observer.

The area splits into three parts:

* analysis (``az1``): a rated positive outranks a rated negative;
* gist (``az2``): a rated positive meets an unrated negative, which is
  treated as rated ``-inf``;
* guessing (``az3``): both images are unrated and the observer guesses.

Only ``az1`` depends on the observer and the internal noise.  It is computed
either by 1-D quadrature over feature space (``M == 1``) or by Monte Carlo
with a Mann-Whitney statistic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Union

import numpy as np
from scipy.special import logsumexp, ndtr
from scipy.stats import rankdata

from .distributions import NEG_INF, truncated_noised_logpdf
from .extraction import TruncationVector, full_rejection_prob
from .observer import FeatureModel, check_truncation, simulate_ratings

__all__ = [
    "EstimationError",
    "Quadrature",
    "MonteCarlo",
    "Method",
    "AucDecomposition",
    "RocCurve",
    "rejection_probs",
    "binormal_auc",
    "gist_component",
    "guess_component",
    "asymptotic_auc",
    "mann_whitney",
    "analysis_component",
    "total_auc",
    "roc_curve",
]


class EstimationError(RuntimeError):
    """Not enough rated images to estimate a rank statistic."""


@dataclass(frozen=True)
class Quadrature:
    """Midpoint-grid evaluation of the rated-vs-rated area (single feature only).

    The grid result is Richardson-extrapolated from ``n_points`` and
    ``n_points // 2``; the reported error is the size of that correction.
    """

    n_points: int = 1 << 17
    width: float = 12.0

    def __post_init__(self):
        if self.n_points < 64:
            raise ValueError("quadrature needs at least 64 grid points")


@dataclass(frozen=True)
class MonteCarlo:
    n: int = 1_000_000
    seed: int = 0
    workers: int = 1

    def __post_init__(self):
        if self.n < 10_000:
            raise ValueError("Monte Carlo needs n >= 10**4 per class")


Method = Union[Quadrature, MonteCarlo]


@dataclass(frozen=True)
class AucDecomposition:
    az: float
    az1: float
    az2: float
    az3: float
    rej0: float
    rej1: float
    az1_se: float = 0.0

    @property
    def se(self) -> float:
        # az2 and az3 are exact
        return self.az1_se

    @property
    def partial_az(self) -> float:
        """Area of the rated-only curve, i.e. the incomplete-analysis convention."""
        return self.az1

    @property
    def endpoint(self) -> tuple[float, float]:
        """``(FPF, TPF)`` where the rated-only curve stops."""
        return 1.0 - self.rej0, 1.0 - self.rej1


@dataclass
class RocCurve:
    """Rated-only curve plus the segments that complete it.

    ``points`` runs from ``(0, 0)`` to ``endpoint``.  The completed curve joins
    ``endpoint`` to ``(1, 1)`` by ``guess_segment``; ``gist_extension`` is the
    horizontal line bounding the gist rectangle beneath it.
    """

    points: np.ndarray
    endpoint: tuple[float, float]
    gist_extension: np.ndarray = field(default_factory=lambda: np.empty((0, 2)))
    guess_segment: np.ndarray = field(default_factory=lambda: np.empty((0, 2)))
    thresholds: np.ndarray = field(default_factory=lambda: np.empty(0))

    @property
    def complete(self) -> bool:
        return len(self.guess_segment) > 0

    def curve(self) -> np.ndarray:
        """Points of the curve whose area is reported, in FPF order."""
        if self.complete:
            return np.vstack([self.points, self.guess_segment[1:]])
        return self.points

    def area(self) -> float:
        pts = self.curve()
        return float(np.trapezoid(pts[:, 1], pts[:, 0]))


def rejection_probs(model: FeatureModel, taus: TruncationVector) -> tuple[float, float]:
    """``(rej0, rej1)``: probabilities that a negative / positive image is unrated."""
    if taus.M != model.M:
        raise ValueError("thresholds and model disagree on M")
    return full_rejection_prob(model.class0, taus), full_rejection_prob(model.class1, taus)


def binormal_auc(mu0: float, var0: float, mu1: float, var1: float) -> float:
    """``Phi((mu1 - mu0) / sqrt(var0 + var1))``, the area for a linear observer on scalar normals."""
    if var0 <= 0 or var1 <= 0:
        raise ValueError("variances must be positive")
    return float(ndtr((mu1 - mu0) / math.sqrt(var0 + var1)))


def gist_component(model: FeatureModel, taus: TruncationVector) -> float:
    rej0, rej1 = rejection_probs(model, taus)
    return (1.0 - rej1) * rej0


def guess_component(model: FeatureModel, taus: TruncationVector) -> float:
    rej0, rej1 = rejection_probs(model, taus)
    return 0.5 * rej1 * rej0


def asymptotic_auc(model: FeatureModel, taus: TruncationVector) -> float:
    """Area when internal noise swamps the ratings (every rated comparison is a coin flip)."""
    rej0, rej1 = rejection_probs(model, taus)
    return 0.5 + 0.5 * (rej0 - rej1)


def _hanley_mcneil_se(auc: float, n_pos: int, n_neg: int) -> float:
    q1 = auc / (2.0 - auc)
    q2 = 2.0 * auc * auc / (1.0 + auc)
    var = (auc * (1 - auc) + (n_pos - 1) * (q1 - auc**2) + (n_neg - 1) * (q2 - auc**2)) / (n_pos * n_neg)
    return math.sqrt(max(var, 0.0))


def mann_whitney(pos, neg) -> tuple[float, float]:
    """``P(pos > neg) + P(pos == neg) / 2`` and its Hanley-McNeil standard error."""
    pos = np.asarray(pos, dtype=float)
    neg = np.asarray(neg, dtype=float)
    n1, n0 = len(pos), len(neg)
    if n1 == 0 or n0 == 0:
        raise EstimationError("need at least one rated image per class")
    ranks = rankdata(np.concatenate([pos, neg]))
    u = ranks[:n1].sum() - n1 * (n1 + 1) / 2.0
    auc = float(u / (n1 * n0))
    return auc, _hanley_mcneil_se(auc, n1, n0)


def _grid_distributions(model: FeatureModel, taus: TruncationVector, quad: Quadrature, n_points: int):
    """Ratings on a feature grid with per-class probability weights (``M == 1``)."""
    tau = taus[0]
    check_truncation(model, 0, tau)
    sigma = model.noise.sigma
    params = (model.class0, model.class1)
    spreads = [math.sqrt(p.stddevs[0] ** 2 + sigma**2) for p in params]
    centres = [p.means[0] if tau == NEG_INF else max(p.means[0], tau) for p in params]
    lo = min(c - quad.width * s for c, s in zip(centres, spreads))
    hi = max(c + quad.width * s for c, s in zip(centres, spreads))
    if sigma == 0.0 and tau != NEG_INF:
        lo = tau
    h = (hi - lo) / n_points
    e = lo + h * (np.arange(n_points) + 0.5)
    logp = [truncated_noised_logpdf(e, p, 0, tau, model.noise) for p in params]
    lam = logp[1] - logp[0]
    w = [np.exp(lp - logsumexp(lp)) for lp in logp]
    return lam, w[0], w[1]


def _discrete_auc(lam, w0, w1) -> float:
    """Exact ``P(L1 > L0) + P(L1 == L0) / 2`` for discrete rating laws on shared support points."""
    uniq, inv = np.unique(lam, return_inverse=True)
    g0 = np.bincount(inv, weights=w0, minlength=len(uniq))
    g1 = np.bincount(inv, weights=w1, minlength=len(uniq))
    below0 = np.cumsum(g0) - g0
    return float(np.sum(g1 * (below0 + 0.5 * g0)))


def _quadrature_theta(model: FeatureModel, taus: TruncationVector, quad: Quadrature) -> tuple[float, float]:
    if model.M != 1:
        raise ValueError("quadrature is only available for a single feature; use MonteCarlo")
    fine = _discrete_auc(*_grid_distributions(model, taus, quad, quad.n_points))
    coarse = _discrete_auc(*_grid_distributions(model, taus, quad, quad.n_points // 2))
    # midpoint error is O(h^2): extrapolate, keep the uncorrected step as the error bound
    return fine + (fine - coarse) / 3.0, abs(fine - coarse) / 3.0


def _mc_ratings(model: FeatureModel, taus: TruncationVector, mc: MonteCarlo):
    pos = simulate_ratings(1, model, taus, mc.n, mc.seed, workers=mc.workers)
    neg = simulate_ratings(0, model, taus, mc.n, mc.seed, workers=mc.workers)
    return pos[~np.isnan(pos)], neg[~np.isnan(neg)]


def analysis_component(model: FeatureModel, taus: TruncationVector, method: Method) -> tuple[float, float]:
    """Rated-vs-rated area ``az1`` and its error estimate.

    ``az1`` is the probability that both images of a pair are rated and the
    positive one gets the higher rating.
    """
    if taus.M != model.M:
        raise ValueError("thresholds and model disagree on M")
    rej0, rej1 = rejection_probs(model, taus)
    rated = (1.0 - rej1) * (1.0 - rej0)
    if rated == 0.0:
        return 0.0, 0.0
    if isinstance(method, Quadrature):
        theta, err = _quadrature_theta(model, taus, method)
    elif isinstance(method, MonteCarlo):
        theta, err = mann_whitney(*_mc_ratings(model, taus, method))
    else:
        raise TypeError(f"unknown method {method!r}")
    return rated * theta, rated * err


def total_auc(model: FeatureModel, taus: TruncationVector, method: Method) -> AucDecomposition:
    rej0, rej1 = rejection_probs(model, taus)
    az1, se = analysis_component(model, taus, method)
    az2 = (1.0 - rej1) * rej0
    az3 = 0.5 * rej1 * rej0
    return AucDecomposition(az1 + az2 + az3, az1, az2, az3, rej0, rej1, se)


def _curve_from_discrete(values1, w1, values0, w0, scale1, scale0, n_thresholds):
    """Rated-only (FPF, TPF) points, decision rule ``rating >= t``."""
    pooled = np.concatenate([values1, values0])
    pooled_w = np.concatenate([w1 * scale1, w0 * scale0])
    order = np.argsort(pooled, kind="stable")
    cw = np.cumsum(pooled_w[order])
    targets = np.linspace(0.0, cw[-1], n_thresholds)[1:-1]
    pick = np.clip(np.searchsorted(cw, targets), 0, len(order) - 1)
    inner = np.unique(pooled[order][pick])[::-1]
    thresholds = np.concatenate([[np.inf], inner, [-np.inf]])

    def survival(values, w):
        srt = np.argsort(values, kind="stable")
        v, cum = values[srt], np.cumsum(w[srt][::-1])[::-1]
        cum = np.append(cum, 0.0)
        return cum[np.searchsorted(v, thresholds, side="left")]

    tpf = scale1 * survival(values1, w1)
    fpf = scale0 * survival(values0, w0)
    tpf[-1], fpf[-1] = scale1, scale0
    return np.column_stack([fpf, tpf]), thresholds


def roc_curve(
    model: FeatureModel,
    taus: TruncationVector,
    method: Method,
    n_thresholds: int = 201,
    complete: bool = True,
) -> RocCurve:
    """Rated-only ROC curve, optionally completed with the gist and guessing segments.

    ``complete=False`` gives the incomplete-analysis curve that stops at the endpoint.
    """
    if n_thresholds < 2:
        raise ValueError("n_thresholds must be >= 2")
    rej0, rej1 = rejection_probs(model, taus)
    scale0, scale1 = 1.0 - rej0, 1.0 - rej1
    if isinstance(method, Quadrature):
        if model.M != 1:
            raise ValueError("quadrature is only available for a single feature; use MonteCarlo")
        lam, w0, w1 = _grid_distributions(model, taus, method, method.n_points)
        v1, v0 = lam, lam
    elif isinstance(method, MonteCarlo):
        v1, v0 = _mc_ratings(model, taus, method)
        if len(v1) == 0 or len(v0) == 0:
            raise EstimationError("need at least one rated image per class")
        # sampled curves stop at the observed rated fractions, not the analytic ones
        scale1, scale0 = len(v1) / method.n, len(v0) / method.n
        rej1, rej0 = 1.0 - scale1, 1.0 - scale0
        w1 = np.full(len(v1), 1.0 / len(v1))
        w0 = np.full(len(v0), 1.0 / len(v0))
    else:
        raise TypeError(f"unknown method {method!r}")

    if scale0 == 0.0 or scale1 == 0.0:
        pts = np.array([[0.0, 0.0], [scale0, scale1]])
        thresholds = np.array([np.inf, -np.inf])
    else:
        pts, thresholds = _curve_from_discrete(v1, w1, v0, w0, scale1, scale0, n_thresholds)

    endpoint = (scale0, scale1)
    curve = RocCurve(points=pts, endpoint=endpoint, thresholds=thresholds)
    if complete and (rej0 > 0.0 or rej1 > 0.0):
        curve.gist_extension = np.array([endpoint, (1.0, scale1)])
        curve.guess_segment = np.array([endpoint, (1.0, 1.0)])
    return curve
