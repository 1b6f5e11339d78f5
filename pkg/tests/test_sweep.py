import math

import numpy as np
import pytest

from truncobs.distributions import NEG_INF
from truncobs.extraction import TruncationVector
from truncobs.observer import FeatureModel
from truncobs.roc import MonteCarlo, Quadrature, asymptotic_auc, binormal_auc
from truncobs.sweep import (
    Axis,
    DegenerateModelError,
    SweepGrid,
    best_record,
    optimize,
    sweep,
    truncation_efficiency,
)

from conftest import reference_model

FAST = Quadrature(n_points=1 << 14)


def test_grid_points():
    g = SweepGrid((Axis(-1, 1, 3),))
    assert [p.taus for p in g.points(1)] == [(NEG_INF,), (-1.0,), (0.0,), (1.0,)]
    g2 = SweepGrid((Axis(0, 1, 2), Axis(-1, 0, 3)), include_neg_infinity=False)
    pts = g2.points(2)
    assert len(pts) == 6 and pts[0].taus == (0.0, -1.0) and pts[-1].taus == (1.0, 0.0)
    shared = SweepGrid((Axis(0, 1, 2),), shared=True, include_neg_infinity=False)
    assert [p.taus for p in shared.points(3)] == [(0.0,) * 3, (1.0,) * 3]
    assert len(SweepGrid.default(1).points(1)) == 142
    assert len(SweepGrid.default(2).points(2)) == 71 * 71 + 1
    with pytest.raises(ValueError):
        SweepGrid((Axis(0, 1, 2),)).points(2)
    with pytest.raises(ValueError):
        Axis(1, 0, 3)
    with pytest.raises(ValueError):
        Axis(0, 1, 1)


def test_identical_classes_are_chance_everywhere():
    m = FeatureModel.from_arrays([0.0], [1.0], [0.0], [1.0], 0.7)
    for rec in sweep(m, SweepGrid((Axis(-2, 2, 9),)), FAST):
        assert rec.auc.az == pytest.approx(0.5, abs=1e-12)


def test_identical_classes_monte_carlo_two_features():
    m = FeatureModel.from_arrays([0.0, 0.0], [1.0, 1.0], [0.0, 0.0], [1.0, 1.0], 0.5)
    grid = SweepGrid((Axis(-1, 1, 3),), shared=True)
    for rec in sweep(m, grid, MonteCarlo(20_000, seed=2)):
        assert abs(rec.auc.az - 0.5) <= 2 * rec.auc.se + 1e-12


def test_noiseless_untruncated_is_best():
    recs = sweep(reference_model(1.0, 0.0), SweepGrid.default(1), FAST)
    best = best_record(recs)
    assert best.taus.is_untruncated
    assert best.auc.az == pytest.approx(binormal_auc(0, 1, 0.75, 1), abs=1e-9)


def test_high_noise_peak_between_means():
    tau_star, auc = optimize(reference_model(1.0, 50.0), SweepGrid.default(1), FAST)
    assert 0.0 < tau_star[0] < 0.75
    assert auc.az > 0.6


def test_very_high_noise_follows_asymptote():
    m = reference_model(1.0, 1e4)
    grid = SweepGrid((Axis(-2.0, 3.0, 51),))
    tau_star, _ = optimize(m, grid, FAST)
    asym = max(grid.points(1), key=lambda t: asymptotic_auc(m, t))
    assert tau_star == asym


def test_optimize_single_point_and_ties():
    m = reference_model(1.0, 0.5)
    only = [TruncationVector((0.3,))]
    tau_star, _ = optimize(m, only, FAST)
    assert tau_star == only[0]
    same = FeatureModel.from_arrays([0.0], [1.0], [0.0], [1.0], 0.0)
    tau_star, _ = optimize(same, SweepGrid((Axis(-1, 1, 5),)), FAST)
    assert tau_star.is_untruncated
    tau_star, _ = optimize(same, SweepGrid((Axis(-1, 1, 5),), include_neg_infinity=False), FAST)
    assert tau_star.taus == (-1.0,)


def test_records_follow_grid_order_with_workers():
    m = reference_model(3.0, 0.5)
    grid = SweepGrid((Axis(-1, 1, 5),))
    a = sweep(m, grid, FAST, workers=1)
    b = sweep(m, grid, FAST, workers=3)
    assert [r.taus for r in a] == [r.taus for r in b]
    assert [r.auc for r in a] == [r.auc for r in b]


def test_common_random_numbers_smooth_monte_carlo_scan():
    m = reference_model(1.0, 0.0)
    grid = SweepGrid((Axis(-0.5, 1.0, 7),), include_neg_infinity=False)
    recs = sweep(m, grid, MonteCarlo(200_000, seed=8))
    az1 = np.array([r.auc.az1 for r in recs])
    se = np.array([r.auc.se for r in recs])
    # unregularised performance only falls as the threshold rises
    assert np.all(np.diff(az1) <= 2 * se[1:])


def test_unregularised_monotone_quadrature():
    for s1 in (0.5, 1.0, 3.0):
        recs = sweep(reference_model(s1, 0.0), SweepGrid.default(1), FAST)
        az1 = np.array([r.auc.az1 for r in recs])
        slack = 2 * np.array([r.auc.se for r in recs])
        assert np.all(np.diff(az1) <= slack[1:] + 1e-12)


def test_truncation_efficiency():
    m = reference_model(1.0, 0.0)
    grid = SweepGrid((Axis(-2.0, 3.0, 51),))
    assert truncation_efficiency(m, grid, 0.0, FAST) == pytest.approx(1.0, abs=1e-9)
    eff = truncation_efficiency(m, grid, 50.0, FAST)
    assert eff >= 0.6367 / 0.7021
    with pytest.raises(DegenerateModelError):
        truncation_efficiency(FeatureModel.from_arrays([0.0], [1.0], [0.0], [1.0]), grid, 1.0, FAST)


def test_two_feature_shared_monte_carlo_sweep():
    m = reference_model(1.0, 50.0, M=2)
    grid = SweepGrid((Axis(-1.0, 2.0, 7),), shared=True)
    recs = sweep(m, grid, MonteCarlo(50_000, seed=21))
    for r in recs:
        assert r.auc.az == pytest.approx(r.auc.az1 + r.auc.az2 + r.auc.az3, abs=1e-12)
        assert abs(r.auc.az - r.asymptote) <= 0.01
    best = best_record(recs)
    assert -0.5 <= best.taus[0] <= 1.25
    assert math.isfinite(best.auc.se)
