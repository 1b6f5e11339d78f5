"""
Thresholding a single feature
=============================

An observer who discards images whose feature falls below a threshold loses
information, yet under heavy internal noise the thresholded observer can
outperform the untruncated one.  This script sweeps the threshold for one
feature and prints how the area under the ROC curve splits into its parts.
"""

# %%
# The negative class is N(0, 1) and the positive class N(0.75, 1).
import numpy as np

from truncobs import FeatureModel, Quadrature, SweepGrid, best_record, sweep

model = FeatureModel.from_arrays([0.0], [1.0], [0.75], [1.0])
grid = SweepGrid.default(1)
print(f"{len(grid.points(1))} thresholds, the first one is the untruncated reference")

# %%
# Without internal noise the untruncated observer is already ideal, so no
# threshold beats it.
quiet = sweep(model, grid, Quadrature())
print(f"sigma = 0:   best tau = {best_record(quiet).taus[0]}, az = {best_record(quiet).auc.az:.4f}")

# %%
# With sigma = 50 the ratings of rated images are nearly pure noise.  What is
# left is the gist component: a positive that gets rated beats a negative
# that does not.
loud = sweep(model.with_noise(50.0), grid, Quadrature())
best = best_record(loud)
print(f"sigma = 50:  best tau = {best.taus[0]:.2f}, az = {best.auc.az:.4f}")
print(f"untruncated az at sigma = 50: {loud[0].auc.az:.4f}")

# %%
# A coarse table of the decomposition across thresholds.
print(f"{'tau':>6} {'az':>7} {'az1':>7} {'az2':>7} {'az3':>7} {'asym':>7}")
for rec in loud[1::10]:
    d = rec.auc
    print(f"{rec.taus[0]:6.2f} {d.az:7.4f} {d.az1:7.4f} {d.az2:7.4f} {d.az3:7.4f} {rec.asymptote:7.4f}")

# %%
# The noisy curve follows the high-noise asymptote closely.
gap = np.max([abs(r.auc.az - r.asymptote) for r in loud])
print(f"largest gap between az and the asymptote: {gap:.4f}")
