"""
Two features and a shared threshold
===================================

With two independent features an image is unrated only if both fall below
their thresholds.  Areas are estimated by Monte Carlo here, using the same
seed at every grid point so neighbouring estimates share random numbers.
"""

# %%
from truncobs import Axis, FeatureModel, MonteCarlo, SweepGrid, best_record, sweep
from truncobs.extraction import TruncationVector, full_rejection_prob

model = FeatureModel.from_arrays([0.0, 0.0], [1.0, 1.0], [0.75, 0.75], [1.0, 1.0], sigma=50.0)

# %%
# Rejection needs every feature to miss, so the rejection probability is a
# product over features.
taus = TruncationVector.shared(0.0, 2)
print("rej0 at tau = 0:", full_rejection_prob(model.class0, taus))
print("rej1 at tau = 0:", full_rejection_prob(model.class1, taus))

# %%
# A shared threshold swept along the diagonal.
grid = SweepGrid((Axis(-1.0, 2.0, 13),), shared=True)
records = sweep(model, grid, MonteCarlo(100_000, seed=7))
for rec in records:
    print(f"tau = {rec.taus[0]:6.2f}   az = {rec.auc.az:.4f} +/- {rec.auc.se:.4f}   asymptote {rec.asymptote:.4f}")
print("best shared threshold:", best_record(records).taus)

# %%
# The full surface over independent thresholds.  The peak sits near the
# class means rather than at the untruncated corner.
surface = sweep(model, SweepGrid((Axis(-1.0, 2.0, 7), Axis(-1.0, 2.0, 7))), MonteCarlo(50_000, seed=7))
peak = best_record(surface)
print(f"surface peak at {peak.taus.taus}: az = {peak.auc.az:.4f}, untruncated az = {surface[0].auc.az:.4f}")
