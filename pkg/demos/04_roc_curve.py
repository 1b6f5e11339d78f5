"""
The partial ROC curve and its completion
========================================

Sweeping a decision threshold over rated images only traces a curve that
stops short of (1, 1), because unrated images never get called positive.
The stopping point is set by the two rejection probabilities.  Guessing on
unrated images completes the curve with a straight segment to (1, 1).
"""

# %%
from truncobs import FeatureModel, Quadrature, roc_curve, total_auc
from truncobs.extraction import TruncationVector

model = FeatureModel.from_arrays([0.0], [1.0], [0.75], [1.0], sigma=0.5)
taus = TruncationVector((0.0,))
curve = roc_curve(model, taus, Quadrature(), n_thresholds=21)

# %%
for fpf, tpf in curve.points:
    print(f"FPF {fpf:.3f}  TPF {tpf:.3f}")
print("endpoint of the rated-only curve:", tuple(round(v, 4) for v in curve.endpoint))

# %%
# The horizontal gist line from the endpoint bounds the gist rectangle; the
# diagonal guess segment closes the curve.
print("gist extension:", curve.gist_extension.round(4).tolist())
print("guess segment: ", curve.guess_segment.round(4).tolist())

# %%
# The area under the completed curve matches the computed total.
print(f"area under completed curve {curve.area():.4f}, total az {total_auc(model, taus, Quadrature()).az:.4f}")
