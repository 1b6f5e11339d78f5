"""Ideal observer with lower feature truncation and internal noise.

Computes the area under the ROC curve split into analysis, gist and guessing
parts, and checks it against a brute-force forced-choice simulation.
"""

from .distributions import (
    NEG_INF,
    ClassParams,
    DegenerateTruncationError,
    InternalNoise,
    acceptance_prob,
    normal_cdf,
    normal_logcdf,
    normal_pdf,
    truncated_noised_logpdf,
)
from .extraction import (
    ExtractionPattern,
    TruncationVector,
    all_patterns,
    composite_step,
    extraction_prob,
    full_rejection_prob,
    pattern_from_features,
)
from .observer import FeatureModel, Rated, Unrated, llr, rate_image, sample_external, simulate_ratings, substream
from .oracle import ForcedChoiceResult, empirical_rejection, forced_choice_auc
from .roc import (
    AucDecomposition,
    EstimationError,
    MonteCarlo,
    Quadrature,
    RocCurve,
    analysis_component,
    asymptotic_auc,
    binormal_auc,
    gist_component,
    guess_component,
    mann_whitney,
    rejection_probs,
    roc_curve,
    total_auc,
)
from .sweep import (
    Axis,
    DegenerateModelError,
    SweepGrid,
    SweepRecord,
    best_record,
    optimize,
    sweep,
    truncation_efficiency,
)

__version__ = "0.1.0"
