import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from truncobs.distributions import NEG_INF, ClassParams
from truncobs.extraction import (
    ExtractionPattern,
    TruncationVector,
    all_patterns,
    composite_step,
    extraction_prob,
    full_rejection_prob,
    pattern_from_features,
)

T = TruncationVector
P = ExtractionPattern.from_bits


def test_composite_step_examples():
    assert composite_step([1, 1], T((0, 0)), P([1, 1])) == 1
    assert composite_step([1, -1], T((0, 0)), P([1, 1])) == 0
    assert composite_step([1, -1], T((0, 0)), P([1, 0])) == 1


def test_untruncated_only_full_pattern_fires():
    f = [-40.0, 3.0, 0.0]
    fired = [a for a in all_patterns(3) if composite_step(f, T.untruncated(3), a)]
    assert fired == [P([1, 1, 1])]


def test_composite_step_length_mismatch():
    with pytest.raises(ValueError):
        composite_step([1.0], T((0, 0)), P([1, 1]))


def test_pattern_from_features():
    assert pattern_from_features([0.2, -0.3], T((0, 0))) == P([1, 0])
    assert pattern_from_features([0.4, -1.1], T((0.4, -1.1))) == P([1, 1])
    alpha = pattern_from_features([-5, -5], T((0, 0)))
    assert alpha.unrated and alpha.m == 0


def test_pattern_properties():
    a = P([1, 0, 1])
    assert a.m == 2 and a.indices == (0, 2) and a.bits == (1, 0, 1)
    assert not a.unrated
    assert len(list(all_patterns(4))) == 16


def test_truncation_vector_parsing():
    t = T(("-inf", 0.5))
    assert t.taus == (NEG_INF, 0.5)
    with pytest.raises(ValueError):
        T((math.inf,))
    with pytest.raises(ValueError):
        T(("foo",))
    with pytest.raises(ValueError):
        T(tuple(range(21)))


def test_one_in_eight_unrated():
    params = ClassParams([0.0, 0.0, 0.0], [1.0, 1.0, 1.0])
    taus = T((0.0, 0.0, 0.0))
    assert extraction_prob(P([0, 0, 0]), params, taus) == 0.125
    assert full_rejection_prob(params, taus) == 0.125


def test_extraction_prob_examples():
    assert extraction_prob(P([1]), ClassParams([0.75], [1.0]), T((0.0,))) == pytest.approx(0.7733726, abs=1e-7)
    params = ClassParams([0.1, 2.0], [1.0, 0.3])
    for a in all_patterns(2):
        expected = 1.0 if a.mask == 3 else 0.0
        assert extraction_prob(a, params, T.untruncated(2)) == expected


def test_full_rejection_examples():
    assert full_rejection_prob(ClassParams([0.0], [1.0]), T((0.0,))) == 0.5
    assert full_rejection_prob(ClassParams([0.0, 0.0], [1.0, 1.0]), T((0.0, 0.0))) == 0.25
    assert full_rejection_prob(ClassParams([0.75], [1.0]), T((0.0,))) == pytest.approx(0.2266274, abs=1e-7)


params_strategy = st.integers(1, 5).flatmap(
    lambda M: st.tuples(
        st.lists(st.floats(-3, 3), min_size=M, max_size=M),
        st.lists(st.floats(0.1, 5), min_size=M, max_size=M),
        st.lists(st.one_of(st.just(NEG_INF), st.floats(-6, 6)), min_size=M, max_size=M),
    )
)


@settings(max_examples=150, deadline=None)
@given(params_strategy)
def test_partition_of_unity(args):
    means, sds, taus = args
    params, tv = ClassParams(means, sds), T(tuple(taus))
    probs = [extraction_prob(a, params, tv) for a in all_patterns(len(means))]
    assert math.fsum(probs) == pytest.approx(1.0, abs=1e-12)
    nonzero = math.fsum(probs[1:])
    assert full_rejection_prob(params, tv) == pytest.approx(1.0 - nonzero, abs=1e-12)
    assert full_rejection_prob(params, tv) == probs[0]


@settings(max_examples=100, deadline=None)
@given(params_strategy, st.integers(0, 4), st.floats(0.0, 3.0))
def test_rejection_monotone_in_threshold(args, which, bump):
    means, sds, taus = args
    i = which % len(means)
    params = ClassParams(means, sds)
    lower = T(tuple(taus))
    raised = list(taus)
    raised[i] = (-6.0 if raised[i] == NEG_INF else raised[i]) + bump
    assert full_rejection_prob(params, T(tuple(raised))) >= full_rejection_prob(params, lower)


@settings(max_examples=200, deadline=None)
@given(
    st.lists(st.floats(-5, 5), min_size=1, max_size=4).flatmap(
        lambda f: st.tuples(st.just(f), st.lists(st.one_of(st.just(NEG_INF), st.floats(-5, 5)),
                                                 min_size=len(f), max_size=len(f)))
    )
)
def test_regions_are_disjoint(args):
    f, taus = args
    tv = T(tuple(taus))
    fired = [a for a in all_patterns(len(f)) if composite_step(f, tv, a)]
    assert len(fired) == 1
    assert fired[0] == pattern_from_features(f, tv)


def test_boundary_grid_exhaustive():
    # every sign combination on a 3-feature lattice including exact ties
    vals = [-1.0, 0.0, 1.0]
    tv = T((0.0, 0.0, 0.0))
    for f in itertools.product(vals, repeat=3):
        alpha = pattern_from_features(f, tv)
        assert alpha.bits == tuple(int(x >= 0.0) for x in f)
        assert np.sum([composite_step(f, tv, a) for a in all_patterns(3)]) == 1
