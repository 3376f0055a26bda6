"""Randomized properties over small grids."""

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

from qmlab import CLOSED, OPEN, Grid, GridFunction, Image, aarnes, erode, integrate, is_solid, three_point

G5 = Grid(5)
MEASURES = (aarnes(G5), three_point(G5))

masks = st.lists(st.booleans(), min_size=25, max_size=25).map(lambda b: np.array(b, bool))
kinds = st.sampled_from((CLOSED, OPEN))


@settings(max_examples=150, deadline=None)
@given(masks, kinds, st.sampled_from(MEASURES))
def test_complementation(mask, kind, m):
    a = Image(G5, mask, kind)
    assert m(a) + m(a.complement()) == 1


@settings(max_examples=150, deadline=None)
@given(masks, masks, kinds, st.sampled_from(MEASURES))
def test_monotonicity(s, extra, kind, m):
    small = Image(G5, s, kind)
    big = Image(G5, s | extra, kind)
    if small.issubset(big):
        assert m(small) <= m(big)


@settings(max_examples=150, deadline=None)
@given(masks, masks, st.integers(0, 3))
def test_erode_is_monotone_and_shrinking(s, extra, k):
    t = s | extra
    es, et = erode(s, k, G5), erode(t, k, G5)
    assert not (es & ~et).any()
    assert not (es & ~s).any()


@settings(max_examples=150, deadline=None)
@given(masks, kinds)
def test_solidity_is_symmetric(mask, kind):
    a = Image(G5, mask, kind)
    assert is_solid(a) == is_solid(a.complement())


@settings(max_examples=100, deadline=None)
@given(st.lists(st.integers(-3, 3), min_size=25, max_size=25), st.integers(-5, 5), st.sampled_from(MEASURES))
def test_integral_is_translation_covariant_and_bounded(vals, c, m):
    a = GridFunction(G5, np.array(vals, float))
    v = integrate(m, a)
    assert min(vals) <= v <= max(vals)
    assert integrate(m, a + float(c)) == v + c
