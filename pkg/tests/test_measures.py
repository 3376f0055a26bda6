from fractions import Fraction

import numpy as np
import pytest

from oracles import aarnes_rule, all_masks, chain_value, mask_cells, three_point_rule
from qmlab import (CLOSED, OPEN, Dirac, DiracRule, FromSolidRule, Grid, Image, InvariantViolation,
                   MalformedPair, Mixture, Pushforward, SpaceMismatch, aarnes, dirac, three_point)
from qmlab.families import disjoint_pairs, open_chains, open_pairs, split_pairs
from qmlab.grid import erode
from qmlab.measures import (check_additivity, check_chain_continuity, check_complementation,
                            check_monotonicity, check_regularity, dirac_characterization_check, is_simple)
from qmlab.search import find_nonsubadditive_witness
from qmlab.shapes import (border_ring, cell, disk, half_ring, lens_pair, segment, strip, template)
from qmlab.transforms import Preimage, fold_map, shift_map


def test_aarnes_examples(g65, measures65):
    m = measures65["aarnes"]
    assert m(border_ring(g65)) == 1
    assert m(g65.empty()) == 0
    left, right = half_ring(g65, "left"), half_ring(g65, "right")
    assert m(left) == 0 and m(right) == 0
    union = left.union(right)
    assert union == border_ring(g65)
    assert m(union) == 1


def test_three_point_examples(g65, measures65):
    m = measures65["three_point"]
    p, q, r = m.marked_points
    k = segment(g65, p, q, 1.0)
    assert k.mask[p] and k.mask[q] and not k.mask[r]
    assert m(k) == 1
    a, b = lens_pair(g65, p, q)
    assert m(a) == 0 and m(b) == 0


def test_values_are_exact_fractions(g65, measures65):
    for m in measures65.values():
        v = m(strip(g65))
        assert isinstance(v, Fraction)


def test_dirac_matches_solid_rule_version(g33, family33):
    x = g33.index(10, 20)
    a, b = dirac(g33, x), FromSolidRule(DiracRule(g33, x))
    for img in family33:
        assert a(img) == b(img)


def test_space_mismatch_is_rejected(g9, g33):
    with pytest.raises(SpaceMismatch):
        aarnes(g9)(g33.full())


@pytest.mark.parametrize("make", [aarnes, three_point])
@pytest.mark.parametrize("adjacency", ["8/4", "4/8"])
def test_exhaustive_3x3_against_oracle(make, adjacency):
    g = Grid(3, adjacency)
    m = make(g)
    region = g.region_adjacency
    if make is aarnes:
        rule = aarnes_rule(3)
    else:
        rule = three_point_rule([g.rowcol(p) for p in m.marked_points])
    for bits in all_masks(3):
        cells = mask_cells(bits, 3)
        for kind in (CLOSED, OPEN):
            assert m(Image(g, np.array(bits, bool), kind)) == chain_value(rule, 3, cells, kind, region)


def test_exhaustive_3x3_axioms():
    g = Grid(3)
    m = aarnes(g)
    images = [Image(g, np.array(bits, bool), kind) for bits in all_masks(3) for kind in (CLOSED, OPEN)]
    images = list({img: None for img in images})
    vals = {img: m(img) for img in images}
    for a in images:
        assert vals[a] + m(a.complement()) == 1
    for a in images:
        for b in images:
            if a.issubset(b):
                assert vals[a] <= vals[b]
            if a.isdisjoint(b):
                u = a.union(b)
                if u is not None:
                    assert m(u) == vals[a] + vals[b]


def test_additivity_complementation_monotonicity(g65, measures65, family65):
    pairs = disjoint_pairs(family65) + split_pairs(g65)
    for m in measures65.values():
        assert check_additivity(m, pairs).passed
        assert check_complementation(m, family65).passed
        assert check_monotonicity(m, family65).passed


def test_additivity_examples(g65, measures65):
    m = measures65["three_point"]
    p, q, r = m.marked_points
    k1 = segment(g65, p, q, 1.0)
    k2 = cell(g65, r)
    assert m(k1) == 1 and m(k2) == 0
    assert check_additivity(m, [(k1, k2), (g65.full(), g65.empty())]).passed


def test_malformed_pairs_raise(g9):
    m = aarnes(g9)
    a = strip(g9)
    with pytest.raises(MalformedPair):
        check_additivity(m, [(a, a)])
    left = Image(g9, np.arange(81) % 9 <= 3, OPEN)
    right = Image(g9, np.arange(81) % 9 >= 4, OPEN)
    with pytest.raises(MalformedPair):
        check_additivity(m, [(left, right)])


def test_failing_report_carries_witness(g9):
    class Broken(Dirac):
        def _value(self, image):
            return Fraction(1) if image.count else Fraction(0)

    m = Broken(g9, 0)
    report = check_additivity(m, [(cell(g9, 0), cell(g9, 40))])
    assert not report.passed and report.witness


def test_regularity_examples(g65, measures65):
    m = measures65["aarnes"]
    assert check_regularity(m, g65.full(OPEN)).passed
    inner = Image(g65, ~g65.border, OPEN)
    r = check_regularity(m, inner)
    assert r.passed and r.values["open_value"] == 0
    nbhd = border_ring(g65, 3, OPEN).union(strip(g65, 5, "vertical", OPEN))
    r = check_regularity(m, nbhd)
    assert r.passed and r.values["open_value"] == 1


def test_chain_continuity(g65, measures65):
    for m in measures65.values():
        for chain in open_chains(g65):
            assert check_chain_continuity(m, chain).passed


def test_is_simple_examples(g9):
    x, y = 10, 70
    mix = Mixture([Fraction(1, 2)] * 2, [dirac(g9, x), dirac(g9, y)])
    fam = [cell(g9, x)]
    assert mix(cell(g9, x)) == Fraction(1, 2)
    assert not is_simple(mix, fam)
    assert is_simple(aarnes(g9), [strip(g9), cell(g9, 3)])
    assert is_simple(mix, [])


def test_mixture_is_linear(g33, family33):
    parts = [aarnes(g33), three_point(g33), dirac(g33, 5)]
    w = [Fraction(1, 2), Fraction(1, 3), Fraction(1, 6)]
    mix = Mixture(w, parts)
    assert mix.exact
    for a in family33:
        assert mix(a) == sum(wi * p(a) for wi, p in zip(w, parts))


def test_mixture_weights_validated(g9):
    with pytest.raises(ValueError):
        Mixture([0.5, 0.4], [aarnes(g9), dirac(g9, 0)])
    with pytest.raises(ValueError):
        Mixture([1.5, -0.5], [aarnes(g9), dirac(g9, 0)])
    loose = Mixture([0.1, 0.9], [aarnes(g9), dirac(g9, 0)])
    assert not loose.exact and abs(loose(g9.full()) - 1) < 1e-12


def test_pushforward_matches_preimage_transformation(g33, family33):
    for cmap in (shift_map(g33), fold_map(g33)):
        push = Pushforward(aarnes(g33), cmap, g33)
        q = Preimage(cmap, g33)
        for a in family33:
            assert push(a) == aarnes(g33)(q(a))


def test_invariant_violation_is_loud(g9):
    class TooBig(Dirac):
        def _value(self, image):
            return Fraction(2)

    with pytest.raises(InvariantViolation):
        TooBig(g9, 0)(g9.full())


def test_counterexample_search(g65, measures65):
    w = find_nonsubadditive_witness(measures65["aarnes"], budget=10_000, seed=0)
    assert w is not None and w["source"] == "template"
    assert w["values"] == {"U": 0, "V": 0, "union": 1}
    w = find_nonsubadditive_witness(measures65["three_point"], budget=10_000, seed=0)
    assert w is not None and w["values"]["union"] == 1
    assert find_nonsubadditive_witness(measures65["dirac"], budget=600, seed=0) is None


def test_counterexample_search_is_deterministic(g33):
    m = three_point(g33)
    assert find_nonsubadditive_witness(m, 2000, 5) == find_nonsubadditive_witness(m, 2000, 5)


def test_dirac_characterization(g65, measures65):
    r = dirac_characterization_check(measures65["dirac"], open_pairs(g65, [g65.center]))
    assert r.passed and r.values["point"] == g65.center
    for name in ("aarnes", "three_point"):
        m = measures65[name]
        r = dirac_characterization_check(m, open_pairs(g65, m.marked_points))
        assert r.passed and r.values["subadditive"] is False and r.witness


def test_dirac_characterization_inconclusive_for_non_simple(g9):
    mix = Mixture([Fraction(1, 2)] * 2, [dirac(g9, 10), dirac(g9, 70)])
    r = dirac_characterization_check(mix, open_pairs(g9))
    assert r.status == "inconclusive"


def test_regularity_witness_is_inside(g33):
    u = disk(g33, kind=OPEN)
    k = Image(g33, erode(u.mask, 1, g33), CLOSED)
    assert k.issubset(u)


def test_templates_resolve(g33):
    for name in ("center", "border_ring:2", "half_ring:top,2", "strip:h", "annulus", "interior", "blob:4"):
        assert template(g33, name).space == g33
    with pytest.raises(ValueError):
        template(g33, "hexagon")
