import itertools
from fractions import Fraction

import numpy as np
import pytest

from qmlab import (CLOSED, OPEN, Composite, DiscreteSpace, FiniteStarSample, FromSimple, Grid, GridFunction,
                   Image, NotAQuasiHomomorphism, Preimage, SpaceMismatch, StarRestricted, UncoveredPoint,
                   Vanishing, aarnes, builtin_function, compose, dirac, factorize, induced_function,
                   integrate, pullback, reconstruct_from_homomorphism, sublevel, three_point)
from qmlab.families import (disjoint_pairs, open_chains, sample_functions, separating_family, split_pairs,
                            standard_family)
from qmlab.integral import simple_value
from qmlab.measures import check_additivity, check_regularity, is_simple
from qmlab.shapes import border_ring, cell, half_plane, strip
from qmlab.transforms import (cell_map_from_csv, cell_map_to_csv, change_of_variables_transform_check,
                              check_axioms, composition_check, derived_properties_check, dirac_sample,
                              fold_map, functional_of, identity_map, shift_map)


@pytest.fixture(scope="module")
def g(g33):
    return g33


@pytest.fixture(scope="module")
def fam(family33):
    return family33


@pytest.fixture(scope="module")
def pairs(g, fam):
    return disjoint_pairs(fam) + split_pairs(g)


@pytest.fixture(scope="module")
def transforms(g):
    sample = FiniteStarSample(("aarnes", "three_point", "center", "corner"),
                              (aarnes(g), three_point(g), dirac(g, g.center), dirac(g, 0)))
    return {
        "identity": Preimage(identity_map(g), g),
        "shift": Preimage(shift_map(g), g),
        "fold": Preimage(fold_map(g), g),
        "from_aarnes": FromSimple(aarnes(g), g),
        "star4": StarRestricted(sample),
    }


def test_apply_examples(g, fam, transforms):
    for a in fam:
        assert transforms["identity"](a) == a
    assert transforms["from_aarnes"](border_ring(g)).is_full()
    assert transforms["from_aarnes"](cell(g, g.center)).is_empty()
    x = g.index(10, 10)
    star = StarRestricted(FiniteStarSample(("x", "aarnes"), (dirac(g, x), aarnes(g))))
    out = star(cell(g, x))
    assert out.cells.tolist() == [0]
    assert isinstance(out.space, DiscreteSpace)


def test_preimage_keeps_kind(g, transforms):
    a = strip(g, 5, "vertical", OPEN)
    assert transforms["shift"](a).kind == OPEN


@pytest.mark.parametrize("name", ["identity", "shift", "fold", "from_aarnes", "star4"])
def test_axioms_and_derived_properties(g, fam, pairs, transforms, name):
    q = transforms[name]
    opens = [a for a in fam if a.is_open()]
    assert check_axioms(q, pairs, opens).passed
    assert derived_properties_check(q, fam, open_chains(g)).passed


def test_negative_control_fails(g, fam, pairs):
    q = Vanishing(g)
    r = check_axioms(q, pairs, [a for a in fam if a.is_open()])
    assert not r.passed and r.values["whole_space"] is False
    assert not derived_properties_check(q, fam).passed


def test_space_mismatch(g, g9):
    with pytest.raises(SpaceMismatch):
        Preimage(identity_map(g), g)(g9.full())
    star = StarRestricted(FiniteStarSample(("a",), (aarnes(g),)))
    with pytest.raises(SpaceMismatch):
        compose(Preimage(identity_map(g), g), star)
    with pytest.raises(SpaceMismatch):
        pullback(Preimage(identity_map(g), g), aarnes(g9))


def test_pullback_examples(g, fam, transforms):
    mu = three_point(g)
    ident = pullback(transforms["identity"], mu)
    for a in fam:
        assert ident(a) == mu(a)
    sigma = aarnes(g)
    pb = pullback(transforms["from_aarnes"], three_point(g))
    for a in fam:
        assert pb(a) == sigma(a)
    for name, q in transforms.items():
        tgt = q.target
        for y in range(0, tgt.size, max(1, tgt.size // 7)):
            assert is_simple(pullback(q, dirac(tgt, y)), fam), name


def test_pullback_is_a_quasi_measure(g, fam, pairs, transforms):
    for name in ("shift", "fold", "from_aarnes"):
        mu = pullback(transforms[name], aarnes(g))
        assert check_additivity(mu, pairs).passed
        for u in fam:
            if u.kind == OPEN:
                assert check_regularity(mu, u).passed


def test_induced_function_examples(g, transforms):
    a = builtin_function(g, "pyramid+plane_b")
    f = fold_map(g)
    assert np.array_equal(induced_function(transforms["fold"], a).values, a.values[f])
    pyr = builtin_function(g, "pyramid")
    assert np.all(induced_function(transforms["from_aarnes"], pyr).values == 0)
    assert np.array_equal(induced_function(transforms["identity"], a).values, a.values)


@pytest.mark.parametrize("name", ["shift", "fold", "from_aarnes", "star4"])
def test_induced_function_matches_literal_definition(g, transforms, name):
    q = transforms[name]
    for a in sample_functions(g, 0, 3):
        fast = induced_function(q, a)
        if q.target.size > 100:
            ys = range(0, q.target.size, 37)
            for y in ys:
                assert fast.values[y] == simple_value(pullback(q, dirac(q.target, y)), a)
        else:
            assert np.array_equal(fast.values, induced_function(q, a, method="pointwise").values)


@pytest.mark.parametrize("name", ["shift", "fold", "from_aarnes", "star4"])
def test_induced_function_properties(g, transforms, name):
    q = transforms[name]
    for a in sample_functions(g, 5, 4):
        qa = induced_function(q, a)
        assert qa.norm() <= a.norm()
        for t in np.unique(a.values)[::50]:
            assert q(sublevel(a, t)) == sublevel(qa, t) or q.target.is_discrete and \
                np.array_equal(q(sublevel(a, t)).mask, qa.values <= t)
        phi = lambda t: t ** 3 - 2 * t  # noqa: E731
        assert np.array_equal(induced_function(q, a.map(phi)).values, qa.map(phi).values)


def test_change_of_variables_examples(g, transforms):
    a = builtin_function(g, "pyramid")
    for mu in (aarnes(g), three_point(g), dirac(g, 7)):
        r = change_of_variables_transform_check(transforms["identity"], mu, a)
        assert r.passed and r.values["lhs"] == integrate(mu, a)
    r = change_of_variables_transform_check(transforms["from_aarnes"], three_point(g), a)
    assert r.passed and r.values["lhs"] == 0 and r.values["rhs"] == 0
    y = g.index(3, 29)
    r = change_of_variables_transform_check(transforms["fold"], dirac(g, y), a)
    assert r.values["lhs"] == a.values[fold_map(g)[y]] and r.values["discrepancy"] == 0


def test_change_of_variables_with_non_simple_measure(g, transforms):
    mix = pullback(transforms["shift"], aarnes(g))
    from qmlab import Mixture
    mu = Mixture([0.25, 0.75], [mix, three_point(g)])
    r = change_of_variables_transform_check(transforms["fold"], mu, builtin_function(g, "pyramid+plane_b"))
    assert r.passed and r.values["tolerance"] == 1e-9


def test_compose_examples(g, fam, transforms):
    ident, q = transforms["identity"], transforms["fold"]
    for a in fam:
        assert compose(ident, q)(a) == q(a)
    s, f = shift_map(g), fold_map(g)
    both = compose(transforms["shift"], transforms["fold"])  # shift after fold
    direct = Preimage(f[s], g)
    for a in fam:
        assert both(a) == direct(a)
    fs = compose(transforms["from_aarnes"], transforms["fold"])
    expected = FromSimple(pullback(transforms["fold"], aarnes(g)), g)
    for a in fam:
        assert fs(a) == expected(a)
    assert isinstance(fs, Composite)


def test_composition_identities(g, fam, transforms):
    funcs = sample_functions(g, 0, 3)
    for pn, qn in [("shift", "fold"), ("from_aarnes", "shift"), ("star4", "fold")]:
        p, q = transforms[pn], transforms[qn]
        mus = [dirac(p.target, 0)] if p.target.is_discrete else [aarnes(g), three_point(g)]
        assert composition_check(p, q, fam[:20], funcs, mus).passed


def test_factorize_from_simple(g, fam):
    q = FromSimple(aarnes(g), g)
    sample = FiniteStarSample(("aarnes", "three_point"), (aarnes(g), three_point(g)))
    fz = factorize(q, sample, fam)
    assert set(fz.w.values()) == {"aarnes"} and fz.residual == 0


def test_factorize_preimage_recovers_the_map(g):
    f = fold_map(g)
    q = Preimage(f, g)
    fam = separating_family(g)
    fz = factorize(q, dirac_sample(g), fam, holdout=standard_family(g, 3))
    assert fz.residual == 0
    assert all(fz.w[str(y)] == str(f[y]) for y in range(g.size))


def test_factorize_star_is_identity_labelling(g, fam, transforms):
    q = transforms["star4"]
    fz = factorize(q, q.sample, fam)
    assert fz.w == {label: label for label in q.sample.labels}
    assert fz.to_dict()["residual"] == 0


def test_factorize_reports_uncovered_points(g, fam):
    q = Preimage(fold_map(g), g)
    with pytest.raises(UncoveredPoint):
        factorize(q, FiniteStarSample(("aarnes",), (aarnes(g),)), fam)


def test_reconstruct_preimage_pointwise_definition():
    g = Grid(9)
    f = shift_map(g)
    basis = sample_functions(g, 0, 4)
    q, report = reconstruct_from_homomorphism(lambda a, y: a.values[f[y]], g, g, basis)
    assert report.passed
    ref = Preimage(f, g)
    for a in standard_family(g, 0):
        assert q(a) == ref(a)


def test_reconstruct_from_simple(g, fam):
    sigma = three_point(g)
    basis = sample_functions(g, 0, 4)
    q, report = reconstruct_from_homomorphism(lambda a: np.full(g.size, simple_value(sigma, a)), g, g, basis,
                                              pointwise=False)
    assert report.passed
    ref = FromSimple(sigma, g)
    for a in fam:
        assert q(a) == ref(a)


def test_reconstruct_rejects_non_homomorphisms(g):
    basis = sample_functions(g, 0, 3)
    with pytest.raises(NotAQuasiHomomorphism):
        reconstruct_from_homomorphism(lambda a: np.zeros(g.size), g, g, basis, pointwise=False)
    mean = lambda a: np.full(g.size, a.values.mean())  # noqa: E731
    with pytest.raises(NotAQuasiHomomorphism):
        reconstruct_from_homomorphism(mean, g, g, basis, pointwise=False)


def test_reconstruct_round_trip_through_functional(g, transforms):
    basis = sample_functions(g, 1, 4)
    for name in ("shift", "fold", "from_aarnes"):
        q = transforms[name]
        rq, report = reconstruct_from_homomorphism(functional_of(q), g, g, basis, pointwise=False)
        assert report.passed and report.values["max_discrepancy"] == 0


def test_cell_map_csv_round_trip(g):
    f = fold_map(g)
    assert np.array_equal(cell_map_from_csv(cell_map_to_csv(f), g.size), f)
    with pytest.raises(ValueError):
        cell_map_from_csv("0,0\n", g.size)


def test_preimage_validation(g):
    with pytest.raises(ValueError):
        Preimage(np.zeros(5, int), g)
    with pytest.raises(IndexError):
        Preimage(np.full(g.size, g.size), g)


def _all_images(grid):
    return [Image(grid, np.array(bits, bool), kind)
            for bits in itertools.product((0, 1), repeat=grid.size) for kind in (CLOSED, OPEN)]


def test_exhaustive_3x3_axioms():
    g = Grid(3)
    images = list(dict.fromkeys(_all_images(g)))
    bits = [int("".join("1" if v else "0" for v in img.faces), 2) for img in images]
    pairs = []
    for i, a in enumerate(images):
        for j in range(i + 1, len(images)):
            if not bits[i] & bits[j]:
                b = images[j]
                if a.union(b) is not None:
                    pairs.append((a, b))
    opens = [a for a in images if a.is_open()]
    for q in (Preimage(shift_map(g), g), Preimage(fold_map(g), g), FromSimple(aarnes(g), g),
              FromSimple(three_point(g), g)):
        assert check_axioms(q, pairs, opens).passed
        assert derived_properties_check(q, images).passed
