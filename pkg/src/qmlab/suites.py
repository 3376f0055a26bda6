"""Verification suites: fixed-order lists of reports over everything in a scene."""

from __future__ import annotations

import math
from dataclasses import replace
from fractions import Fraction

import numpy as np

from .errors import InvariantViolation, NotAQuasiHomomorphism, UncoveredPoint
from .families import (disjoint_pairs, open_chains, open_family, open_pairs, sample_functions,
                       separating_family, split_pairs, standard_family)
from .grid import DiscreteSpace
from .integral import (GridFunction, change_of_variables_check, consistency_check, lipschitz_check,
                       monotone_chain_check, monotonicity_check, multiplicativity_check,
                       quasi_linearity_check, riesz_roundtrip_check, staircase)
from .measures import (Dirac, Mixture, check_additivity, check_chain_continuity, check_complementation,
                       check_monotonicity, check_regularity, dirac_characterization_check, is_simple)
from .reports import INCONCLUSIVE, Report, status_of
from .transforms import (FiniteStarSample, change_of_variables_transform_check, check_axioms,
                         composition_check, derived_properties_check, dirac_sample, factorize,
                         functional_of, reconstruct_from_homomorphism)

SUITES = ("measure-axioms", "integral-props", "transform-axioms", "riesz", "factorization")

POLYNOMIALS = ((lambda t: t * t + 1.0, "t^2+1"), (lambda t: t ** 3 - t, "t^3-t"))


def _tag(report: Report, subject: str) -> Report:
    return replace(report, check=f"{report.check}[{subject}]")


def _all_pass(check: str, claim: str, reports: list[Report], **values) -> Report:
    failed = [r for r in reports if r.status == "fail"]
    witness = failed[0].witness if failed and failed[0].witness else None
    values = {"checked": len(reports), "failures": len(failed), **values}
    if failed and witness is None:
        values["first_failure"] = failed[0].values
    return Report(check, claim, status_of(not failed), values, witness)


def measure_axioms(scene, seed: int = 0) -> list[Report]:
    grid = scene.grid
    family = standard_family(grid, seed)
    pairs = disjoint_pairs(family) + split_pairs(grid)
    opens = [a for a in family if a.is_open()]
    chains = open_chains(grid)
    out = []
    for name, m in scene.measures.items():
        out.append(_tag(check_additivity(m, pairs), name))
        out.append(_tag(check_complementation(m, family), name))
        out.append(_tag(check_monotonicity(m, family), name))
        out.append(_tag(_all_pass("regularity", "open values are attained by closed witnesses inside",
                                  [check_regularity(m, u) for u in opens]), name))
        out.append(_tag(_all_pass("chain_continuity", "values along increasing open chains converge upward",
                                  [check_chain_continuity(m, c) for c in chains]), name))
        out.append(_tag(dirac_characterization_check(m, open_pairs(grid, m.marked_points)), name))
    return out


def _monotone_pairs(functions):
    out = []
    for i, a in enumerate(functions):
        b = functions[(i + 1) % len(functions)]
        out.append((a, GridFunction(a.space, a.values + np.abs(b.values), f"{a.name}+|{b.name}|")))
    return out


def integral_props(scene, seed: int = 0) -> list[Report]:
    grid = scene.grid
    family = standard_family(grid, seed)
    named = list(scene.functions.values())
    funcs = named + sample_functions(grid, seed, 8)
    mono = _monotone_pairs(funcs)
    rng = np.random.default_rng(seed)
    out = []
    for name, m in scene.measures.items():
        simple = is_simple(m, family)
        cov = []
        lin = []
        mult = []
        cons = []
        for a in funcs:
            cov.append(change_of_variables_check(m, a, lambda t: t * t - t))
            cov.append(change_of_variables_check(m, a, math.sin))
            lin.append(quasi_linearity_check(m, a, lambda t: t * t, math.cos))
            cons.append(consistency_check(m, a, lambda t: t ** 3 + t))
            if simple:
                (phi, _), (psi, _) = POLYNOMIALS
                mult.append(multiplicativity_check(m, a, phi, psi, tol=0.0))
                mult.append(multiplicativity_check(m, a, math.exp, math.sin, tol=1e-9))
        out.append(_tag(_all_pass("change_of_variables", "integral of phi(a) is phi integrated against the distribution of a", cov), name))
        out.append(_tag(_all_pass("quasi_linearity", "linear on the algebra of each single function", lin), name))
        out.append(_tag(_all_pass("distribution_consistency", "distribution of phi(a) is the image of the distribution of a", cons), name))
        if simple:
            out.append(_tag(_all_pass("multiplicativity", "simple measures integrate products multiplicatively", mult), name))
        else:
            out.append(_tag(Report("multiplicativity", "simple measures integrate products multiplicatively",
                                   INCONCLUSIVE, {"reason": "measure is not simple on the family"}), name))
        out.append(_tag(monotonicity_check(m, mono), name))
        out.append(_tag(lipschitz_check(m, list(zip(funcs, funcs[1:]))), name))
        chain = [GridFunction(grid, funcs[0].values - 2.0 ** -k, f"a-2^-{k}") for k in range(1, 8)] + [funcs[0]]
        out.append(_tag(monotone_chain_check(m, chain), name))
    stairs = []
    for delta in (1.0, 0.1):
        for _ in range(10):
            i, j = rng.integers(len(funcs), size=2)
            a, b = mono[i] if i == j else (funcs[i], GridFunction(grid, funcs[i].values + np.abs(funcs[j].values)))
            d = staircase(a, b, delta)
            stairs.append(Report("staircase", "", status_of(d.holds()), d.residuals()))
    out.append(_all_pass("staircase", "clamped pieces sum back, stay dominated and satisfy the proof identity", stairs))
    return out


def _target_measures(scene, q):
    tgt = q.target
    if isinstance(tgt, DiscreteSpace):
        points = [Dirac(tgt, i) for i in range(tgt.size)]
        uniform = Mixture([Fraction(1, tgt.size)] * tgt.size, points)
        return [(f"dirac:{tgt.labels[0]}", points[0]), ("uniform", uniform)]
    return list(scene.measures.items())


def transform_axioms(scene, seed: int = 0) -> list[Report]:
    grid = scene.grid
    family = standard_family(grid, seed)
    pairs = disjoint_pairs(family) + split_pairs(grid)
    opens = [a for a in family if a.is_open()]
    chains = open_chains(grid)
    funcs = list(scene.functions.values())
    out = []
    for name, q in scene.transforms.items():
        out.append(_tag(check_axioms(q, pairs, opens), name))
        out.append(_tag(derived_properties_check(q, family, chains), name))
        cov = [change_of_variables_transform_check(q, mu, a)
               for _, mu in _target_measures(scene, q) for a in funcs]
        out.append(_tag(_all_pass("transform_change_of_variables",
                                  "integrating against a pulled-back measure is integrating the induced function", cov), name))
    names = list(scene.transforms)
    for pn in names:
        for qn in names:
            p, q = scene.transforms[pn], scene.transforms[qn]
            if q.target != p.source or pn == qn:
                continue
            measures = [mu for _, mu in _target_measures(scene, p)]
            out.append(_tag(composition_check(p, q, family[:20], funcs[:3], measures), f"{pn}*{qn}"))
    return out


def riesz(scene, seed: int = 0) -> list[Report]:
    opens = open_family(scene.grid, seed, 10)
    return [_tag(riesz_roundtrip_check(m, opens), name) for name, m in scene.measures.items()]


def factorization(scene, seed: int = 0) -> list[Report]:
    grid = scene.grid
    family = separating_family(grid, seed)
    points = dirac_sample(grid)
    simple = [(n, m) for n, m in scene.measures.items() if not isinstance(m, Dirac) and is_simple(m, family)]
    sample = FiniteStarSample(points.labels + tuple(n for n, _ in simple), points.members + tuple(m for _, m in simple))
    basis = sample_functions(grid, seed, 4)
    holdout = standard_family(grid, seed + 1)
    out = []
    for name, q in scene.transforms.items():
        if q.source != grid:
            continue
        try:
            fz = factorize(q, sample, family, holdout)
        except UncoveredPoint as e:
            # the finite sample of simple measures is too small, not q
            out.append(_tag(Report("factorization", "q is the preimage of its star map under w", INCONCLUSIVE,
                                   {"reason": f"sample misses a pullback: {e}"}), name))
        except InvariantViolation as e:
            out.append(_tag(Report("factorization", "q is the preimage of its star map under w", "fail",
                                   {"error": f"{type(e).__name__}: {e}"}), name))
            continue
        else:
            out.append(_tag(Report("factorization", "q is the preimage of its star map under w",
                                   status_of(fz.residual == 0),
                                   {"residual": fz.residual, "images": len(family), "holdout": len(holdout),
                                    "distinct_labels": len(set(fz.w.values()))}), name))
        try:
            rq, rep = reconstruct_from_homomorphism(functional_of(q), q.source, q.target, basis, pointwise=False)
        except (NotAQuasiHomomorphism, InvariantViolation) as e:
            out.append(_tag(Report("reconstruction", "r -> q -> r round trip", "fail",
                                   {"error": f"{type(e).__name__}: {e}"}), name))
            continue
        out.append(_tag(rep, name))
        bad = sum(rq(a) != q(a) for a in family)
        out.append(_tag(Report("reconstruction_images", "the rebuilt transformation agrees with q on the family",
                               status_of(bad == 0), {"images": len(family), "mismatches": bad}), name))
    return out


RUNNERS = {
    "measure-axioms": measure_axioms,
    "integral-props": integral_props,
    "transform-axioms": transform_axioms,
    "riesz": riesz,
    "factorization": factorization,
}


def run_suite(scene, suite: str, seed: int = 0) -> list[Report]:
    if suite == "all":
        return [r for s in SUITES for r in RUNNERS[s](scene, seed)]
    if suite not in RUNNERS:
        raise KeyError(f"unknown suite {suite!r}")
    return RUNNERS[suite](scene, seed)
