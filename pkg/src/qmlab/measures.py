"""Quasi-measures on grids: construction from solid-set rules, mixtures, pushforwards.

Values of solid-rule measures are exact :class:`~fractions.Fraction` objects.
A closed image is evaluated component by component: a connected closed set
``F`` gets ``1 - sum(rule(U))`` over the components ``U`` of its complement,
each of which must be solid.  An open image gets one minus the value of its
closed complement.
"""

from __future__ import annotations

from abc import ABC, abstractmethod
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from numbers import Real
from typing import Iterable, Sequence

import numpy as np

from .errors import InvariantViolation, MalformedPair, SpaceMismatch
from .grid import CLOSED, OPEN, Grid, Image, connected_components, count_components, erode
from .grid import default_geometry
from .grid import to_mask_text
from .reports import FAIL, INCONCLUSIVE, PASS, Report, status_of

TOL = 1e-12


class SolidRule(ABC):
    """A 0-1 valued set function on the solid cell sets of a grid."""

    grid: Grid

    @abstractmethod
    def __call__(self, mask: np.ndarray) -> int: ...

    @property
    def marked_points(self) -> tuple[int, ...]:
        return ()


@dataclass(frozen=True)
class AarnesRule(SolidRule):
    """Value 1 iff the set contains the border, or meets the border and holds the center."""

    grid: Grid

    def __call__(self, mask):
        border = self.grid.border
        if not np.any(border & ~mask):
            return 1
        return int(bool(np.any(border & mask)) and bool(mask[self.grid.center]))

    @property
    def marked_points(self):
        return (self.grid.center,)


@dataclass(frozen=True)
class ThreePointRule(SolidRule):
    """Value 1 iff the set holds at least two of three marked cells."""

    grid: Grid
    points: tuple[int, int, int]

    def __post_init__(self):
        if len(self.points) != 3 or len(set(self.points)) != 3:
            raise ValueError("three distinct marked cells are required")
        for p in self.points:
            self.grid.rowcol(p)

    def __call__(self, mask):
        return int(sum(bool(mask[p]) for p in self.points) >= 2)

    @property
    def marked_points(self):
        return tuple(self.points)


@dataclass(frozen=True)
class DiracRule(SolidRule):
    grid: Grid
    point: int

    def __call__(self, mask):
        return int(bool(mask[self.point]))

    @property
    def marked_points(self):
        return (self.point,)


def _as_fraction(v):
    if isinstance(v, Fraction):
        return v
    if isinstance(v, (int, np.integer)):
        return Fraction(int(v))
    if isinstance(v, str):
        return Fraction(v)
    return None


def is_exact_value(v) -> bool:
    return isinstance(v, (Fraction, int))


class QuasiMeasure(ABC):
    """Base class: a normalized, additive, regular set function on images."""

    space = None
    exact = True

    def __call__(self, image: Image):
        if image.space != self.space:
            raise SpaceMismatch(f"image lives on {image.space}, measure on {self.space}")
        value = self._value(image)
        if self.exact:
            if not 0 <= value <= 1:
                raise InvariantViolation(f"measure value {value} outside [0, 1]")
        elif not -TOL <= value <= 1 + TOL:
            raise InvariantViolation(f"measure value {value} outside [0, 1]")
        return value

    @abstractmethod
    def _value(self, image: Image): ...

    @property
    def marked_points(self) -> tuple[int, ...]:
        return ()


class FromSolidRule(QuasiMeasure):
    """The simple quasi-measure extending a solid-set rule to all images."""

    def __init__(self, rule: SolidRule, strict: bool = True, cache_size: int = 8192):
        grid = rule.grid
        if grid.n < 3:
            raise ValueError("grids need n >= 3")
        self.rule = rule
        self.space = grid
        self.strict = strict
        self._closed = lru_cache(maxsize=cache_size)(self._closed_from_bytes)

    @property
    def marked_points(self):
        return self.rule.marked_points

    def __repr__(self):
        return f"FromSolidRule({type(self.rule).__name__}, {self.space})"

    def _value(self, image):
        if image.kind == CLOSED:
            return self._closed(image.mask.tobytes())
        return 1 - self._closed((~image.mask).tobytes())

    def _closed_from_bytes(self, key: bytes) -> Fraction:
        grid = self.space
        mask = np.frombuffer(key, dtype=bool)
        closed_adj = grid.adjacency_for(CLOSED)
        open_adj = grid.adjacency_for(OPEN)
        total = 0
        for comp in connected_components(mask, grid, closed_adj):
            holes = connected_components(~comp, grid, open_adj)
            s = 0
            for hole in holes:
                if self.strict and len(holes) > 1 and count_components(~hole, grid, closed_adj) > 1:
                    raise InvariantViolation("a complement component of a connected closed set is not solid")
                s += self.rule(hole)
            piece = 1 - s
            if piece not in (0, 1):
                raise InvariantViolation(f"connected closed set received value {piece}")
            total += piece
        if total > 1:
            raise InvariantViolation(f"disjoint closed components add up to {total}")
        return Fraction(total)


class Dirac(QuasiMeasure):
    """Point mass; evaluated by membership (it is a genuine measure)."""

    def __init__(self, space, point: int):
        if not 0 <= point < space.size:
            raise IndexError(f"point {point} outside the space")
        self.space = space
        self.point = int(point)

    @property
    def marked_points(self):
        return (self.point,)

    def __repr__(self):
        return f"Dirac({self.point})"

    def _value(self, image):
        return Fraction(int(bool(image.mask[self.point])))


class Pushforward(QuasiMeasure):
    """The image of a quasi-measure under a cell map ``f`` from its grid to ``target``."""

    def __init__(self, inner: QuasiMeasure, cell_map, target):
        cell_map = np.asarray(cell_map, dtype=int).reshape(-1)
        if cell_map.size != inner.space.size:
            raise ValueError("cell map must send every source cell somewhere")
        if cell_map.min() < 0 or cell_map.max() >= target.size:
            raise IndexError("cell map leaves the target space")
        cell_map.setflags(write=False)
        self.inner = inner
        self.cell_map = cell_map
        self.space = target
        self.exact = inner.exact

    def preimage(self, image: Image) -> Image:
        return Image(self.inner.space, image.mask[self.cell_map], image.kind)

    def _value(self, image):
        return self.inner(self.preimage(image))


class Mixture(QuasiMeasure):
    """Convex combination of quasi-measures on one space."""

    def __init__(self, weights: Sequence, parts: Sequence[QuasiMeasure]):
        if len(weights) != len(parts) or not parts:
            raise ValueError("need one weight per part and at least one part")
        space = parts[0].space
        if any(p.space != space for p in parts):
            raise SpaceMismatch("mixture parts live on different spaces")
        fr = [_as_fraction(w) for w in weights]
        if all(f is not None for f in fr):
            ws = fr
            if sum(ws) != 1:
                raise ValueError(f"mixture weights sum to {sum(ws)}, not 1")
        else:
            ws = [float(w) for w in weights]
            if abs(sum(ws) - 1.0) > TOL:
                raise ValueError(f"mixture weights sum to {sum(ws)}, not 1")
        if any(w < 0 for w in ws):
            raise ValueError("mixture weights must be nonnegative")
        self.weights = tuple(ws)
        self.parts = tuple(parts)
        self.space = space
        self.exact = all(isinstance(w, Fraction) for w in ws) and all(p.exact for p in parts)

    @property
    def marked_points(self):
        pts = []
        for p in self.parts:
            pts.extend(q for q in p.marked_points if q not in pts)
        return tuple(pts)

    def _value(self, image):
        return sum((w * p(image) for w, p in zip(self.weights, self.parts)), Fraction(0) if self.exact else 0.0)


def aarnes(grid: Grid, **kw) -> FromSolidRule:
    return FromSolidRule(AarnesRule(grid), **kw)


def three_point(grid: Grid, points: Sequence[int] | None = None, **kw) -> FromSolidRule:
    if points is None:
        points = default_geometry(grid).marked
    return FromSolidRule(ThreePointRule(grid, tuple(int(p) for p in points)), **kw)


def dirac(space, point: int) -> Dirac:
    return Dirac(space, point)


def values_equal(x, y) -> bool:
    if is_exact_value(x) and is_exact_value(y):
        return x == y
    return abs(float(x) - float(y)) <= TOL


def is_simple(m: QuasiMeasure, family: Iterable[Image]) -> bool:
    """True iff ``m`` takes only the values 0 and 1 on ``family``."""
    return all(values_equal(v, 0) or values_equal(v, 1) for v in (m(a) for a in family))


def _mask_witness(**images: Image) -> dict:
    return {name: to_mask_text(img) for name, img in images.items()}


def check_additivity(m: QuasiMeasure, pairs: Iterable[tuple[Image, Image]]) -> Report:
    """Additivity on disjoint pairs whose union is again an image."""
    failures = []
    checked = 0
    worst = 0
    for a, b in pairs:
        if not a.isdisjoint(b):
            raise MalformedPair("pair overlaps")
        u = a.union(b)
        if u is None:
            raise MalformedPair("union of the pair is neither open nor closed")
        va, vb, vu = m(a), m(b), m(u)
        checked += 1
        gap = abs(vu - va - vb)
        worst = max(worst, gap)
        if not values_equal(vu, va + vb):
            failures.append((a, b, va, vb, vu))
    witness = None
    if failures:
        a, b, va, vb, vu = failures[0]
        witness = _mask_witness(A=a, B=b)
        witness["values"] = {"A": va, "B": vb, "union": vu}
    return Report(
        "additivity",
        "value of a disjoint union equals the sum of the values",
        status_of(not failures),
        {"pairs": checked, "failures": len(failures), "max_gap": worst},
        witness,
    )


def check_complementation(m: QuasiMeasure, family: Iterable[Image]) -> Report:
    failures = []
    checked = 0
    for a in family:
        checked += 1
        total = m(a) + m(a.complement())
        if not values_equal(total, 1):
            failures.append((a, total))
    witness = None
    if failures:
        witness = _mask_witness(A=failures[0][0])
        witness["sum"] = failures[0][1]
    return Report(
        "complementation",
        "value of an image plus value of its complement is one",
        status_of(not failures),
        {"images": checked, "failures": len(failures)},
        witness,
    )


def check_monotonicity(m: QuasiMeasure, family: Sequence[Image]) -> Report:
    family = list(family)
    vals = [m(a) for a in family]
    pairs = 0
    failures = []
    for i, a in enumerate(family):
        for j, b in enumerate(family):
            if i != j and a.issubset(b):
                pairs += 1
                if vals[i] > vals[j] and not values_equal(vals[i], vals[j]):
                    failures.append((a, b, vals[i], vals[j]))
    witness = None
    if failures:
        a, b, va, vb = failures[0]
        witness = _mask_witness(A=a, B=b)
        witness["values"] = {"A": va, "B": vb}
    return Report(
        "monotonicity",
        "a subset never has a larger value",
        status_of(not failures),
        {"nested_pairs": pairs, "failures": len(failures)},
        witness,
    )


def check_chain_continuity(m: QuasiMeasure, chain: Sequence[Image]) -> Report:
    """Along an increasing chain of open images the values increase to the last value."""
    chain = list(chain)
    vals = [m(u) for u in chain]
    nested = all(chain[i].issubset(chain[i + 1]) for i in range(len(chain) - 1))
    ok = nested and all(vals[i] <= vals[i + 1] or values_equal(vals[i], vals[i + 1]) for i in range(len(vals) - 1))
    return Report(
        "chain_continuity",
        "values along an increasing open chain are nondecreasing and end at the limit",
        status_of(ok and all(u.is_open() for u in chain)),
        {"values": vals, "nested": nested},
    )


def check_regularity(m: QuasiMeasure, u: Image, witness_depths: Sequence[int] = (0, 1, 2)) -> Report:
    """Compare the value of an open image with closed eroded witnesses inside it."""
    if not u.is_open():
        raise ValueError("regularity is checked on open images")
    grid = u.space
    target = m(u)
    best = None
    best_depth = None
    for d in witness_depths:
        if grid.is_discrete:
            k = Image(grid, u.mask, CLOSED)
        else:
            k = Image(grid, erode(u.mask, d, grid), CLOSED)
        v = m(k)
        if best is None or v > best:
            best, best_depth = v, d
    ok = best is not None and values_equal(best, target)
    return Report(
        "regularity",
        "value of an open image equals the largest value of a closed witness inside it",
        status_of(ok),
        {"open_value": target, "best_witness_value": best, "best_depth": best_depth},
        None if ok else _mask_witness(U=u),
    )


def dirac_characterization_check(m: QuasiMeasure, pair_family: Iterable[tuple[Image, Image]]) -> Report:
    """Either find open sets violating subadditivity, or recover the point carrying the mass.

    When ``m`` is subadditive on the family, the candidate point is the
    intersection of all closed sets of value one among the complements of the
    tested open sets.
    """
    pairs = list(pair_family)
    family = [img for pair in pairs for img in pair]
    if not is_simple(m, family):
        return Report("dirac_characterization", "a subadditive simple quasi-measure is a point mass",
                      INCONCLUSIVE, {"reason": "measure is not simple on the family"})
    closed_ones = []
    tested = 0
    for u, v in pairs:
        if not (u.is_open() and v.is_open()):
            raise ValueError("subadditivity is tested on open images")
        w = u.union(v)
        if w is None:
            continue
        tested += 1
        vu, vv, vw = m(u), m(v), m(w)
        if vw > vu + vv and not values_equal(vw, vu + vv):
            witness = _mask_witness(U=u, V=v)
            witness["values"] = {"U": vu, "V": vv, "union": vw}
            return Report("dirac_characterization", "a subadditive simple quasi-measure is a point mass",
                          PASS, {"subadditive": False, "pairs_tested": tested}, witness)
        for img in (u, v, w):
            f = img.complement()
            if values_equal(m(f), 1):
                closed_ones.append(f.mask)
    space = m.space
    candidate = np.ones(space.size, dtype=bool)
    for mask in closed_ones:
        candidate &= mask
    cells = np.flatnonzero(candidate)
    if cells.size == 0:
        raise InvariantViolation("closed sets of value one have empty intersection on a subadditive family")
    if cells.size > 1:
        return Report("dirac_characterization", "a subadditive simple quasi-measure is a point mass",
                      INCONCLUSIVE, {"subadditive": True, "pairs_tested": tested, "candidates": int(cells.size)})
    x = int(cells[0])
    if not values_equal(m(Image.from_cells(space, [x], CLOSED)), 1):
        raise InvariantViolation(f"candidate point {x} does not carry the mass")
    return Report("dirac_characterization", "a subadditive simple quasi-measure is a point mass",
                  PASS, {"subadditive": True, "pairs_tested": tested, "point": x})
