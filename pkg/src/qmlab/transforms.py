"""Image transformations between spaces, their adjoints and induced function maps."""

from __future__ import annotations

from abc import ABC, abstractmethod
from dataclasses import dataclass
from functools import cached_property
from typing import Callable, Iterable, Sequence

import numpy as np

from .errors import (InvariantViolation, NotAQuasiHomomorphism, SpaceMismatch,
                     UncoveredPoint)
from .grid import CLOSED, OPEN, DiscreteSpace, Grid, Image, erode, to_mask_text
from .integral import (CHANGE_OF_VARIABLES_TOL, GridFunction, integrate, simple_value,
                       sublevel)
from .measures import Dirac, Pushforward, QuasiMeasure, is_simple, values_equal
from .reports import Report, status_of


class ImageTransformation(ABC):
    """Maps images of ``source`` to images of ``target``."""

    source = None
    target = None

    def __call__(self, image: Image) -> Image:
        if image.space != self.source:
            raise SpaceMismatch(f"image lives on {image.space}, transformation starts on {self.source}")
        out = self._apply(image)
        if out.space != self.target:
            raise InvariantViolation("transformation produced an image on the wrong space")
        return out

    @abstractmethod
    def _apply(self, image: Image) -> Image: ...


def apply(q: ImageTransformation, a: Image) -> Image:
    return q(a)


class Preimage(ImageTransformation):
    """Preimage under a cell map ``f`` from ``target`` to ``source``.

    ``cell_map[y]`` is the source cell that target cell ``y`` is sent to.
    """

    def __init__(self, cell_map, source, target=None):
        target = source if target is None else target
        cell_map = np.asarray(cell_map, dtype=int).reshape(-1)
        if cell_map.size != target.size:
            raise ValueError("cell map needs one entry per target cell")
        if cell_map.min() < 0 or cell_map.max() >= source.size:
            raise IndexError("cell map leaves the source space")
        cell_map.setflags(write=False)
        self.cell_map = cell_map
        self.source = source
        self.target = target

    def _apply(self, image):
        return Image(self.target, image.mask[self.cell_map], image.kind)


class FromSimple(ImageTransformation):
    """Everything or nothing, according to a simple quasi-measure."""

    def __init__(self, sigma: QuasiMeasure, target):
        self.sigma = sigma
        self.source = sigma.space
        self.target = target

    def _apply(self, image):
        v = self.sigma(image)
        if values_equal(v, 1):
            return self.target.full(image.kind)
        if values_equal(v, 0):
            return self.target.empty(image.kind)
        raise InvariantViolation(f"simple quasi-measure returned {v}")


@dataclass(frozen=True)
class FiniteStarSample:
    """A finite labelled list of simple quasi-measures on one space."""

    labels: tuple[str, ...]
    members: tuple[QuasiMeasure, ...]

    def __post_init__(self):
        object.__setattr__(self, "labels", tuple(str(x) for x in self.labels))
        object.__setattr__(self, "members", tuple(self.members))
        if len(self.labels) != len(self.members) or not self.members:
            raise ValueError("need one label per member and at least one member")
        if len(set(self.labels)) != len(self.labels):
            raise ValueError("sample labels must be distinct")
        if any(m.space != self.members[0].space for m in self.members):
            raise SpaceMismatch("sample members live on different spaces")

    @property
    def space(self):
        return self.members[0].space

    def check(self, family: Iterable[Image]) -> bool:
        family = list(family)
        return all(is_simple(m, family) for m in self.members)

    @cached_property
    def _index(self) -> dict:
        return {label: i for i, label in enumerate(self.labels)}

    def __getitem__(self, label: str) -> QuasiMeasure:
        return self.members[self._index[label]]


def dirac_sample(space) -> FiniteStarSample:
    """Every point mass of a space, labelled by cell index."""
    return FiniteStarSample(tuple(str(i) for i in range(space.size)),
                            tuple(Dirac(space, i) for i in range(space.size)))


class StarRestricted(ImageTransformation):
    """Sends an image to the sample members that give it value one."""

    def __init__(self, sample: FiniteStarSample):
        self.sample = sample
        self.source = sample.space
        self.target = DiscreteSpace(sample.labels)

    def _apply(self, image):
        mask = np.zeros(self.target.size, dtype=bool)
        for i, sigma in enumerate(self.sample.members):
            v = sigma(image)
            if values_equal(v, 1):
                mask[i] = True
            elif not values_equal(v, 0):
                raise InvariantViolation(f"sample member {self.sample.labels[i]} returned {v}")
        return Image(self.target, mask, image.kind)


class Composite(ImageTransformation):
    """``second`` after ``first``."""

    def __init__(self, first: ImageTransformation, second: ImageTransformation):
        if first.target != second.source:
            raise SpaceMismatch("transformations are not composable")
        self.first = first
        self.second = second
        self.source = first.source
        self.target = second.target

    def _apply(self, image):
        return self.second(self.first(image))


class Vanishing(ImageTransformation):
    """Sends every image to the empty set.  Not an image transformation; used as a negative control."""

    def __init__(self, source, target=None):
        self.source = source
        self.target = source if target is None else target

    def _apply(self, image):
        return self.target.empty(image.kind)


def compose(p: ImageTransformation, q: ImageTransformation) -> Composite:
    """``p`` after ``q``; ``q.target`` must be ``p.source``."""
    return Composite(q, p)


def identity_map(grid: Grid) -> np.ndarray:
    return np.arange(grid.size)


def shift_map(grid: Grid, dr: int = 0, dc: int = 1) -> np.ndarray:
    """Translation clamped at the edges."""
    r, c = np.divmod(np.arange(grid.size), grid.n)
    r2 = np.clip(r + dr, 0, grid.n - 1)
    c2 = np.clip(c + dc, 0, grid.n - 1)
    return r2 * grid.n + c2


def fold_map(grid: Grid, axis: str = "col") -> np.ndarray:
    """Reflect the right (or bottom) half onto the other half."""
    r, c = np.divmod(np.arange(grid.size), grid.n)
    m = grid.n - 1
    if axis == "col":
        c = np.minimum(c, m - c)
    else:
        r = np.minimum(r, m - r)
    return r * grid.n + c


def cell_map_to_csv(cell_map) -> str:
    return "".join(f"{y},{x}\n" for y, x in enumerate(np.asarray(cell_map)))


def cell_map_from_csv(text: str, size: int) -> np.ndarray:
    out = np.full(size, -1, dtype=int)
    for line in text.strip().splitlines():
        if not line.strip():
            continue
        y, x = (int(v) for v in line.split(","))
        out[y] = x
    if (out < 0).any():
        raise ValueError("cell map CSV leaves target cells unmapped")
    return out


class Pullback(QuasiMeasure):
    """``mu`` after ``q``: a quasi-measure on the source of ``q``."""

    def __init__(self, q: ImageTransformation, mu: QuasiMeasure):
        if mu.space != q.target:
            raise SpaceMismatch("measure must live on the target of the transformation")
        self.q = q
        self.mu = mu
        self.space = q.source
        self.exact = mu.exact

    def _value(self, image):
        return self.mu(self.q(image))


def pullback(q: ImageTransformation, mu: QuasiMeasure) -> QuasiMeasure:
    if isinstance(q, Preimage):
        if mu.space != q.target:
            raise SpaceMismatch("measure must live on the target of the transformation")
        return Pushforward(mu, q.cell_map, q.source)
    return Pullback(q, mu)


def induced_function(q: ImageTransformation, a: GridFunction, method: str = "bisect") -> GridFunction:
    """The function ``y -> (pullback of the point mass at y)(a)`` on the target.

    ``method="pointwise"`` follows that definition literally.  ``"bisect"``
    runs the same binary search for all target points at once, applying ``q``
    once per distinct probe threshold.
    """
    if a.space != q.source:
        raise SpaceMismatch("function must live on the source of the transformation")
    target = q.target
    if method == "pointwise":
        vals = [simple_value(pullback(q, Dirac(target, y)), a) for y in range(target.size)]
        return GridFunction(target, vals, f"q({a.name})")
    if method != "bisect":
        raise ValueError(f"unknown method {method!r}")
    ts = np.unique(a.values)
    k = len(ts)
    cache: dict[int, np.ndarray] = {}

    def member(i):
        if i not in cache:
            img = q(sublevel(a, ts[i])) if i >= 0 else q(a.space.empty(CLOSED))
            cache[i] = img.mask
        return cache[i]

    if member(-1).any() or not member(k - 1).all():
        raise InvariantViolation("transformation does not preserve the empty set and the whole space")
    lo = np.full(target.size, -1)
    hi = np.full(target.size, k - 1)
    while True:
        active = hi - lo > 1
        if not active.any():
            break
        mid = (lo + hi) // 2
        for mv in np.unique(mid[active]):
            sel = active & (mid == mv)
            inside = member(int(mv))
            hi[sel & inside] = mv
            lo[sel & ~inside] = mv
    return GridFunction(target, ts[hi], f"q({a.name})")


def _witness(**images):
    return {k: to_mask_text(v) for k, v in images.items()}


def _inner_compact(img: Image) -> Image:
    space = img.space
    if space.is_discrete:
        return Image(space, img.mask, CLOSED)
    return Image(space, erode(img.mask, 1, space), CLOSED)


def check_axioms(q: ImageTransformation, disjoint_pairs: Iterable[tuple[Image, Image]],
                 open_sets: Iterable[Image], witness_depths: Sequence[int] = (0, 1, 2)) -> Report:
    """Whole space, openness, additivity and witness-based regularity."""
    src, tgt = q.source, q.target
    problems = []
    full_ok = q(src.full(CLOSED)) == tgt.full() and q(src.full(OPEN)) == tgt.full()
    if not full_ok:
        problems.append(("whole_space", {}))
    n_open = n_pairs = 0
    open_fail = add_fail = reg_fail = 0
    for u in open_sets:
        n_open += 1
        qu = q(u)
        if not qu.is_open():
            open_fail += 1
            problems.append(("openness", _witness(U=u)))
        k = _inner_compact(qu)
        if k.is_empty():
            continue
        found = False
        for d in witness_depths:
            lmask = u.mask if src.is_discrete else erode(u.mask, d, src)
            if k.issubset(q(Image(src, lmask, CLOSED))):
                found = True
                break
        if not found:
            reg_fail += 1
            problems.append(("regularity", _witness(U=u)))
    for a, b in disjoint_pairs:
        n_pairs += 1
        union = a.union(b)
        if union is None or not a.isdisjoint(b):
            raise ValueError("additivity pairs must be disjoint with an image as union")
        qa, qb, qu = q(a), q(b), q(union)
        if not (qa.isdisjoint(qb) and np.array_equal(qu.faces, qa.faces | qb.faces)):
            add_fail += 1
            problems.append(("additivity", _witness(A=a, B=b)))
    ok = not problems
    witness = None
    if problems:
        witness = {"axiom": problems[0][0], **problems[0][1]}
    return Report(
        "transform_axioms",
        "whole space to whole space, open to open, additive, compact-regular",
        status_of(ok),
        {"whole_space": full_ok, "open_sets": n_open, "openness_failures": open_fail,
         "pairs": n_pairs, "additivity_failures": add_fail, "regularity_failures": reg_fail},
        witness,
    )


def derived_properties_check(q: ImageTransformation, family: Sequence[Image],
                             chains: Sequence[Sequence[Image]] = ()) -> Report:
    """Complement commutation, monotonicity, disjointness and continuity along open chains."""
    family = list(family)
    images = [q(a) for a in family]
    comp_fail = mono_fail = disj_fail = chain_fail = 0
    first = None
    for a, qa in zip(family, images):
        if q(a.complement()) != qa.complement():
            comp_fail += 1
            first = first or ("complement", a, None)
    for i, a in enumerate(family):
        for j, b in enumerate(family):
            if i == j:
                continue
            if a.issubset(b) and not images[i].issubset(images[j]):
                mono_fail += 1
                first = first or ("monotone", a, b)
            if i < j and a.isdisjoint(b) and not images[i].isdisjoint(images[j]):
                disj_fail += 1
                first = first or ("disjoint", a, b)
    for chain in chains:
        outs = [q(u) for u in chain]
        if not all(outs[i].issubset(outs[i + 1]) for i in range(len(outs) - 1)) or outs[-1] != q(chain[-1]):
            chain_fail += 1
    total = comp_fail + mono_fail + disj_fail + chain_fail
    witness = None
    if first:
        kind, a, b = first
        witness = {"property": kind, **_witness(A=a, **({"B": b} if b is not None else {}))}
    return Report(
        "transform_derived_properties",
        "commutes with complements, monotone, preserves disjointness, continuous along open chains",
        status_of(total == 0),
        {"images": len(family), "complement_failures": comp_fail, "monotone_failures": mono_fail,
         "disjoint_failures": disj_fail, "chains": len(chains), "chain_failures": chain_fail},
        witness,
    )


def change_of_variables_transform_check(q: ImageTransformation, mu: QuasiMeasure, a: GridFunction) -> Report:
    """Integral of ``a`` against the pulled-back measure versus integral of ``q(a)`` against ``mu``."""
    lhs = integrate(pullback(q, mu), a)
    rhs = integrate(mu, induced_function(q, a))
    tol = 0.0 if mu.exact else CHANGE_OF_VARIABLES_TOL
    gap = abs(lhs - rhs)
    return Report("transform_change_of_variables",
                  "integral of a against the pulled-back measure equals integral of q(a)",
                  status_of(gap <= tol), {"lhs": lhs, "rhs": rhs, "discrepancy": gap, "tolerance": tol})


def composition_check(p: ImageTransformation, q: ImageTransformation, family: Sequence[Image],
                      functions: Sequence[GridFunction] = (), measures: Sequence[QuasiMeasure] = ()) -> Report:
    """Extensional identities for ``p`` after ``q``: images, induced functions and adjoints."""
    pq = compose(p, q)
    image_fail = sum(pq(a) != p(q(a)) for a in family)
    func_fail = 0
    for a in functions:
        lhs = induced_function(pq, a).values
        rhs = induced_function(p, induced_function(q, a)).values
        func_fail += not np.array_equal(lhs, rhs)
    adj_fail = 0
    for mu in measures:
        left = pullback(pq, mu)
        right = pullback(q, pullback(p, mu))
        adj_fail += sum(not values_equal(left(a), right(a)) for a in family)
    return Report("composition", "composite images, induced functions and adjoints compose",
                  status_of(image_fail + func_fail + adj_fail == 0),
                  {"image_failures": image_fail, "function_failures": func_fail, "adjoint_failures": adj_fail})


def point_labels(space) -> tuple[str, ...]:
    if space.is_discrete:
        return space.labels
    return tuple(str(i) for i in range(space.size))


@dataclass(frozen=True)
class Factorization:
    """Labelling ``w`` of target points by sample members, and how well it reproduces ``q``."""

    w: dict
    residual: int
    rows: tuple

    def to_dict(self) -> dict:
        return {"w": dict(self.w), "residual": self.residual, "rows": [list(r) for r in self.rows]}


def sample_table(sample: FiniteStarSample, family: Sequence[Image]) -> np.ndarray:
    """Boolean matrix: member ``i`` gives image ``j`` value one.  Point masses are read off the masks."""
    family = list(family)
    table = np.zeros((len(sample.members), len(family)), dtype=bool)
    dirac_rows = [i for i, m in enumerate(sample.members) if isinstance(m, Dirac)]
    if dirac_rows and family:
        points = np.array([sample.members[i].point for i in dirac_rows])
        masks = np.stack([a.mask for a in family], axis=1)
        table[dirac_rows] = masks[points]
    for i, sigma in enumerate(sample.members):
        if isinstance(sigma, Dirac):
            continue
        for j, a in enumerate(family):
            v = sigma(a)
            if values_equal(v, 1):
                table[i, j] = True
            elif not values_equal(v, 0):
                raise InvariantViolation(f"sample member {sample.labels[i]} is not simple")
    return table


def factorize(q: ImageTransformation, sample: FiniteStarSample, family: Sequence[Image],
              holdout: Sequence[Image] | None = None) -> Factorization:
    """Match each pulled-back point mass to a sample member, then re-derive ``q`` from the match.

    Matching is extensional on ``family``; a target point with no matching
    member raises :class:`UncoveredPoint`.  The residual counts cells where
    ``w`` and ``q`` disagree on ``holdout`` (default: ``family``).
    """
    family = list(family)
    if sample.space != q.source:
        raise SpaceMismatch("sample must live on the source of the transformation")
    table = sample_table(sample, family)
    signatures: dict[bytes, int] = {}
    for i in range(len(sample.members)):
        signatures.setdefault(np.packbits(table[i]).tobytes(), i)
    outputs = np.stack([q(a).mask for a in family], axis=1)
    labels = point_labels(q.target)
    chosen = np.empty(len(labels), dtype=int)
    for y, ylabel in enumerate(labels):
        key = np.packbits(outputs[y]).tobytes()
        if key not in signatures:
            raise UncoveredPoint(ylabel)
        chosen[y] = signatures[key]
    w = {yl: sample.labels[i] for yl, i in zip(labels, chosen)}
    check = family if holdout is None else list(holdout)
    used = np.unique(chosen)
    sub = FiniteStarSample(tuple(sample.labels[i] for i in used), tuple(sample.members[i] for i in used))
    row_of = {int(i): k for k, i in enumerate(used)}
    held = sample_table(sub, check)
    rebuilt = held[[row_of[int(i)] for i in chosen]]
    rows = []
    residual = 0
    for j, a in enumerate(check):
        bad = int(np.sum(rebuilt[:, j] != q(a).mask))
        residual += bad
        rows.append((a.kind, a.count, bad))
    return Factorization(w, residual, tuple(rows))


class Reconstructed(ImageTransformation):
    """Image transformation rebuilt from a functional ``r(a)(y)``.

    An open image goes to the points where ``r`` is positive on some function
    below it; closed images go to complements.
    """

    def __init__(self, r: Callable[[GridFunction], np.ndarray], source, target,
                 basis: Sequence[GridFunction] = ()):
        self.r = r
        self.source = source
        self.target = target
        self.basis = tuple(basis)

    def _below(self, u: Image) -> list[GridFunction]:
        ind = u.mask.astype(float)
        out = [GridFunction(self.source, ind, "indicator")]
        for b in self.basis:
            lo, hi = b.values.min(), b.values.max()
            if hi > lo:
                out.append(GridFunction(self.source, ind * (b.values - lo) / (hi - lo), f"{b.name}|U"))
        return out

    def _apply(self, image):
        if image.kind == OPEN:
            mask = np.zeros(self.target.size, dtype=bool)
            for k in self._below(image):
                mask |= np.asarray(self.r(k)) > 0
            return Image(self.target, mask, OPEN)
        return self._apply(image.complement()).complement()


def _vectorize(r, target):
    def rv(a):
        return np.array([float(r(a, y)) for y in range(target.size)])
    return rv


def functional_of(q: ImageTransformation) -> Callable[[GridFunction], np.ndarray]:
    """The vectorized functional ``a -> q(a)`` of an existing transformation."""
    return lambda a: induced_function(q, a).values


def reconstruct_from_homomorphism(r: Callable, source, target, basis: Sequence[GridFunction],
                                  tol: float = CHANGE_OF_VARIABLES_TOL, pointwise: bool = True):
    """Build the image transformation of a pointwise simple functional and check the round trip.

    ``r(a, y)`` returns a real number; with ``pointwise=False`` it is called
    as ``r(a)`` and returns one value per target point.
    """
    rv = _vectorize(r, target) if pointwise else (lambda a: np.asarray(r(a), dtype=float))
    one = rv(GridFunction.constant(source, 1.0))
    if not np.allclose(one, 1.0, atol=tol, rtol=0):
        raise NotAQuasiHomomorphism("r does not send the constant 1 to the constant 1")
    for a in basis:
        ra = rv(a)
        sq = rv(a * a)
        cube = rv(a * a * a)
        if not (np.allclose(sq, ra * ra, atol=tol, rtol=0) and np.allclose(cube, ra * sq, atol=tol, rtol=0)):
            raise NotAQuasiHomomorphism(f"r is not multiplicative on functions of {a.name}")
    q = Reconstructed(rv, source, target, basis)
    worst = 0.0
    for a in basis:
        worst = max(worst, float(np.max(np.abs(induced_function(q, a).values - rv(a)))))
    report = Report("reconstruction", "a quasi-homomorphism is integration against a unique image transformation",
                    status_of(worst <= tol), {"basis": len(basis), "max_discrepancy": worst})
    return q, report
