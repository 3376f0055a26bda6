"""Deterministic families of images, pairs, chains and functions used by the checks."""

from __future__ import annotations

import numpy as np

from .grid import CLOSED, OPEN, Grid, Image, erode
from .integral import GridFunction, builtin_function, is_grid_continuous, resolve_steps
from .shapes import blob, half_plane, half_ring, lens_pair, strip, template

TEMPLATE_NAMES = ("empty", "full", "center", "border_ring", "border_ring:2", "half_ring:left",
                  "half_ring:right", "half_ring:top", "half_ring:bottom", "strip:v", "strip:h",
                  "disk", "annulus", "interior")


def _dedupe(images):
    seen, out = set(), []
    for img in images:
        key = (img.kind, img.faces.tobytes())
        if key not in seen:
            seen.add(key)
            out.append(img)
    return out


def standard_family(grid: Grid, seed: int = 0, blobs: int = 12) -> list[Image]:
    """Templates in both kinds, separating half-planes and seeded blobs (at least 50 images for n >= 9)."""
    rng = np.random.default_rng(seed)
    out = []
    for kind in (CLOSED, OPEN):
        out.extend(template(grid, name, kind) for name in TEMPLATE_NAMES)
        for k in sorted({grid.n // 4, grid.n // 2, (3 * grid.n) // 4}):
            out.append(half_plane(grid, "row", k, kind))
            out.append(half_plane(grid, "col", k, kind))
    for i in range(blobs):
        out.append(blob(grid, rng, kind=(CLOSED, OPEN)[i % 2]))
    return _dedupe(out)


def open_family(grid: Grid, seed: int = 0, count: int = 10) -> list[Image]:
    """Thick open images: opened templates first, then blobs that survive two erosions.

    Thickness matters for subordinate plateaus, which vanish on the outer
    layer of cells; a one-cell ring has no room for one.
    """
    names = ("border_ring:3", "border_ring:5", "half_ring:left,3", "strip:v", "strip:h", "disk",
             "annulus", "interior", "full", "empty")
    out = [template(grid, name, OPEN) for name in names]
    rng = np.random.default_rng(seed)
    attempts = 0
    while len(out) < count and attempts < 100 * count:
        attempts += 1
        b = blob(grid, rng, kind=OPEN)
        if erode(b.mask, 2, grid).any():
            out.append(b)
    return out[:count]


def disjoint_pairs(family, limit: int | None = None) -> list[tuple[Image, Image]]:
    """Complement pairs for every member, then disjoint same-kind pairs from the family."""
    family = list(family)
    pairs = [(a, a.complement()) for a in family]
    for i, a in enumerate(family):
        for b in family[i + 1:]:
            if a.kind == b.kind and not a.is_empty() and not b.is_empty() and a.isdisjoint(b):
                if a.union(b) is not None:
                    pairs.append((a, b))
    return pairs[:limit] if limit else pairs


def split_pairs(grid: Grid) -> list[tuple[Image, Image]]:
    """Disjoint closed/open splittings of the grid along rows and columns."""
    out = []
    for axis in ("row", "col"):
        for k in range(0, grid.n - 1, max(1, grid.n // 6)):
            h = half_plane(grid, axis, k, CLOSED)
            out.append((h, h.complement()))
            if k + 2 < grid.n:
                far = Image(grid, ~half_plane(grid, axis, k + 1, CLOSED).mask, CLOSED)
                out.append((h, far))
    return out


def open_pairs(grid: Grid, marked=()) -> list[tuple[Image, Image]]:
    """Pairs of open sets for subadditivity.

    Arcs and lenses around marked points come first; the overlapping
    half-plane pairs after them tell every cell apart.
    """
    out = [(half_ring(grid, "left", 1, OPEN), half_ring(grid, "right", 1, OPEN)),
           (half_ring(grid, "top", 1, OPEN), half_ring(grid, "bottom", 1, OPEN))]
    marked = list(marked)
    for i, a in enumerate(marked):
        for b in marked[i + 1:]:
            out.append(lens_pair(grid, a, b, 1.0, OPEN))
    for axis in ("row", "col"):
        for k in range(1, grid.n - 1):
            out.append((half_plane(grid, axis, k, OPEN), Image(grid, ~half_plane(grid, axis, k - 1, CLOSED).mask, OPEN)))
    return out


def open_chains(grid: Grid) -> list[list[Image]]:
    """Increasing chains of open images."""
    widths = list(range(1, grid.n + 1, 2))
    chains = [[strip(grid, w, "vertical", OPEN) for w in widths]]
    chains.append([half_plane(grid, "col", k, OPEN) for k in range(grid.n)])
    return chains


def sample_functions(grid: Grid, seed: int = 0, count: int = 20) -> list[GridFunction]:
    """Builtins and seeded linear combinations of them.

    Combinations are snapped with :func:`resolve_steps` and kept only if
    grid-continuous, so exact identities are not spoiled by pixel artifacts.
    """
    names = ("pyramid", "plane_b", "pyramid+plane_b", "coords:x", "coords:y")
    base = [builtin_function(grid, name) for name in names]
    out = list(base)
    rng = np.random.default_rng(seed)
    for _ in range(200 * count):
        if len(out) >= count:
            break
        w = rng.integers(-3, 4, size=len(base))
        if not w.any():
            continue
        vals = sum(int(wi) * f.values for wi, f in zip(w, base))
        label = "+".join(f"{int(wi)}*{n}" for wi, n in zip(w, names) if wi)
        a = resolve_steps(GridFunction(grid, vals, label))
        if is_grid_continuous(a):
            out.append(a)
    return out[:count]


def separating_family(grid: Grid, seed: int = 0) -> list[Image]:
    """The standard family plus every row and column half-plane, which tell all cells apart."""
    out = standard_family(grid, seed)
    for axis in ("row", "col"):
        out.extend(half_plane(grid, axis, k, CLOSED) for k in range(grid.n - 1))
    return _dedupe(out)
