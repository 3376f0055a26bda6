"""Template images on a grid: rings, arcs, strips, disks, lenses and blobs."""

from __future__ import annotations

import numpy as np

from .grid import CLOSED, Grid, Image, connected_components

_OPPOSITE = {CLOSED: "open", "open": CLOSED}


def _ring_depth(grid: Grid) -> np.ndarray:
    r, c = np.divmod(np.arange(grid.size), grid.n)
    m = grid.n - 1
    return np.minimum(np.minimum(r, m - r), np.minimum(c, m - c))


def border_ring(grid: Grid, thickness: int = 1, kind: str = CLOSED) -> Image:
    return Image(grid, _ring_depth(grid) < thickness, kind)


def half_ring(grid: Grid, side: str = "left", thickness: int = 1, kind: str = CLOSED) -> Image:
    """Half of the border ring; the left and right halves share the middle column."""
    ring = _ring_depth(grid) < thickness
    r, c = np.divmod(np.arange(grid.size), grid.n)
    mid = (grid.n - 1) // 2
    sides = {"left": c <= mid, "right": c >= mid, "top": r <= mid, "bottom": r >= mid}
    if side not in sides:
        raise ValueError(f"unknown side {side!r}")
    return Image(grid, ring & sides[side], kind)


def strip(grid: Grid, width: int = 3, orientation: str = "vertical", kind: str = CLOSED) -> Image:
    """Band through the center cell spanning the grid from edge to edge."""
    r, c = np.divmod(np.arange(grid.size), grid.n)
    mid = (grid.n - 1) // 2
    half = width // 2
    coord = c if orientation == "vertical" else r
    return Image(grid, np.abs(coord - mid) <= half, kind)


def disk(grid: Grid, center=(0.3, 0.7), radius: float = 0.12, kind: str = CLOSED) -> Image:
    xs, ys = grid.sites
    return Image(grid, (xs - center[0]) ** 2 + (ys - center[1]) ** 2 <= radius**2, kind)


def annulus(grid: Grid, inner: float = 0.15, outer: float = 0.3, center=(0.5, 0.5), kind: str = CLOSED) -> Image:
    xs, ys = grid.sites
    d2 = (xs - center[0]) ** 2 + (ys - center[1]) ** 2
    return Image(grid, (d2 >= inner**2) & (d2 <= outer**2), kind)


def half_plane(grid: Grid, axis: str, k: int, kind: str = CLOSED) -> Image:
    """Rows (``axis='row'``) or columns (``axis='col'``) with index ``<= k``."""
    r, c = np.divmod(np.arange(grid.size), grid.n)
    coord = r if axis == "row" else c
    return Image(grid, coord <= k, kind)


def cell(grid: Grid, index: int, kind: str = CLOSED) -> Image:
    return Image.from_cells(grid, [index], kind)


def segment(grid: Grid, a: int, b: int, width: float = 1.0, kind: str = CLOSED) -> Image:
    """Cells whose sites lie within ``width`` lattice steps of the segment between two cells."""
    xs, ys = grid.sites
    ax, ay = grid.site(a)
    bx, by = grid.site(b)
    step = (grid.domain[2] - grid.domain[0]) / (grid.n - 1)
    dx, dy = bx - ax, by - ay
    length2 = dx * dx + dy * dy
    if length2 == 0:
        t = np.zeros_like(xs)
    else:
        t = np.clip(((xs - ax) * dx + (ys - ay) * dy) / length2, 0.0, 1.0)
    d2 = (xs - ax - t * dx) ** 2 + (ys - ay - t * dy) ** 2
    mask = d2 <= (width * step) ** 2 + 1e-12
    mask[[a, b]] = True
    return Image(grid, mask, kind)


def midpoint_cell(grid: Grid, a: int, b: int) -> int:
    ax, ay = grid.site(a)
    bx, by = grid.site(b)
    return grid.snap((ax + bx) / 2, (ay + by) / 2)


def lens_pair(grid: Grid, a: int, b: int, width: float = 1.0, kind: str = CLOSED) -> tuple[Image, Image]:
    """Two thick half-segments from ``a`` and from ``b`` that overlap at the midpoint."""
    m = midpoint_cell(grid, a, b)
    return segment(grid, a, m, width, kind), segment(grid, m, b, width, kind)


def solidify(mask, grid: Grid, kind: str = CLOSED) -> np.ndarray:
    """Keep the largest component and fill every complement component but the largest."""
    mask = np.asarray(mask, dtype=bool).reshape(-1).copy()
    parts = connected_components(mask, grid, grid.adjacency_for(kind))
    if not parts:
        return mask
    mask = max(parts, key=lambda p: int(p.sum()))
    holes = connected_components(~mask, grid, grid.adjacency_for(_OPPOSITE[kind]))
    if len(holes) > 1:
        keep = max(holes, key=lambda p: int(p.sum()))
        for h in holes:
            if h is not keep:
                mask |= h
    return mask


def blob(grid: Grid, rng: np.random.Generator, size: int | None = None, start: int | None = None,
         kind: str = CLOSED) -> Image:
    """Random solid set grown from a start cell by edge-neighbor accretion."""
    n = grid.n
    if size is None:
        size = int(rng.integers(1, max(2, grid.size // 6)))
    if start is None:
        start = int(rng.integers(grid.size))
    mask = np.zeros(grid.size, dtype=bool)
    mask[start] = True
    members = [start]
    size = min(size, grid.size)
    attempts = 0
    while len(members) < size and attempts < 50 * size:
        attempts += 1
        i = members[int(rng.integers(len(members)))]
        r, c = divmod(i, n)
        dr, dc = ((-1, 0), (1, 0), (0, -1), (0, 1))[int(rng.integers(4))]
        rr, cc = r + dr, c + dc
        if 0 <= rr < n and 0 <= cc < n:
            j = rr * n + cc
            if not mask[j]:
                mask[j] = True
                members.append(j)
    return Image(grid, solidify(mask, grid, kind), kind)


def template(grid: Grid, name: str, kind: str = CLOSED) -> Image:
    """Resolve a template name such as ``border_ring`` or ``half_ring:left``."""
    head, _, arg = name.partition(":")
    if head == "empty":
        return grid.empty(kind)
    if head == "full":
        return grid.full(kind)
    if head == "center":
        return cell(grid, grid.center, kind)
    if head == "border_ring":
        return border_ring(grid, int(arg or 1), kind)
    if head == "half_ring":
        side, _, thick = (arg or "left").partition(",")
        return half_ring(grid, side, int(thick or 1), kind)
    if head == "strip":
        orientation = {"v": "vertical", "h": "horizontal", "": "vertical"}.get(arg, arg)
        return strip(grid, max(1, grid.n // 8 * 2 + 1), orientation, kind)
    if head == "disk":
        return disk(grid, kind=kind)
    if head == "annulus":
        return annulus(grid, kind=kind)
    if head == "interior":
        return Image(grid, ~grid.border, kind)
    if head == "blob":
        seed = int(arg or 0)
        return blob(grid, np.random.default_rng(seed), kind=kind)
    raise ValueError(f"unknown template {name!r}")
