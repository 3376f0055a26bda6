"""Finite cell-grid model of a rectangle with dual digital connectivity.

A :class:`Grid` splits the domain rectangle into ``n x n`` cells.  An
:class:`Image` is a set of cells tagged open or closed.  Point-set semantics
are exact: a closed image is the union of its closed cells, an open image is
the relative interior of the union of its closed cells.  Both are represented
on the face lattice of the cubical complex (cells, edges and vertices), so
containment, disjointness and unions of images are computed without any
approximation.

Connectivity follows the point-set picture.  Closed cell sets are connected
through shared corners (region adjacency, 8 by default) and open cell sets
only through shared edges (complement adjacency, 4 by default).  The pair can
be swapped to ``4/8``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Sequence

import numpy as np
from scipy import ndimage

OPEN = "open"
CLOSED = "closed"
KINDS = (OPEN, CLOSED)

ADJACENCIES = {"8/4": (8, 4), "4/8": (4, 8)}

_STRUCTURE = {
    4: ndimage.generate_binary_structure(2, 1),
    8: ndimage.generate_binary_structure(2, 2),
}


def _flip(kind: str) -> str:
    return CLOSED if kind == OPEN else OPEN


def _check_kind(kind: str) -> str:
    if kind not in KINDS:
        raise ValueError(f"kind must be 'open' or 'closed', got {kind!r}")
    return kind


@dataclass(frozen=True)
class Grid:
    """An ``n x n`` cell grid over an axis-aligned rectangle.

    Cell ``(r, c)`` has flat index ``r * n + c``; row 0 is the top row.  The
    cell sites sit on a uniform lattice that includes the boundary, so the
    outermost ring of cells samples the border of the rectangle and, with
    ``n`` odd, the middle cell samples its center exactly.
    """

    n: int
    adjacency: str = "8/4"
    domain: tuple[float, float, float, float] = (0.0, 0.0, 1.0, 1.0)

    def __post_init__(self):
        if isinstance(self.n, bool) or not isinstance(self.n, (int, np.integer)):
            raise ValueError(f"n must be an integer, got {self.n!r}")
        if self.n < 3 or self.n % 2 == 0:
            raise ValueError(f"n must be an odd integer >= 3, got {self.n}")
        if self.adjacency not in ADJACENCIES:
            raise ValueError(f"adjacency must be one of {sorted(ADJACENCIES)}, got {self.adjacency!r}")
        x0, y0, x1, y1 = self.domain
        if not (x1 > x0 and y1 > y0):
            raise ValueError(f"degenerate domain {self.domain}")
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "domain", tuple(float(v) for v in self.domain))

    is_discrete = False

    @property
    def size(self) -> int:
        return self.n * self.n

    @property
    def shape(self) -> tuple[int, int]:
        return (self.n, self.n)

    @property
    def region_adjacency(self) -> int:
        return ADJACENCIES[self.adjacency][0]

    @property
    def complement_adjacency(self) -> int:
        return ADJACENCIES[self.adjacency][1]

    def adjacency_for(self, kind: str) -> int:
        """Adjacency used to decide connectedness of an image of this kind."""
        return self.region_adjacency if _check_kind(kind) == CLOSED else self.complement_adjacency

    def index(self, r: int, c: int) -> int:
        if not (0 <= r < self.n and 0 <= c < self.n):
            raise IndexError(f"cell ({r}, {c}) outside a {self.n}x{self.n} grid")
        return r * self.n + c

    def rowcol(self, i: int) -> tuple[int, int]:
        if not 0 <= i < self.size:
            raise IndexError(f"cell index {i} outside a grid of {self.size} cells")
        return divmod(int(i), self.n)

    @cached_property
    def center(self) -> int:
        m = (self.n - 1) // 2
        return self.index(m, m)

    @cached_property
    def border(self) -> np.ndarray:
        m = np.zeros(self.shape, dtype=bool)
        m[0, :] = m[-1, :] = m[:, 0] = m[:, -1] = True
        m = m.reshape(-1)
        m.setflags(write=False)
        return m

    @cached_property
    def sites(self) -> tuple[np.ndarray, np.ndarray]:
        """Flat arrays of the x and y coordinates of every cell site."""
        x0, y0, x1, y1 = self.domain
        m = self.n - 1
        r, c = np.divmod(np.arange(self.size), self.n)
        xs = x0 + (x1 - x0) * c / m
        ys = y0 + (y1 - y0) * (m - r) / m
        xs.setflags(write=False)
        ys.setflags(write=False)
        return xs, ys

    def site(self, i: int) -> tuple[float, float]:
        xs, ys = self.sites
        return float(xs[i]), float(ys[i])

    def snap(self, x: float, y: float) -> int:
        """Index of the cell containing ``(x, y)``; ties go to the lower-left cell."""
        x0, y0, x1, y1 = self.domain
        if not (x0 <= x <= x1 and y0 <= y <= y1):
            raise ValueError(f"point ({x}, {y}) outside the domain {self.domain}")
        m = self.n - 1
        u = (x - x0) / (x1 - x0) * m
        v = (y - y0) / (y1 - y0) * m
        c = min(max(math.ceil(u - 0.5), 0), m)
        j = min(max(math.ceil(v - 0.5), 0), m)
        return self.index(m - j, c)

    def full(self, kind: str = CLOSED) -> "Image":
        return Image(self, np.ones(self.size, dtype=bool), kind)

    def empty(self, kind: str = CLOSED) -> "Image":
        return Image(self, np.zeros(self.size, dtype=bool), kind)

    def __str__(self) -> str:
        return f"n={self.n}, adjacency={self.adjacency}"

    @classmethod
    def parse(cls, text: str) -> "Grid":
        """Inverse of ``str(grid)``: ``"n=65, adjacency=8/4"``."""
        fields = {}
        for part in text.split(","):
            if not part.strip():
                continue
            key, sep, value = part.partition("=")
            if not sep:
                raise ValueError(f"cannot parse grid spec {text!r}")
            fields[key.strip()] = value.strip()
        if "n" not in fields:
            raise ValueError(f"grid spec {text!r} has no n")
        return cls(int(fields["n"]), fields.get("adjacency", "8/4"))


@dataclass(frozen=True)
class DiscreteSpace:
    """A finite space in which every subset is clopen.

    Used as the target of transformations built from simple quasi-measures.
    """

    labels: tuple[str, ...]

    def __post_init__(self):
        labels = tuple(str(v) for v in self.labels)
        if not labels:
            raise ValueError("a discrete space needs at least one point")
        if len(set(labels)) != len(labels):
            raise ValueError("labels of a discrete space must be distinct")
        object.__setattr__(self, "labels", labels)

    is_discrete = True

    @property
    def size(self) -> int:
        return len(self.labels)

    def index(self, label: str) -> int:
        return self.labels.index(label)

    def full(self, kind: str = CLOSED) -> "Image":
        return Image(self, np.ones(self.size, dtype=bool), kind)

    def empty(self, kind: str = CLOSED) -> "Image":
        return Image(self, np.zeros(self.size, dtype=bool), kind)

    def __str__(self) -> str:
        return f"discrete({', '.join(self.labels)})"


Space = Grid | DiscreteSpace


def _closed_faces(grid: Grid, mask: np.ndarray) -> np.ndarray:
    n = grid.n
    up = np.zeros((2 * n + 1, 2 * n + 1), dtype=bool)
    up[1::2, 1::2] = mask.reshape(n, n)
    return ndimage.binary_dilation(up, structure=_STRUCTURE[8]).reshape(-1)


def _faces(space: Space, mask: np.ndarray, kind: str) -> np.ndarray:
    if space.is_discrete:
        return mask
    if kind == CLOSED:
        return _closed_faces(space, mask)
    return ~_closed_faces(space, ~mask)


class Image:
    """A cell set of a space, tagged open or closed.

    Equality is point-set equality: the empty set and the whole space are
    equal whatever their tag, and on a discrete space the tag never matters.
    """

    __slots__ = ("space", "mask", "kind", "_faces")

    def __init__(self, space: Space, mask, kind: str = CLOSED):
        mask = np.array(mask, dtype=bool).reshape(-1)
        if mask.size != space.size:
            raise ValueError(f"mask has {mask.size} cells, space has {space.size}")
        mask.setflags(write=False)
        self.space = space
        self.mask = mask
        self.kind = _check_kind(kind)
        self._faces = None

    @classmethod
    def from_cells(cls, space: Space, cells: Sequence[int], kind: str = CLOSED) -> "Image":
        mask = np.zeros(space.size, dtype=bool)
        cells = list(cells)
        if cells:
            idx = np.asarray(cells, dtype=int)
            if idx.min() < 0 or idx.max() >= space.size:
                raise IndexError("cell index out of bounds")
            mask[idx] = True
        return cls(space, mask, kind)

    @property
    def faces(self) -> np.ndarray:
        if self._faces is None:
            f = _faces(self.space, self.mask, self.kind)
            f.setflags(write=False)
            self._faces = f
        return self._faces

    @property
    def cells(self) -> np.ndarray:
        return np.flatnonzero(self.mask)

    @property
    def count(self) -> int:
        return int(self.mask.sum())

    def is_empty(self) -> bool:
        return not self.mask.any()

    def is_full(self) -> bool:
        return bool(self.mask.all())

    def complement(self) -> "Image":
        return Image(self.space, ~self.mask, _flip(self.kind))

    def with_kind(self, kind: str) -> "Image":
        return Image(self.space, self.mask, kind)

    def is_open(self) -> bool:
        if self.space.is_discrete or self.kind == OPEN:
            return True
        return bool(np.array_equal(self.faces, _faces(self.space, self.mask, OPEN)))

    def is_closed(self) -> bool:
        if self.space.is_discrete or self.kind == CLOSED:
            return True
        return bool(np.array_equal(self.faces, _faces(self.space, self.mask, CLOSED)))

    def _same_space(self, other: "Image") -> None:
        if other.space != self.space:
            raise ValueError("images live on different spaces")

    def issubset(self, other: "Image") -> bool:
        self._same_space(other)
        return not np.any(self.faces & ~other.faces)

    def isdisjoint(self, other: "Image") -> bool:
        self._same_space(other)
        return not np.any(self.faces & other.faces)

    def union(self, other: "Image") -> "Image | None":
        """Point-set union, or ``None`` when it is neither open nor closed."""
        self._same_space(other)
        return image_from_faces(self.space, self.faces | other.faces)

    def intersection(self, other: "Image") -> "Image | None":
        self._same_space(other)
        return image_from_faces(self.space, self.faces & other.faces)

    def __eq__(self, other):
        if not isinstance(other, Image):
            return NotImplemented
        return self.space == other.space and bool(np.array_equal(self.faces, other.faces))

    def __hash__(self):
        return hash((self.space, self.faces.tobytes()))

    def __repr__(self):
        return f"Image({self.space}, {self.count} cells, {self.kind})"


def image_from_faces(space: Space, faces: np.ndarray) -> Image | None:
    """The image whose point set is ``faces``, or ``None`` if there is none."""
    if space.is_discrete:
        return Image(space, faces, CLOSED)
    n = space.n
    cells = faces.reshape(2 * n + 1, 2 * n + 1)[1::2, 1::2].reshape(-1)
    if np.array_equal(_faces(space, cells, CLOSED), faces):
        return Image(space, cells, CLOSED)
    if np.array_equal(_faces(space, cells, OPEN), faces):
        return Image(space, cells, OPEN)
    return None


def connected_components(mask, grid: Grid, adjacency: int | None = None) -> list[np.ndarray]:
    """Maximal connected pieces of a cell set, ordered by their first cell."""
    adjacency = adjacency or grid.region_adjacency
    m = np.asarray(mask, dtype=bool).reshape(grid.shape)
    labels, count = ndimage.label(m, structure=_STRUCTURE[adjacency])
    flat = labels.reshape(-1)
    return [flat == k for k in range(1, count + 1)]


def count_components(mask, grid: Grid, adjacency: int) -> int:
    m = np.asarray(mask, dtype=bool).reshape(grid.shape)
    return int(ndimage.label(m, structure=_STRUCTURE[adjacency])[1])


def is_solid(image: Image) -> bool:
    """True when the image and its complement are both connected.

    The empty set and the whole grid count as solid.
    """
    grid = image.space
    if grid.is_discrete:
        raise ValueError("solidity is defined on grids only")
    inside = count_components(image.mask, grid, grid.adjacency_for(image.kind))
    outside = count_components(~image.mask, grid, grid.adjacency_for(_flip(image.kind)))
    return inside <= 1 and outside <= 1


def erode(mask, steps: int, grid: Grid, adjacency: int = 8, edge: str = "inside") -> np.ndarray:
    """Drop every cell within ``steps`` adjacency hops of the complement.

    With ``edge="inside"`` (the default) cells beyond the grid do not count
    as complement, so the border of the domain is never eroded away on its
    own; this is erosion relative to the space.  ``edge="outside"`` treats
    them as complement, so the full grid erodes to its interior.
    """
    if steps < 0:
        raise ValueError("steps must be nonnegative")
    if edge not in ("inside", "outside"):
        raise ValueError(f"edge must be 'inside' or 'outside', got {edge!r}")
    m = np.asarray(mask, dtype=bool).reshape(grid.shape)
    if steps and m.any():
        m = ndimage.binary_erosion(m, structure=_STRUCTURE[adjacency], iterations=steps,
                                   border_value=int(edge == "inside"))
    return m.reshape(-1).copy()


def erosion_depth(mask, grid: Grid, adjacency: int = 8) -> np.ndarray:
    """Per cell, the largest ``d`` with the cell in ``erode(mask, d)``; -1 outside."""
    m = np.asarray(mask, dtype=bool).reshape(-1)
    depth = np.where(m, 0, -1)
    current = m
    d = 0
    while current.any() and d < grid.n:
        d += 1
        current = erode(current, 1, grid, adjacency)
        depth[current] = d
        if current.all():
            depth[current] = grid.n
            break
    return depth


@dataclass(frozen=True)
class DistinguishedGeometry:
    """Border ring, center cell and optional marked points of a grid."""

    grid: Grid
    marked: tuple[int, ...] = ()

    def __post_init__(self):
        for i in self.marked:
            self.grid.rowcol(i)

    @property
    def border(self) -> np.ndarray:
        return self.grid.border

    @property
    def center(self) -> int:
        return self.grid.center

    def check(self) -> None:
        g = self.grid
        ring = Image(g, g.border, CLOSED)
        if not is_solid(ring):
            raise AssertionError("border ring is not solid")
        if g.border[g.center]:
            raise AssertionError("center lies on the border")


DEFAULT_MARKED = ((0.25, 0.25), (0.75, 0.25), (0.5, 0.75))


def default_geometry(grid: Grid) -> DistinguishedGeometry:
    marked = tuple(grid.snap(x, y) for x, y in DEFAULT_MARKED)
    return DistinguishedGeometry(grid, marked)


def to_mask_text(image: Image) -> str:
    """ASCII mask: a ``kind:`` header then one line of 0/1 per row."""
    space = image.space
    bits = image.mask.astype(int)
    if space.is_discrete:
        rows = ["".join(map(str, bits))]
    else:
        rows = ["".join(map(str, row)) for row in bits.reshape(space.shape)]
    return "\n".join([f"kind: {image.kind}", *rows]) + "\n"


def from_mask_text(text: str, grid: Grid | None = None) -> Image:
    lines = [ln.strip() for ln in text.strip().splitlines() if ln.strip()]
    if not lines or not lines[0].startswith("kind:"):
        raise ValueError("mask text must start with a 'kind: open|closed' header")
    kind = lines[0].split(":", 1)[1].strip()
    rows = lines[1:]
    if any(set(row) - {"0", "1"} for row in rows):
        raise ValueError("mask rows may only contain 0 and 1")
    if grid is None:
        grid = Grid(len(rows))
    if len(rows) != grid.n or any(len(row) != grid.n for row in rows):
        raise ValueError(f"mask is not {grid.n}x{grid.n}")
    mask = np.array([[ch == "1" for ch in row] for row in rows], dtype=bool)
    return Image(grid, mask, kind)
