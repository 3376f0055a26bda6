"""Scene files: a grid with named images, functions, measures and transformations."""

from __future__ import annotations

import copy
import json
from dataclasses import dataclass, field
from pathlib import Path

from .errors import SceneError
from .grid import CLOSED, DEFAULT_MARKED, KINDS, DistinguishedGeometry, Grid, from_mask_text
from .integral import GridFunction, builtin_function
from .measures import FromSolidRule, Mixture, QuasiMeasure, ThreePointRule, aarnes, dirac
from .shapes import segment, template
from .transforms import (Composite, FiniteStarSample, FromSimple, Preimage, StarRestricted, Vanishing,
                         cell_map_from_csv, fold_map, identity_map, shift_map)

SECTIONS = ("grid", "images", "functions", "measures", "transforms")

DEFAULT_SCENE = {
    "grid": {"n": 65, "adjacency": "8/4", "marked": [list(p) for p in DEFAULT_MARKED]},
    "images": {
        "border_ring": {"template": "border_ring"},
        "empty": {"template": "empty"},
        "center": {"template": "center"},
        "strip": {"template": "strip:v"},
        "off_center_disk": {"template": "disk"},
        "annulus": {"template": "annulus"},
        "half_ring_left": {"template": "half_ring:left"},
        "half_ring_right": {"template": "half_ring:right"},
        "open_half_ring_left": {"template": "half_ring:left", "kind": "open"},
        "open_half_ring_right": {"template": "half_ring:right", "kind": "open"},
        "lens_pq": {"segment": [0, 1], "width": 1},
        "blob": {"template": "blob:3"},
    },
    "functions": {
        "pyramid": {"builtin": "pyramid"},
        "plane_b": {"builtin": "plane_b"},
        "pyramid_plus_plane": {"builtin": "pyramid+plane_b"},
        "constant:0.5": {"builtin": "constant:0.5"},
        "coords_x": {"builtin": "coords:x"},
    },
    "measures": {
        "aarnes": {"type": "aarnes"},
        "three_point": {"type": "three_point"},
        "dirac:center": {"type": "dirac", "point": [0.5, 0.5]},
        "half_half": {"type": "mixture", "weights": ["1/2", "1/2"], "parts": ["aarnes", "three_point"]},
    },
    "transforms": {
        "shift": {"type": "preimage", "map": "shift", "dc": 1},
        "fold": {"type": "preimage", "map": "fold"},
        "from_aarnes": {"type": "from_simple", "measure": "aarnes"},
        "star4": {"type": "star", "sample": ["aarnes", "three_point", "dirac:center", "dirac:corner"]},
    },
}


@dataclass
class Scene:
    grid: Grid
    geometry: DistinguishedGeometry
    images: dict = field(default_factory=dict)
    functions: dict = field(default_factory=dict)
    measures: dict = field(default_factory=dict)
    transforms: dict = field(default_factory=dict)

    def image(self, name: str):
        if name in self.images:
            return self.images[name]
        try:
            return template(self.grid, name)
        except ValueError:
            raise SceneError(f"unknown image {name!r}") from None

    def function(self, name: str) -> GridFunction:
        if name in self.functions:
            return self.functions[name]
        try:
            return builtin_function(self.grid, name)
        except (ValueError, ZeroDivisionError):
            raise SceneError(f"unknown function {name!r}") from None

    def measure(self, name: str) -> QuasiMeasure:
        if name in self.measures:
            return self.measures[name]
        raise SceneError(f"unknown measure {name!r}")

    def transform(self, name: str):
        if name in self.transforms:
            return self.transforms[name]
        raise SceneError(f"unknown transformation {name!r}")


def _reject_duplicates(pairs):
    out = {}
    for key, value in pairs:
        if key in out:
            raise SceneError(f"duplicate name {key!r}")
        out[key] = value
    return out


def _point(grid: Grid, spec) -> int:
    if isinstance(spec, str):
        named = {"center": grid.center, "corner": 0}
        if spec not in named:
            raise SceneError(f"unknown point {spec!r}")
        return named[spec]
    if isinstance(spec, int):
        grid.rowcol(spec)
        return spec
    x, y = spec
    return grid.snap(float(x), float(y))


def _read(base: Path | None, name: str) -> str:
    path = Path(name) if base is None else base / name
    return path.read_text()


def _image(scene: Scene, name: str, spec: dict, base):
    kind = spec.get("kind", CLOSED)
    if kind not in KINDS:
        raise SceneError(f"image {name!r}: bad kind {kind!r}")
    grid = scene.grid
    if "template" in spec:
        return template(grid, spec["template"], kind)
    if "mask" in spec or "mask_file" in spec:
        text = spec["mask"] if "mask" in spec else _read(base, spec["mask_file"])
        return from_mask_text(text, grid)
    if "segment" in spec:
        i, j = spec["segment"]
        marked = scene.geometry.marked
        return segment(grid, marked[i], marked[j], float(spec.get("width", 1)), kind)
    raise SceneError(f"image {name!r} needs a template, mask, mask_file or segment")


def _function(scene: Scene, name: str, spec: dict, base):
    if "builtin" in spec:
        return builtin_function(scene.grid, spec["builtin"])
    if "csv" in spec:
        return GridFunction.from_csv(_read(base, spec["csv"]), scene.grid, name)
    raise SceneError(f"function {name!r} needs a builtin or csv")


def _measure(scene: Scene, name: str, spec: dict):
    grid = scene.grid
    kind = spec.get("type")
    if kind == "aarnes":
        return aarnes(grid)
    if kind == "three_point":
        pts = spec.get("points")
        points = scene.geometry.marked if pts is None else tuple(_point(grid, p) for p in pts)
        return FromSolidRule(ThreePointRule(grid, tuple(points)))
    if kind == "dirac":
        return dirac(grid, _point(grid, spec.get("point", "center")))
    if kind == "mixture":
        try:
            parts = [scene.measures[p] for p in spec["parts"]]
        except KeyError as e:
            raise SceneError(f"mixture {name!r} refers to unknown measure {e.args[0]!r}") from None
        return Mixture(spec["weights"], parts)
    raise SceneError(f"measure {name!r} has unknown type {kind!r}")


def _sample_member(scene: Scene, name: str):
    if name in scene.measures:
        return scene.measures[name]
    head, _, arg = name.partition(":")
    if head == "dirac" and arg:
        return dirac(scene.grid, _point(scene.grid, arg))
    raise SceneError(f"unknown sample member {name!r}")


def _transform(scene: Scene, name: str, spec: dict, base):
    grid = scene.grid
    kind = spec.get("type")
    if kind == "preimage":
        which = spec.get("map", "identity")
        if which == "shift":
            cmap = shift_map(grid, int(spec.get("dr", 0)), int(spec.get("dc", 1)))
        elif which == "fold":
            cmap = fold_map(grid, spec.get("axis", "col"))
        elif which == "identity":
            cmap = identity_map(grid)
        elif isinstance(which, dict) and "csv" in which:
            cmap = cell_map_from_csv(_read(base, which["csv"]), grid.size)
        else:
            raise SceneError(f"transformation {name!r}: unknown map {which!r}")
        return Preimage(cmap, grid)
    if kind == "from_simple":
        return FromSimple(scene.measure(spec["measure"]), grid)
    if kind == "star":
        labels = list(spec["sample"])
        return StarRestricted(FiniteStarSample(tuple(labels), tuple(_sample_member(scene, s) for s in labels)))
    if kind == "vanishing":
        return Vanishing(grid)
    if kind == "composite":
        return Composite(scene.transform(spec["first"]), scene.transform(spec["second"]))
    raise SceneError(f"transformation {name!r} has unknown type {kind!r}")


def build_scene(spec: dict, n: int | None = None, base: Path | None = None) -> Scene:
    """Resolve a parsed scene dictionary; ``n`` overrides the grid size."""
    unknown = set(spec) - set(SECTIONS)
    if unknown:
        raise SceneError(f"unknown scene keys {sorted(unknown)}")
    names = [k for sec in SECTIONS[1:] for k in spec.get(sec, {})]
    dupes = sorted({k for k in names if names.count(k) > 1})
    if dupes:
        raise SceneError(f"names used twice: {dupes}")
    gspec = dict(spec.get("grid", {}))
    try:
        grid = Grid(int(n if n is not None else gspec.get("n", 65)), gspec.get("adjacency", "8/4"))
        marked = tuple(_point(grid, p) for p in gspec.get("marked", DEFAULT_MARKED))
        geometry = DistinguishedGeometry(grid, marked)
        geometry.check()
        scene = Scene(grid, geometry)
        for name, s in spec.get("images", {}).items():
            scene.images[name] = _image(scene, name, s, base)
        for name, s in spec.get("functions", {}).items():
            scene.functions[name] = _function(scene, name, s, base)
        for name, s in spec.get("measures", {}).items():
            scene.measures[name] = _measure(scene, name, s)
        for name, s in spec.get("transforms", {}).items():
            scene.transforms[name] = _transform(scene, name, s, base)
    except SceneError:
        raise
    except (ValueError, KeyError, TypeError, IndexError, AssertionError, OSError) as e:
        raise SceneError(f"bad scene: {e}") from e
    return scene


def load_scene(path: str | Path, n: int | None = None) -> Scene:
    path = Path(path)
    try:
        spec = json.loads(path.read_text(), object_pairs_hook=_reject_duplicates)
    except json.JSONDecodeError as e:
        raise SceneError(f"{path}: {e}") from e
    except OSError as e:
        raise SceneError(str(e)) from e
    return build_scene(spec, n, path.parent)


def default_scene(n: int | None = None) -> Scene:
    return build_scene(copy.deepcopy(DEFAULT_SCENE), n)
