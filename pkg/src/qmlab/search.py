"""Search for open pairs on which a quasi-measure fails to be subadditive."""

from __future__ import annotations

import numpy as np

from .grid import OPEN, Image, to_mask_text
from .families import open_pairs
from .measures import QuasiMeasure
from .shapes import blob


def _violates(m: QuasiMeasure, u: Image, v: Image):
    w = u.union(v)
    if w is None:
        return False, None
    vu, vv, vw = m(u), m(v), m(w)
    return (vw > vu + vv and float(vw - vu - vv) > 1e-12), (vu, vv, vw)


def find_nonsubadditive_witness(m: QuasiMeasure, budget: int = 10_000, seed: int = 0) -> dict | None:
    """Return the first open pair with ``m(U | V) > m(U) + m(V)``, or ``None``.

    Template pairs (arcs, lenses between marked points, half-planes) are tried
    first, then seeded random blob pairs.  ``budget`` caps the number of
    measure evaluations; the search is deterministic for a given seed.
    Pairs whose union is not an image (opens touching along an edge only)
    are skipped.
    """
    grid = m.space
    if grid.is_discrete:
        raise ValueError("the search needs a grid space")
    spent = 0
    tried = 0

    def found(u, v, vals, source):
        return {"U": to_mask_text(u), "V": to_mask_text(v), "values": {"U": vals[0], "V": vals[1], "union": vals[2]},
                "source": source, "pairs_tried": tried, "evaluations": spent}

    for u, v in open_pairs(grid, m.marked_points):
        if spent + 3 > budget:
            return None
        spent += 3
        tried += 1
        bad, vals = _violates(m, u, v)
        if bad:
            return found(u, v, vals, "template")
    rng = np.random.default_rng(seed)
    while spent + 3 <= budget:
        u = blob(grid, rng, kind=OPEN)
        v = blob(grid, rng, kind=OPEN)
        spent += 3
        tried += 1
        bad, vals = _violates(m, u, v)
        if bad:
            return found(u, v, vals, "random")
    return None
