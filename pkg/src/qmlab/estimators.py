"""scikit-learn transformers over flattened grid functions.

Each row of ``X`` holds the samples of one function on an ``n x n`` grid in
row-major order.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from .grid import Grid
from .integral import GridFunction, integrate
from .measures import QuasiMeasure, aarnes, dirac, three_point
from .transforms import FromSimple, ImageTransformation, Preimage, fold_map, identity_map, induced_function, shift_map

_MEASURES = {
    "aarnes": aarnes,
    "three_point": three_point,
    "dirac": lambda g: dirac(g, g.center),
}

_TRANSFORMS = {
    "identity": lambda g: Preimage(identity_map(g), g),
    "shift": lambda g: Preimage(shift_map(g), g),
    "fold": lambda g: Preimage(fold_map(g), g),
    "from_aarnes": lambda g: FromSimple(aarnes(g), g),
}


def _grid_for(X, n):
    side = int(round(np.sqrt(X.shape[1])))
    if n is None:
        n = side
    if n * n != X.shape[1]:
        raise ValueError(f"expected {n * n} features per row, got {X.shape[1]}")
    return Grid(n)


class QuasiIntegrator(TransformerMixin, BaseEstimator):
    """Maps each function row to its quasi-integral (one output column).

    ``measure`` is a name (``aarnes``, ``three_point``, ``dirac``) or a
    :class:`QuasiMeasure` on the matching grid.
    """

    def __init__(self, measure="aarnes", n=None):
        self.measure = measure
        self.n = n

    def fit(self, X, y=None):
        X = check_array(X, dtype=float)
        grid = _grid_for(X, self.n)
        if isinstance(self.measure, QuasiMeasure):
            if self.measure.space != grid:
                raise ValueError("measure lives on a different grid")
            self.measure_ = self.measure
        elif self.measure in _MEASURES:
            self.measure_ = _MEASURES[self.measure](grid)
        else:
            raise ValueError(f"unknown measure {self.measure!r}")
        self.grid_ = grid
        self.n_features_in_ = X.shape[1]
        return self

    def transform(self, X):
        check_is_fitted(self, "measure_")
        X = check_array(X, dtype=float)
        if X.shape[1] != self.n_features_in_:
            raise ValueError(f"expected {self.n_features_in_} features, got {X.shape[1]}")
        return np.array([[integrate(self.measure_, GridFunction(self.grid_, row))] for row in X])


class InducedFunctionTransformer(TransformerMixin, BaseEstimator):
    """Maps each function row to the induced function on the target grid.

    ``q`` is a name (``identity``, ``shift``, ``fold``, ``from_aarnes``) or an
    :class:`ImageTransformation` between grids.
    """

    def __init__(self, q="fold", n=None):
        self.q = q
        self.n = n

    def fit(self, X, y=None):
        X = check_array(X, dtype=float)
        grid = _grid_for(X, self.n)
        if isinstance(self.q, ImageTransformation):
            if self.q.source != grid:
                raise ValueError("transformation starts on a different grid")
            self.q_ = self.q
        elif self.q in _TRANSFORMS:
            self.q_ = _TRANSFORMS[self.q](grid)
        else:
            raise ValueError(f"unknown transformation {self.q!r}")
        self.grid_ = grid
        self.n_features_in_ = X.shape[1]
        return self

    def transform(self, X):
        check_is_fitted(self, "q_")
        X = check_array(X, dtype=float)
        if X.shape[1] != self.n_features_in_:
            raise ValueError(f"expected {self.n_features_in_} features, got {X.shape[1]}")
        return np.stack([induced_function(self.q_, GridFunction(self.grid_, row)).values for row in X])
