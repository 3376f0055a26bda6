"""Quasi-measures, quasi-integrals and image transformations on discretized spaces."""

from .errors import (InvariantViolation, MalformedPair, NotAQuasiHomomorphism, PreconditionViolation,
                     QMLabError, SceneError, SpaceMismatch, UncoveredPoint)
from .grid import (CLOSED, OPEN, DiscreteSpace, DistinguishedGeometry, Grid, Image, connected_components,
                   default_geometry, erode, from_mask_text, image_from_faces, is_solid, to_mask_text)
from .integral import (GridFunction, PushforwardDistribution, builtin_function, integrate, is_grid_continuous,
                       pushforward_distribution, resolve_steps, simple_value, staircase, sublevel, superlevel)
from .measures import (AarnesRule, Dirac, DiracRule, FromSolidRule, Mixture, Pushforward, QuasiMeasure,
                       SolidRule, ThreePointRule, aarnes, dirac, three_point)
from .reports import Report
from .transforms import (Composite, FiniteStarSample, FromSimple, ImageTransformation, Preimage,
                         StarRestricted, Vanishing, compose, factorize, induced_function, pullback,
                         reconstruct_from_homomorphism)

__version__ = "0.1.0"

__all__ = [
    "AarnesRule", "CLOSED", "Composite", "Dirac", "DiracRule", "DiscreteSpace", "DistinguishedGeometry",
    "FiniteStarSample", "FromSimple", "FromSolidRule", "Grid", "GridFunction", "Image", "ImageTransformation",
    "InvariantViolation", "MalformedPair", "Mixture", "NotAQuasiHomomorphism", "OPEN", "Preimage",
    "PreconditionViolation", "Pushforward", "PushforwardDistribution", "QMLabError", "QuasiMeasure", "Report",
    "SceneError", "SolidRule", "SpaceMismatch", "StarRestricted", "ThreePointRule", "UncoveredPoint",
    "Vanishing", "aarnes", "builtin_function", "compose", "connected_components", "default_geometry", "dirac",
    "erode", "factorize", "from_mask_text", "image_from_faces", "induced_function", "integrate", "is_grid_continuous", "is_solid",
    "pullback", "pushforward_distribution", "reconstruct_from_homomorphism", "resolve_steps", "simple_value", "staircase",
    "sublevel", "superlevel", "three_point", "to_mask_text",
]
