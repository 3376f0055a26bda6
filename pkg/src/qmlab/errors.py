"""Exception types raised by qmlab."""


class QMLabError(Exception):
    """Base class for all qmlab errors."""


class InvariantViolation(QMLabError):
    """A computed value broke an invariant the construction guarantees.

    On a finite grid this usually points at a discretization artifact
    (for example a complement component that is not solid under the
    chosen connectivity convention) rather than a programming error.
    """


class PreconditionViolation(QMLabError, ValueError):
    pass


class MalformedPair(QMLabError, ValueError):
    """Two images overlap, or their union is neither open nor closed."""


class SpaceMismatch(QMLabError, ValueError):
    pass


class UncoveredPoint(QMLabError):
    def __init__(self, point, message=None):
        self.point = point
        super().__init__(message or f"no sample member matches the pullback of the point mass at {point!r}")


class NotAQuasiHomomorphism(QMLabError):
    pass


class SceneError(QMLabError):
    """Scene file could not be loaded or a name did not resolve."""
