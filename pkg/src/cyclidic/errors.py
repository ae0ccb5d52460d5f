"""Exception types raised by the geometric kernel."""


class GeometryError(ValueError):
    """Base class for violated geometric preconditions."""


class ZeroVector(GeometryError):
    pass


class NonIsotropic(GeometryError):
    pass


class NotInContact(GeometryError):
    pass


class IdenticalSpheres(GeometryError):
    pass


class DegenerateInput(GeometryError):
    pass


class ZeroDelta(GeometryError):
    pass


class CoincidentPoints(GeometryError):
    pass


class OrientedContactDegenerate(GeometryError):
    pass


class InvalidQuad(GeometryError):
    pass


class NonEmbeddedQuad(InvalidQuad):
    pass


class SingularVertex(GeometryError):
    pass


class DegenerateSubdomain(GeometryError):
    pass


class DegenerateSpan(GeometryError):
    pass


class AmbiguousSupport(GeometryError):
    pass


class InvalidNet(GeometryError):
    pass


class DegenerateMiquel(GeometryError):
    def __init__(self, message, residual=None, location=None):
        super().__init__(message)
        self.residual = residual
        self.location = location


class PropagationConflict(GeometryError):
    def __init__(self, message, residual=None, location=None):
        super().__init__(message)
        self.residual = residual
        self.location = location


class CollidingVertices(GeometryError):
    pass


class SingularCube(GeometryError):
    pass


class ClosureViolation(GeometryError):
    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class InfinitySample(GeometryError):
    def __init__(self, message, parameters=None):
        super().__init__(message)
        self.parameters = parameters


class SchemaMismatch(ValueError):
    pass
