"""Exception hierarchy shared by every tanglekit module."""


class TangleError(Exception):
    """Base class for domain errors (the CLI maps these to exit status 1)."""


class ValidationError(TangleError):
    def __init__(self, violations):
        self.violations = list(violations)
        lines = "; ".join(str(v) for v in self.violations)
        super().__init__(f"invalid tangle: {lines}")


class CompositionArityError(TangleError):
    pass


class CompositionShadingError(TangleError):
    pass


class SewingWeightError(TangleError):
    pass


class CapacityError(TangleError):
    pass


class ArityError(TangleError):
    pass


class EvaluationError(TangleError):
    pass


class ShadingError(TangleError):
    pass


class NumericalError(TangleError):
    def __init__(self, message, residual=None):
        self.residual = residual
        if residual is not None:
            message = f"{message} (residual {residual:.3e})"
        super().__init__(message)


class GenericityError(TangleError):
    pass


class AmbiguityError(TangleError):
    pass


class ConsistencyError(TangleError):
    """Raised when an internal invariant that should hold by construction fails."""


class ParseError(TangleError):
    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        if line is not None:
            message = f"{message} (line {line}, column {column})"
        super().__init__(message)


class MapError(TangleError):
    """Malformed rational map: zero degree, common root of numerator and denominator."""
