class VeechError(Exception):
    """Base class for every failure raised by the classification engine"""


# Arithmetic layer
class InvalidModulusError(VeechError, ValueError):
    pass


class DivisionByZeroError(VeechError, ZeroDivisionError):
    pass


class NotAutomorphismError(VeechError, ValueError):
    """Raised when gcd(k, n) != 1 so zeta -> zeta^k is not a field automorphism"""


class NotRealError(VeechError, ValueError):
    """Raised when a sign is requested for an element that is not conjugate-fixed"""


class NotInSubfieldError(VeechError, ValueError):
    pass


class DegenerateBasisError(VeechError, ArithmeticError):
    """Raised when the Gram matrix of the trace pairing is singular"""


# Relations
class NotARelationError(VeechError, ValueError):
    pass


# Search and twist analysis
class InvariantBreachError(VeechError, RuntimeError):
    """An invariant that the mathematics guarantees failed to hold"""


class DegenerateRankError(VeechError, ArithmeticError):
    pass


class UnderdeterminedCaseError(VeechError, RuntimeError):
    pass


class ContradictionError(VeechError, RuntimeError):
    pass


# Flat geometry
class GeometricInfeasibilityError(VeechError, ValueError):
    pass


class NonPeriodicError(VeechError, RuntimeError):
    pass


class DegenerateSaddleError(VeechError, ArithmeticError):
    pass


# Configuration
class ConfigError(VeechError, ValueError):
    pass


class InvalidQueryError(VeechError, ValueError):
    """Raised for out-of-range search or bound parameters"""
