"""Exception types shared across the package."""


class QSteinitzError(Exception):
    """Base class for all package errors."""


class PremiseViolated(QSteinitzError):
    """The input does not satisfy the hypothesis of the requested operation."""


class ScaleLimit(QSteinitzError):
    """The instance exceeds an enumeration guard."""


class EquatorSingularity(QSteinitzError):
    """Central projection of a point (numerically) on the equator."""


class SchemaError(QSteinitzError):
    """A file does not follow the instance/certificate schema."""


class VerificationFailed(QSteinitzError):
    """A certificate did not survive re-verification."""
