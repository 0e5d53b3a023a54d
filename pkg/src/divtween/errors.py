"""Exception types shared across the package.

The hierarchy mirrors the CLI exit-code contract: ValidationError maps to
exit 1, IoError to exit 2, PropertyViolation to exit 3.
"""


class DivtweenError(Exception):
    """Base class for all package errors."""


class ValidationError(DivtweenError):
    """Invalid arguments, configuration, or values outside documented ranges."""


class RangeError(ValidationError):
    """A scalar argument lies outside its documented range."""


class DimensionError(ValidationError):
    """Mismatched joint count, frame count, or vector dimension."""


class DegenerateInputError(ValidationError):
    """Input is structurally valid but numerically degenerate (e.g. zero-norm pose)."""


class InvalidCriteriaError(ValidationError):
    """A criteria vector contains NaN or violates its arithmetic invariants."""


class EmptyPopulationError(ValidationError):
    """An operation that requires a nonempty population received an empty one."""


class MissingLabelError(ValidationError):
    """A sequence lacks the intended_label required by the operation."""


class DomainGenerationError(DivtweenError):
    """Could not build a synthetic domain meeting the separation margin."""


class NumericalError(DivtweenError):
    """A numerical routine left its validity envelope (e.g. non-PSD covariance)."""


class EngineError(DivtweenError):
    """A sampling run aborted; the message carries generation/offspring context."""


class IoError(DivtweenError):
    """File missing, unreadable, unwritable, or malformed."""


class ParseError(IoError):
    """A data file failed to parse; the message names the file and byte offset."""


class PropertyViolation(DivtweenError):
    """A verified property reported one or more violating instances."""
