"""Exception hierarchy shared by all ddsim modules."""


class DDSimError(Exception):
    """Base class for every error raised by ddsim."""


class PrecisionMismatch(DDSimError):
    """Operands carry different working precisions."""


class NotHermitian(DDSimError):
    """An operator that must be Hermitian is not."""


class NotUnitary(DDSimError):
    """An operator that must be unitary is not."""


class BranchAmbiguity(DDSimError):
    """An eigenphase sits on the branch cut of the principal logarithm."""


class DimMismatch(DDSimError):
    """Operand dimensions are incompatible."""


class BadParams(DDSimError, ValueError):
    """Invalid physical or numerical parameters."""


class Unsupported(DDSimError):
    """The requested construction is not available."""


class NegativeInterval(DDSimError):
    """A sequence construction would need a negative free interval."""


class WidthTooLarge(DDSimError):
    """Pulse width does not fit into the available free evolution."""


class BadState(DDSimError, ValueError):
    """A density matrix is not a valid quantum state."""


class PrecisionEscalationFailed(DDSimError):
    """Adaptive precision hit its ceiling before the result was resolved."""


class IoError(DDSimError, OSError):
    """Reading or writing a file failed."""


__all__ = [
    "DDSimError",
    "PrecisionMismatch",
    "NotHermitian",
    "NotUnitary",
    "BranchAmbiguity",
    "DimMismatch",
    "BadParams",
    "Unsupported",
    "NegativeInterval",
    "WidthTooLarge",
    "BadState",
    "PrecisionEscalationFailed",
    "IoError",
]
