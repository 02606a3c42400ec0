"""Exception hierarchy shared by every module."""


class PcmError(Exception):
    """Base class for all package errors."""


class DomainError(PcmError, ValueError):
    """A value lies outside its mathematical domain (nonpositive ratio, delta >= 1, ...)."""


class ContractError(PcmError, ValueError):
    """Arguments violate a calling contract (shape or length mismatch, config provenance)."""


class FormatError(PcmError, ValueError):
    """An input file is malformed."""


class ResourceError(PcmError, RuntimeError):
    """A request exceeds a configured enumeration cap."""


class RangeError(PcmError, ValueError):
    """A requested value cannot be interpolated from the available data."""


class DegenerateFitError(PcmError, ValueError):
    """Least squares is undefined for the given points."""
