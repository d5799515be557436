"""Exception types raised across the package."""


class CloakError(Exception):
    """Base class for all package errors."""


class DomainError(CloakError, ValueError):
    """An input lies outside the domain where a model is defined."""


class NoRectifyingCapacitance(DomainError):
    """The rectifying capacitance has no positive solution at a frequency."""

    def __init__(self, frequency):
        self.frequency = frequency
        super().__init__(
            f"no rectifying capacitance at this frequency ({frequency:.6g} Hz)")


class EdgeOutsideMap(CloakError, ValueError):
    """The phase threshold is never reached on the requested map row."""

    def __init__(self, frequency, threshold):
        self.frequency = frequency
        self.threshold = threshold
        super().__init__(
            f"edge outside map: threshold {threshold:.6g} rad never reached "
            f"at {frequency:.6g} Hz")


class ParseError(CloakError, ValueError):
    """Malformed input file; carries a 1-based line and column when known."""

    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        where = []
        if line is not None:
            where.append(f"line {line}")
        if column is not None:
            where.append(f"column {column}")
        suffix = f" ({', '.join(where)})" if where else ""
        super().__init__(message + suffix)


class CalibrationError(CloakError, ValueError):
    """The phase response cannot be inverted on the varactor range."""


class NoDetection(CloakError, ValueError):
    """The Doppler spectrum carries no energy to estimate from."""
