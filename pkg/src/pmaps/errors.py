"""Exception and warning types raised by pmaps."""


class PMapsError(Exception):
    """Base class for all pmaps errors."""


class CriticalPoint(PMapsError, ValueError):
    """An orbit point landed on (or numerically too close to) the critical set."""

    def __init__(self, x, step=0, distance=None):
        self.x = x
        self.step = step
        self.distance = distance
        msg = f"point {float(x)!r} at step {step} is within critical tolerance of C"
        if distance is not None:
            msg += f" (distance {float(distance):.3g})"
        super().__init__(msg)


class OutOfDomain(PMapsError, ValueError):
    pass


class NotInBranchImage(PMapsError, ValueError):
    pass


class DepthCapExceeded(PMapsError, ValueError):
    pass


class NoCovering(PMapsError):
    pass


class NoSignChange(PMapsError):
    pass


class ToleranceNotMet(PMapsError):
    """A periodic point was found but its residual exceeds the requested tolerance."""


class EmptyAfterBurnIn(PMapsError, ValueError):
    pass


class BlockTooLong(PMapsError, ValueError):
    pass


class NonAffineMap(PMapsError, TypeError):
    pass


class ValidationError(PMapsError, ValueError):
    pass


class ParseError(PMapsError, ValueError):
    def __init__(self, message, line=None, field=None):
        self.line = line
        self.field = field
        where = []
        if line is not None:
            where.append(f"line {line}")
        if field is not None:
            where.append(f"field {field!r}")
        prefix = f"{', '.join(where)}: " if where else ""
        super().__init__(prefix + message)


class BoundaryAtomWarning(UserWarning):
    """Atoms sit within tolerance of a cylinder boundary; their cell is ambiguous."""


class NoCoveringTimesWarning(UserWarning):
    """A scan found no covering times; the horizon was probably too short."""


class ShortStreamWarning(UserWarning):
    pass


class LowEntropyWarning(UserWarning):
    pass
