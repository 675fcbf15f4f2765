"""Exception hierarchy shared by every module."""


class TrilemmaError(Exception):
    """Base class for all errors raised by this package."""


class IngestError(TrilemmaError):
    """A data file could not be turned into a series."""

    def __init__(self, message, path=None):
        self.path = path
        if path is not None:
            message = f"{path}: {message}"
        super().__init__(message)


class MissingColumn(IngestError):
    pass


class UnparsableDate(IngestError):
    pass


class NonNumericValue(IngestError):
    pass


class DuplicateDate(IngestError):
    pass


class NoFramesFound(IngestError):
    pass


class UnknownFrame(TrilemmaError, ValueError):
    pass


class EmptyIntersection(TrilemmaError, ValueError):
    pass


class FrameMissing(TrilemmaError, KeyError):
    """The dataset does not carry a frame the computation needs."""

    def __init__(self, frame, chain=None):
        self.frame = frame
        self.chain = chain
        where = f" in {chain} dataset" if chain else ""
        super().__init__(f"frame {frame!r} missing{where}")

    def __str__(self):
        return self.args[0]


class AllZero(TrilemmaError, ValueError):
    pass


class NegativeValue(TrilemmaError, ValueError):
    pass


class WindowTooLarge(TrilemmaError, ValueError):
    pass


class EmptySeries(TrilemmaError, ValueError):
    pass


class NonPositiveBlockTime(TrilemmaError, ValueError):
    pass


class ZeroVariance(TrilemmaError, ValueError):
    pass


class InvalidConfig(TrilemmaError, ValueError):
    pass
