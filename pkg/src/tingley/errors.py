"""Exception hierarchy shared by all modules."""


class TingleyError(Exception):
    """Base class for every error raised by this package."""


class InvalidDimensionError(TingleyError, ValueError):
    pass


class MatrixFormatError(TingleyError, ValueError):
    """Malformed matrix input (shape, non-finite entries, JSON fields)."""


class ConvergenceError(TingleyError, ArithmeticError):
    pass


class PreconditionError(TingleyError, ValueError):
    pass


class NumericalInconsistencyError(TingleyError, ArithmeticError):
    """A closed-form evaluation received data that cannot come from valid inputs."""


class NoFaceError(TingleyError, ValueError):
    pass


class OracleInconsistentError(TingleyError):
    """The oracle's answers contradict it being a surjective sphere isometry.

    Attributes:
        stage: name of the recovery stage where the contradiction surfaced.
        report: partial report, when one was produced before failing.
    """

    def __init__(self, stage, message, report=None):
        super().__init__(f"[{stage}] {message}")
        self.stage = stage
        self.report = report


class UnsupportedDimensionError(TingleyError, ValueError):
    pass


class DimensionMismatchError(TingleyError, ValueError):
    pass


class FaceTransportError(TingleyError):
    pass


class MissingProbeError(TingleyError, KeyError):
    """A tabulated oracle was asked for a point it does not contain."""

    def __str__(self):
        return str(self.args[0]) if self.args else "missing probe"
