"""Exception hierarchy shared by all salttex modules.

Every error carries a stable machine-readable ``code`` (its class name) so
the CLI and HTTP service can map failures without string matching.
"""


class SaltTexError(Exception):
    """Base class for all salttex errors."""

    @property
    def code(self) -> str:
        return type(self).__name__


class DataError(SaltTexError):
    """Malformed or inconsistent input data (CLI exit code 3)."""


class PipelineError(SaltTexError):
    """A well-formed input on which the pipeline cannot proceed (exit code 4)."""


# --- volume_io ---

class EmptyFile(DataError):
    pass


class UnsupportedFormatCode(DataError):
    pass


class TruncatedTrace(DataError):
    pass


class NonRectangularGrid(DataError):
    pass


class DimMismatch(DataError):
    pass


class BadSidecar(DataError):
    pass


class IndexOutOfRange(DataError):
    pass


class ConstantSection(PipelineError):
    pass


# --- attributes ---

class ShapeMismatch(DataError):
    pass


class SectionTooSmall(DataError):
    pass


class VolumeTooSmall(DataError):
    pass


# --- segmentation ---

class DegenerateHistogram(PipelineError):
    pass


class SeedOutOfRange(DataError):
    pass


class SeedAboveThreshold(PipelineError):
    pass


class EmptyMask(PipelineError):
    pass


# --- tracking ---

class TooFewPatches(PipelineError):
    pass


class TooFewTrackedPoints(PipelineError):
    pass


class DegenerateCovariance(UserWarning):
    """Warned (not raised) when a mode covariance has lower rank than the
    requested subspace dimension; the dimension is reduced to the rank."""


# --- evaluation ---

class EmptyBoundary(DataError):
    pass


class LengthMismatch(DataError):
    pass


# --- noisebench ---

class NotNormalized(DataError):
    pass
