"""Exception types raised for bad input data.

Everything derives from :class:`DataError` so callers (the CLI in
particular) can separate data problems from programming errors.
"""


class DataError(ValueError):
    """Input data could not be used."""


class ImageReadError(DataError):
    """The file could not be opened or decoded."""


class UnsupportedFormatError(DataError):
    """The file is not a PGM or PNG image, or uses an unsupported mode."""


class EmptyImageError(DataError):
    """The image has a zero width or height."""


class ImageTooSmallError(DataError):
    """No interior pixels remain once the sampling radius is removed."""


class ManifestError(DataError):
    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class FeatureStoreError(DataError):
    def __init__(self, message, row=None):
        if row is not None:
            message = f"row {row}: {message}"
        super().__init__(message)
        self.row = row


class SpecMismatchError(FeatureStoreError):
    """A stored feature file was built with different parameters."""
