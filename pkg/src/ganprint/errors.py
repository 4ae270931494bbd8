"""Exception hierarchy for the ganprint package."""


class GanprintError(Exception):
    """Base class for all package errors."""


class ConstantInputError(GanprintError):
    """Vector or plane is constant where variation is required."""


class LengthMismatchError(GanprintError):
    """Vectors have different lengths."""


class ShapeMismatchError(GanprintError):
    """Arrays have incompatible shapes."""


class TooSmallError(GanprintError):
    """Image too small for the requested decomposition depth."""


class MalformedPyramidError(GanprintError):
    """Wavelet pyramid structure is inconsistent."""


class EmptyInputError(GanprintError):
    """An input collection is empty."""


class MixedDenoisersError(GanprintError):
    """Residuals produced by different denoiser configurations."""


class NotEnoughResidualsError(GanprintError):
    """Fewer residuals than the largest requested subset size."""


class TooFewPointsError(GanprintError):
    """Curve fitting needs at least three points."""


class LagTooLargeError(GanprintError):
    """Autocorrelation lag exceeds half the smallest image dimension."""


class EmptyClassError(GanprintError):
    """ROC computation requires both positive and negative scores."""


class EmptySetError(GanprintError):
    """A residual set in a correlation matrix is empty."""


class UnknownLabelError(GanprintError):
    """Label not present in the declared label list."""


class EmptyFingerprintListError(GanprintError):
    """Attribution needs at least one candidate fingerprint."""


class ContainerFormatError(GanprintError):
    """Binary container has bad magic, version, or truncated payload."""


class ManifestError(GanprintError):
    """Dataset manifest failed to parse or validate."""


class DuplicateLabelError(ManifestError):
    """Two sources in a manifest share a label."""


class MissingFileError(ManifestError):
    """A manifest references a path that does not exist."""


class TooFewImagesError(ManifestError):
    """A source has too few images for the estimation/test split."""


class UnsupportedCodecError(GanprintError):
    """Requested re-encoding format or quality is not supported."""
