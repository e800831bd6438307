"""Exception types raised across the toolkit."""


class CrackDetError(Exception):
    """Base class for all toolkit errors."""


class DecodeError(CrackDetError):
    """File exists but cannot be decoded as an image."""


class EmptyImageError(CrackDetError):
    """Image with zero pixels where content is required."""


class ImageTooSmallError(CrackDetError):
    """Image smaller than the minimum an operation supports."""


class DimensionMismatchError(CrackDetError):
    """Two arrays that must share dimensions do not."""


class DegenerateHistogramError(CrackDetError):
    """Histogram cannot be split into two nonempty clusters."""


class ShapeMismatchError(CrackDetError):
    """Tensor shapes incompatible with the requested operation."""


class StaleCacheError(CrackDetError):
    """Backward pass requested without a preceding forward pass."""


class EmptyDatasetError(CrackDetError):
    """Training requested on a dataset with no samples."""


class SingleClassDatasetError(CrackDetError):
    """Training requested on a dataset with only one class present."""


class MissingPairError(CrackDetError):
    """Evaluation inputs do not have matching file stems."""
