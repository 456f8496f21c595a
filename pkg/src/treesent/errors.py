"""Exception types shared across the package."""


class TreesentError(Exception):
    """Base class for every error this package raises on purpose."""


class DataError(TreesentError):
    """Base class for ingestion and file-format problems."""


class MalformedLineError(DataError):
    """A CoNLL-U line does not have the expected tab-separated fields."""


class NonTreeError(DataError):
    """Head links contain a cycle, multiple roots, or a disconnected token."""


class HeadOutOfRangeError(DataError):
    """A head index points outside the sentence or at its own token."""


class XmlSyntaxError(DataError):
    """The review XML cannot be parsed."""


class UnknownPolarityError(DataError):
    """A polarity string or code outside the four known classes."""


class SpanOutOfBoundsError(DataError):
    """Character or token offsets fall outside the sentence."""


class AlignmentError(DataError):
    """Tokens cannot be located in the sentence text, or a character span
    covers no token."""


class CountMismatchError(DataError):
    """The XML and CoNLL-U files do not describe the same sentences."""


class NoConflictInstancesError(DataError):
    """Upsampling was requested but the conflict class is empty."""


class ConfigError(DataError):
    """A training-config file or value is invalid."""


class DimensionMismatchError(TreesentError):
    """Tensor shapes do not line up."""


class BadRateError(TreesentError):
    """Dropout rate outside [0, 1)."""


class PadTooSmallError(TreesentError):
    """Requested padded length is shorter than the sentence."""


class EmptyAspectError(TreesentError):
    """An aspect span with no tokens."""


class IndexOutOfRangeError(TreesentError):
    """A token index outside 1..n."""


class DivergenceError(TreesentError):
    """Training produced a non-finite loss."""


class CheckpointError(TreesentError):
    """A checkpoint file is corrupt or incomplete."""
