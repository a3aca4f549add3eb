"""Typed errors raised across the package.

Every failure mode surfaces as a named subclass of :class:`BlockGEError`
so callers (and the CLI) can report the error name without string matching.
"""


class BlockGEError(Exception):
    """Base class for all errors raised by this package."""


class DimensionMismatch(BlockGEError):
    """Paired rasters do not share the same shape."""


class NonFiniteInput(BlockGEError):
    """An input value is NaN or infinite."""


class NegativeValue(BlockGEError):
    """A generation-error value is negative."""


class BlockTooLarge(BlockGEError):
    """Requested block does not fit inside the frame."""


class ShapeMismatch(BlockGEError):
    """Score series do not share an identical segment structure."""


class EmptySeries(BlockGEError):
    """A series with no frames where at least one is required."""


class SingleClass(BlockGEError):
    """Labels contain only one class; the metric is undefined."""


class ZeroNormalLevel(BlockGEError):
    """Mean generation error over normal frames is zero."""


class NoNormalFrames(BlockGEError):
    """A segment has no normal frames."""


class NonPositiveLevel(BlockGEError):
    """A normal-GE-level is zero or negative; the ratio is undefined."""


class ZeroVariance(BlockGEError):
    """A correlation input has no variance."""


class TooFewSegments(BlockGEError):
    """Fewer segments than the statistic requires."""


class TooFewPoints(BlockGEError):
    """Fewer sweep points than a plot requires."""


class PlacementFailure(BlockGEError):
    """Synthetic blobs could not be placed without overlap."""


class ParseError(BlockGEError):
    """A manifest or config file does not match its schema."""


class MissingFile(BlockGEError):
    """A referenced file does not exist."""


class DuplicateSegmentId(BlockGEError):
    """Two segments in a manifest share an id."""


class LabelOutOfRange(BlockGEError):
    """A frame label is not 0 or 1."""


class BadMagic(BlockGEError):
    """A raster file does not start with a recognized signature."""


class TruncatedFile(BlockGEError):
    """A raster file ends before its declared payload."""


class NonFiniteValue(BlockGEError):
    """A raster file contains NaN or infinite samples."""
