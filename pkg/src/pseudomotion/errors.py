"""Exception types raised across the library."""


class PseudoMotionError(Exception):
    """Base class for all library errors."""


class SourceEmptyError(PseudoMotionError):
    """An image directory held no decodable files."""


class InvalidSystemError(PseudoMotionError):
    """An iterated function system violated its invariants (weights or contractivity)."""


class InvalidSourceError(PseudoMotionError):
    """A source image is too small for the requested windowed transform."""


class InvalidRectError(PseudoMotionError):
    """A crop rectangle falls outside the image bounds."""


class DegenerateHomographyError(PseudoMotionError):
    """Perturbed corners do not define an invertible (convex) perspective map."""


class InvalidTrajectoryError(PseudoMotionError):
    """A window trajectory cannot be realized inside the source image."""


class GeometryError(PseudoMotionError):
    """Clip dimensions are not divisible by the token geometry."""


class DegenerateRatioError(PseudoMotionError):
    """A mask ratio would leave zero masked or zero visible cells."""


class ShapeMismatchError(PseudoMotionError):
    """Two clips (or a clip and a grid) disagree on shape."""


class MissingSourceError(PseudoMotionError):
    """A recipe references a source image that is not available."""
