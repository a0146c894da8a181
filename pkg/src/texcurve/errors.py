"""Exception types shared across the toolkit."""

from __future__ import annotations


class TexcurveError(Exception):
    """Base class for every error raised by this package."""


class DecodeError(TexcurveError):
    """Image payload is malformed, truncated, or not PNG/JPEG."""


class EmptySelection(TexcurveError):
    """A pixel mask excluded every pixel of the image."""


class EmptyHistogram(TexcurveError):
    """Entropy was requested for a histogram with zero total mass."""


class ViewLoadError(TexcurveError):
    """One or more views of an object could not be loaded.

    Attributes
    ----------
    object_id : str
        Object whose views failed.
    failures : list of (str, str)
        Pairs of (path, reason) for each failing view.
    """

    def __init__(self, object_id: str, failures):
        self.object_id = object_id
        self.failures = list(failures)
        paths = ", ".join(path for path, _ in self.failures)
        super().__init__(f"object {object_id!r}: failed to load views: {paths}")


class MismatchedViewCount(TexcurveError):
    """A method supplied the wrong number of rendered views for a sample."""


class MissingSample(TexcurveError):
    """A method does not cover a sample required for comparison."""


class UnknownMethod(TexcurveError):
    """A comparison references a method id the judge does not know."""


class TransportError(TexcurveError):
    """A remote judging endpoint could not be reached or returned an error."""


class UnparseableVerdict(TexcurveError):
    """A judge reply contained no recognizable verdict token."""


class UnknownTask(TexcurveError):
    """A verdict was submitted for a task id that is not in the session."""


class DuplicateVerdict(TexcurveError):
    """A verdict was submitted for a task that is already judged."""


class InvalidScore(TexcurveError):
    """A comparison record carries an outcome outside {0, 0.5, 1}."""
