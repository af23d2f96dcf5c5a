"""Exception hierarchy shared by all pipeline stages."""


class OcrError(Exception):
    """Base class for every error raised by this package."""


class RejectedInputError(OcrError, ValueError):
    """An argument violates a precondition (shape, range, size guard)."""


class InfeasibleTargetError(OcrError, ValueError):
    """The CTC target cannot be aligned to the given number of frames."""


class ManifestError(OcrError, ValueError):
    """Malformed alphabet or training manifest."""


class UnsupportedSymbolError(OcrError, ValueError):
    def __init__(self, codepoint, offset):
        self.codepoint = codepoint
        self.offset = offset
        super().__init__(
            f"symbol U+{codepoint:04X} at offset {offset} is not in the alphabet"
        )


class UndefinedMetricError(OcrError, ValueError):
    """Accuracy is undefined because the references are empty."""


class GenerationError(OcrError, RuntimeError):
    """Synthetic data could not be generated under the requested constraints."""


class ModelFormatError(OcrError, ValueError):
    """Not a model file (bad magic or inconsistent header)."""


class ModelVersionError(ModelFormatError):
    """Model file written by an unsupported format version."""


class ModelCorruptionError(ModelFormatError):
    """Checksum or length mismatch in a model file."""


class ImageFormatError(OcrError, ValueError):
    """Unreadable image or unsupported pixel format."""
