"""Exception hierarchy for the tonelens toolkit.

Every error raised on a per-token basis during batch analysis maps to a
machine-readable reason code (see ``tonelens.pipeline``), so callers can
distinguish recoverable per-file failures from usage errors.
"""

from __future__ import annotations


class ToneLensError(Exception):
    """Base class for all toolkit errors."""


class AudioFormatError(ToneLensError):
    """Malformed RIFF/WAVE container or header."""


class UnsupportedCodecError(ToneLensError):
    """WAV file uses a codec other than integer PCM or 32-bit float."""


class EmptyAudioError(ToneLensError):
    """Audio has no samples (zero-length data chunk or empty clip)."""


class TooShortError(ToneLensError):
    """Clip is shorter than one analysis window."""


class FilenamePatternError(ToneLensError):
    """File name does not match the corpus naming convention."""


class ManifestError(ToneLensError):
    """Manifest line is unreadable or violates the token metadata schema."""


class ParameterError(ToneLensError):
    """A parameter is outside its documented range."""


class SingularModelError(ToneLensError):
    """Penalized normal matrix is singular; a positive lambda is required."""


class UndefinedCorrelationError(ToneLensError):
    """Correlation undefined because one input has zero variance."""


class InsufficientDataError(ToneLensError):
    """Too few observations for the requested statistic."""


class EmptyPairingError(ToneLensError):
    """Two trajectory sets share no (token_id, c_index) keys."""


class EmptyInputError(ToneLensError):
    """An aggregate was requested over an empty collection."""


class SchemaError(ToneLensError):
    """An upstream artifact (CSV/JSON) does not match its contract."""


class ZeroSuccessError(ToneLensError):
    """A batch run produced no successful tokens."""
