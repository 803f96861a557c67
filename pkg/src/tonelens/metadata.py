"""Token metadata: manifest scanning and corpus filename conventions."""

from __future__ import annotations

import json
import os
import re
from dataclasses import dataclass
from typing import Literal, Optional

from .errors import FilenamePatternError, ManifestError

Source = Literal["natural", "generated", "layer_tap"]

TONES = ("T1", "T2", "T3", "T4")
SEXES = ("female", "male")
SOURCES = ("natural", "generated", "layer_tap")
TAP_LAYERS = (2, 3, 4)

# <syllable><toneDigit>_<F|M>V<speakerDigit>, extension ignored
_FILENAME_RE = re.compile(r"^([A-Za-züÜ]+)([1-4])_([FM])V(\d)$")


@dataclass
class TokenMeta:
    """Identity of one analyzed token.

    Natural tokens carry a tone label; generated and layer-tap tokens carry
    the categorical-code index used to produce them; layer taps additionally
    carry the tapped layer index (2, 3, or 4).
    """

    token_id: str
    source: Source
    tone: Optional[str] = None
    c_index: Optional[int] = None
    layer_index: Optional[int] = None
    speaker: Optional[str] = None
    sex: Optional[str] = None
    syllable: Optional[str] = None
    model_id: Optional[str] = None

    def __post_init__(self) -> None:
        if not self.token_id:
            raise ManifestError("token_id must be a non-empty string")
        if self.source not in SOURCES:
            raise ManifestError(f"source must be one of {SOURCES}, got {self.source!r}")
        if self.source == "natural":
            if self.tone not in TONES:
                raise ManifestError(
                    f"tone is required for natural tokens and must be one of {TONES}, "
                    f"got {self.tone!r}"
                )
        else:
            if self.c_index is None:
                raise ManifestError(f"c_index is required for {self.source} tokens")
        if self.c_index is not None and self.c_index not in (0, 1, 2, 3):
            raise ManifestError(f"c_index must be in 0..3, got {self.c_index!r}")
        if self.source == "layer_tap":
            if self.layer_index not in TAP_LAYERS:
                raise ManifestError(
                    f"layer_index must be one of {TAP_LAYERS} for layer_tap tokens, "
                    f"got {self.layer_index!r}"
                )
        if self.sex is not None and self.sex not in SEXES:
            raise ManifestError(f"sex must be one of {SEXES}, got {self.sex!r}")
        if self.tone is not None and self.tone not in TONES:
            raise ManifestError(f"tone must be one of {TONES}, got {self.tone!r}")


_META_KEYS = (
    "token_id",
    "source",
    "tone",
    "c_index",
    "layer_index",
    "speaker",
    "sex",
    "syllable",
    "model_id",
)


def scan_manifest(path: str) -> list[tuple[TokenMeta, str]]:
    """Read a JSON Lines manifest into (TokenMeta, audio path) pairs.

    One entry per non-blank line, in file order. Relative audio paths are
    resolved against the manifest's directory. Unknown record fields are
    ignored so producers may attach extra annotations.
    """
    base = os.path.dirname(os.path.abspath(path))
    entries: list[tuple[TokenMeta, str]] = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ManifestError(f"{path}:{lineno}: unreadable line ({exc})") from exc
            if not isinstance(record, dict):
                raise ManifestError(f"{path}:{lineno}: record must be a JSON object")
            if "path" not in record:
                raise ManifestError(f"{path}:{lineno}: missing required field 'path'")
            fields = {k: record[k] for k in _META_KEYS if record.get(k) is not None}
            try:
                meta = TokenMeta(**fields)
            except TypeError as exc:
                raise ManifestError(f"{path}:{lineno}: {exc}") from exc
            except ManifestError as exc:
                raise ManifestError(f"{path}:{lineno}: {exc}") from exc
            audio_path = record["path"]
            if not os.path.isabs(audio_path):
                audio_path = os.path.join(base, audio_path)
            entries.append((meta, audio_path))
    return entries


def parse_corpus_filename(name: str) -> TokenMeta:
    """Recover natural-token metadata from a corpus file name.

    Expects ``<syllable><toneDigit>_<F|M>V<speakerDigit>`` with the extension
    and any directory prefix ignored, e.g. ``ma1_FV1.wav``. Raises
    :class:`FilenamePatternError` when the name does not match, so callers
    can fall back to a manifest.
    """
    stem = os.path.splitext(os.path.basename(name))[0]
    match = _FILENAME_RE.match(stem)
    if match is None:
        raise FilenamePatternError(f"{name!r} does not match <syllable><tone>_<F|M>V<n>")
    syllable, tone_digit, fm, speaker_digit = match.groups()
    return TokenMeta(
        token_id=stem,
        source="natural",
        tone=f"T{tone_digit}",
        sex="female" if fm == "F" else "male",
        speaker=f"{fm}V{speaker_digit}",
        syllable=syllable,
    )


def format_corpus_filename(meta: TokenMeta) -> str:
    """Inverse of :func:`parse_corpus_filename` (without extension)."""
    if meta.source != "natural" or meta.tone is None:
        raise FilenamePatternError("only natural tokens with a tone have a corpus name")
    if not meta.syllable or not meta.speaker or meta.sex is None:
        raise FilenamePatternError("syllable, speaker, and sex are required")
    return f"{meta.syllable}{meta.tone[1]}_{meta.speaker}"
