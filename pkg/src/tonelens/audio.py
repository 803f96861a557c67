"""WAV ingestion, full-scale normalization, and linear resampling.

The parser is deliberately hand-rolled over ``struct``/``numpy`` rather than
the stdlib ``wave`` module: it must accept 8/16/24/32-bit integer PCM and
32-bit float data, reject compressed codecs with a distinct error, and scale
every format to [-1, 1] by its documented full-scale value.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np

from .errors import AudioFormatError, EmptyAudioError, UnsupportedCodecError
from ._validation import check_positive

PIPELINE_RATE = 16_000

_WAVE_FORMAT_PCM = 0x0001
_WAVE_FORMAT_IEEE_FLOAT = 0x0003
_WAVE_FORMAT_EXTENSIBLE = 0xFFFE

_CODEC_NAMES = {
    0x0002: "ADPCM",
    0x0006: "A-law",
    0x0007: "mu-law",
    0x0011: "IMA ADPCM",
    0x0055: "MPEG layer 3",
}


@dataclass
class AudioClip:
    """Mono sample buffer plus rate; the per-file unit of analysis.

    ``samples`` is float64 in [-1, 1] after ingestion normalization.
    """

    samples: np.ndarray
    sample_rate: int
    token_id: str = ""

    def __post_init__(self) -> None:
        self.samples = np.asarray(self.samples, dtype=np.float64)
        self.sample_rate = int(self.sample_rate)
        check_positive(self.sample_rate, "sample_rate")

    @property
    def duration(self) -> float:
        """Clip length in seconds."""
        return len(self.samples) / self.sample_rate

    def __len__(self) -> int:
        return len(self.samples)


def _read_chunks(data: bytes) -> dict[bytes, bytes]:
    """Walk RIFF chunks, returning the first occurrence of each chunk id."""
    if len(data) < 12:
        raise AudioFormatError("file too short for a RIFF header")
    if data[0:4] != b"RIFF" or data[8:12] != b"WAVE":
        raise AudioFormatError("not a RIFF/WAVE file")
    chunks: dict[bytes, bytes] = {}
    pos = 12
    while pos + 8 <= len(data):
        cid = data[pos : pos + 4]
        (size,) = struct.unpack_from("<I", data, pos + 4)
        body = data[pos + 8 : pos + 8 + size]
        if len(body) < size and cid != b"data":
            raise AudioFormatError(f"truncated {cid!r} chunk")
        chunks.setdefault(cid, body)
        pos += 8 + size + (size & 1)  # chunks are word-aligned
    return chunks


def _parse_fmt(body: bytes) -> tuple[int, int, int, int]:
    """Return (format_code, channels, sample_rate, bits_per_sample)."""
    if len(body) < 16:
        raise AudioFormatError("fmt chunk shorter than 16 bytes")
    fmt_code, channels, rate, _byte_rate, _block_align, bits = struct.unpack_from(
        "<HHIIHH", body, 0
    )
    if fmt_code == _WAVE_FORMAT_EXTENSIBLE:
        # sub-format GUID starts with the real format code
        if len(body) < 26:
            raise AudioFormatError("extensible fmt chunk missing sub-format")
        (fmt_code,) = struct.unpack_from("<H", body, 24)
    return fmt_code, channels, rate, bits


def _decode_samples(raw: bytes, fmt_code: int, bits: int, channels: int) -> np.ndarray:
    """Decode interleaved frames to float64 scaled by the format's full scale."""
    if fmt_code == _WAVE_FORMAT_IEEE_FLOAT:
        if bits != 32:
            raise UnsupportedCodecError(f"{bits}-bit float WAV is not supported")
        data = np.frombuffer(raw, dtype="<f4").astype(np.float64)
        data = np.clip(data, -1.0, 1.0)
    elif fmt_code == _WAVE_FORMAT_PCM:
        if bits == 8:
            # 8-bit WAV is unsigned with a 128 offset
            data = (np.frombuffer(raw, dtype=np.uint8).astype(np.float64) - 128.0) / 128.0
        elif bits == 16:
            data = np.frombuffer(raw, dtype="<i2").astype(np.float64) / 32768.0
        elif bits == 24:
            b = np.frombuffer(raw, dtype=np.uint8)
            if len(b) % 3:
                raise AudioFormatError("24-bit data chunk is not a whole number of samples")
            b = b.reshape(-1, 3).astype(np.int64)
            ints = b[:, 0] | (b[:, 1] << 8) | (b[:, 2] << 16)
            ints -= (ints & 0x800000) << 1  # sign-extend
            data = ints.astype(np.float64) / 8388608.0
        elif bits == 32:
            data = np.frombuffer(raw, dtype="<i4").astype(np.float64) / 2147483648.0
        else:
            raise UnsupportedCodecError(f"{bits}-bit integer PCM is not supported")
    else:
        name = _CODEC_NAMES.get(fmt_code, f"format 0x{fmt_code:04X}")
        raise UnsupportedCodecError(f"compressed/non-PCM codec ({name}) is not supported")

    if channels > 1:
        if len(data) % channels:
            raise AudioFormatError("data chunk is not a whole number of frames")
        data = data.reshape(-1, channels).mean(axis=1)
    return data


def load_wav(path: str, token_id: str | None = None) -> AudioClip:
    """Load a RIFF/WAVE file as a mono, full-scale-normalized AudioClip.

    Stereo is averaged per sample. Raises :class:`AudioFormatError` for a
    malformed container, :class:`UnsupportedCodecError` for non-PCM codecs,
    and :class:`EmptyAudioError` for a zero-length data chunk.
    """
    with open(path, "rb") as fh:
        blob = fh.read()
    chunks = _read_chunks(blob)
    if b"fmt " not in chunks:
        raise AudioFormatError("missing fmt chunk")
    if b"data" not in chunks:
        raise AudioFormatError("missing data chunk")
    fmt_code, channels, rate, bits = _parse_fmt(chunks[b"fmt "])
    if channels not in (1, 2):
        raise AudioFormatError(f"only mono/stereo supported, got {channels} channels")
    if rate <= 0:
        raise AudioFormatError(f"invalid sample rate {rate}")
    raw = chunks[b"data"]
    if len(raw) == 0:
        raise EmptyAudioError(f"{path}: zero-length data chunk")
    samples = _decode_samples(raw, fmt_code, bits, channels)
    if len(samples) == 0:
        raise EmptyAudioError(f"{path}: no decodable samples")
    return AudioClip(samples=samples, sample_rate=rate, token_id=token_id or "")


def save_wav(clip: AudioClip, path: str) -> None:
    """Write a clip as 16-bit mono PCM.

    Values on the 1/32768 grid round-trip bit-exactly through load_wav.
    """
    ints = np.clip(np.rint(clip.samples * 32768.0), -32768, 32767).astype("<i2")
    raw = ints.tobytes()
    header = struct.pack(
        "<4sI4s4sIHHIIHH4sI",
        b"RIFF",
        36 + len(raw),
        b"WAVE",
        b"fmt ",
        16,
        _WAVE_FORMAT_PCM,
        1,
        clip.sample_rate,
        clip.sample_rate * 2,
        2,
        16,
        b"data",
        len(raw),
    )
    with open(path, "wb") as fh:
        fh.write(header + raw)


def resample(clip: AudioClip, target_rate: int) -> AudioClip:
    """Linearly interpolate a clip onto the target-rate time grid.

    Output duration equals input duration within one output sample period.
    F0 analysis tops out at 350 Hz, far below Nyquist at any corpus rate, so
    linear interpolation's rolloff is immaterial here.
    """
    check_positive(target_rate, "target_rate")
    target_rate = int(target_rate)
    if target_rate == clip.sample_rate:
        return clip
    n_in = len(clip.samples)
    if n_in == 0:
        raise EmptyAudioError("cannot resample an empty clip")
    n_out = max(1, round(n_in * target_rate / clip.sample_rate))
    positions = np.arange(n_out) * (clip.sample_rate / target_rate)
    out = np.interp(positions, np.arange(n_in), clip.samples)
    return AudioClip(samples=out, sample_rate=target_rate, token_id=clip.token_id)
