"""Minimal 16-bit PCM WAV read/write for the lab's own corpora and exports."""

from __future__ import annotations

import struct

import numpy as np

from .errors import DataError


def write_wav(samples: np.ndarray, path: str, sample_rate: int = 16000) -> None:
    """Write mono float samples in [-1, 1] as 16-bit PCM."""
    ints = np.clip(np.rint(np.asarray(samples, dtype=np.float64) * 32768.0),
                   -32768, 32767).astype("<i2")
    raw = ints.tobytes()
    header = struct.pack(
        "<4sI4s4sIHHIIHH4sI",
        b"RIFF", 36 + len(raw), b"WAVE",
        b"fmt ", 16, 1, 1, sample_rate, sample_rate * 2, 2, 16,
        b"data", len(raw),
    )
    with open(path, "wb") as fh:
        fh.write(header + raw)


def read_wav(path: str) -> tuple[np.ndarray, int]:
    """Read a mono 16-bit PCM WAV produced by this lab or its test corpora."""
    with open(path, "rb") as fh:
        blob = fh.read()
    if len(blob) < 44 or blob[0:4] != b"RIFF" or blob[8:12] != b"WAVE":
        raise DataError(f"{path}: not a RIFF/WAVE file")
    pos = 12
    fmt = data = None
    while pos + 8 <= len(blob):
        cid = blob[pos : pos + 4]
        (size,) = struct.unpack_from("<I", blob, pos + 4)
        body = blob[pos + 8 : pos + 8 + size]
        if cid == b"fmt ":
            fmt = body
        elif cid == b"data":
            data = body
        pos += 8 + size + (size & 1)
    if fmt is None or data is None:
        raise DataError(f"{path}: missing fmt or data chunk")
    code, channels, rate, _, _, bits = struct.unpack_from("<HHIIHH", fmt, 0)
    if code != 1 or bits != 16 or channels != 1:
        raise DataError(f"{path}: expected mono 16-bit PCM, got code={code}, "
                        f"channels={channels}, bits={bits}")
    samples = np.frombuffer(data, dtype="<i2").astype(np.float32) / 32768.0
    return samples, rate
