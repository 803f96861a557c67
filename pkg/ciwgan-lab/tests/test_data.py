"""WAV round-trips and dataset loading."""

from __future__ import annotations

import json
import os

import numpy as np
import pytest

from ciwgan_lab import DataError, OUTPUT_SAMPLES, load_dataset, read_wav, write_wav
from ciwgan_lab.data import _fit_length


def test_wav_roundtrip(tmp_path):
    rng = np.random.default_rng(0)
    samples = rng.uniform(-0.9, 0.9, 1234)
    path = str(tmp_path / "x.wav")
    write_wav(samples, path, 16000)
    back, rate = read_wav(path)
    assert rate == 16000
    assert back == pytest.approx(samples, abs=0.51 / 32768)


def test_fit_length_pads_and_crops():
    short = np.ones(100, dtype=np.float32)
    padded = _fit_length(short)
    assert len(padded) == OUTPUT_SAMPLES
    assert np.all(padded[:100] == 1.0) and np.all(padded[100:] == 0.0)
    long = np.arange(OUTPUT_SAMPLES + 100, dtype=np.float32)
    cropped = _fit_length(long)
    assert len(cropped) == OUTPUT_SAMPLES
    assert cropped[0] == 50.0  # center crop


def test_load_dataset_shapes(tone_corpus):
    data, labels = load_dataset(tone_corpus)
    assert data.shape == (16, 1, OUTPUT_SAMPLES)
    assert len(set(labels)) == 4


def test_single_category_rejected(tmp_path):
    write_wav(np.zeros(100), str(tmp_path / "a.wav"), 16000)
    manifest = tmp_path / "m.jsonl"
    manifest.write_text(
        json.dumps({"path": "a.wav", "token_id": "a", "source": "natural", "tone": "T1"})
        + "\n"
    )
    with pytest.raises(DataError, match="2 categories"):
        load_dataset(str(manifest))


def test_missing_file_rejected(tmp_path):
    manifest = tmp_path / "m.jsonl"
    manifest.write_text(
        json.dumps({"path": "nope.wav", "token_id": "a", "source": "natural", "tone": "T1"})
        + "\n"
    )
    with pytest.raises((DataError, OSError)):
        load_dataset(str(manifest))


def test_non_pcm_rejected(tmp_path):
    bad = tmp_path / "bad.wav"
    bad.write_bytes(b"RIFF" + b"\x00" * 64)
    with pytest.raises(DataError):
        read_wav(str(bad))
