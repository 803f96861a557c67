"""Manifest scanning and corpus filename conventions."""

from __future__ import annotations

import json

import pytest

from tonelens import (
    FilenamePatternError,
    ManifestError,
    TokenMeta,
    format_corpus_filename,
    parse_corpus_filename,
    scan_manifest,
)


def write_manifest(tmp_path, lines):
    path = tmp_path / "manifest.jsonl"
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return str(path)


class TestScanManifest:
    def test_natural_record(self, tmp_path):
        path = write_manifest(
            tmp_path,
            ['{"path":"a.wav","token_id":"a","source":"natural","tone":"T4","sex":"male"}'],
        )
        [(meta, audio)] = scan_manifest(path)
        assert meta.token_id == "a"
        assert meta.source == "natural"
        assert meta.tone == "T4"
        assert meta.sex == "male"
        assert audio.endswith("a.wav")

    def test_generated_record(self, tmp_path):
        path = write_manifest(
            tmp_path, ['{"path":"g.wav","token_id":"g","source":"generated","c_index":2}']
        )
        [(meta, _)] = scan_manifest(path)
        assert meta.source == "generated"
        assert meta.c_index == 2

    def test_generated_without_c_index_fails(self, tmp_path):
        path = write_manifest(
            tmp_path, ['{"path":"g.wav","token_id":"g","source":"generated"}']
        )
        with pytest.raises(ManifestError, match="c_index"):
            scan_manifest(path)

    def test_unreadable_line_reports_line_number(self, tmp_path):
        path = write_manifest(
            tmp_path,
            ['{"path":"a.wav","token_id":"a","source":"natural","tone":"T1"}', "{oops"],
        )
        with pytest.raises(ManifestError, match=":2:"):
            scan_manifest(path)

    def test_layer_tap_requires_valid_layer(self, tmp_path):
        good = {"path": "t.wav", "token_id": "t", "source": "layer_tap",
                "c_index": 0, "layer_index": 3}
        [(meta, _)] = scan_manifest(write_manifest(tmp_path, [json.dumps(good)]))
        assert meta.layer_index == 3
        bad = dict(good, layer_index=5)
        with pytest.raises(ManifestError, match="layer_index"):
            scan_manifest(write_manifest(tmp_path, [json.dumps(bad)]))

    def test_relative_paths_resolve_against_manifest_dir(self, tmp_path):
        sub = tmp_path / "deep"
        sub.mkdir()
        path = sub / "manifest.jsonl"
        path.write_text(
            '{"path":"x.wav","token_id":"x","source":"natural","tone":"T1"}\n'
        )
        [(_, audio)] = scan_manifest(str(path))
        assert audio == str(sub / "x.wav")

    def test_unknown_fields_ignored(self, tmp_path):
        record = {"path": "a.wav", "token_id": "a", "source": "generated",
                  "c_index": 1, "warning": "all_zero_feature_map"}
        [(meta, _)] = scan_manifest(write_manifest(tmp_path, [json.dumps(record)]))
        assert meta.c_index == 1

    def test_entries_in_file_order(self, tmp_path):
        lines = [
            json.dumps({"path": f"{i}.wav", "token_id": f"tok{i}",
                        "source": "generated", "c_index": i % 4})
            for i in (3, 1, 2)
        ]
        entries = scan_manifest(write_manifest(tmp_path, lines))
        assert [m.token_id for m, _ in entries] == ["tok3", "tok1", "tok2"]


class TestFilenameConvention:
    def test_examples(self):
        meta = parse_corpus_filename("ma1_FV1.wav")
        assert (meta.syllable, meta.tone, meta.sex, meta.speaker) == (
            "ma", "T1", "female", "FV1"
        )
        meta = parse_corpus_filename("xiang4_MV3.wav")
        assert (meta.syllable, meta.tone, meta.sex, meta.speaker) == (
            "xiang", "T4", "male", "MV3"
        )

    def test_non_matching_name(self):
        with pytest.raises(FilenamePatternError):
            parse_corpus_filename("track01.wav")

    def test_directory_prefix_ignored(self):
        meta = parse_corpus_filename("/data/tone/ma3_MV2.wav")
        assert meta.tone == "T3"

    def test_format_parse_roundtrip_exhaustive(self):
        for syllable in ("ma", "ba", "xiang", "zhuang", "lu"):
            for tone_digit in "1234":
                for fm, sex in (("F", "female"), ("M", "male")):
                    for speaker_digit in "123":
                        speaker = f"{fm}V{speaker_digit}"
                        stem = f"{syllable}{tone_digit}_{speaker}"
                        meta = TokenMeta(
                            token_id=stem,
                            source="natural",
                            tone=f"T{tone_digit}",
                            sex=sex,
                            speaker=speaker,
                            syllable=syllable,
                        )
                        assert format_corpus_filename(meta) == stem
                        assert parse_corpus_filename(stem + ".wav") == meta


class TestTokenMetaInvariants:
    def test_natural_requires_tone(self):
        with pytest.raises(ManifestError, match="tone"):
            TokenMeta(token_id="x", source="natural")

    def test_layer_tap_requires_c_index(self):
        with pytest.raises(ManifestError, match="c_index"):
            TokenMeta(token_id="x", source="layer_tap", layer_index=2)

    def test_c_index_range(self):
        with pytest.raises(ManifestError, match="0..3"):
            TokenMeta(token_id="x", source="generated", c_index=4)

    def test_bad_source(self):
        with pytest.raises(ManifestError, match="source"):
            TokenMeta(token_id="x", source="other")
