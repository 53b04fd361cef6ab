import json

import numpy as np
import pytest

from curvecloud.io import (
    RunManifest,
    SketchRecord,
    read_ndjson,
    read_pgm,
    read_raster,
)


def t_glyph_pixels() -> np.ndarray:
    px = np.full((16, 16), 255, dtype=np.uint8)
    px[2:5, 2:14] = 0
    px[5:14, 7:10] = 0
    return px


def write_pgm(path, pixels, magic=b"P5", maxval=255, comment=True):
    h, w = pixels.shape
    with open(path, "wb") as fh:
        fh.write(magic + b"\n")
        if comment:
            fh.write(b"# test image\n")
        fh.write(f"{w} {h}\n{maxval}\n".encode())
        if magic == b"P5":
            fh.write(pixels.tobytes())
        else:
            fh.write(" ".join(str(int(v)) for v in pixels.ravel()).encode())
    return str(path)


class TestSketchRecord:
    def test_holds_polylines(self):
        rec = SketchRecord((np.zeros((3, 2)),), label="cat")
        assert len(rec.strokes) == 1
        assert rec.label == "cat"
        assert rec.source == "sequence"

    def test_bad_source_rejected(self):
        with pytest.raises(ValueError):
            SketchRecord((np.zeros((3, 2)),), source="scan")

    def test_short_stroke_rejected(self):
        with pytest.raises(ValueError):
            SketchRecord((np.zeros((1, 2)),))

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            SketchRecord(())

    def test_non_finite_rejected(self):
        with pytest.raises(ValueError):
            SketchRecord((np.array([[0.0, 0.0], [np.nan, 1.0]]),))


class TestReadNdjson:
    def test_drawing_layout(self, tmp_path):
        path = tmp_path / "one.ndjson"
        path.write_text('{"drawing": [[[0,1],[0,0]]]}\n')
        records = read_ndjson(str(path))
        assert len(records) == 1
        assert np.array_equal(records[0].strokes[0], [[0.0, 0.0], [1.0, 0.0]])

    def test_strokes_layout_and_label(self, tmp_path):
        path = tmp_path / "two.ndjson"
        path.write_text('{"strokes": [[[0,0],[1,2],[3,1]]], "label": "zig"}\n')
        (rec,) = read_ndjson(str(path))
        assert rec.label == "zig"
        assert rec.strokes[0].shape == (3, 2)

    def test_word_field_used_as_label(self, tmp_path):
        path = tmp_path / "w.ndjson"
        path.write_text('{"drawing": [[[0,5],[0,5]]], "word": "line"}\n')
        (rec,) = read_ndjson(str(path))
        assert rec.label == "line"

    def test_extra_channels_ignored(self, tmp_path):
        # raw exports carry a time channel after x and y
        path = tmp_path / "raw.ndjson"
        path.write_text('{"drawing": [[[0,1,2],[0,0,1],[10,20,30]]]}\n')
        (rec,) = read_ndjson(str(path))
        assert np.array_equal(rec.strokes[0], [[0, 0], [1, 0], [2, 1]])

    def test_malformed_line_skipped_with_warning(self, tmp_path):
        path = tmp_path / "mix.ndjson"
        path.write_text('not json at all\n{"drawing": [[[0,1],[0,0]]]}\n')
        with pytest.warns(UserWarning, match="skipping sketch"):
            records = read_ndjson(str(path))
        assert len(records) == 1

    def test_single_point_strokes_dropped(self, tmp_path):
        path = tmp_path / "dot.ndjson"
        path.write_text('{"drawing": [[[5],[5]], [[0,1],[0,0]]]}\n')
        (rec,) = read_ndjson(str(path))
        assert len(rec.strokes) == 1

    def test_all_dots_line_is_malformed(self, tmp_path):
        path = tmp_path / "dots.ndjson"
        path.write_text('{"drawing": [[[5],[5]]]}\n{"drawing": [[[0,1],[0,0]]]}\n')
        with pytest.warns(UserWarning):
            records = read_ndjson(str(path))
        assert len(records) == 1

    def test_blank_lines_skipped_silently(self, tmp_path):
        path = tmp_path / "blank.ndjson"
        path.write_text('\n{"drawing": [[[0,1],[0,0]]]}\n\n')
        assert len(read_ndjson(str(path))) == 1

    def test_empty_file_rejected(self, tmp_path):
        path = tmp_path / "empty.ndjson"
        path.write_text("")
        with pytest.raises(ValueError, match="no valid sketch"):
            read_ndjson(str(path))

    def test_all_malformed_rejected(self, tmp_path):
        path = tmp_path / "bad.ndjson"
        path.write_text("{}\n[1,2,3]\n")
        with pytest.warns(UserWarning):
            with pytest.raises(ValueError, match="no valid sketch"):
                read_ndjson(str(path))

    def test_mismatched_xy_lengths_skipped(self, tmp_path):
        path = tmp_path / "rag.ndjson"
        path.write_text('{"drawing": [[[0,1,2],[0,0]]]}\n{"drawing": [[[0,1],[0,0]]]}\n')
        with pytest.warns(UserWarning, match="differ in length"):
            records = read_ndjson(str(path))
        assert len(records) == 1

    def test_missing_file_raises(self, tmp_path):
        with pytest.raises(OSError):
            read_ndjson(str(tmp_path / "nope.ndjson"))


class TestReadPgm:
    def test_binary_with_comment(self, tmp_path):
        px = t_glyph_pixels()
        img = read_pgm(write_pgm(tmp_path / "t.pgm", px))
        assert (img.width, img.height) == (16, 16)
        assert np.array_equal(img.pixels, px)

    def test_ascii_variant(self, tmp_path):
        px = t_glyph_pixels()
        img = read_pgm(write_pgm(tmp_path / "t2.pgm", px, magic=b"P2"))
        assert np.array_equal(img.pixels, px)

    def test_small_maxval_rescaled(self, tmp_path):
        px = np.array([[0, 50], [100, 100]], dtype=np.uint8)
        img = read_pgm(write_pgm(tmp_path / "s.pgm", px, maxval=100))
        assert np.array_equal(img.pixels, [[0, 127], [255, 255]])

    def test_unsupported_magic_rejected(self, tmp_path):
        path = tmp_path / "x.pbm"
        path.write_bytes(b"P4\n2 2\n\x00")
        with pytest.raises(ValueError, match="unsupported format"):
            read_pgm(str(path))

    def test_truncated_raster_rejected(self, tmp_path):
        path = tmp_path / "trunc.pgm"
        path.write_bytes(b"P5\n4 4\n255\n\x00\x00")
        with pytest.raises(ValueError, match="truncated"):
            read_pgm(str(path))

    def test_wide_maxval_rejected(self, tmp_path):
        path = tmp_path / "wide.pgm"
        path.write_bytes(b"P5\n1 1\n65535\n\x00\x00")
        with pytest.raises(ValueError, match="maxval"):
            read_pgm(str(path))

    def test_truncated_header_rejected(self, tmp_path):
        path = tmp_path / "head.pgm"
        path.write_bytes(b"P5\n4")
        with pytest.raises(ValueError, match="header"):
            read_pgm(str(path))


class TestReadRaster:
    def test_t_glyph_gives_three_ordered_strokes(self, tmp_path):
        path = write_pgm(tmp_path / "t.pgm", t_glyph_pixels())
        rec = read_raster(path)
        assert rec.source == "raster"
        assert len(rec.strokes) == 3
        lefts = [s[:, 0].min() for s in rec.strokes]
        assert lefts == sorted(lefts)

    def test_single_bar_is_one_stroke(self, tmp_path):
        px = np.full((9, 16), 255, dtype=np.uint8)
        px[3:6, 2:14] = 0
        rec = read_raster(write_pgm(tmp_path / "bar.pgm", px))
        assert len(rec.strokes) == 1

    def test_blank_image_is_empty_ink(self, tmp_path):
        px = np.full((8, 8), 255, dtype=np.uint8)
        with pytest.raises(ValueError, match="empty ink"):
            read_raster(write_pgm(tmp_path / "blank.pgm", px))

    def test_deterministic(self, tmp_path):
        path = write_pgm(tmp_path / "t.pgm", t_glyph_pixels())
        a = read_raster(path)
        b = read_raster(path)
        assert all(np.array_equal(x, y) for x, y in zip(a.strokes, b.strokes))


class TestRunManifest:
    def test_json_is_stable_and_sorted(self):
        m = RunManifest(
            command="vectorize",
            inputs=("a.ndjson",),
            outputs=("a.json",),
            config={"iters": 500, "lr": 0.02},
            seed=3,
            outcomes=("strokes=2",),
        )
        text = m.to_json()
        assert text == m.to_json()
        doc = json.loads(text)
        assert doc["command"] == "vectorize"
        assert doc["seed"] == 3
        assert list(doc) == sorted(doc)

    def test_write_beside_names_the_manifest(self, tmp_path):
        m = RunManifest("stats", (), ("out.csv",), {}, 0)
        out = tmp_path / "out.csv"
        path = m.write_beside(str(out))
        assert path.endswith("out.csv.manifest.json")
        assert json.loads(open(path).read())["command"] == "stats"
