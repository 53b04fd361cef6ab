import json

import numpy as np
import pytest

from curvecloud.cli import main


def t_glyph_pgm(tmp_path):
    px = np.full((16, 16), 255, dtype=np.uint8)
    px[2:5, 2:14] = 0
    px[5:14, 7:10] = 0
    path = tmp_path / "tee.pgm"
    with open(path, "wb") as fh:
        fh.write(b"P5\n16 16\n255\n" + px.tobytes())
    return str(path)


def toy_ndjson(tmp_path):
    t = np.linspace(0.0, 1.0, 50)
    arc = {"drawing": [[list(3 * t), list(2 * t * (1 - t))]], "word": "arc"}
    bent = {
        "strokes": [
            [[float(x), 0.0] for x in 4 * t] + [[4.0, float(y)] for y in 3 * t[1:]]
        ]
    }
    path = tmp_path / "toy.ndjson"
    path.write_text(json.dumps(arc) + "\n" + json.dumps(bent) + "\n")
    return str(path)


FAST = ["--iters", "40", "--max-degree", "6"]


class TestFitStrokeCommand:
    def test_writes_result_and_trace(self, tmp_path, capsys):
        src = toy_ndjson(tmp_path)
        out_json = str(tmp_path / "fit.json")
        out_csv = str(tmp_path / "fit.csv")
        rc = main(["fit-stroke", src, *FAST, "--out-json", out_json,
                   "--out-csv", out_csv])
        assert rc == 0
        doc = json.loads(open(out_json).read())
        assert 1 <= doc["degree"] <= 6
        assert len(doc["control_points"]) == 7
        assert "frame" in doc and doc["frame"]["scale"] > 0
        lines = open(out_csv).read().splitlines()
        assert lines[0] == "iter,fit,degree_reg,ctrl_reg,total"
        assert len(lines) == doc["iterations"] + 2
        assert (tmp_path / "fit.json.manifest.json").exists()

    def test_stdout_when_no_output_given(self, tmp_path, capsys):
        rc = main(["fit-stroke", toy_ndjson(tmp_path), *FAST])
        assert rc == 0
        doc = json.loads(capsys.readouterr().out)
        assert "degree" in doc

    def test_reruns_are_byte_identical(self, tmp_path):
        src = toy_ndjson(tmp_path)
        a = str(tmp_path / "a.json")
        b = str(tmp_path / "b.json")
        assert main(["fit-stroke", src, *FAST, "--out-json", a]) == 0
        assert main(["fit-stroke", src, *FAST, "--out-json", b]) == 0
        assert open(a, "rb").read() == open(b, "rb").read()

    def test_stroke_index_validated(self, tmp_path, capsys):
        rc = main(["fit-stroke", toy_ndjson(tmp_path), "--stroke", "5", *FAST])
        assert rc == 2
        assert "--stroke" in capsys.readouterr().err


class TestVectorizeCommand:
    def test_sequence_input(self, tmp_path, capsys):
        src = toy_ndjson(tmp_path)
        out_json = str(tmp_path / "sk.json")
        out_svg = str(tmp_path / "sk.svg")
        rc = main(["vectorize", src, *FAST, "--out-json", out_json,
                   "--out-svg", out_svg])
        assert rc == 0
        summary = json.loads(capsys.readouterr().out)
        assert summary["strokes"] >= 1
        assert open(out_json).read().startswith('{"schema":"curvecloud-1"')
        assert "<svg" in open(out_svg).read()
        manifest = json.loads(open(out_json + ".manifest.json").read())
        assert manifest["config"]["iters"] == 40

    def test_corner_splitting_happens(self, tmp_path, capsys):
        src = toy_ndjson(tmp_path)
        rc = main(["vectorize", src, "--index", "1", *FAST,
                   "--out-json", str(tmp_path / "bent.json")])
        assert rc == 0
        summary = json.loads(capsys.readouterr().out)
        assert summary["strokes"] == 2

    def test_raster_t_gives_three_curves(self, tmp_path, capsys):
        pgm = t_glyph_pgm(tmp_path)
        rc = main(["vectorize", pgm, *FAST,
                   "--out-json", str(tmp_path / "t.json")])
        assert rc == 0
        assert json.loads(capsys.readouterr().out)["strokes"] == 3
        doc = json.loads(open(tmp_path / "t.json").read())
        assert len(doc["curves"]) == 3

    def test_segment_then_vectorize_matches_direct(self, tmp_path):
        pgm = t_glyph_pgm(tmp_path)
        seg = str(tmp_path / "seg.ndjson")
        direct = str(tmp_path / "direct.json")
        via = str(tmp_path / "via.json")
        dsvg = str(tmp_path / "direct.svg")
        vsvg = str(tmp_path / "via.svg")
        assert main(["segment", pgm, "--out-json", seg]) == 0
        assert main(["vectorize", pgm, *FAST, "--out-json", direct,
                     "--out-svg", dsvg]) == 0
        assert main(["vectorize", seg, *FAST, "--out-json", via,
                     "--out-svg", vsvg]) == 0
        assert open(direct, "rb").read() == open(via, "rb").read()
        assert open(dsvg, "rb").read() == open(vsvg, "rb").read()

    def test_reruns_are_byte_identical(self, tmp_path):
        pgm = t_glyph_pgm(tmp_path)
        a = str(tmp_path / "a.json")
        b = str(tmp_path / "b.json")
        assert main(["vectorize", pgm, *FAST, "--out-json", a]) == 0
        assert main(["vectorize", pgm, *FAST, "--out-json", b]) == 0
        assert open(a, "rb").read() == open(b, "rb").read()


class TestSegmentCommand:
    def test_emits_ndjson(self, tmp_path, capsys):
        rc = main(["segment", t_glyph_pgm(tmp_path)])
        assert rc == 0
        doc = json.loads(capsys.readouterr().out)
        assert doc["source"] == "raster"
        assert len(doc["strokes"]) == 3

    def test_rejects_non_pgm(self, tmp_path, capsys):
        src = toy_ndjson(tmp_path)
        rc = main(["segment", src])
        assert rc == 2
        assert ".pgm" in capsys.readouterr().err


class TestEvalCommand:
    def test_matches_vectorize_report(self, tmp_path, capsys):
        pgm = t_glyph_pgm(tmp_path)
        out = str(tmp_path / "t.json")
        assert main(["vectorize", pgm, *FAST, "--out-json", out]) == 0
        reported = json.loads(capsys.readouterr().out)["mean_test_loss"]
        assert main(["eval", out, pgm, *FAST]) == 0
        printed = float(capsys.readouterr().out)
        assert printed == pytest.approx(reported, rel=1e-12)

    def test_combined_loss_rejected(self, tmp_path, capsys):
        pgm = t_glyph_pgm(tmp_path)
        out = str(tmp_path / "t.json")
        main(["vectorize", pgm, *FAST, "--out-json", out])
        capsys.readouterr()
        rc = main(["eval", out, pgm, "--loss", "swd+mse"])
        assert rc == 2
        assert "--loss" in capsys.readouterr().err


class TestStatsCommand:
    def test_histogram_csv(self, tmp_path, capsys):
        pgm = t_glyph_pgm(tmp_path)
        out = str(tmp_path / "t.json")
        main(["vectorize", pgm, *FAST, "--out-json", out])
        capsys.readouterr()
        rc = main(["stats", out])
        assert rc == 0
        lines = capsys.readouterr().out.splitlines()
        assert lines[0] == "kind,value,count"
        strokes = [l for l in lines[1:] if l.startswith("stroke,")]
        assert sum(int(l.split(",")[2]) for l in strokes) == 3
        assert sum(1 for l in lines[1:] if l.startswith("sketch,")) == 1

    def test_csv_file_written_with_manifest(self, tmp_path, capsys):
        pgm = t_glyph_pgm(tmp_path)
        out = str(tmp_path / "t.json")
        main(["vectorize", pgm, *FAST, "--out-json", out])
        csv = str(tmp_path / "hist.csv")
        assert main(["stats", out, "--out-csv", csv]) == 0
        assert open(csv).read().startswith("kind,value,count")
        assert (tmp_path / "hist.csv.manifest.json").exists()


class TestFlagValidation:
    @pytest.mark.parametrize(
        "flags,needle",
        [
            (["--iters", "0"], "--iters"),
            (["--lr", "0"], "--lr"),
            (["--max-degree", "0"], "--max-degree"),
            (["--granularity", "5"], "--granularity"),
            (["--tau", "0"], "--tau"),
            (["--slices", "0"], "--slices"),
            (["--lambda-d", "-1"], "--lambda-d"),
            (["--lambda-c", "-1"], "--lambda-c"),
        ],
    )
    def test_bad_flag_names_itself(self, tmp_path, capsys, flags, needle):
        rc = main(["fit-stroke", toy_ndjson(tmp_path), *flags])
        assert rc == 2
        assert needle in capsys.readouterr().err

    def test_bad_angle_thresh(self, tmp_path, capsys):
        rc = main(["vectorize", toy_ndjson(tmp_path), "--angle-thresh", "200"])
        assert rc == 2
        assert "--angle-thresh" in capsys.readouterr().err

    def test_missing_input_fails_cleanly(self, tmp_path, capsys):
        rc = main(["vectorize", str(tmp_path / "nope.ndjson")])
        assert rc == 1
        assert "error" in capsys.readouterr().err

    def test_unknown_loss_is_an_argparse_error(self, tmp_path):
        with pytest.raises(SystemExit):
            main(["fit-stroke", toy_ndjson(tmp_path), "--loss", "emd"])
