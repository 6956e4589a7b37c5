"""Command-line surface: subcommand flows, determinism, exit codes."""

from __future__ import annotations

import json
import shutil
import subprocess
import sys

import pytest

from sketchlayout.cli import main
from sketchlayout.metrics import read_report


def dir_bytes(directory, pattern="*.jsonl"):
    return {p.name: p.read_bytes() for p in sorted(directory.glob(pattern))}


class TestSynthCommand:
    def test_deterministic_across_runs(self, toy_data_dir, tmp_path):
        args = ["synth", "--layouts", str(toy_data_dir / "layouts"),
                "--primitives", str(toy_data_dir / "primitives.jsonl"),
                "--coverage", "1.0", "--k", "10", "--seed", "42"]
        out_a = tmp_path / "a"
        out_b = tmp_path / "b"
        assert main([*args, "--out", str(out_a)]) == 0
        assert main([*args, "--out", str(out_b)]) == 0
        bytes_a = dir_bytes(out_a)
        bytes_b = dir_bytes(out_b)
        assert len(bytes_a) == 20
        assert bytes_a == bytes_b

    def test_summary_written(self, toy_data_dir, tmp_path):
        out = tmp_path / "out"
        assert main(["synth", "--layouts", str(toy_data_dir / "layouts"),
                     "--primitives", str(toy_data_dir / "primitives.jsonl"),
                     "--out", str(out)]) == 0
        summary = json.loads((out / "summary.json").read_text())
        assert summary["written"] == 20
        assert summary["failed"] == 0

    def test_seed_changes_output(self, toy_data_dir, tmp_path):
        base = ["synth", "--layouts", str(toy_data_dir / "layouts"),
                "--primitives", str(toy_data_dir / "primitives.jsonl")]
        out_a = tmp_path / "a"
        out_b = tmp_path / "b"
        main([*base, "--seed", "1", "--out", str(out_a)])
        main([*base, "--seed", "2", "--out", str(out_b)])
        assert dir_bytes(out_a) != dir_bytes(out_b)


class TestRenderCommand:
    def test_layout_to_svg(self, toy_data_dir, tmp_path):
        out = tmp_path / "layout.svg"
        assert main(["render", "--input",
                     str(toy_data_dir / "layouts" / "toy_000.json"),
                     "--out", str(out)]) == 0
        assert out.read_bytes().startswith(b"<?xml")

    def test_sketch_to_svg_and_pgm(self, toy_data_dir, tmp_path):
        sketches = tmp_path / "sketches"
        main(["synth", "--layouts", str(toy_data_dir / "layouts"),
              "--primitives", str(toy_data_dir / "primitives.jsonl"),
              "--out", str(sketches)])
        sketch = sketches / "toy_000.jsonl"
        svg_out = tmp_path / "sketch.svg"
        pgm_out = tmp_path / "sketch.pgm"
        assert main(["render", "--input", str(sketch),
                     "--out", str(svg_out)]) == 0
        assert b"<polyline" in svg_out.read_bytes()
        assert main(["render", "--input", str(sketch), "--format", "pgm",
                     "--width", "256", "--out", str(pgm_out)]) == 0
        assert pgm_out.read_bytes().startswith(b"P5\n256 256\n255\n")


class TestEvalCommand:
    def test_pred_equals_ref_scores_one(self, toy_data_dir, tmp_path):
        report_path = tmp_path / "report.jsonl"
        assert main(["eval", "--pred", str(toy_data_dir / "layouts"),
                     "--ref", str(toy_data_dir / "layouts"),
                     "--out", str(report_path),
                     "--csv", str(tmp_path / "report.csv")]) == 0
        report, trailer = read_report(report_path)
        assert trailer["count"] == 20
        for metric in ("iou", "miou", "cos"):
            assert trailer["aggregate"][metric]["mean"] == pytest.approx(1.0)
        assert (tmp_path / "report.csv").read_text().count("\n") == 21

    def test_missing_predictions_flagged(self, toy_data_dir, tmp_path):
        pred_dir = tmp_path / "pred"
        pred_dir.mkdir()
        shutil.copy(toy_data_dir / "layouts" / "toy_000.json",
                    pred_dir / "toy_000.json")
        report_path = tmp_path / "report.jsonl"
        main(["eval", "--pred", str(pred_dir),
              "--ref", str(toy_data_dir / "layouts"),
              "--out", str(report_path)])
        report, _ = read_report(report_path)
        missing = [s for s in report.samples if s.missing]
        assert len(missing) == 19


def toy_corpus_as_coco(toy_data_dir, out_path):
    """Re-encode the bundled toy layouts as one COCO annotation file."""
    from sketchlayout.layout import parse_layout_document

    label_to_category = {"text": 1, "title": 2, "figure": 3, "picture": 3}
    images, annotations = [], []
    ann_id = 1
    for image_id, path in enumerate(
            sorted((toy_data_dir / "layouts").glob("*.json")), start=1):
        layout = parse_layout_document(path.read_bytes())
        images.append({"id": image_id, "file_name": f"{path.stem}.png",
                       "width": layout.canvas.width,
                       "height": layout.canvas.height})
        for asset in layout.assets:
            annotations.append({
                "id": ann_id, "image_id": image_id,
                "category_id": label_to_category[asset.label],
                "bbox": [asset.bbox.xmin, asset.bbox.ymin,
                         asset.bbox.width, asset.bbox.height]})
            ann_id += 1
    categories = [{"id": 1, "name": "text"}, {"id": 2, "name": "title"},
                  {"id": 3, "name": "figure"}]
    out_path.write_text(json.dumps({
        "images": images, "annotations": annotations,
        "categories": categories}), encoding="utf-8")


class TestPipeline:
    def test_full_pipeline_on_toy_corpus(self, toy_data_dir, tmp_path):
        """ingest -> synth -> parse -> eval on the bundled 20-layout corpus."""
        coco_path = tmp_path / "toy_coco.json"
        toy_corpus_as_coco(toy_data_dir, coco_path)
        ingested = tmp_path / "ingested"
        assert main(["ingest", "--dataset", "publaynet",
                     "--annotations", str(coco_path),
                     "--out", str(ingested)]) == 0
        layouts = ingested / "layouts"
        assert len(list(layouts.glob("*.json"))) == 20

        sketches = tmp_path / "sketches"
        predicted = tmp_path / "predicted"
        report_path = tmp_path / "report.jsonl"
        assert main(["synth", "--layouts", str(layouts),
                     "--primitives", str(toy_data_dir / "primitives.jsonl"),
                     "--seed", "42", "--out", str(sketches)]) == 0
        assert main(["parse", "--sketches", str(sketches),
                     "--assets", str(layouts),
                     "--out", str(predicted)]) == 0
        assert len(list(predicted.glob("*.json"))) == 20
        assert main(["eval", "--pred", str(predicted),
                     "--ref", str(layouts),
                     "--out", str(report_path)]) == 0
        report, trailer = read_report(report_path)
        assert trailer["count"] == 20
        assert len(report.samples) == 20
        assert trailer["aggregate"]["miou"]["mean"] > 0.5


class TestJobs:
    def test_env_overrides_flag(self, monkeypatch):
        from sketchlayout.cli import _effective_jobs
        monkeypatch.setenv("S2L_JOBS", "3")
        assert _effective_jobs(8) == 3
        monkeypatch.delenv("S2L_JOBS")
        assert _effective_jobs(8) == 8
        assert _effective_jobs(None) >= 1

    def test_synth_respects_env_jobs(self, toy_data_dir, tmp_path, monkeypatch):
        monkeypatch.setenv("S2L_JOBS", "2")
        out = tmp_path / "out"
        assert main(["synth", "--layouts", str(toy_data_dir / "layouts"),
                     "--primitives", str(toy_data_dir / "primitives.jsonl"),
                     "--jobs", "1", "--seed", "42", "--out", str(out)]) == 0
        assert len(list(out.glob("*.jsonl"))) == 20


class TestExitCodes:
    def test_usage_error_is_2(self):
        with pytest.raises(SystemExit) as exit_info:
            main(["synth", "--nonsense"])
        assert exit_info.value.code == 2

    def test_runtime_failure_is_1(self, tmp_path, capsys):
        code = main(["synth", "--layouts", str(tmp_path / "missing"),
                     "--primitives", str(tmp_path / "nope.jsonl"),
                     "--out", str(tmp_path / "out")])
        assert code == 1
        err = capsys.readouterr().err
        error_line = [line for line in err.splitlines() if line.startswith("{")]
        assert error_line, err
        assert "error" in json.loads(error_line[-1])

    def test_module_entry_point(self, toy_data_dir, tmp_path):
        result = subprocess.run(
            [sys.executable, "-m", "sketchlayout", "render",
             "--input", str(toy_data_dir / "layouts" / "toy_000.json"),
             "--out", str(tmp_path / "out.svg")],
            capture_output=True, text=True, timeout=60)
        assert result.returncode == 0, result.stderr
        assert (tmp_path / "out.svg").exists()
