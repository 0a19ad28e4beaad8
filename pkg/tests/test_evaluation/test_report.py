"""Tests for evaluation reports."""

from pathlib import Path

import pytest

from src.evaluation.report import (
    REPORT_HEADER,
    EvalReport,
    SceneResult,
    SweepRow,
    TimingRow,
    load_report,
)


class TestEvalReport:

    @pytest.fixture
    def report(self) -> EvalReport:
        return EvalReport(
            scenes=[
                SceneResult("scene_00000", psnr=20.0, ssim=0.5, baseline_psnr=12.0),
                SceneResult("scene_00001", psnr=24.0, ssim=0.7, baseline_psnr=14.0),
            ],
            sweep=[SweepRow(1, 18.0, 0.4), SweepRow(2, 21.0, 0.55)],
            timing=[TimingRow(1, 0.01, 5, 32), TimingRow(2, 0.02, 5, 48)],
            metadata={"checkpoint": "final.ckpt"},
        )

    def test_aggregates(self, report: EvalReport) -> None:
        assert report.mean_psnr == pytest.approx(22.0)
        assert report.mean_ssim == pytest.approx(0.6)
        assert report.baseline_psnr == pytest.approx(13.0)
        assert report.baseline_ssim is None

    def test_empty_report(self) -> None:
        assert EvalReport().mean_psnr is None

    def test_text_states_lpips_omission(self, report: EvalReport) -> None:
        text = report.to_text()
        assert text.splitlines()[0] == REPORT_HEADER
        assert "LPIPS omitted" in REPORT_HEADER
        assert "Input-view sweep" in text
        assert "Decode timing" in text
        assert "checkpoint: final.ckpt" in text

    def test_write_and_load(self, tmp_path: Path, report: EvalReport) -> None:
        report.write(tmp_path / "eval")
        assert (tmp_path / "eval" / "report.txt").is_file()
        data = load_report(tmp_path / "eval" / "report.yaml")
        assert data["aggregate"]["psnr"] == pytest.approx(22.0)
        assert [row["num_inputs"] for row in data["sweep"]] == [1, 2]
        assert data["timing"][1]["sequence_length"] == 48
        assert data["scenes"][0]["scene_id"] == "scene_00000"
        assert data["note"] == REPORT_HEADER
