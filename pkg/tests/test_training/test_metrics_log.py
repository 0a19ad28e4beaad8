"""Tests for the per-step metrics log."""

from pathlib import Path

import pytest

from src.training.metrics_log import MetricsLog, StepMetrics, read_metrics_log


def metrics(step: int, skipped: bool = False) -> StepMetrics:
    return StepMetrics(step=step, loss=0.25 / step, grad_norm=1.5, lr=1e-4, skipped=skipped)


class TestStepMetrics:

    def test_line_has_five_fields(self) -> None:
        line = metrics(3, skipped=True).to_line()
        assert line.split()[0] == "3"
        assert line.split()[-1] == "1"
        assert len(line.split()) == 5

    def test_parse_line(self) -> None:
        parsed = StepMetrics.from_line("7 1.0e-02 2.5 3.0e-04 0")
        assert parsed == StepMetrics(step=7, loss=0.01, grad_norm=2.5, lr=3e-4, skipped=False)

    def test_bad_line(self) -> None:
        with pytest.raises(ValueError, match="5 fields"):
            StepMetrics.from_line("1 2 3")


class TestMetricsLog:

    def test_one_line_per_step(self, tmp_path: Path) -> None:
        path = tmp_path / "run" / "metrics.log"
        with MetricsLog(path) as log:
            for step in range(1, 4):
                log.write(metrics(step))
        assert path.read_text().count("\n") == 3
        assert [m.step for m in read_metrics_log(path)] == [1, 2, 3]

    def test_resume_drops_later_steps(self, tmp_path: Path) -> None:
        path = tmp_path / "metrics.log"
        with MetricsLog(path) as log:
            for step in range(1, 6):
                log.write(metrics(step))
        with MetricsLog(path, resume_step=3) as log:
            log.write(metrics(4, skipped=True))
        entries = read_metrics_log(path)
        assert [m.step for m in entries] == [1, 2, 3, 4]
        assert entries[-1].skipped

    def test_fresh_run_truncates(self, tmp_path: Path) -> None:
        path = tmp_path / "metrics.log"
        path.write_text("1 1.0 1.0 1.0 0\n")
        MetricsLog(path).close()
        assert read_metrics_log(path) == []

    def test_write_after_close(self, tmp_path: Path) -> None:
        log = MetricsLog(tmp_path / "metrics.log")
        log.close()
        with pytest.raises(ValueError, match="closed"):
            log.write(metrics(1))
