"""Tests for the lvsm command-line entry point."""

from pathlib import Path

import pytest
import yaml

from src import __version__
from src.main import build_parser, dispatch
from src.training.metrics_log import read_metrics_log
from tests.test_pipeline.test_commands import tiny_run_data

REPO_ROOT = Path(__file__).resolve().parents[1]


@pytest.fixture
def config_file(tmp_path: Path) -> Path:
    path = tmp_path / "run.yaml"
    path.write_text(yaml.safe_dump(tiny_run_data(tmp_path)))
    return path


class TestParser:

    def test_sweep_counts(self) -> None:
        args = build_parser().parse_args(["eval", "--checkpoint", "x.ckpt", "--sweep", "1,2,4"])
        assert args.sweep == [1, 2, 4]

    def test_repeatable_overrides(self) -> None:
        argv = ["train", "--set", "seed=1", "--set", "train.batch_size=2"]
        args = build_parser().parse_args(argv)
        assert args.overrides == ["seed=1", "train.batch_size=2"]

    @pytest.mark.parametrize("counts", ["0,1", "a,b", ""])
    def test_bad_sweep_counts(self, counts: str) -> None:
        assert dispatch(["eval", "--checkpoint", "x.ckpt", "--sweep", counts]) == 2


class TestDispatch:

    def test_version(self, capsys: pytest.CaptureFixture) -> None:
        assert dispatch(["version"]) == 0
        assert capsys.readouterr().out.strip() == f"lvsm {__version__}"

    def test_no_command(self) -> None:
        assert dispatch([]) == 1

    def test_missing_required_argument(self) -> None:
        assert dispatch(["render", "--checkpoint", "x.ckpt"]) == 2

    def test_end_to_end(self, tmp_path: Path, config_file: Path) -> None:
        common = ["--config", str(config_file), "--log-level", "WARNING"]
        assert dispatch(["gen-data", *common]) == 0
        assert dispatch(["train", *common]) == 0
        log = read_metrics_log(tmp_path / "run" / "metrics.log")
        assert len(log) == 10
        checkpoint = tmp_path / "run" / "checkpoints" / "final.ckpt"
        report_dir = tmp_path / "report"
        eval_args = [
            "eval",
            *common,
            "--checkpoint",
            str(checkpoint),
            "--sweep",
            "1,2,4",
            "--output",
            str(report_dir),
        ]
        code = dispatch(eval_args)
        assert code == 0
        assert len(yaml.safe_load((report_dir / "report.yaml").read_text())["sweep"]) == 3
        scene = tmp_path / "eval" / "scene_00001"
        render_args = [
            "render",
            *common,
            "--checkpoint",
            str(checkpoint),
            "--inputs",
            str(scene),
            "--targets",
            str(scene / "cameras.json"),
            "--output",
            str(tmp_path / "renders"),
        ]
        code = dispatch(render_args)
        assert code == 0
        assert len(list((tmp_path / "renders").glob("render_*.png"))) == 5

    @pytest.mark.integration
    def test_short_training_on_default_config(
        self, tmp_path: Path, monkeypatch: pytest.MonkeyPatch
    ) -> None:
        monkeypatch.chdir(tmp_path)
        common = ["--config", str(REPO_ROOT / "config" / "default.yaml"), "--log-level", "WARNING"]
        assert dispatch(["gen-data", *common]) == 0
        assert dispatch(["train", *common, "--set", "train.total_steps=10"]) == 0
        run_dir = tmp_path / "runs" / "default"
        assert len(read_metrics_log(run_dir / "metrics.log")) == 10
        assert (run_dir / "checkpoints" / "final.ckpt").is_file()

    def test_deterministic_flag(self, tmp_path: Path, config_file: Path) -> None:
        common = ["--config", str(config_file), "--log-level", "WARNING", "--deterministic"]
        assert dispatch(["gen-data", *common]) == 0
        assert dispatch(["train", *common, "--set", "train.total_steps=4"]) == 0
        header = (tmp_path / "run" / "checkpoints" / "final.ckpt").read_bytes()
        assert b"float64" in header

    def test_error_exit_code(
        self, tmp_path: Path, config_file: Path, capsys: pytest.CaptureFixture
    ) -> None:
        code = dispatch(
            ["eval", "--config", str(config_file), "--checkpoint", str(tmp_path / "none.ckpt")]
        )
        assert code == 1
        err = capsys.readouterr().err.strip().splitlines()
        assert len(err) == 1
        assert err[0].startswith("lvsm eval: error:")

    def test_unknown_override(self, config_file: Path, capsys: pytest.CaptureFixture) -> None:
        assert dispatch(["gen-data", "--config", str(config_file), "--set", "data.colour=1"]) == 1
        assert "unknown config key 'data.colour'" in capsys.readouterr().err
