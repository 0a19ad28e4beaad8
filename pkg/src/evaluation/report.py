"""Evaluation reports: a text table plus a YAML file."""

from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

import numpy as np
import yaml

from src.utils.logger import get_logger

logger = get_logger(__name__)

REPORT_HEADER = "LVSM evaluation report (PSNR/SSIM; LPIPS omitted: it needs a pretrained network)"


@dataclass
class SceneResult:
    """Metrics for one scene, averaged over its target views."""

    scene_id: str
    psnr: float
    ssim: float
    baseline_psnr: Optional[float] = None
    baseline_ssim: Optional[float] = None
    num_inputs: int = 0
    num_targets: int = 0


@dataclass
class SweepRow:
    """Mean metrics when rendering with the first ``num_inputs`` input views."""

    num_inputs: int
    psnr: float
    ssim: float


@dataclass
class TimingRow:
    """Median decode seconds per target view at one input-view count."""

    num_inputs: int
    median_seconds: float
    repetitions: int
    sequence_length: int
    outputs_identical: bool = True


def _mean(values: List[Optional[float]]) -> Optional[float]:
    present = [v for v in values if v is not None]
    return float(np.mean(present)) if present else None


@dataclass
class EvalReport:
    """Per-scene and aggregate metrics, optional sweep and timing tables."""

    scenes: List[SceneResult] = field(default_factory=list)
    sweep: List[SweepRow] = field(default_factory=list)
    timing: List[TimingRow] = field(default_factory=list)
    metadata: Dict[str, Any] = field(default_factory=dict)

    @property
    def mean_psnr(self) -> Optional[float]:
        return _mean([s.psnr for s in self.scenes])

    @property
    def mean_ssim(self) -> Optional[float]:
        return _mean([s.ssim for s in self.scenes])

    @property
    def baseline_psnr(self) -> Optional[float]:
        return _mean([s.baseline_psnr for s in self.scenes])

    @property
    def baseline_ssim(self) -> Optional[float]:
        return _mean([s.baseline_ssim for s in self.scenes])

    def aggregate(self) -> Dict[str, Optional[float]]:
        return {
            "psnr": self.mean_psnr,
            "ssim": self.mean_ssim,
            "baseline_psnr": self.baseline_psnr,
            "baseline_ssim": self.baseline_ssim,
        }

    def to_dict(self) -> Dict[str, Any]:
        return {
            "note": REPORT_HEADER,
            "metadata": dict(self.metadata),
            "aggregate": self.aggregate(),
            "scenes": [asdict(s) for s in self.scenes],
            "sweep": [asdict(r) for r in self.sweep],
            "timing": [asdict(r) for r in self.timing],
        }

    def to_text(self) -> str:
        def fmt(value: Optional[float], digits: int = 4) -> str:
            return "-" if value is None else f"{value:.{digits}f}"

        lines = [REPORT_HEADER, ""]
        for key, value in self.metadata.items():
            lines.append(f"{key}: {value}")
        if self.scenes:
            lines += [
                "",
                f"{'scene':<20} {'PSNR':>9} {'SSIM':>8} {'base PSNR':>10} {'base SSIM':>10}",
            ]
            for s in self.scenes:
                lines.append(
                    f"{s.scene_id:<20} {fmt(s.psnr, 3):>9} {fmt(s.ssim):>8} "
                    f"{fmt(s.baseline_psnr, 3):>10} {fmt(s.baseline_ssim):>10}"
                )
            lines.append(
                f"{'mean':<20} {fmt(self.mean_psnr, 3):>9} {fmt(self.mean_ssim):>8} "
                f"{fmt(self.baseline_psnr, 3):>10} {fmt(self.baseline_ssim):>10}"
            )
        if self.sweep:
            lines += ["", "Input-view sweep", f"{'views':>5} {'PSNR':>9} {'SSIM':>8}"]
            for row in self.sweep:
                lines.append(f"{row.num_inputs:>5} {row.psnr:>9.3f} {row.ssim:>8.4f}")
        if self.timing:
            lines += [
                "",
                "Decode timing",
                f"{'views':>5} {'seq len':>8} {'median s':>10} {'reps':>5}",
            ]
            for row in self.timing:
                lines.append(
                    f"{row.num_inputs:>5} {row.sequence_length:>8} "
                    f"{row.median_seconds:>10.5f} {row.repetitions:>5}"
                )
        return "\n".join(lines) + "\n"

    def write(self, directory: Union[str, Path], stem: str = "report") -> Path:
        """Write ``<stem>.txt`` and ``<stem>.yaml`` into ``directory``."""
        directory = Path(directory)
        directory.mkdir(parents=True, exist_ok=True)
        (directory / f"{stem}.txt").write_text(self.to_text(), encoding="utf-8")
        with open(directory / f"{stem}.yaml", "w", encoding="utf-8") as f:
            yaml.safe_dump(self.to_dict(), f, sort_keys=False)
        logger.info(f"Wrote evaluation report to {directory / stem}.{{txt,yaml}}")
        return directory


def load_report(path: Union[str, Path]) -> Dict[str, Any]:
    with open(path, "r", encoding="utf-8") as f:
        return yaml.safe_load(f)
