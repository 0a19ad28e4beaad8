"""Image metrics and the evaluation harnesses."""

from src.evaluation.harness import (
    decode_timing,
    evaluate_dataset,
    nearest_view_baseline,
    view_count_sweep,
    write_image_grid,
)
from src.evaluation.image_metrics import psnr, ssim, to_luma
from src.evaluation.report import EvalReport, SceneResult, SweepRow, TimingRow

__all__ = [
    "EvalReport",
    "SceneResult",
    "SweepRow",
    "TimingRow",
    "decode_timing",
    "evaluate_dataset",
    "nearest_view_baseline",
    "psnr",
    "ssim",
    "to_luma",
    "view_count_sweep",
    "write_image_grid",
]
