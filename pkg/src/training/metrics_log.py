"""Plain-text per-step metrics log.

One line per optimisation step: ``step loss grad_norm lr skipped``.
"""

from dataclasses import dataclass
from pathlib import Path
from typing import List, Optional, TextIO, Union


@dataclass(frozen=True)
class StepMetrics:
    """What one optimisation step reports."""

    step: int
    loss: float
    grad_norm: float
    lr: float
    skipped: bool

    def to_line(self) -> str:
        return f"{self.step} {self.loss:.9e} {self.grad_norm:.9e} {self.lr:.9e} {int(self.skipped)}"

    @classmethod
    def from_line(cls, line: str) -> "StepMetrics":
        parts = line.split()
        if len(parts) != 5:
            raise ValueError(f"metrics line needs 5 fields, got {len(parts)}: {line!r}")
        return cls(
            step=int(parts[0]),
            loss=float(parts[1]),
            grad_norm=float(parts[2]),
            lr=float(parts[3]),
            skipped=bool(int(parts[4])),
        )


class MetricsLog:
    """Appends :class:`StepMetrics` lines to a file.

    When resuming at ``resume_step``, lines for later steps left behind by an
    interrupted run are dropped so the log matches the restored state.
    """

    def __init__(self, path: Union[str, Path], resume_step: Optional[int] = None) -> None:
        self.path = Path(path)
        self.path.parent.mkdir(parents=True, exist_ok=True)
        kept: List[str] = []
        if resume_step is not None and self.path.exists():
            kept = [
                line
                for line in self.path.read_text(encoding="utf-8").splitlines()
                if line.strip() and StepMetrics.from_line(line).step <= resume_step
            ]
        self._file: Optional[TextIO] = open(self.path, "w", encoding="utf-8")
        for line in kept:
            self._file.write(line + "\n")
        self._file.flush()

    def write(self, metrics: StepMetrics) -> None:
        if self._file is None:
            raise ValueError(f"metrics log {self.path} is closed")
        self._file.write(metrics.to_line() + "\n")
        self._file.flush()

    def close(self) -> None:
        if self._file is not None:
            self._file.close()
            self._file = None

    def __enter__(self) -> "MetricsLog":
        return self

    def __exit__(self, *exc: object) -> None:
        self.close()


def read_metrics_log(path: Union[str, Path]) -> List[StepMetrics]:
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    return [StepMetrics.from_line(line) for line in lines if line.strip()]
