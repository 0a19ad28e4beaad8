"""Command orchestration: data generation, training, evaluation and rendering."""

from src.pipeline.commands import (
    GenDataResult,
    RenderResult,
    TrainResult,
    generate_data,
    make_examples,
    run_evaluation,
    run_render,
    run_training,
)

__all__ = [
    "GenDataResult",
    "RenderResult",
    "TrainResult",
    "generate_data",
    "make_examples",
    "run_evaluation",
    "run_render",
    "run_training",
]
