"""Main entry point for the lvsm command-line tool."""

import argparse
import sys
from contextlib import nullcontext
from pathlib import Path
from typing import List, Optional, Sequence

from src import __version__
from src.config.run_config import RunConfig, load_run_config
from src.config.settings import get_settings
from src.diffnum.precision import verification_mode
from src.pipeline.commands import generate_data, run_evaluation, run_render, run_training
from src.utils.errors import ConfigError, LvsmError
from src.utils.logger import get_logger, setup_logging

logger = get_logger(__name__)


def _parse_counts(text: str) -> List[int]:
    try:
        counts = [int(part) for part in text.split(",") if part.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(
            f"expected comma-separated integers, got '{text}'"
        ) from exc
    if not counts or any(c < 1 for c in counts):
        raise argparse.ArgumentTypeError(f"view counts must be positive, got '{text}'")
    return counts


def build_parser() -> argparse.ArgumentParser:
    """Argument parser with one subparser per command."""
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="YAML run config (default: $LVSM_CONFIG_PATH)")
    common.add_argument(
        "--set",
        dest="overrides",
        action="append",
        default=[],
        metavar="KEY=VALUE",
        help="Override a config entry, e.g. --set train.total_steps=10 (repeatable)",
    )
    common.add_argument(
        "--deterministic",
        action="store_true",
        help="Run in 64-bit verification mode",
    )
    common.add_argument("--log-level", help="Logging level (default: $LVSM_LOG_LEVEL)")

    parser = argparse.ArgumentParser(
        prog="lvsm", description="Large view synthesis model: data, training and rendering"
    )
    subparsers = parser.add_subparsers(dest="command", help="Command to execute")

    subparsers.add_parser("gen-data", parents=[common], help="Generate synthetic datasets")

    train_parser = subparsers.add_parser("train", parents=[common], help="Train a model")
    train_parser.add_argument("--resume", help="Checkpoint to resume from")
    train_parser.add_argument("--data", help="Training dataset directory (default: data.root)")

    eval_parser = subparsers.add_parser("eval", parents=[common], help="Evaluate a checkpoint")
    eval_parser.add_argument("--checkpoint", required=True, help="Checkpoint file")
    eval_parser.add_argument("--data", help="Evaluation dataset (default: data.eval_root)")
    eval_parser.add_argument("--output", help="Report directory (default: <output_dir>/eval)")
    eval_parser.add_argument(
        "--sweep", type=_parse_counts, default=[], help="Input-view counts, e.g. 1,2,4"
    )
    eval_parser.add_argument("--timing", action="store_true", help="Time decoding per view count")
    eval_parser.add_argument("--grids", action="store_true", help="Write per-scene image grids")

    render_parser = subparsers.add_parser("render", parents=[common], help="Render novel views")
    render_parser.add_argument("--checkpoint", required=True, help="Checkpoint file")
    render_parser.add_argument(
        "--inputs", required=True, help="Directory with cameras.json and input images"
    )
    render_parser.add_argument("--targets", required=True, help="Target camera manifest")
    render_parser.add_argument("--output", required=True, help="Directory for rendered images")

    subparsers.add_parser("version", help="Show version information")
    return parser


def _load_config(args: argparse.Namespace) -> RunConfig:
    settings = get_settings()
    path = args.config
    if path is None and Path(settings.config_path).is_file():
        path = settings.config_path
    return load_run_config(path, args.overrides)


def _run(args: argparse.Namespace, config: RunConfig) -> int:
    if args.command == "gen-data":
        result = generate_data(config)
        print(f"Wrote {result.num_train} training scenes to {result.train_dir}")
        if result.eval_dir is not None:
            print(f"Wrote {result.num_eval} evaluation scenes to {result.eval_dir}")
        return 0

    elif args.command == "train":
        trained = run_training(config, resume_from=args.resume, dataset_dir=args.data)
        print(f"Trained to step {trained.steps} ({trained.skipped_steps} skipped)")
        print(f"  Checkpoint:  {trained.checkpoint}")
        print(f"  Metrics log: {trained.metrics_log}")
        return 0

    elif args.command == "eval":
        report = run_evaluation(
            config,
            args.checkpoint,
            sweep=args.sweep,
            timing=args.timing,
            grids=args.grids,
            dataset_dir=args.data,
            output_dir=args.output,
        )
        print(report.to_text())
        return 0

    elif args.command == "render":
        rendered = run_render(config, args.checkpoint, args.inputs, args.targets, args.output)
        print(f"Wrote {len(rendered.outputs)} images to {args.output}")
        return 0

    raise ConfigError(f"unknown command '{args.command}'")


def dispatch(argv: Optional[Sequence[str]] = None) -> int:
    """Parse ``argv`` and run one command.

    Returns:
        Exit code (0 for success, non-zero for error)
    """
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)

    if args.command is None:
        parser.print_help()
        return 1
    if args.command == "version":
        print(f"lvsm {__version__}")
        return 0

    settings = get_settings()
    setup_logging(level=args.log_level or settings.log_level, log_file=settings.log_file)

    try:
        config = _load_config(args)
        deterministic = args.deterministic or config.deterministic or settings.deterministic
        with verification_mode() if deterministic else nullcontext():
            if deterministic:
                logger.info("Verification mode: 64-bit arithmetic")
            return _run(args, config)
    except (LvsmError, OSError) as exc:
        logger.debug(f"{args.command} failed", exc_info=True)
        print(f"lvsm {args.command}: error: {exc}", file=sys.stderr)
        return 1


def main() -> int:
    """Console-script entry point."""
    return dispatch(sys.argv[1:])


if __name__ == "__main__":
    sys.exit(main())
