"""Checkpoint files.

Layout::

    LVSM-CHECKPOINT v1 <header_nbytes>\\n
    <YAML header, header_nbytes bytes>
    <raw little-endian tensor payloads in manifest order>

The header carries the run config snapshot, the architecture, seed and
counters, and a manifest of ``name/shape/offset/nbytes/dtype`` entries.
Payloads are 32-bit floats, or 64-bit when saved from verification mode so
that a resumed 64-bit run continues bit-exactly.
"""

from collections import OrderedDict
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, Mapping, Optional, Union

import numpy as np
import yaml

from src.model.lvsm_config import LvsmConfig
from src.model.weights import LvsmWeights, weights_for_config
from src.utils.errors import CheckpointFormatError, IncompatibleCheckpointError
from src.utils.logger import get_logger

logger = get_logger(__name__)

MAGIC = "LVSM-CHECKPOINT"
VERSION = "v1"
OPTIMIZER_PREFIX = "adam."
_DTYPES = {"float32": "<f4", "float64": "<f8"}


@dataclass
class Checkpoint:
    """Everything restored from a checkpoint file."""

    config: LvsmConfig
    weights: LvsmWeights
    seed: int
    step: int = 0
    skipped_steps: int = 0
    run_config: Dict[str, Any] = field(default_factory=dict)
    optimizer_state: Dict[str, np.ndarray] = field(default_factory=dict)
    extra: Dict[str, Any] = field(default_factory=dict)


def describe_architecture(config: LvsmConfig) -> str:
    """Short human-readable architecture signature."""
    layers = (
        f"{config.encoder_layers}+{config.decoder_layers} layers"
        if config.is_encoder_decoder
        else f"{config.decoder_layers} layers"
    )
    latents = f", {config.num_latents} latents" if config.is_encoder_decoder else ""
    return (
        f"{config.architecture.value} ({layers}, d={config.token_dim}, h={config.num_heads}, "
        f"p={config.patch_size}{latents}, {config.attention_variant.value})"
    )


def save_checkpoint(
    path: Union[str, Path],
    weights: LvsmWeights,
    config: LvsmConfig,
    seed: int,
    step: int = 0,
    skipped_steps: int = 0,
    run_config: Optional[Mapping[str, Any]] = None,
    optimizer_state: Optional[Mapping[str, np.ndarray]] = None,
    extra: Optional[Mapping[str, Any]] = None,
) -> Path:
    """Write weights (and optional optimizer state) to ``path``.

    Returns:
        The written path.
    """
    path = Path(path)
    tensors: "OrderedDict[str, np.ndarray]" = OrderedDict(
        (name, t.data) for name, t in weights.named_parameters().items()
    )
    for name, array in (optimizer_state or {}).items():
        tensors[f"{OPTIMIZER_PREFIX}{name}"] = np.asarray(array)

    manifest = []
    payloads = []
    offset = 0
    for name, array in tensors.items():
        dtype_name = np.dtype(array.dtype).name
        if dtype_name not in _DTYPES:
            raise CheckpointFormatError(f"tensor '{name}' has unsupported dtype {dtype_name}")
        raw = np.ascontiguousarray(array, dtype=_DTYPES[dtype_name]).tobytes()
        manifest.append(
            {
                "name": name,
                "shape": [int(s) for s in array.shape],
                "offset": offset,
                "nbytes": len(raw),
                "dtype": dtype_name,
            }
        )
        payloads.append(raw)
        offset += len(raw)

    header = {
        "format": f"{MAGIC} {VERSION}",
        "model": config.model_dump(mode="json"),
        "run_config": dict(run_config or {}),
        "seed": int(seed),
        "step": int(step),
        "skipped_steps": int(skipped_steps),
        "extra": dict(extra or {}),
        "tensors": manifest,
    }
    header_bytes = yaml.safe_dump(header, sort_keys=False).encode("utf-8")

    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_suffix(path.suffix + ".tmp")
    with open(tmp, "wb") as f:
        f.write(f"{MAGIC} {VERSION} {len(header_bytes)}\n".encode("ascii"))
        f.write(header_bytes)
        for raw in payloads:
            f.write(raw)
    tmp.replace(path)
    logger.info(f"Wrote checkpoint {path} (step {step}, {len(manifest)} tensors, {offset} bytes)")
    return path


def read_checkpoint_header(path: Union[str, Path]) -> Dict[str, Any]:
    """Parse only the header of a checkpoint."""
    header, _ = _read(Path(path), payload=False)
    return header


def _read(path: Path, payload: bool = True):
    try:
        data = path.read_bytes()
    except FileNotFoundError as exc:
        raise CheckpointFormatError(f"checkpoint not found: {path}") from exc
    newline = data.find(b"\n")
    first = data[:newline].decode("ascii", errors="replace").split() if newline > 0 else []
    if len(first) != 3 or first[0] != MAGIC or first[1] != VERSION or not first[2].isdigit():
        raise CheckpointFormatError(f"{path}: not an {MAGIC} {VERSION} file")
    header_len = int(first[2])
    start = newline + 1
    if len(data) < start + header_len:
        raise CheckpointFormatError(f"{path}: truncated header")
    try:
        header = yaml.safe_load(data[start : start + header_len].decode("utf-8"))
    except yaml.YAMLError as exc:
        raise CheckpointFormatError(f"{path}: malformed header: {exc}") from exc
    if not isinstance(header, dict) or "tensors" not in header or "model" not in header:
        raise CheckpointFormatError(f"{path}: header lacks model or tensor manifest")
    return header, (data[start + header_len :] if payload else b"")


def load_checkpoint(
    path: Union[str, Path], expected: Optional[LvsmConfig] = None
) -> Checkpoint:
    """Read a checkpoint written by :func:`save_checkpoint`.

    Args:
        path: Checkpoint file.
        expected: Architecture the caller intends to use; a mismatch raises.

    Raises:
        CheckpointFormatError: If the file is malformed or truncated.
        IncompatibleCheckpointError: If ``expected`` differs from the stored
            architecture.
    """
    path = Path(path)
    header, body = _read(path)
    try:
        config = LvsmConfig.model_validate(header["model"])
    except ValueError as exc:
        raise CheckpointFormatError(f"{path}: invalid model section: {exc}") from exc
    if expected is not None and expected != config:
        raise IncompatibleCheckpointError(
            describe_architecture(config), describe_architecture(expected)
        )

    arrays: Dict[str, np.ndarray] = {}
    for entry in header["tensors"]:
        name, offset, nbytes = entry["name"], int(entry["offset"]), int(entry["nbytes"])
        dtype_name = entry.get("dtype", "float32")
        if dtype_name not in _DTYPES:
            raise CheckpointFormatError(f"{path}: tensor '{name}' has unknown dtype {dtype_name}")
        if offset + nbytes > len(body):
            raise CheckpointFormatError(f"{path}: payload for '{name}' is truncated")
        dtype = np.dtype(_DTYPES[dtype_name])
        flat = np.frombuffer(body, dtype=dtype, count=nbytes // dtype.itemsize, offset=offset)
        shape = tuple(entry["shape"])
        if flat.size != int(np.prod(shape)):
            raise CheckpointFormatError(
                f"{path}: tensor '{name}' size does not match shape {shape}"
            )
        arrays[name] = flat.astype(np.dtype(dtype_name)).reshape(shape)

    optimizer_state = {
        name[len(OPTIMIZER_PREFIX) :]: arr
        for name, arr in arrays.items()
        if name.startswith(OPTIMIZER_PREFIX)
    }
    model_arrays = {k: v for k, v in arrays.items() if not k.startswith(OPTIMIZER_PREFIX)}
    try:
        weights = weights_for_config(config, model_arrays)
    except ValueError as exc:
        raise CheckpointFormatError(f"{path}: {exc}") from exc
    logger.info(f"Loaded checkpoint {path} (step {header.get('step', 0)})")
    return Checkpoint(
        config=config,
        weights=weights,
        seed=int(header.get("seed", 0)),
        step=int(header.get("step", 0)),
        skipped_steps=int(header.get("skipped_steps", 0)),
        run_config=dict(header.get("run_config") or {}),
        optimizer_state=optimizer_state,
        extra=dict(header.get("extra") or {}),
    )
