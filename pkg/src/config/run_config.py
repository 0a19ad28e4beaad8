"""Run configuration: YAML file plus dotted ``key=value`` overrides.

Every section forbids unknown keys, so a typo in the file or in an override
fails loudly instead of being ignored.
"""

import copy
import re
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple, Type, Union, get_args, get_origin

import yaml
from pydantic import BaseModel, ConfigDict, Field, ValidationError

from src.data.sampling import SamplingMode
from src.model.lvsm_config import LvsmConfig
from src.training.train_config import TrainConfig
from src.utils.errors import ConfigError
from src.utils.logger import get_logger

logger = get_logger(__name__)

# YAML 1.1 reads "1e-3" as a string; plain numeric literals are coerced explicitly.
_NUMBER = re.compile(r"[+-]?(\d+\.?\d*|\.\d+)([eE][+-]?\d+)?")


class DataConfig(BaseModel):
    """Dataset locations and synthetic-data generation settings."""

    model_config = ConfigDict(extra="forbid")

    root: str = "data/train"
    eval_root: Optional[str] = "data/eval"
    mode: SamplingMode = SamplingMode.OBJECT
    num_scenes: int = Field(default=8, ge=1)
    num_eval_scenes: int = Field(default=4, ge=0)
    num_inputs: Optional[int] = Field(default=None, ge=1)
    num_targets: Optional[int] = Field(default=None, ge=1)
    eval_num_inputs: Optional[int] = Field(default=None, ge=1)
    height: int = Field(default=32, ge=1)
    width: int = Field(default=32, ge=1)
    fov_degrees: float = Field(default=60.0, gt=0.0, lt=180.0)


class EvalConfig(BaseModel):
    """Evaluation harness settings."""

    model_config = ConfigDict(extra="forbid")

    num_inputs: Optional[int] = Field(default=None, ge=1)
    sweep_counts: List[int] = Field(default_factory=list)
    timing_counts: List[int] = Field(default_factory=lambda: [1, 2, 4, 8])
    timing_repetitions: int = Field(default=5, ge=3)
    grids: bool = False


class RunConfig(BaseModel):
    """Everything one command needs; serialised into every checkpoint."""

    model_config = ConfigDict(extra="forbid")

    seed: int = 0
    output_dir: str = "runs/default"
    deterministic: bool = False
    model: LvsmConfig = Field(default_factory=LvsmConfig)
    train: TrainConfig = Field(default_factory=TrainConfig)
    data: DataConfig = Field(default_factory=DataConfig)
    eval: EvalConfig = Field(default_factory=EvalConfig)

    def snapshot(self) -> Dict[str, Any]:
        """The full config as plain YAML-safe data."""
        return self.model_dump(mode="json")

    def write_snapshot(self, path: Union[str, Path]) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", encoding="utf-8") as f:
            yaml.safe_dump(self.snapshot(), f, sort_keys=False)
        return path


def _model_class(annotation: Any) -> Optional[Type[BaseModel]]:
    if isinstance(annotation, type) and issubclass(annotation, BaseModel):
        return annotation
    if get_origin(annotation) is Union:
        for arg in get_args(annotation):
            found = _model_class(arg)
            if found is not None:
                return found
    return None


def _check_key(parts: Sequence[str], dotted: str) -> None:
    cls: Optional[Type[BaseModel]] = RunConfig
    for i, part in enumerate(parts):
        if cls is None or part not in cls.model_fields:
            raise ConfigError(f"unknown config key '{dotted}'")
        cls = _model_class(cls.model_fields[part].annotation)
        if cls is None and i < len(parts) - 1:
            raise ConfigError(f"unknown config key '{dotted}'")


def parse_override(text: str) -> Tuple[List[str], Any]:
    """Split ``a.b.c=value``; the value is parsed as a YAML scalar or list."""
    if "=" not in text:
        raise ConfigError(f"override '{text}' is not of the form key=value")
    key, raw = text.split("=", 1)
    key = key.strip()
    if not key or any(not part for part in key.split(".")):
        raise ConfigError(f"override '{text}' has an empty key")
    try:
        value = yaml.safe_load(raw) if raw.strip() else None
    except yaml.YAMLError as exc:
        raise ConfigError(f"override '{text}': cannot parse value ({exc})") from exc
    if isinstance(value, str) and _NUMBER.fullmatch(value.strip()):
        value = float(value)
    return key.split("."), value


def apply_overrides(data: Dict[str, Any], overrides: Sequence[str]) -> Dict[str, Any]:
    """Return a copy of ``data`` with every dotted override applied.

    Raises:
        ConfigError: If an override names a key that RunConfig does not have.
    """
    result = copy.deepcopy(data)
    for text in overrides:
        parts, value = parse_override(text)
        _check_key(parts, ".".join(parts))
        node = result
        for part in parts[:-1]:
            if not isinstance(node.get(part), dict):
                node[part] = {}
            node = node[part]
        node[parts[-1]] = value
    return result


def _validation_message(exc: ValidationError) -> str:
    issues = []
    for err in exc.errors():
        loc = ".".join(str(p) for p in err["loc"])
        if err["type"] == "extra_forbidden":
            issues.append(f"unknown config key '{loc}'")
        else:
            issues.append(f"{loc or '<root>'}: {err['msg']}")
    return "; ".join(issues)


def _default_perceptual_weight(data: Dict[str, Any]) -> None:
    """Fill ``train.perceptual_weight`` from the sampling mode when the config leaves it out."""
    train = data.get("train")
    if train is None:
        train = data["train"] = {}
    if not isinstance(train, dict) or "perceptual_weight" in train:
        return
    section = data.get("data") or {}
    mode = section.get("mode", SamplingMode.OBJECT) if isinstance(section, dict) else None
    try:
        train["perceptual_weight"] = TrainConfig.for_mode(mode).perceptual_weight
    except ValueError:
        # an invalid mode is reported by validation below
        return


def build_run_config(
    data: Optional[Dict[str, Any]] = None, overrides: Sequence[str] = ()
) -> RunConfig:
    """Validate a config mapping (plus overrides) into a :class:`RunConfig`."""
    merged = apply_overrides(dict(data or {}), overrides)
    _default_perceptual_weight(merged)
    try:
        return RunConfig.model_validate(merged)
    except ValidationError as exc:
        raise ConfigError(_validation_message(exc)) from exc


def load_run_config(
    path: Optional[Union[str, Path]] = None, overrides: Sequence[str] = ()
) -> RunConfig:
    """Load a YAML run config and apply overrides.

    Args:
        path: YAML file; built-in defaults are used when ``None``.
        overrides: ``dotted.key=value`` strings, applied in order.

    Raises:
        ConfigError: On unreadable YAML, unknown keys or invalid values.
    """
    data: Dict[str, Any] = {}
    if path is not None:
        path = Path(path)
        try:
            with open(path, "r", encoding="utf-8") as f:
                loaded = yaml.safe_load(f)
        except FileNotFoundError as exc:
            raise ConfigError(f"config file not found: {path}") from exc
        except yaml.YAMLError as exc:
            raise ConfigError(f"{path}: invalid YAML ({exc})") from exc
        if loaded is not None and not isinstance(loaded, dict):
            raise ConfigError(f"{path}: top level must be a mapping")
        data = loaded or {}
        logger.debug(f"Loaded run config from {path}")
    return build_run_config(data, overrides)
