"""Learned parameters and their initialisation."""

from collections import OrderedDict
from dataclasses import dataclass, fields
from typing import Dict, List, Mapping, Optional

import numpy as np

from src.diffnum.precision import get_default_dtype
from src.diffnum.tensor import Tensor
from src.geometry.plucker import PLUCKER_CHANNELS
from src.model.lvsm_config import LvsmConfig
from src.tokenizer.tokens import IMAGE_CHANNELS, INPUT_CHANNELS
from src.utils.errors import ShapeError
from src.utils.logger import get_logger

logger = get_logger(__name__)

BASE_STD = 0.02
LAYER_NORM_GAINS = ("ln1_gain", "ln2_gain")


def layer_init_std(layer_index: int) -> float:
    """Init std for every matrix of global transformer layer ``layer_index``."""
    return BASE_STD / (2.0 * (layer_index + 1)) ** 0.5


@dataclass
class LayerWeights:
    """Parameters of one pre-norm transformer block (no biases)."""

    ln1_gain: Tensor
    w_q: Tensor
    w_k: Tensor
    w_v: Tensor
    w_o: Tensor
    qk_gain: Tensor
    ln2_gain: Tensor
    w_mlp_in: Tensor
    w_mlp_out: Tensor

    def named(self, prefix: str) -> "OrderedDict[str, Tensor]":
        return OrderedDict((f"{prefix}.{f.name}", getattr(self, f.name)) for f in fields(self))


@dataclass
class LvsmWeights:
    """Every learned parameter of an LVSM model.

    Attributes:
        w_input: Input-view tokenizer, (p²·9, d).
        w_target: Target-ray tokenizer, (p²·6, d).
        w_output: Output head, (d, 3·p²).
        encoder: Encoder blocks (empty for decoder-only).
        decoder: Decoder blocks.
        latents: Learnable latent tokens (l, d); ``None`` for decoder-only.
    """

    w_input: Tensor
    w_target: Tensor
    w_output: Tensor
    encoder: List[LayerWeights]
    decoder: List[LayerWeights]
    latents: Optional[Tensor] = None

    def named_parameters(self) -> "OrderedDict[str, Tensor]":
        """All parameters in a fixed order; the order defines checkpoint layout."""
        params: "OrderedDict[str, Tensor]" = OrderedDict()
        params["tokenizer.input"] = self.w_input
        params["tokenizer.target"] = self.w_target
        params["head.output"] = self.w_output
        if self.latents is not None:
            params["latents"] = self.latents
        for i, layer in enumerate(self.encoder):
            params.update(layer.named(f"encoder.{i}"))
        for i, layer in enumerate(self.decoder):
            params.update(layer.named(f"decoder.{i}"))
        return params

    def parameters(self) -> List[Tensor]:
        return list(self.named_parameters().values())

    def copy(self) -> "LvsmWeights":
        """Deep copy with fresh gradient slots."""
        return weights_from_arrays(self, {k: v.data for k, v in self.named_parameters().items()})

    def zero_grad(self) -> None:
        for tensor in self.parameters():
            tensor.grad = None

    def allclose(self, other: "LvsmWeights", atol: float = 0.0) -> bool:
        mine, theirs = self.named_parameters(), other.named_parameters()
        if list(mine) != list(theirs):
            return False
        return all(np.allclose(mine[k].data, theirs[k].data, rtol=0.0, atol=atol) for k in mine)


def is_decay_exempt(name: str) -> bool:
    """Layer-norm gains are excluded from weight decay."""
    return name.rsplit(".", 1)[-1] in LAYER_NORM_GAINS


def count_parameters(weights: LvsmWeights) -> int:
    return int(sum(t.size for t in weights.parameters()))


def parameter_breakdown(weights: LvsmWeights) -> Dict[str, int]:
    """Parameter counts grouped by top-level component."""
    groups: Dict[str, int] = {}
    for name, tensor in weights.named_parameters().items():
        group = name.split(".", 1)[0]
        groups[group] = groups.get(group, 0) + tensor.size
    return groups


def _param(array: np.ndarray, name: str) -> Tensor:
    return Tensor(np.asarray(array, dtype=get_default_dtype()), requires_grad=True, name=name)


def _init_layer(
    config: LvsmConfig, rng: np.random.Generator, index: int, prefix: str
) -> LayerWeights:
    d = config.token_dim
    hidden = config.mlp_ratio * d
    std = layer_init_std(index)

    def normal(rows: int, cols: int, field_name: str) -> Tensor:
        return _param(rng.normal(0.0, std, size=(rows, cols)), f"{prefix}.{field_name}")

    return LayerWeights(
        ln1_gain=_param(np.ones(d), f"{prefix}.ln1_gain"),
        w_q=normal(d, d, "w_q"),
        w_k=normal(d, d, "w_k"),
        w_v=normal(d, d, "w_v"),
        w_o=normal(d, d, "w_o"),
        qk_gain=_param(np.full(config.num_heads, np.sqrt(config.head_dim)), f"{prefix}.qk_gain"),
        ln2_gain=_param(np.ones(d), f"{prefix}.ln2_gain"),
        w_mlp_in=normal(d, hidden, "w_mlp_in"),
        w_mlp_out=normal(hidden, d, "w_mlp_out"),
    )


def init_weights(config: LvsmConfig, seed: int) -> LvsmWeights:
    """Draw a fresh set of weights, fully determined by ``seed``.

    Matrices in global layer ``idx`` (encoder layers first, then decoder) use
    ``layer_init_std(idx)``; tokenizer maps, the output head and latent tokens
    use std 0.02; layer-norm gains start at 1 and QK gains at √d_h.
    """
    rng = np.random.default_rng(seed)
    d, p = config.token_dim, config.patch_size
    w_input = _param(
        rng.normal(0.0, BASE_STD, size=(p * p * INPUT_CHANNELS, d)), "tokenizer.input"
    )
    w_target = _param(
        rng.normal(0.0, BASE_STD, size=(p * p * PLUCKER_CHANNELS, d)), "tokenizer.target"
    )
    w_output = _param(rng.normal(0.0, BASE_STD, size=(d, IMAGE_CHANNELS * p * p)), "head.output")
    latents = None
    if config.is_encoder_decoder:
        latents = _param(rng.normal(0.0, BASE_STD, size=(config.num_latents, d)), "latents")
    encoder = [_init_layer(config, rng, i, f"encoder.{i}") for i in range(config.encoder_layers)]
    decoder = [
        _init_layer(config, rng, config.encoder_layers + i, f"decoder.{i}")
        for i in range(config.decoder_layers)
    ]
    weights = LvsmWeights(
        w_input=w_input,
        w_target=w_target,
        w_output=w_output,
        encoder=encoder,
        decoder=decoder,
        latents=latents,
    )
    logger.debug(
        f"Initialised {config.architecture.value} weights: {count_parameters(weights)} parameters"
    )
    return weights


def weights_from_arrays(
    template: LvsmWeights, arrays: Mapping[str, np.ndarray]
) -> LvsmWeights:
    """Build weights shaped like ``template`` from a name → array mapping."""
    expected = template.named_parameters()
    missing = [name for name in expected if name not in arrays]
    extra = [name for name in arrays if name not in expected]
    if missing or extra:
        raise ShapeError(f"parameter names differ: missing {missing[:5]}, unexpected {extra[:5]}")
    tensors = {}
    for name, ref in expected.items():
        array = np.array(arrays[name], copy=True)
        if array.shape != ref.shape:
            raise ShapeError(f"parameter '{name}' has shape {array.shape}, expected {ref.shape}")
        tensors[name] = Tensor(array, requires_grad=True, name=name)

    def layer(prefix: str) -> LayerWeights:
        return LayerWeights(
            **{f.name: tensors[f"{prefix}.{f.name}"] for f in fields(LayerWeights)}
        )

    return LvsmWeights(
        w_input=tensors["tokenizer.input"],
        w_target=tensors["tokenizer.target"],
        w_output=tensors["head.output"],
        encoder=[layer(f"encoder.{i}") for i in range(len(template.encoder))],
        decoder=[layer(f"decoder.{i}") for i in range(len(template.decoder))],
        latents=tensors.get("latents"),
    )


def weights_for_config(config: LvsmConfig, arrays: Mapping[str, np.ndarray]) -> LvsmWeights:
    """Build weights for ``config`` from named arrays (e.g. a checkpoint)."""
    return weights_from_arrays(init_weights(config, seed=0), arrays)
