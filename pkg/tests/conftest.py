"""Pytest configuration and shared fixtures."""

import os
from typing import Iterator, List

import numpy as np
import pytest

from src.data.sampling import SamplingMode, SceneExample, sample_example
from src.data.scene import SceneSpec, generate_scene
from src.diffnum.precision import verification_mode
from src.model.lvsm_config import LvsmConfig
from src.model.weights import LvsmWeights, init_weights
from src.training.train_config import TrainConfig


def acceptance_enabled() -> bool:
    """True when slow tests should apply their full-scale thresholds."""
    return os.environ.get("LVSM_ACCEPTANCE", "").lower() in ("1", "true", "yes")


@pytest.fixture
def f64() -> Iterator[None]:
    """Run the test in 64-bit verification mode."""
    with verification_mode():
        yield


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(1234)


@pytest.fixture
def tiny_decoder_config() -> LvsmConfig:
    """Decoder-only model small enough for scalar-loop oracles."""
    return LvsmConfig(
        architecture="decoder-only",
        encoder_layers=0,
        decoder_layers=2,
        token_dim=8,
        num_heads=2,
        mlp_ratio=2,
        patch_size=4,
    )


@pytest.fixture
def tiny_encdec_config() -> LvsmConfig:
    return LvsmConfig(
        architecture="encoder-decoder",
        encoder_layers=1,
        decoder_layers=1,
        token_dim=8,
        num_heads=2,
        mlp_ratio=2,
        patch_size=4,
        num_latents=4,
    )


@pytest.fixture
def tiny_decoder_weights(f64: None, tiny_decoder_config: LvsmConfig) -> LvsmWeights:
    return init_weights(tiny_decoder_config, seed=11)


@pytest.fixture
def tiny_encdec_weights(f64: None, tiny_encdec_config: LvsmConfig) -> LvsmWeights:
    return init_weights(tiny_encdec_config, seed=12)


@pytest.fixture
def tiny_train_config() -> TrainConfig:
    return TrainConfig(
        peak_lr=1e-3,
        warmup_steps=2,
        total_steps=10,
        batch_size=1,
        checkpoint_every=5,
        log_every=1,
    )


@pytest.fixture
def small_scene() -> SceneSpec:
    return generate_scene(3)


@pytest.fixture
def small_example(small_scene: SceneSpec) -> SceneExample:
    """Two inputs and two targets at 8x8 pixels."""
    return sample_example(
        small_scene, SamplingMode.OBJECT, num_inputs=2, num_targets=2, seed=5, height=8, width=8
    )


@pytest.fixture
def small_dataset() -> List[SceneExample]:
    """Two 8x8 object-style scenes with three inputs and one target each."""
    return [
        sample_example(
            generate_scene(seed),
            SamplingMode.OBJECT,
            num_inputs=3,
            num_targets=1,
            seed=100 + seed,
            height=8,
            width=8,
        )
        for seed in (1, 2)
    ]
