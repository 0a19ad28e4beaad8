"""Tests for architecture hyperparameters."""

import pytest
from pydantic import ValidationError

from src.model.lvsm_config import Architecture, AttentionVariant, LvsmConfig


class TestLvsmConfig:

    def test_defaults_are_desk_scale_decoder_only(self) -> None:
        config = LvsmConfig()
        assert config.architecture == Architecture.DECODER_ONLY
        assert (config.token_dim, config.decoder_layers, config.patch_size) == (128, 6, 4)
        assert config.head_dim == 32

    def test_heads_must_divide_dim(self) -> None:
        with pytest.raises(ValidationError, match="divisible"):
            LvsmConfig(token_dim=10, num_heads=4)

    def test_encoder_decoder_needs_latents(self) -> None:
        with pytest.raises(ValidationError, match="num_latents"):
            LvsmConfig(architecture="encoder-decoder", encoder_layers=2)

    def test_decoder_only_has_no_encoder(self) -> None:
        with pytest.raises(ValidationError):
            LvsmConfig(encoder_layers=2)

    def test_decoder_only_variants(self) -> None:
        with pytest.raises(ValidationError):
            LvsmConfig(attention_variant="frozen-latents")
        config = LvsmConfig(attention_variant="per-patch")
        assert config.attention_variant == AttentionVariant.PER_PATCH

    def test_unknown_keys_rejected(self) -> None:
        with pytest.raises(ValidationError):
            LvsmConfig(dropout=0.1)

    def test_full_scale(self) -> None:
        config = LvsmConfig.full_scale(Architecture.ENCODER_DECODER)
        assert (config.token_dim, config.patch_size, config.num_latents) == (768, 8, 3072)
        assert config.total_layers == 24
        assert LvsmConfig.full_scale().decoder_layers == 24

    def test_encoder_layer_split_keeps_total(self) -> None:
        splits = [(6, 18), (12, 12), (18, 6)]
        configs = [
            LvsmConfig(
                architecture="encoder-decoder", encoder_layers=e, decoder_layers=d, num_latents=8
            )
            for e, d in splits
        ]
        assert {c.total_layers for c in configs} == {24}
