"""Tests for the decoder attention-variant masks."""

import numpy as np
import pytest

from src.model.lvsm_config import Architecture, AttentionVariant
from src.model.masks import AttentionVariantMask, build_variant_mask, mask_from_flags
from src.utils.errors import ConfigError, DegenerateMaskError


class TestBuildVariantMask:

    def test_full_is_all_true(self) -> None:
        mask = build_variant_mask("full", 3, 2)
        assert mask.is_full
        assert mask.for_attention() is None
        assert mask.flags == (True, True)

    def test_pure_cross_counts(self) -> None:
        mask = build_variant_mask(AttentionVariant.PURE_CROSS, 2, 2)
        assert mask.allowed_entries == 6
        np.testing.assert_array_equal(
            mask.matrix,
            [
                [1, 0, 0, 0],
                [0, 1, 0, 0],
                [1, 1, 0, 0],
                [1, 1, 0, 0],
            ],
        )

    def test_frozen_latents(self) -> None:
        m = build_variant_mask("frozen-latents", 2, 2).matrix
        np.testing.assert_array_equal(m[:2], [[1, 0, 0, 0], [0, 1, 0, 0]])
        assert m[2:].all()

    def test_per_patch_encoder_decoder(self) -> None:
        m = build_variant_mask("per-patch", 3, 2).matrix
        assert m[:3, :3].all()
        assert not m[:3, 3:].any()
        assert m[3:, :3].all()
        assert not m[3:, 3:].any()

    def test_per_patch_decoder_only(self) -> None:
        mask = build_variant_mask("per-patch", 4, 2, architecture=Architecture.DECODER_ONLY)
        assert mask.flags == (True, False)
        assert mask.allowed_entries == 4 * 4 + 2 * 4

    @pytest.mark.parametrize("variant", list(AttentionVariant))
    @pytest.mark.parametrize("counts", [(1, 1), (2, 5), (7, 3)])
    def test_no_blocked_rows(self, variant: AttentionVariant, counts: tuple) -> None:
        mask = build_variant_mask(variant, *counts)
        assert mask.matrix.any(axis=1).all()

    def test_pure_cross_is_frozen_plus_independent_targets(self) -> None:
        pure = build_variant_mask("pure-cross", 3, 4).matrix
        composed = mask_from_flags(
            latents_updated=False, targets_joint=False, num_context=3, num_targets=4
        )
        assert pure.tobytes() == composed.matrix.tobytes()

    def test_unknown_kind(self) -> None:
        with pytest.raises(ConfigError):
            build_variant_mask("sparse", 2, 2)

    @pytest.mark.parametrize("variant", ["frozen-latents", "pure-cross"])
    def test_decoder_only_rejects_latent_variants(self, variant: str) -> None:
        with pytest.raises(ConfigError, match="latent"):
            build_variant_mask(variant, 2, 2, architecture="decoder-only")

    def test_empty_counts(self) -> None:
        with pytest.raises(ConfigError):
            build_variant_mask("full", 0, 2)

    def test_blocked_row_rejected(self) -> None:
        matrix = np.ones((3, 3), dtype=bool)
        matrix[2] = False
        with pytest.raises(DegenerateMaskError):
            AttentionVariantMask(matrix, True, True, 2, 1)
