"""Tests for the evaluation harnesses."""

from pathlib import Path
from typing import List

import numpy as np
import pytest

from src.data.sampling import SceneExample
from src.evaluation.harness import (
    decode_timing,
    evaluate_dataset,
    nearest_view_baseline,
    view_count_sweep,
)
from src.evaluation.image_metrics import psnr
from src.model.lvsm import synthesize_views
from src.model.lvsm_config import LvsmConfig
from src.model.weights import LvsmWeights, init_weights
from src.utils.errors import ConfigError
from tests.conftest import acceptance_enabled


class TestNearestViewBaseline:

    def test_copies_closest_input(self, small_example: SceneExample) -> None:
        target = small_example.target_cameras[0]
        distances = [
            np.linalg.norm(cam.pose.center - target.pose.center)
            for cam in small_example.input_cameras
        ]
        expected = small_example.input_images[int(np.argmin(distances))]
        [first, _] = nearest_view_baseline(small_example)
        np.testing.assert_array_equal(first, expected)


@pytest.mark.usefixtures("f64")
class TestEvaluateDataset:

    def test_scores_every_scene(
        self,
        small_dataset: List[SceneExample],
        tiny_decoder_weights: LvsmWeights,
        tiny_decoder_config: LvsmConfig,
    ) -> None:
        report = evaluate_dataset(tiny_decoder_weights, tiny_decoder_config, small_dataset)
        assert [s.scene_id for s in report.scenes] == ["scene_00001", "scene_00002"]
        for result, example in zip(report.scenes, small_dataset):
            pred = synthesize_views(
                tiny_decoder_weights,
                tiny_decoder_config,
                example.posed_inputs,
                example.target_cameras,
            )[0]
            assert result.psnr == pytest.approx(psnr(pred, example.target_images[0]))
            assert result.baseline_psnr is not None
            assert (result.num_inputs, result.num_targets) == (3, 1)

    def test_writes_grids(
        self,
        tmp_path: Path,
        small_dataset: List[SceneExample],
        tiny_decoder_weights: LvsmWeights,
        tiny_decoder_config: LvsmConfig,
    ) -> None:
        evaluate_dataset(
            tiny_decoder_weights, tiny_decoder_config, small_dataset, grid_dir=tmp_path
        )
        assert sorted(p.name for p in tmp_path.iterdir()) == [
            "scene_00001.png",
            "scene_00002.png",
        ]


@pytest.mark.usefixtures("f64")
class TestViewCountSweep:

    def test_one_row_per_count(
        self,
        small_dataset: List[SceneExample],
        tiny_decoder_weights: LvsmWeights,
        tiny_decoder_config: LvsmConfig,
    ) -> None:
        rows = view_count_sweep(
            tiny_decoder_weights, tiny_decoder_config, small_dataset, [1, 2, 3]
        )
        assert [r.num_inputs for r in rows] == [1, 2, 3]
        full = evaluate_dataset(tiny_decoder_weights, tiny_decoder_config, small_dataset)
        assert rows[-1].psnr == full.mean_psnr
        assert rows[-1].ssim == full.mean_ssim

    def test_deterministic(
        self,
        small_dataset: List[SceneExample],
        tiny_encdec_weights: LvsmWeights,
        tiny_encdec_config: LvsmConfig,
    ) -> None:
        a = view_count_sweep(tiny_encdec_weights, tiny_encdec_config, small_dataset, [1, 3])
        b = view_count_sweep(tiny_encdec_weights, tiny_encdec_config, small_dataset, [1, 3])
        assert a == b

    @pytest.mark.parametrize("count", [0, 4])
    def test_count_out_of_range(
        self,
        count: int,
        small_dataset: List[SceneExample],
        tiny_decoder_weights: LvsmWeights,
        tiny_decoder_config: LvsmConfig,
    ) -> None:
        with pytest.raises(ConfigError, match="sweep count"):
            view_count_sweep(tiny_decoder_weights, tiny_decoder_config, small_dataset, [count])

    def test_duplicated_view_matches_single_view(
        self, small_example: SceneExample, tiny_decoder_config: LvsmConfig
    ) -> None:
        config = LvsmConfig(
            **{**tiny_decoder_config.model_dump(), "attention_variant": "per-patch"}
        )
        weights = init_weights(config, seed=21)
        view = small_example.inputs[0]
        single = SceneExample(inputs=[view], targets=small_example.targets)
        doubled = SceneExample(inputs=[view, view], targets=small_example.targets)
        a = synthesize_views(weights, config, single.posed_inputs, single.target_cameras)
        b = synthesize_views(weights, config, doubled.posed_inputs, doubled.target_cameras)
        for x, y in zip(a, b):
            np.testing.assert_allclose(x, y, atol=1e-5)


class TestDecodeTiming:

    def test_rows_and_sequence_lengths(
        self, tiny_decoder_config: LvsmConfig, tiny_encdec_config: LvsmConfig
    ) -> None:
        decoder = decode_timing(
            init_weights(tiny_decoder_config, 0), tiny_decoder_config, [1, 2], 3, 8, 8
        )
        assert [r.sequence_length for r in decoder] == [4 + 4, 8 + 4]
        encdec = decode_timing(
            init_weights(tiny_encdec_config, 0), tiny_encdec_config, [1, 2], 3, 8, 8
        )
        assert [r.sequence_length for r in encdec] == [4 + 4, 4 + 4]
        for row in decoder + encdec:
            assert row.outputs_identical
            assert row.repetitions == 3
            assert row.median_seconds > 0.0

    def test_needs_three_repetitions(self, tiny_decoder_config: LvsmConfig) -> None:
        with pytest.raises(ConfigError, match="repetitions"):
            decode_timing(init_weights(tiny_decoder_config, 0), tiny_decoder_config, [1], 2)

    @pytest.mark.slow
    @pytest.mark.skipif(not acceptance_enabled(), reason="timing acceptance is opt-in")
    def test_decode_cost_scaling(self) -> None:
        common = dict(token_dim=128, num_heads=4, patch_size=4)
        encdec = LvsmConfig(
            architecture="encoder-decoder",
            encoder_layers=3,
            decoder_layers=3,
            num_latents=64,
            **common,
        )
        decoder = LvsmConfig(architecture="decoder-only", decoder_layers=6, **common)
        enc_rows = decode_timing(init_weights(encdec, 0), encdec, [1, 8], 7, 32, 32)
        dec_rows = decode_timing(init_weights(decoder, 0), decoder, [1, 2, 4, 8], 7, 32, 32)
        assert enc_rows[1].median_seconds <= 1.1 * enc_rows[0].median_seconds
        times = [r.median_seconds for r in dec_rows]
        assert times == sorted(times) and len(set(times)) == len(times)
