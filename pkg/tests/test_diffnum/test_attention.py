"""Tests for QK-normalised multi-head attention."""

import math
from typing import Optional

import numpy as np
import pytest

from src.diffnum import ops
from src.diffnum.attention import attention_logits, attention_weights, qknorm_attention
from src.diffnum.gradcheck import check_gradients
from src.diffnum.tensor import Tape, Tensor
from src.utils.errors import DegenerateMaskError, ShapeError


def scalar_loop_attention(
    q: np.ndarray, k: np.ndarray, v: np.ndarray, gains: np.ndarray, mask: Optional[np.ndarray]
) -> np.ndarray:
    """Reference written with explicit loops over heads, queries and keys."""
    lq, heads, dh = q.shape
    lk = k.shape[0]
    out = np.zeros((lq, heads, dh))
    for h in range(heads):
        for i in range(lq):
            qn = math.sqrt(sum(q[i, h, c] ** 2 for c in range(dh)) + 1e-12)
            logits = []
            for j in range(lk):
                if mask is not None and not mask[i, j]:
                    logits.append(None)
                    continue
                kn = math.sqrt(sum(k[j, h, c] ** 2 for c in range(dh)) + 1e-12)
                dot = sum(q[i, h, c] * k[j, h, c] for c in range(dh))
                logits.append(gains[h] * dot / (qn * kn))
            top = max(x for x in logits if x is not None)
            weights = [0.0 if x is None else math.exp(x - top) for x in logits]
            total = sum(weights)
            for j in range(lk):
                for c in range(dh):
                    out[i, h, c] += weights[j] / total * v[j, h, c]
    return out


@pytest.mark.usefixtures("f64")
class TestQkNormAttention:

    @pytest.fixture
    def qkv(self, rng: np.random.Generator):
        return (
            rng.normal(size=(4, 2, 8)),
            rng.normal(size=(4, 2, 8)),
            rng.normal(size=(4, 2, 8)),
            np.array([2.5, 1.5]),
        )

    def test_single_token_returns_value(self, rng: np.random.Generator) -> None:
        v = rng.normal(size=(1, 2, 3))
        q, k = rng.normal(size=(1, 2, 3)), rng.normal(size=(1, 2, 3))
        out = qknorm_attention(q, k, v, [1.0, 1.0])
        np.testing.assert_allclose(out.data, v, atol=1e-15)

    def test_identical_keys_average_values(self, rng: np.random.Generator) -> None:
        k = np.repeat(rng.normal(size=(1, 2, 4)), 5, axis=0)
        v = rng.normal(size=(5, 2, 4))
        out = qknorm_attention(rng.normal(size=(3, 2, 4)), k, v, [3.0, 0.5])
        expected = np.broadcast_to(v.mean(axis=0), (3, 2, 4))
        np.testing.assert_allclose(out.data, expected, atol=1e-12)

    def test_matches_scalar_loop(self, qkv) -> None:
        q, k, v, gains = qkv
        out = qknorm_attention(q, k, v, gains)
        np.testing.assert_allclose(out.data, scalar_loop_attention(q, k, v, gains, None), atol=1e-6)

    def test_masked_matches_scalar_loop(self, qkv) -> None:
        q, k, v, gains = qkv
        mask = np.array([[1, 0, 0, 0], [1, 1, 0, 0], [0, 1, 1, 1], [1, 0, 1, 0]], dtype=bool)
        out = qknorm_attention(q, k, v, gains, mask)
        np.testing.assert_allclose(out.data, scalar_loop_attention(q, k, v, gains, mask), atol=1e-6)

    def test_logits_bounded_by_gain(self, qkv) -> None:
        q, k, _, gains = qkv
        logits = attention_logits(q, k, gains)
        assert np.all(np.abs(logits) <= np.abs(gains)[:, None, None] + 1e-12)

    def test_rows_sum_to_one_over_unmasked(self, qkv) -> None:
        q, k, _, gains = qkv
        mask = np.tril(np.ones((4, 4), dtype=bool))
        weights = attention_weights(q, k, gains, mask)
        np.testing.assert_allclose(weights.sum(axis=-1), 1.0, atol=1e-12)
        assert np.all(weights[:, ~mask] == 0.0)

    def test_masked_keys_do_not_influence(self, qkv) -> None:
        q, k, v, gains = qkv
        mask = np.ones((4, 4), dtype=bool)
        mask[:, 3] = False
        changed_k, changed_v = k.copy(), v.copy()
        changed_k[3] += 10.0
        changed_v[3] -= 7.0
        a = qknorm_attention(q, k, v, gains, mask).data
        b = qknorm_attention(q, changed_k, changed_v, gains, mask).data
        np.testing.assert_array_equal(a, b)

    def test_blocked_row_is_rejected(self, qkv) -> None:
        q, k, v, gains = qkv
        mask = np.ones((4, 4), dtype=bool)
        mask[2] = False
        with pytest.raises(DegenerateMaskError, match=r"\[2\]"):
            qknorm_attention(q, k, v, gains, mask)

    def test_shape_errors(self, qkv) -> None:
        q, k, v, gains = qkv
        with pytest.raises(ShapeError):
            qknorm_attention(q, k, v[:3], gains)
        with pytest.raises(ShapeError):
            qknorm_attention(q, k, v, np.ones(3))
        with pytest.raises(ShapeError):
            qknorm_attention(q, k, v, gains, np.ones((4, 3), dtype=bool))

    def test_deterministic(self, qkv) -> None:
        q, k, v, gains = qkv
        a = qknorm_attention(q, k, v, gains).data
        b = qknorm_attention(q, k, v, gains).data
        np.testing.assert_array_equal(a, b)

    @pytest.mark.gradcheck
    @pytest.mark.parametrize("masked", [False, True])
    def test_gradients(self, qkv, rng: np.random.Generator, masked: bool) -> None:
        tensors = [
            Tensor(array, requires_grad=True, name=name)
            for array, name in zip(qkv, ("q", "k", "v", "gains"))
        ]
        mask = np.tril(np.ones((4, 4), dtype=bool)) if masked else None
        proj = rng.normal(size=(4, 2, 8))

        def fn() -> Tensor:
            return ops.sum_(ops.multiply(qknorm_attention(*tensors, mask=mask), proj))

        result = check_gradients(fn, tensors, atol=1e-2)
        assert result.passed(1e-5), result.per_input


@pytest.mark.oracle
@pytest.mark.usefixtures("f64")
class TestAgainstTorch:

    def test_forward_and_backward(self, rng: np.random.Generator) -> None:
        torch = pytest.importorskip("torch")
        q, k, v = (rng.normal(size=(5, 2, 4)) for _ in range(3))
        gains = np.array([2.0, 1.2])
        mask = np.ones((5, 5), dtype=bool)
        mask[0, 1:] = False
        proj = rng.normal(size=(5, 2, 4))

        tq, tk, tv, tg = (torch.tensor(a, requires_grad=True) for a in (q, k, v, gains))
        qn = torch.nn.functional.normalize(tq, dim=-1, eps=0.0).transpose(0, 1)
        kn = torch.nn.functional.normalize(tk, dim=-1, eps=0.0).transpose(0, 1)
        logits = tg[:, None, None] * (qn @ kn.transpose(-1, -2))
        logits = logits.masked_fill(~torch.tensor(mask)[None], float("-inf"))
        expected = (torch.softmax(logits, dim=-1) @ tv.transpose(0, 1)).transpose(0, 1)
        (expected * torch.tensor(proj)).sum().backward()

        tensors = [Tensor(a, requires_grad=True) for a in (q, k, v, gains)]
        with Tape() as tape:
            out = qknorm_attention(*tensors, mask=mask)
            loss = ops.sum_(ops.multiply(out, proj))
        tape.backward(loss)

        np.testing.assert_allclose(out.data, expected.detach().numpy(), atol=1e-10)
        for mine, theirs in zip(tensors, (tq, tk, tv, tg)):
            np.testing.assert_allclose(mine.grad, theirs.grad.numpy(), atol=1e-8)
