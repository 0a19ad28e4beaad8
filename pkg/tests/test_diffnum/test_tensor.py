"""Tests for tensors and the reverse-mode tape."""

import numpy as np
import pytest

from src.diffnum import ops
from src.diffnum.precision import get_default_dtype, is_verification_mode, verification_mode
from src.diffnum.tensor import Tape, Tensor, active_tape, as_tensor
from src.utils.errors import ShapeError, StateError


class TestTensor:

    def test_integer_data_uses_default_dtype(self) -> None:
        assert Tensor([1, 2, 3]).dtype == np.dtype(get_default_dtype())

    def test_float_data_keeps_dtype(self) -> None:
        assert Tensor(np.zeros(2, dtype=np.float64)).dtype == np.float64

    def test_item_requires_single_element(self) -> None:
        assert Tensor([[2.5]]).item() == 2.5
        with pytest.raises(ShapeError):
            Tensor([1.0, 2.0]).item()

    def test_numpy_returns_copy(self) -> None:
        t = Tensor(np.ones(3))
        t.numpy()[0] = 5.0
        assert t.data[0] == 1.0

    def test_as_tensor_passthrough(self) -> None:
        t = Tensor(np.ones(2))
        assert as_tensor(t) is t

    def test_python_scalars_use_default_dtype(self) -> None:
        assert as_tensor(0.5).dtype == np.dtype(get_default_dtype())
        assert as_tensor(3).dtype == np.dtype(get_default_dtype())
        with verification_mode():
            assert as_tensor(0.5).dtype == np.float64

    def test_float32_arithmetic_with_python_constants(self) -> None:
        x = Tensor(np.ones(3, dtype=np.float32))
        assert not is_verification_mode()
        assert ops.multiply(x, 0.5).dtype == np.float32
        assert ops.add(x, 1.0).dtype == np.float32

    def test_operator_sugar(self) -> None:
        a = Tensor(np.array([1.0, 2.0]))
        b = Tensor(np.array([3.0, 5.0]))
        np.testing.assert_allclose((a + b).data, [4.0, 7.0])
        np.testing.assert_allclose((b - a).data, [2.0, 3.0])
        np.testing.assert_allclose((2.0 - a).data, [1.0, 0.0])
        np.testing.assert_allclose((a * b).data, [3.0, 10.0])
        np.testing.assert_allclose((-a).data, [-1.0, -2.0])
        np.testing.assert_allclose(a[1:].data, [2.0])


class TestTape:

    def test_active_tape_scoped(self) -> None:
        assert active_tape() is None
        with Tape() as tape:
            assert active_tape() is tape
        assert active_tape() is None

    def test_records_only_tracked_ops(self) -> None:
        x = Tensor(np.ones(3), requires_grad=True)
        c = Tensor(np.ones(3))
        with Tape() as tape:
            ops.add(c, c)
            ops.add(x, c)
        assert len(tape) == 1
        assert tape.nodes[0].op == "add"

    def test_no_tape_means_no_tracking(self) -> None:
        x = Tensor(np.ones(3), requires_grad=True)
        y = ops.square(x)
        assert not y.requires_grad

    def test_reused_tensor_accumulates(self) -> None:
        x = Tensor(np.array([3.0]), requires_grad=True)
        with Tape() as tape:
            y = ops.add(ops.multiply(x, x), x)
        tape.backward(y)
        np.testing.assert_allclose(x.grad, [7.0])

    def test_diamond_graph_visits_once(self) -> None:
        x = Tensor(np.array([2.0]), requires_grad=True)
        with Tape() as tape:
            h = ops.square(x)
            y = ops.add(ops.scale(h, 3.0), ops.scale(h, 4.0))
        tape.backward(y)
        np.testing.assert_allclose(x.grad, [28.0])

    def test_grad_accumulates_across_backward_calls(self) -> None:
        x = Tensor(np.array([1.0, 2.0]), requires_grad=True)
        for _ in range(2):
            with Tape() as tape:
                y = ops.sum_(ops.scale(x, 2.0))
            tape.backward(y)
        np.testing.assert_allclose(x.grad, [4.0, 4.0])

    def test_backward_without_grad(self) -> None:
        with Tape() as tape:
            y = ops.square(Tensor(np.ones(2)))
        with pytest.raises(StateError):
            tape.backward(y)

    def test_seed_shape_checked(self) -> None:
        x = Tensor(np.ones(3), requires_grad=True)
        with Tape() as tape:
            y = ops.square(x)
        with pytest.raises(ShapeError):
            tape.backward(y, grad=np.ones(2))

    def test_grad_matches_leaf_dtype(self) -> None:
        x = Tensor(np.ones(3, dtype=np.float32), requires_grad=True)
        with Tape() as tape:
            y = ops.sum_(ops.square(x))
        tape.backward(y)
        assert x.grad.dtype == np.float32


class TestPrecision:

    def test_verification_mode_restores(self) -> None:
        before = get_default_dtype()
        with verification_mode():
            assert is_verification_mode()
            assert Tensor([1]).dtype == np.float64
        assert get_default_dtype() is before
