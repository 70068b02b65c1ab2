from pathlib import Path

import numpy as np
import numpy.testing as npt
import pytest

from protodiag.errors import CheckpointError
from protodiag.network import HeadKind, ModelParams, ModelShape, init_weights, load_checkpoint, save_checkpoint
from protodiag.optim import AdaDeltaState, adadelta_step


@pytest.fixture
def params(rng: np.random.Generator) -> ModelParams:
    return init_weights(ModelShape(HeadKind.PROTOTYPICAL, 3), rng)


@pytest.mark.parametrize("head", [HeadKind.PROTOTYPICAL, HeadKind.TRADITIONAL])
def test_checkpoint_round_trip_is_bitwise(tmp_path: Path, rng: np.random.Generator, head: HeadKind) -> None:
    original = init_weights(ModelShape(head, 4, proto_dim=3), rng)

    loaded, state = load_checkpoint(save_checkpoint(tmp_path / "nested" / "model.ckpt", original))

    assert state is None
    assert loaded.shape == original.shape
    assert list(loaded.tensors) == list(original.tensors)
    for name, tensor in original.tensors.items():
        npt.assert_array_equal(loaded[name].data, tensor.data)
        assert loaded[name].requires_grad


def test_checkpoint_keeps_optimizer_state(tmp_path: Path, params: ModelParams) -> None:
    state = AdaDeltaState.for_params(params.tensors)
    for tensor in params.tensors.values():
        tensor.grad = np.full_like(tensor.data, 0.5)
    adadelta_step(params.tensors, state)

    _, loaded = load_checkpoint(save_checkpoint(tmp_path / "model.ckpt", params, state))

    assert loaded is not None
    assert loaded.steps == 1
    assert (loaded.rho, loaded.epsilon) == (state.rho, state.epsilon)
    for name in params.tensors:
        npt.assert_array_equal(loaded.square_avg[name], state.square_avg[name])
        npt.assert_array_equal(loaded.acc_delta[name], state.acc_delta[name])


def test_missing_checkpoint(tmp_path: Path) -> None:
    with pytest.raises(CheckpointError, match="not found"):
        load_checkpoint(tmp_path / "absent.ckpt")


def test_bad_magic_is_rejected(tmp_path: Path, params: ModelParams) -> None:
    path = save_checkpoint(tmp_path / "model.ckpt", params)
    path.write_bytes(b"XXXX" + path.read_bytes()[4:])

    with pytest.raises(CheckpointError, match="bad magic"):
        load_checkpoint(path)


@pytest.mark.parametrize("keep", [10, 200, 1000])
def test_truncated_checkpoint_is_rejected(tmp_path: Path, params: ModelParams, keep: int) -> None:
    path = save_checkpoint(tmp_path / "model.ckpt", params)
    path.write_bytes(path.read_bytes()[:keep])

    with pytest.raises(CheckpointError):
        load_checkpoint(path)


def test_missing_optimizer_flag_counts_as_truncation(tmp_path: Path, params: ModelParams) -> None:
    path = save_checkpoint(tmp_path / "model.ckpt", params)
    path.write_bytes(path.read_bytes()[:-1])

    with pytest.raises(CheckpointError, match="truncated"):
        load_checkpoint(path)


def corrupt(path: Path, offset: int, replacement: bytes) -> Path:
    data = path.read_bytes()
    path.write_bytes(data[:offset] + replacement + data[offset + len(replacement) :])
    return path


def test_header_with_an_invalid_model_is_rejected(tmp_path: Path, params: ModelParams) -> None:
    # magic, version and head code precede the proto dim at byte 9 and the class count at byte 13
    path = corrupt(save_checkpoint(tmp_path / "model.ckpt", params), 13, (1).to_bytes(4, "little"))

    with pytest.raises(CheckpointError, match="corrupt checkpoint"):
        load_checkpoint(path)


def test_undecodable_tensor_name_is_rejected(tmp_path: Path, params: ModelParams) -> None:
    # the first tensor name starts after the 25-byte header and its 2-byte length
    path = corrupt(save_checkpoint(tmp_path / "model.ckpt", params), 27, b"\xff")

    with pytest.raises(CheckpointError, match="corrupt checkpoint"):
        load_checkpoint(path)
