import numpy as np
import pytest

from ..autodiff import ParamSet, Tape, Tensor, backward, conv3d, reduce_sum
from ..errors import DegenerateSpatial, ShapeMismatch
from ..layers import (AttentionGateParams, ConvBlock1Params, ConvBlock2Params, InstanceNormLayer, attention_gate,
                      channel_attention, channel_coefficients, conv_block1, conv_block2, elu, gate_coefficients,
                      instance_norm, relu, sigmoid, softmax_channels)


def _rng(seed=0):
    return np.random.default_rng(seed)


def test_instance_norm_statistics():
    x = _rng(1).normal(3.0, 2.0, size=(2, 5, 4, 3, 3))
    out = instance_norm(Tensor(x)).data
    mean = out.mean(axis=(1, 2, 3))
    var = out.var(axis=(1, 2, 3))
    assert np.max(np.abs(mean)) <= 1e-5
    assert np.max(np.abs(var - 1.0)) <= 1e-4


def test_instance_norm_hand_values_and_constant_channel():
    x = np.array([2.0, 4.0, 6.0]).reshape((1, 3, 1, 1, 1))
    out = instance_norm(Tensor(x)).data
    assert np.allclose(out.ravel(), [-1.2247, 0.0, 1.2247], atol=1e-4)
    const = instance_norm(Tensor(np.full((1, 2, 2, 2, 1), 7.0))).data
    assert np.all(const == 0.0)
    assert InstanceNormLayer()(Tensor(x)).shape == x.shape


def test_instance_norm_is_per_instance():
    rng = _rng(2)
    x = np.concatenate([rng.normal(size=(1, 3, 3, 3, 2)), 50.0 * rng.normal(size=(1, 3, 3, 3, 2))])
    out = instance_norm(Tensor(x)).data
    swapped = instance_norm(Tensor(x[::-1].copy())).data
    assert np.allclose(out[::-1], swapped)


def test_instance_norm_degenerate():
    with pytest.raises(DegenerateSpatial):
        instance_norm(Tensor(np.ones((1, 1, 1, 1, 2))))


def test_activation_values():
    assert elu(Tensor(np.array([-1.0]))).data[0] == pytest.approx(-0.632121, abs=1e-6)
    assert elu(Tensor(np.array([0.0]))).data[0] == 0.0
    assert relu(Tensor(np.array([-2.0, 3.0]))).data.tolist() == [0.0, 3.0]
    assert sigmoid(Tensor(np.array([0.0]))).data[0] == 0.5
    probs = softmax_channels(Tensor(np.full((1, 1, 1, 1, 4), 2.5))).data
    assert np.allclose(probs, 0.25)


def test_softmax_sums_and_shift_invariance():
    logits = _rng(3).normal(scale=4.0, size=(2, 3, 3, 3, 4))
    probs = softmax_channels(Tensor(logits)).data
    assert np.max(np.abs(probs.sum(axis=-1) - 1.0)) <= 1e-6
    shifted = softmax_channels(Tensor(logits + _rng(4).normal(size=(2, 3, 3, 3, 1)) * 10)).data
    assert np.max(np.abs(shifted - probs)) <= 1e-6


def test_channel_attention_cases():
    x = _rng(5).normal(size=(1, 3, 3, 3, 2))
    out = channel_attention(Tensor(x), Tensor(np.zeros(2)))
    assert np.allclose(out.data, x / 2)
    x[..., 1] = 0.0
    alpha = channel_coefficients(Tensor(x), Tensor(np.array([3.0, -7.0]))).data
    assert alpha[0, 0, 0, 0, 1] == 0.5
    assert 0.0 < alpha[0, 0, 0, 0, 0] < 1.0
    with pytest.raises(ShapeMismatch):
        channel_attention(Tensor(x), Tensor(np.zeros(3)))


def _gate(rng, f_x=2, f_g=4):
    params = ParamSet()
    AttentionGateParams.declare(params, "ag", f_x, f_g, rng, dtype=np.float64)
    return params


def test_attention_gate_zero_psi_halves():
    rng = _rng(6)
    params = _gate(rng)
    params["ag.w_psi"] = np.zeros_like(params["ag.w_psi"])
    x = rng.normal(size=(1, 4, 4, 4, 2))
    g = rng.normal(size=(1, 2, 2, 2, 4))
    out = attention_gate(Tensor(x), Tensor(g), AttentionGateParams.bind(params.constants(), "ag"))
    assert np.allclose(out.data, x / 2)


def test_attention_gate_coefficients_in_open_interval():
    rng = _rng(7)
    params = _gate(rng, 4, 6)
    gate = AttentionGateParams.bind(params.constants(), "ag")
    assert gate.inter_channels == 2
    alpha = gate_coefficients(Tensor(rng.normal(size=(2, 6, 4, 8, 4)) * 3),
                              Tensor(rng.normal(size=(2, 3, 2, 4, 6)) * 3), gate).data
    assert alpha.shape == (2, 6, 4, 8, 1)
    assert alpha.min() > 0.0 and alpha.max() < 1.0


def test_attention_gate_grid_mismatch():
    rng = _rng(8)
    gate = AttentionGateParams.bind(_gate(rng).constants(), "ag")
    with pytest.raises(ShapeMismatch):
        attention_gate(Tensor(np.zeros((1, 4, 4, 4, 2))), Tensor(np.zeros((1, 4, 4, 4, 4))), gate)


def test_blocks_keep_spatial_dims():
    rng = _rng(9)
    params = ParamSet()
    ConvBlock1Params.declare(params, "a", 4, 6, rng)
    ConvBlock2Params.declare(params, "b", 6, 5, rng)
    bound = params.constants()
    x = Tensor(rng.normal(size=(2, 6, 4, 8, 4)).astype(np.float32))
    h = conv_block1(x, ConvBlock1Params.bind(bound, "a"))
    assert h.shape == (2, 6, 4, 8, 6)
    out = conv_block2(h, ConvBlock2Params.bind(bound, "b"))
    assert out.shape == (2, 6, 4, 8, 5)
    assert out.dtype == np.float32
    with pytest.raises(ShapeMismatch):
        conv_block1(out, ConvBlock1Params.bind(bound, "a"))


def test_block2_zero_attention_weight_is_half_scale():
    rng = _rng(10)
    params = ParamSet()
    ConvBlock2Params.declare(params, "b", 3, 3, rng, dtype=np.float64)
    params["b.w_c"] = np.zeros(3)
    x = Tensor(rng.normal(size=(1, 4, 4, 4, 3)))
    block = ConvBlock2Params.bind(params.constants(), "b")
    out = conv_block2(x, block).data

    h = instance_norm(relu(conv3d(x, block.w1) + block.b1))
    branch = relu(conv3d(h, block.w2) + block.b2)
    expected = instance_norm(instance_norm(branch) * 0.5).data
    assert np.allclose(out, expected, atol=1e-12)


def test_block_gradients_reach_every_parameter():
    rng = _rng(11)
    params = ParamSet()
    ConvBlock2Params.declare(params, "b", 2, 3, rng, dtype=np.float64)
    tape = Tape()
    bound = params.bind(tape)
    out = conv_block2(Tensor(rng.normal(size=(1, 4, 4, 4, 2))), ConvBlock2Params.bind(bound, "b"))
    grads = backward(tape, reduce_sum(out * rng.normal(size=out.shape)))
    assert set(grads) == set(params.names)
    for name in ("b.w1", "b.w2", "b.b1"):
        assert np.any(grads[name] != 0)
