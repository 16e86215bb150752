import math

import numpy as np
import pytest
from PIL import Image

from ..augment import TtaVariant
from ..errors import NonFiniteVoxel
from ..models import MulticlassUNetConfig, PatchSpec, Prediction, build_multiclass_unet, sliding_window_predict
from ..uncertainty import (axial_montage, confidence_map, energy, render_axial_montage, softmax_energy_identity_check,
                           tta_aggregate, UncertaintyMap)


def test_energy_values():
    assert energy(np.array([5.0])) == pytest.approx(-5.0)
    assert energy(np.array([0.0, 0.0])) == pytest.approx(-0.693147, abs=1e-6)
    assert energy(np.array([1.0, 2.0, 3.0])) == pytest.approx(-3.407606, abs=1e-6)
    assert np.isfinite(energy(np.array([1000.0, -1000.0])))


def test_energy_shift_covariance():
    f = np.random.default_rng(0).normal(scale=3.0, size=(50, 4))
    for c in (-7.5, 0.25, 100.0):
        assert np.allclose(energy(f + c), energy(f) - c, atol=1e-9)


def test_identity_check():
    assert softmax_energy_identity_check(np.array([1.0, 2.0, 3.0])) <= 1e-9
    assert math.log(np.exp(3) / np.exp([1, 2, 3]).sum()) == pytest.approx(-0.407606, abs=1e-6)
    assert softmax_energy_identity_check(np.zeros(4)) <= 1e-12
    f = np.random.default_rng(1).normal(scale=4.0, size=(10 ** 4, 4)).astype(np.float32)
    assert softmax_energy_identity_check(f) <= 1e-6
    assert softmax_energy_identity_check(f.astype(np.float64)) <= 1e-12


def test_confidence_map():
    logits = np.zeros((2, 2, 2, 4))
    conf = confidence_map(logits)
    assert conf.dims == (2, 2, 2)
    assert np.allclose(conf.values, 1.386294, atol=1e-6)
    raised = confidence_map(logits + 2.5)
    assert np.allclose(raised.values - conf.values, 2.5, atol=1e-6)
    dominant = logits.copy()
    dominant[..., 0] = 40.0
    dominant[..., 1:] = -1e4
    assert np.allclose(confidence_map(dominant).values, 40.0)
    bumped = logits.copy()
    bumped[..., 2] = 0.5
    assert np.all(confidence_map(bumped).values > conf.values)
    with pytest.raises(NonFiniteVoxel):
        UncertaintyMap(np.full((2, 2, 2), np.nan))


class ConstantModel:
    num_classes = 4

    def predict(self, batch):
        shape = batch.shape[:4] + (4,)
        probs = np.broadcast_to(np.array([0.1, 0.2, 0.3, 0.4], np.float32), shape).copy()
        return Prediction(probs, np.log(probs))


class FlipSymmetricModel:
    """per-voxel softmax of a fixed channel mix: commutes with every reflection"""
    num_classes = 4

    def __init__(self):
        self.mix = np.random.default_rng(2).normal(size=(4, 4)).astype(np.float32)

    def predict(self, batch):
        logits = batch @ self.mix
        e = np.exp(logits - logits.max(axis=-1, keepdims=True))
        return Prediction(e / e.sum(axis=-1, keepdims=True), logits)


def test_aggregate_constant_model_is_exact():
    volume = np.random.default_rng(3).normal(size=(8, 8, 8, 4)).astype(np.float32)
    single = sliding_window_predict(ConstantModel(), volume, PatchSpec((8, 8, 8)))
    agg = tta_aggregate(ConstantModel(), volume, PatchSpec((4, 4, 8)), threads=1)
    assert np.array_equal(agg.probs, single.probs)


def test_aggregate_equivariant_model():
    model = FlipSymmetricModel()
    volume = np.random.default_rng(4).normal(size=(6, 8, 4, 4)).astype(np.float32)
    plain = model.predict(volume[None])
    agg = tta_aggregate(model, volume, PatchSpec((6, 8, 4)))
    assert np.max(np.abs(agg.probs - plain.probs[0])) <= 1e-6
    assert np.max(np.abs(agg.probs.sum(axis=-1) - 1.0)) <= 1e-6


def test_aggregate_order_invariance_on_real_network():
    model = build_multiclass_unet(MulticlassUNetConfig(widths=(4, 8, 8), bridge_width=8))
    volume = np.random.default_rng(5).normal(size=(8, 8, 16, 4)).astype(np.float32)
    forward = tta_aggregate(model, volume, PatchSpec((8, 8, 16)), TtaVariant.all(), threads=1)
    reverse = tta_aggregate(model, volume, PatchSpec((8, 8, 16)), TtaVariant.all()[::-1], threads=4)
    assert np.max(np.abs(forward.probs - reverse.probs)) <= 1e-6
    assert np.max(np.abs(forward.probs.sum(axis=-1) - 1.0)) <= 1e-6
    plain = model.predict(volume[None]).probs[0]
    assert not np.allclose(forward.probs, plain, atol=1e-6)


def test_axial_montage(tmp_path):
    values = np.arange(4 * 5 * 9, dtype=np.float32).reshape((4, 5, 9))
    image = axial_montage(values, slices=9)
    assert image.shape == (3 * 5, 3 * 4)
    assert image.min() == 0 and image.max() == 255
    path = render_axial_montage(values, tmp_path / "conf.png", slices=4)
    with Image.open(path) as img:
        assert img.size == (2 * 4, 2 * 5)
    assert not np.any(axial_montage(np.ones((3, 3, 3))))
