import math

import numpy as np
import pytest

from ..autodiff import Tensor
from ..errors import GridMismatch, ShapeMismatch, UnknownLoss
from ..scoring import (CORE, ENHANCING, WHOLE, aggregate_reports, case_report, cross_entropy, dice_ce, dice_loss,
                       dice_metric, dice_score_soft, get_loss, log_cosh_dice, one_hot, region_dice)


def _onehot(labels, k=4):
    return one_hot(np.asarray(labels), k, dtype=np.float64)


def test_dice_loss_perfect_and_disjoint():
    labels = np.zeros((1, 4, 4, 4), dtype=int)
    labels[0, 1:3, 1:3, 1:3] = 1
    labels[0, 0, 0, 0] = 2
    labels[0, 3, 3, 3] = 3
    target = _onehot(labels)
    assert dice_loss(Tensor(target), target).item() <= 1e-5

    a = np.zeros((1, 2, 1, 1, 1))
    b = np.zeros((1, 2, 1, 1, 1))
    a[0, 0] = 1.0
    b[0, 1] = 1.0
    assert dice_loss(Tensor(a), b).item() >= 1 - 1e-5


def test_dice_loss_half_voxel():
    probs = Tensor(np.full((1, 1, 1, 1, 1), 0.5))
    target = np.ones((1, 1, 1, 1, 1))
    assert dice_loss(probs, target, eps=1e-12).item() == pytest.approx(1.0 / 3.0, abs=1e-9)


def test_dice_loss_and_soft_score_complement():
    rng = np.random.default_rng(0)
    logits = rng.normal(size=(2, 3, 3, 3, 4))
    probs = np.exp(logits) / np.exp(logits).sum(axis=-1, keepdims=True)
    target = _onehot(rng.integers(0, 4, size=(2, 3, 3, 3)))
    total = dice_loss(Tensor(probs), target).item() + dice_score_soft(Tensor(probs), target).item()
    assert total == pytest.approx(1.0, abs=1e-6)


def test_cross_entropy_values():
    target = _onehot([[[[1]]]])
    probs = np.array([0.25, 0.5, 0.25, 0.0]).reshape((1, 1, 1, 1, 4))
    assert cross_entropy(Tensor(probs), target).item() == pytest.approx(math.log(2), abs=1e-9)
    uniform = np.full((1, 2, 2, 2, 4), 0.25)
    labels = np.random.default_rng(1).integers(0, 4, size=(1, 2, 2, 2))
    assert cross_entropy(Tensor(uniform), _onehot(labels)).item() == pytest.approx(math.log(4), abs=1e-6)
    assert cross_entropy(Tensor(target), target).item() == pytest.approx(0.0, abs=1e-12)


def test_binary_cross_entropy():
    probs = np.array([0.8, 0.3]).reshape((1, 2, 1, 1, 1))
    target = np.array([1.0, 0.0]).reshape((1, 2, 1, 1, 1))
    expected = -(math.log(0.8) + math.log(0.7)) / 2
    assert cross_entropy(Tensor(probs), target).item() == pytest.approx(expected, abs=1e-12)


def test_log_cosh_dice_values():
    probs = Tensor(np.zeros((1, 1, 1, 1, 1)))
    target = np.ones((1, 1, 1, 1, 1))
    assert log_cosh_dice(probs, target).item() == pytest.approx(math.log(math.cosh(1.0)), abs=1e-5)
    assert math.log(math.cosh(1.0)) == pytest.approx(0.433781, abs=1e-6)
    perfect = _onehot([[[[2, 3]]]])
    assert log_cosh_dice(Tensor(perfect), perfect).item() <= 1e-9
    assert dice_ce(Tensor(perfect), perfect).item() <= 1e-5


def test_log_cosh_below_dice_on_random_batches():
    rng = np.random.default_rng(2)
    for _ in range(5):
        logits = rng.normal(size=(1, 3, 3, 3, 4))
        probs = Tensor(np.exp(logits) / np.exp(logits).sum(axis=-1, keepdims=True))
        target = _onehot(rng.integers(0, 4, size=(1, 3, 3, 3)))
        assert log_cosh_dice(probs, target).item() <= dice_loss(probs, target).item()


def test_loss_shape_mismatch():
    with pytest.raises(ShapeMismatch):
        dice_loss(Tensor(np.zeros((1, 2, 2, 2, 4))), np.zeros((1, 2, 2, 2, 3)))


def test_loss_registry_routes_by_name():
    rng = np.random.default_rng(3)
    logits = rng.normal(size=(1, 3, 3, 3, 4))
    probs = Tensor(np.exp(logits) / np.exp(logits).sum(axis=-1, keepdims=True))
    target = _onehot(rng.integers(0, 4, size=(1, 3, 3, 3)))
    assert get_loss("CE")(probs, target).item() == cross_entropy(probs, target).item()
    assert get_loss("LC")(probs, target).item() == log_cosh_dice(probs, target).item()
    assert get_loss("DL+CE")(probs, target).item() == dice_ce(probs, target).item()
    assert get_loss("CE+DL") is get_loss("DL+CE")
    assert get_loss("DL") is dice_loss
    with pytest.raises(UnknownLoss):
        get_loss("focal")


def test_dice_metric_cases():
    mask = np.zeros((4, 4, 4), bool)
    mask[1, 1, 1] = mask[2, 2, 2] = True
    assert dice_metric(mask, mask) == 1.0
    other = np.zeros_like(mask)
    other[1, 1, 1] = other[3, 3, 3] = True
    assert dice_metric(mask, other) == 0.5
    assert dice_metric(other, mask) == dice_metric(mask, other)
    assert dice_metric(np.zeros_like(mask), np.zeros_like(mask)) == 1.0
    with pytest.raises(GridMismatch):
        dice_metric(mask, np.zeros((4, 4, 3), bool))


def test_region_dice_two_voxels():
    truth = np.array([2, 0]).reshape((2, 1, 1))
    pred = np.array([0, 3]).reshape((2, 1, 1))
    assert region_dice(pred, truth, WHOLE) == 0.0
    assert region_dice(pred, truth, ENHANCING) == 0.0
    assert region_dice(pred, truth, CORE) == 0.0
    report = case_report(pred, truth)
    assert report == {"whole": 0.0, "core": 0.0, "enh": 0.0, "mean": 0.0}


def test_case_report_and_aggregate():
    truth = np.zeros((4, 4, 4), dtype=np.uint8)
    truth[1:3, 1:3, 1:3] = 2
    truth[1, 1, 1] = 3
    perfect = case_report(truth, truth)
    assert perfect == {"whole": 1.0, "core": 1.0, "enh": 1.0, "mean": 1.0}
    partial = case_report(np.where(truth == 3, 0, truth), truth)
    assert partial["enh"] == 0.0
    assert partial["mean"] == pytest.approx((partial["whole"] + partial["core"] + partial["enh"]) / 3)
    agg = aggregate_reports([perfect, partial])
    assert agg["count"] == 2
    assert agg["mean"] == pytest.approx((perfect["mean"] + partial["mean"]) / 2, abs=1e-9)
