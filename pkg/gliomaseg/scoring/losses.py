"""Training losses over probability tensors (T, H, W, D, K)"""
from typing import Callable, Dict, List, Union

import numpy as np

from ..autodiff import Tensor, as_tensor, clip, log, log_cosh, reduce_mean, reduce_sum, take_channels
from ..errors import ShapeMismatch, UnknownLoss

DICE_EPS = 1e-6
CE_FLOOR = 1e-12
VOXEL_AXES = (0, 1, 2, 3)

Target = Union[np.ndarray, Tensor]
LossFn = Callable[[Tensor, Target], Tensor]


def one_hot(labels: np.ndarray, num_classes: int, dtype=np.float32) -> np.ndarray:
    """integer labels (..., ) to (..., K); K=1 gives the binary foreground channel"""
    labels = np.asarray(labels)
    if num_classes == 1:
        return (labels > 0).astype(dtype)[..., None]
    return (labels[..., None] == np.arange(num_classes)).astype(dtype)


def _prepare(probs: Tensor, target: Target) -> Tensor:
    target = as_tensor(target, like=probs)
    if probs.shape != target.shape:
        raise ShapeMismatch(f"prediction {probs.shape} vs target {target.shape}")
    if probs.ndim < 2:
        raise ShapeMismatch(f"expected (..., K) tensors, got {probs.shape}")
    return target


def foreground_classes(num_classes: int) -> List[int]:
    return [0] if num_classes == 1 else list(range(1, num_classes))


def _soft_dice(probs: Tensor, target: Tensor, eps: float) -> Tensor:
    classes = foreground_classes(probs.shape[-1])
    p = take_channels(probs, classes)
    y = take_channels(target, classes)
    axes = tuple(range(probs.ndim - 1))
    inter = reduce_sum(p * y, axes)
    total = reduce_sum(p, axes) + reduce_sum(y, axes)
    return reduce_mean((inter * 2.0 + eps) / (total + eps))


def dice_loss(probs: Tensor, target: Target, eps: float = DICE_EPS) -> Tensor:
    """1 - mean over foreground classes of (2 sum(p y) + eps) / (sum(p) + sum(y) + eps)"""
    target = _prepare(probs, target)
    return 1.0 - _soft_dice(probs, target, eps)


def dice_score_soft(probs: Tensor, target: Target, eps: float = DICE_EPS) -> Tensor:
    target = _prepare(probs, target)
    return _soft_dice(probs, target, eps)


def cross_entropy(probs: Tensor, target: Target) -> Tensor:
    """
    Mean over voxels of -sum_c y_c log p_c. A single channel is read as a
    sigmoid output: -log p where y=1 and -log(1-p) elsewhere.
    """
    target = _prepare(probs, target)
    axes = tuple(range(probs.ndim - 1))
    if probs.shape[-1] == 1:
        pos = target * log(clip(probs, CE_FLOOR, 1.0))
        neg = (1.0 - target) * log(clip(1.0 - probs, CE_FLOOR, 1.0))
        return -reduce_mean(pos + neg)
    per_voxel = reduce_sum(target * log(clip(probs, CE_FLOOR, 1.0)), axes=-1)
    return -reduce_mean(per_voxel, axes)


def log_cosh_dice(probs: Tensor, target: Target) -> Tensor:
    return log_cosh(dice_loss(probs, target))


def dice_ce(probs: Tensor, target: Target) -> Tensor:
    return dice_loss(probs, target) + cross_entropy(probs, target)


LOSSES: Dict[str, LossFn] = {
    "DL": dice_loss,
    "CE": cross_entropy,
    "DL+CE": dice_ce,
    "LC": log_cosh_dice,
}
LOSS_ALIASES = {"CE+DL": "DL+CE"}


def get_loss(name: str) -> LossFn:
    key = LOSS_ALIASES.get(name, name)
    if key not in LOSSES:
        raise UnknownLoss(f"unknown loss {name!r}, expected one of {sorted(LOSSES)}")
    return LOSSES[key]
