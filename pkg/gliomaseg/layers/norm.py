from dataclasses import dataclass

import numpy as np

from ..autodiff import Tensor, record
from ..errors import DegenerateSpatial, ShapeMismatch

SPATIAL = (1, 2, 3)


@dataclass(frozen=True)
class InstanceNormLayer:
    epsilon: float = 1e-5

    def __post_init__(self):
        if not self.epsilon > 0:
            raise ValueError(f"epsilon must be > 0, got {self.epsilon}")

    def __call__(self, x: Tensor) -> Tensor:
        return instance_norm(x, self.epsilon)


def instance_norm(x: Tensor, epsilon: float = 1e-5) -> Tensor:
    """standardize every (instance, channel) over its spatial extent"""
    if x.ndim != 5:
        raise ShapeMismatch(f"instance_norm expects (T, H, W, D, C), got {x.shape}")
    count = x.shape[1] * x.shape[2] * x.shape[3]
    if count < 2:
        raise DegenerateSpatial(f"spatial extent {x.shape[1:4]} has fewer than 2 voxels")

    mean = x.data.mean(axis=SPATIAL, keepdims=True)
    centred = x.data - mean
    var = np.mean(centred * centred, axis=SPATIAL, keepdims=True)
    inv_std = 1.0 / np.sqrt(var + x.dtype.type(epsilon))
    out = centred * inv_std

    def grad_fn(g):
        g_mean = g.mean(axis=SPATIAL, keepdims=True)
        gy_mean = np.mean(g * out, axis=SPATIAL, keepdims=True)
        return (inv_std * (g - g_mean - out * gy_mean),)
    return record(out, (x,), grad_fn)
