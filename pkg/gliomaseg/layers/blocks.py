"""The two convolution blocks used by the segmentation networks"""
from dataclasses import dataclass
from typing import Callable, Dict

import numpy as np

from ..autodiff import ParamSet, Tensor, conv3d, he_uniform
from ..errors import ShapeMismatch
from .activations import elu, relu
from .attention import channel_coefficients
from .norm import instance_norm

Activation = Callable[[Tensor], Tensor]


def _declare_convs(params: ParamSet, prefix: str, cin: int, cout: int, rng: np.random.Generator, dtype):
    params.add(f"{prefix}.w1", he_uniform(rng, (3, 3, 3, cin, cout), dtype))
    params.add(f"{prefix}.b1", np.zeros(cout, dtype=dtype))
    params.add(f"{prefix}.w2", he_uniform(rng, (3, 3, 3, cout, cout), dtype))
    params.add(f"{prefix}.b2", np.zeros(cout, dtype=dtype))


@dataclass
class ConvBlock1Params:
    w1: Tensor
    b1: Tensor
    w2: Tensor
    b2: Tensor

    @property
    def in_channels(self) -> int:
        return self.w1.shape[3]

    @property
    def out_channels(self) -> int:
        return self.w2.shape[4]

    @staticmethod
    def declare(params: ParamSet, prefix: str, cin: int, cout: int, rng: np.random.Generator, dtype=np.float32):
        _declare_convs(params, prefix, cin, cout, rng, dtype)

    @classmethod
    def bind(cls, tensors: Dict[str, Tensor], prefix: str) -> "ConvBlock1Params":
        return cls(*(tensors[f"{prefix}.{k}"] for k in ("w1", "b1", "w2", "b2")))


@dataclass
class ConvBlock2Params(ConvBlock1Params):
    w_c: Tensor = None

    @staticmethod
    def declare(params: ParamSet, prefix: str, cin: int, cout: int, rng: np.random.Generator, dtype=np.float32):
        _declare_convs(params, prefix, cin, cout, rng, dtype)
        params.add(f"{prefix}.w_c", np.ones(cout, dtype=dtype))

    @classmethod
    def bind(cls, tensors: Dict[str, Tensor], prefix: str) -> "ConvBlock2Params":
        return cls(*(tensors[f"{prefix}.{k}"] for k in ("w1", "b1", "w2", "b2", "w_c")))


def _check_input(x: Tensor, params: ConvBlock1Params):
    if x.ndim != 5 or x.shape[-1] != params.in_channels:
        raise ShapeMismatch(f"block expects {params.in_channels} input channels, got {x.shape}")


def conv_block1(x: Tensor, params: ConvBlock1Params, activation: Activation = elu, norm: bool = True) -> Tensor:
    """conv, act, I-Norm, conv, act, I-Norm"""
    _check_input(x, params)
    h = activation(conv3d(x, params.w1) + params.b1)
    if norm:
        h = instance_norm(h)
    h = activation(conv3d(h, params.w2) + params.b2)
    if norm:
        h = instance_norm(h)
    return h


def conv_block2(x: Tensor, params: ConvBlock2Params, norm: bool = True) -> Tensor:
    """
    conv, ReLU, I-Norm, conv, ReLU, I-Norm, channel attention, I-Norm.
    The attention coefficients are pooled from the second conv's
    activations (the side branch), then scale the normalized features.
    """
    _check_input(x, params)
    h = relu(conv3d(x, params.w1) + params.b1)
    if norm:
        h = instance_norm(h)
    branch = relu(conv3d(h, params.w2) + params.b2)
    alpha = channel_coefficients(branch, params.w_c)
    if not norm:
        return branch * alpha
    return instance_norm(instance_norm(branch) * alpha)
