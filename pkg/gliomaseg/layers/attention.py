from dataclasses import dataclass
from typing import Dict, Optional

import numpy as np

from ..autodiff import ParamSet, Tensor, conv3d, he_uniform, reduce_mean, upsample_linear2x
from ..errors import ShapeMismatch
from .activations import relu, sigmoid

SPATIAL = (1, 2, 3)


def channel_coefficients(x: Tensor, w_c: Tensor) -> Tensor:
    """alpha_c = sigmoid(GAP_c(x) * W_c), shaped (T, 1, 1, 1, C)"""
    if x.ndim != 5 or w_c.shape != (x.shape[-1],):
        raise ShapeMismatch(f"channel attention weight {w_c.shape} for features {x.shape}")
    return sigmoid(reduce_mean(x, SPATIAL, keepdims=True) * w_c)


def channel_attention(x: Tensor, w_c: Tensor) -> Tensor:
    return x * channel_coefficients(x, w_c)


@dataclass
class AttentionGateParams:
    w_x: Tensor
    w_g: Tensor
    w_psi: Tensor

    @property
    def inter_channels(self) -> int:
        return self.w_x.shape[-1]

    @staticmethod
    def declare(params: ParamSet, prefix: str, f_x: int, f_g: int, rng: np.random.Generator,
                inter: Optional[int] = None, dtype=np.float32) -> int:
        inter = inter or max(1, f_x // 2)
        if inter < 1:
            raise ShapeMismatch(f"attention gate needs at least one inner channel, got {inter}")
        params.add(f"{prefix}.w_x", he_uniform(rng, (1, 1, 1, f_x, inter), dtype))
        params.add(f"{prefix}.w_g", he_uniform(rng, (1, 1, 1, f_g, inter), dtype))
        params.add(f"{prefix}.w_psi", he_uniform(rng, (1, 1, 1, inter, 1), dtype))
        return inter

    @classmethod
    def bind(cls, tensors: Dict[str, Tensor], prefix: str) -> "AttentionGateParams":
        return cls(tensors[f"{prefix}.w_x"], tensors[f"{prefix}.w_g"], tensors[f"{prefix}.w_psi"])


def gate_coefficients(x: Tensor, g: Tensor, params: AttentionGateParams) -> Tensor:
    """attention coefficients on x's grid, shaped (T, H, W, D, 1)"""
    if x.ndim != 5 or g.ndim != 5 or x.shape[0] != g.shape[0]:
        raise ShapeMismatch(f"attention gate on x {x.shape} with g {g.shape}")
    if any(n % 2 for n in x.shape[1:4]) or tuple(n // 2 for n in x.shape[1:4]) != g.shape[1:4]:
        raise ShapeMismatch(f"gating grid {g.shape[1:4]} is not half of {x.shape[1:4]}")
    theta = conv3d(x, params.w_x, stride=2)
    phi = conv3d(g, params.w_g)
    psi = conv3d(relu(theta + phi), params.w_psi)
    return upsample_linear2x(sigmoid(psi))


def attention_gate(x: Tensor, g: Tensor, params: AttentionGateParams) -> Tensor:
    return x * gate_coefficients(x, g, params)
