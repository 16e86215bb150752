from typing import Dict, List

import numpy as np

from ..autodiff import ParamSet, Tensor, concat_channels, conv_transpose3d, he_uniform
from ..layers import ACTIVATIONS, ConvBlock1Params, conv_block1, instance_norm, sigmoid
from .base import SegmentationModel, apply_conv, declare_conv
from .config import BinaryUNetConfig


class BinaryUNet(SegmentationModel):
    """
    Tumour/no-tumour U-Net. Each encoder level is a ConvBlock1 followed by
    a stride-2 3x3x3 convolution; the bridge is a plain ConvBlock1; each
    decoder level upsamples by transpose convolution, concatenates the
    skip features and runs a ConvBlock1.
    """
    kind = "binary"

    def __init__(self, config: BinaryUNetConfig, params: ParamSet = None, dtype=np.float32):
        super(BinaryUNet, self).__init__(config, params, dtype)
        self.activation = ACTIVATIONS[config.activation]

    def declare(self, params: ParamSet, rng: np.random.Generator, dtype) -> None:
        cfg: BinaryUNetConfig = self.config
        cin = cfg.in_channels
        for level, width in enumerate(cfg.widths):
            ConvBlock1Params.declare(params, f"enc{level}.block", cin, width, rng, dtype)
            declare_conv(params, f"enc{level}.down", 3, width, width, rng, dtype)
            cin = width
        ConvBlock1Params.declare(params, "bridge", cin, cfg.bridge_width, rng, dtype)
        below = cfg.bridge_width
        for level in reversed(range(cfg.depth)):
            width = cfg.widths[level]
            params.add(f"dec{level}.up.w", he_uniform(rng, (2, 2, 2, below, width), dtype))
            params.add(f"dec{level}.up.b", np.zeros(width, dtype=dtype))
            ConvBlock1Params.declare(params, f"dec{level}.block", 2 * width, width, rng, dtype)
            below = width
        declare_conv(params, "head", 1, cfg.widths[0], 1, rng, dtype)

    def logits(self, x: Tensor, p: Dict[str, Tensor]) -> Tensor:
        act = self.activation
        skips: List[Tensor] = []
        h = x
        for level in range(self.depth):
            h = conv_block1(h, ConvBlock1Params.bind(p, f"enc{level}.block"), act)
            skips.append(h)
            h = instance_norm(act(apply_conv(h, p, f"enc{level}.down", stride=2)))
        h = conv_block1(h, ConvBlock1Params.bind(p, "bridge"), act)
        for level in reversed(range(self.depth)):
            up = instance_norm(act(conv_transpose3d(h, p[f"dec{level}.up.w"]) + p[f"dec{level}.up.b"]))
            h = conv_block1(concat_channels(up, skips[level]), ConvBlock1Params.bind(p, f"dec{level}.block"), act)
        return apply_conv(h, p, "head")

    def squash(self, logits: Tensor) -> Tensor:
        return sigmoid(logits)


def build_binary_unet(config: BinaryUNetConfig = None, dtype=np.float32) -> BinaryUNet:
    return BinaryUNet(config or BinaryUNetConfig(), dtype=dtype)
