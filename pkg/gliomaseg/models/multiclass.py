from typing import Dict, List

import numpy as np

from ..autodiff import ParamSet, Tensor, concat_channels, conv_transpose3d, he_uniform, max_pool3d
from ..layers import (ACTIVATIONS, AttentionGateParams, ConvBlock2Params, attention_gate, conv_block2, instance_norm,
                      softmax_channels)
from .base import SegmentationModel, apply_conv, declare_conv
from .config import INSTANCE, MAXPOOL, MulticlassUNetConfig


class MulticlassUNet(SegmentationModel):
    """
    Attention U-Net over the cropped tumour region.

    Encoder levels: ConvBlock2 then a stride-2 convolution (or 2x2x2 max
    pooling). Decoder levels: transpose convolution, attention gate on the
    skip features driven by the coarser decoder input, concatenation
    [upsampled, gated] and a ConvBlock2. A 1x1x1 head feeds the softmax.
    """
    kind = "multiclass"

    def __init__(self, config: MulticlassUNetConfig, params: ParamSet = None, dtype=np.float32):
        super(MulticlassUNet, self).__init__(config, params, dtype)
        self.activation = ACTIVATIONS[config.activation]
        self.norm = config.norm == INSTANCE

    @property
    def strided(self) -> bool:
        return self.config.downsample != MAXPOOL

    def declare(self, params: ParamSet, rng: np.random.Generator, dtype) -> None:
        cfg: MulticlassUNetConfig = self.config
        cin = cfg.in_channels
        for level, width in enumerate(cfg.widths):
            ConvBlock2Params.declare(params, f"enc{level}.block", cin, width, rng, dtype)
            if cfg.downsample != MAXPOOL:
                declare_conv(params, f"enc{level}.down", 3, width, width, rng, dtype)
            cin = width
        ConvBlock2Params.declare(params, "bridge", cin, cfg.bridge_width, rng, dtype)
        below = cfg.bridge_width
        for level in reversed(range(cfg.depth)):
            width = cfg.widths[level]
            if cfg.attention:
                AttentionGateParams.declare(params, f"dec{level}.gate", width, below, rng, dtype=dtype)
            params.add(f"dec{level}.up.w", he_uniform(rng, (2, 2, 2, below, width), dtype))
            params.add(f"dec{level}.up.b", np.zeros(width, dtype=dtype))
            ConvBlock2Params.declare(params, f"dec{level}.block", 2 * width, width, rng, dtype)
            below = width
        declare_conv(params, "head", 1, cfg.widths[0], cfg.num_classes, rng, dtype)

    def _normed(self, h: Tensor) -> Tensor:
        return instance_norm(h) if self.norm else h

    def logits(self, x: Tensor, p: Dict[str, Tensor]) -> Tensor:
        act = self.activation
        skips: List[Tensor] = []
        h = x
        for level in range(self.depth):
            h = conv_block2(h, ConvBlock2Params.bind(p, f"enc{level}.block"), self.norm)
            skips.append(h)
            if self.strided:
                h = self._normed(act(apply_conv(h, p, f"enc{level}.down", stride=2)))
            else:
                h = max_pool3d(h)
        h = conv_block2(h, ConvBlock2Params.bind(p, "bridge"), self.norm)
        for level in reversed(range(self.depth)):
            skip = skips[level]
            if self.config.attention:
                skip = attention_gate(skip, h, AttentionGateParams.bind(p, f"dec{level}.gate"))
            up = self._normed(act(conv_transpose3d(h, p[f"dec{level}.up.w"]) + p[f"dec{level}.up.b"]))
            h = conv_block2(concat_channels(up, skip), ConvBlock2Params.bind(p, f"dec{level}.block"), self.norm)
        return apply_conv(h, p, "head")

    def squash(self, logits: Tensor) -> Tensor:
        return softmax_channels(logits)


def build_multiclass_unet(config: MulticlassUNetConfig = None, dtype=np.float32) -> MulticlassUNet:
    return MulticlassUNet(config or MulticlassUNetConfig(), dtype=dtype)
