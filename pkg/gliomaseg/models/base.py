"""
Segmentation networks as a named ParamSet plus a pure forward function.

A model never owns a tape: forward() binds the parameters either to a
caller's tape (training) or as constants (inference), so one model can
serve concurrent read-only predictions.
"""
import abc
from dataclasses import dataclass
from typing import Dict, Optional, Tuple, Union

import numpy as np

from ..autodiff import ParamSet, Tape, Tensor, conv3d, he_uniform
from ..errors import IndivisibleDims, ShapeMismatch
from ..logging import logger


@dataclass
class Prediction:
    """Channels-last probabilities and the logits they were squashed from"""
    probs: np.ndarray
    logits: np.ndarray

    @property
    def num_classes(self) -> int:
        return self.probs.shape[-1]


@dataclass
class ForwardResult:
    probs: Tensor
    logits: Tensor


Batch = Union[np.ndarray, Tensor]


class SegmentationModel(abc.ABC):
    kind: str = "abstract"

    def __init__(self, config, params: Optional[ParamSet] = None, dtype=np.float32):
        self.config = config
        if params is None:
            params = ParamSet()
            self.declare(params, np.random.default_rng(config.seed), dtype)
        self.params = params
        logger.debug(f"{self.kind} model: {self.parameter_count} parameters")

    @abc.abstractmethod
    def declare(self, params: ParamSet, rng: np.random.Generator, dtype) -> None:
        pass

    @abc.abstractmethod
    def logits(self, x: Tensor, p: Dict[str, Tensor]) -> Tensor:
        pass

    @abc.abstractmethod
    def squash(self, logits: Tensor) -> Tensor:
        pass

    @property
    def depth(self) -> int:
        return self.config.depth

    @property
    def divisor(self) -> int:
        return 2 ** self.depth

    @property
    def in_channels(self) -> int:
        return self.config.in_channels

    @property
    def num_classes(self) -> int:
        return self.config.out_channels

    @property
    def parameter_count(self) -> int:
        return self.params.size

    @property
    def dtype(self):
        return self.params.dtype

    def check_input(self, shape: Tuple[int, ...]) -> None:
        if len(shape) != 5 or shape[-1] != self.in_channels:
            raise ShapeMismatch(f"{self.kind} model expects (T, H, W, D, {self.in_channels}) input, got {shape}")
        for n in shape[1:4]:
            if n % self.divisor:
                raise IndivisibleDims(f"spatial dims {shape[1:4]} must be divisible by {self.divisor}")

    def forward(self, batch: Batch, tape: Optional[Tape] = None) -> ForwardResult:
        x = batch if isinstance(batch, Tensor) else Tensor(np.asarray(batch, dtype=self.dtype))
        self.check_input(x.shape)
        bound = self.params.bind(tape) if tape is not None else self.params.constants()
        logits = self.logits(x, bound)
        return ForwardResult(self.squash(logits), logits)

    def predict(self, batch: np.ndarray) -> Prediction:
        result = self.forward(batch)
        return Prediction(result.probs.data, result.logits.data)

    def __call__(self, batch: np.ndarray) -> Prediction:
        return self.predict(batch)


def declare_conv(params: ParamSet, name: str, k: int, cin: int, cout: int, rng: np.random.Generator, dtype):
    params.add(f"{name}.w", he_uniform(rng, (k, k, k, cin, cout), dtype))
    params.add(f"{name}.b", np.zeros(cout, dtype=dtype))


def apply_conv(x: Tensor, p: Dict[str, Tensor], name: str, stride: int = 1) -> Tensor:
    return conv3d(x, p[f"{name}.w"], stride=stride) + p[f"{name}.b"]
