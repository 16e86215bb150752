from dataclasses import asdict, dataclass
from typing import Any, Dict, Tuple

from ..constants import BINARY_INPUT_DIMS, NUM_CLASSES, ROI_MIN_DIMS
from ..errors import BadModelConfig, BadPatchSpec
from ..layers import ACTIVATIONS
from ..volumes.types import Dims

STRIDED = "strided"
MAXPOOL = "maxpool"
DOWNSAMPLING = (STRIDED, MAXPOOL)
INSTANCE = "instance"
NO_NORM = "none"
NORMS = (INSTANCE, NO_NORM)


def _triple(value, name: str) -> Tuple[int, int, int]:
    value = tuple(int(v) for v in value)
    if len(value) != 3:
        raise BadModelConfig(f"{name} needs three extents, got {value}")
    return value


@dataclass
class BinaryUNetConfig:
    """Four-level U-Net with ConvBlock1 stages, one sigmoid output channel"""
    in_channels: int = 4
    base_width: int = 40
    multipliers: Tuple[int, ...] = (1, 1, 2, 4)
    bridge_width: int = 200
    activation: str = "elu"
    input_dims: Tuple[int, int, int] = BINARY_INPUT_DIMS
    seed: int = 0

    def __post_init__(self):
        self.multipliers = tuple(int(m) for m in self.multipliers)
        self.input_dims = _triple(self.input_dims, "input_dims")
        if self.base_width < 1 or self.bridge_width < 1 or self.in_channels < 1:
            raise BadModelConfig(f"widths must be positive: base {self.base_width} bridge {self.bridge_width}")
        if not self.multipliers or min(self.multipliers) < 1:
            raise BadModelConfig(f"bad width multipliers {self.multipliers}")
        if self.activation not in ACTIVATIONS:
            raise BadModelConfig(f"unknown activation {self.activation!r}")

    @property
    def depth(self) -> int:
        return len(self.multipliers)

    @property
    def widths(self) -> Tuple[int, ...]:
        return tuple(self.base_width * m for m in self.multipliers)

    @property
    def out_channels(self) -> int:
        return 1

    def to_json(self) -> Dict[str, Any]:
        return asdict(self)


@dataclass
class MulticlassUNetConfig:
    """Three-level attention U-Net with ConvBlock2 stages and a softmax head"""
    in_channels: int = 4
    widths: Tuple[int, ...] = (64, 128, 256)
    bridge_width: int = 320
    activation: str = "relu"
    num_classes: int = NUM_CLASSES
    downsample: str = STRIDED
    norm: str = INSTANCE
    attention: bool = True
    seed: int = 0

    def __post_init__(self):
        self.widths = tuple(int(w) for w in self.widths)
        if not self.widths or min(self.widths) < 1 or self.bridge_width < 1:
            raise BadModelConfig(f"bad widths {self.widths} / bridge {self.bridge_width}")
        if any(b < a for a, b in zip(self.widths, self.widths[1:])):
            raise BadModelConfig(f"widths must ascend, got {self.widths}")
        if self.downsample not in DOWNSAMPLING:
            raise BadModelConfig(f"downsample must be one of {DOWNSAMPLING}, got {self.downsample!r}")
        if self.norm not in NORMS:
            raise BadModelConfig(f"norm must be one of {NORMS}, got {self.norm!r}")
        if self.num_classes < 2:
            raise BadModelConfig(f"softmax head needs at least two classes, got {self.num_classes}")

    @property
    def depth(self) -> int:
        return len(self.widths)

    @property
    def out_channels(self) -> int:
        return self.num_classes

    def to_json(self) -> Dict[str, Any]:
        return asdict(self)


@dataclass
class PatchSpec:
    dims: Dims = ROI_MIN_DIMS
    overlap: Dims = (0, 0, 0)
    batch: int = 1

    def __post_init__(self):
        self.dims = _triple(self.dims, "patch dims")
        self.overlap = _triple(self.overlap, "patch overlap")
        if min(self.dims) < 1 or self.batch < 1:
            raise BadPatchSpec(f"patch dims {self.dims} batch {self.batch}")
        for n, o in zip(self.dims, self.overlap):
            if not 0 <= o < n:
                raise BadPatchSpec(f"overlap {self.overlap} must be below patch dims {self.dims}")

    @classmethod
    def half_overlap(cls, dims: Dims) -> "PatchSpec":
        dims = _triple(dims, "patch dims")
        return cls(dims, tuple(n // 2 for n in dims))

    def to_json(self) -> Dict[str, Any]:
        return asdict(self)
