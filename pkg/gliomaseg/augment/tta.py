"""Test-time augmentation: the 8 axis-reflection variants"""
from dataclasses import dataclass
from typing import List, Tuple

import numpy as np

from ..errors import BadVariantId

NUM_VARIANTS = 8


@dataclass(frozen=True)
class TtaVariant:
    id: int

    def __post_init__(self):
        if isinstance(self.id, bool) or not isinstance(self.id, (int, np.integer)) or not 0 <= self.id < NUM_VARIANTS:
            raise BadVariantId(f"variant id {self.id!r} is not in 0..7")

    @property
    def flips(self) -> Tuple[bool, bool, bool]:
        return bool(self.id & 1), bool(self.id & 2), bool(self.id & 4)

    @classmethod
    def all(cls) -> List["TtaVariant"]:
        return [cls(i) for i in range(NUM_VARIANTS)]


def _as_variant(variant) -> TtaVariant:
    if isinstance(variant, TtaVariant):
        return variant
    return TtaVariant(variant)


def _spatial_axes(array: np.ndarray) -> Tuple[int, int, int]:
    # (x, y, z), (x, y, z, C) or (T, x, y, z, C)
    if array.ndim == 5:
        return 1, 2, 3
    return 0, 1, 2


def tta_apply(array: np.ndarray, variant) -> np.ndarray:
    variant = _as_variant(variant)
    axes = tuple(a for a, flip in zip(_spatial_axes(array), variant.flips) if flip)
    if not axes:
        return np.array(array, copy=True)
    return np.ascontiguousarray(np.flip(array, axis=axes))


def tta_invert(prediction: np.ndarray, variant) -> np.ndarray:
    # reflections are involutions
    return tta_apply(prediction, variant)
