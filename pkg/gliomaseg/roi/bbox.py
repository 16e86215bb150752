from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np

from ..constants import BINARY_THRESHOLD, ROI_TOLERANCE
from ..errors import EmptyBox

Index3 = Tuple[int, int, int]


@dataclass(frozen=True)
class BBox3:
    """Inclusive voxel bounds lo..hi on each axis"""
    lo: Index3
    hi: Index3

    def __post_init__(self):
        lo = tuple(int(v) for v in self.lo)
        hi = tuple(int(v) for v in self.hi)
        if len(lo) != 3 or len(hi) != 3:
            raise EmptyBox(f"bounding box needs three axes, got {lo} / {hi}")
        if any(a > b for a, b in zip(lo, hi)) or min(lo) < 0:
            raise EmptyBox(f"invalid bounding box lo={lo} hi={hi}")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @property
    def extent(self) -> Index3:
        return tuple(b - a + 1 for a, b in zip(self.lo, self.hi))

    @property
    def center(self) -> Tuple[float, float, float]:
        return tuple((a + b) / 2.0 for a, b in zip(self.lo, self.hi))

    @property
    def slices(self) -> Tuple[slice, slice, slice]:
        return tuple(slice(a, b + 1) for a, b in zip(self.lo, self.hi))

    def contains(self, index: Sequence[int]) -> bool:
        return all(a <= i <= b for a, i, b in zip(self.lo, index, self.hi))

    def to_json(self):
        return {"lo": list(self.lo), "hi": list(self.hi)}

    @classmethod
    def from_json(cls, doc) -> "BBox3":
        return cls(tuple(doc["lo"]), tuple(doc["hi"]))

    @classmethod
    def full(cls, dims: Sequence[int]) -> "BBox3":
        return cls((0, 0, 0), tuple(n - 1 for n in dims))


def _bbox_of(selected: np.ndarray) -> Optional[BBox3]:
    if selected.ndim != 3:
        raise EmptyBox(f"bounding boxes need a 3D mask, got {selected.shape}")
    if not selected.any():
        return None
    lo, hi = [], []
    for axis in range(3):
        others = tuple(a for a in range(3) if a != axis)
        hits = np.flatnonzero(selected.any(axis=others))
        lo.append(hits[0])
        hi.append(hits[-1])
    return BBox3(tuple(lo), tuple(hi))


def mask_bbox(binary_probs: np.ndarray, threshold: float = BINARY_THRESHOLD) -> Optional[BBox3]:
    """tightest box around voxels strictly above threshold, None when there are none"""
    probs = np.asarray(getattr(binary_probs, "data", binary_probs))
    if probs.ndim == 4 and probs.shape[-1] == 1:
        probs = probs[..., 0]
    return _bbox_of(probs > threshold)


def nonzero_bbox(array: np.ndarray) -> Optional[BBox3]:
    """brain box: voxels where any channel is nonzero"""
    array = np.asarray(getattr(array, "data", array))
    selected = array != 0
    if selected.ndim == 4:
        selected = selected.any(axis=-1)
    return _bbox_of(selected)


def expand_bbox(bbox: BBox3, bounds: Sequence[int], tolerance: int = ROI_TOLERANCE) -> BBox3:
    """move every face outward by tolerance voxels, then clip to [0, dim - 1]"""
    if not all(h < n for h, n in zip(bbox.hi, bounds)):
        raise EmptyBox(f"box {bbox.to_json()} exceeds volume {tuple(bounds)}")
    lo = tuple(max(0, a - tolerance) for a in bbox.lo)
    hi = tuple(min(n - 1, b + tolerance) for b, n in zip(bbox.hi, bounds))
    return BBox3(lo, hi)
