"""
Tumour-region crop for the multiclass stage and its exact inverse.

x and y follow the (expanded) bounding box. z is a fixed-depth window
centred on the box, clipped to the volume; axes still short of the
minimum extent are zero padded, the odd voxel going to the high side.
"""
import json
import warnings
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence, Tuple, Union

import numpy as np

from ..constants import BINARY_THRESHOLD, ROI_MIN_DIMS, ROI_TOLERANCE
from ..errors import EmptyBox, EmptyMaskFallback, IoFailure, RecordMismatch, SidecarParse
from ..logging import logger
from ..volumes import MultiModalCase
from ..volumes.types import Dims
from .bbox import BBox3, expand_bbox, mask_bbox, nonzero_bbox

Pads = Tuple[Tuple[int, int], Tuple[int, int], Tuple[int, int]]


@dataclass(frozen=True)
class CropRecord:
    original_dims: Dims
    bbox: BBox3
    padding: Pads

    def __post_init__(self):
        if any(h >= n for h, n in zip(self.bbox.hi, self.original_dims)):
            raise RecordMismatch(f"crop box {self.bbox.to_json()} lies outside {self.original_dims}")
        if any(a < 0 or b < 0 for a, b in self.padding):
            raise RecordMismatch(f"negative padding {self.padding}")

    @property
    def cropped_dims(self) -> Dims:
        return tuple(e + a + b for e, (a, b) in zip(self.bbox.extent, self.padding))

    @property
    def interior(self) -> Tuple[slice, slice, slice]:
        """the unpadded region inside the cropped grid"""
        return tuple(slice(a, a + e) for (a, _), e in zip(self.padding, self.bbox.extent))

    def apply(self, array: np.ndarray, fill: float = 0) -> np.ndarray:
        array = np.asarray(array)
        if tuple(array.shape[:3]) != tuple(self.original_dims):
            raise RecordMismatch(f"array grid {array.shape[:3]} is not the recorded {self.original_dims}")
        pads = list(self.padding) + [(0, 0)] * (array.ndim - 3)
        return np.pad(array[self.bbox.slices], pads, mode="constant", constant_values=fill)

    def to_json(self) -> dict:
        return {
            "original_dims": list(self.original_dims),
            "bbox": self.bbox.to_json(),
            "padding": [list(p) for p in self.padding],
        }

    @classmethod
    def from_json(cls, doc) -> "CropRecord":
        try:
            return cls(tuple(int(n) for n in doc["original_dims"]), BBox3.from_json(doc["bbox"]),
                       tuple((int(a), int(b)) for a, b in doc["padding"]))
        except (KeyError, TypeError, ValueError) as err:
            raise SidecarParse(f"bad crop record: {err}")

    def save(self, path: Union[str, Path]) -> None:
        try:
            Path(path).write_text(json.dumps(self.to_json(), indent=2))
        except OSError as err:
            raise IoFailure(f"{path}: {err}")

    @classmethod
    def load(cls, path: Union[str, Path]) -> "CropRecord":
        try:
            return cls.from_json(json.loads(Path(path).read_text()))
        except OSError as err:
            raise IoFailure(f"{path}: {err}")
        except ValueError as err:
            raise SidecarParse(f"{path}: {err}")


def _split(missing: int) -> Tuple[int, int]:
    before = missing // 2
    return before, missing - before


def plan_crop(bbox: BBox3, dims: Sequence[int], min_dims: Sequence[int] = ROI_MIN_DIMS) -> CropRecord:
    dims = tuple(int(n) for n in dims)
    if any(h >= n for h, n in zip(bbox.hi, dims)):
        raise EmptyBox(f"box {bbox.to_json()} exceeds volume {dims}")
    lo, hi = list(bbox.lo), list(bbox.hi)
    depth = int(min_dims[2])
    if dims[2] >= depth:
        start = int(round(bbox.center[2] - (depth - 1) / 2.0))
        start = min(max(start, 0), dims[2] - depth)
        lo[2], hi[2] = start, start + depth - 1
    else:
        lo[2], hi[2] = 0, dims[2] - 1
    window = BBox3(tuple(lo), tuple(hi))
    padding = tuple(_split(max(0, int(m) - e)) for m, e in zip(min_dims, window.extent))
    return CropRecord(dims, window, padding)


def crop_case(case: MultiModalCase, bbox: BBox3,
              min_dims: Sequence[int] = ROI_MIN_DIMS) -> Tuple[MultiModalCase, CropRecord]:
    if bbox is None:
        raise EmptyBox(f"case {case.case_id}: no bounding box to crop")
    record = plan_crop(bbox, case.dims, min_dims)
    label = record.apply(case.label.data) if case.label is not None else None
    cropped = case.with_arrays(record.apply(case.stack()), label)
    logger.debug(f"{case.case_id}: crop {record.bbox.to_json()} pad {record.padding} -> {record.cropped_dims}")
    return cropped, record


def restore_to_original(cropped_pred: np.ndarray, record: CropRecord, fill: Optional[float] = None) -> np.ndarray:
    """
    Put the unpadded interior back at its source indices. Outside the crop
    a (X, Y, Z, K) probability field gets class 0 with probability 1; a
    scalar field gets fill (0 by default).
    """
    pred = np.asarray(cropped_pred)
    if pred.ndim not in (3, 4) or tuple(pred.shape[:3]) != tuple(record.cropped_dims):
        raise RecordMismatch(f"prediction grid {pred.shape[:3]} does not match crop {record.cropped_dims}")
    shape = tuple(record.original_dims) + pred.shape[3:]
    if pred.ndim == 4 and fill is None:
        out = np.zeros(shape, dtype=pred.dtype)
        out[..., 0] = 1
    else:
        out = np.full(shape, 0 if fill is None else fill, dtype=pred.dtype)
    out[record.bbox.slices] = pred[record.interior]
    return out


def roi_bbox(binary_probs: np.ndarray, brain: np.ndarray, threshold: float = BINARY_THRESHOLD,
             tolerance: int = ROI_TOLERANCE, case_id: str = "") -> BBox3:
    """
    Expanded box around the thresholded binary prediction. An empty mask
    falls back to the nonzero-brain box with an EmptyMaskFallback warning.
    """
    dims = np.asarray(brain).shape[:3]
    box = mask_bbox(binary_probs, threshold)
    if box is None:
        warnings.warn(EmptyMaskFallback(f"case {case_id}: binary mask is empty, using the brain box"))
        logger.warning(f"{case_id}: empty binary mask, falling back to the brain bounding box")
        return nonzero_bbox(brain) or BBox3.full(dims)
    return expand_bbox(box, dims, tolerance)
