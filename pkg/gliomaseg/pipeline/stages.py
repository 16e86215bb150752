"""
Per-stage data preparation shared by training and prediction.

Binary stage: crop to the nonzero brain box, resample to the network's
input grid and predict the union of all tumour labels.
Multiclass stage: crop to the (expanded) tumour box padded to the minimum
ROI extents, or the whole volume when the ROI stage is off.
"""
from typing import Optional, Sequence, Tuple

import numpy as np

from ..errors import PatchLargerThanVolume
from ..logging import logger
from ..models import PatchSpec, SegmentationModel, resize_volume
from ..models.resize import LINEAR, NEAREST
from ..roi import BBox3, CropRecord, crop_case, expand_bbox, mask_bbox, nonzero_bbox, plan_crop, roi_bbox
from ..scoring import one_hot
from ..volumes import MultiModalCase


def brain_box(case: MultiModalCase) -> BBox3:
    return nonzero_bbox(case.stack()) or BBox3.full(case.dims)


def binary_example(case: MultiModalCase, dims: Sequence[int]) -> Tuple[np.ndarray, Optional[np.ndarray]]:
    """(X, Y, Z, 4) image and (X, Y, Z, 1) whole-tumour target on the binary input grid"""
    box = brain_box(case)
    image = resize_volume(case.stack()[box.slices], dims, LINEAR)
    target = None
    if case.label is not None:
        whole = (case.label.data[box.slices] > 0).astype(np.uint8)
        target = resize_volume(whole, dims, NEAREST).astype(np.float32)[..., None]
    return image, target


def binary_tumour_mask(model: SegmentationModel, case: MultiModalCase, threshold: float) -> np.ndarray:
    """
    Thresholded binary prediction on the case's own grid. The mask is cut
    on the network grid and resized back nearest-neighbour; zero outside
    the brain box.
    """
    box = brain_box(case)
    image, _ = binary_example(case, model.config.input_dims)
    probs = model.predict(image[None]).probs[0, ..., 0]
    mask = (probs > threshold).astype(np.uint8)
    out = np.zeros(case.dims, dtype=np.uint8)
    out[box.slices] = resize_volume(mask, box.extent, NEAREST)
    return out


def truth_roi(case: MultiModalCase, tolerance: int) -> BBox3:
    """expanded ground-truth whole-tumour box, brain box for a tumour-free case"""
    box = mask_bbox(case.label.data > 0) if case.label is not None else None
    if box is None:
        return brain_box(case)
    return expand_bbox(box, case.dims, tolerance)


def whole_volume_record(case: MultiModalCase, patch: PatchSpec) -> CropRecord:
    """identity crop, padded only where the volume is smaller than a patch"""
    dims = case.dims
    return plan_crop(BBox3.full(dims), dims, tuple(max(n, p) for n, p in zip(dims, patch.dims)))


def multiclass_region(case: MultiModalCase, use_roi: bool, patch: PatchSpec, min_dims: Sequence[int],
                      tolerance: int, threshold: float,
                      binary: Optional[SegmentationModel] = None) -> Tuple[MultiModalCase, CropRecord]:
    """
    The grid the multiclass network sees. With the ROI stage on, the box
    comes from the binary network when one is given, else from the truth.
    """
    if not use_roi:
        record = whole_volume_record(case, patch)
        label = record.apply(case.label.data) if case.label is not None else None
        return case.with_arrays(record.apply(case.stack()), label), record
    min_dims = tuple(max(m, p) for m, p in zip(min_dims, patch.dims))
    if binary is not None:
        mask = binary_tumour_mask(binary, case, threshold)
        box = roi_bbox(mask, case.stack(), threshold, tolerance, case.case_id)
    else:
        box = truth_roi(case, tolerance)
    return crop_case(case, box, min_dims)


def sample_patch(case: MultiModalCase, patch: PatchSpec, rng: np.random.Generator,
                 num_classes: int) -> Tuple[np.ndarray, np.ndarray]:
    """one uniformly placed patch and its one-hot target"""
    dims = case.dims
    for n, p in zip(dims, patch.dims):
        if p > n:
            raise PatchLargerThanVolume(f"patch {patch.dims} does not fit case {case.case_id} of {dims}")
    corner = [int(rng.integers(0, n - p + 1)) for n, p in zip(dims, patch.dims)]
    window = tuple(slice(c, c + p) for c, p in zip(corner, patch.dims))
    image = case.stack()[window]
    labels = case.label.data[window]
    target = one_hot(labels, num_classes)
    logger.debug(f"{case.case_id}: patch at {corner}")
    return image, target
