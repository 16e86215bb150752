"""Whole-volume inference by overlapping patch tiling"""
import itertools
from concurrent.futures import ThreadPoolExecutor
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

from ..errors import PatchLargerThanVolume, ShapeMismatch
from ..logging import logger
from ..volumes import MultiModalCase
from ..workers import thread_count
from .base import Prediction, SegmentationModel
from .config import PatchSpec

Corner = Tuple[int, int, int]


def window_starts(extent: int, patch: int, overlap: int = 0) -> List[int]:
    """patch origins along one axis; the last window is flush with the far edge"""
    if patch > extent:
        raise PatchLargerThanVolume(f"patch extent {patch} exceeds volume extent {extent}")
    starts = list(range(0, extent - patch + 1, patch - overlap))
    if starts[-1] != extent - patch:
        starts.append(extent - patch)
    return starts


def window_corners(dims: Sequence[int], spec: PatchSpec) -> List[Corner]:
    axes = [window_starts(n, p, o) for n, p, o in zip(dims, spec.dims, spec.overlap)]
    return list(itertools.product(*axes))


def coverage_counts(dims: Sequence[int], spec: PatchSpec) -> np.ndarray:
    counts = np.zeros(tuple(dims), dtype=np.int32)
    for corner in window_corners(dims, spec):
        counts[_window(corner, spec)] += 1
    return counts


def _window(corner: Corner, spec: PatchSpec) -> Tuple[slice, slice, slice]:
    return tuple(slice(c, c + p) for c, p in zip(corner, spec.dims))


def sliding_window_predict(model: SegmentationModel, volume: Union[MultiModalCase, np.ndarray],
                           spec: Optional[PatchSpec] = None, threads: Optional[int] = None) -> Prediction:
    """
    Tile the (X, Y, Z, C) volume with patches, run the model on each and
    average overlapping probabilities and logits with uniform weights.
    Groups of spec.batch patches run concurrently on a thread pool.
    """
    spec = spec or PatchSpec()
    data = volume.stack() if isinstance(volume, MultiModalCase) else np.asarray(volume)
    if data.ndim != 4:
        raise ShapeMismatch(f"expected an (X, Y, Z, C) volume, got {data.shape}")
    dims = data.shape[:3]
    corners = window_corners(dims, spec)
    groups = [corners[i:i + spec.batch] for i in range(0, len(corners), spec.batch)]
    logger.debug(f"sliding window: {len(corners)} patches of {spec.dims} over {dims}")

    def run(group: List[Corner]) -> Prediction:
        batch = np.stack([data[_window(c, spec)] for c in group])
        return model.predict(batch)

    workers = min(threads or thread_count(), len(groups))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(run, groups))
    else:
        results = [run(g) for g in groups]

    k = model.num_classes
    probs = np.zeros(dims + (k,), dtype=np.float64)
    logits = np.zeros(dims + (k,), dtype=np.float64)
    counts = np.zeros(dims + (1,), dtype=np.float64)
    # accumulate in corner order so the result does not depend on scheduling
    for group, result in zip(groups, results):
        for i, corner in enumerate(group):
            win = _window(corner, spec)
            probs[win] += result.probs[i]
            logits[win] += result.logits[i]
            counts[win] += 1.0
    return Prediction((probs / counts).astype(np.float32), (logits / counts).astype(np.float32))
