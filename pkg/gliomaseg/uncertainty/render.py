import math
from pathlib import Path
from typing import Optional, Union

import numpy as np
from PIL import Image

from ..errors import IoFailure, ShapeMismatch
from ..logging import logger


def unit_range(values: np.ndarray) -> np.ndarray:
    """min/max scale to [0, 1]; a constant field maps to zeros"""
    values = np.asarray(values, dtype=np.float64)
    lo, hi = float(values.min()), float(values.max())
    if hi - lo <= 0.0:
        return np.zeros_like(values)
    return (values - lo) / (hi - lo)


def axial_montage(values: np.ndarray, slices: int = 16, columns: Optional[int] = None) -> np.ndarray:
    """evenly spaced axial (z) slices tiled into one uint8 image"""
    values = np.asarray(values)
    if values.ndim != 3:
        raise ShapeMismatch(f"montage needs a 3D grid, got {values.shape}")
    scaled = unit_range(values)
    nz = values.shape[2]
    picks = np.unique(np.linspace(0, nz - 1, min(slices, nz)).round().astype(int))
    columns = columns or int(math.ceil(math.sqrt(len(picks))))
    rows = int(math.ceil(len(picks) / columns))
    # rows of the image run along y, columns along x
    h, w = values.shape[1], values.shape[0]
    canvas = np.zeros((rows * h, columns * w), dtype=np.uint8)
    for i, z in enumerate(picks):
        r, c = divmod(i, columns)
        canvas[r * h:(r + 1) * h, c * w:(c + 1) * w] = np.round(scaled[:, :, z].T * 255).astype(np.uint8)
    return canvas


def render_axial_montage(values: np.ndarray, path: Union[str, Path], slices: int = 16) -> Path:
    path = Path(path)
    try:
        Image.fromarray(axial_montage(values, slices)).save(path)
    except OSError as err:
        raise IoFailure(f"{path}: {err}")
    logger.info(f"wrote {path}")
    return path
