from typing import Sequence

import numpy as np
from scipy import ndimage

from ..errors import ShapeMismatch

LINEAR = 1
NEAREST = 0


def resize_volume(array: np.ndarray, dims: Sequence[int], order: int = LINEAR) -> np.ndarray:
    """
    Resample the three spatial axes of a (X, Y, Z) or (X, Y, Z, C) array to
    dims. order=1 is trilinear for images, order=0 nearest for labels.
    """
    array = np.asarray(array)
    dims = tuple(int(n) for n in dims)
    if array.ndim not in (3, 4) or len(dims) != 3:
        raise ShapeMismatch(f"cannot resize {array.shape} to {dims}")
    if array.shape[:3] == dims:
        return array.copy()
    factors = [d / n for d, n in zip(dims, array.shape[:3])] + [1.0] * (array.ndim - 3)
    out = ndimage.zoom(array, factors, order=order, mode="nearest", grid_mode=order == NEAREST)
    if out.shape[:3] != dims:
        raise ShapeMismatch(f"zoom produced {out.shape[:3]} instead of {dims}")
    return out.astype(array.dtype, copy=False)
