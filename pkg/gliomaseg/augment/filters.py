import math

import numpy as np
from scipy.ndimage import correlate1d

from ..errors import NonPositiveSigma


def gaussian_kernel1d(sigma: float) -> np.ndarray:
    """sampled Gaussian truncated at radius ceil(3 sigma), normalized to sum 1"""
    if not sigma > 0:
        raise NonPositiveSigma(f"sigma must be > 0, got {sigma}")
    radius = int(math.ceil(3.0 * sigma))
    offsets = np.arange(-radius, radius + 1, dtype=np.float64)
    kernel = np.exp(-0.5 * (offsets / sigma) ** 2)
    return kernel / kernel.sum()


def gaussian_filter_3d(grid: np.ndarray, sigma: float) -> np.ndarray:
    """separable Gaussian smoothing with replicated edges"""
    kernel = gaussian_kernel1d(sigma)
    out = np.asarray(grid, dtype=np.float64)
    for axis in range(3):
        out = correlate1d(out, kernel, axis=axis, mode="nearest")
    return out
