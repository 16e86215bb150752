import warnings

import numpy as np

from ..constants import XEnum
from ..errors import ConstantRegion
from .types import Volume

MIN_SIGMA = 1e-8


class NormalizeRegion(XEnum):
    All = "all"
    NonzeroOnly = "nonzero"


def zscore_array(data: np.ndarray, region: NormalizeRegion = NormalizeRegion.NonzeroOnly,
                 name: str = "") -> np.ndarray:
    values = np.asarray(data, dtype=np.float64)
    if region == NormalizeRegion.All:
        mask = np.ones(values.shape, dtype=bool)
    else:
        mask = values != 0

    out = np.zeros(values.shape, dtype=np.float64)
    selected = values[mask]
    sigma = float(selected.std()) if selected.size else 0.0
    if sigma < MIN_SIGMA:
        warnings.warn(ConstantRegion(f"{name or 'volume'}: region standard deviation {sigma:g} is degenerate"))
        return out.astype(np.float32)
    out[mask] = (selected - selected.mean()) / sigma
    return out.astype(np.float32)


def zscore_normalize(volume: Volume, region: NormalizeRegion = NormalizeRegion.NonzeroOnly) -> Volume:
    """subtract the region mean and divide by its population standard deviation"""
    return volume.with_data(zscore_array(volume.data, region, volume.name))
