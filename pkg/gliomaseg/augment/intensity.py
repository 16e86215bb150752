import numpy as np

from ..constants import MODALITIES
from ..volumes import MultiModalCase

DEFAULT_MAX_DELTA = 0.1


def brightness_offsets(max_delta: float, seed) -> np.ndarray:
    """one additive offset per modality, in MODALITIES order"""
    if max_delta <= 0:
        return np.zeros(len(MODALITIES))
    return np.random.default_rng(seed).uniform(-max_delta, max_delta, size=len(MODALITIES))


def shift_brightness(case: MultiModalCase, offsets) -> MultiModalCase:
    offsets = np.asarray(offsets, dtype=np.float64)
    if not np.any(offsets):
        return case
    stacked = case.stack(np.float64) + offsets
    return case.with_arrays(stacked.astype(np.float32), case.label.data if case.label is not None else None)


def random_brightness(case: MultiModalCase, max_delta: float, seed) -> MultiModalCase:
    return shift_brightness(case, brightness_offsets(max_delta, seed))
