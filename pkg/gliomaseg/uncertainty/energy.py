"""
Energy scores over per-voxel class logits (last axis).

E(f) = -T log sum_k exp(f_k / T). Its negation is the voxel confidence:
higher means more certain.
"""
from dataclasses import dataclass

import numpy as np
from scipy.special import logsumexp, softmax

from ..errors import NonFiniteVoxel, ShapeMismatch
from ..volumes import Volume
from ..volumes.types import Spacing


def energy(logits: np.ndarray, temperature: float = 1.0) -> np.ndarray:
    logits = np.asarray(logits, dtype=np.float64)
    if logits.ndim < 1 or logits.shape[-1] < 1:
        raise ShapeMismatch(f"energy needs a class axis, got {logits.shape}")
    return -temperature * logsumexp(logits / temperature, axis=-1)


def softmax_energy_identity_check(logits: np.ndarray) -> float:
    """max over voxels of |log max_k softmax(f)_k - (E(f) + max_k f_k)|"""
    logits = np.asarray(logits)
    lhs = np.log(np.max(softmax(logits, axis=-1), axis=-1))
    rhs = energy(logits) + np.max(logits, axis=-1)
    return float(np.max(np.abs(lhs - rhs)))


@dataclass(frozen=True)
class UncertaintyMap:
    values: np.ndarray

    def __post_init__(self):
        values = np.array(self.values, dtype=np.float32)
        if values.ndim != 3:
            raise ShapeMismatch(f"uncertainty map needs a 3D grid, got {values.shape}")
        if not np.all(np.isfinite(values)):
            raise NonFiniteVoxel("uncertainty map has non-finite values")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @property
    def dims(self):
        return self.values.shape

    def to_volume(self, spacing: Spacing = (1.0, 1.0, 1.0), name: str = "confidence") -> Volume:
        return Volume(self.values, spacing, name)


def confidence_map(mean_logits: np.ndarray, temperature: float = 1.0) -> UncertaintyMap:
    """-E over an (X, Y, Z, K) logit field"""
    return UncertaintyMap(-energy(mean_logits, temperature))
