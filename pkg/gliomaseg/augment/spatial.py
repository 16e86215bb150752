"""Elastic deformation and in-plane rotation of whole cases"""
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.ndimage import map_coordinates, rotate

from ..constants import MODALITIES
from ..errors import DimsMismatch, NonPositiveMagnitude, NonPositiveSigma
from ..volumes import MultiModalCase
from .filters import gaussian_filter_3d

DEFAULT_MAGNITUDE = 8.0
DEFAULT_MAX_ANGLE = 15.0


@dataclass(frozen=True)
class DeformationField:
    dx: np.ndarray
    dy: np.ndarray
    dz: np.ndarray
    sigma: float
    magnitude: float

    def __post_init__(self):
        if not (self.dx.shape == self.dy.shape == self.dz.shape):
            raise DimsMismatch(f"displacement grids disagree: {self.dx.shape} {self.dy.shape} {self.dz.shape}")

    @property
    def dims(self):
        return self.dx.shape

    def coordinates(self) -> np.ndarray:
        grid = np.meshgrid(*[np.arange(n, dtype=np.float64) for n in self.dims], indexing="ij")
        return np.stack([grid[0] + self.dx, grid[1] + self.dy, grid[2] + self.dz])


def make_deformation_field(dims, sigma: float, magnitude: float, seed) -> DeformationField:
    if not sigma > 0:
        raise NonPositiveSigma(f"sigma must be > 0, got {sigma}")
    if magnitude < 0:
        raise NonPositiveMagnitude(f"magnitude must be >= 0, got {magnitude}")
    rng = np.random.default_rng(seed)
    parts = [gaussian_filter_3d(rng.uniform(-1.0, 1.0, size=dims) * magnitude, sigma) for _ in range(3)]
    return DeformationField(*parts, sigma=float(sigma), magnitude=float(magnitude))


def warp(data: np.ndarray, field: DeformationField, order: int) -> np.ndarray:
    """sample data at grid + displacement, clamping out-of-range coordinates to the edge"""
    out = map_coordinates(data, field.coordinates(), order=order, mode="nearest")
    return out.astype(data.dtype)


def elastic_deform(case: MultiModalCase, sigma: float, magnitude: float, seed) -> MultiModalCase:
    field = make_deformation_field(case.dims, sigma, magnitude, seed)
    if magnitude == 0:
        return case
    stacked = np.stack([warp(case.modalities[m].data, field, 1) for m in MODALITIES], axis=-1)
    label = None
    if case.label is not None:
        label = warp(case.label.data, field, 0)
    return case.with_arrays(stacked, label)


def rotate_case(case: MultiModalCase, angle_deg: float) -> MultiModalCase:
    """rotate about the z axis by an explicit angle"""
    if angle_deg == 0:
        return case
    channels = [
        rotate(case.modalities[m].data, angle_deg, axes=(0, 1), reshape=False, order=1, mode="nearest")
        for m in MODALITIES
    ]
    label: Optional[np.ndarray] = None
    if case.label is not None:
        label = rotate(case.label.data, angle_deg, axes=(0, 1), reshape=False, order=0, mode="nearest")
    return case.with_arrays(np.stack(channels, axis=-1), label)


def draw_rotation_angle(max_angle_deg: float, seed) -> float:
    if max_angle_deg <= 0:
        return 0.0
    return float(np.random.default_rng(seed).uniform(-max_angle_deg, max_angle_deg))


def random_rotation(case: MultiModalCase, max_angle_deg: float, seed) -> MultiModalCase:
    return rotate_case(case, draw_rotation_angle(max_angle_deg, seed))
