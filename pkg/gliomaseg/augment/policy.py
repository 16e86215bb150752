from dataclasses import dataclass
from typing import Tuple

import numpy as np

from ..constants import BINARY_ELASTIC_SIGMA, MULTICLASS_ELASTIC_SIGMA_RANGE
from ..logging import logger
from ..volumes import MultiModalCase
from .intensity import DEFAULT_MAX_DELTA, random_brightness
from .spatial import DEFAULT_MAGNITUDE, DEFAULT_MAX_ANGLE, elastic_deform, random_rotation

SEED_LIMIT = 2 ** 31 - 1


@dataclass
class AugmentParams:
    p_elastic: float = 0.5
    sigma_range: Tuple[float, float] = MULTICLASS_ELASTIC_SIGMA_RANGE
    magnitude: float = DEFAULT_MAGNITUDE
    p_rotate: float = 0.5
    max_angle: float = DEFAULT_MAX_ANGLE
    p_brightness: float = 0.5
    max_delta: float = DEFAULT_MAX_DELTA

    @classmethod
    def binary(cls) -> "AugmentParams":
        return cls(sigma_range=(BINARY_ELASTIC_SIGMA, BINARY_ELASTIC_SIGMA))

    @classmethod
    def multiclass(cls) -> "AugmentParams":
        return cls()

    @classmethod
    def disabled(cls) -> "AugmentParams":
        return cls(p_elastic=0.0, p_rotate=0.0, p_brightness=0.0)


def augment_case(case: MultiModalCase, params: AugmentParams, rng: np.random.Generator) -> MultiModalCase:
    """
    Apply elastic deformation, rotation and brightness, each with its own
    probability. Every random draw comes from rng so a seeded generator
    reproduces the same sequence.
    """
    if rng.uniform() < params.p_elastic:
        lo, hi = params.sigma_range
        sigma = float(rng.uniform(lo, hi)) if hi > lo else float(lo)
        seed = int(rng.integers(SEED_LIMIT))
        logger.debug(f"{case.case_id}: elastic sigma={sigma:.2f} magnitude={params.magnitude}")
        case = elastic_deform(case, sigma, params.magnitude, seed)
    if rng.uniform() < params.p_rotate:
        case = random_rotation(case, params.max_angle, int(rng.integers(SEED_LIMIT)))
    if rng.uniform() < params.p_brightness:
        case = random_brightness(case, params.max_delta, int(rng.integers(SEED_LIMIT)))
    return case
