"""Hard-mask dice and BraTS region reports"""
from dataclasses import dataclass
from typing import Dict, FrozenSet, Iterable, List

import numpy as np

from ..constants import Label
from ..errors import GridMismatch

REPORT_KEYS = ("whole", "core", "enh")


@dataclass(frozen=True)
class RegionSpec:
    name: str
    key: str
    labels: FrozenSet[int]

    def __post_init__(self):
        if not self.labels or not self.labels <= {1, 2, 3}:
            raise ValueError(f"region {self.name} has bad label set {sorted(self.labels)}")

    def select(self, mask: np.ndarray) -> np.ndarray:
        return np.isin(mask, list(self.labels))


WHOLE = RegionSpec("Whole", "whole", frozenset({Label.Necrotic.int, Label.Edema.int, Label.Enhancing.int}))
CORE = RegionSpec("Core", "core", frozenset({Label.Necrotic.int, Label.Enhancing.int}))
ENHANCING = RegionSpec("Enhancing", "enh", frozenset({Label.Enhancing.int}))
REGIONS: List[RegionSpec] = [WHOLE, CORE, ENHANCING]


def _array(mask) -> np.ndarray:
    return np.asarray(getattr(mask, "data", mask))


def dice_metric(pred_mask, true_mask) -> float:
    """2|P and T| / (|P| + |T|); two empty masks score 1.0"""
    pred = _array(pred_mask).astype(bool)
    truth = _array(true_mask).astype(bool)
    if pred.shape != truth.shape:
        raise GridMismatch(f"prediction grid {pred.shape} != truth grid {truth.shape}")
    total = int(pred.sum()) + int(truth.sum())
    if total == 0:
        return 1.0
    return 2.0 * int(np.logical_and(pred, truth).sum()) / total


def region_dice(pred_mask, true_mask, region: RegionSpec) -> float:
    pred = _array(pred_mask)
    truth = _array(true_mask)
    if pred.shape != truth.shape:
        raise GridMismatch(f"prediction grid {pred.shape} != truth grid {truth.shape}")
    return dice_metric(region.select(pred), region.select(truth))


def case_report(pred_mask, true_mask) -> Dict[str, float]:
    report = {region.key: region_dice(pred_mask, true_mask, region) for region in REGIONS}
    report["mean"] = float(np.mean([report[k] for k in REPORT_KEYS]))
    return report


def aggregate_reports(reports: Iterable[Dict[str, float]]) -> Dict[str, float]:
    reports = list(reports)
    out = {"count": len(reports)}
    for key in REPORT_KEYS + ("mean",):
        out[key] = float(np.mean([r[key] for r in reports])) if reports else 0.0
    return out
