"""
Percentile report: rank evaluated cases by mean dice and render one row of
axial panels (FLAIR, T1-Gd, prediction, truth, confidence) for each of
the requested percentile cases.
"""
import math
from pathlib import Path
from typing import List, NamedTuple, Sequence, Union

import numpy as np
from PIL import Image

from ..constants import LABEL_COLOURS, PERCENTILES, Modality
from ..errors import DataError, IoFailure
from ..logging import logger
from ..uncertainty import unit_range
from ..volumes import DatasetManifest, NormalizeRegion, load_case
from .evaluate import Report, predicted_labels
from .predict import confidence_volume

SUMMARY_FILE = "percentiles.png"


class PercentileCase(NamedTuple):
    percentile: int
    case_id: str
    score: float


def percentile_index(q: float, n: int) -> int:
    """nearest-rank position of the q-th percentile among n sorted values"""
    if n < 1:
        raise DataError("no cases to rank")
    return min(n - 1, max(0, int(math.ceil(q / 100.0 * n)) - 1))


def percentile_cases(report: Report, percentiles: Sequence[int] = PERCENTILES) -> List[PercentileCase]:
    ranked = sorted(report["cases"].items(), key=lambda item: (item[1]["mean"], item[0]))
    out = []
    for q in percentiles:
        case_id, scores = ranked[percentile_index(q, len(ranked))]
        out.append(PercentileCase(int(q), case_id, float(scores["mean"])))
    return out


def _grey(plane: np.ndarray) -> np.ndarray:
    scaled = np.round(unit_range(plane) * 255).astype(np.uint8)
    return np.repeat(scaled[..., None], 3, axis=-1)


def _colour(labels: np.ndarray) -> np.ndarray:
    out = np.zeros(labels.shape + (3,), dtype=np.uint8)
    for label, rgb in LABEL_COLOURS.items():
        out[labels == label] = rgb
    return out


def case_row(manifest: DatasetManifest, predictions_dir: Union[str, Path], case_id: str,
             region: NormalizeRegion = NormalizeRegion.NonzeroOnly) -> np.ndarray:
    """one RGB strip of panels on the axial mid-slice"""
    case = load_case(manifest, case_id, region)
    truth = case.label.data if case.label is not None else np.zeros(case.dims, np.uint8)
    pred = predicted_labels(predictions_dir, case_id)
    z = case.dims[2] // 2
    confidence = confidence_volume(predictions_dir, case_id)
    conf = confidence.data if confidence is not None else np.zeros(case.dims, np.float32)

    panels = [
        _grey(case.volume(Modality.FLAIR).data[:, :, z]),
        _grey(case.volume(Modality.T1GD).data[:, :, z]),
        _colour(pred[:, :, z]),
        _colour(truth[:, :, z]),
        _grey(conf[:, :, z]),
    ]
    # image rows run along y
    return np.concatenate([p.transpose(1, 0, 2) for p in panels], axis=1)


def _save(pixels: np.ndarray, path: Path) -> Path:
    try:
        Image.fromarray(pixels).save(path)
    except OSError as err:
        raise IoFailure(f"{path}: {err}")
    logger.info(f"wrote {path}")
    return path


def percentile_report(report: Report, manifest: DatasetManifest, predictions_dir: Union[str, Path],
                      out_dir: Union[str, Path], percentiles: Sequence[int] = PERCENTILES,
                      region: NormalizeRegion = NormalizeRegion.NonzeroOnly) -> List[Path]:
    """writes percentiles.png (all rows, lowest percentile first) and one png per percentile case"""
    out_dir = Path(out_dir)
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
    except OSError as err:
        raise IoFailure(f"{out_dir}: {err}")
    picks = percentile_cases(report, percentiles)
    rows, written = [], []
    for pick in picks:
        row = case_row(manifest, predictions_dir, pick.case_id, region)
        logger.info(f"p{pick.percentile}: {pick.case_id} mean dice {pick.score:.4f}")
        written.append(_save(row, out_dir / f"p{pick.percentile:03d}_{pick.case_id}.png"))
        rows.append(row)
    width = max(r.shape[1] for r in rows)
    padded = [np.pad(r, ((0, 0), (0, width - r.shape[1]), (0, 0))) for r in rows]
    written.insert(0, _save(np.concatenate(padded, axis=0), out_dir / SUMMARY_FILE))
    return written
