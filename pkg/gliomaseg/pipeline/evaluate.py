"""Score written predictions against manifest labels"""
import json
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

import numpy as np

from ..errors import DataError, GridMismatch, IoFailure, MissingPrediction
from ..logging import logger
from ..scoring import aggregate_reports, case_report
from ..volumes import DatasetManifest, read_raw, read_volume, remap_labels
from ..workers import thread_count
from .predict import MASK_FILE

REPORT_FILE = "report.json"

Report = Dict[str, Any]


def truth_labels(manifest: DatasetManifest, case_id: str) -> np.ndarray:
    entry = manifest.entry(case_id)
    if not entry.label:
        raise DataError(f"case {case_id} has no label to evaluate against")
    raw = read_volume(manifest.resolve(entry.label))
    return remap_labels(raw.data, manifest.label_encoding)


def predicted_labels(predictions_dir: Union[str, Path], case_id: str) -> np.ndarray:
    path = Path(predictions_dir) / case_id / MASK_FILE
    if not path.exists():
        raise MissingPrediction(f"no prediction for case {case_id} at {path}")
    return np.rint(read_raw(path).data).astype(np.uint8)


def score_case(manifest: DatasetManifest, predictions_dir: Union[str, Path], case_id: str) -> Dict[str, float]:
    truth = truth_labels(manifest, case_id)
    pred = predicted_labels(predictions_dir, case_id)
    if pred.shape != truth.shape:
        raise GridMismatch(f"case {case_id}: prediction grid {pred.shape} != truth grid {truth.shape}")
    return case_report(pred, truth)


def evaluate(manifest: DatasetManifest, predictions_dir: Union[str, Path], case_ids: Optional[List[str]] = None,
             threads: Optional[int] = None, write: bool = True) -> Report:
    """
    Per-case whole/core/enhancing/mean dice plus their means across cases.
    Cases are scored in parallel; the report keeps manifest order.
    """
    ids = list(case_ids or manifest.case_ids)
    workers = min(threads or thread_count(), max(len(ids), 1))
    with ThreadPoolExecutor(max_workers=workers) as pool:
        scores = list(pool.map(lambda case_id: score_case(manifest, predictions_dir, case_id), ids))
    cases = dict(zip(ids, scores))
    report = {"cases": cases, "aggregate": aggregate_reports(scores)}
    agg = report["aggregate"]
    logger.info(f"evaluated {agg['count']} cases: whole {agg['whole']:.4f} core {agg['core']:.4f} "
                f"enh {agg['enh']:.4f} mean {agg['mean']:.4f}")
    if write:
        path = Path(predictions_dir) / REPORT_FILE
        try:
            path.write_text(json.dumps(report, indent=2))
        except OSError as err:
            raise IoFailure(f"{path}: {err}")
    return report


def load_report(path: Union[str, Path]) -> Report:
    path = Path(path)
    if path.is_dir():
        path = path / REPORT_FILE
    try:
        report = json.loads(path.read_text())
    except OSError as err:
        raise IoFailure(f"{path}: {err}")
    except ValueError as err:
        raise DataError(f"{path}: {err}")
    if "cases" not in report:
        raise DataError(f"{path}: not an evaluation report")
    return report
