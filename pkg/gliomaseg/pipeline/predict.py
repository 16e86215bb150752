"""
Full-pipeline inference: binary ROI detection, crop, multiclass sliding
window (optionally under test-time augmentation), then the mask and the
energy confidence map restored onto the original grid.
"""
from dataclasses import dataclass
from pathlib import Path
from typing import List, Optional, Union

import numpy as np

from ..errors import ConfigError, IoFailure
from ..logging import logger
from ..models import SegmentationModel, load_checkpoint, sliding_window_predict
from ..roi import CropRecord, restore_to_original
from ..uncertainty import UncertaintyMap, confidence_map, render_axial_montage, tta_aggregate
from ..volumes import DatasetManifest, MultiModalCase, SegmentationMask, Volume, load_case, read_raw, write_raw
from .config import PipelineConfig
from .stages import multiclass_region

MASK_FILE = "mask.raw"
CONFIDENCE_FILE = "confidence.raw"
CROP_FILE = "crop.json"
CONFIDENCE_PNG = "confidence.png"


@dataclass
class CasePrediction:
    case_id: str
    mask: SegmentationMask
    confidence: UncertaintyMap
    record: CropRecord
    probs: np.ndarray

    def write(self, out_dir: Union[str, Path], png: bool = False) -> Path:
        case_dir = Path(out_dir) / self.case_id
        try:
            case_dir.mkdir(parents=True, exist_ok=True)
        except OSError as err:
            raise IoFailure(f"{case_dir}: {err}")
        write_raw(self.mask, case_dir / MASK_FILE)
        write_raw(self.confidence.to_volume(self.mask.spacing), case_dir / CONFIDENCE_FILE)
        self.record.save(case_dir / CROP_FILE)
        if png:
            render_axial_montage(self.confidence.values, case_dir / CONFIDENCE_PNG)
        return case_dir


def predict_case(case: MultiModalCase, binary: Optional[SegmentationModel], multiclass: SegmentationModel,
                 config: PipelineConfig, tta: Optional[bool] = None,
                 threads: Optional[int] = None) -> CasePrediction:
    settings = config.multiclass
    tta = config.tta if tta is None else tta
    if settings.use_roi and binary is None:
        raise ConfigError("the ROI stage needs a binary checkpoint")
    cropped, record = multiclass_region(case, settings.use_roi, settings.patch, config.roi_min_dims,
                                        config.tolerance, config.threshold, binary)
    if tta:
        pred = tta_aggregate(multiclass, cropped, settings.patch, threads=threads)
    else:
        pred = sliding_window_predict(multiclass, cropped, settings.patch, threads)

    probs = restore_to_original(pred.probs, record)
    labels = np.argmax(probs, axis=-1).astype(np.uint8)
    local = confidence_map(pred.logits)
    # voxels outside the crop take the most confident value
    values = restore_to_original(local.values, record, fill=float(local.values.max()))
    mask = SegmentationMask(labels, case.spacing, f"{case.case_id}/mask")
    logger.info(f"{case.case_id}: predicted {int((labels > 0).sum())} tumour voxels "
                f"in crop {record.bbox.to_json()}{' with tta' if tta else ''}")
    return CasePrediction(case.case_id, mask, UncertaintyMap(values), record, probs)


def load_models(config: PipelineConfig, binary_checkpoint: Optional[Union[str, Path]],
                multiclass_checkpoint: Union[str, Path]):
    binary = None
    if config.multiclass.use_roi:
        if binary_checkpoint is None:
            raise ConfigError("the ROI stage needs --binary")
        binary = load_checkpoint(binary_checkpoint, "binary").model
    multiclass = load_checkpoint(multiclass_checkpoint, "multiclass").model
    return binary, multiclass


def predict(config: PipelineConfig, manifest: DatasetManifest, binary_checkpoint: Optional[Union[str, Path]],
            multiclass_checkpoint: Union[str, Path], out_dir: Union[str, Path], tta: Optional[bool] = None,
            png: bool = False, case_ids: Optional[List[str]] = None,
            threads: Optional[int] = None) -> List[Path]:
    """predict every (or every listed) manifest case and write its outputs under out_dir"""
    binary, multiclass = load_models(config, binary_checkpoint, multiclass_checkpoint)
    written = []
    for case_id in case_ids or manifest.case_ids:
        case = load_case(manifest, case_id, config.region, with_label=False)
        written.append(predict_case(case, binary, multiclass, config, tta, threads).write(out_dir, png))
    logger.info(f"wrote {len(written)} predictions to {out_dir}")
    return written


def confidence_volume(pred_dir: Union[str, Path], case_id: str) -> Optional[Volume]:
    path = Path(pred_dir) / case_id / CONFIDENCE_FILE
    return read_raw(path) if path.exists() else None
