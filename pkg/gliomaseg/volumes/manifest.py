"""Dataset manifests and case assembly"""
import json
from pathlib import Path
from typing import Dict, Optional, Union

import numpy as np

from ..constants import BRATS_LABELS, MODALITIES, Modality
from ..errors import IoFailure, MissingModality, SidecarParse, UnknownLabelValue
from ..logging import logger
from .nifti import read_nifti
from .normalize import NormalizeRegion, zscore_normalize
from .raw import read_raw
from .types import DatasetManifest, ManifestEntry, MultiModalCase, SegmentationMask, Volume

PathLike = Union[str, Path]


def read_volume(path: PathLike) -> Volume:
    path = Path(path)
    if path.name.endswith(".nii"):
        return read_nifti(path)
    return read_raw(path)


def remap_labels(data: np.ndarray, encoding: Dict[int, int]) -> np.ndarray:
    """map external label codes onto the internal alphabet"""
    values = np.asarray(data)
    rounded = np.rint(values)
    bad = rounded != values
    if np.any(bad):
        raise UnknownLabelValue(float(values[bad].flat[0]))
    codes = rounded.astype(np.int64)
    out = np.zeros(codes.shape, dtype=np.uint8)
    seen = np.zeros(codes.shape, dtype=bool)
    for external, internal in encoding.items():
        hit = codes == int(external)
        out[hit] = internal
        seen |= hit
    if not np.all(seen):
        raise UnknownLabelValue(int(codes[~seen].flat[0]))
    return out


def _parse_encoding(raw: Optional[dict]) -> Dict[int, int]:
    if raw is None:
        return dict(BRATS_LABELS)
    try:
        return {int(k): int(v) for k, v in raw.items()}
    except (AttributeError, TypeError, ValueError) as err:
        raise SidecarParse(f"bad label_encoding {raw!r}: {err}") from err


def parse_manifest(doc, base_dir: PathLike = ".") -> DatasetManifest:
    """
    Accepts either a plain list of case records or
    {"label_encoding": {"4": 3, ...}, "cases": [...]}.
    """
    encoding = None
    records = doc
    if isinstance(doc, dict):
        encoding = doc.get("label_encoding")
        records = doc.get("cases")
    if not isinstance(records, list):
        raise SidecarParse("manifest must be a list of case records")

    entries = []
    for record in records:
        try:
            entries.append(ManifestEntry(
                case_id=str(record["case_id"]),
                modalities={str(k): str(v) for k, v in record["modalities"].items()},
                label=record.get("label"),
            ))
        except (KeyError, TypeError, AttributeError) as err:
            raise SidecarParse(f"bad case record {record!r}: {err}") from err
    return DatasetManifest(entries, _parse_encoding(encoding), Path(base_dir))


def load_manifest(path: PathLike) -> DatasetManifest:
    path = Path(path)
    logger.info(f"open manifest {path}")
    try:
        text = path.read_text()
    except OSError as err:
        raise IoFailure(f"{path}: {err}") from err
    try:
        doc = json.loads(text)
    except ValueError as err:
        raise SidecarParse(f"{path}: {err}") from err
    return parse_manifest(doc, base_dir=path.parent)


def save_manifest(manifest: DatasetManifest, path: PathLike) -> None:
    doc = {
        "label_encoding": {str(k): v for k, v in sorted(manifest.label_encoding.items())},
        "cases": [x.to_json() for x in manifest.entries],
    }
    try:
        Path(path).write_text(json.dumps(doc, indent=2))
    except OSError as err:
        raise IoFailure(f"{path}: {err}") from err


def load_case(manifest: DatasetManifest, case_id: str,
              region: NormalizeRegion = NormalizeRegion.NonzeroOnly,
              with_label: bool = True) -> MultiModalCase:
    """read, normalize (per modality) and assemble one case"""
    entry = manifest.entry(case_id)
    volumes = {}
    for modality in MODALITIES:
        path = entry.modalities.get(modality.value)
        if not path:
            raise MissingModality(f"case {case_id} has no {modality} path")
        volumes[modality] = zscore_normalize(read_volume(manifest.resolve(path)), region)

    label = None
    if with_label and entry.label:
        raw = read_volume(manifest.resolve(entry.label))
        label = SegmentationMask(remap_labels(raw.data, manifest.label_encoding), raw.spacing, raw.name)
    logger.debug(f"loaded case {case_id} dims {volumes[Modality.T1].dims}")
    return MultiModalCase(case_id, volumes, label)
