from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Tuple

import numpy as np

from ..constants import BRATS_LABELS, LABEL_ALPHABET, MODALITIES, Modality
from ..errors import DataError, DimsMismatch, MissingModality, UnknownLabelValue

Dims = Tuple[int, int, int]
Spacing = Tuple[float, float, float]


@dataclass(frozen=True)
class Volume:
    """
    One 3D scalar grid, indexed [x, y, z]; serialized x-fastest.
    The array is copied on construction and locked read-only.
    """
    data: np.ndarray
    spacing: Spacing = (1.0, 1.0, 1.0)
    name: str = ""

    def __post_init__(self):
        data = np.array(self.data, copy=True)
        if data.ndim != 3 or min(data.shape) < 1:
            raise DimsMismatch(f"{self.name or 'volume'}: expected a non-empty 3D grid, got shape {data.shape}")
        spacing = tuple(float(x) for x in self.spacing)
        if len(spacing) != 3:
            raise DimsMismatch(f"{self.name or 'volume'}: spacing needs 3 components, got {spacing}")
        data.setflags(write=False)
        object.__setattr__(self, "data", data)
        object.__setattr__(self, "spacing", spacing)

    @property
    def dims(self) -> Dims:
        return tuple(int(x) for x in self.data.shape)

    @property
    def size(self) -> int:
        return int(self.data.size)

    def with_data(self, data: np.ndarray, name: Optional[str] = None) -> "Volume":
        return Volume(data, self.spacing, self.name if name is None else name)


class SegmentationMask(Volume):
    """Integer voxel labels over the internal alphabet {0, 1, 2, 3}"""

    def __post_init__(self):
        super(SegmentationMask, self).__post_init__()
        data = self.data
        if not np.issubdtype(data.dtype, np.integer):
            rounded = np.rint(data)
            if not np.array_equal(rounded, data):
                raise UnknownLabelValue(float(data[rounded != data].flat[0]))
            data = rounded
        for value in np.unique(data):
            if int(value) not in LABEL_ALPHABET:
                raise UnknownLabelValue(int(value))
        data = data.astype(np.uint8)
        data.setflags(write=False)
        object.__setattr__(self, "data", data)

    def with_data(self, data: np.ndarray, name: Optional[str] = None) -> "SegmentationMask":
        return SegmentationMask(data, self.spacing, self.name if name is None else name)


@dataclass(frozen=True)
class MultiModalCase:
    case_id: str
    modalities: Dict[Modality, Volume]
    label: Optional[SegmentationMask] = None

    def __post_init__(self):
        for modality in MODALITIES:
            if modality not in self.modalities:
                raise MissingModality(f"case {self.case_id} has no {modality} volume")
        first = self.modalities[MODALITIES[0]]
        for modality in MODALITIES[1:]:
            other = self.modalities[modality]
            if other.dims != first.dims:
                raise DimsMismatch(f"case {self.case_id}: {modality} dims {other.dims} != T1 dims {first.dims}")
            if not np.allclose(other.spacing, first.spacing):
                raise DimsMismatch(f"case {self.case_id}: {modality} spacing {other.spacing} != {first.spacing}")
        if self.label is not None and self.label.dims != first.dims:
            raise DimsMismatch(f"case {self.case_id}: label dims {self.label.dims} != {first.dims}")

    @property
    def dims(self) -> Dims:
        return self.modalities[MODALITIES[0]].dims

    @property
    def spacing(self) -> Spacing:
        return self.modalities[MODALITIES[0]].spacing

    def volume(self, modality: Modality) -> Volume:
        return self.modalities[modality]

    def stack(self, dtype=np.float32) -> np.ndarray:
        """modalities as one (x, y, z, 4) array in MODALITIES order"""
        return np.stack([self.modalities[m].data for m in MODALITIES], axis=-1).astype(dtype)

    def with_arrays(self, stacked: np.ndarray, label: Optional[np.ndarray] = None,
                    case_id: Optional[str] = None) -> "MultiModalCase":
        """a new case on the same spacing from a stacked (x, y, z, 4) array"""
        spacing = self.spacing
        volumes = {
            m: Volume(stacked[..., i], spacing, self.modalities[m].name)
            for i, m in enumerate(MODALITIES)
        }
        mask = None
        if label is not None:
            mask = SegmentationMask(label, spacing, self.label.name if self.label is not None else "label")
        return MultiModalCase(case_id or self.case_id, volumes, mask)

    @classmethod
    def from_arrays(cls, case_id: str, stacked: np.ndarray, label: Optional[np.ndarray] = None,
                    spacing: Spacing = (1.0, 1.0, 1.0)) -> "MultiModalCase":
        volumes = {m: Volume(stacked[..., i], spacing, f"{case_id}/{m}") for i, m in enumerate(MODALITIES)}
        mask = SegmentationMask(label, spacing, f"{case_id}/label") if label is not None else None
        return cls(case_id, volumes, mask)


@dataclass
class ManifestEntry:
    case_id: str
    modalities: Dict[str, str]
    label: Optional[str] = None

    def to_json(self) -> dict:
        out = {"case_id": self.case_id, "modalities": dict(self.modalities)}
        if self.label:
            out["label"] = self.label
        return out


@dataclass
class DatasetManifest:
    entries: List[ManifestEntry]
    label_encoding: Dict[int, int] = field(default_factory=lambda: dict(BRATS_LABELS))
    base_dir: Path = Path(".")

    def __post_init__(self):
        seen = set()
        for entry in self.entries:
            if entry.case_id in seen:
                raise DataError(f"duplicate case id {entry.case_id} in manifest")
            seen.add(entry.case_id)
            for name, path in entry.modalities.items():
                if not path:
                    raise DataError(f"case {entry.case_id}: empty path for {name}")
            if entry.label is not None and not entry.label:
                raise DataError(f"case {entry.case_id}: empty label path")

    @property
    def case_ids(self) -> List[str]:
        return [x.case_id for x in self.entries]

    def entry(self, case_id: str) -> ManifestEntry:
        for item in self.entries:
            if item.case_id == case_id:
                return item
        raise DataError(f"case {case_id} is not in the manifest")

    def resolve(self, path: str) -> Path:
        p = Path(path)
        if p.is_absolute():
            return p
        return Path(self.base_dir) / p
