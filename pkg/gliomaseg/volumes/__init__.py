from .types import Volume, SegmentationMask, MultiModalCase, DatasetManifest, ManifestEntry
from .nifti import read_nifti, write_nifti
from .raw import read_raw, write_raw, sidecar_path
from .normalize import NormalizeRegion, zscore_normalize, zscore_array
from .manifest import load_case, load_manifest, save_manifest, parse_manifest, read_volume, remap_labels
