"""
Synthetic multi-modal brain phantoms.

Each case is a brain ellipsoid holding one tumour built from nested
ellipsoids: edema surrounds a core whose outer shell enhances and whose
centre is necrotic. FLAIR and T2 are bright over fluid (edema), T1-Gd is
bright over the enhancing shell. Labels are written with the BraTS codes
{0, 1, 2, 4} so ingestion has to remap them.
"""
from pathlib import Path
from typing import Dict, Tuple, Union

import numpy as np

from ..constants import BRATS_EXTERNAL, BRATS_LABELS, MODALITIES, Label, Modality
from ..errors import IoFailure
from ..logging import logger
from ..volumes import DatasetManifest, ManifestEntry, Volume, save_manifest, write_raw
from .config import PhantomSpec

# mean intensity per tissue, per modality
TISSUE_PROFILE: Dict[Modality, Dict[int, float]] = {
    Modality.T1: {-1: 0.60, Label.Edema.int: 0.45, Label.Enhancing.int: 0.55, Label.Necrotic.int: 0.30},
    Modality.T1GD: {-1: 0.55, Label.Edema.int: 0.50, Label.Enhancing.int: 1.00, Label.Necrotic.int: 0.30},
    Modality.T2: {-1: 0.40, Label.Edema.int: 0.90, Label.Enhancing.int: 0.60, Label.Necrotic.int: 0.85},
    Modality.FLAIR: {-1: 0.45, Label.Edema.int: 0.95, Label.Enhancing.int: 0.70, Label.Necrotic.int: 0.50},
}
HEALTHY = -1


def _radius(grid, center, radii) -> np.ndarray:
    """normalized ellipsoid radius: < 1 inside"""
    return np.sqrt(sum(((g - c) / r) ** 2 for g, c, r in zip(grid, center, radii)))


def phantom_case(spec: PhantomSpec, index: int) -> Tuple[np.ndarray, np.ndarray]:
    """
    One phantom as a stacked (X, Y, Z, 4) float32 array and internal
    labels. Draws come from default_rng([seed, index]) so a case does not
    depend on how many others are generated.
    """
    rng = np.random.default_rng([spec.seed, index])
    dims = np.array(spec.dims, dtype=np.float64)
    grid = np.meshgrid(*[np.arange(n, dtype=np.float64) for n in spec.dims], indexing="ij")

    brain_radii = dims / 2.0 * rng.uniform(*spec.brain_fraction, size=3)
    brain_center = (dims - 1) / 2.0 + rng.uniform(-1.0, 1.0, size=3)
    brain = _radius(grid, brain_center, brain_radii) < 1.0

    edema_radii = rng.uniform(*spec.edema_radius, size=3)
    # keep the whole edema inside the brain
    room = np.maximum(brain_radii - edema_radii - 1.0, 0.0) / np.sqrt(3.0)
    tumour_center = brain_center + rng.uniform(-1.0, 1.0, size=3) * room
    core_radii = edema_radii * rng.uniform(*spec.core_fraction)
    shell = rng.uniform(*spec.shell_fraction)

    edema_r = _radius(grid, tumour_center, edema_radii)
    core_r = _radius(grid, tumour_center, core_radii)
    label = np.zeros(spec.dims, dtype=np.uint8)
    label[(edema_r < 1.0) & brain] = Label.Edema.int
    label[(core_r < 1.0) & brain] = Label.Enhancing.int
    label[(core_r < 1.0 - shell) & brain] = Label.Necrotic.int

    channels = []
    for modality in MODALITIES:
        profile = TISSUE_PROFILE[modality]
        image = np.where(brain, profile[HEALTHY], 0.0)
        for tissue in (Label.Edema.int, Label.Enhancing.int, Label.Necrotic.int):
            image[label == tissue] = profile[tissue]
        image = image + rng.normal(0.0, spec.noise_std, size=spec.dims) * brain
        channels.append(np.where(brain, np.maximum(image, 1e-3), 0.0))
    return np.stack(channels, axis=-1).astype(np.float32), label


def phantom_generate(spec: PhantomSpec, out_dir: Union[str, Path]) -> DatasetManifest:
    """write spec.count phantoms as raw volumes plus manifest.json under out_dir"""
    out_dir = Path(out_dir)
    codes = np.zeros(len(BRATS_EXTERNAL), dtype=np.float32)
    for internal, code in BRATS_EXTERNAL.items():
        codes[internal] = code
    entries = []
    for index in range(spec.count):
        case_id = f"phantom_{index:03d}"
        stacked, label = phantom_case(spec, index)
        case_dir = out_dir / case_id
        try:
            case_dir.mkdir(parents=True, exist_ok=True)
        except OSError as err:
            raise IoFailure(f"{case_dir}: {err}")
        modalities = {}
        for i, modality in enumerate(MODALITIES):
            name = f"{modality.value.lower()}.raw"
            write_raw(Volume(stacked[..., i], spec.spacing, f"{case_id}/{modality}"), case_dir / name)
            modalities[modality.value] = f"{case_id}/{name}"
        write_raw(Volume(codes[label], spec.spacing, f"{case_id}/label"), case_dir / "label.raw")
        entries.append(ManifestEntry(case_id, modalities, f"{case_id}/label.raw"))
        logger.debug(f"{case_id}: tumour voxels {int((label > 0).sum())} of {label.size}")

    manifest = DatasetManifest(entries, dict(BRATS_LABELS), out_dir)
    save_manifest(manifest, out_dir / "manifest.json")
    logger.info(f"wrote {spec.count} phantoms of {spec.dims} to {out_dir}")
    return manifest
