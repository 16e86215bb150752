"""
Raw volumes: little-endian float32 payload, x-fastest, described by a JSON sidecar
{"dims": [nx, ny, nz], "dtype": "f32", "spacing": [sx, sy, sz]}
"""
import json
from pathlib import Path
from typing import Optional, Tuple, Union

import numpy as np

from ..errors import IoFailure, LengthMismatch, NonFiniteVoxel, SidecarParse
from ..logging import logger
from .types import Volume

RAW_DTYPE = "f32"
PathLike = Union[str, Path]


def sidecar_path(data_path: PathLike) -> Path:
    return Path(data_path).with_suffix(".json")


def parse_sidecar(text: str, name: str = "") -> Tuple[Tuple[int, int, int], Tuple[float, float, float]]:
    try:
        meta = json.loads(text)
    except ValueError as err:
        raise SidecarParse(f"{name}: {err}") from err
    if not isinstance(meta, dict):
        raise SidecarParse(f"{name}: sidecar must be a JSON object")
    for key in ("dims", "dtype", "spacing"):
        if key not in meta:
            raise SidecarParse(f"{name}: missing key {key}")
    if meta["dtype"] != RAW_DTYPE:
        raise SidecarParse(f"{name}: dtype {meta['dtype']!r} is not {RAW_DTYPE!r}")
    try:
        dims = tuple(int(x) for x in meta["dims"])
        spacing = tuple(float(x) for x in meta["spacing"])
    except (TypeError, ValueError) as err:
        raise SidecarParse(f"{name}: {err}") from err
    if len(dims) != 3 or len(spacing) != 3 or min(dims) < 1:
        raise SidecarParse(f"{name}: bad dims {meta['dims']} or spacing {meta['spacing']}")
    return dims, spacing


def read_raw(data_path: PathLike, sidecar: Optional[PathLike] = None) -> Volume:
    data_path = Path(data_path)
    sidecar = Path(sidecar) if sidecar is not None else sidecar_path(data_path)
    logger.debug(f"open {data_path}")
    try:
        text = sidecar.read_text()
        payload = data_path.read_bytes()
    except OSError as err:
        raise IoFailure(f"{data_path}: {err}") from err

    dims, spacing = parse_sidecar(text, name=str(sidecar))
    expected = 4 * dims[0] * dims[1] * dims[2]
    if len(payload) != expected:
        raise LengthMismatch(f"{data_path}: {len(payload)} bytes, dims {list(dims)} need {expected}")
    data = np.frombuffer(payload, dtype="<f4").reshape(dims, order="F")
    if not np.all(np.isfinite(data)):
        raise NonFiniteVoxel(f"{data_path}: non-finite voxels in payload")
    return Volume(data.astype(np.float32), spacing, str(data_path))


def write_raw(volume: Volume, data_path: PathLike, sidecar: Optional[PathLike] = None) -> None:
    data_path = Path(data_path)
    sidecar = Path(sidecar) if sidecar is not None else sidecar_path(data_path)
    meta = {"dims": list(volume.dims), "dtype": RAW_DTYPE, "spacing": list(volume.spacing)}
    logger.debug(f"write {data_path}")
    try:
        data_path.write_bytes(np.asarray(volume.data, dtype="<f4").tobytes(order="F"))
        sidecar.write_text(json.dumps(meta))
    except OSError as err:
        raise IoFailure(f"{data_path}: {err}") from err
