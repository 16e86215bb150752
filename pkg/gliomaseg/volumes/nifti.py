"""Uncompressed single-file NIfTI-1 reader and writer"""
from pathlib import Path
from typing import Union

import nibabel as nib
import numpy as np

from ..errors import BadMagic, IoFailure, NonFiniteVoxel, TruncatedPayload, UnsupportedDatatype
from ..logging import logger
from .types import Volume

HEADER_SIZE = 348
MAGIC = b"n+1\x00"
WRITE_OFFSET = 352

DATATYPES = {
    2: np.uint8,
    4: np.int16,
    16: np.float32,
    64: np.float64,
}


def parse_nifti(raw: bytes, name: str = "") -> Volume:
    if len(raw) < HEADER_SIZE:
        raise BadMagic(f"{name}: {len(raw)} bytes is too short for a NIfTI-1 header")
    magic = bytes(raw[344:348])
    if magic != MAGIC:
        raise BadMagic(f"{name}: magic {magic!r} is not {MAGIC!r}")

    hdr = nib.Nifti1Header(binaryblock=raw[:HEADER_SIZE], check=False)
    code = int(hdr["datatype"])
    if code not in DATATYPES:
        raise UnsupportedDatatype(code)
    dtype = np.dtype(DATATYPES[code]).newbyteorder(hdr.endianness)

    dim = [int(x) for x in hdr["dim"]]
    ndim = max(1, min(dim[0], 7))
    dims = tuple(dim[i] if i <= ndim else 1 for i in (1, 2, 3))
    if min(dims) < 1:
        raise TruncatedPayload(f"{name}: header declares dims {dims}")
    pixdim = [float(x) for x in hdr["pixdim"]]
    spacing = tuple(pixdim[i] if pixdim[i] > 0 else 1.0 for i in (1, 2, 3))

    offset = int(hdr["vox_offset"])
    count = dims[0] * dims[1] * dims[2]
    needed = offset + count * dtype.itemsize
    if len(raw) < needed:
        raise TruncatedPayload(f"{name}: payload has {len(raw) - offset} bytes, dims {dims} need {needed - offset}")

    flat = np.frombuffer(raw, dtype=dtype, count=count, offset=offset)
    data = flat.reshape(dims, order="F").astype(np.float64)

    slope = float(hdr["scl_slope"])
    inter = float(hdr["scl_inter"])
    # nibabel writes NaN slopes for "unscaled"
    if np.isfinite(slope) and slope != 0:
        data = data * slope + (inter if np.isfinite(inter) else 0.0)

    if not np.all(np.isfinite(data)):
        raise NonFiniteVoxel(f"{name}: {int(np.sum(~np.isfinite(data)))} non-finite voxels")
    return Volume(data.astype(np.float32), spacing, name)


def read_nifti(path: Union[str, Path]) -> Volume:
    path = Path(path)
    logger.debug(f"open {path}")
    try:
        raw = path.read_bytes()
    except OSError as err:
        raise IoFailure(f"{path}: {err}") from err
    return parse_nifti(raw, name=str(path))


def nifti_bytes(volume: Volume) -> bytes:
    hdr = nib.Nifti1Header(endianness="<")
    hdr.set_data_shape(volume.dims)
    hdr.set_data_dtype(np.float32)
    hdr.set_zooms(volume.spacing)
    hdr["vox_offset"] = WRITE_OFFSET
    hdr["scl_slope"] = 1.0
    hdr["scl_inter"] = 0.0
    payload = np.asarray(volume.data, dtype="<f4").tobytes(order="F")
    # 4 zero bytes: empty extension block
    return hdr.binaryblock + b"\x00" * (WRITE_OFFSET - HEADER_SIZE) + payload


def write_nifti(volume: Volume, path: Union[str, Path]) -> None:
    path = Path(path)
    logger.debug(f"write {path}")
    try:
        path.write_bytes(nifti_bytes(volume))
    except OSError as err:
        raise IoFailure(f"{path}: {err}") from err
