import json
from pathlib import Path

import nibabel as nib
import numpy as np
import pytest

from ..constants import Modality, MODALITIES
from ..errors import (BadMagic, ConstantRegion, DimsMismatch, LengthMismatch, MissingModality, SidecarParse,
                      TruncatedPayload, UnknownLabelValue, UnsupportedDatatype, NonFiniteVoxel)
from ..volumes import (Volume, MultiModalCase, NormalizeRegion, load_case, load_manifest, read_nifti, read_raw,
                       write_nifti, write_raw, zscore_normalize)

HERE = Path(__file__).parent


def _write_int16_nifti(path: Path, values, dims, slope, inter, magic=b"n+1\x00", datatype=np.int16):
    hdr = nib.Nifti1Header(endianness="<")
    hdr.set_data_shape(dims)
    hdr.set_data_dtype(datatype)
    hdr["vox_offset"] = 352
    hdr["scl_slope"] = slope
    hdr["scl_inter"] = inter
    block = bytearray(hdr.binaryblock)
    block[344:348] = magic
    payload = np.asarray(values, dtype=np.dtype(datatype).newbyteorder("<")).tobytes(order="F")
    path.write_bytes(bytes(block) + b"\x00" * 4 + payload)


def test_nifti_zeros(tmp_path):
    path = tmp_path / "zeros.nii"
    write_nifti(Volume(np.zeros((4, 4, 4), dtype=np.float32)), path)
    vol = read_nifti(path)
    assert vol.dims == (4, 4, 4)
    assert not np.any(vol.data)


def test_nifti_scaling(tmp_path):
    path = tmp_path / "scaled.nii"
    _write_int16_nifti(path, [10, 20], (2, 1, 1), 0.5, 1.0)
    vol = read_nifti(path)
    assert vol.dims == (2, 1, 1)
    assert vol.data[:, 0, 0].tolist() == [6.0, 11.0]


def test_nifti_zero_slope_means_unscaled(tmp_path):
    path = tmp_path / "unscaled.nii"
    _write_int16_nifti(path, [10, 20], (2, 1, 1), 0.0, 5.0)
    assert read_nifti(path).data[:, 0, 0].tolist() == [10.0, 20.0]


def test_nifti_bad_magic(tmp_path):
    path = tmp_path / "bad.nii"
    _write_int16_nifti(path, [1, 2], (2, 1, 1), 1.0, 0.0, magic=b"ni1\x00")
    with pytest.raises(BadMagic):
        read_nifti(path)


def test_nifti_unsupported_and_truncated(tmp_path):
    path = tmp_path / "i32.nii"
    _write_int16_nifti(path, [1, 2], (2, 1, 1), 1.0, 0.0, datatype=np.int32)
    with pytest.raises(UnsupportedDatatype) as err:
        read_nifti(path)
    assert err.value.datatype == 8

    path = tmp_path / "short.nii"
    _write_int16_nifti(path, [1, 2, 3], (2, 2, 2), 1.0, 0.0)
    with pytest.raises(TruncatedPayload):
        read_nifti(path)


def test_nifti_non_finite(tmp_path):
    path = tmp_path / "nan.nii"
    _write_int16_nifti(path, [1.0, np.nan], (2, 1, 1), 1.0, 0.0, datatype=np.float32)
    with pytest.raises(NonFiniteVoxel):
        read_nifti(path)


def test_nifti_ramp_ordering(tmp_path):
    ramp = np.arange(27, dtype=np.float32).reshape((3, 3, 3), order="F")
    path = tmp_path / "ramp.nii"
    write_nifti(Volume(ramp, (1.0, 2.0, 3.0)), path)
    vol = read_nifti(path)
    assert np.array_equal(vol.data, ramp)
    assert vol.data[1, 0, 0] == 1.0
    assert vol.data[0, 1, 0] == 3.0
    assert vol.spacing == (1.0, 2.0, 3.0)


def test_raw_small(tmp_path):
    data = tmp_path / "v.raw"
    data.write_bytes(np.array([1.0, -1.0], dtype="<f4").tobytes())
    (tmp_path / "v.json").write_text(json.dumps({"dims": [2, 1, 1], "dtype": "f32", "spacing": [1, 1, 1]}))
    vol = read_raw(data)
    assert vol.data[:, 0, 0].tolist() == [1.0, -1.0]


def test_raw_length_mismatch(tmp_path):
    data = tmp_path / "v.raw"
    data.write_bytes(np.zeros(7, dtype="<f4").tobytes())
    (tmp_path / "v.json").write_text(json.dumps({"dims": [2, 2, 2], "dtype": "f32", "spacing": [1, 1, 1]}))
    with pytest.raises(LengthMismatch):
        read_raw(data)


def test_raw_sidecar_parse(tmp_path):
    data = tmp_path / "v.raw"
    data.write_bytes(np.zeros(1, dtype="<f4").tobytes())
    (tmp_path / "v.json").write_text("{not json")
    with pytest.raises(SidecarParse):
        read_raw(data)
    (tmp_path / "v.json").write_text(json.dumps({"dims": [1, 1, 1], "dtype": "f64", "spacing": [1, 1, 1]}))
    with pytest.raises(SidecarParse):
        read_raw(data)


def test_raw_round_trip(tmp_path):
    rng = np.random.default_rng(7)
    vol = Volume(rng.normal(size=(8, 8, 8)).astype(np.float32), (1.0, 1.0, 2.5))
    write_raw(vol, tmp_path / "r.raw")
    back = read_raw(tmp_path / "r.raw")
    assert back.data.tobytes() == vol.data.tobytes()
    assert back.spacing == vol.spacing


def test_volume_is_immutable():
    vol = Volume(np.zeros((2, 2, 2)))
    with pytest.raises(ValueError):
        vol.data[0, 0, 0] = 1.0


def test_zscore_hand_values():
    vol = Volume(np.array([2.0, 4.0, 6.0]).reshape((3, 1, 1)))
    out = zscore_normalize(vol, NormalizeRegion.All)
    assert np.allclose(out.data[:, 0, 0], [-1.224745, 0.0, 1.224745], atol=1e-6)


def test_zscore_constant_region():
    vol = Volume(np.zeros((3, 3, 3)))
    with pytest.warns(ConstantRegion):
        out = zscore_normalize(vol)
    assert not np.any(out.data)


@pytest.mark.parametrize("region", [NormalizeRegion.All, NormalizeRegion.NonzeroOnly])
def test_zscore_statistics_and_idempotence(region):
    rng = np.random.default_rng(3)
    data = rng.normal(5.0, 3.0, size=(10, 9, 8))
    data[:3] = 0.0
    once = zscore_normalize(Volume(data), region)
    mask = np.ones(data.shape, bool) if region == NormalizeRegion.All else data != 0
    values = once.data[mask].astype(np.float64)
    assert abs(values.mean()) <= 1e-6
    assert abs(values.var() - 1.0) <= 1e-5
    if region == NormalizeRegion.NonzeroOnly:
        assert not np.any(once.data[~mask])
    twice = zscore_normalize(once, region)
    assert np.max(np.abs(twice.data - once.data)) <= 1e-5


def _write_case(tmp_path: Path, case_id: str, dims=(6, 5, 4), t2_dims=None, label_values=None, skip=None):
    rng = np.random.default_rng(11)
    record = {"case_id": case_id, "modalities": {}}
    for modality in MODALITIES:
        if modality == skip:
            continue
        shape = t2_dims if (modality == Modality.T2 and t2_dims) else dims
        path = tmp_path / f"{case_id}_{modality.value}.raw"
        write_raw(Volume(rng.uniform(1.0, 2.0, size=shape)), path)
        record["modalities"][modality.value] = path.name
    if label_values is not None:
        label = np.zeros(dims)
        label.flat[:len(label_values)] = label_values
        path = tmp_path / f"{case_id}_label.raw"
        write_raw(Volume(label), path)
        record["label"] = path.name
    return record


def _manifest(tmp_path: Path, records):
    path = tmp_path / "manifest.json"
    path.write_text(json.dumps(records))
    return load_manifest(path)


def test_load_case_label_remap(tmp_path):
    manifest = _manifest(tmp_path, [_write_case(tmp_path, "c1", label_values=[0, 1, 2, 4])])
    case = load_case(manifest, "c1")
    assert isinstance(case, MultiModalCase)
    assert case.dims == (6, 5, 4)
    assert case.label.data.flat[3] == 3
    assert case.label.data.flat[0] == 0
    assert set(np.unique(case.label.data)) <= {0, 1, 2, 3}
    stacked = case.stack()
    assert stacked.shape == (6, 5, 4, 4)


def test_load_case_unknown_label(tmp_path):
    manifest = _manifest(tmp_path, [_write_case(tmp_path, "c1", label_values=[3])])
    with pytest.raises(UnknownLabelValue) as err:
        load_case(manifest, "c1")
    assert err.value.value == 3


def test_load_case_dims_mismatch(tmp_path):
    manifest = _manifest(tmp_path, [_write_case(tmp_path, "c1", t2_dims=(6, 5, 3))])
    with pytest.raises(DimsMismatch):
        load_case(manifest, "c1")


def test_load_case_missing_modality(tmp_path):
    manifest = _manifest(tmp_path, [_write_case(tmp_path, "c1", skip=Modality.FLAIR)])
    with pytest.raises(MissingModality):
        load_case(manifest, "c1")


def test_manifest_with_identity_encoding(tmp_path):
    record = _write_case(tmp_path, "c1", label_values=[3])
    path = tmp_path / "manifest.json"
    path.write_text(json.dumps({"label_encoding": {"0": 0, "1": 1, "2": 2, "3": 3}, "cases": [record]}))
    case = load_case(load_manifest(path), "c1")
    assert case.label.data.flat[0] == 3
