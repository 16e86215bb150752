import numpy as np
import pytest

from ..augment import (AugmentParams, TtaVariant, augment_case, brightness_offsets, draw_rotation_angle,
                       elastic_deform, gaussian_filter_3d, gaussian_kernel1d, random_brightness, random_rotation,
                       rotate_case, tta_apply, tta_invert)
from ..errors import BadVariantId, NonPositiveMagnitude, NonPositiveSigma
from ..volumes import MultiModalCase


def _case(dims=(12, 10, 8), seed=0, with_label=True):
    rng = np.random.default_rng(seed)
    stacked = rng.normal(size=dims + (4,)).astype(np.float32)
    label = None
    if with_label:
        label = np.zeros(dims, dtype=np.uint8)
        label[3:7, 3:7, 2:5] = 2
        label[4:6, 4:6, 3:4] = 3
    return MultiModalCase.from_arrays("c0", stacked, label)


def _blob_case(dims=(32, 32, 8)):
    grid = np.meshgrid(*[np.arange(n, dtype=np.float64) for n in dims], indexing="ij")
    r2 = (grid[0] - 15.5) ** 2 + (grid[1] - 15.5) ** 2
    blob = np.exp(-r2 / (2 * 5.0 ** 2))
    return MultiModalCase.from_arrays("blob", np.stack([blob] * 4, axis=-1).astype(np.float32))


def test_gaussian_constant_preserved():
    grid = np.full((7, 6, 5), 3.5)
    assert np.allclose(gaussian_filter_3d(grid, 1.5), 3.5)


def test_gaussian_impulse_center_weight():
    grid = np.zeros((11, 1, 1))
    grid[5, 0, 0] = 1.0
    out = gaussian_filter_3d(grid, 1.0)
    offsets = np.arange(-3, 4)
    expected = 1.0 / np.exp(-0.5 * offsets ** 2).sum()
    assert out[5, 0, 0] == pytest.approx(expected, rel=1e-9)
    assert len(gaussian_kernel1d(1.0)) == 7
    assert gaussian_kernel1d(1.0).sum() == pytest.approx(1.0)


def test_gaussian_contracts_noise_and_keeps_mean():
    noise = np.random.default_rng(1).normal(size=(16, 16, 16))
    out = gaussian_filter_3d(noise, 2.0)
    assert out.var() < noise.var()
    assert abs(out.mean() - noise.mean()) < 1e-1
    smooth = gaussian_filter_3d(np.random.default_rng(2).uniform(size=(16, 16, 16)) + 5.0, 1.0)
    assert out.shape == noise.shape
    assert abs(smooth.mean() - 5.5) < 0.05


def test_gaussian_rejects_bad_sigma():
    with pytest.raises(NonPositiveSigma):
        gaussian_filter_3d(np.zeros((2, 2, 2)), 0.0)


def test_elastic_identity_and_determinism():
    case = _case()
    same = elastic_deform(case, 2.0, 0.0, seed=5)
    assert np.array_equal(same.stack(), case.stack())
    a = elastic_deform(case, 2.0, 4.0, seed=5)
    b = elastic_deform(case, 2.0, 4.0, seed=5)
    assert np.array_equal(a.stack(), b.stack())
    assert np.array_equal(a.label.data, b.label.data)
    assert a.dims == case.dims
    assert not np.array_equal(a.stack(), case.stack())


def test_elastic_label_alphabet_closed():
    case = _case()
    out = elastic_deform(case, 1.0, 6.0, seed=9)
    assert set(np.unique(out.label.data)) <= set(np.unique(case.label.data))


def test_elastic_parameter_errors():
    case = _case()
    with pytest.raises(NonPositiveSigma):
        elastic_deform(case, -1.0, 2.0, seed=0)
    with pytest.raises(NonPositiveMagnitude):
        elastic_deform(case, 2.0, -1.0, seed=0)


def test_rotation_zero_is_identity():
    case = _case()
    assert np.array_equal(random_rotation(case, 0.0, seed=3).stack(), case.stack())
    assert draw_rotation_angle(0.0, 3) == 0.0


def test_rotation_round_trip_on_smooth_volume():
    case = _blob_case()
    angle = draw_rotation_angle(15.0, seed=4)
    assert -15.0 <= angle <= 15.0
    back = rotate_case(rotate_case(case, angle), -angle)
    rms = np.sqrt(np.mean((back.stack() - case.stack()) ** 2))
    assert rms < 0.05


def test_rotation_keeps_label_alphabet():
    case = _case()
    out = rotate_case(case, 12.0)
    assert set(np.unique(out.label.data)) <= {0, 2, 3}


def test_brightness_shifts_mean_and_keeps_label():
    case = _case()
    offsets = brightness_offsets(0.3, seed=8)
    out = random_brightness(case, 0.3, seed=8)
    for i in range(4):
        shift = out.stack()[..., i].mean(dtype=np.float64) - case.stack()[..., i].mean(dtype=np.float64)
        assert shift == pytest.approx(offsets[i], abs=1e-5)
    assert np.array_equal(out.label.data, case.label.data)
    assert np.array_equal(random_brightness(case, 0.0, seed=8).stack(), case.stack())


@pytest.mark.parametrize("vid", range(8))
def test_tta_involution(vid):
    x = np.random.default_rng(vid).normal(size=(5, 4, 3, 4))
    once = tta_apply(x, vid)
    assert np.array_equal(tta_invert(once, vid), x)
    assert np.array_equal(tta_apply(tta_apply(x, TtaVariant(vid)), TtaVariant(vid)), x)


def test_tta_known_flips():
    x = np.array([1.0, 2.0]).reshape((2, 1, 1))
    assert tta_apply(x, 1)[:, 0, 0].tolist() == [2.0, 1.0]
    assert np.array_equal(tta_apply(x, 0), x)
    assert TtaVariant(7).flips == (True, True, True)
    assert TtaVariant(6).flips == (False, True, True)


def test_tta_channels_untouched_with_batch_axis():
    x = np.arange(2 * 2 * 1 * 1 * 3, dtype=float).reshape((2, 2, 1, 1, 3))
    out = tta_apply(x, 1)
    assert np.array_equal(out[:, 0], x[:, 1])
    assert np.array_equal(out[0, 0, 0, 0], x[0, 1, 0, 0])


@pytest.mark.parametrize("bad", [-1, 8, 2.5])
def test_tta_bad_variant(bad):
    with pytest.raises(BadVariantId):
        TtaVariant(bad)


def test_augment_case_is_seeded():
    case = _case()
    params = AugmentParams(p_elastic=1.0, sigma_range=(1.0, 2.0), magnitude=2.0, p_rotate=1.0, p_brightness=1.0)
    a = augment_case(case, params, np.random.default_rng(12))
    b = augment_case(case, params, np.random.default_rng(12))
    assert np.array_equal(a.stack(), b.stack())
    assert np.array_equal(a.label.data, b.label.data)
    off = augment_case(case, AugmentParams.disabled(), np.random.default_rng(12))
    assert off is case
