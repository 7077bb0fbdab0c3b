import numpy as np
import pytest
from hypothesis import given, strategies as st
from hypothesis.extra.numpy import arrays

from mmllab.lattice import (Field, GridSpec, Spectrum, forward, from_csv, inverse, load_field,
                            lp_norm, sample, save_field, spectral_l2_norm, to_csv)

GRID = GridSpec(1, 64, 16.0)
finite = st.floats(-1e3, 1e3, allow_nan=False)


def test_grid_validation():
    with pytest.raises(ValueError):
        GridSpec(1, 48, 1.0)
    with pytest.raises(ValueError):
        GridSpec(1, 4, 1.0)
    with pytest.raises(ValueError):
        GridSpec(0, 8, 1.0)
    with pytest.raises(ValueError):
        GridSpec(1, 8, -1.0)


def test_axes_and_frequencies():
    g = GridSpec(1, 8, 4.0)
    assert g.spacing == 0.5
    np.testing.assert_array_equal(g.axis(), [-2, -1.5, -1, -0.5, 0, 0.5, 1, 1.5])
    np.testing.assert_array_equal(g.frequency_indices(), np.arange(-4, 4))
    assert g.nyquist == 1.0
    assert g.points().shape == (8, 1)
    assert GridSpec(2, 8, 4.0).points().shape == (8, 8, 2)


def test_pure_exponential_has_one_coefficient():
    k = 5
    f = sample(lambda x: np.exp(2j * np.pi * k * x[..., 0] / GRID.extent), GRID)
    c = forward(f)
    assert abs(c.at(k) - 1) < 1e-13
    c2 = c.coeffs.copy()
    c2[k + 32] = 0
    assert np.abs(c2).max() < 1e-13


def test_gaussian_transform_matches_continuum():
    g = GridSpec(1, 128, 16.0)
    f = sample(lambda x: np.exp(-np.pi * x[..., 0] ** 2), g)
    c = forward(f).coeffs * g.extent
    xi = g.frequency_axis()
    np.testing.assert_allclose(c, np.exp(-np.pi * xi**2), atol=1e-13)


@given(arrays(complex, 64, elements=st.complex_numbers(max_magnitude=1e3, allow_nan=False, allow_infinity=False)))
def test_round_trip(a):
    f = Field(GRID, a)
    back = inverse(forward(f)).samples
    assert np.abs(back - a).max() <= 1e-12 * max(1.0, np.abs(a).max())


@given(arrays(float, (16, 16), elements=finite))
def test_plancherel_2d(a):
    g = GridSpec(2, 16, 3.0)
    f = Field(g, a)
    lhs = lp_norm(f, 2)
    rhs = spectral_l2_norm(forward(f))
    assert abs(lhs - rhs) <= 1e-12 * max(1.0, lhs)


@given(arrays(float, 64, elements=finite), st.floats(-5, 5))
def test_linearity(a, lam):
    f = Field(GRID, a)
    g = Field(GRID, np.roll(a, 3))
    lhs = forward(f + lam * g).coeffs
    rhs = forward(f).coeffs + lam * forward(g).coeffs
    assert np.abs(lhs - rhs).max() <= 1e-12 * max(1.0, np.abs(a).max() * (1 + abs(lam)))


def test_lp_norms_of_indicator():
    f = sample(lambda x: ((x[..., 0] >= -2) & (x[..., 0] < 2)).astype(float), GRID)
    assert lp_norm(f, 1) == pytest.approx(4.0)
    assert lp_norm(f, 2) == pytest.approx(2.0)
    assert lp_norm(f, 0.5) == pytest.approx(16.0)
    assert lp_norm(f, np.inf) == 1.0
    with pytest.raises(ValueError):
        lp_norm(f, 0)


def test_field_arithmetic_and_grid_mismatch():
    f = sample(lambda x: x[..., 0], GRID)
    assert np.allclose((f + 1).samples, f.samples + 1)
    assert np.allclose((2 * f - f).samples, f.samples)
    with pytest.raises(ValueError):
        f + sample(lambda x: x[..., 0], GridSpec(1, 64, 8.0))
    with pytest.raises(ValueError):
        Field(GRID, np.zeros(10))


def test_csv_round_trip_is_bit_exact(tmp_path):
    rng = np.random.default_rng(3)
    f = Field(GRID, rng.normal(size=64) + 1j * rng.normal(size=64))
    text = to_csv(f.samples)
    assert text.splitlines()[0] == "index,re,im"
    np.testing.assert_array_equal(from_csv(text, GRID), f.samples)
    save_field(f, tmp_path / "f.csv")
    np.testing.assert_array_equal(load_field(tmp_path / "f.csv", GRID).samples, f.samples)
    with pytest.raises(ValueError):
        from_csv("a,b\n", GRID)
    with pytest.raises(ValueError):
        from_csv(text, GridSpec(1, 32, 1.0))
