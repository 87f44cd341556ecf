import math

import numpy as np
import pytest

from inls_lab import Field, ValidationError, laplacian, make_params, rescale
from inls_lab.core import (
    grid_for, helmholtz_solve, line_grid, radial_grid, sample_scaled,
)
from inls_lab.functionals import energy, mass


def test_line_grid_cell_centered_avoids_origin():
    g = line_grid(10.0, 256, 0.5)
    assert np.min(np.abs(g.nodes)) == pytest.approx(g.spacing / 2)
    assert np.all(g.weights > 0)
    assert g.weights.sum() == pytest.approx(20.0)


def test_radial_grid_ball_volume():
    for dim in (2, 3):
        g = radial_grid(dim, 8.0, 4096)
        omega = math.pi ** (dim / 2) / math.gamma(dim / 2 + 1)
        for R in (1.0, 3.0, 8.0):
            inside = g.nodes <= R
            vol = g.weights[inside].sum()
            assert vol == pytest.approx(omega * R ** dim, rel=1e-3)
        assert np.min(g.nodes) == pytest.approx(g.spacing / 2)


def test_radial_grid_total_volume_exact():
    g = radial_grid(3, 5.0, 64)
    omega = math.pi ** 1.5 / math.gamma(2.5)
    assert g.weights.sum() == pytest.approx(omega * 5.0 ** 3, rel=1e-14)


def test_grid_validation():
    with pytest.raises(ValidationError):
        line_grid(10.0, 256, 1.2)        # not integrable on the line
    with pytest.raises(ValidationError):
        radial_grid(1, 10.0, 256)        # dim 1 is line geometry
    with pytest.raises(ValidationError):
        radial_grid(2, -1.0, 256)


def test_spectral_laplacian_annihilates_constants():
    params = make_params(1, 2.0, 0.0)
    g = line_grid(10.0, 512)
    u = Field(np.ones(512, dtype=complex), g, params)
    assert np.max(np.abs(laplacian(u).values)) < 1e-12


def test_spectral_laplacian_fourier_mode():
    params = make_params(1, 2.0, 0.0)
    g = line_grid(10.0, 512)
    k = 2 * np.pi * 3 / 20.0                       # an exact grid mode
    u = Field(np.sin(k * g.nodes).astype(complex), g, params)
    expected = -k ** 2 * np.sin(k * g.nodes)
    assert np.max(np.abs(laplacian(u).values.real - expected)) < 1e-10


def test_radial_laplacian_gaussian_and_order():
    params = make_params(3, 1.0, 0.5)
    errs = []
    for n in (512, 1024, 2048):
        g = radial_grid(3, 10.0, n, 0.5)
        u = Field(np.exp(-g.nodes ** 2 / 2), g, params)
        exact = (g.nodes ** 2 - 3) * np.exp(-g.nodes ** 2 / 2)
        errs.append(np.max(np.abs(laplacian(u).values - exact)[g.nodes < 8.0]))
    orders = [np.log2(errs[i] / errs[i + 1]) for i in range(2)]
    assert all(1.8 <= o <= 2.2 for o in orders)


def test_helmholtz_inverts_operator():
    params = make_params(2, 1.0, 0.5)
    g = radial_grid(2, 10.0, 1024, 0.5)
    u = np.exp(-g.nodes ** 2)
    rhs = u - laplacian(Field(u, g, params)).values
    back = helmholtz_solve(g, rhs)
    assert np.max(np.abs(back - u)) < 1e-10


def test_rescale_identity():
    params = make_params(1, 1.5, 0.5)
    g = line_grid(12.0, 1024, 0.5)
    u = Field(np.exp(-g.nodes ** 2 / 2) * np.exp(0.3j * g.nodes), g, params)
    v = rescale(u, 1.0)
    assert np.max(np.abs(v.values - u.values)) < 1e-12


def test_rescale_mass_preservation_mass_critical():
    params = make_params(1, 1.5, 0.5)
    g = line_grid(12.0, 4096, 0.5)
    u = Field(np.exp(-g.nodes ** 2 / 2).astype(complex), g, params)
    for rho in (0.7, 1.3, 2.0):
        v = rescale(u, rho)
        assert mass(v) == pytest.approx(mass(u), rel=1e-6)


def test_rescale_energy_scaling_mass_critical():
    params = make_params(1, 1.5, 0.5)
    g = line_grid(12.0, 8192, 0.5)
    u = Field((np.exp(-g.nodes ** 2 / 2) * np.exp(0.2j * g.nodes)).astype(complex), g, params)
    e0 = energy(u)
    for rho in (0.8, 1.25):
        assert energy(rescale(u, rho)) == pytest.approx(rho ** 2 * e0, rel=1e-5)


def test_rescale_warns_on_mass_escape():
    params = make_params(1, 1.5, 0.5)
    g = line_grid(12.0, 1024, 0.5)
    u = Field(np.exp(-g.nodes ** 2 / 18).astype(complex), g, params)   # wide
    with pytest.warns(RuntimeWarning, match="mass"):
        rescale(u, 0.05)


def test_rescale_rejects_nonpositive_rho():
    params = make_params(1, 1.5, 0.5)
    g = line_grid(12.0, 256, 0.5)
    u = Field(np.exp(-g.nodes ** 2), g, params)
    with pytest.raises(ValidationError):
        rescale(u, -1.0)


def test_sample_scaled_radial_even_extension():
    params = make_params(2, 0.75, 0.5)
    g = radial_grid(2, 10.0, 1024, 0.5)
    u = Field(np.exp(-g.nodes ** 2 / 2), g, params)
    # shrinking by rho < 1 samples near r = 0 where the mirror matters
    vals = sample_scaled(u, 0.05)
    assert np.all(np.isfinite(vals))
    assert vals[0] == pytest.approx(1.0, abs=1e-5)


def test_field_length_mismatch_rejected():
    params = make_params(1, 1.5, 0.5)
    g = line_grid(12.0, 256, 0.5)
    with pytest.raises(ValidationError):
        Field(np.zeros(128), g, params)


def test_grid_for_dispatch():
    p1 = make_params(1, 1.5, 0.5)
    p3 = make_params(3, 1.0, 0.5)
    assert grid_for(p1, 10.0, 64).geometry == "line"
    assert grid_for(p3, 10.0, 64).geometry == "radial"
