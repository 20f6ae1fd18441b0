"""Grid, transform conventions, multipliers, norms."""

import math

import numpy as np
import pytest

from bolab.spectral import (
    Grid,
    RealField,
    apply_multiplier,
    d_power,
    dealias,
    derivative,
    hilbert,
    inner_product,
    inverse_transform,
    l2_norm,
    sobolev_norm,
    transform,
)


def test_grid_validation():
    with pytest.raises(ValueError):
        Grid(-1.0, 64)
    with pytest.raises(ValueError):
        Grid(10.0, 100)  # not a power of two
    with pytest.raises(ValueError):
        Grid(10.0, 1)


def test_grid_layout():
    grid = Grid(32.0, 64)
    assert grid.spacing == 0.5
    assert grid.x[0] == -16.0
    assert grid.x[-1] == pytest.approx(16.0 - 0.5)
    # FFT-order wavenumbers: index 1 is the fundamental, n//2 the Nyquist
    xi0 = 2.0 * math.pi / 32.0
    assert grid.wavenumbers[1] == pytest.approx(xi0)
    assert grid.wavenumbers[-1] == pytest.approx(-xi0)
    assert abs(grid.wavenumbers[32]) == pytest.approx(grid.nyquist)


def test_transform_round_trip(default_grid, rng):
    u = RealField(default_grid, rng.standard_normal(default_grid.n))
    v = inverse_transform(transform(u))
    assert np.max(np.abs(v.values - u.values)) < 1e-12


def test_parseval(default_grid, rng):
    u = RealField(default_grid, rng.standard_normal(default_grid.n))
    uh = transform(u)
    spectral = float(np.sum(np.abs(uh.coefficients) ** 2))
    assert spectral == pytest.approx(inner_product(u, u), rel=1e-12)


def test_hilbert_sign_convention(default_grid):
    # H cos = -sin and H sin = cos fix the transform's sign once and for all
    k = 2.0 * math.pi / default_grid.length * 12
    cos = RealField(default_grid, np.cos(k * default_grid.x))
    sin = RealField(default_grid, np.sin(k * default_grid.x))
    assert np.max(np.abs(hilbert(cos).values + sin.values)) < 1e-12
    assert np.max(np.abs(hilbert(sin).values - cos.values)) < 1e-12


def test_derivative_single_mode(default_grid):
    k = 2.0 * math.pi / default_grid.length * 9
    sin = RealField(default_grid, np.sin(k * default_grid.x))
    cos = RealField(default_grid, np.cos(k * default_grid.x))
    assert np.max(np.abs(derivative(sin).values - k * cos.values)) < 1e-10


def test_d_on_single_mode(default_grid):
    k = 2.0 * math.pi / default_grid.length * 7
    cos = RealField(default_grid, np.cos(k * default_grid.x))
    out = apply_multiplier(cos, np.abs)
    assert np.max(np.abs(out.values - k * cos.values)) < 1e-10


def test_composition_hilbert_derivative(default_grid, rng):
    # H(d/dx u) = -Du; needs a Nyquist-free field since the unpaired mode
    # carries no sign information
    u = inverse_transform(dealias(transform(
        RealField(default_grid, rng.standard_normal(default_grid.n)))))
    lhs = hilbert(derivative(u))
    rhs = apply_multiplier(u, np.abs)
    assert l2_norm(lhs + rhs) / l2_norm(u) < 1e-12


def test_d_power_half_squares_to_d(default_grid, rng):
    u = RealField(default_grid, rng.standard_normal(default_grid.n))
    twice = d_power(d_power(u, 0.5), 0.5)
    once = d_power(u, 1.0)
    assert l2_norm(twice + RealField(default_grid, -once.values)) / l2_norm(once) < 1e-12


def test_sobolev_norm_single_mode(default_grid):
    k = 2.0 * math.pi / default_grid.length * 5
    cos = RealField(default_grid, np.cos(k * default_grid.x))
    expected = math.sqrt((1.0 + k) * default_grid.length / 2.0)
    assert sobolev_norm(cos, 0.5) == pytest.approx(expected, rel=1e-12)
    assert sobolev_norm(cos, 0.0) == pytest.approx(l2_norm(cos), rel=1e-12)


def test_dealias_clears_top_third(default_grid, rng):
    u = RealField(default_grid, rng.standard_normal(default_grid.n))
    uh = dealias(transform(u))
    xi = default_grid.wavenumbers
    high = np.abs(xi) > (2.0 / 3.0) * default_grid.nyquist
    assert np.all(uh.coefficients[high] == 0.0)


def test_soliton_spectral_tail(unit_soliton):
    # continuum amplitudes of the unit profile follow sqrt(2 pi) e^{-|xi|};
    # box truncation keeps the low band within ~1e-2 at L=256
    grid = unit_soliton.grid
    qhat = transform(unit_soliton).continuum_amplitudes()
    xi = grid.wavenumbers
    low = np.abs(xi) <= 4.0
    target = math.sqrt(2.0 * math.pi) * np.exp(-np.abs(xi[low]))
    assert np.max(np.abs(qhat[low] - target)) < 2e-2


def test_field_grid_mismatch_rejected():
    a = Grid(64.0, 256)
    with pytest.raises(ValueError):
        RealField(a, np.zeros(128))
    u = RealField(a, np.zeros(256))
    v = RealField(Grid(64.0, 128), np.zeros(128))
    with pytest.raises(ValueError):
        inner_product(u, v)
