"""Profile identities, conserved functionals, train validation."""

import math

import numpy as np
import pytest

from bolab.solitons import (
    SolitonParams,
    SolitonTrain,
    action_functional,
    energy,
    mass,
    soliton_profile,
    soliton_profile_dc,
    soliton_profile_dcdx,
    soliton_profile_dx,
    soliton_profile_dxx,
    soliton_residual,
    soliton_sum,
)
from bolab.spectral import Grid, RealField, d_power, derivative, inner_product


def test_params_validation():
    with pytest.raises(ValueError):
        SolitonParams(0.0, 0.0)
    with pytest.raises(ValueError):
        SolitonParams(-1.0, 0.0)


def test_train_validation():
    with pytest.raises(ValueError):
        SolitonTrain([SolitonParams(2.0, -10.0), SolitonParams(1.0, 10.0)])
    with pytest.raises(ValueError):
        SolitonTrain([SolitonParams(1.0, 10.0), SolitonParams(2.0, -10.0)])
    train = SolitonTrain([SolitonParams(1.0, -10.0), SolitonParams(2.0, 10.0)])
    assert len(train) == 2
    assert np.allclose(train.speeds, [1.0, 2.0])
    assert np.allclose(train.centers, [-10.0, 10.0])


def test_empty_train_sums_to_zero(default_grid):
    u = soliton_sum(default_grid, SolitonTrain([]))
    assert np.all(u.values == 0.0)


@pytest.mark.parametrize("c", [0.5, 1.0, 2.0])
def test_profile_functionals(default_grid, c):
    q = soliton_profile(default_grid, SolitonParams(c, 0.0))
    cubic = default_grid.spacing * float(np.sum(q.values ** 3))
    assert mass(q) == pytest.approx(math.pi * c, abs=2e-2)
    assert energy(q) == pytest.approx(-0.5 * math.pi * c ** 2, abs=2e-2 * c)
    assert cubic == pytest.approx(3.0 * math.pi * c ** 2, abs=5e-2 * c)
    assert inner_product(q, d_power(q, 1.0)) == pytest.approx(
        math.pi * c ** 2, abs=2e-2 * c
    )


def test_functional_errors_shrink_with_box(unit_soliton):
    # Box-truncation error dominates; doubling the box must shrink every
    # functional error by at least 2x.
    def errors(grid):
        q = soliton_profile(grid, SolitonParams(1.0, 0.0))
        cubic = grid.spacing * float(np.sum(q.values ** 3))
        return np.array(
            [
                abs(mass(q) - math.pi),
                abs(energy(q) + 0.5 * math.pi),
                abs(cubic - 3.0 * math.pi),
                abs(inner_product(q, d_power(q, 1.0)) - math.pi),
            ]
        )

    e1 = errors(Grid(256.0, 4096))
    e2 = errors(Grid(512.0, 8192))
    assert np.all(e1 < np.array([2e-2, 2e-2, 5e-2, 2e-2]))
    assert np.all(e2 < 0.5 * e1)


def test_residual_small_and_box_limited(default_grid):
    # The traveling-wave equation holds up to the algebraic tails; on the
    # 256 box the residual sits near 2e-3 and halves (better) per doubling.
    r1 = soliton_residual(default_grid, SolitonParams(1.0, 0.0))
    r2 = soliton_residual(Grid(512.0, 8192), SolitonParams(1.0, 0.0))
    assert r1 < 5e-3
    assert r2 < 0.5 * r1


def test_residual_center_invariant(default_grid):
    r0 = soliton_residual(default_grid, SolitonParams(1.5, 0.0))
    r1 = soliton_residual(default_grid, SolitonParams(1.5, 37.25))
    assert r1 == pytest.approx(r0, rel=1e-10)


def test_profile_dx_matches_spectral_derivative(default_grid):
    p = SolitonParams(1.0, 3.0)
    closed = soliton_profile_dx(default_grid, p)
    fft = derivative(soliton_profile(default_grid, p))
    assert np.max(np.abs(closed.values - fft.values)) < 1e-5


def test_profile_dxx_matches_spectral_derivative(default_grid):
    p = SolitonParams(1.0, 3.0)
    closed = soliton_profile_dxx(default_grid, p)
    fft = derivative(derivative(soliton_profile(default_grid, p)))
    assert np.max(np.abs(closed.values - fft.values)) < 1e-4


def test_profile_dc_matches_finite_difference(default_grid):
    p = SolitonParams(1.0, 3.0)
    h = 1e-5
    up = soliton_profile(default_grid, SolitonParams(1.0 + h, 3.0))
    dn = soliton_profile(default_grid, SolitonParams(1.0 - h, 3.0))
    fd = (up.values - dn.values) / (2.0 * h)
    closed = soliton_profile_dc(default_grid, p)
    assert np.max(np.abs(closed.values - fd)) < 1e-8


def test_profile_dcdx_matches_finite_difference(default_grid):
    p = SolitonParams(1.0, 3.0)
    h = 1e-5
    up = soliton_profile_dx(default_grid, SolitonParams(1.0 + h, 3.0))
    dn = soliton_profile_dx(default_grid, SolitonParams(1.0 - h, 3.0))
    fd = (up.values - dn.values) / (2.0 * h)
    closed = soliton_profile_dcdx(default_grid, p)
    assert np.max(np.abs(closed.values - fd)) < 1e-8


@pytest.mark.parametrize("c", [0.8, 0.9, 1.1, 1.2])
def test_action_expansion(default_grid, c):
    # F_1(Q_1) - F_1(Q_c) = (pi/2)(c-1)^2: the action difference at fixed
    # speed 1 is exactly quadratic in the speed offset.
    q1 = soliton_profile(default_grid, SolitonParams(1.0, 0.0))
    qc = soliton_profile(default_grid, SolitonParams(c, 0.0))
    gap = action_functional(q1, 1.0) - action_functional(qc, 1.0)
    assert gap == pytest.approx(0.5 * math.pi * (c - 1.0) ** 2, abs=1e-3)


def test_mass_is_quadratic(default_grid, rng):
    u = RealField(default_grid, rng.standard_normal(default_grid.n))
    assert mass(u) == pytest.approx(0.5 * inner_product(u, u), rel=1e-14)
