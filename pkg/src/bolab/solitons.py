"""Algebraic soliton profiles and the conserved functionals they extremise.

The speed-c profile is 2c/(1 + c^2 (x - x0)^2); it satisfies
D Q = Q^2 - c Q, equivalently hilbert(derivative(Q)) + Q^2 = c Q.
Profiles are sampled from the closed form with the displacement wrapped to
the nearest periodic image, never periodised by image summing; identities
therefore hold up to box-truncation errors that shrink with the domain.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .spectral import Grid, RealField, d_power, derivative, hilbert, inner_product, l2_norm


@dataclass(frozen=True)
class SolitonParams:
    """One soliton: speed > 0 (also its amplitude scale) and center."""

    speed: float
    center: float

    def __post_init__(self):
        if not self.speed > 0:
            raise ValueError(f"soliton speed must be positive, got {self.speed}")


@dataclass(frozen=True)
class SolitonTrain:
    """Ordered soliton family: speeds and centers both strictly increasing.

    The ordering matches the non-colliding regime the diagnostics assume
    (faster solitons start ahead).  An empty train is allowed and sums to
    the zero field.
    """

    solitons: tuple

    def __init__(self, solitons):
        object.__setattr__(self, "solitons", tuple(solitons))
        speeds = [p.speed for p in self.solitons]
        centers = [p.center for p in self.solitons]
        if any(b <= a for a, b in zip(speeds, speeds[1:])):
            raise ValueError(f"train speeds must be strictly increasing, got {speeds}")
        if any(b <= a for a, b in zip(centers, centers[1:])):
            raise ValueError(f"train centers must be strictly increasing, got {centers}")

    def __len__(self):
        return len(self.solitons)

    def __iter__(self):
        return iter(self.solitons)

    def __getitem__(self, k):
        return self.solitons[k]

    @property
    def speeds(self):
        return np.array([p.speed for p in self.solitons])

    @property
    def centers(self):
        return np.array([p.center for p in self.solitons])


def _wrapped_displacement(grid: Grid, center: float) -> np.ndarray:
    """x - center folded into [-L/2, L/2); keeps profiles single-image."""
    L = grid.length
    return (grid.x - center + 0.5 * L) % L - 0.5 * L


def soliton_profile(grid: Grid, params: SolitonParams) -> RealField:
    """Sample 2c/(1 + c^2 y^2) with y the wrapped displacement."""
    c = params.speed
    y = _wrapped_displacement(grid, params.center)
    return RealField(grid, 2.0 * c / (1.0 + (c * y) ** 2))


def soliton_profile_dx(grid: Grid, params: SolitonParams) -> RealField:
    c = params.speed
    y = _wrapped_displacement(grid, params.center)
    q = 1.0 + (c * y) ** 2
    return RealField(grid, -4.0 * c ** 3 * y / q ** 2)


def soliton_profile_dxx(grid: Grid, params: SolitonParams) -> RealField:
    c = params.speed
    y = _wrapped_displacement(grid, params.center)
    q = 1.0 + (c * y) ** 2
    return RealField(grid, -4.0 * c ** 3 * (1.0 - 3.0 * (c * y) ** 2) / q ** 3)


def soliton_profile_dc(grid: Grid, params: SolitonParams) -> RealField:
    """Speed derivative of the profile at fixed center."""
    c = params.speed
    y = _wrapped_displacement(grid, params.center)
    q = 1.0 + (c * y) ** 2
    return RealField(grid, 2.0 / q - 4.0 * (c * y) ** 2 / q ** 2)


def soliton_profile_dcdx(grid: Grid, params: SolitonParams) -> RealField:
    """Mixed speed/space derivative of the profile."""
    c = params.speed
    y = _wrapped_displacement(grid, params.center)
    q = 1.0 + (c * y) ** 2
    return RealField(grid, -12.0 * c ** 2 * y / q ** 2 + 16.0 * c ** 4 * y ** 3 / q ** 3)


def soliton_sum(grid: Grid, train: SolitonTrain) -> RealField:
    out = np.zeros(grid.n)
    for p in train:
        out += soliton_profile(grid, p).values
    return RealField(grid, out)


def mass(u: RealField) -> float:
    """N(u) = (1/2) integral u^2; equals pi*c for a speed-c profile."""
    return 0.5 * inner_product(u, u)


def energy(u: RealField) -> float:
    """E(u) = (1/2)(u, D u) - (1/3) integral u^3; -pi c^2/2 on a profile."""
    cubic = u.grid.spacing * float(np.sum(u.values ** 3))
    return 0.5 * inner_product(u, d_power(u, 1.0)) - cubic / 3.0


def action_functional(u: RealField, speed: float) -> float:
    """E + speed * N, the traveling-wave action whose critical point is the
    speed-c profile; differences of it control the speed-stability budget."""
    return energy(u) + speed * mass(u)


def soliton_residual(grid: Grid, params: SolitonParams) -> float:
    """L^2 norm of hilbert(d/dx Q) + Q^2 - c Q on the grid.

    Zero in exact arithmetic on the line; on the box, dominated by the
    algebraic tails, so it shrinks as the domain grows.
    """
    q = soliton_profile(grid, params)
    r = hilbert(derivative(q)) + q * q - params.speed * q
    return l2_norm(r)
