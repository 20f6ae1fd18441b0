"""Moving weighted cut-offs, local masses, the Lyapunov functional, and the
localized quadratic form used to budget a multi-soliton perturbation.

The k-th cut-off rides between the (k-1)-th and k-th solitons at the mean
of their target speeds and widens like (b + t)^gamma; the window fields
(differences of consecutive cut-offs) partition unity, so the weighted
local masses telescope and the speed-jump combination
G = E + sum_k d_k I_k is well-defined.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .modulation import ModulationSeries, ModulationState
from .evolution import Trajectory
from .solitons import energy, mass, soliton_profile
from .spectral import Grid, RealField, d_power, inner_product

_PARTITION_TOL = 1e-12


def ramp_profile(y):
    """Smooth monotone ramp: 0 for y <= 0, 1 for y >= 1, and the degree-9
    polynomial 126 y^5 - 420 y^6 + 540 y^7 - 315 y^8 + 70 y^9 between.

    The derivative is 630 y^4 (1-y)^4, so sqrt(ramp') = sqrt(630) y^2 (1-y)^2
    is continuously differentiable with flat endpoints; 630 = 1/B(5,5).
    """
    y = np.asarray(y, dtype=float)
    inside = np.clip(y, 0.0, 1.0)
    p = inside ** 5 * (126.0 + inside * (-420.0 + inside * (540.0 + inside * (-315.0 + inside * 70.0))))
    return p


def ramp_profile_derivative(y):
    y = np.asarray(y, dtype=float)
    out = np.zeros_like(y)
    mask = (y > 0.0) & (y < 1.0)
    out[mask] = 630.0 * y[mask] ** 4 * (1.0 - y[mask]) ** 4
    return out


@dataclass(frozen=True)
class WeightConfig:
    """Geometry of the moving cut-offs.

    gamma in (2/3, 1) sets the widening exponent; separation is the scale L
    whose powers appear in every budget; speeds0 are the K target speeds
    (midspeeds come from consecutive pairs) and centers0 the K fitted
    initial centers (midpoints come from consecutive pairs).
    """

    gamma: float
    separation: float
    speeds0: tuple
    centers0: tuple
    b: float = field(init=False)
    sigmas: tuple = field(init=False)
    midpoints: tuple = field(init=False)

    def __post_init__(self):
        if not (2.0 / 3.0 < self.gamma < 1.0):
            raise ValueError(f"gamma must lie in (2/3, 1), got {self.gamma}")
        if not self.separation > 0:
            raise ValueError("separation scale must be positive")
        speeds = tuple(float(c) for c in self.speeds0)
        centers = tuple(float(x) for x in self.centers0)
        if len(speeds) != len(centers) or not speeds:
            raise ValueError("speeds0 and centers0 must have equal positive length")
        if any(b <= a for a, b in zip(speeds, speeds[1:])) or speeds[0] <= 0:
            raise ValueError("speeds0 must be positive and strictly increasing")
        if any(b <= a for a, b in zip(centers, centers[1:])):
            raise ValueError("centers0 must be strictly increasing")
        object.__setattr__(self, "speeds0", speeds)
        object.__setattr__(self, "centers0", centers)
        object.__setattr__(self, "b", (self.separation / 16.0) ** (1.0 / self.gamma))
        object.__setattr__(self, "sigmas",
                           tuple(0.5 * (speeds[k - 1] + speeds[k]) for k in range(1, len(speeds))))
        object.__setattr__(self, "midpoints",
                           tuple(0.5 * (centers[k - 1] + centers[k]) for k in range(1, len(centers))))

    @property
    def k(self) -> int:
        return len(self.speeds0)

    @property
    def theta0(self) -> float:
        """Decay exponent (1/2)(3/2 - 1/gamma); positive iff gamma > 2/3."""
        return 0.5 * (1.5 - 1.0 / self.gamma)

    def width(self, t: float) -> float:
        """Transition width (b + t)^gamma of every moving cut-off."""
        return (self.b + t) ** self.gamma

    def speed_jumps(self) -> np.ndarray:
        """d_k built from the stored speeds: d_1 = c_1, d_k = c_k - c_{k-1}."""
        return np.diff(np.concatenate(([0.0], np.asarray(self.speeds0))))


def cutoff_weight(k: int, t: float, grid: Grid, cfg: WeightConfig) -> RealField:
    """k-th moving cut-off (1-based): identically 1 for k = 1, else the ramp
    of (x - midpoint_k - midspeed_k * t) / width(t)."""
    if not 1 <= k <= cfg.k:
        raise ValueError(f"weight index k={k} out of range 1..{cfg.k}")
    if t < 0:
        raise ValueError("t must be nonnegative")
    if k == 1:
        return RealField(grid, np.ones(grid.n))
    center = cfg.midpoints[k - 2] + cfg.sigmas[k - 2] * t
    y = (grid.x - center) / cfg.width(t)
    return RealField(grid, ramp_profile(y))


def soliton_window(k: int, t: float, grid: Grid, cfg: WeightConfig) -> RealField:
    """Window localizing the k-th soliton: consecutive cut-off difference,
    with the last window extending to the right edge.  Windows sum to 1."""
    psi = cutoff_weight(k, t, grid, cfg)
    if k == cfg.k:
        return psi
    return psi - cutoff_weight(k + 1, t, grid, cfg)


def local_mass(u: RealField, k: int, t: float, cfg: WeightConfig) -> float:
    """I_k = (1/2) integral of the k-th cut-off times u^2."""
    psi = cutoff_weight(k, t, u.grid, cfg)
    return 0.5 * float(u.grid.spacing * np.dot(psi.values, u.values ** 2))


def lyapunov_functional(u: RealField, t: float, jumps, cfg: WeightConfig) -> float:
    """G = E(u) + sum_k d_k I_k(t) with the supplied speed jumps d."""
    jumps = np.asarray(jumps, dtype=float)
    if jumps.size != cfg.k:
        raise ValueError(f"expected {cfg.k} speed jumps, got {jumps.size}")
    total = energy(u)
    for k in range(1, cfg.k + 1):
        total += jumps[k - 1] * local_mass(u, k, t, cfg)
    return total


def weighted_hessian_form(eps: RealField, fit: ModulationState, t: float,
                          cfg: WeightConfig) -> float:
    """(eps, H eps) for H = D - 2R + sum_k c_k(t) * window_k.

    R is the fitted soliton sum at time t.  The windows are asserted to
    partition unity before use.
    """
    grid = eps.grid
    windows = [soliton_window(k, t, grid, cfg).values for k in range(1, cfg.k + 1)]
    total = np.sum(windows, axis=0)
    if np.max(np.abs(total - 1.0)) > _PARTITION_TOL:
        raise AssertionError("cut-off windows failed to partition unity")
    potential = np.zeros(grid.n)
    for c, w in zip(fit.speeds, windows):
        potential += c * w
    for p in fit.train():
        potential -= 2.0 * soliton_profile(grid, p).values
    quad = inner_product(eps, d_power(eps, 1.0))
    quad += float(grid.spacing * np.dot(potential, eps.values ** 2))
    return quad


class MonotonicityReport:
    """Local-mass increase diagnostics along a tracked run."""

    def __init__(self, times, local_masses, max_increase, bound_scale,
                 ratios, g_series, jumps, theta0):
        self.times = np.asarray(times, dtype=float)
        self.local_masses = np.asarray(local_masses, dtype=float)   # (T, K)
        self.max_increase = np.asarray(max_increase, dtype=float)   # (K,)
        self.bound_scale = float(bound_scale)
        self.ratios = np.asarray(ratios, dtype=float)               # (K,)
        self.g_series = np.asarray(g_series, dtype=float)
        self.jumps = np.asarray(jumps, dtype=float)
        self.theta0 = float(theta0)

    @property
    def g_drift(self) -> float:
        return float(np.max(self.g_series - self.g_series[0]))


def monotonicity_report(traj: Trajectory, series: ModulationSeries,
                        cfg: WeightConfig) -> MonotonicityReport:
    """Evaluate I_k(t), their max increases against the budget scale
    L^{1/gamma - 3/2} + L^{1 - 1/gamma} * sup_t ||eps||_{L^2}^2, and the
    G(t) series with speed jumps taken from the t = 0 fit."""
    n_times = series.times.size
    k_count = cfg.k
    if series.k != k_count:
        raise ValueError("series and weight config disagree on K")

    speeds0 = series.speeds[0]
    jumps = np.diff(np.concatenate(([0.0], speeds0)))

    masses = np.empty((n_times, k_count))
    g_series = np.empty(n_times)
    for i in range(n_times):
        t = series.times[i]
        u = traj.snapshots[i]
        for k in range(1, k_count + 1):
            masses[i, k - 1] = local_mass(u, k, t, cfg)
        g_series[i] = energy(u) + float(np.dot(jumps, masses[i]))

    increase = masses - masses[0]
    max_increase = np.max(increase, axis=0)
    length = cfg.separation
    sup_eps2 = float(np.max(series.eps_l2) ** 2)
    bound_scale = length ** (1.0 / cfg.gamma - 1.5) + length ** (1.0 - 1.0 / cfg.gamma) * sup_eps2
    ratios = max_increase / bound_scale
    return MonotonicityReport(series.times, masses, max_increase, bound_scale,
                              ratios, g_series, jumps, cfg.theta0)


def energy_decomposition_residual(u: RealField, fit: ModulationState, t: float,
                                  cfg: WeightConfig, c0) -> float:
    """|G(t) - sum_k [E(R_k) + c_k(0) N(R_k)] - (1/2)(eps, H eps)|.

    c0 are the K initial fitted speeds; the jumps entering G come from them.
    The remainder is controlled by L^-2 plus epsilon terms, which the
    harness compares against.
    """
    c0 = np.asarray(c0, dtype=float)
    if c0.size != cfg.k:
        raise ValueError(f"expected {cfg.k} initial speeds, got {c0.size}")
    jumps = np.diff(np.concatenate(([0.0], c0)))
    g_val = lyapunov_functional(u, t, jumps, cfg)
    main = 0.0
    for ck0, p in zip(c0, fit.train()):
        r = soliton_profile(u.grid, p)
        main += energy(r) + ck0 * mass(r)
    quad = 0.5 * weighted_hessian_form(fit.residual, fit, t, cfg)
    return abs(g_val - main - quad)
