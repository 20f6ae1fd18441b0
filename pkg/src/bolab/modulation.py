"""Decomposition u = sum_j R_j + eps with orthogonality (eps, R_j) =
(eps, (R_j)_x) = 0, fitted by Newton with an exact analytic Jacobian, plus
time tracking of the fitted speeds and centers along a trajectory.

The 2K conditions F(y, c) = ((R_j, u - R), ((R_j)_x, u - R)) vanish at the
fit.  The Jacobian is assembled from closed-form profile derivatives; its
leading block structure for separated trains is pi * [[0, -Id],
[diag(c_j^3), 0]] plus O(separation^-2) couplings, which keeps Newton
well-conditioned in the tracking regime.
"""

from __future__ import annotations

import numpy as np

from .evolution import Trajectory
from .solitons import (SolitonParams, SolitonTrain, soliton_profile,
                       soliton_profile_dc, soliton_profile_dcdx,
                       soliton_profile_dx, soliton_profile_dxx)
from .spectral import Grid, RealField, inner_product, l2_norm, sobolev_norm

DEFAULT_TOL = 1e-10
MAX_ITERATIONS = 50


class TrackingLostError(RuntimeError):
    """Newton left the tracking regime (no convergence, nonpositive speed,
    or collapsed separation)."""

    def __init__(self, message: str, time: float | None = None):
        super().__init__(message)
        self.time = time


class DegenerateConfigurationError(RuntimeError):
    """The modulation Jacobian is numerically singular."""


class ModulationState:
    """One fit: speeds, centers, the orthogonal residual, and the achieved
    orthogonality defect max_j(|(eps, R_j)|, |(eps, (R_j)_x)|)."""

    def __init__(self, speeds, centers, residual: RealField,
                 ortho_defect: float, iterations: int):
        self.speeds = np.asarray(speeds, dtype=float)
        self.centers = np.asarray(centers, dtype=float)
        self.residual = residual
        self.ortho_defect = float(ortho_defect)
        self.iterations = int(iterations)

    @property
    def k(self) -> int:
        return self.speeds.size

    def train(self) -> SolitonTrain:
        return SolitonTrain(SolitonParams(c, x)
                            for c, x in zip(self.speeds, self.centers))

    def __repr__(self):
        return (f"ModulationState(speeds={np.round(self.speeds, 6)}, "
                f"centers={np.round(self.centers, 6)}, "
                f"defect={self.ortho_defect:.2e})")


class ModulationSeries:
    """Fits along a trajectory, truncated at the first invalid fit."""

    def __init__(self, times, speeds, centers, eps_l2, eps_h12,
                 ortho_defects, tracking_ok, tracking_lost: bool,
                 lost_time: float | None = None):
        self.times = np.asarray(times, dtype=float)
        self.speeds = np.asarray(speeds, dtype=float)      # (T, K)
        self.centers = np.asarray(centers, dtype=float)    # (T, K)
        self.eps_l2 = np.asarray(eps_l2, dtype=float)
        self.eps_h12 = np.asarray(eps_h12, dtype=float)
        self.ortho_defects = np.asarray(ortho_defects, dtype=float)
        self.tracking_ok = np.asarray(tracking_ok, dtype=bool)
        self.tracking_lost = bool(tracking_lost)
        self.lost_time = lost_time

    @property
    def k(self) -> int:
        return self.speeds.shape[1]

    def center_rates(self) -> np.ndarray:
        """Finite-difference d x_j / dt over the recorded times."""
        return np.gradient(self.centers, self.times, axis=0)

    def speed_rates(self) -> np.ndarray:
        return np.gradient(self.speeds, self.times, axis=0)


def _profiles(grid: Grid, speeds, centers):
    params = [SolitonParams(c, x) for c, x in zip(speeds, centers)]
    r = [soliton_profile(grid, p).values for p in params]
    rx = [soliton_profile_dx(grid, p).values for p in params]
    return params, r, rx


def _assemble(u: RealField, speeds, centers):
    """Condition vector F and analytic Jacobian at (u, y, c)."""
    grid = u.grid
    dx = grid.spacing
    k = len(speeds)
    params, r, rx = _profiles(grid, speeds, centers)
    rxx = [soliton_profile_dxx(grid, p).values for p in params]
    rc = [soliton_profile_dc(grid, p).values for p in params]
    rcx = [soliton_profile_dcdx(grid, p).values for p in params]
    eps = u.values - np.sum(r, axis=0)

    def ip(a, b):
        return dx * float(np.dot(a, b))

    f = np.empty(2 * k)
    for j in range(k):
        f[j] = ip(r[j], eps)
        f[k + j] = ip(rx[j], eps)

    jac = np.empty((2 * k, 2 * k))
    for j in range(k):
        for l in range(k):
            jac[j, l] = ip(r[j], rx[l])
            jac[j, k + l] = -ip(r[j], rc[l])
            jac[k + j, l] = ip(rx[j], rx[l])
            jac[k + j, k + l] = -ip(rx[j], rc[l])
        jac[j, j] += -ip(rx[j], eps)
        jac[j, k + j] += ip(rc[j], eps)
        jac[k + j, j] += -ip(rxx[j], eps)
        jac[k + j, k + j] += ip(rcx[j], eps)
    return f, jac, eps


def modulation_jacobian(u: RealField, train: SolitonTrain) -> np.ndarray:
    """Exact Jacobian of the orthogonality map at the train's parameters;
    rows are the ((R_j, .), ((R_j)_x, .)) conditions, columns (y, c)."""
    _, jac, _ = _assemble(u, train.speeds, train.centers)
    return jac


def decompose(u: RealField, guess: SolitonTrain,
              tol: float = DEFAULT_TOL) -> ModulationState:
    """Newton-solve the 2K orthogonality conditions starting from ``guess``.

    Raises TrackingLostError when Newton does not reach ``tol`` within the
    iteration budget or a speed leaves (0, inf); raises
    DegenerateConfigurationError on a numerically singular Jacobian.
    """
    if len(guess) == 0:
        raise ValueError("decompose needs at least one soliton in the guess")
    speeds = guess.speeds.copy()
    centers = guess.centers.copy()

    for iteration in range(MAX_ITERATIONS + 1):
        f, jac, eps = _assemble(u, speeds, centers)
        defect = float(np.max(np.abs(f)))
        if defect <= tol:
            residual = RealField(u.grid, eps)
            return ModulationState(speeds, centers, residual, defect, iteration)
        try:
            if np.linalg.cond(jac) > 1e12:
                raise DegenerateConfigurationError(
                    "modulation Jacobian is numerically singular")
            delta = np.linalg.solve(jac, -f)
        except np.linalg.LinAlgError as exc:
            raise DegenerateConfigurationError(
                "modulation Jacobian is numerically singular") from exc
        k = len(speeds)
        # damp steps that would cross c = 0; full steps otherwise
        for _ in range(12):
            if np.all(speeds + delta[k:] > 0):
                break
            delta = 0.5 * delta
        centers = centers + delta[:k]
        speeds = speeds + delta[k:]
        if np.any(speeds <= 0) or not np.all(np.isfinite(speeds)):
            raise TrackingLostError(
                f"fitted speed left (0, inf): {speeds}")
        if not np.all(np.isfinite(centers)):
            raise TrackingLostError("fitted centers diverged")
    raise TrackingLostError(
        f"Newton did not reach tol={tol:g} in {MAX_ITERATIONS} iterations "
        f"(defect {defect:.3e})")


def track(traj: Trajectory, initial_guess: SolitonTrain,
          tol: float = DEFAULT_TOL) -> ModulationSeries:
    """Fit every recorded time, warm-starting each solve from the previous
    fit advanced by the elapsed time at the fitted speeds.

    A fit is flagged invalid (and the series truncated) when Newton fails,
    centers stop increasing, or the minimum neighbor separation falls below
    half its initial value.
    """
    times, speeds, centers = [], [], []
    eps_l2, eps_h12, defects, flags = [], [], [], []
    lost = False
    lost_time = None

    state = None
    min_sep0 = None
    for i, t in enumerate(traj.times):
        u = traj.snapshots[i]
        if state is None:
            guess = initial_guess
        else:
            dt = t - traj.times[i - 1]
            advanced = state.centers + dt * state.speeds
            guess = SolitonTrain(SolitonParams(c, x)
                                 for c, x in zip(state.speeds, advanced))
        try:
            state = decompose(u, guess, tol)
        except (TrackingLostError, DegenerateConfigurationError) as exc:
            lost = True
            lost_time = float(t)
            break

        ok = True
        if state.k > 1:
            seps = np.diff(state.centers)
            if np.any(seps <= 0):
                ok = False
            else:
                if min_sep0 is None:
                    min_sep0 = float(np.min(seps))
                elif np.min(seps) < 0.5 * min_sep0:
                    ok = False
        if not ok:
            lost = True
            lost_time = float(t)
            break

        times.append(float(t))
        speeds.append(state.speeds.copy())
        centers.append(state.centers.copy())
        eps_l2.append(l2_norm(state.residual))
        eps_h12.append(sobolev_norm(state.residual, 0.5))
        defects.append(state.ortho_defect)
        flags.append(True)

    if not times:
        raise TrackingLostError("tracking failed at the initial time",
                                time=lost_time)
    return ModulationSeries(times, speeds, centers, eps_l2, eps_h12,
                            defects, flags, lost, lost_time)
