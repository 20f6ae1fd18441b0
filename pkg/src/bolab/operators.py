"""Dense operator assembly, eigen-analysis, and inequality measurements.

Two kinds of objects live here.  First, dense real-symmetric realizations
of the linearized operators: the single-soliton action hessian

    H = D + c - 2 Q_c(x - a)

and its weighted multi-soliton counterpart

    H_K = D - 2 R + sum_k c_k phi_k

where D is the nonlocal |xi| multiplier, realized as a circulant matrix so
that eigenpairs come from an ordinary dense symmetric solve.  The spectrum
of H governs orbital stability: two discrete eigenvalues (-1 -+ sqrt(5))/2,
a kernel direction along Q_x, a threshold eigenvalue at the continuum edge,
and essential spectrum [c, oo).  Closed forms for all four eigenfunctions
are provided for overlap diagnostics, and `constrained_gap` measures the
coercivity constants of the quadratic form restricted to the natural
orthogonality constraints.

Second, ratio measurements for the functional inequalities used by the
energy method: a commutator bound for D^{1/2} against a smooth cutoff, a
discrete homogeneous Besov norm over sharp dyadic annuli, the quartic
Gagliardo-Nirenberg quotient, and the Hilbert-transform commutator form
integrated against derivatives.  These return plain numbers; sweeps that
assert boundedness live in the harness.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .lyapunov import WeightConfig, soliton_window
from .modulation import ModulationState
from .solitons import SolitonParams, soliton_profile, soliton_profile_dx, soliton_sum
from .spectral import (
    Grid,
    RealField,
    SpectralField,
    apply_multiplier,
    d_power,
    derivative,
    hilbert,
    inner_product,
    inverse_transform,
    l2_norm,
    transform,
)

__all__ = [
    "GROUND_STATE_EIGENVALUE",
    "EXCITED_STATE_EIGENVALUE",
    "OperatorMatrix",
    "SpectrumReport",
    "dense_symbol_matrix",
    "assemble_h",
    "assemble_hk",
    "closed_form_modes",
    "eigen_spectrum",
    "constrained_gap",
    "projection_kk",
    "commutator_constant",
    "besov_norm",
    "gn_ratio",
    "hilbert_commutator_form",
]

# Discrete eigenvalues of D + 1 - 2Q below the continuum edge.
GROUND_STATE_EIGENVALUE = -(1.0 + math.sqrt(5.0)) / 2.0
EXCITED_STATE_EIGENVALUE = (math.sqrt(5.0) - 1.0) / 2.0

# Grid used when an analysis routine is called without one.  Dense solves
# scale cubically, so this is coarser than the default evolution grid.
ANALYSIS_BOX = 256.0
ANALYSIS_POINTS = 1024

SYMMETRY_TOL = 1e-12


@dataclass(frozen=True)
class OperatorMatrix:
    """Dense symmetric matrix realizing a quadratic form on grid fields.

    ``entries`` acts pointwise: the form value is  spacing * f @ (entries @ g).
    ``speed`` and ``center`` are set for single-soliton action hessians and
    left as None otherwise; they let `eigen_spectrum` attach closed-form
    overlap diagnostics.
    """

    grid: Grid
    entries: np.ndarray
    description: str
    speed: float | None = None
    center: float | None = None

    def __post_init__(self) -> None:
        a = np.asarray(self.entries, dtype=float)
        if a.shape != (self.grid.n, self.grid.n):
            raise ValueError(f"entries must be {self.grid.n}x{self.grid.n}, got {a.shape}")
        scale = np.abs(a).max()
        defect = np.abs(a - a.T).max()
        if defect > SYMMETRY_TOL * max(scale, 1.0):
            raise ValueError(f"matrix is not symmetric: defect {defect:.3e} at scale {scale:.3e}")
        object.__setattr__(self, "entries", a)

    def apply(self, u: RealField) -> RealField:
        if u.grid != self.grid:
            raise ValueError("field grid does not match operator grid")
        return RealField(self.grid, self.entries @ u.values)

    def form(self, f: RealField, g: RealField) -> float:
        return inner_product(f, self.apply(g))


@dataclass(frozen=True)
class SpectrumReport:
    """Low eigenpairs of an operator matrix plus overlap diagnostics.

    Eigenvalues ascend; eigenvector columns have unit L2 norm under the
    quadrature inner product.  For single-soliton hessians the report also
    carries overlaps of the computed eigenvectors with the closed-form
    eigenfunctions, the constrained coercivity gaps in L2 and H^{1/2}
    normalization, and the projection constant (k, k).  The threshold
    eigenfunction decays only algebraically, so its overlap is measured
    against the whole near-edge eigenvalue cluster rather than a single
    vector; ``cluster_halfwidth`` records the window used.
    """

    grid: Grid
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    overlaps: dict[str, float] | None = None
    gap_l2: float | None = None
    gap_h12: float | None = None
    kk: float | None = None
    cluster_halfwidth: float | None = None

    def eigenvector(self, i: int) -> RealField:
        return RealField(self.grid, self.eigenvectors[:, i].copy())


def dense_symbol_matrix(grid: Grid, symbol) -> np.ndarray:
    """Dense realization of a Fourier multiplier as a real circulant matrix.

    ``symbol`` maps an array of wavenumbers to multiplier values.  The same
    conventions as `apply_multiplier` are enforced: paired modes must
    satisfy the Hermitian condition, and a symbol that is imaginary at the
    unpaired Nyquist mode is zeroed there.
    """
    xi = grid.wavenumbers
    values = np.asarray(symbol(xi), dtype=complex)
    if values.shape != xi.shape:
        raise ValueError("symbol must return one value per wavenumber")
    if not np.all(np.isfinite(values)):
        raise ValueError("symbol produced non-finite values")
    conj_vals = values[grid._conj_index]
    pair_defect = np.abs(np.delete(values - np.conj(conj_vals), grid._nyquist_index)).max()
    scale = max(np.abs(values).max(), 1.0)
    if pair_defect > 1e-12 * scale:
        raise ValueError("symbol is not Hermitian; matrix would not be real")
    ny = grid._nyquist_index
    if abs(values[ny].imag) > 0.0:
        values = values.copy()
        values[ny] = 0.0
    # the circulant synthesis below runs in numpy's e^{-ix xi} phase, which
    # sees the module's wavenumbers negated; reindex so odd symbols act with
    # the same sign as apply_multiplier
    column = np.fft.ifft(values[grid._conj_index])
    if np.abs(column.imag).max() > 1e-12 * scale:
        raise ValueError("multiplier does not define a real operator")
    return scipy.linalg.circulant(column.real)


def _symmetrized(a: np.ndarray) -> np.ndarray:
    return 0.5 * (a + a.T)


def assemble_h(grid: Grid, c: float, center: float = 0.0) -> OperatorMatrix:
    """Dense action hessian  D + c - 2 Q_c(x - center)  at speed c."""
    if c <= 0.0:
        raise ValueError(f"speed must be positive, got {c}")
    d_matrix = dense_symbol_matrix(grid, np.abs)
    q = soliton_profile(grid, SolitonParams(speed=c, center=center))
    entries = _symmetrized(d_matrix) + np.diag(c - 2.0 * q.values)
    return OperatorMatrix(
        grid=grid,
        entries=entries,
        description=f"action hessian, speed {c:g}, center {center:g}",
        speed=float(c),
        center=float(center),
    )


def assemble_hk(grid: Grid, fit: ModulationState, t: float, cfg: WeightConfig) -> OperatorMatrix:
    """Dense weighted hessian  D - 2R + sum_k c_k(t) phi_k.

    R is the sum of fitted solitons and phi_k are the moving window
    functions; the speeds multiplying the windows are the instantaneous
    fitted speeds carried by ``fit``.
    """
    if fit.k != cfg.k:
        raise ValueError(f"fit has {fit.k} solitons but weight config expects {cfg.k}")
    d_matrix = _symmetrized(dense_symbol_matrix(grid, np.abs))
    r = soliton_sum(grid, fit.train())
    potential = -2.0 * r.values
    for k in range(1, cfg.k + 1):
        window = soliton_window(k, t, grid, cfg)
        potential = potential + fit.speeds[k - 1] * window.values
    entries = d_matrix + np.diag(potential)
    return OperatorMatrix(
        grid=grid,
        entries=entries,
        description=f"weighted hessian, {cfg.k} solitons, t={t:g}",
    )


def closed_form_modes(grid: Grid, speed: float = 1.0, center: float = 0.0) -> dict[str, RealField]:
    """Closed-form eigenfunctions of the action hessian, grid-normalized.

    In scaled coordinates z = c(x - center), with Q(z) = 2/(1+z^2) and
    lam_pm = (-1 +- sqrt(5))/2:

        ground      proportional to (1 + lam_-) Q - Q^2    eigenvalue c*lam_-
        translation proportional to Q'                     eigenvalue 0
        excited     proportional to (1 + lam_+) Q - Q^2    eigenvalue c*lam_+
        threshold   proportional to z Q + Q'               eigenvalue c

    Each field is normalized to unit L2 norm on the grid, which absorbs the
    sqrt(c) scaling factor and the closed-form normalization constants.
    The threshold mode decays like 1/z, so on a periodic box it carries a
    visible wrap-around kink; overlap tests account for that.
    """
    params = SolitonParams(speed=speed, center=center)
    x = grid.x
    length = grid.length
    y = np.mod(x - center + 0.5 * length, length) - 0.5 * length
    z = speed * y
    q_unit = 2.0 / (1.0 + z * z)
    dq_unit = -4.0 * z / (1.0 + z * z) ** 2

    modes: dict[str, RealField] = {}
    for name, lam in (("ground", GROUND_STATE_EIGENVALUE), ("excited", EXCITED_STATE_EIGENVALUE)):
        shape = (1.0 + lam) * q_unit - q_unit * q_unit
        modes[name] = RealField(grid, shape)
    modes["translation"] = soliton_profile_dx(grid, params)
    modes["threshold"] = RealField(grid, z * q_unit + dq_unit)
    for name, f in modes.items():
        norm = l2_norm(f)
        modes[name] = RealField(grid, f.values / norm)
    return modes


def eigen_spectrum(a: OperatorMatrix, m: int, include_gaps: bool = True) -> SpectrumReport:
    """Lowest m eigenpairs of a dense operator matrix.

    For single-soliton hessians (``a.speed`` set) the report additionally
    contains overlaps with the closed-form eigenfunctions, the constrained
    coercivity gaps, and the projection constant (k, k).  Pass
    ``include_gaps=False`` to skip the two generalized eigensolves when only
    eigenpairs are needed.
    """
    n = a.grid.n
    if not 1 <= m <= n:
        raise ValueError(f"m must lie in [1, {n}], got {m}")
    try:
        vals, vecs = scipy.linalg.eigh(a.entries, subset_by_index=(0, m - 1))
    except scipy.linalg.LinAlgError as exc:
        scale = np.abs(a.entries).max()
        defect = np.abs(a.entries - a.entries.T).max()
        raise RuntimeError(
            f"eigensolver failed on {a.description!r}: "
            f"max entry {scale:.3e}, symmetry defect {defect:.3e}"
        ) from exc
    # eigh returns unit euclidean columns; rescale to unit quadrature norm
    vecs = vecs / math.sqrt(a.grid.spacing)

    if a.speed is None:
        return SpectrumReport(grid=a.grid, eigenvalues=vals, eigenvectors=vecs)

    c = a.speed
    modes = closed_form_modes(a.grid, speed=c, center=a.center or 0.0)
    targets = {
        "ground": c * GROUND_STATE_EIGENVALUE,
        "translation": 0.0,
        "excited": c * EXCITED_STATE_EIGENVALUE,
    }
    overlaps: dict[str, float] = {}
    for name, target in targets.items():
        i = int(np.argmin(np.abs(vals - target)))
        v = vecs[:, i]
        overlaps[name] = abs(a.grid.spacing * float(v @ modes[name].values))

    # The threshold eigenvalue sits at the continuum edge c; discretization
    # smears it across the near-edge cluster, so measure the norm of the
    # projection of the closed form onto every eigenvector in a window.
    # Meaningful only when the requested eigenpairs span the whole window.
    halfwidth = 0.1 * c
    if vals[-1] < c + halfwidth:
        overlaps["threshold_cluster"] = math.nan
    else:
        cluster = np.flatnonzero(np.abs(vals - c) <= halfwidth)
        phi1 = modes["threshold"].values
        proj_sq = 0.0
        for i in cluster:
            proj_sq += (a.grid.spacing * float(vecs[:, i] @ phi1)) ** 2
        overlaps["threshold_cluster"] = math.sqrt(proj_sq)

    gap_l2 = gap_h12 = None
    if include_gaps:
        params = SolitonParams(speed=c, center=a.center or 0.0)
        constraints = [soliton_profile(a.grid, params), soliton_profile_dx(a.grid, params)]
        gap_l2 = constrained_gap(a, constraints, 0.0)
        gap_h12 = constrained_gap(a, constraints, 0.5)

    return SpectrumReport(
        grid=a.grid,
        eigenvalues=vals,
        eigenvectors=vecs,
        overlaps=overlaps,
        gap_l2=gap_l2,
        gap_h12=gap_h12,
        kk=projection_kk(a.grid),
        cluster_halfwidth=halfwidth,
    )


def constrained_gap(a: OperatorMatrix, constraints: list[RealField], norm_s: float) -> float:
    """Minimum of (eps, A eps) / ||eps||_{H^s}^2 orthogonal to the constraints.

    The complement of the constraint span is parametrized by an orthonormal
    null-space basis; the quadratic form and the H^s Gram matrix (symbol
    (1 + |xi|)^{2s}) are projected onto it and the smallest generalized
    eigenvalue is returned.  The quadrature weight cancels in the ratio.
    """
    n = a.grid.n
    if constraints:
        c_rows = np.vstack([f.values for f in constraints])
        if np.linalg.matrix_rank(c_rows) < len(constraints):
            raise ValueError("constraints are linearly dependent")
        basis = scipy.linalg.null_space(c_rows)
    else:
        basis = np.eye(n)
    gram = dense_symbol_matrix(a.grid, lambda xi: (1.0 + np.abs(xi)) ** (2.0 * norm_s))
    a_proj = _symmetrized(basis.T @ a.entries @ basis)
    b_proj = _symmetrized(basis.T @ gram @ basis)
    try:
        vals = scipy.linalg.eigh(a_proj, b_proj, eigvals_only=True, subset_by_index=(0, 0))
    except scipy.linalg.LinAlgError as exc:
        raise ValueError(
            f"H^s Gram matrix is not positive definite for s={norm_s}; gap is undefined"
        ) from exc
    return float(vals[0])


def projection_kk(grid: Grid | None = None) -> float:
    """Squared norm of the ground state after projecting out the soliton.

    Decomposes the normalized ground-state eigenfunction as  b Q + k  with
    k orthogonal to Q and returns (k, k); the closed-form value is
    1/2 - 1/sqrt(5).  Computed by quadrature on the given grid (analysis
    grid by default) so the value carries the box's tail error.
    """
    if grid is None:
        grid = Grid(ANALYSIS_BOX, ANALYSIS_POINTS)
    q = soliton_profile(grid, SolitonParams(speed=1.0, center=0.0))
    phi_minus = closed_form_modes(grid)["ground"]
    coeff = inner_product(phi_minus, q) / inner_product(q, q)
    k = phi_minus - RealField(grid, coeff * q.values)
    return inner_product(k, k)


def commutator_constant(chi: RealField, trials: int = 32, seed: int = 0) -> float:
    """Worst measured ratio  ||[D^{1/2}, chi] u||_2 / || |xi|^{1/2} chi_hat ||_{L1}.

    The denominator is the continuum L1(dxi) norm of |xi|^{1/2} chi_hat,
    approximated by the trapezoid sum over grid wavenumbers.  Trial fields
    are seeded noise over a band of low modes fixed against the box (not
    the grid), so refining n reuses the same physical trials and the
    measured constant moves only by quadrature error.  A chi with no
    oscillating content commutes exactly; that degenerate case returns 0
    with a warning rather than dividing by zero.
    """
    if trials < 1:
        raise ValueError("need at least one trial")
    grid = chi.grid
    xi = grid.wavenumbers
    chat = transform(chi).continuum_amplitudes()
    denom = (2.0 * math.pi / grid.length) * float(np.sum(np.sqrt(np.abs(xi)) * np.abs(chat)))
    total = float(np.sum(np.abs(chat)))
    if denom <= 1e-12 * max(total, 1.0):
        warnings.warn("cutoff has no oscillating content; commutator constant defined as 0")
        return 0.0
    rng = np.random.default_rng(seed)
    band = min(grid.n // 4, 256)
    worst = 0.0
    for _ in range(trials):
        spectrum = np.zeros(grid.n // 2 + 1, dtype=complex)
        spectrum[1 : band + 1] = rng.standard_normal(band) + 1j * rng.standard_normal(band)
        u = RealField(grid, np.fft.irfft(spectrum, n=grid.n))
        u = RealField(grid, u.values / l2_norm(u))
        chi_u = RealField(grid, chi.values * u.values)
        com = d_power(chi_u, 0.5) - RealField(grid, chi.values * d_power(u, 0.5).values)
        worst = max(worst, l2_norm(com) / denom)
    return worst


def besov_norm(phi: RealField, s: float) -> float:
    """Homogeneous Besov norm  sum_N N^s sup|P_N phi|  over dyadic blocks.

    P_N restricts the transform to the sharp annulus N <= |xi| < 2N with
    N = 2^j; j runs over every integer whose annulus meets the grid's band.
    The mean mode is excluded (homogeneous norm).
    """
    grid = phi.grid
    coeff = transform(phi).coefficients
    absxi = np.abs(grid.wavenumbers)
    xi_min = 2.0 * math.pi / grid.length
    j_lo = math.floor(math.log2(xi_min))
    j_hi = math.floor(math.log2(grid.nyquist))
    total = 0.0
    for j in range(j_lo, j_hi + 1):
        n_block = 2.0**j
        mask = (absxi >= n_block) & (absxi < 2.0 * n_block)
        if not mask.any():
            continue
        block = inverse_transform(SpectralField(grid, np.where(mask, coeff, 0.0)))
        sup = float(np.abs(block.values).max())
        total += n_block**s * sup
    return total


def gn_ratio(u: RealField) -> float:
    """Quartic Gagliardo-Nirenberg quotient  int u^4 / (int |D^{1/2}u|^2 * int u^2)."""
    quartic = u.grid.spacing * float(np.sum(u.values**4))
    l2_sq = inner_product(u, u)
    if l2_sq == 0.0:
        raise ValueError("ratio is undefined for the zero field")
    half_deriv_sq = inner_product(u, apply_multiplier(u, np.abs))
    if half_deriv_sq <= 0.0:
        raise ValueError("ratio is undefined for constant fields")
    return quartic / (half_deriv_sq * l2_sq)


def hilbert_commutator_form(u: RealField, phi: RealField) -> float:
    """The commutator form  int u_x [H, phi] u_x  with H the Hilbert transform."""
    if u.grid != phi.grid:
        raise ValueError("fields live on different grids")
    ux = derivative(u)
    phi_ux = RealField(u.grid, phi.values * ux.values)
    bracket = hilbert(phi_ux) - RealField(u.grid, phi.values * hilbert(ux).values)
    return inner_product(ux, bracket)
