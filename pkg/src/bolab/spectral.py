"""Periodic pseudo-spectral core: grids, fields, transforms, Fourier multipliers.

Conventions (fixed once, used everywhere):

* The box is [-L/2, L/2) with n equispaced samples, n a power of two.
* Wavenumbers are xi_m = 2*pi*m/L for m = -n/2 .. n/2-1, stored in FFT
  order (0, 1, ..., n/2-1, -n/2, ..., -1).  The m = -n/2 entry is the
  unpaired Nyquist mode.
* Forward transform: u_hat(xi) = (1/sqrt(2*pi)) * integral u(x) e^{+i x xi} dx,
  discretised so that sum_xi |u_hat|^2 == spacing * sum_x |u|^2 exactly
  (unitary Parseval).  Discrete coefficients relate to the continuum
  transform by u_hat_discrete = sqrt(2*pi/L) * u_hat_continuum.
* Under this sign choice the physical derivative has symbol -i*xi, the
  Hilbert transform has symbol -i*sgn(xi) with sgn(0) = 0, and
  D = sqrt(-d^2/dx^2) has symbol |xi|, so that hilbert(derivative(u))
  equals -d_power(u, 1) to round-off.  Note this makes
  hilbert(cos(k x)) = -sin(k x): the convention is pinned by the
  composition identity, not by the textbook kernel sign.
* Multipliers with an imaginary (odd-symbol) value at the Nyquist mode
  zero that mode to keep real fields real.
"""

from __future__ import annotations

import numpy as np

_HERMITIAN_TOL = 1e-12


class Grid:
    """Uniform periodic grid on [-length/2, length/2).

    Parameters
    ----------
    length : float
        Box length L > 0.
    n : int
        Number of samples; must be a power of two (the stepper and the
        dealias bookkeeping assume FFT-friendly sizes).

    Attributes
    ----------
    spacing : float
        L / n.
    x : ndarray
        Sample locations, x[j] = -L/2 + j*spacing.
    wavenumbers : ndarray
        xi_m = 2*pi*m/L in FFT order; wavenumbers[n//2] is the unpaired
        Nyquist mode.
    """

    __slots__ = ("length", "n", "spacing", "x", "wavenumbers",
                 "_conj_index", "_nyquist_index", "_forward_phase")

    def __init__(self, length: float, n: int):
        length = float(length)
        if not length > 0.0:
            raise ValueError(f"grid length must be positive, got {length}")
        if n < 2 or (n & (n - 1)) != 0:
            raise ValueError(f"grid size must be a power of two >= 2, got {n}")
        self.length = length
        self.n = int(n)
        self.spacing = length / n
        self.x = -0.5 * length + self.spacing * np.arange(n)
        self.wavenumbers = 2.0 * np.pi * np.fft.fftfreq(n, d=self.spacing)
        self._conj_index = (-np.arange(n)) % n
        self._nyquist_index = n // 2
        self._forward_phase = np.exp(1j * self.wavenumbers * self.x[0])

    def __eq__(self, other):
        return (isinstance(other, Grid) and other.length == self.length
                and other.n == self.n)

    def __hash__(self):
        return hash((self.length, self.n))

    def __repr__(self):
        return f"Grid(length={self.length}, n={self.n})"

    @property
    def nyquist(self) -> float:
        """Magnitude of the largest resolved wavenumber, pi/spacing."""
        return np.pi / self.spacing

    def sample(self, fn) -> "RealField":
        """Sample a callable of x into a RealField."""
        return RealField(self, fn(self.x))

    def field(self, values) -> "RealField":
        return RealField(self, values)

    def zeros(self) -> "RealField":
        return RealField(self, np.zeros(self.n))


class RealField:
    """Real-valued samples bound to a grid.

    Fields are value-like: arithmetic returns new fields, and every
    constructor call checks that the samples are finite.
    """

    __slots__ = ("grid", "values")

    def __init__(self, grid: Grid, values):
        values = np.array(values, dtype=float, copy=True)
        if values.shape != (grid.n,):
            raise ValueError(f"expected {grid.n} samples, got shape {values.shape}")
        if not np.all(np.isfinite(values)):
            raise ValueError("field samples must be finite")
        self.grid = grid
        self.values = values

    def _check_same_grid(self, other: "RealField"):
        if self.grid != other.grid:
            raise ValueError("fields live on different grids")

    def __add__(self, other):
        if isinstance(other, RealField):
            self._check_same_grid(other)
            return RealField(self.grid, self.values + other.values)
        return RealField(self.grid, self.values + other)

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, RealField):
            self._check_same_grid(other)
            return RealField(self.grid, self.values - other.values)
        return RealField(self.grid, self.values - other)

    def __rsub__(self, other):
        return RealField(self.grid, other - self.values)

    def __mul__(self, other):
        if isinstance(other, RealField):
            self._check_same_grid(other)
            return RealField(self.grid, self.values * other.values)
        return RealField(self.grid, self.values * other)

    __rmul__ = __mul__

    def __truediv__(self, scalar):
        return RealField(self.grid, self.values / scalar)

    def __neg__(self):
        return RealField(self.grid, -self.values)

    def __pow__(self, p):
        return RealField(self.grid, self.values ** p)

    def __repr__(self):
        return f"RealField(n={self.grid.n}, max|u|={np.max(np.abs(self.values)):.3g})"


class SpectralField:
    """Fourier coefficients of a real field, in the grid's FFT order.

    Hermitian symmetry u_hat(-xi) = conj(u_hat(xi)) holds for transforms
    of real fields; ``hermitian_defect`` measures it for tests.
    """

    __slots__ = ("grid", "coefficients")

    def __init__(self, grid: Grid, coefficients):
        coefficients = np.array(coefficients, dtype=complex, copy=True)
        if coefficients.shape != (grid.n,):
            raise ValueError(f"expected {grid.n} coefficients, got shape {coefficients.shape}")
        self.grid = grid
        self.coefficients = coefficients

    def hermitian_defect(self) -> float:
        c = self.coefficients
        paired = np.delete(np.arange(self.grid.n), self.grid._nyquist_index)
        return float(np.max(np.abs(c[self.grid._conj_index[paired]] - np.conj(c[paired]))))

    def continuum_amplitudes(self) -> np.ndarray:
        """Coefficients rescaled to the continuum normalisation
        (1/sqrt(2 pi)) * integral u e^{+i x xi} dx, for comparison with
        closed-form transforms."""
        return self.coefficients * np.sqrt(self.grid.length / (2.0 * np.pi))

    def __repr__(self):
        return f"SpectralField(n={self.grid.n})"


def transform(f: RealField) -> SpectralField:
    """Forward transform with the module's unitary-Parseval normalisation."""
    g = f.grid
    raw = np.fft.ifft(f.values) * g.n          # sum_j u_j e^{+2 pi i j m / n}
    coeff = np.sqrt(g.spacing / g.n) * g._forward_phase * raw
    return SpectralField(g, coeff)


def inverse_transform(fh: SpectralField) -> RealField:
    """Inverse of :func:`transform`; round-trips to round-off."""
    g = fh.grid
    raw = fh.coefficients * np.conj(g._forward_phase) / np.sqrt(g.spacing * g.n)
    values = np.fft.fft(raw)
    return RealField(g, values.real)


def apply_multiplier(f: RealField, symbol) -> RealField:
    """Apply a Fourier multiplier ``symbol(xi)`` to a real field.

    ``symbol`` must accept the grid's wavenumber array and return the
    multiplier values; it must be Hermitian (symbol(-xi) == conj(symbol(xi)))
    so the output is real.  An imaginary value at the unpaired Nyquist mode
    is treated as zero there (odd symbols annihilate that mode).
    """
    g = f.grid
    xi = g.wavenumbers
    m = np.asarray(symbol(xi), dtype=complex)
    if m.shape != xi.shape:
        raise ValueError("symbol must return one value per wavenumber")
    if not np.all(np.isfinite(m)):
        raise ValueError("symbol values must be finite")
    paired = np.delete(np.arange(g.n), g._nyquist_index)
    scale = max(1.0, float(np.max(np.abs(m))))
    defect = np.max(np.abs(m[g._conj_index[paired]] - np.conj(m[paired])))
    if defect > _HERMITIAN_TOL * scale:
        raise ValueError("symbol is not Hermitian; output would be complex")

    fh = np.fft.ifft(f.values) * g.n
    out = m * fh
    if abs(m[g._nyquist_index].imag) > _HERMITIAN_TOL * scale:
        out[g._nyquist_index] = 0.0
    values = np.fft.fft(out / g.n)
    return RealField(g, values.real)


def derivative(f: RealField) -> RealField:
    """d/dx; symbol -i*xi under the module convention."""
    return apply_multiplier(f, lambda xi: -1j * xi)


def hilbert(f: RealField) -> RealField:
    """Hilbert transform, symbol -i*sgn(xi); annihilates the mean mode and
    satisfies hilbert(derivative(u)) == -d_power(u, 1)."""
    return apply_multiplier(f, lambda xi: -1j * np.sign(xi))


def d_power(f: RealField, s: float = 1.0) -> RealField:
    """D^s with symbol |xi|^s; D = d_power(f, 1) is sqrt(-d^2/dx^2)."""
    if s < 0:
        raise ValueError("d_power needs s >= 0 (|xi|^s singular at the mean mode)")
    return apply_multiplier(f, lambda xi: np.abs(xi) ** s)


def inner_product(f: RealField, g: RealField) -> float:
    """Trapezoid pairing spacing * sum(f*g); exact for band-limited products."""
    f._check_same_grid(g)
    return float(f.grid.spacing * np.dot(f.values, g.values))


def l2_norm(f: RealField) -> float:
    return float(np.sqrt(f.grid.spacing) * np.linalg.norm(f.values))


def sobolev_norm(f: RealField, s: float) -> float:
    """Inhomogeneous Sobolev norm sqrt(sum (1+|xi|)^{2s} |u_hat|^2).

    s = 0 reproduces the L^2 norm to round-off; s = 1/2 is the energy-space
    norm used throughout the stability diagnostics.
    """
    if s < 0:
        raise ValueError("sobolev_norm needs s >= 0")
    fh = transform(f)
    w = (1.0 + np.abs(f.grid.wavenumbers)) ** (2.0 * s)
    return float(np.sqrt(np.sum(w * np.abs(fh.coefficients) ** 2)))


def dealias(fh: SpectralField) -> SpectralField:
    """Zero coefficients with |xi| above two thirds of the Nyquist wavenumber.

    Idempotent; products of surviving modes alias only into the zeroed band.
    """
    g = fh.grid
    cutoff = (2.0 / 3.0) * g.nyquist
    keep = np.abs(g.wavenumbers) <= cutoff
    return SpectralField(g, np.where(keep, fh.coefficients, 0.0))


def dealias_mask(grid: Grid) -> np.ndarray:
    """Boolean keep-mask used by :func:`dealias`, exposed for the stepper."""
    return np.abs(grid.wavenumbers) <= (2.0 / 3.0) * grid.nyquist
