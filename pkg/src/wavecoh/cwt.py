"""Continuous Morlet wavelet transform on a dyadic scale grid.

The transform is evaluated in the frequency domain on the zero-padded
series. Coefficients carry the ``1/sqrt(s)`` normalization and the ``dt``
of the time integral, so for ``dt == 1`` they coincide with the usual
Torrence & Compo convention.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy import fft as sp_fft
from scipy import integrate

from .errors import ConfigError, InputError
from .series import MIN_LENGTH, TimeSeries

PI_QUARTER = np.pi ** -0.25


def morlet_time(t, omega0=6.0):
    """Morlet mother wavelet ``pi**-0.25 * exp(i*omega0*t) * exp(-t**2/2)``."""
    t = np.asarray(t, dtype=float)
    return PI_QUARTER * np.exp(1j * omega0 * t - 0.5 * t * t)


def morlet_freq(sw, omega0=6.0):
    """Frequency-domain Morlet, zero for non-positive frequencies.

    Normalized so that ``morlet_time(t) = 1/(2*sqrt(pi)) * integral of
    morlet_freq(w) * exp(i*w*t) dw``.
    """
    sw = np.asarray(sw, dtype=float)
    out = PI_QUARTER * math.sqrt(2.0) * np.exp(-0.5 * (sw - omega0) ** 2)
    return np.where(sw > 0, out, 0.0)


def _admissibility(omega0):
    # Energy normalization for real input: (pi/2) * int_0^inf |Psi(w)|^2 / w dw.
    def integrand(w):
        return float(morlet_freq(w, omega0)) ** 2 / w

    lo, hi = max(omega0 - 12.0, 0.0), omega0 + 12.0
    value, _ = integrate.quad(integrand, lo, hi, points=[omega0], limit=200, epsabs=0, epsrel=1e-12)
    if lo > 0:
        tail, _ = integrate.quad(integrand, 0.0, lo, limit=200)
        value += tail
    return 0.5 * np.pi * value


@dataclass(frozen=True)
class MorletParams:
    omega0: float = 6.0
    admissibility_constant: float = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if not (math.isfinite(self.omega0) and self.omega0 >= 5.0):
            raise ConfigError(f"omega0 must be >= 5, got {self.omega0}")
        c = _admissibility(self.omega0)
        if not (math.isfinite(c) and c > 0):
            raise ConfigError("admissibility constant is not finite and positive")
        object.__setattr__(self, "admissibility_constant", c)

    @property
    def efolding_factor(self):
        return math.sqrt(2.0)

    @property
    def period_factor(self):
        """Fourier period of the wavelet at unit scale."""
        return 4 * np.pi / (self.omega0 + math.sqrt(2 + self.omega0 ** 2))


@dataclass(frozen=True)
class ScaleGrid:
    s0: float
    dj: float
    J: int

    def __post_init__(self):
        if not (math.isfinite(self.s0) and self.s0 > 0):
            raise ConfigError(f"s0 must be positive, got {self.s0}")
        if not (0 < self.dj <= 0.5):
            raise ConfigError(f"dj must lie in (0, 0.5], got {self.dj}")
        if int(self.J) != self.J or self.J < 0:
            raise ConfigError(f"J must be a non-negative integer, got {self.J}")
        object.__setattr__(self, "J", int(self.J))

    @property
    def scales(self):
        return self.s0 * 2.0 ** (np.arange(self.J + 1) * self.dj)

    def periods(self, params):
        return self.scales * params.period_factor

    def __len__(self):
        return self.J + 1

    def check(self, n, dt):
        if self.s0 * 2.0 ** (self.J * self.dj) > n * dt * (1 + 1e-12):
            raise ConfigError(
                f"grid/series mismatch: largest scale {self.scales[-1]:.4g} exceeds series span {n * dt:.4g}"
            )


def default_grid(n, dt=1.0):
    if n < MIN_LENGTH:
        raise InputError(f"need at least {MIN_LENGTH} points for a scale grid, got {n}")
    s0 = 2 * dt
    dj = 1 / 12
    J = int(math.floor(math.log2(n * dt / s0) / dj + 1e-9))
    return ScaleGrid(s0, dj, J)


@dataclass(frozen=True)
class CwtMatrix:
    coefficients: np.ndarray
    grid: ScaleGrid
    dt: float
    coi: np.ndarray
    params: MorletParams = MorletParams()

    def __post_init__(self):
        shape = (len(self.grid), len(self.coi))
        if self.coefficients.shape != shape:
            raise ValueError(f"coefficient matrix {self.coefficients.shape} does not match grid x series {shape}")
        self.coefficients.setflags(write=False)
        self.coi.setflags(write=False)

    @property
    def scales(self):
        return self.grid.scales

    @property
    def periods(self):
        return self.grid.periods(self.params)

    @property
    def power(self):
        W = self.coefficients
        return W.real ** 2 + W.imag ** 2

    def outside_coi(self):
        """Boolean mask of cells not affected by the edge padding."""
        return self.scales[:, None] <= self.coi[None, :]


def coi(n, dt=1.0, params=MorletParams()):
    """Cone of influence as a scale per time index.

    The e-folding time ``sqrt(2) * s`` of the Morlet envelope equals the
    distance to the nearest series edge (edges sit half a sample outside).
    """
    if n < 2:
        raise InputError("cone of influence needs at least 2 points")
    u = np.arange(n)
    dist = np.minimum(u + 0.5, n - 1 - u + 0.5)
    return dt * dist / params.efolding_factor


def padded_length(n):
    return 1 << int(math.ceil(math.log2(2 * n)))


@lru_cache(maxsize=32)
def _daughters(npad, dt, grid, omega0):
    omega = 2 * np.pi * np.fft.fftfreq(npad, d=dt)
    s = grid.scales[:, None]
    d = np.sqrt(np.pi * s) * morlet_freq(s * omega[None, :], omega0)
    d.setflags(write=False)
    return d


def cwt(x, grid=None, params=MorletParams()):
    """Morlet transform of ``x`` on ``grid``.

    Parameters
    ----------
    x : TimeSeries
    grid : ScaleGrid, optional
        Defaults to :func:`default_grid` for the series length.
    params : MorletParams

    Returns
    -------
    CwtMatrix
        Coefficients of shape ``(J + 1, N)``; padding is stripped.
    """
    values = x.values if isinstance(x, TimeSeries) else np.asarray(x, dtype=float)
    dt = x.dt if isinstance(x, TimeSeries) else 1.0
    n = len(values)
    if grid is None:
        grid = default_grid(n, dt)
    grid.check(n, dt)
    if not np.all(np.isfinite(values)):
        raise InputError("cannot transform non-finite values")

    npad = padded_length(n)
    spectrum = sp_fft.fft(values, npad)
    daughters = _daughters(npad, float(dt), grid, float(params.omega0))
    W = sp_fft.ifft(spectrum[None, :] * daughters, axis=1)[:, :n]
    return CwtMatrix(np.ascontiguousarray(W), grid, float(dt), coi(n, dt, params), params)


@lru_cache(maxsize=16)
def calibration(omega0, dj):
    """Energy and reconstruction constants from the transform of a unit impulse.

    The impulse is transformed on a ladder wide enough to capture every
    non-zero frequency bin, so the constants do not depend on the
    analysis grid other than through ``dj``.

    Returns
    -------
    (energy_constant, reconstruction_constant)
    """
    npad = 4096
    lo, hi = -2.0, 14.0
    j = np.arange(int(math.floor(lo / dj)), int(math.ceil(hi / dj)) + 1)
    scales = 2.0 ** (j * dj)
    omega = 2 * np.pi * np.fft.fftfreq(npad)
    daughters = np.sqrt(np.pi * scales[:, None]) * morlet_freq(scales[:, None] * omega[None, :], omega0)
    # unit impulse at index 0 has a flat spectrum
    W = sp_fft.ifft(daughters, axis=1)
    energy = np.sum((W.real ** 2 + W.imag ** 2).sum(axis=1) * dj * np.log(2) / scales)
    recon = dj / PI_QUARTER * np.sum(W[:, 0].real / np.sqrt(scales))
    return float(energy), float(recon)


def energy(W, time_slice=slice(None)):
    """Wavelet-domain energy, optionally restricted to a range of time indices."""
    c_energy, _ = calibration(W.params.omega0, W.grid.dj)
    per_scale = W.power[:, time_slice].sum(axis=1)
    return float(np.sum(per_scale * W.dt * W.grid.dj * np.log(2) / W.scales) / c_energy)


def reconstruct(W, params=None, name="reconstruction"):
    """Inverse transform by the real part of the scale sum."""
    params = params or W.params
    _, c_delta = calibration(params.omega0, W.grid.dj)
    total = (W.coefficients.real / np.sqrt(W.scales)[:, None]).sum(axis=0)
    values = W.grid.dj / (c_delta * PI_QUARTER) * total
    return TimeSeries(name, values, dt=W.dt)
