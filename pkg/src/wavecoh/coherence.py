"""Cross-wavelet spectra, smoothing, squared coherence and phase."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import fft as sp_fft

from .cwt import MorletParams, ScaleGrid, cwt, default_grid
from .errors import ConfigError, InputError

DEGENERATE_EPS = 1e-12


@dataclass(frozen=True)
class SmoothingParams:
    """Time Gaussian with sd ``time_sigma * s``, cut at ``truncate`` sd; scale
    boxcar ``scale_width`` octaves wide."""

    time_sigma: float = 1.0
    truncate: float = 4.0
    scale_width: float = 0.6

    def __post_init__(self):
        for name in ("time_sigma", "truncate", "scale_width"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0):
                raise ConfigError(f"smoothing {name} must be positive, got {v}")


@dataclass(frozen=True)
class CrossMatrix:
    coefficients: np.ndarray
    grid: ScaleGrid
    dt: float
    coi: np.ndarray

    @property
    def scales(self):
        return self.grid.scales

    @property
    def power(self):
        """Cross-wavelet power ``|W_xy|``."""
        return np.abs(self.coefficients)


@dataclass(frozen=True)
class CoherenceField:
    r2: np.ndarray
    phase: np.ndarray
    sxx: np.ndarray
    syy: np.ndarray
    sxy: np.ndarray
    degenerate: np.ndarray
    cross_power: np.ndarray
    coi: np.ndarray
    grid: ScaleGrid
    dt: float
    params: MorletParams = MorletParams()
    smoothing: SmoothingParams = SmoothingParams()

    @property
    def scales(self):
        return self.grid.scales

    @property
    def periods(self):
        return self.grid.periods(self.params)

    def outside_coi(self):
        return self.scales[:, None] <= self.coi[None, :]


def _same_layout(a, b):
    if a.coefficients.shape != b.coefficients.shape or a.grid != b.grid or a.dt != b.dt:
        raise ConfigError("grid mismatch between the two transforms")


def xwt(Wx, Wy):
    _same_layout(Wx, Wy)
    ar, ai = Wx.coefficients.real, Wx.coefficients.imag
    br, bi = Wy.coefficients.real, Wy.coefficients.imag
    # Expanded by hand: numpy's complex product can leave ~1e-18 imaginary
    # residue on z * conj(z).
    return CrossMatrix((ar * br + ai * bi) + 1j * (ai * br - ar * bi), Wx.grid, Wx.dt, Wx.coi)


def time_kernel(scale, dt, params=SmoothingParams()):
    """Unit-sum discrete Gaussian for one scale; offsets ``-L..L`` samples."""
    sigma = params.time_sigma * scale / dt
    L = int(math.floor(params.truncate * sigma))
    m = np.arange(-L, L + 1)
    g = np.exp(-0.5 * (m / sigma) ** 2)
    return m, g / g.sum()


def scale_kernel(dj, params=SmoothingParams()):
    """Unit-sum boxcar over scale steps, fractional weight at the two ends."""
    half = params.scale_width / dj / 2
    K = int(math.ceil(half - 0.5))
    k = np.arange(-K, K + 1)
    w = np.clip(np.minimum(k + 0.5, half) - np.maximum(k - 0.5, -half), 0, None)
    return k, w / w.sum()


@lru_cache(maxsize=32)
def _time_response(n, dt, grid, params):
    # Edge reflection makes the row periodic with period 2n, so the truncated
    # kernel is folded onto that period and applied by FFT.
    period = 2 * n
    H = np.empty((len(grid), period // 2 + 1))
    for j, s in enumerate(grid.scales):
        m, g = time_kernel(s, dt, params)
        folded = np.bincount(m % period, weights=g, minlength=period)
        H[j] = sp_fft.rfft(folded).real
    H.setflags(write=False)
    return H


def _reflect_smooth(fields, H):
    # fields: (..., rows, n) real; H: (rows, n + 1) folded kernel spectra.
    n = fields.shape[-1]
    ext = np.concatenate([fields, fields[..., ::-1]], axis=-1)
    return sp_fft.irfft(sp_fft.rfft(ext, axis=-1) * H, n=2 * n, axis=-1)[..., :n]


def smooth_time(field, grid, dt, params=SmoothingParams()):
    """Gaussian smoothing along each scale row, reflecting at the edges."""
    field = np.asarray(field)
    if np.iscomplexobj(field):
        return smooth_time(field.real, grid, dt, params) + 1j * smooth_time(field.imag, grid, dt, params)
    H = _time_response(field.shape[-1], float(dt), grid, params)
    return _reflect_smooth(field, H)


def smooth_scale(field, dj, params=SmoothingParams()):
    """Boxcar smoothing across scales (axis -2), reflecting at the grid ends."""
    field = np.asarray(field)
    k, w = scale_kernel(dj, params)
    K = int(k[-1])
    rows = field.shape[-2]
    widths = [(0, 0)] * field.ndim
    widths[-2] = (K, K)
    pad = np.pad(field, widths, mode="symmetric")
    out = w[0] * pad[..., 0:rows, :]
    for i in range(1, len(w)):
        out = out + w[i] * pad[..., i:i + rows, :]
    return out


def smooth(field, grid, dt, params=SmoothingParams()):
    """Time-then-scale smoothing of a (complex or real) scale x time field."""
    if np.shape(field)[-2] != len(grid):
        raise ConfigError("field rows do not match the scale grid")
    return smooth_scale(smooth_time(field, grid, dt, params), grid.dj, params)


def _check_nontrivial(grid, dt, params):
    # With an identity smoother R^2 is identically 1, so refuse it.
    m, _ = time_kernel(grid.scales[0], dt, params)
    k, _ = scale_kernel(grid.dj, params)
    if len(m) == 1 and len(k) == 1:
        raise ConfigError("smoothing kernels reduce to the identity; coherence would be trivially 1")


def coherence(Wx, Wy, smoothing=SmoothingParams()):
    """Squared coherence and phase from two transforms on the same grid."""
    _same_layout(Wx, Wy)
    grid, dt = Wx.grid, Wx.dt
    _check_nontrivial(grid, dt, smoothing)
    ar, ai = Wx.coefficients.real, Wx.coefficients.imag
    br, bi = Wy.coefficients.real, Wy.coefficients.imag
    # Written out so that identical inputs give bitwise-equal spectra and a
    # cross-spectrum with exactly zero imaginary part.
    spectra = np.stack([
        ar * ar + ai * ai,
        br * br + bi * bi,
        ar * br + ai * bi,
        ai * br - ar * bi,
    ]) / grid.scales[:, None]
    H = _time_response(spectra.shape[-1], float(dt), grid, smoothing)
    sxx, syy, re, im = smooth_scale(_reflect_smooth(spectra, H), grid.dj, smoothing)

    with np.errstate(invalid="ignore", divide="ignore"):
        degenerate = ~(sxx > DEGENERATE_EPS * sxx.max()) | ~(syy > DEGENERATE_EPS * syy.max())
        ratio = np.where(degenerate, 0.0, (re * re + im * im) / (sxx * syy))
    # Bounded by Cauchy-Schwarz; FFT round-off in near-silent cells can
    # overshoot by roughly eps * row max / cell value.
    r2 = np.clip(ratio, 0.0, 1.0)
    with np.errstate(invalid="ignore"):
        phase = np.where(degenerate, 0.0, np.arctan2(im, re))
    phase[phase == -np.pi] = np.pi
    return CoherenceField(
        r2=r2,
        phase=phase,
        sxx=sxx,
        syy=syy,
        sxy=re + 1j * im,
        degenerate=degenerate,
        cross_power=np.hypot(spectra[2], spectra[3]) * grid.scales[:, None],
        coi=Wx.coi,
        grid=grid,
        dt=dt,
        params=Wx.params,
        smoothing=smoothing,
    )


def wct(x, y, grid=None, morlet=MorletParams(), smoothing=SmoothingParams()):
    """Wavelet coherence of two aligned series.

    Each cell holds ``|S(W_xy/s)|^2 / (S(|W_x|^2/s) S(|W_y|^2/s))`` with the
    smoother ``S`` of :func:`smooth`. Cells where either smoothed
    auto-spectrum falls below ``1e-12`` of its maximum are flagged in
    ``degenerate`` and report zero coherence and zero phase.
    """
    if len(x) != len(y) or x.dt != y.dt:
        raise InputError("series must be aligned (same length and spacing)")
    if grid is None:
        grid = default_grid(len(x), x.dt)
    return coherence(cwt(x, grid, morlet), cwt(y, grid, morlet), smoothing)


def phase_difference(field):
    """Phase of the smoothed cross-spectrum in ``(-pi, pi]``.

    Positive values mean the first series leads the second; ``0`` is in
    phase and ``pi`` anti-phase.
    """
    return field.phase


def lead_time(phase, scale, params=MorletParams()):
    """Convert a phase difference at ``scale`` into a lead in time units."""
    if np.any(np.asarray(scale) <= 0):
        raise ValueError("scale must be positive")
    return np.asarray(phase) / (2 * np.pi) * params.period_factor * np.asarray(scale)
