"""Red-noise (AR(1)) Monte Carlo significance for wavelet coherence."""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy import signal

from .coherence import coherence
from .cwt import cwt
from .errors import ConfigError, InputError
from .series import TimeSeries, require_length

PHI_CLAMP = 0.99
SIGMA2_FLOOR = 1e-12


@dataclass(frozen=True)
class Ar1Params:
    phi: float
    sigma: float

    def __post_init__(self):
        if not abs(self.phi) < 1:
            raise ConfigError(f"AR(1) coefficient must satisfy |phi| < 1, got {self.phi}")
        if not self.sigma > 0:
            raise ConfigError(f"AR(1) innovation sd must be positive, got {self.sigma}")


@dataclass(frozen=True)
class SignificanceField:
    percentile: np.ndarray
    significant: np.ndarray
    alpha: float
    n_surrogates: int
    seed: int
    null_x: Ar1Params | None = None
    null_y: Ar1Params | None = None


def fit_ar1(x):
    """Yule-Walker AR(1) fit: lag-1 autocorrelation and matching innovation sd."""
    require_length(x)
    v = np.asarray(x.values, dtype=float)
    d = v - v.mean()
    denom = np.dot(d, d)
    if denom == 0 or d.std(ddof=1) <= 1e-13 * np.abs(v).max():
        raise InputError(f"{x.name}: zero variance")
    phi = float(np.dot(d[:-1], d[1:]) / denom)
    phi = min(max(phi, -PHI_CLAMP), PHI_CLAMP)
    sigma2 = max(float(v.var(ddof=1)) * (1 - phi * phi), SIGMA2_FLOOR)
    return Ar1Params(phi, math.sqrt(sigma2))


def surrogate_rng(seed, k):
    """Generator for surrogate ``k``; independent of how surrogates are scheduled."""
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(k,))))


def _as_rng(seed):
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def simulate_ar1(params, n, seed=None, name="ar1", dt=1.0):
    """Stationary AR(1) path of length ``n``.

    The first value is drawn from the stationary distribution, so there is
    no burn-in transient. ``seed`` may be an integer or a Generator.
    """
    rng = _as_rng(seed)
    e = rng.standard_normal(n) * params.sigma
    e[0] *= 1.0 / math.sqrt(1.0 - params.phi ** 2)
    values = signal.lfilter([1.0], [1.0, -params.phi], e)
    return TimeSeries(name, values, dt=dt)


def _standardized(values):
    d = values - values.mean()
    return d / d.std(ddof=1)


def _surrogate_counts(ks, n, dt, px, py, seed, observed, pooled):
    grid, params, smoothing = observed.grid, observed.params, observed.smoothing
    obs = observed.r2
    counts = np.zeros(obs.shape, dtype=np.int64)
    for k in ks:
        rng = surrogate_rng(seed, k)
        xs = simulate_ar1(px, n, rng, dt=dt)
        ys = simulate_ar1(py, n, rng, dt=dt)
        Wx = cwt(TimeSeries("xs", _standardized(xs.values), dt=dt), grid, params)
        Wy = cwt(TimeSeries("ys", _standardized(ys.values), dt=dt), grid, params)
        r2 = coherence(Wx, Wy, smoothing).r2
        if pooled is None:
            counts += r2 < obs
        else:
            for j, cols in enumerate(pooled):
                ref = np.sort(r2[j, cols])
                counts[j] += np.searchsorted(ref, obs[j], side="left")
    return counts


def mc_significance(x, y, observed, n_surrogates=1000, alpha=0.05, seed=0, workers=1, pool_time=False):
    """Monte Carlo significance of an observed coherence field.

    Each surrogate pair consists of two independent AR(1) series fitted to
    ``x`` and ``y``; the percentile of a cell is the fraction of surrogate
    R^2 values at that cell strictly below the observed one. With
    ``pool_time`` the comparison set at each scale is pooled over all time
    points outside the cone of influence.

    The result depends only on the inputs and ``seed``: surrogate ``k`` uses
    its own generator and counts are summed as integers, so ``workers``
    does not change a single bit.
    """
    if n_surrogates < 100:
        raise ConfigError(f"need at least 100 surrogates, got {n_surrogates}")
    if not 0 < alpha < 0.5:
        raise ConfigError(f"alpha must lie in (0, 0.5), got {alpha}")
    if len(x) != len(y) or len(x) != observed.r2.shape[1]:
        raise InputError("series and coherence field disagree in length")
    px, py = fit_ar1(x), fit_ar1(y)
    n, dt = len(x), x.dt

    pooled = None
    per_draw = 1
    if pool_time:
        inside = observed.outside_coi()
        pooled = [np.flatnonzero(row) if row.any() else np.arange(n) for row in inside]
        per_draw = np.array([len(c) for c in pooled])[:, None]

    workers = max(1, int(workers))
    chunks = [list(c) for c in np.array_split(np.arange(n_surrogates), workers) if len(c)]
    args = (n, dt, px, py, seed, observed, pooled)
    if len(chunks) == 1:
        counts = _surrogate_counts(chunks[0], *args)
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda ks: _surrogate_counts(ks, *args), chunks))
        counts = np.sum(parts, axis=0)

    percentile = counts / (n_surrogates * per_draw)
    significant = percentile >= 1 - alpha
    return SignificanceField(percentile, significant, alpha, n_surrogates, seed, px, py)


# Directions on the corner lattice, counter-clockwise order: +u, +j, -u, -j.
_STEPS = ((1, 0), (0, 1), (-1, 0), (0, -1))


def significance_contours(sig):
    """Closed boundaries of the significant regions.

    Boundaries follow cell edges, so a lone significant cell yields a
    four-segment square and a fully significant field one rectangle.
    Coordinates are ``(time index, scale index)``; cell ``(j, u)`` spans
    ``u +- 0.5`` and ``j +- 0.5``. Each loop is an ``(m, 2)`` array whose
    last vertex repeats the first; the region lies to the left.
    """
    mask = np.asarray(getattr(sig, "significant", sig), dtype=bool)
    return mask_contours(mask)


def mask_contours(mask):
    rows, cols = mask.shape
    pad = np.zeros((rows + 2, cols + 2), dtype=bool)
    pad[1:-1, 1:-1] = mask
    inner = pad[1:-1, 1:-1]

    # Corner (u, j) is the lower-left corner of cell (j, u).
    edges = {}

    def add(start_u, start_j, direction, where):
        for j, u in zip(*np.nonzero(where)):
            edges.setdefault((int(u + start_u), int(j + start_j)), []).append(direction)

    add(0, 0, 0, inner & ~pad[0:-2, 1:-1])  # bottom side, heading +u
    add(1, 0, 1, inner & ~pad[1:-1, 2:])  # right side, heading +j
    add(1, 1, 2, inner & ~pad[2:, 1:-1])  # top side, heading -u
    add(0, 1, 3, inner & ~pad[1:-1, 0:-2])  # left side, heading -j

    loops = []
    while edges:
        start = min(edges)
        corner, heading = start, None
        path = [start]
        while True:
            out = edges[corner]
            d = out[0]
            if heading is not None:
                # At a saddle prefer the left turn so diagonal neighbours stay apart.
                for turn in (1, 0, 3):
                    if (heading + turn) % 4 in out:
                        d = (heading + turn) % 4
                        break
            out.remove(d)
            if not out:
                del edges[corner]
            du, dj = _STEPS[d]
            corner, heading = (corner[0] + du, corner[1] + dj), d
            path.append(corner)
            if corner == start:
                break
        loops.append(_simplify(path))
    return loops


def _simplify(path):
    pts = np.array(path, dtype=float)
    keep = [0]
    for i in range(1, len(pts) - 1):
        a, b, c = pts[keep[-1]], pts[i], pts[i + 1]
        if (b[0] - a[0]) * (c[1] - b[1]) - (b[1] - a[1]) * (c[0] - b[0]) != 0:
            keep.append(i)
    # Drop the start vertex too if it sits mid-way along a straight side.
    out = pts[keep]
    if len(out) > 2:
        a, b, c = out[-1], out[0], out[1]
        if (b[0] - a[0]) * (c[1] - b[1]) - (b[1] - a[1]) * (c[0] - b[0]) == 0:
            out = out[1:]
    out = np.vstack([out, out[:1]])
    return out - 0.5
