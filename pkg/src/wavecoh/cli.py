"""Command-line pipeline: load, align, transform, test, export.

Exit codes: 0 success, 2 input error, 3 configuration error.
"""

from __future__ import annotations

import argparse
import math
import sys
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from . import __version__
from .coherence import wct
from .cwt import MorletParams, ScaleGrid, cwt
from .errors import ConfigError, InputError, WavecohError
from .export import ResultBundle, file_digest, write_bundle
from .render import _COLORMAPS, RenderOptions, render_svg
from .series import TimeSeries, align_weekly, load_csv, log_returns, normalized_log_price, require_length, standardize
from .significance import mc_significance

FORMATS = ("grid-csv", "grid-json", "svg")


@dataclass
class AnalysisConfig:
    input_x: str
    input_y: str | None = None
    column_x: str = "value"
    column_y: str = "value"
    date_column: str = "date"
    use_log_returns: bool = True
    s0: float | None = None
    dj: float = 1 / 12
    omega0: float = 6.0
    n_surrogates: int = 1000
    alpha: float = 0.05
    seed: int = 0
    out: str = "out"
    formats: tuple = ("grid-csv",)
    workers: int = 1
    pool_time: bool = False
    colormap: str = "jet"

    def validate(self):
        if self.s0 is not None and not (math.isfinite(self.s0) and self.s0 > 0):
            raise ConfigError(f"--s0 must be positive, got {self.s0}")
        if not (0 < self.dj <= 0.5):
            raise ConfigError(f"--dj must lie in (0, 0.5], got {self.dj}")
        MorletParams(self.omega0)
        if self.n_surrogates < 100:
            raise ConfigError(f"--surrogates must be at least 100, got {self.n_surrogates}")
        if not 0 < self.alpha < 0.5:
            raise ConfigError(f"--alpha must lie in (0, 0.5), got {self.alpha}")
        if not 0 <= self.seed < 2 ** 64:
            raise ConfigError(f"--seed must be a 64-bit unsigned integer, got {self.seed}")
        if self.workers < 1:
            raise ConfigError(f"--workers must be at least 1, got {self.workers}")
        bad = set(self.formats) - set(FORMATS)
        if bad:
            raise ConfigError(f"unknown format(s) {sorted(bad)}")
        if self.colormap not in _COLORMAPS:
            raise ConfigError(f"unknown colormap {self.colormap!r}")
        return self

    def echo(self):
        # Parallelism never changes results, so it is left out of provenance.
        d = asdict(self)
        for key in ("workers", "out"):
            d.pop(key)
        d["formats"] = sorted(set(self.formats))
        return d


def analysis_grid(n, dt, s0=None, dj=1 / 12):
    s0 = 2 * dt if s0 is None else s0
    if s0 > n * dt:
        raise ConfigError(f"--s0 {s0} exceeds the series span {n * dt}")
    J = int(math.floor(math.log2(n * dt / s0) / dj + 1e-9))
    return ScaleGrid(s0, dj, J)


def _stem(path):
    return Path(path).stem


def _prepare(x, config):
    x = log_returns(x) if config.use_log_returns else normalized_log_price(x)
    require_length(x)
    return standardize(x)


def _provenance(config, paths):
    return {
        "config": config.echo(),
        "version": __version__,
        "inputs": {role: {"path": str(p), "sha256": file_digest(p)} for role, p in paths.items()},
    }


def cmd_transform(config, log=print):
    raw = load_csv(config.input_x, config.column_x, config.date_column, _stem(config.input_x))
    x = TimeSeries(raw.name, raw.values, raw.dates[0], 1.0, tuple(raw.dates))
    x = _prepare(x, config)
    params = MorletParams(config.omega0)
    grid = analysis_grid(len(x), x.dt, config.s0, config.dj)
    W = cwt(x, grid, params)
    bundle = ResultBundle.from_transform(W, x.time_axis(), _provenance(config, {"x": config.input_x}), x.name)
    formats = set(config.formats) - {"svg"}
    written = write_bundle(bundle, config.out, formats)
    peak = int(np.argmax(W.power.mean(axis=1)))
    log(f"{x.name}: {len(x)} points ({raw.dropped} empty rows dropped), {len(grid)} scales")
    log(f"dominant period {W.periods[peak]:.2f} weeks; wrote {len(written)} files to {config.out}")
    return bundle


def cmd_pair(config, log=print):
    if config.input_y is None:
        raise ConfigError("pair needs --input-y")
    rx = load_csv(config.input_x, config.column_x, config.date_column, _stem(config.input_x))
    ry = load_csv(config.input_y, config.column_y, config.date_column, _stem(config.input_y))
    ax, ay = align_weekly(rx, ry)
    x, y = _prepare(ax, config), _prepare(ay, config)
    params = MorletParams(config.omega0)
    grid = analysis_grid(len(x), x.dt, config.s0, config.dj)
    coh = wct(x, y, grid, params)
    sig = mc_significance(x, y, coh, config.n_surrogates, config.alpha, config.seed,
                          workers=config.workers, pool_time=config.pool_time)
    prov = _provenance(config, {"x": config.input_x, "y": config.input_y})
    bundle = ResultBundle.from_pair(coh, sig, x.time_axis(), prov, (x.name, y.name))
    svg = None
    if "svg" in config.formats:
        svg = render_svg(bundle, RenderOptions(colormap=config.colormap))
    written = write_bundle(bundle, config.out, config.formats, svg)

    inside = coh.outside_coi()
    frac = float(sig.significant[inside].mean()) if inside.any() else 0.0
    log(f"{x.name} vs {y.name}: {len(x)} weeks aligned, {ax.gaps} missing weeks skipped, "
        f"{rx.dropped}/{ry.dropped} empty rows dropped")
    log(f"AR(1) null: phi_x={sig.null_x.phi:.3f} phi_y={sig.null_y.phi:.3f}; "
        f"{config.n_surrogates} surrogates, alpha={config.alpha}")
    log(f"significant cells outside COI: {frac:.3%}; wrote {len(written)} files to {config.out}")
    return bundle


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(message)


def build_parser():
    p = _Parser(prog="wavecoh", description="Morlet wavelet coherence of weekly price series.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp):
        sp.add_argument("--input-x", required=True, help="CSV file for the first series")
        sp.add_argument("--column", action="append", default=None,
                        help="value column; give once for both files or twice (x, then y). Default: value")
        sp.add_argument("--date-column", default="date")
        sp.add_argument("--levels", action="store_true",
                        help="analyse normalized log levels instead of log returns")
        sp.add_argument("--s0", type=float, default=None, help="smallest scale in weeks (default 2*dt)")
        sp.add_argument("--dj", type=float, default=1 / 12, help="sub-octave spacing (default 1/12)")
        sp.add_argument("--omega0", type=float, default=6.0)
        sp.add_argument("--out", default="out", help="output directory")
        sp.add_argument("--format", action="append", choices=FORMATS, default=None,
                        help="repeatable; default grid-csv")

    t = sub.add_parser("transform", help="wavelet power of one series")
    common(t)
    pr = sub.add_parser("pair", help="coherence, phase and significance of two series")
    common(pr)
    pr.add_argument("--input-y", required=True, help="CSV file for the second series")
    pr.add_argument("--surrogates", type=int, default=1000)
    pr.add_argument("--alpha", type=float, default=0.05)
    pr.add_argument("--seed", type=int, default=0)
    pr.add_argument("--workers", type=int, default=1, help="threads for the surrogate loop")
    pr.add_argument("--pool-time", action="store_true",
                    help="pool surrogate values over time outside the COI at each scale")
    pr.add_argument("--colormap", default="jet", choices=sorted(_COLORMAPS))
    return p


def config_from_args(args):
    columns = args.column or ["value"]
    if len(columns) > 2:
        raise ConfigError("--column given more than twice")
    kw = dict(
        input_x=args.input_x,
        column_x=columns[0],
        column_y=columns[-1],
        date_column=args.date_column,
        use_log_returns=not args.levels,
        s0=args.s0,
        dj=args.dj,
        omega0=args.omega0,
        out=args.out,
        formats=tuple(args.format or ["grid-csv"]),
    )
    if args.command == "pair":
        kw.update(input_y=args.input_y, n_surrogates=args.surrogates, alpha=args.alpha, seed=args.seed,
                  workers=args.workers, pool_time=args.pool_time, colormap=args.colormap)
    return AnalysisConfig(**kw).validate()


def main(argv=None):
    try:
        args = build_parser().parse_args(argv)
        config = config_from_args(args)
        if args.command == "transform":
            cmd_transform(config)
        else:
            cmd_pair(config)
    except InputError as e:
        print(f"wavecoh: error: {e}", file=sys.stderr)
        return 2
    except ConfigError as e:
        print(f"wavecoh: config error: {e}", file=sys.stderr)
        return 3
    except WavecohError as e:
        print(f"wavecoh: error: {e}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
