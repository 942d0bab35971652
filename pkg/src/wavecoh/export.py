"""Grid files (CSV, JSON) for transform and coherence results."""

from __future__ import annotations

import hashlib
import json
import os
import tempfile
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .coherence import CoherenceField
from .significance import SignificanceField


def fmt(v):
    return format(float(v), ".9g")


@dataclass
class ResultBundle:
    """Everything one analysis produced, plus where it came from.

    ``fields`` maps an output name (``r2``, ``phase``, ``power``,
    ``percentile``, ``mask``) to a ``(scales, time)`` array.
    """

    fields: dict
    dates: tuple
    scales: np.ndarray
    periods: np.ndarray
    coi: np.ndarray
    coi_period: np.ndarray
    provenance: dict = field(default_factory=dict)
    coherence: CoherenceField | None = None
    significance: SignificanceField | None = None
    names: tuple = ("x", "y")

    @classmethod
    def from_pair(cls, coh, sig, dates, provenance=None, names=("x", "y")):
        fields = {
            "r2": coh.r2,
            "phase": coh.phase,
            "power": coh.cross_power,
        }
        if sig is not None:
            fields["percentile"] = sig.percentile
            fields["mask"] = sig.significant
        factor = coh.params.period_factor
        return cls(fields, tuple(dates), coh.scales, coh.periods, coh.coi, coh.coi * factor,
                   provenance or {}, coh, sig, tuple(names))

    @classmethod
    def from_transform(cls, W, dates, provenance=None, name="x"):
        factor = W.params.period_factor
        return cls({"power": W.power}, tuple(dates), W.scales, W.periods, W.coi, W.coi * factor,
                   provenance or {}, names=(name,))

    def outside_coi(self):
        return self.scales[:, None] <= self.coi[None, :]


def file_digest(path):
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for block in iter(lambda: fh.read(1 << 16), b""):
            h.update(block)
    return h.hexdigest()


def atomic_write(path, text):
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _cell(v):
    if isinstance(v, (bool, np.bool_)):
        return "1" if v else "0"
    return fmt(v)


def grid_csv(values, dates, periods):
    """CSV text: header of ISO dates, one row per Fourier period."""
    values = np.asarray(values)
    lines = ["period," + ",".join(d.isoformat() for d in dates)]
    for p, row in zip(periods, values):
        lines.append(fmt(p) + "," + ",".join(_cell(v) for v in row))
    return "\n".join(lines) + "\n"


def coi_csv(bundle):
    lines = ["date,coi_scale,coi_period"]
    for d, s, p in zip(bundle.dates, bundle.coi, bundle.coi_period):
        lines.append(f"{d.isoformat()},{fmt(s)},{fmt(p)}")
    return "\n".join(lines) + "\n"


def axes_csv(bundle):
    lines = ["index,scale,period"]
    for j, (s, p) in enumerate(zip(bundle.scales, bundle.periods)):
        lines.append(f"{j},{fmt(s)},{fmt(p)}")
    return "\n".join(lines) + "\n"


def _json_values(a):
    a = np.asarray(a)
    if a.dtype == bool:
        return a.astype(int).tolist()
    return [[float(fmt(v)) for v in row] for row in a] if a.ndim == 2 else [float(fmt(v)) for v in a]


def grid_json(bundle):
    doc = {
        "axes": {
            "time": [d.isoformat() for d in bundle.dates],
            "scale": _json_values(bundle.scales),
            "period": _json_values(bundle.periods),
        },
        "coi": {"scale": _json_values(bundle.coi), "period": _json_values(bundle.coi_period)},
        "fields": {name: _json_values(v) for name, v in bundle.fields.items()},
        "provenance": bundle.provenance,
    }
    return json.dumps(doc, indent=1, sort_keys=True) + "\n"


def write_bundle(bundle, out_dir, formats, svg_text=None):
    """Write the requested formats into ``out_dir``; returns the written paths.

    Every file is rendered to text first, so a failure leaves no partial
    output behind.
    """
    out_dir = Path(out_dir)
    files = {}
    if "grid-csv" in formats:
        for name, values in bundle.fields.items():
            files[f"{name}.csv"] = grid_csv(values, bundle.dates, bundle.periods)
        files["coi.csv"] = coi_csv(bundle)
        files["axes.csv"] = axes_csv(bundle)
    if "grid-json" in formats:
        files["result.json"] = grid_json(bundle)
    if "svg" in formats and svg_text is not None:
        files["coherence.svg"] = svg_text
    files["provenance.json"] = json.dumps(bundle.provenance, indent=1, sort_keys=True) + "\n"

    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    for name in sorted(files):
        atomic_write(out_dir / name, files[name])
        written.append(out_dir / name)
    return written
