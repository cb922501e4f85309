"""File formats: point patches, spectra and report tables.

All floats are written with apdiffconfig.fmt(); rows come out in a
fixed order, so the same inputs give the same bytes.

"""

import os
import csv
import json
import logging
import numpy as np
from . import apdiffconfig
from .combs import WeightedComb
from .errors import ConfigError, PreconditionError

log = logging.getLogger(__name__)

fmt = apdiffconfig.fmt

def _writer(f):
    return csv.writer(f, lineterminator="\n")

def _label_text(label):
    return ":".join(str(int(x)) for x in label)

def write_points(f, comb):
    w = _writer(f)
    w.writerow(["x_{}".format(i + 1) for i in range(comb.dim)]
               + ["re_weight", "im_weight", "k_label"])
    for i in range(len(comb)):
        label = "" if comb.labels is None else _label_text(comb.labels[i])
        w.writerow([fmt(x) for x in comb.positions[i]]
                   + [fmt(comb.weights[i].real), fmt(comb.weights[i].imag),
                      label])

def points_metadata(comb):
    """Patch regions, for the sidecar of a points file."""
    return {"region": comb.region.tolist(),
            "exhaustive": comb.exhaustive.tolist(),
            "fingerprint": comb.fingerprint}

def read_points(filename):
    """Read a points file.  Regions come from the sidecar written next
    to it when there is one, otherwise from the bounding box of the
    atoms.

    """
    try:
        with open(filename, newline="") as f:
            rows = list(csv.reader(f))
    except OSError as e:
        raise ConfigError("{}: {}".format(filename, e.strerror))
    if not rows:
        raise ConfigError("{}: missing header row".format(filename))
    header = rows[0]
    xcols = [i for i, h in enumerate(header) if h.startswith("x_")]
    if not xcols or "re_weight" not in header:
        raise ConfigError("{}: header must name x_1.. and re_weight".format(
            filename))
    re_col = header.index("re_weight")
    im_col = header.index("im_weight") if "im_weight" in header else None
    k_col = header.index("k_label") if "k_label" in header else None
    positions = []
    weights = []
    labels = []
    for lineno, row in enumerate(rows[1:], start=2):
        if not row:
            continue
        try:
            positions.append([float(row[i]) for i in xcols])
            weights.append(complex(float(row[re_col]),
                                   float(row[im_col]) if im_col is not None
                                   else 0.0))
            if k_col is not None and row[k_col]:
                labels.append([int(x) for x in row[k_col].split(":")])
        except (ValueError, IndexError):
            raise ConfigError("{} line {}: malformed row".format(
                filename, lineno))
    if not positions:
        raise PreconditionError("{}: no atoms".format(filename))
    positions = np.array(positions)
    meta = {}
    if os.path.exists(filename + ".meta.json"):
        with open(filename + ".meta.json") as f:
            meta = json.load(f)
    bbox = np.column_stack([positions.min(axis=0), positions.max(axis=0)])
    region = meta.get("region", bbox)
    exhaustive = meta.get("exhaustive", region)
    if len(labels) != len(positions):
        labels = None
    log.info("read %d atoms from %s", len(positions), filename)
    return WeightedComb(positions, weights, region, exhaustive, labels,
                        meta.get("fingerprint"))

def write_spectrum(f, spectrum):
    w = _writer(f)
    nlabel = spectrum.label_dim
    if nlabel is None:
        nlabel = len(spectrum.entries[0].label) if spectrum.entries else 0
    w.writerow(["label_{}".format(i + 1) for i in range(nlabel)]
               + ["xi_{}".format(i + 1) for i in range(spectrum.phys_dim)]
               + ["re_amp", "im_amp", "intensity"])
    for e in spectrum:
        w.writerow([str(x) for x in e.label] + [fmt(x) for x in e.xi]
                   + [fmt(e.amplitude.real), fmt(e.amplitude.imag),
                      fmt(e.intensity)])

def spectrum_document(spectrum):
    return {
        "fingerprint": spectrum.fingerprint,
        "cutoffs": {"freq_cutoff": spectrum.freq_cutoff,
                    "label_bound": spectrum.label_bound,
                    "min_intensity": spectrum.min_intensity},
        "density": spectrum.density,
        "autocorr_at_zero": spectrum.autocorr_at_zero,
        "total_intensity": spectrum.total_intensity,
        "entries": [{"label": list(e.label),
                     "xi": [float(x) for x in e.xi],
                     "amplitude": [e.amplitude.real, e.amplitude.imag],
                     "intensity": e.intensity} for e in spectrum],
    }

def write_table(f, header, rows):
    """A report table; floats formatted, everything else as str()."""
    w = _writer(f)
    w.writerow(header)
    for row in rows:
        w.writerow([fmt(v) if isinstance(v, (float, np.floating))
                    else str(v) for v in row])
