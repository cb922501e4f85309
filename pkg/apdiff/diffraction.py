"""Scattering amplitudes, spectra and autocorrelations.

Amplitudes are computed two independent ways: by quadrature over the
internal space (amplitude_dynamical, spectrum) and by averaging over a
finite patch (fourier_bohr_empirical).  The two share nothing below
character evaluation.

The Fourier-Bohr coefficient at xi is the average of
c exp(-2 pi i xi . x) over the atoms.  Since dual characters satisfy
exp(2 pi i xi . l) chi*(l*) = 1, its limit for a deformed weighted
model set is

    a = dens * integral of chi*(y) exp(-2 pi i xi . p(y)) f(y) dm_H(y)

which is what amplitude_dynamical evaluates.

"""

import logging
import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
import numpy as np
from scipy.spatial import cKDTree
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components
from . import apdiffconfig
from .groups import quadrature_rule
from .cps import dual_characters, _region
from .combs import system_fingerprint, _bind, _grow, _inside, _volume
from .errors import PreconditionError, FingerprintMismatch

log = logging.getLogger(__name__)

@dataclass
class SpectrumEntry:
    character: object
    amplitude: complex

    @property
    def intensity(self):
        return abs(self.amplitude) ** 2

    @property
    def label(self):
        return self.character.label

    @property
    def xi(self):
        return self.character.phys_freq

@dataclass
class Spectrum:
    entries: list
    fingerprint: str
    freq_cutoff: float
    label_bound: int
    min_intensity: float
    autocorr_at_zero: float = None
    density: float = None
    phys_dim: int = 1
    label_dim: int = None

    def __len__(self):
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    @property
    def total_intensity(self):
        return float(sum(e.intensity for e in self.entries))

    def entry(self, label):
        label = tuple(label)
        for e in self.entries:
            if e.label == label:
                return e
        return None

@dataclass
class Autocorrelation:
    """eta(z) for the clustered difference vectors z, sorted by z."""
    differences: np.ndarray
    values: np.ndarray
    radius: float
    volume: float

    def __len__(self):
        return len(self.values)

    def __iter__(self):
        return zip(self.differences, self.values)

    def at(self, z, tol=1e-6):
        """eta at the difference nearest z, or 0 if none is within tol."""
        z = np.asarray(z, dtype=float).reshape(-1)
        if not len(self.values):
            return 0j
        dist = np.linalg.norm(self.differences - z, axis=1)
        i = int(np.argmin(dist))
        return complex(self.values[i]) if dist[i] <= tol else 0j

    @property
    def at_zero(self):
        return self.at(np.zeros(self.differences.shape[1]))

def _integrand(chi, f, p):
    xi = chi.phys_freq

    def integrand(y):
        return chi.internal_char(y) * np.exp(-2j * np.pi * (p(y) @ xi)) * f(y)
    return integrand

def amplitude_dynamical(scheme, f, p, chi, rule=None, resolution=None):
    """Scattering amplitude of the deformed weighted model set at the
    dual character chi, by quadrature over the internal space.

    """
    _bind(scheme, f, p)
    if rule is None:
        rule = quadrature_rule(scheme.internal, f.support_box()
                               if len(scheme.internal.euclidean_coords)
                               else None, resolution)
    return scheme.density * rule.integrate(_integrand(chi, f, p))

def sine_modulated_amplitude(m, n, epsilon, alpha, nodes=None):
    """|integral over [0, 1) of exp(2 pi i (n s + (m + alpha n) epsilon
    sin(2 pi s))) ds|^2 by the periodic trapezoid rule.

    """
    z = 2 * math.pi * abs(m + alpha * n) * abs(epsilon)
    if nodes is None:
        nodes = max(512, 16 * (abs(int(n)) + int(math.ceil(z))))
    s = np.arange(nodes) / nodes
    phase = n * s + (m + alpha * n) * epsilon * np.sin(2 * np.pi * s)
    a = np.mean(np.exp(2j * np.pi * phase))
    return float(abs(a) ** 2)

@dataclass
class FourierBohrTrace:
    """Fourier-Bohr averages over a nested sequence of boxes."""
    xi: np.ndarray
    boxes: list
    values: list = field(default_factory=list)

    @property
    def final(self):
        return self.values[-1]

    def __iter__(self):
        return zip(self.boxes, self.values)

def _fb_single(comb, xi, box):
    if not np.all(box[:, 0] >= comb.exhaustive[:, 0] - 1e-9) or \
       not np.all(box[:, 1] <= comb.exhaustive[:, 1] + 1e-9):
        raise PreconditionError(
            "averaging box {} is not inside the exhaustive region {} of the "
            "patch".format(box.tolist(), comb.exhaustive.tolist()))
    keep = _inside(comb.positions, box)
    x = comb.positions[keep]
    total = np.exp(-2j * np.pi * (x @ xi)) @ comb.weights[keep]
    return complex(total / _volume(box))

def fourier_bohr_empirical(comb, xi, window):
    """Average of c exp(-2 pi i xi . x) over the atoms in a closed box.

    window is one box ((d, 2) bounds), giving a complex number, or a
    sequence of boxes, giving a FourierBohrTrace.

    """
    xi = np.asarray(xi, dtype=float).reshape(comb.dim)
    w = np.asarray(window, dtype=float)
    if w.ndim == 3:
        trace = FourierBohrTrace(xi, [_region(b, comb.dim) for b in w])
        for b in trace.boxes:
            trace.values.append(_fb_single(comb, xi, b))
        return trace
    return _fb_single(comb, xi, _region(w, comb.dim))

def _sort_key(entry):
    return (-float("{:.12g}".format(entry.intensity)), entry.label)

def spectrum(scheme, f, p, freq_cutoff, label_bound, min_intensity=0.0,
             resolution=None, threads=None):
    """Amplitudes at every dual character found within the cutoffs,
    keeping those with intensity >= min_intensity, strongest first.

    """
    _bind(scheme, f, p)
    if min_intensity < 0:
        raise PreconditionError("min_intensity must not be negative")
    chars = dual_characters(scheme, freq_cutoff, label_bound)
    rule = quadrature_rule(scheme.internal, f.support_box()
                           if len(scheme.internal.euclidean_coords) else None,
                           resolution)
    workers = max(1, threads or apdiffconfig.threads)
    with ThreadPoolExecutor(max_workers=workers) as ex:
        amps = list(ex.map(
            lambda chi: scheme.density * rule.integrate(_integrand(chi, f, p)),
            chars))
    entries = [SpectrumEntry(chi, a) for chi, a in zip(chars, amps)]
    entries = [e for e in entries if e.intensity >= min_intensity]
    entries.sort(key=_sort_key)
    eta0 = scheme.density * rule.integrate(lambda y: np.abs(f(y)) ** 2).real
    fp = system_fingerprint(scheme, f, p)
    log.info("spectrum: %d of %d characters kept, fingerprint %s",
             len(entries), len(chars), fp[:12])
    return Spectrum(entries, fp, freq_cutoff, label_bound, min_intensity,
                    eta0, scheme.density, scheme.phys_dim,
                    scheme.rank + len(scheme.internal.torus_coords)
                    + len(scheme.internal.cyclic_coords))

def _cluster(z, tol):
    """Class index of each row of z, rows within tol of each other
    (transitively) sharing a class."""
    uniq, inverse = np.unique(z, axis=0, return_inverse=True)
    n = len(uniq)
    pairs = cKDTree(uniq).query_pairs(tol, output_type='ndarray')
    graph = coo_matrix((np.ones(len(pairs)), (pairs[:, 0], pairs[:, 1])),
                       shape=(n, n))
    ncl, cl = connected_components(graph, directed=False)
    return ncl, cl[inverse.ravel()]

def autocorrelation(comb, max_radius, bin_tol=1e-9):
    """eta(z) = (1 / vol) sum over pairs with x - y = z of c_x conj(c_y).

    x runs over the atoms of the exhaustive region eroded by max_radius
    and vol is the volume of that eroded region.

    """
    if max_radius <= 0:
        raise PreconditionError("radius must be positive")
    half = (comb.exhaustive[:, 1] - comb.exhaustive[:, 0]) / 2
    if np.any(max_radius >= half):
        raise PreconditionError(
            "radius {} is not below the patch half-width {}".format(
                max_radius, float(np.min(half))))
    inner = _grow(comb.exhaustive, -max_radius)
    idx = np.flatnonzero(_inside(comb.positions, inner))
    vol = _volume(inner)
    d = comb.dim
    if not len(idx):
        return Autocorrelation(np.zeros((0, d)), np.zeros(0, dtype=complex),
                               max_radius, vol)
    tree = cKDTree(comb.positions)
    nbrs = tree.query_ball_point(comb.positions[idx], max_radius)
    counts = np.fromiter((len(n) for n in nbrs), dtype=np.int64,
                         count=len(nbrs))
    j = np.fromiter(itertools.chain.from_iterable(nbrs), dtype=np.int64,
                    count=int(counts.sum()))
    i = np.repeat(idx, counts)
    z = comb.positions[i] - comb.positions[j]
    v = comb.weights[i] * np.conj(comb.weights[j])
    ncl, cl = _cluster(z, bin_tol)
    values = np.zeros(ncl, dtype=complex)
    np.add.at(values, cl, v)
    centers = np.zeros((ncl, d))
    np.add.at(centers, cl, z)
    centers /= np.bincount(cl, minlength=ncl)[:, None]
    order = np.lexsort(centers.T[::-1])
    log.debug("autocorrelation: %d pairs in %d classes", len(z), ncl)
    return Autocorrelation(centers[order], values[order] / vol, max_radius,
                           vol)

@dataclass
class ParsevalReport:
    peaks: int
    raw_total: float
    mean_per_peak: float
    eta0: float
    eta0_empirical: float
    probe_halfwidth: float
    captured: float
    deviations: list

def _probe_transform(xi, h):
    return np.prod(h * np.sinc(h * np.asarray(xi)) ** 2)

def parseval_report(spectrum, comb, top=9, probe_halfwidth=None):
    """Compare a spectrum with the comb it describes.

    captured is the share of eta(0) ||psi||^2 recovered by
    sum |a|^2 |psi^(xi)|^2, for psi a unit-height tent narrow enough
    that psi * psi~ only sees the z = 0 term of the autocorrelation; it
    never exceeds 1 and tends to 1 as the cutoffs grow.  deviations
    lists (label, dynamical amplitude, empirical amplitude) for the
    strongest peaks.

    """
    if spectrum.fingerprint is None or \
       spectrum.fingerprint != comb.fingerprint:
        raise FingerprintMismatch(
            "spectrum and comb describe different systems")
    if probe_halfwidth is None:
        sep = comb.min_separation()
        if not np.isfinite(sep):
            raise PreconditionError("need at least two atoms for a probe")
        probe_halfwidth = 0.45 * sep
    h = probe_halfwidth
    d = spectrum.phys_dim
    norm2 = (2 * h / 3) ** d
    eta0 = spectrum.autocorr_at_zero
    weighted = sum(e.intensity * _probe_transform(e.xi, h) ** 2
                   for e in spectrum)
    raw = spectrum.total_intensity
    emp0 = float(np.sum(np.abs(comb.weights[_inside(
        comb.positions, comb.exhaustive)]) ** 2) / comb.exhaustive_volume)
    deviations = []
    for e in spectrum.entries[:top]:
        emp = fourier_bohr_empirical(comb, e.xi, comb.exhaustive)
        deviations.append((e.label, e.amplitude, emp))
    return ParsevalReport(len(spectrum), raw,
                          raw / len(spectrum) if len(spectrum) else 0.0,
                          eta0, emp0, h, weighted / (eta0 * norm2),
                          deviations)
