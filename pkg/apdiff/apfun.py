"""Almost periodic functions on R^d, represented as trigonometric
polynomials.

An ApFunction is either a complex scalar function (a weight w) or a
real R^m-valued function (a displacement g, m = d).  Each output
coordinate is a finite sum of terms c * exp(2 pi i omega . x).
Frequencies may carry an exact rational value alongside the float;
exactness is what full_periodicity_on_lattice relies on.

"""

import logging
import math
import functools
from dataclasses import dataclass, field
from fractions import Fraction
import numpy as np
from . import apdiffconfig
from .errors import StructuralError, PreconditionError, \
    NumericalInvariantError

log = logging.getLogger(__name__)

def _as_points(x, dim):
    """Normalise evaluation points to an (N, dim) array.

    Returns the array and the batch shape of the input (an empty tuple
    for a single point).

    """
    x = np.asarray(x, dtype=float)
    if dim == 1:
        if x.ndim == 0:
            return x.reshape(1, 1), ()
        if x.ndim == 1:
            return x.reshape(-1, 1), x.shape
        if x.shape[-1] == 1:
            return x.reshape(-1, 1), x.shape[:-1]
    elif x.shape[-1:] == (dim,):
        return x.reshape(-1, dim), x.shape[:-1]
    raise StructuralError(
        "cannot evaluate a function on R^{} at points of shape {}".format(
            dim, x.shape))

def _frequency(freq, dim):
    """Float row and exact row (or None) for a frequency given as a
    number or sequence of numbers, Fractions or 'p/q' strings.

    """
    items = list(np.ravel(np.array(freq, dtype=object)))
    if len(items) != dim:
        raise StructuralError(
            "frequency {!r} does not have {} components".format(freq, dim))
    values = []
    exact = []
    for v in items:
        if isinstance(v, str):
            try:
                v = Fraction(v)
            except ValueError:
                raise StructuralError("bad frequency {!r}".format(v))
        values.append(v)
        exact.append(v if isinstance(v, (int, Fraction)) else None)
    row = np.array([float(v) for v in values])
    if any(e is None for e in exact):
        return row, None
    return row, tuple(Fraction(e) for e in exact)

class Terms:
    """One output coordinate: frequency rows and coefficients."""
    def __init__(self, dim, terms=()):
        merged = {}
        for freq, coeff in terms:
            row, exact = _frequency(freq, dim)
            key = tuple(row)
            if key in merged:
                old = merged[key]
                merged[key] = (row, old[1] if old[1] is not None else exact,
                               old[2] + complex(coeff))
            else:
                merged[key] = (row, exact, complex(coeff))
        kept = [v for k, v in sorted(merged.items()) if v[2] != 0]
        self.dim = dim
        self.freqs = np.array([v[0] for v in kept]).reshape(-1, dim)
        self.exact = [v[1] for v in kept]
        self.coeffs = np.array([v[2] for v in kept], dtype=complex)

    def __len__(self):
        return len(self.coeffs)

    def items(self):
        for i in range(len(self)):
            freq = self.exact[i] if self.exact[i] is not None \
                else self.freqs[i]
            yield freq, self.coeffs[i]

    def evaluate(self, pts):
        if not len(self):
            return np.zeros(len(pts), dtype=complex)
        return np.exp(2j * np.pi * (pts @ self.freqs.T)) @ self.coeffs

    def is_conjugate_symmetric(self, tol=1e-12):
        table = {tuple(r): c for r, c in zip(self.freqs, self.coeffs)}
        for r, c in zip(self.freqs, self.coeffs):
            partner = table.get(tuple(-r + 0.0))
            if partner is None or abs(partner - np.conj(c)) > \
               tol * max(1.0, abs(c)):
                return False
        return True

    def twisted(self, t):
        phase = np.exp(-2j * np.pi * (self.freqs @ t))
        out = Terms(self.dim)
        out.freqs = self.freqs
        out.exact = list(self.exact)
        out.coeffs = self.coeffs * phase
        return out

    def to_config(self):
        freqs = []
        for row, exact in zip(self.freqs, self.exact):
            if exact is not None:
                freqs.append(["{}".format(f) if f.denominator != 1
                              else int(f) for f in exact])
            else:
                freqs.append([float(v) for v in row])
        return {"frequencies": freqs,
                "coefficients": [[float(c.real), float(c.imag)]
                                 for c in self.coeffs]}

class ApFunction:
    """A trigonometric polynomial on R^dim.

    real=False: one complex output coordinate.  real=True: real output
    coordinates, each conjugate symmetric.

    """
    def __init__(self, dim, components, real=False):
        self.dim = int(dim)
        self.real = real
        self.components = tuple(c if isinstance(c, Terms)
                                else Terms(self.dim, c) for c in components)
        if not self.components:
            raise StructuralError("a function needs at least one output")
        if not real and len(self.components) != 1:
            raise StructuralError("complex functions are scalar")
        if real:
            for i, c in enumerate(self.components):
                if not c.is_conjugate_symmetric():
                    raise StructuralError(
                        "output coordinate {} of a real function is not "
                        "conjugate symmetric".format(i))

    @classmethod
    def scalar(cls, dim, terms=()):
        return cls(dim, [terms])

    @classmethod
    def constant(cls, dim, value):
        return cls(dim, [[((0,) * dim, value)]])

    @classmethod
    def displacement(cls, dim, components=None):
        """A real R^dim-valued function; components default to zero."""
        if components is None:
            components = [[] for _ in range(dim)]
        if len(components) != dim:
            raise StructuralError(
                "a displacement on R^{} needs {} components".format(dim, dim))
        return cls(dim, components, real=True)

    @property
    def out_dim(self):
        return len(self.components)

    @property
    def is_zero(self):
        return all(len(c) == 0 for c in self.components)

    def __call__(self, x):
        pts, batch = _as_points(x, self.dim)
        values = np.stack([c.evaluate(pts) for c in self.components], axis=-1)
        if self.real:
            bound = max([1.0] + [float(np.abs(c.coeffs).sum())
                                 for c in self.components])
            residue = float(np.max(np.abs(values.imag))) if values.size else 0.0
            if residue > 1e-12 * bound:
                raise NumericalInvariantError(
                    "imaginary residue {:.3g} in a real function".format(
                        residue))
            values = values.real
            return values.reshape(batch + (self.out_dim,))
        return values[:, 0].reshape(batch) if batch else complex(values[0, 0])

    def translate(self, t):
        """T_t f, that is x -> f(x - t)."""
        t = np.asarray(t, dtype=float).reshape(self.dim)
        out = object.__new__(ApFunction)
        out.dim = self.dim
        out.real = self.real
        out.components = tuple(c.twisted(t) for c in self.components)
        return out

    def __add__(self, other):
        if not isinstance(other, ApFunction) or other.dim != self.dim \
           or other.real != self.real or other.out_dim != self.out_dim:
            raise StructuralError("cannot add functions of different shapes")
        return ApFunction(self.dim, [list(a.items()) + list(b.items())
                                     for a, b in zip(self.components,
                                                     other.components)],
                          real=self.real)

    def sup_bound(self):
        """Per-coordinate upper bound sum |c| on |f|."""
        return np.array([float(np.abs(c.coeffs).sum())
                         for c in self.components])

    def sup_norm_bound(self):
        return float(np.linalg.norm(self.sup_bound()))

    def frequency_rows(self):
        """Distinct nonzero frequency rows over all outputs, each with its
        exact form (or None).

        """
        rows = {}
        for c in self.components:
            for row, exact in zip(c.freqs, c.exact):
                if np.any(row != 0):
                    key = tuple(row)
                    if rows.get(key) is None:
                        rows[key] = exact
        return [(np.array(k), rows[k]) for k in sorted(rows)]

    def unit_cell(self):
        """Reciprocal of the smallest nonzero frequency magnitude."""
        rows = [np.linalg.norm(r) for r, _ in self.frequency_rows()]
        return 1.0 / min(rows) if rows else 1.0

    def sup_estimate(self, sample_grid=None):
        """Sampled lower-bound estimate of sup |f|."""
        grid = default_sample_grid(self) if sample_grid is None \
            else sample_grid
        v = self(grid)
        if self.real:
            return float(np.max(np.linalg.norm(v, axis=-1)))
        return float(np.max(np.abs(v)))

    def to_config(self):
        if not self.real:
            return self.components[0].to_config()
        return {"components": [c.to_config() for c in self.components]}

    def __repr__(self):
        return "ApFunction(dim={}, out={}, real={}, terms={})".format(
            self.dim, self.out_dim, self.real,
            [len(c) for c in self.components])

def tone_terms(amp, freq, phase=0.0, shape="sin"):
    """Terms of amp * sin(2 pi freq . x + phase) (or cos), as a
    conjugate pair.

    """
    items = list(np.ravel(np.array(freq, dtype=object)))
    neg = []
    for v in items:
        if isinstance(v, str):
            try:
                v = Fraction(v)
            except ValueError:
                raise StructuralError("bad frequency {!r}".format(v))
        neg.append(-v)
    e = np.exp(1j * phase)
    if shape == "sin":
        c = amp * e / 2j
    elif shape == "cos":
        c = amp * e / 2
    else:
        raise StructuralError("unknown tone shape {!r}".format(shape))
    cneg = np.conj(c)
    return [(items, c), (neg, cneg)]

def evaluate(f, x):
    return f(x)

class ComposedDisplacement:
    """x -> g(x) + g'(x + g(x))."""
    real = True

    def __init__(self, g, g_prime):
        if g.dim != g_prime.dim or g.out_dim != g.dim \
           or g_prime.out_dim != g.dim:
            raise StructuralError("displacements of different dimensions")
        self.g = g
        self.g_prime = g_prime
        self.dim = g.dim
        self.out_dim = g.dim

    def __call__(self, x):
        pts, batch = _as_points(x, self.dim)
        gx = self.g(pts)
        return (gx + self.g_prime(pts + gx)).reshape(batch + (self.dim,))

    def translate(self, t):
        return ComposedDisplacement(self.g.translate(t),
                                    self.g_prime.translate(t))

    def sup_bound(self):
        return self.g.sup_bound() + self.g_prime.sup_bound()

    def sup_norm_bound(self):
        return float(np.linalg.norm(self.sup_bound()))

    def to_config(self):
        return {"composed": [self.g.to_config(), self.g_prime.to_config()]}

class ComposedWeight:
    """x -> w(x) * w'(x + g(x)), the weight of a modulation by (w, g)
    followed by one by (w', g')."""
    real = False
    out_dim = 1

    def __init__(self, w, w_prime, g):
        if not (w.dim == w_prime.dim == g.dim):
            raise StructuralError("weight and displacement dimensions differ")
        if getattr(w, "real", False) or getattr(w_prime, "real", False):
            raise StructuralError("weights are complex scalar functions")
        self.w = w
        self.w_prime = w_prime
        self.g = g
        self.dim = w.dim

    def __call__(self, x):
        pts, batch = _as_points(x, self.dim)
        v = np.asarray(self.w(pts)) * np.asarray(self.w_prime(pts + self.g(pts)))
        return v.reshape(batch) if batch else complex(v[0])

    def translate(self, t):
        return ComposedWeight(self.w.translate(t), self.w_prime.translate(t),
                              self.g.translate(t))

    def to_config(self):
        return {"composed": [self.w.to_config(), self.w_prime.to_config(),
                             self.g.to_config()]}

def compose_modulation(g, g_prime):
    return ComposedDisplacement(g, g_prime)

def compose_weight(w, w_prime, g):
    return ComposedWeight(w, w_prime, g)

def default_sample_grid(f, count=None):
    """Sample points covering one unit cell of f's frequency module."""
    count = count or apdiffconfig.sample_points
    cell = f.unit_cell() if hasattr(f, "unit_cell") else 1.0
    per_axis = max(2, int(round(count ** (1.0 / f.dim))))
    axis = np.arange(per_axis) * (cell / per_axis)
    grids = np.meshgrid(*([axis] * f.dim), indexing='ij')
    return np.stack([g.ravel() for g in grids], axis=-1)

@dataclass
class PeriodReport:
    epsilon: float
    periods: np.ndarray
    max_gap: float
    direction: np.ndarray = None
    scan_step: float = None
    rejected: np.ndarray = field(default_factory=lambda: np.zeros(0))

    @property
    def relative_density_witness(self):
        return self.max_gap

    def __len__(self):
        return len(self.periods)

def _gaps(periods):
    if len(periods) < 2:
        return np.inf
    return float(np.max(np.diff(periods)))

def sup_differences(f, ts, grid, direction):
    """sup over the grid of |f(x - t d) - f(x)| for each t."""
    ts = np.asarray(ts, dtype=float)
    grid = np.asarray(grid, dtype=float).reshape(-1, f.dim)
    out = np.empty(len(ts))
    if isinstance(f, ApFunction):
        step = max(1, int(4_000_000 // max(1, len(grid))))
        for s in range(0, len(ts), step):
            chunk = ts[s:s + step]
            total = np.zeros((len(grid), len(chunk)))
            for c in f.components:
                if not len(c):
                    continue
                E = np.exp(2j * np.pi * (grid @ c.freqs.T))
                D = (np.exp(-2j * np.pi * np.outer(c.freqs @ direction, chunk))
                     - 1) * c.coeffs[:, None]
                total += np.abs(E @ D) ** 2
            out[s:s + step] = np.sqrt(total.max(axis=0))
        return out
    base = np.asarray(f(grid))
    for i, t in enumerate(ts):
        diff = np.asarray(f(grid - t * direction)) - base
        diff = diff.reshape(len(grid), -1)
        out[i] = float(np.max(np.linalg.norm(diff, axis=-1)))
    return out

def almost_periods(f, epsilon, scan_range, scan_step, sample_grid=None,
                   direction=None):
    """Scan t = 0, step, 2 step, ... <= T along 'direction' and keep the
    t with sup-sample |f(x - t) - f(x)| <= epsilon.

    Nothing is claimed about t between grid points, or about x off the
    sample grid.

    """
    T = scan_range[1] if np.ndim(scan_range) else scan_range
    if epsilon <= 0 or scan_step <= 0:
        raise PreconditionError("epsilon and scan step must be positive")
    if T <= 0 or T < scan_step:
        raise PreconditionError("empty scan range")
    if direction is None:
        direction = np.eye(f.dim)[0]
    direction = np.asarray(direction, dtype=float).reshape(f.dim)
    grid = default_sample_grid(f) if sample_grid is None else sample_grid
    n = int(math.floor(T / scan_step + 1e-9)) + 1
    ts = np.arange(n) * scan_step
    sups = sup_differences(f, ts, grid, direction)
    periods = ts[sups <= epsilon]
    log.debug("almost periods: %d of %d grid values within %g",
              len(periods), n, epsilon)
    return PeriodReport(epsilon, periods, _gaps(periods), direction,
                        scan_step, ts[sups > epsilon])

def verify_periods(f, report, sample_grid, slack=1e-9):
    """Re-check every period of a report on another sample grid."""
    sups = sup_differences(f, report.periods, sample_grid, report.direction)
    return bool(np.all(sups <= report.epsilon + slack))

def _lcm(a, b):
    return a * b // math.gcd(a, b)

def rationalize(value, max_denominator=None):
    """Exact rational for an int, Fraction, 'p/q' string or float that is
    within 1e-10 of a fraction with bounded denominator; None otherwise.

    """
    if isinstance(value, (int, Fraction)):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value)
    if max_denominator is None:
        max_denominator = apdiffconfig.max_denominator
    f = Fraction(float(value)).limit_denominator(max_denominator)
    if abs(float(f) - float(value)) <= 1e-10 * max(1.0, abs(float(value))):
        return f
    return None

def _exact_basis(gamma_basis):
    rows = []
    for row in np.array(gamma_basis, dtype=object).reshape(
            len(gamma_basis), -1):
        exact = [rationalize(v) for v in row]
        if any(e is None for e in exact):
            return None
        rows.append(exact)
    return rows

def incommensurate_frequency(g, gamma_basis):
    """The first frequency row of g that is not rational on Gamma, or
    None.

    """
    basis = _exact_basis(gamma_basis)
    for row, exact in g.frequency_rows():
        if exact is None or basis is None:
            return row
    return None

def lattice_basis(rows, d):
    """Upper triangular basis, with positive diagonal, of the integer
    lattice spanned by 'rows'.

    """
    rows = [list(r) for r in rows if any(r)]
    basis = []
    for col in range(d):
        while True:
            nz = [r for r in rows if r[col] != 0]
            if len(nz) <= 1:
                break
            nz.sort(key=lambda r: abs(r[col]))
            p = nz[0]
            for r in nz[1:]:
                q = r[col] // p[col]
                for j in range(d):
                    r[j] -= q * p[j]
            rows = [r for r in rows if any(r)]
        pivot = [r for r in rows if r[col] != 0]
        if not pivot:
            raise StructuralError("lattice generators are not of full rank")
        p = pivot[0]
        if p[col] < 0:
            p = [-x for x in p]
        basis.append(p)
        rows = [r for r in rows if r is not pivot[0]]
    return basis

@dataclass
class Periodicity:
    """A sublattice L of Gamma given by integer coefficients over the
    Gamma basis (upper triangular rows) and as physical vectors.

    """
    coefficients: list
    basis: np.ndarray

    @property
    def index(self):
        return functools.reduce(lambda a, b: a * b,
                                (self.coefficients[i][i]
                                 for i in range(len(self.coefficients))), 1)

    def coset_representatives(self):
        """Integer vectors e with 0 <= e_j < C_jj, one per coset of L in
        Gamma.

        """
        d = len(self.coefficients)
        axes = [np.arange(self.coefficients[i][i]) for i in range(d)]
        grids = np.meshgrid(*axes, indexing='ij')
        return np.stack([g.ravel() for g in grids], axis=-1).astype(np.int64)

# Residue boxes larger than this fall back to the diagonal sublattice
MAX_RESIDUE_BOX = 1_000_000

def full_periodicity_on_lattice(g, gamma_basis):
    """The sublattice L of Gamma on whose cosets g is constant, if every
    frequency of g is an exact rational on Gamma; None otherwise.

    """
    basis = _exact_basis(gamma_basis)
    d = g.dim
    if basis is None:
        log.info("lattice basis is not rational; no full periodicity")
        return None
    products = []
    for row, exact in g.frequency_rows():
        if exact is None:
            log.info("frequency %s is not declared rational", row.tolist())
            return None
        products.append([sum(w * b for w, b in zip(exact, bj))
                         for bj in basis])
    q = [functools.reduce(_lcm, (p[j].denominator for p in products), 1)
         for j in range(d)]
    generators = [[q[j] if i == j else 0 for i in range(d)]
                  for j in range(d)]
    if d > 1 and np.prod([float(x) for x in q]) <= MAX_RESIDUE_BOX:
        axes = [np.arange(x) for x in q]
        for k in np.stack([a.ravel() for a in np.meshgrid(
                *axes, indexing='ij')], axis=-1):
            k = [int(x) for x in k]
            if any(k) and all(sum(kj * pj for kj, pj in zip(k, p))
                              .denominator == 1 for p in products):
                generators.append(k)
    coeffs = lattice_basis(generators, d)
    B = np.array([[float(x) for x in row] for row in basis])
    return Periodicity(coeffs, np.array(coeffs, dtype=float) @ B)
