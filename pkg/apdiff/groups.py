"""Internal spaces.

An internal space is a finite product of Euclidean spaces, tori and
finite cyclic groups.  Points and characters are stored as flat
coordinate vectors in factor order; a point may also hold a batch of
points (coordinate array of shape (N, ncoords)), which is how
integrands are evaluated at quadrature nodes.

Haar measure is Lebesgue measure on Euclidean factors, the probability
measure on tori, and normalised counting measure (total mass 1) on
cyclic factors.

"""

import logging
import math
import numpy as np
from numpy.polynomial.legendre import leggauss
from . import apdiffconfig
from .errors import StructuralError, PreconditionError

log = logging.getLogger(__name__)

class Factor:
    kind = None

    def __init__(self, size):
        if int(size) != size or size < 1:
            raise StructuralError(
                "{} factor needs a positive integer size, not {!r}".format(
                    self.kind, size))
        self.size = int(size)

    def __eq__(self, other):
        return type(self) is type(other) and self.size == other.size

    def __hash__(self):
        return hash((self.kind, self.size))

    def __repr__(self):
        return "{}({})".format(type(self).__name__, self.size)

class Euclidean(Factor):
    kind = "euclidean"

    @property
    def ncoords(self):
        return self.size

    modulus = 0

    def to_config(self):
        return {"type": "euclidean", "dim": self.size}

class Torus(Factor):
    kind = "torus"

    @property
    def ncoords(self):
        return self.size

    modulus = 1

    def to_config(self):
        return {"type": "torus", "dim": self.size}

class Cyclic(Factor):
    kind = "cyclic"
    ncoords = 1

    @property
    def order(self):
        return self.size

    @property
    def modulus(self):
        return self.size

    def to_config(self):
        return {"type": "cyclic", "order": self.size}

def reduce_torus(x):
    """Reduce modulo 1 to the half-open interval [0, 1)."""
    r = np.mod(x, 1.0)
    return np.where(r >= 1.0, 0.0, r)

class InternalSpace:
    """A finite product of Euclidean, torus and cyclic factors."""
    def __init__(self, factors):
        self._factors = tuple(factors)
        if not self._factors:
            raise StructuralError("an internal space needs at least one factor")
        for f in self._factors:
            if not isinstance(f, Factor):
                raise StructuralError("{!r} is not a factor".format(f))
        self._slices = []
        kinds = []
        moduli = []
        start = 0
        for f in self._factors:
            self._slices.append(slice(start, start + f.ncoords))
            start += f.ncoords
            kinds.extend([f.kind] * f.ncoords)
            moduli.extend([f.modulus] * f.ncoords)
        self.ncoords = start
        self.kinds = tuple(kinds)
        self.moduli = np.array(moduli, dtype=float)
        self.moduli.setflags(write=False)

    @property
    def factors(self):
        return self._factors

    def factor_slice(self, i):
        return self._slices[i]

    def _indices(self, kind):
        return np.array([i for i, k in enumerate(self.kinds) if k == kind],
                        dtype=int)

    @property
    def euclidean_coords(self):
        return self._indices("euclidean")

    @property
    def torus_coords(self):
        return self._indices("torus")

    @property
    def cyclic_coords(self):
        return self._indices("cyclic")

    @property
    def is_compact(self):
        return len(self.euclidean_coords) == 0

    def reduce(self, coords):
        """Reduce raw coordinates: torus coordinates to [0, 1), cyclic
        coordinates to residues.

        """
        c = np.array(coords, dtype=float)
        if c.shape[-1:] != (self.ncoords,):
            raise StructuralError(
                "expected {} internal coordinates, got shape {}".format(
                    self.ncoords, c.shape))
        t = self.torus_coords
        if len(t):
            c[..., t] = reduce_torus(c[..., t])
        z = self.cyclic_coords
        if len(z):
            c[..., z] = np.mod(np.rint(c[..., z]), self.moduli[z])
        return c

    def point(self, coords):
        return InternalPoint(self, coords)

    def identity(self):
        return InternalPoint(self, np.zeros(self.ncoords))

    def character(self, labels):
        return InternalCharacter(self, labels)

    def extended(self, factors):
        return InternalSpace(self._factors + tuple(factors))

    def to_config(self):
        return [f.to_config() for f in self._factors]

    def __eq__(self, other):
        return isinstance(other, InternalSpace) \
            and self._factors == other._factors

    def __hash__(self):
        return hash(self._factors)

    def __repr__(self):
        return " x ".join(repr(f) for f in self._factors)

def _check_space(a, b):
    if a != b:
        raise StructuralError("internal spaces differ: {!r} and {!r}".format(
            a, b))

class InternalPoint:
    """A point of an internal space, or a batch of points.

    Coordinates are always stored reduced, and are read-only.

    """
    def __init__(self, space, coords):
        self.space = space
        self.coords = space.reduce(coords)
        self.coords.setflags(write=False)

    @property
    def is_batch(self):
        return self.coords.ndim > 1

    def __len__(self):
        if not self.is_batch:
            raise TypeError("a single internal point has no length")
        return self.coords.shape[0]

    def __getitem__(self, index):
        return InternalPoint(self.space, self.coords[index])

    def factor(self, i):
        """Coordinates belonging to factor i."""
        return self.coords[..., self.space.factor_slice(i)]

    def __add__(self, other):
        return add(self, other)

    def __neg__(self):
        return InternalPoint(self.space, -self.coords)

    def __sub__(self, other):
        return add(self, -other)

    def __repr__(self):
        return "InternalPoint({!r}, {})".format(self.space, self.coords)

class InternalCharacter:
    """A character of an internal space.

    Labels are real on Euclidean coordinates, integers on torus
    coordinates and residues on cyclic coordinates.

    """
    def __init__(self, space, labels):
        self.space = space
        labels = np.array(labels, dtype=float)
        if labels.shape != (space.ncoords,):
            raise StructuralError(
                "expected {} character labels, got {}".format(
                    space.ncoords, labels.shape))
        for idx in (space.torus_coords, space.cyclic_coords):
            if len(idx) and np.any(labels[idx] != np.rint(labels[idx])):
                raise StructuralError(
                    "torus and cyclic character labels must be integers")
        z = space.cyclic_coords
        if len(z):
            labels[z] = np.mod(labels[z], space.moduli[z])
        self.labels = labels
        self.labels.setflags(write=False)
        divisor = np.where(space.moduli > 0, space.moduli, 1.0)
        self._frequencies = labels / divisor

    def phase(self, y):
        """<label, y> as a real number (or array, for a batch of points);
        the character value is exp(2 pi i phase).

        """
        _check_space(self.space, y.space)
        return y.coords @ self._frequencies

    def __call__(self, y):
        return np.exp(2j * np.pi * self.phase(y))

    def __neg__(self):
        return InternalCharacter(self.space, -self.labels)

    def __mul__(self, other):
        _check_space(self.space, other.space)
        return InternalCharacter(self.space, self.labels + other.labels)

    def __repr__(self):
        return "InternalCharacter({!r}, {})".format(self.space, self.labels)

def add(a, b):
    """Group law of the internal space."""
    _check_space(a.space, b.space)
    return InternalPoint(a.space, a.coords + b.coords)

def evaluate_character(chi, y):
    return chi(y)

class QuadratureRule:
    """Tensor-product nodes and Haar weights on an internal space."""
    def __init__(self, space, nodes, weights):
        self.space = space
        self.nodes = InternalPoint(space, nodes)
        self.weights = weights

    def __len__(self):
        return len(self.weights)

    def integrate(self, integrand):
        """Integrate a function that accepts a batch of internal points
        and returns one value per point (or a constant).

        """
        values = np.broadcast_to(
            np.asarray(integrand(self.nodes), dtype=complex),
            self.weights.shape)
        return complex(values @ self.weights)

    def integrate_values(self, values):
        return complex(np.asarray(values, dtype=complex) @ self.weights)

def _panels(bounds):
    b = np.array(bounds, dtype=float)
    if b.ndim != 1 or len(b) < 2 or not np.all(np.isfinite(b)) \
       or np.any(np.diff(b) <= 0):
        raise PreconditionError(
            "Euclidean support bounds must be a finite increasing "
            "sequence, not {!r}".format(bounds))
    return b

def _gauss_legendre(breakpoints, n):
    x, w = leggauss(n)
    nodes = []
    weights = []
    for lo, hi in zip(breakpoints[:-1], breakpoints[1:]):
        half = (hi - lo) / 2
        nodes.append(lo + half * (x + 1))
        weights.append(half * w)
    return np.concatenate(nodes), np.concatenate(weights)

def _resolutions(space, resolution):
    factors = space.factors
    if resolution is None:
        resolution = [None] * len(factors)
    elif np.isscalar(resolution):
        resolution = [resolution] * len(factors)
    if len(resolution) != len(factors):
        raise PreconditionError(
            "resolution needs one entry per factor ({} factors)".format(
                len(factors)))
    res = []
    for f, r in zip(factors, resolution):
        if r is None:
            r = apdiffconfig.gauss_nodes if f.kind == "euclidean" \
                else apdiffconfig.torus_nodes
        if int(r) != r or r < 1:
            raise PreconditionError(
                "quadrature resolution must be at least 1, not {!r}".format(r))
        res.append(int(r))
    return res

def quadrature_rule(space, support_box=None, resolution=None):
    """Build the tensor-product rule for 'space'.

    support_box gives, for each Euclidean coordinate in order, either
    (lo, hi) or a longer increasing list of breakpoints; Gauss-Legendre
    is applied on each panel.  resolution is an int or a list with one
    entry per factor (None for the default).  Cyclic factors are always
    summed exactly.

    """
    res = _resolutions(space, resolution)
    euclid = space.euclidean_coords
    if len(euclid):
        if support_box is None or len(support_box) != len(euclid):
            raise PreconditionError(
                "quadrature over {!r} needs support bounds for {} "
                "Euclidean coordinate(s)".format(space, len(euclid)))
    one_d = []
    ecount = 0
    for f, n in zip(space.factors, res):
        for _ in range(f.ncoords):
            if f.kind == "euclidean":
                one_d.append(_gauss_legendre(_panels(support_box[ecount]), n))
                ecount += 1
            elif f.kind == "torus":
                one_d.append((np.arange(n) / n, np.full(n, 1.0 / n)))
            else:
                one_d.append((np.arange(f.order, dtype=float),
                              np.full(f.order, 1.0 / f.order)))
    total = math.prod(len(x) for x, _ in one_d)
    if total > apdiffconfig.max_quadrature_nodes:
        raise PreconditionError(
            "quadrature over {!r} at resolution {} needs {} nodes; the "
            "limit is {}".format(space, res, total,
                                  apdiffconfig.max_quadrature_nodes))
    grids = np.meshgrid(*[x for x, _ in one_d], indexing='ij')
    nodes = np.stack([g.ravel() for g in grids], axis=-1)
    wgrids = np.meshgrid(*[w for _, w in one_d], indexing='ij')
    weights = np.ones(nodes.shape[0])
    for w in wgrids:
        weights = weights * w.ravel()
    log.debug("quadrature rule on %r with %d nodes", space, len(weights))
    return QuadratureRule(space, nodes, weights)

def quadrature(space, integrand, support_box=None, resolution=None):
    """Haar-normalised integral of 'integrand' over 'space'."""
    return quadrature_rule(space, support_box, resolution).integrate(integrand)
