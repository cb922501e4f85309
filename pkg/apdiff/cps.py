"""Cut-and-project schemes over physical space R^d.

A scheme is given by r generators (v_i, s_i) of a lattice in R^d x H.
Physical parts are rows of an (r, d) array; internal parts are rows of
an (r, ncoords) array in the internal space's coordinate order.  Lattice
points are addressed by integer label vectors k, with
l = k @ V and l* = k @ S reduced in H.

"""

import logging
import itertools
import functools
import math
from dataclasses import dataclass
import numpy as np
from scipy.spatial import cKDTree
from . import apdiffconfig
from .groups import InternalSpace, InternalPoint, InternalCharacter, \
    Torus, Cyclic
from .apfun import rationalize
from .errors import StructuralError, PreconditionError, UnsupportedInput, \
    NumericalInvariantError

log = logging.getLogger(__name__)

# Largest number of integer labels examined by a single enumeration
MAX_LABELS = 200_000_000

# Rows of integer labels generated at a time
CHUNK = 1_000_000

class WindowPart:
    kind = None

    def to_config(self):
        raise NotImplementedError

class EuclideanBox(WindowPart):
    """Half-open box [lo, hi) on the coordinates of one Euclidean factor."""
    kind = "euclidean"

    def __init__(self, bounds):
        b = np.array(bounds, dtype=float).reshape(-1, 2)
        if np.any(b[:, 1] <= b[:, 0]):
            raise PreconditionError(
                "window box {} has empty interior".format(b.tolist()))
        self.bounds = b

    @property
    def ncoords(self):
        return len(self.bounds)

    def contains(self, block):
        return np.all((block >= self.bounds[:, 0])
                      & (block < self.bounds[:, 1]), axis=-1)

    def to_config(self):
        return {"type": "euclidean_box", "bounds": self.bounds.tolist()}

class TorusBox(WindowPart):
    """Product of half-open arcs [lo, hi) on the coordinates of one torus
    factor.  lo may be negative; an arc of length >= 1 is the whole
    circle.

    """
    kind = "torus"

    def __init__(self, arcs):
        a = np.array(arcs, dtype=float).reshape(-1, 2)
        if np.any(a[:, 1] <= a[:, 0]):
            raise PreconditionError(
                "torus arcs {} have empty interior".format(a.tolist()))
        self.arcs = a

    @property
    def ncoords(self):
        return len(self.arcs)

    def contains(self, block):
        width = self.arcs[:, 1] - self.arcs[:, 0]
        inside = np.mod(block - self.arcs[:, 0], 1.0) < width
        return np.all(inside | (width >= 1.0), axis=-1)

    def to_config(self):
        return {"type": "torus_box", "arcs": self.arcs.tolist()}

class CyclicSubset(WindowPart):
    """A set of residues of one cyclic factor, or of residue tuples when
    the part spans several cyclic factors.

    """
    kind = "cyclic"

    def __init__(self, residues):
        rs = set()
        for r in residues:
            rs.add(tuple(int(x) for x in r) if np.ndim(r) else (int(r),))
        if not rs:
            raise PreconditionError("empty cyclic window")
        widths = {len(r) for r in rs}
        if len(widths) != 1:
            raise StructuralError("residue tuples of different lengths")
        self.residues = frozenset(rs)
        self.ncoords = widths.pop()

    def contains(self, block, orders):
        orders = np.asarray(orders, dtype=np.int64)
        radix = np.cumprod(np.concatenate([[1], orders[:-1]]))
        codes = np.rint(block).astype(np.int64) @ radix
        wanted = np.array(sorted(
            int(np.dot(np.mod(r, orders), radix)) for r in self.residues))
        return np.isin(codes, wanted)

    def to_config(self):
        rs = sorted(self.residues)
        if self.ncoords == 1:
            return {"type": "cyclic_subset", "residues": [r[0] for r in rs]}
        return {"type": "cyclic_subset", "residues": [list(r) for r in rs]}

class ProductWindow:
    """A window that is a product of parts, each attached to one factor
    (or, for a CyclicSubset, to a tuple of cyclic factors).  Factors
    with no part are unrestricted.

    """
    def __init__(self, parts=None):
        self.parts = []
        for key, part in (parts or {}).items():
            factors = tuple(key) if isinstance(key, tuple) else (key,)
            if len(factors) > 1 and not isinstance(part, CyclicSubset):
                raise StructuralError(
                    "only cyclic subsets may span several factors")
            self.parts.append((factors, part))
        self.parts.sort(key=lambda fp: fp[0])

    def _check(self, space):
        for factors, part in self.parts:
            for i in factors:
                if i >= len(space.factors):
                    raise StructuralError(
                        "window refers to factor {} of {!r}".format(i, space))
                if space.factors[i].kind != part.kind:
                    raise StructuralError(
                        "window part {} does not fit factor {!r}".format(
                            part.kind, space.factors[i]))
            ncoords = sum(space.factors[i].ncoords for i in factors)
            if ncoords != part.ncoords:
                raise StructuralError(
                    "window part has {} coordinates, factor(s) have {}".format(
                        part.ncoords, ncoords))

    def contains(self, y):
        space = y.space
        self._check(space)
        inside = np.ones(y.coords.shape[:-1], dtype=bool)
        for factors, part in self.parts:
            block = np.concatenate([y.factor(i) for i in factors], axis=-1)
            if part.kind == "cyclic":
                inside &= part.contains(
                    block, [space.factors[i].order for i in factors])
            else:
                inside &= part.contains(block)
        return inside

    def euclidean_bounds(self, space):
        """Bounds on each Euclidean coordinate of 'space' implied by the
        window, as an (e, 2) array; unrestricted coordinates get infinite
        bounds.

        """
        self._check(space)
        bounds = {}
        for factors, part in self.parts:
            if part.kind == "euclidean":
                s = space.factor_slice(factors[0])
                for j, c in enumerate(range(s.start, s.stop)):
                    bounds[c] = part.bounds[j]
        return np.array([bounds.get(c, (-np.inf, np.inf))
                         for c in space.euclidean_coords]).reshape(-1, 2)

    def cyclic_parts(self):
        return [(f, p) for f, p in self.parts if p.kind == "cyclic"]

    def intersect(self, other):
        w = ProductWindow()
        w.parts = sorted(self.parts + other.parts, key=lambda fp: fp[0])
        return w

    def to_config(self):
        return [{"factors": list(f), "part": p.to_config()}
                for f, p in self.parts]

def as_window(space, window):
    """Accept a bare window part for a space with a single factor of the
    matching kind.

    """
    if window is None:
        return ProductWindow()
    if isinstance(window, ProductWindow):
        return window
    if isinstance(window, WindowPart):
        matching = [i for i, f in enumerate(space.factors)
                    if f.kind == window.kind]
        if window.kind == "cyclic" and window.ncoords == len(matching) > 1:
            return ProductWindow({tuple(matching): window})
        if len(matching) != 1:
            raise StructuralError(
                "cannot attach a bare {} window to {!r}".format(
                    window.kind, space))
        return ProductWindow({matching[0]: window})
    raise StructuralError("{!r} is not a window".format(window))

def whole_space():
    return ProductWindow()

def _integer_range(lo, hi):
    return np.arange(math.floor(lo - 1e-9), math.ceil(hi + 1e-9) + 1,
                     dtype=np.int64)

def lattice_labels_in(M, z_lo, z_hi):
    """All integer k with z_lo <= k @ M <= z_hi (up to rounding slack).

    M is square and invertible.  The last label coordinate is solved for
    directly, so thin parallelotopes cost no more than their leading
    projections.

    """
    r = M.shape[0]
    Minv = np.linalg.inv(M)
    kmin = np.minimum(np.outer(z_lo, np.ones(r)) * Minv,
                      np.outer(z_hi, np.ones(r)) * Minv).sum(axis=0)
    kmax = np.maximum(np.outer(z_lo, np.ones(r)) * Minv,
                      np.outer(z_hi, np.ones(r)) * Minv).sum(axis=0)
    ranges = [_integer_range(a, b) for a, b in zip(kmin[:-1], kmax[:-1])]
    if np.prod([float(len(x)) for x in ranges]) > MAX_LABELS:
        raise PreconditionError("region is too large to enumerate")
    last = M[-1]
    active = np.abs(last) > 1e-14
    out = []
    for lead in _label_chunks(ranges):
        s = lead @ M[:-1] if r > 1 else np.zeros((1, M.shape[1]))
        a = (z_lo[active] - s[:, active]) / last[active]
        b = (z_hi[active] - s[:, active]) / last[active]
        lo = np.max(np.minimum(a, b), axis=1)
        hi = np.min(np.maximum(a, b), axis=1)
        lo = np.maximum(np.floor(lo - 1e-9), math.floor(kmin[-1] - 1e-9))
        hi = np.minimum(np.ceil(hi + 1e-9), math.ceil(kmax[-1] + 1e-9))
        counts = np.maximum(hi - lo + 1, 0).astype(np.int64)
        if not counts.sum():
            continue
        rows = np.repeat(np.arange(len(lead)), counts)
        offsets = np.arange(counts.sum()) - np.repeat(
            np.cumsum(counts) - counts, counts)
        tail = (np.repeat(lo, counts) + offsets).astype(np.int64)
        out.append(np.column_stack([lead[rows], tail]))
    if not out:
        return np.zeros((0, r), dtype=np.int64)
    return np.concatenate(out)

def _label_chunks(ranges):
    if not ranges:
        yield np.zeros((1, 0), dtype=np.int64)
        return
    *outer, inner = ranges
    batch = []
    size = 0
    for head in itertools.product(*outer):
        block = np.column_stack(
            [np.full(len(inner), h, dtype=np.int64) for h in head] + [inner])
        batch.append(block)
        size += len(block)
        if size >= CHUNK:
            yield np.concatenate(batch)
            batch = []
            size = 0
    if batch:
        yield np.concatenate(batch)

def _integer_box(bound, width):
    axis = np.arange(-bound, bound + 1, dtype=np.int64)
    grids = np.meshgrid(*([axis] * width), indexing='ij')
    return np.stack([g.ravel() for g in grids], axis=-1).reshape(-1, width)

def _star_discrepancy(x):
    x = np.sort(x)
    n = len(x)
    i = np.arange(1, n + 1)
    return float(max(np.max(i / n - x), np.max(x - (i - 1) / n)))

class CutProjectScheme:
    """Lattice data, star map and density of a cut-and-project scheme.

    Construction validates the rank condition r = d + e (e the number
    of Euclidean internal coordinates) and checks projection
    injectivity on the box ||k||_inf <= injectivity_horizon.

    """
    def __init__(self, phys_dim, internal, phys_generators,
                 internal_generators, name=None, injectivity_horizon=None,
                 base=None, added_frequencies=None):
        self.phys_dim = int(phys_dim)
        if self.phys_dim < 1:
            raise StructuralError("physical dimension must be positive")
        if not isinstance(internal, InternalSpace):
            internal = InternalSpace(internal)
        self.internal = internal
        V = np.array(phys_generators, dtype=float)
        if V.ndim == 1:
            V = V.reshape(-1, self.phys_dim)
        r = V.shape[0]
        if V.shape != (r, self.phys_dim):
            raise StructuralError(
                "physical generators must have {} coordinates".format(
                    self.phys_dim))
        S = np.array(internal_generators, dtype=float).reshape(
            r, internal.ncoords)
        self.V = V
        self.S = internal.reduce(S)
        self.V.setflags(write=False)
        self.S.setflags(write=False)
        euclid = internal.euclidean_coords
        if r != self.phys_dim + len(euclid):
            raise StructuralError(
                "{} generators for physical dimension {} and {} Euclidean "
                "internal coordinates".format(r, self.phys_dim, len(euclid)))
        self.M = np.hstack([V, self.S[:, euclid]])
        det = np.linalg.det(self.M)
        if abs(det) < 1e-12:
            raise StructuralError("generators do not span a lattice")
        self.density = 1.0 / abs(det)
        self.Minv = np.linalg.inv(self.M)
        self.name = name
        self.base = base
        self.added_frequencies = None if added_frequencies is None \
            else np.array(added_frequencies, dtype=float)
        self.diagnostics = {}
        cyc = internal.cyclic_coords
        self._cyclic = cyc
        self._cyclic_int = np.rint(self.S[:, cyc]).astype(np.int64)
        self._orders = internal.moduli[cyc].astype(np.int64)
        if injectivity_horizon is None:
            injectivity_horizon = apdiffconfig.injectivity_horizon
        if len(euclid) and injectivity_horizon:
            self._check_injectivity(int(injectivity_horizon))

    @property
    def rank(self):
        return self.V.shape[0]

    def _check_injectivity(self, horizon):
        ks = _integer_box(horizon, self.rank)
        ks = ks[np.any(ks != 0, axis=1)]
        norms = np.linalg.norm(ks @ self.V, axis=1)
        bad = np.flatnonzero(norms < 1e-9)
        if len(bad):
            k = ks[bad[0]]
            log.error("projection to physical space is not injective: "
                      "k = %s", k.tolist())
            raise NumericalInvariantError(
                "lattice label {} projects to 0; the projection to physical "
                "space is not one-to-one".format(k.tolist()))

    def internal_of(self, k):
        """l* for integer labels k (one row or an (N, r) array)."""
        k = np.asarray(k, dtype=np.int64)
        raw = k @ self.S
        if len(self._cyclic):
            raw[..., self._cyclic] = np.mod(k @ self._cyclic_int,
                                            self._orders)
        return InternalPoint(self.internal, raw)

    def phys_of(self, k):
        return np.asarray(k, dtype=np.int64) @ self.V

    def star(self, k):
        return star(self, k)

    def same_structure(self, other, tol=1e-12):
        """Compare two schemes ignoring factor order and trivial Cyclic(1)
        factors.

        """
        def essentials(s):
            cols = {}
            for i, f in enumerate(s.internal.factors):
                if f == Cyclic(1):
                    continue
                cols.setdefault(f, []).append(s.S[:, s.internal.factor_slice(i)])
            return cols
        if self.phys_dim != other.phys_dim or self.rank != other.rank \
           or not np.allclose(self.V, other.V, atol=tol, rtol=0):
            return False
        a = essentials(self)
        b = essentials(other)
        if sorted(map(repr, a)) != sorted(map(repr, b)):
            return False
        for f, blocks in a.items():
            for x, y in zip(sorted(blocks, key=lambda m: m.tolist()),
                            sorted(b[f], key=lambda m: m.tolist())):
                d = np.abs(x - y)
                if f.kind == "torus":
                    d = np.minimum(d, 1 - d)
                if np.any(d > tol):
                    return False
        return True

    def to_config(self):
        gens = []
        for i in range(self.rank):
            parts = []
            for j, f in enumerate(self.internal.factors):
                c = self.S[i, self.internal.factor_slice(j)]
                if f.kind == "cyclic":
                    parts.append(int(c[0]))
                else:
                    parts.append([float(x) for x in c])
            gens.append({"phys": [float(x) for x in self.V[i]],
                         "internal": parts})
        doc = {"phys_dim": self.phys_dim,
               "internal": self.internal.to_config(),
               "generators": gens}
        if self.name:
            doc["name"] = self.name
        return doc

    def __repr__(self):
        return "CutProjectScheme({}, d={}, H={!r}, r={})".format(
            self.name or "unnamed", self.phys_dim, self.internal, self.rank)

def star(scheme, k):
    """(l, l*) for integer labels k."""
    return scheme.phys_of(k), scheme.internal_of(k)

def _region(region, d):
    box = np.array(region, dtype=float).reshape(-1, 2)
    if box.shape != (d, 2):
        raise StructuralError(
            "region must give bounds for {} physical coordinates".format(d))
    if not np.all(np.isfinite(box)):
        raise PreconditionError("region {} is unbounded".format(box.tolist()))
    if np.any(box[:, 1] < box[:, 0]):
        raise PreconditionError("region {} is empty".format(box.tolist()))
    return box

@dataclass
class ModelSetPatch:
    """Lattice points of a model set inside a region, sorted by label."""
    labels: np.ndarray
    positions: np.ndarray
    internal: InternalPoint

    def __len__(self):
        return len(self.labels)

    def __iter__(self):
        for i in range(len(self.labels)):
            yield (tuple(int(x) for x in self.labels[i]), self.positions[i],
                   self.internal[i])

    def label_set(self):
        return {tuple(int(x) for x in k) for k in self.labels}

    def min_separation(self):
        return min_separation(self.positions)

def min_separation(positions, merge_tol=0.0):
    """Smallest distance between points further apart than merge_tol."""
    positions = np.asarray(positions, dtype=float)
    if len(positions) < 2:
        return np.inf
    tree = cKDTree(positions)
    k = min(len(positions), 8)
    dist, _ = tree.query(positions, k=k)
    dist = dist[:, 1:]
    dist = dist[dist > merge_tol]
    return float(dist.min()) if len(dist) else np.inf

def enumerate_model_set(scheme, window, region):
    """Every lattice point with l in the closed box 'region' and l* in
    'window'.

    """
    region = _region(region, scheme.phys_dim)
    window = as_window(scheme.internal, window)
    eb = window.euclidean_bounds(scheme.internal)
    if not np.all(np.isfinite(eb)):
        raise PreconditionError(
            "window is not bounded on the Euclidean internal coordinates")
    z_lo = np.concatenate([region[:, 0], eb[:, 0]])
    z_hi = np.concatenate([region[:, 1], eb[:, 1]])
    k = lattice_labels_in(scheme.M, z_lo, z_hi)
    phys = scheme.phys_of(k)
    keep = np.all((phys >= region[:, 0]) & (phys <= region[:, 1]), axis=1)
    k = k[keep]
    phys = phys[keep]
    internal = scheme.internal_of(k)
    keep = window.contains(internal)
    k = k[keep]
    order = np.lexsort(k.T[::-1]) if len(k) else np.zeros(0, dtype=int)
    k = k[order]
    return ModelSetPatch(k, phys[keep][order], internal[keep][order])

class DualCharacter:
    """A character (xi, chi*) of R^d x H trivial on the lattice.

    label is (m, n, c): m in Z^r, then integer labels of the torus
    coordinates, then residues of the cyclic coordinates.

    """
    def __init__(self, label, phys_freq, internal_char, label_orders):
        self.label = tuple(int(x) for x in label)
        self.phys_freq = np.asarray(phys_freq, dtype=float)
        self.internal_char = internal_char
        self.label_orders = tuple(label_orders)

    def __neg__(self):
        label = tuple(-x if q == 0 else (-x) % q
                      for x, q in zip(self.label, self.label_orders))
        return DualCharacter(label, -self.phys_freq, -self.internal_char,
                             self.label_orders)

    def pairing_residual(self, scheme):
        """max over generators of |e^{2 pi i xi.v} chi*(s) - 1|."""
        phases = scheme.V @ self.phys_freq + \
            self.internal_char.phase(InternalPoint(scheme.internal, scheme.S))
        return float(np.max(np.abs(np.exp(2j * np.pi * phases) - 1)))

    def __repr__(self):
        return "DualCharacter({}, xi={})".format(
            self.label, self.phys_freq.tolist())

def dual_characters(scheme, freq_cutoff, label_bound):
    """Dual lattice characters with ||label||_inf <= label_bound and
    |xi| <= freq_cutoff, sorted by label.

    Cyclic labels run over all residues.  Labels outside the bound are
    not searched.

    """
    if freq_cutoff <= 0 or label_bound <= 0:
        raise PreconditionError("cutoff and label bound must be positive")
    M = int(label_bound)
    internal = scheme.internal
    d = scheme.phys_dim
    r = scheme.rank
    t_idx = internal.torus_coords
    c_idx = internal.cyclic_coords
    orders = internal.moduli[c_idx].astype(np.int64)
    axes = [np.arange(-M, M + 1)] * (r + len(t_idx)) + \
        [np.arange(q) for q in orders]
    grids = np.meshgrid(*axes, indexing='ij')
    labels = np.stack([g.ravel() for g in grids], axis=-1).astype(np.int64)
    m = labels[:, :r]
    n = labels[:, r:r + len(t_idx)]
    c = labels[:, r + len(t_idx):]
    rhs = m - n @ scheme.S[:, t_idx].T - (c / orders) @ scheme.S[:, c_idx].T
    X = rhs @ scheme.Minv.T
    xi = X[:, :d]
    keep = np.linalg.norm(xi, axis=1) <= freq_cutoff + 1e-12
    labels, X, xi = labels[keep], X[keep], xi[keep]
    order = np.lexsort(labels.T[::-1])
    labels, X, xi = labels[order], X[order], xi[order]
    log.warning("dual character search is complete only for labels with "
                "||label||_inf <= %d (cutoff %g): %d characters",
                M, freq_cutoff, len(labels))
    label_orders = [0] * (r + len(t_idx)) + list(orders)
    e_idx = internal.euclidean_coords
    result = []
    for lab, x, f in zip(labels, X, xi):
        chi_labels = np.zeros(internal.ncoords)
        chi_labels[e_idx] = x[d:]
        chi_labels[t_idx] = lab[r:r + len(t_idx)]
        chi_labels[c_idx] = lab[r + len(t_idx):]
        ch = DualCharacter(lab, f, InternalCharacter(internal, chi_labels),
                           label_orders)
        residual = ch.pairing_residual(scheme)
        if residual > 1e-10:
            log.error("dual pairing residual %g for label %s",
                      residual, ch.label)
            raise NumericalInvariantError(
                "character {} is not trivial on the lattice (residual "
                "{:.3g})".format(ch.label, residual))
        result.append(ch)
    return result

def extend_scheme(scheme, mod_freqs):
    """Append a torus coordinate omega_j . v_i (mod 1) for each frequency
    row omega_j.

    Windows of the original scheme re-embed unchanged, since the new
    factor is appended last and unrestricted.

    """
    W = np.array(mod_freqs, dtype=float).reshape(-1, scheme.phys_dim)
    if not len(W):
        return scheme
    added = np.mod(scheme.V @ W.T, 1.0)
    internal = scheme.internal.extended([Torus(len(W))])
    ext = CutProjectScheme(
        scheme.phys_dim, internal, scheme.V, np.hstack([scheme.S, added]),
        name="{}+{}".format(scheme.name or "scheme", len(W)),
        injectivity_horizon=0, base=scheme, added_frequencies=W)
    sample = _integer_box(max(1, int(round(2048 ** (1 / scheme.rank)))),
                          scheme.rank)
    disc = [_star_discrepancy(np.mod(sample @ added[:, j], 1.0))
            for j in range(len(W))]
    ext.diagnostics["equidistribution"] = disc
    log.info("extended %r by %d frequencies; star discrepancy of added "
             "coordinates %s", scheme, len(W), ["%.3g" % x for x in disc])
    return ext

def ideal_crystal_scheme(gamma_basis, offsets, max_denominator=None):
    """A scheme with finite cyclic internal space, and a window, whose
    model set is Gamma + F.

    gamma_basis rows are lattice basis vectors; offsets are points of
    R^d whose coordinates in that basis must be rational.

    """
    B = np.array(gamma_basis, dtype=float)
    d = B.shape[0]
    if B.shape != (d, d) or abs(np.linalg.det(B)) < 1e-12:
        raise StructuralError("gamma_basis must be an invertible square matrix")
    coords = []
    for x in offsets:
        c = np.linalg.solve(B.T, np.array([float(v) for v in np.ravel(x)]))
        fracs = []
        for v in c:
            fr = rationalize(v, max_denominator)
            if fr is None:
                raise UnsupportedInput(
                    "offset {} has irrational coordinate {!r} in the lattice "
                    "basis".format(np.ravel(x).tolist(), float(v)))
            fracs.append(fr)
        coords.append(fracs)
    if not coords:
        raise PreconditionError("an ideal crystal needs at least one offset")
    q = [functools.reduce(lambda a, b: a * b // math.gcd(a, b),
                          (c[j].denominator for c in coords), 1)
         for j in range(d)]
    internal = InternalSpace([Cyclic(n) for n in q])
    V = B / np.array(q, dtype=float)[:, None]
    S = np.eye(d)
    scheme = CutProjectScheme(d, internal, V, S, name="ideal crystal")
    residues = {tuple(int(c[j] * q[j]) % q[j] for j in range(d))
                for c in coords}
    if d == 1:
        window = ProductWindow({0: CyclicSubset([r[0] for r in residues])})
    else:
        window = ProductWindow({tuple(range(d)): CyclicSubset(residues)})
    return scheme, window

def almost_period_window(scheme, radius):
    """The ball of the given radius about the identity of H: boxes on
    Euclidean factors, arcs [-r, r) on tori, the identity on cyclic
    factors.

    """
    if not 0 < radius < 0.5:
        raise PreconditionError("ball radius must lie in (0, 1/2)")
    parts = {}
    for i, f in enumerate(scheme.internal.factors):
        if f.kind == "euclidean":
            parts[i] = EuclideanBox([(-radius, radius)] * f.ncoords)
        elif f.kind == "torus":
            parts[i] = TorusBox([(-radius, radius)] * f.ncoords)
        else:
            parts[i] = CyclicSubset([0])
    return ProductWindow(parts)
