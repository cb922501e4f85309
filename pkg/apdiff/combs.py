"""Weighted Dirac combs as finite patches.

A patch knows two boxes: the region that contains every atom, and the
exhaustive region inside which it holds every atom of the infinite
comb.  Operations that move atoms grow the first and shrink the second
by the displacement bound, so averages taken over the exhaustive
region never see a truncated boundary.

"""

import logging
import json
import hashlib
import math
from dataclasses import dataclass
import numpy as np
from scipy.spatial import cKDTree
from scipy.sparse.csgraph import connected_components
from scipy.sparse import coo_matrix
from . import apdiffconfig
from .groups import InternalPoint
from .cps import lattice_labels_in, enumerate_model_set, extend_scheme, \
    almost_period_window, min_separation as _min_separation, _region
from .apfun import ApFunction, PeriodReport, full_periodicity_on_lattice, \
    incommensurate_frequency, _as_points
from .families import WeightFunction, Deformation
from .errors import StructuralError, PreconditionError

log = logging.getLogger(__name__)

def fingerprint(*docs):
    """sha256 of the canonical JSON of some configuration documents."""
    text = json.dumps(list(docs), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(text.encode("utf-8")).hexdigest()

def system_fingerprint(scheme, f, p):
    return fingerprint(scheme.to_config(), f.to_config(), p.to_config())

def _grow(box, margin):
    box = np.array(box, dtype=float)
    return np.column_stack([box[:, 0] - margin, box[:, 1] + margin])

def _inside(x, box, slack=0.0):
    return np.all((x >= box[:, 0] - slack) & (x <= box[:, 1] + slack), axis=-1)

def _volume(box):
    return float(np.prod(np.maximum(box[:, 1] - box[:, 0], 0.0)))

class WeightedComb:
    """A finite patch of sum c_i delta_{x_i}.

    Atoms at the same position are kept apart; canonical() merges
    them.  labels, when present, are the integer lattice labels the
    atoms were generated from.  system, when present, is the (scheme,
    weight, deformation) the patch was cut from.

    """
    def __init__(self, positions, weights, region, exhaustive=None,
                 labels=None, fingerprint=None, system=None):
        self.region = _region(region, np.shape(region)[0])
        d = len(self.region)
        self.positions = np.array(positions, dtype=float).reshape(-1, d)
        self.weights = np.array(weights, dtype=complex).reshape(-1)
        if len(self.weights) != len(self.positions):
            raise StructuralError("{} positions but {} weights".format(
                len(self.positions), len(self.weights)))
        self.exhaustive = self.region.copy() if exhaustive is None \
            else np.array(exhaustive, dtype=float).reshape(d, 2)
        self.labels = None if labels is None \
            else np.asarray(labels, dtype=np.int64).reshape(len(self.weights), -1)
        self.fingerprint = fingerprint
        self.system = system
        if not np.all(_inside(self.positions, self.region, 1e-9)):
            raise StructuralError("atom outside the patch region")
        for a in (self.positions, self.weights, self.region, self.exhaustive):
            a.setflags(write=False)

    @property
    def dim(self):
        return len(self.region)

    def __len__(self):
        return len(self.weights)

    @property
    def region_volume(self):
        return _volume(self.region)

    @property
    def exhaustive_volume(self):
        return _volume(self.exhaustive)

    def _derive(self, positions, weights, region, exhaustive, labels,
                fingerprint=None, system=True):
        return WeightedComb(positions, weights, region, exhaustive, labels,
                            fingerprint or self.fingerprint,
                            self.system if system is True else system)

    def canonical(self, merge_tol=1e-12):
        """Merge atoms closer than merge_tol, summing their weights;
        sorted by position.

        """
        if not len(self):
            return self._derive(self.positions, self.weights, self.region,
                                self.exhaustive, None)
        pairs = cKDTree(self.positions).query_pairs(
            merge_tol, output_type='ndarray')
        n = len(self)
        graph = coo_matrix((np.ones(len(pairs)), (pairs[:, 0], pairs[:, 1])),
                           shape=(n, n))
        ncomp, comp = connected_components(graph, directed=False)
        weights = np.zeros(ncomp, dtype=complex)
        np.add.at(weights, comp, self.weights)
        first = np.full(ncomp, n)
        np.minimum.at(first, comp, np.arange(n))
        positions = self.positions[first]
        order = np.lexsort(positions.T[::-1])
        return self._derive(positions[order], weights[order], self.region,
                            self.exhaustive, None)

    def translate(self, t):
        t = np.asarray(t, dtype=float).reshape(self.dim)
        return self._derive(self.positions + t, self.weights,
                            self.region + t[:, None],
                            self.exhaustive + t[:, None], self.labels,
                            system=None)

    def restrict(self, box):
        """Atoms in the closed box, with both regions cut down to it."""
        box = _region(box, self.dim)
        keep = _inside(self.positions, box)
        region = np.column_stack([np.maximum(box[:, 0], self.region[:, 0]),
                                  np.minimum(box[:, 1], self.region[:, 1])])
        exhaustive = np.column_stack([
            np.maximum(box[:, 0], self.exhaustive[:, 0]),
            np.minimum(box[:, 1], self.exhaustive[:, 1])])
        if np.any(region[:, 1] < region[:, 0]):
            raise PreconditionError("restriction box misses the patch")
        return self._derive(self.positions[keep], self.weights[keep], region,
                            exhaustive, None if self.labels is None
                            else self.labels[keep])

    def translation_bound(self):
        """Largest total |weight| in a unit box.

        Exact for d = 1 (over boxes [x, x + 1) starting at atoms); for
        d > 1 the maximum over blocks of 2^d adjacent unit cells, which
        bounds it from above.

        """
        if not len(self):
            return 0.0
        mass = np.abs(self.weights)
        if self.dim == 1:
            order = np.argsort(self.positions[:, 0])
            x = self.positions[order, 0]
            cum = np.concatenate([[0.0], np.cumsum(mass[order])])
            end = np.searchsorted(x, x + 1.0, side='left')
            return float(np.max(cum[end] - cum[np.arange(len(x))]))
        cells = np.floor(self.positions).astype(np.int64)
        keys, inverse = np.unique(cells, axis=0, return_inverse=True)
        totals = np.zeros(len(keys))
        np.add.at(totals, inverse.ravel(), mass)
        table = {tuple(k): v for k, v in zip(keys, totals)}
        corners = np.stack(np.meshgrid(*([[0, 1]] * self.dim), indexing='ij'),
                           axis=-1).reshape(-1, self.dim)
        return float(max(sum(table.get(tuple(k + c), 0.0) for c in corners)
                         for k in keys))

    def min_separation(self, merge_tol=1e-12):
        """Smallest distance between distinct atoms of the canonical
        view."""
        return _min_separation(self.canonical(merge_tol).positions)

    def __repr__(self):
        return "WeightedComb({} atoms in {})".format(
            len(self), self.region.tolist())

class IdealCrystal:
    """Gamma + F for a lattice Gamma (basis rows) and finite F.

    Offsets are reduced to the fundamental domain of the basis and
    made distinct modulo Gamma.

    """
    def __init__(self, gamma_basis, offsets, tol=1e-9):
        B = np.array(gamma_basis, dtype=float)
        d = B.shape[0]
        if B.shape != (d, d) or abs(np.linalg.det(B)) < 1e-12:
            raise StructuralError("gamma_basis must be an invertible square "
                                  "matrix")
        F = np.array(offsets, dtype=float).reshape(-1, d)
        if not len(F):
            raise PreconditionError("an ideal crystal needs at least one offset")
        c = np.linalg.solve(B.T, F.T).T
        c = np.mod(c, 1.0)
        c[np.abs(c - 1.0) < tol] = 0.0
        c[np.abs(c) < tol] = 0.0
        kept = []
        for row in c[np.lexsort(c.T[::-1])]:
            if not any(np.all(np.minimum(np.abs(row - k), 1 - np.abs(row - k))
                              < tol) for k in kept):
                kept.append(row)
        self.basis = B
        self.fractional = np.array(kept)
        self.offsets = self.fractional @ B

    @property
    def dim(self):
        return self.basis.shape[0]

    def __len__(self):
        return len(self.offsets)

    def patch(self, region):
        """Every point of Gamma + F in the closed box, weight 1, labelled
        by (lattice coefficients, offset index).

        """
        box = _region(region, self.dim)
        positions = []
        labels = []
        for i, f in enumerate(self.offsets):
            k = lattice_labels_in(self.basis, box[:, 0] - f, box[:, 1] - f)
            x = k @ self.basis + f
            keep = _inside(x, box)
            positions.append(x[keep])
            labels.append(np.column_stack(
                [k[keep], np.full(int(keep.sum()), i, dtype=np.int64)]))
        positions = np.concatenate(positions)
        labels = np.concatenate(labels)
        order = np.lexsort(positions.T[::-1])
        return WeightedComb(positions[order], np.ones(len(order)), box, box,
                            labels[order])

    def __repr__(self):
        return "IdealCrystal(basis={}, offsets={})".format(
            self.basis.tolist(), self.offsets.tolist())

def _bind(scheme, f, p):
    if getattr(f, "space", None) != scheme.internal:
        f.bind(scheme.internal)
    if getattr(p, "space", None) != scheme.internal \
       or getattr(p, "phys_dim", None) != scheme.phys_dim:
        p.bind(scheme.internal, scheme.phys_dim)

def deformed_weighted_model_set(scheme, f, p, region, select="deformed",
                                internal_shift=None):
    """The patch of sum f(l* + k) delta_{l + p(l* + k)} for the region.

    select="deformed" keeps atoms whose deformed position lies in the
    region; select="lattice" keeps atoms whose lattice point l does.
    internal_shift k picks another element of the hull.

    """
    _bind(scheme, f, p)
    if select not in ("deformed", "lattice"):
        raise PreconditionError("unknown selection {!r}".format(select))
    region = _region(region, scheme.phys_dim)
    space = scheme.internal
    if internal_shift is None:
        shift = space.identity()
    elif isinstance(internal_shift, InternalPoint):
        shift = internal_shift
    else:
        shift = space.point(internal_shift)
    window = f.window()
    eb = window.euclidean_bounds(space)
    if not np.all(np.isfinite(eb)):
        raise PreconditionError(
            "weight {} does not have compact support on the Euclidean "
            "internal coordinates".format(f.family_name))
    s = p.sup_bound()
    search = _grow(region, s) if select == "deformed" else region
    e_shift = shift.coords[space.euclidean_coords]
    k = lattice_labels_in(scheme.M,
                          np.concatenate([search[:, 0], eb[:, 0] - e_shift]),
                          np.concatenate([search[:, 1], eb[:, 1] - e_shift]))
    lattice = scheme.phys_of(k)
    keep = _inside(lattice, search)
    k, lattice = k[keep], lattice[keep]
    y = scheme.internal_of(k) + shift
    keep = window.contains(y)
    k, lattice, y = k[keep], lattice[keep], y[keep]
    x = lattice + p(y)
    if select == "deformed":
        keep = _inside(x, region)
        k, x, y = k[keep], x[keep], y[keep]
        raw, exhaustive = region, region
    else:
        raw, exhaustive = _grow(region, s), _grow(region, -s)
    weights = f(y)
    order = np.lexsort(k.T[::-1]) if len(k) else np.zeros(0, dtype=int)
    log.debug("deformed model set of %r: %d atoms", scheme, len(order))
    return WeightedComb(x[order], weights[order], raw, exhaustive, k[order],
                        system_fingerprint(scheme, f, p), (scheme, f, p))

def modulate(comb, w, g):
    """Each atom (x, c) becomes (x + g(x), c w(x))."""
    d = comb.dim
    if g.dim != d or g.out_dim != d or not g.real:
        raise StructuralError(
            "displacement must map R^{} to R^{}".format(d, d))
    if w.dim != d or w.out_dim != 1 or w.real:
        raise StructuralError("weight must be a complex function on R^{}".format(d))
    x = comb.positions
    disp = np.asarray(g(x), dtype=float).reshape(len(x), d)
    factor = np.asarray(w(x), dtype=complex).reshape(len(x))
    s = g.sup_norm_bound()
    system = None
    if comb.system is not None and isinstance(w, ApFunction) \
       and isinstance(g, ApFunction):
        # same fingerprint as a spectrum of the realized composed scheme
        system = realize_composed_scheme(*comb.system, w, g)
        fp = system_fingerprint(*system)
    elif comb.fingerprint is not None:
        fp = fingerprint(comb.fingerprint, w.to_config(), g.to_config())
    else:
        fp = None
    return WeightedComb(x + disp, comb.weights * factor,
                        _grow(comb.region, s), _grow(comb.exhaustive, -s),
                        comb.labels, fp, system)

def _folded_rows(functions):
    """Distinct frequency rows of some ApFunctions with w and -w
    identified; each row is normalised so its first nonzero entry is
    positive.

    """
    rows = {}
    for fn in functions:
        for row, _ in fn.frequency_rows():
            lead = row[np.flatnonzero(row)[0]]
            rep = tuple(row if lead > 0 else -row + 0.0)
            rows[rep] = None
    return np.array(sorted(rows)).reshape(-1, functions[0].dim)

def _torus_labels(terms, rows):
    """Integer labels on the folded torus coordinates for each term."""
    index = {tuple(r): j for j, r in enumerate(rows)}
    labels = np.zeros((len(terms), len(rows)))
    for i, row in enumerate(terms.freqs):
        if not np.any(row):
            continue
        j = index.get(tuple(row))
        if j is None:
            j = index[tuple(-row + 0.0)]
            labels[i, j] = -1
        else:
            labels[i, j] = 1
    return labels

class _TorusRepresentation:
    """A trigonometric polynomial written on the added torus
    coordinates: x -> F(u + W x) with u the torus coordinates."""
    def __init__(self, fn, rows):
        self.fn = fn
        self.parts = [(_torus_labels(c, rows), c.coeffs)
                      for c in fn.components]

    def __call__(self, arg):
        out = []
        for labels, coeffs in self.parts:
            if not len(coeffs):
                out.append(np.zeros(arg.shape[:-1], dtype=complex))
            else:
                out.append(np.exp(2j * np.pi * (arg @ labels.T)) @ coeffs)
        return np.stack(out, axis=-1)

def _angles(fn, y):
    if fn._torus is None:
        return np.zeros(y.coords.shape[:-1] + (0,))
    return y.factor(fn._torus)

class ModulatedWeight(WeightFunction):
    """f'(y, u) = f(y) w(u + W p(y)) on the extended internal space."""
    real = False

    def __init__(self, f, p, w, rows, base_space):
        self.f = f
        self.p = p
        self.w = w
        self.rows = rows
        self.base_space = base_space
        self._rep = _TorusRepresentation(w, rows)

    def bind(self, space):
        self.space = space
        self._torus = len(space.factors) - 1 if len(self.rows) else None
        return self

    def __call__(self, y):
        base = InternalPoint(self.base_space,
                             y.coords[..., :self.base_space.ncoords])
        arg = _angles(self, y) + self.p(base) @ self.rows.T
        return self.f(base) * self._rep(arg)[..., 0]

    def window(self):
        return self.f.window()

    def breakpoints(self):
        return self.f.breakpoints()

    def to_config(self):
        return {"family": "modulated", "base": self.f.to_config(),
                "deformation": self.p.to_config(),
                "modulation": self.w.to_config(),
                "frequencies": self.rows.tolist()}

class ModulatedDeformation(Deformation):
    """p'(y, u) = p(y) + g(u + W p(y)) on the extended internal space."""

    def __init__(self, p, g, rows, base_space):
        self.p = p
        self.g = g
        self.rows = rows
        self.base_space = base_space
        self._rep = _TorusRepresentation(g, rows)

    def bind(self, space, phys_dim):
        Deformation.bind(self, space, phys_dim)
        self._torus = len(space.factors) - 1 if len(self.rows) else None
        return self

    def __call__(self, y):
        base = InternalPoint(self.base_space,
                             y.coords[..., :self.base_space.ncoords])
        py = self.p(base)
        v = self._rep(_angles(self, y) + py @ self.rows.T)
        return py + v.real

    def sup_bound(self):
        return self.p.sup_bound() + self.g.sup_norm_bound()

    def to_config(self):
        return {"family": "modulated", "base": self.p.to_config(),
                "modulation": self.g.to_config(),
                "frequencies": self.rows.tolist()}

def realize_composed_scheme(scheme, f, p, w, g):
    """A scheme, weight and deformation whose deformed weighted model set
    is the modulation by (w, g) of the one for (scheme, f, p).

    The frequencies of w and g, with w and -w identified, become the
    coordinates of a torus factor appended to the internal space.

    """
    _bind(scheme, f, p)
    if not isinstance(w, ApFunction) or not isinstance(g, ApFunction):
        raise StructuralError("modulations must be trigonometric polynomials")
    if w.dim != scheme.phys_dim or g.dim != scheme.phys_dim:
        raise StructuralError("modulation dimension differs from the scheme")
    rows = _folded_rows([w, g])
    at_origin = complex(np.ravel(w(np.zeros((1, w.dim))))[0])
    if not len(rows) and g.is_zero and at_origin == 1:
        return scheme, f, p
    ext = extend_scheme(scheme, rows)
    f2 = ModulatedWeight(f, p, w, rows, scheme.internal).bind(ext.internal)
    p2 = ModulatedDeformation(p, g, rows, scheme.internal).bind(
        ext.internal, scheme.phys_dim)
    return ext, f2, p2

def commensurate_modulate(crystal, g):
    """The ideal crystal L + F_g obtained by displacing Gamma + F by g,
    where L is the lattice of full periods of g inside Gamma.

    """
    if g.dim != crystal.dim or g.out_dim != crystal.dim or not g.real:
        raise StructuralError("displacement does not fit the crystal")
    per = full_periodicity_on_lattice(g, crystal.basis)
    if per is None:
        bad = incommensurate_frequency(g, crystal.basis)
        log.info("frequency %s is not commensurate with the crystal",
                 None if bad is None else bad.tolist())
        raise PreconditionError(
            "modulation frequency {} is not commensurate with the lattice".format(
                None if bad is None else bad.tolist()))
    E = per.coset_representatives() @ crystal.basis
    points = (E[:, None, :] + crystal.offsets[None, :, :]).reshape(
        -1, crystal.dim)
    moved = points + np.asarray(g(points)).reshape(len(points), crystal.dim)
    log.debug("commensurate modulation: index %d, %d offsets",
              per.index, len(moved))
    return IdealCrystal(per.basis, moved)

def _seed_candidates(points, count, tol):
    seeds = points[:count]
    diffs = (seeds[None, :, :] - seeds[:, None, :]).reshape(-1, points.shape[1])
    diffs = diffs[np.linalg.norm(diffs, axis=1) > tol]
    lead = diffs[np.arange(len(diffs)), np.argmax(np.abs(diffs), axis=1)] \
        if len(diffs) else np.zeros(0)
    diffs = diffs[lead > 0]
    if not len(diffs):
        return diffs
    key = np.round(diffs / max(tol, 1e-15)).astype(np.int64)
    _, first = np.unique(key, axis=0, return_index=True)
    diffs = diffs[np.sort(first)]
    return diffs[np.argsort(np.linalg.norm(diffs, axis=1), kind='stable')]

def _is_period(tree, points, box, t, tol):
    margin = float(np.linalg.norm(t)) + tol
    inner = _grow(box, -margin)
    if np.any(inner[:, 1] <= inner[:, 0]):
        return False
    sel = points[_inside(points, inner)]
    if not len(sel):
        return None
    for shifted in (sel + t, sel - t):
        dist, _ = tree.query(shifted, k=1)
        if np.any(dist > tol):
            return False
    return True

def period_group(comb, tol=1e-9, seed_atoms=None):
    """The lattice of periods of a uniformly weighted patch and the
    offsets F with patch = lattice + F, or None.

    Candidates are differences of the lowest atoms; each is checked on
    the part of the exhaustive region that stays inside it after
    translation.  A patch can only ever refute periodicity, never prove
    it.

    """
    if not len(comb):
        raise PreconditionError("empty comb")
    if np.ptp(comb.weights.real) > tol or np.ptp(comb.weights.imag) > tol:
        raise PreconditionError("period detection needs uniform weights")
    seed_atoms = seed_atoms or apdiffconfig.period_seed_atoms
    canon = comb.canonical(tol)
    points = canon.positions
    box = comb.exhaustive
    tree = cKDTree(points)
    candidates = _seed_candidates(points, seed_atoms, tol)
    sample = points[::max(1, len(points) // 200)]
    validated = []
    for t in candidates:
        if _is_period(tree, sample, box, t, tol) is False:
            continue
        if _is_period(tree, points, box, t, tol):
            validated.append(t)
    log.info("period group: %d candidates, %d validated",
             len(candidates), len(validated))
    d = comb.dim
    basis = []
    for t in validated:
        trial = np.array(basis + [t])
        if np.linalg.matrix_rank(trial, tol=tol) == len(trial):
            basis.append(t)
        if len(basis) == d:
            break
    if len(basis) < d:
        return None
    B = np.array(basis)
    for t in validated:
        c = np.linalg.solve(B.T, t)
        if np.any(np.abs(c - np.rint(c)) > 1e-6):
            log.warning("period %s is not in the lattice spanned by %s",
                        t.tolist(), B.tolist())
    return IdealCrystal(B, points, tol)

def sine_gap(l, epsilon, alpha):
    """Gap between the sine modulated integers l + 1 and l."""
    return 1 + 2 * epsilon * np.cos(2 * np.pi * alpha * (np.asarray(l) + 0.5)) \
        * np.sin(np.pi * alpha)

def sine_gap_interval(epsilon, alpha):
    s = 2 * epsilon * abs(math.sin(math.pi * alpha))
    return 1 - s, 1 + s

class LatticeFunction:
    """x -> F(l*) for x = l a point of the lattice of a scheme with
    compact internal space.  Only defined on lattice points."""
    real = False
    out_dim = 1

    def __init__(self, scheme, fn):
        if not scheme.internal.is_compact:
            raise PreconditionError(
                "lattice functions need a compact internal space")
        self.scheme = scheme
        self.fn = fn
        self.dim = scheme.phys_dim
        self._Vinv = np.linalg.inv(scheme.V)

    def _labels(self, x):
        pts, batch = _as_points(x, self.dim)
        k = pts @ self._Vinv
        if np.any(np.abs(k - np.rint(k)) > 1e-9):
            raise PreconditionError("point is not in the lattice")
        return np.rint(k).astype(np.int64), batch

    def __call__(self, x):
        k, batch = self._labels(x)
        v = self.fn(self.scheme.internal_of(k))
        return v.reshape(batch + v.shape[1:])

    def to_config(self):
        return {"lattice_function": self.fn.to_config()}

class LatticeDisplacement(LatticeFunction):
    real = True

    def __init__(self, scheme, fn):
        LatticeFunction.__init__(self, scheme, fn)
        self.out_dim = self.dim

    def sup_norm_bound(self):
        return self.fn.sup_bound()

def lattice_modulation_of(scheme, f, p):
    """(w, g) with w(l) = f(l*) and g(l) = p(l*), so that modulating the
    lattice comb by them gives the deformed weighted model set.

    """
    _bind(scheme, f, p)
    return LatticeFunction(scheme, f), LatticeDisplacement(scheme, p)

def convolve_tent(comb, x, halfwidth):
    """(comb * phi)(x) for phi the unit-height tent of the given
    half-width (product over coordinates)."""
    x = np.asarray(x, dtype=float).reshape(-1, comb.dim)
    out = np.zeros(len(x), dtype=complex)
    if not len(comb) or not len(x):
        return out
    if comb.dim == 1:
        order = np.argsort(comb.positions[:, 0])
        pos = comb.positions[order, 0]
        w = comb.weights[order]
        lo = np.searchsorted(pos, x[:, 0] - halfwidth, side='right')
        hi = np.searchsorted(pos, x[:, 0] + halfwidth, side='left')
        for j in range(int(np.max(hi - lo, initial=0))):
            idx = lo + j
            ok = idx < hi
            i = idx[ok]
            out[ok] += w[i] * (1 - np.abs(x[ok, 0] - pos[i]) / halfwidth)
        return out
    m = cKDTree(x).sparse_distance_matrix(
        cKDTree(comb.positions), halfwidth, p=np.inf, output_type='ndarray')
    if len(m):
        rows, cols = m['i'], m['j']
        u = 1 - np.abs(x[rows] - comb.positions[cols]) / halfwidth
        contrib = comb.weights[cols] * np.prod(np.maximum(u, 0.0), axis=1)
        np.add.at(out, rows, contrib)
    return out

def _gap_witness(periods):
    if len(periods) < 2:
        return np.inf
    if periods.shape[1] == 1:
        return float(np.max(np.diff(np.sort(periods[:, 0]))))
    dist, _ = cKDTree(periods).query(periods, k=2)
    return float(np.max(dist[:, 1]))

@dataclass
class SmoothingCheck:
    report: PeriodReport
    max_deviation: float
    kernel_halfwidth: float
    sample_step: float

def smoothing_almost_periods(scheme, f, p, radius, scan_range, epsilon,
                             kernel_halfwidth=0.5, check_halfwidth=None,
                             sample_step=None):
    """Lattice points t in [0, T]^d with t* in the radius-ball about the
    identity of H, each checked as an epsilon-almost period of
    nu * phi on a sample grid of [-R, R]^d.

    """
    _bind(scheme, f, p)
    d = scheme.phys_dim
    T = float(scan_range)
    if T <= 0 or epsilon <= 0 or kernel_halfwidth <= 0:
        raise PreconditionError(
            "scan range, epsilon and kernel half-width must be positive")
    R = float(check_halfwidth if check_halfwidth is not None else T)
    step = sample_step or kernel_halfwidth / 4
    V = almost_period_window(scheme, radius)
    cand = enumerate_model_set(scheme, V, [(0.0, T)] * d)
    reach = R + T + kernel_halfwidth + 1
    comb = deformed_weighted_model_set(scheme, f, p, [(-reach, reach)] * d)
    axis = np.arange(-R, R + step / 2, step)
    grid = np.stack(np.meshgrid(*([axis] * d), indexing='ij'),
                    axis=-1).reshape(-1, d)
    base = convolve_tent(comb, grid, kernel_halfwidth)
    kept = []
    rejected = []
    worst = 0.0
    for t in cand.positions:
        dev = float(np.max(np.abs(
            convolve_tent(comb, grid - t, kernel_halfwidth) - base)))
        if dev <= epsilon:
            kept.append(t)
            worst = max(worst, dev)
        else:
            rejected.append(t)
    periods = np.array(kept).reshape(-1, d)
    log.info("smoothing almost periods: %d candidates, %d confirmed, worst "
             "deviation %g", len(cand), len(periods), worst)
    report = PeriodReport(epsilon, periods, _gap_witness(periods),
                          np.eye(d)[0], None,
                          np.array(rejected).reshape(-1, d))
    return SmoothingCheck(report, worst, kernel_halfwidth, step)
