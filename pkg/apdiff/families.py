"""Weight functions f and deformation maps p on an internal space.

Families are closed-form so a run can be reproduced from its JSON
configuration alone.  Every concrete family sets a 'family' name and is
entered in the registry of its root class; from_config() looks it up
there.

All functions take an InternalPoint (usually a batch) and return one
value per point: complex for weights, a real R^d vector for
deformations.

"""

import logging
import numpy as np
from .plugins import ClassPluginMount
from .cps import ProductWindow, EuclideanBox, CyclicSubset
from .errors import ConfigError, StructuralError, PreconditionError, \
    NumericalInvariantError

log = logging.getLogger(__name__)

def _only_factor(space, kind):
    matching = [i for i, f in enumerate(space.factors) if f.kind == kind]
    if len(matching) != 1:
        raise StructuralError(
            "{!r} has {} {} factors; say which one".format(
                space, len(matching), kind))
    return matching[0]

def _resolve_factor(space, factor, kind):
    if factor is None:
        return _only_factor(space, kind)
    if not 0 <= factor < len(space.factors) \
       or space.factors[factor].kind != kind:
        raise StructuralError(
            "factor {} of {!r} is not a {} factor".format(factor, space, kind))
    return factor

def _coords(values, n):
    v = np.array(values, dtype=float).ravel()
    if len(v) == 1:
        v = np.repeat(v, n)
    if len(v) != n:
        raise StructuralError("expected {} coordinates, got {}".format(
            n, len(v)))
    return v

def _lookup(reader, root):
    name = reader.string("family")
    cls = root.registry.get(name)
    if cls is None:
        raise ConfigError("{}: unknown family {!r}; known families are {}".format(
            reader.path("family"), name, ", ".join(sorted(root.registry))))
    return cls

class WeightFunction(metaclass=ClassPluginMount):
    """A compactly supported function f on the internal space."""
    real = True

    def bind(self, space):
        """Check the function against a space; returns self."""
        self.space = space
        return self

    def window(self):
        """A window containing the support of f."""
        return ProductWindow()

    def breakpoints(self):
        """Quadrature breakpoints per Euclidean coordinate index."""
        bounds = self.window().euclidean_bounds(self.space)
        return {int(c): np.array(b) for c, b in zip(
            self.space.euclidean_coords, bounds) if np.all(np.isfinite(b))}

    def support_box(self):
        """Breakpoint lists for every Euclidean coordinate, as taken by
        groups.quadrature_rule.

        """
        bp = self.breakpoints()
        box = []
        for c in self.space.euclidean_coords:
            if int(c) not in bp:
                raise PreconditionError(
                    "weight {} does not have compact support on Euclidean "
                    "coordinate {}".format(self.family_name, int(c)))
            box.append(bp[int(c)])
        return box

    @property
    def family_name(self):
        return getattr(self, "family", type(self).__name__)

    @staticmethod
    def from_config(reader, space):
        cls = _lookup(reader, WeightFunction)
        return cls.parse(reader, space).bind(space)

class ConstantWeight(WeightFunction):
    family = "constant"

    def __init__(self, value=1.0):
        self.value = complex(value)
        self.real = self.value.imag == 0

    def __call__(self, y):
        return np.full(y.coords.shape[:-1], self.value, dtype=complex)

    @classmethod
    def parse(cls, reader, space):
        return cls(reader.complex("value", 1.0))

    def to_config(self):
        return {"family": self.family, "value": _complex_config(self.value)}

class TentWeight(WeightFunction):
    """Product over the coordinates of one Euclidean factor of
    max(0, 1 - |y - c| / h)."""
    family = "tent"

    def __init__(self, center, halfwidth, factor=None):
        self.factor = factor
        self.center = np.array(center, dtype=float).ravel()
        self.halfwidth = np.array(halfwidth, dtype=float).ravel()
        if np.any(self.halfwidth <= 0):
            raise StructuralError("tent half-width must be positive")

    def bind(self, space):
        self.space = space
        self.factor = _resolve_factor(space, self.factor, "euclidean")
        n = space.factors[self.factor].ncoords
        self.center = _coords(self.center, n)
        self.halfwidth = _coords(self.halfwidth, n)
        return self

    def _shape(self, u):
        return np.maximum(0.0, 1.0 - np.abs(u))

    def __call__(self, y):
        u = (y.factor(self.factor) - self.center) / self.halfwidth
        return np.prod(self._shape(u), axis=-1).astype(complex)

    def window(self):
        return ProductWindow({self.factor: EuclideanBox(
            np.column_stack([self.center - self.halfwidth,
                             self.center + self.halfwidth]))})

    def breakpoints(self):
        s = self.space.factor_slice(self.factor)
        return {c: np.array([m - h, m, m + h]) for c, m, h in zip(
            range(s.start, s.stop), self.center, self.halfwidth)}

    @classmethod
    def parse(cls, reader, space):
        return cls(reader.floats("center"), reader.floats("halfwidth"),
                   reader.integer("factor", None))

    def to_config(self):
        return {"family": self.family, "factor": self.factor,
                "center": self.center.tolist(),
                "halfwidth": self.halfwidth.tolist()}

class BumpWeight(TentWeight):
    """Raised cosine (1 + cos(pi u)) / 2 on |u| < 1, u = (y - c) / h."""
    family = "bump"

    def _shape(self, u):
        return np.where(np.abs(u) < 1, (1 + np.cos(np.pi * u)) / 2, 0.0)

    def breakpoints(self):
        s = self.space.factor_slice(self.factor)
        return {c: np.array([m - h, m + h]) for c, m, h in zip(
            range(s.start, s.stop), self.center, self.halfwidth)}

class TrigWeight(WeightFunction):
    """sum c exp(2 pi i label . y) on one torus factor."""
    family = "trig"

    def __init__(self, terms, factor=None):
        self.factor = factor
        self.labels = np.array([t[0] for t in terms], dtype=float)
        self.coeffs = np.array([t[1] for t in terms], dtype=complex)
        if len(self.labels) and np.any(self.labels != np.rint(self.labels)):
            raise StructuralError("torus frequencies must be integers")

    def bind(self, space):
        self.space = space
        self.factor = _resolve_factor(space, self.factor, "torus")
        n = space.factors[self.factor].ncoords
        self.labels = self.labels.reshape(-1, n)
        table = {tuple(l): c for l, c in zip(self.labels, self.coeffs)}
        self.real = all(abs(table.get(tuple(-l + 0.0), np.inf) - np.conj(c))
                        <= 1e-12 * max(1.0, abs(c))
                        for l, c in zip(self.labels, self.coeffs))
        return self

    def __call__(self, y):
        if not len(self.coeffs):
            return np.zeros(y.coords.shape[:-1], dtype=complex)
        phases = y.factor(self.factor) @ self.labels.T
        return np.exp(2j * np.pi * phases) @ self.coeffs

    @classmethod
    def parse(cls, reader, space):
        terms = [(t.floats("label"), t.complex("coefficient"))
                 for t in reader.children("terms")]
        return cls(terms, reader.integer("factor", None))

    def to_config(self):
        return {"family": self.family, "factor": self.factor,
                "terms": [{"label": [int(x) for x in l],
                           "coefficient": _complex_config(c)}
                          for l, c in zip(self.labels, self.coeffs)]}

class TableWeight(WeightFunction):
    """Tabulated values on the residues of one cyclic factor; zero off
    the table."""
    family = "table"

    def __init__(self, values, factor=None):
        self.factor = factor
        self.values = {int(k): complex(v) for k, v in values.items()}

    def bind(self, space):
        self.space = space
        self.factor = _resolve_factor(space, self.factor, "cyclic")
        order = space.factors[self.factor].order
        self._table = np.zeros(order, dtype=complex)
        for k, v in self.values.items():
            self._table[k % order] += v
        self.real = bool(np.all(self._table.imag == 0))
        return self

    def __call__(self, y):
        idx = np.rint(y.factor(self.factor)[..., 0]).astype(np.int64)
        return self._table[idx]

    def window(self):
        support = np.flatnonzero(self._table)
        if not len(support):
            raise PreconditionError("table weight is identically zero")
        return ProductWindow({self.factor: CyclicSubset(support.tolist())})

    @classmethod
    def parse(cls, reader, space):
        values = {}
        for key, child in reader.mapping("values"):
            try:
                values[int(key)] = child
            except ValueError:
                raise ConfigError("{}: residue {!r} is not an integer".format(
                    reader.path("values"), key))
        return cls({k: reader.as_complex(v, "values." + str(k))
                    for k, v in values.items()}, reader.integer("factor", None))

    def to_config(self):
        return {"family": self.family, "factor": self.factor,
                "values": {str(k): _complex_config(v)
                           for k, v in sorted(self.values.items())}}

class WindowWeight(WeightFunction):
    """Indicator function of a window."""
    family = "window"

    def __init__(self, window):
        self._window = window

    def bind(self, space):
        self.space = space
        self._window.euclidean_bounds(space)
        return self

    def __call__(self, y):
        return self._window.contains(y).astype(complex)

    def window(self):
        return self._window

    @classmethod
    def parse(cls, reader, space):
        return cls(reader.window("parts"))

    def to_config(self):
        return {"family": self.family, "parts": self._window.to_config()}

class ProductWeight(WeightFunction):
    family = "product"

    def __init__(self, parts):
        self.parts = list(parts)

    def bind(self, space):
        self.space = space
        self.parts = [p.bind(space) for p in self.parts]
        self.real = all(p.real for p in self.parts)
        return self

    def __call__(self, y):
        out = np.ones(y.coords.shape[:-1], dtype=complex)
        for p in self.parts:
            out = out * p(y)
        return out

    def window(self):
        w = ProductWindow()
        for p in self.parts:
            w = w.intersect(p.window())
        return w

    def breakpoints(self):
        merged = {}
        for p in self.parts:
            for c, b in p.breakpoints().items():
                merged.setdefault(c, []).append(np.asarray(b))
        out = {}
        for c, lists in merged.items():
            lo = max(b[0] for b in lists)
            hi = min(b[-1] for b in lists)
            if hi <= lo:
                raise PreconditionError("product weight has empty support")
            pts = np.unique(np.concatenate(lists))
            out[c] = np.concatenate([[lo], pts[(pts > lo) & (pts < hi)], [hi]])
        return out

    @classmethod
    def parse(cls, reader, space):
        return cls([WeightFunction.from_config(r, space)
                    for r in reader.children("parts")])

    def to_config(self):
        return {"family": self.family,
                "parts": [p.to_config() for p in self.parts]}

def _complex_config(c):
    c = complex(c)
    return float(c.real) if c.imag == 0 else [float(c.real), float(c.imag)]

class Deformation(metaclass=ClassPluginMount):
    """A continuous map p from the internal space to R^d."""

    def bind(self, space, phys_dim):
        self.space = space
        self.phys_dim = phys_dim
        return self

    def _vector(self, v):
        v = np.array(v, dtype=float).ravel()
        if len(v) != self.phys_dim:
            raise StructuralError(
                "deformation vector {} is not in R^{}".format(
                    v.tolist(), self.phys_dim))
        return v

    @staticmethod
    def from_config(reader, space, phys_dim):
        cls = _lookup(reader, Deformation)
        return cls.parse(reader, space).bind(space, phys_dim)

class ZeroDeformation(Deformation):
    family = "zero"

    def __call__(self, y):
        return np.zeros(y.coords.shape[:-1] + (self.phys_dim,))

    def sup_bound(self):
        return 0.0

    @classmethod
    def parse(cls, reader, space):
        return cls()

    def to_config(self):
        return {"family": self.family}

class TrigDeformation(Deformation):
    """Real trigonometric polynomial on one torus factor, one term list
    per physical coordinate."""
    family = "trig"

    def __init__(self, components, factor=None):
        self.factor = factor
        self._components = [
            (np.array([t[0] for t in terms], dtype=float),
             np.array([t[1] for t in terms], dtype=complex))
            for terms in components]

    def bind(self, space, phys_dim):
        Deformation.bind(self, space, phys_dim)
        self.factor = _resolve_factor(space, self.factor, "torus")
        if len(self._components) != phys_dim:
            raise StructuralError(
                "deformation has {} components for R^{}".format(
                    len(self._components), phys_dim))
        n = space.factors[self.factor].ncoords
        self._components = [(l.reshape(-1, n), c)
                            for l, c in self._components]
        for labels, coeffs in self._components:
            table = {tuple(l): c for l, c in zip(labels, coeffs)}
            for l, c in zip(labels, coeffs):
                if abs(table.get(tuple(-l + 0.0), np.inf) - np.conj(c)) > \
                   1e-12 * max(1.0, abs(c)):
                    raise StructuralError(
                        "deformation term {} has no conjugate partner".format(
                            l.tolist()))
        return self

    def __call__(self, y):
        block = y.factor(self.factor)
        out = np.zeros(block.shape[:-1] + (self.phys_dim,))
        for j, (labels, coeffs) in enumerate(self._components):
            if not len(coeffs):
                continue
            v = np.exp(2j * np.pi * (block @ labels.T)) @ coeffs
            if np.any(np.abs(v.imag) > 1e-12 * max(1.0, np.abs(coeffs).sum())):
                raise NumericalInvariantError(
                    "imaginary residue in a real deformation")
            out[..., j] = v.real
        return out

    def sup_bound(self):
        return float(np.linalg.norm([np.abs(c).sum()
                                     for _, c in self._components]))

    @classmethod
    def parse(cls, reader, space):
        comps = [[(t.floats("label"), t.complex("coefficient"))
                  for t in c.children("terms")]
                 for c in reader.children("components")]
        return cls(comps, reader.integer("factor", None))

    def to_config(self):
        return {"family": "trig", "factor": self.factor,
                "components": [{"terms": [
                    {"label": [int(x) for x in l],
                     "coefficient": _complex_config(c)}
                    for l, c in zip(labels, coeffs)]}
                    for labels, coeffs in self._components]}

class SineDeformation(TrigDeformation):
    """p(y) = amp * sin(2 pi label . y + phase), amp a vector in R^d."""
    family = "sine"

    def __init__(self, amp, label=1, phase=0.0, factor=None):
        self.amp = np.array(amp, dtype=float).ravel()
        self.label = np.array(label, dtype=float).ravel()
        self.phase = float(phase)
        c = np.exp(1j * self.phase) / 2j
        TrigDeformation.__init__(
            self, [[(self.label, a * c), (-self.label, a * np.conj(c))]
                   for a in self.amp], factor)

    @classmethod
    def parse(cls, reader, space):
        return cls(reader.floats("amp"), reader.floats("label", [1]),
                   reader.number("phase", 0.0), reader.integer("factor", None))

    def to_config(self):
        return {"family": self.family, "factor": self.factor,
                "amp": self.amp.tolist(),
                "label": [int(x) for x in self.label],
                "phase": self.phase}

class SawtoothDeformation(Deformation):
    """p(y) = vector * y for the coordinate y in [0, 1) of a
    one-dimensional torus factor.  Discontinuous at 0."""
    family = "sawtooth"

    def __init__(self, vector, factor=None):
        self.vector = vector
        self.factor = factor

    def bind(self, space, phys_dim):
        Deformation.bind(self, space, phys_dim)
        self.factor = _resolve_factor(space, self.factor, "torus")
        if space.factors[self.factor].ncoords != 1:
            raise StructuralError("sawtooth needs a one-dimensional torus")
        self.vector = self._vector(self.vector)
        return self

    def __call__(self, y):
        return y.factor(self.factor) * self.vector

    def sup_bound(self):
        return float(np.linalg.norm(self.vector))

    @classmethod
    def parse(cls, reader, space):
        return cls(reader.floats("vector"), reader.integer("factor", None))

    def to_config(self):
        return {"family": self.family, "factor": self.factor,
                "vector": self.vector.tolist()}

class TentDeformation(Deformation):
    """p(y) = vector * tent(y) on one Euclidean factor."""
    family = "tent"

    def __init__(self, center, halfwidth, vector, factor=None):
        self._tent = TentWeight(center, halfwidth, factor)
        self.vector = vector

    def bind(self, space, phys_dim):
        Deformation.bind(self, space, phys_dim)
        self._tent.bind(space)
        self.vector = self._vector(self.vector)
        return self

    def __call__(self, y):
        return self._tent(y).real[..., None] * self.vector

    def sup_bound(self):
        return float(np.linalg.norm(self.vector))

    @classmethod
    def parse(cls, reader, space):
        return cls(reader.floats("center"), reader.floats("halfwidth"),
                   reader.floats("vector"), reader.integer("factor", None))

    def to_config(self):
        doc = self._tent.to_config()
        doc["vector"] = self.vector.tolist()
        return doc

class TableDeformation(Deformation):
    """Tabulated vectors on the residues of one cyclic factor."""
    family = "table"

    def __init__(self, values, factor=None):
        self.values = values
        self.factor = factor

    def bind(self, space, phys_dim):
        Deformation.bind(self, space, phys_dim)
        self.factor = _resolve_factor(space, self.factor, "cyclic")
        order = space.factors[self.factor].order
        self.values = {int(k) % order: self._vector(v)
                       for k, v in self.values.items()}
        self._table = np.zeros((order, phys_dim))
        for k, v in self.values.items():
            self._table[k] = v
        return self

    def __call__(self, y):
        idx = np.rint(y.factor(self.factor)[..., 0]).astype(np.int64)
        return self._table[idx]

    def sup_bound(self):
        return float(np.max(np.linalg.norm(self._table, axis=1)))

    @classmethod
    def parse(cls, reader, space):
        values = {}
        for key, _ in reader.mapping("values"):
            try:
                values[int(key)] = reader.child("values").floats(key)
            except ValueError:
                raise ConfigError("{}: residue {!r} is not an integer".format(
                    reader.path("values"), key))
        return cls(values, reader.integer("factor", None))

    def to_config(self):
        return {"family": self.family, "factor": self.factor,
                "values": {str(k): v.tolist()
                           for k, v in sorted(self.values.items())}}

class SumDeformation(Deformation):
    family = "sum"

    def __init__(self, parts):
        self.parts = list(parts)

    def bind(self, space, phys_dim):
        Deformation.bind(self, space, phys_dim)
        self.parts = [p.bind(space, phys_dim) for p in self.parts]
        return self

    def __call__(self, y):
        out = np.zeros(y.coords.shape[:-1] + (self.phys_dim,))
        for p in self.parts:
            out = out + p(y)
        return out

    def sup_bound(self):
        return float(sum(p.sup_bound() for p in self.parts))

    @classmethod
    def parse(cls, reader, space):
        return cls([_parse_deformation(r, space)
                    for r in reader.children("parts")])

    def to_config(self):
        return {"family": self.family,
                "parts": [p.to_config() for p in self.parts]}

def _parse_deformation(reader, space):
    return _lookup(reader, Deformation).parse(reader, space)
