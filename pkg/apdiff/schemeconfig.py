"""Scheme configuration documents.

A configuration is a JSON object naming a cut-and-project scheme, a
weight family, a deformation family and optionally a modulation.  It is
either written out in full or given as a preset, which is expanded to
the full form before anything else happens.  SchemeConfig.serialize()
writes the full form with sorted keys and every float at 17
significant digits, so parsing the output gives the same document.

"""

import logging
import json
import math
from fractions import Fraction
import numpy as np
from . import apdiffconfig
from .groups import InternalSpace, Euclidean, Torus, Cyclic
from .cps import CutProjectScheme, ProductWindow, EuclideanBox, TorusBox, \
    CyclicSubset, ideal_crystal_scheme
from .apfun import ApFunction, tone_terms
from .families import WeightFunction, Deformation
from .combs import fingerprint
from .errors import ConfigError, StructuralError

log = logging.getLogger(__name__)

TAU = (1 + math.sqrt(5)) / 2

# Named numbers accepted wherever a number is expected
NAMED_NUMBERS = {
    "golden4": 1 / TAU ** 4,
    "tau": TAU,
}

_MISSING = object()

def to_number(value, where, exact=False):
    """A float, or with exact=True a Fraction where the input is exact
    (an integer or a 'p/q' string).

    """
    if isinstance(value, bool):
        raise ConfigError("{}: expected a number, got {}".format(
            where, json.dumps(value)))
    if isinstance(value, int):
        return Fraction(value) if exact else float(value)
    if isinstance(value, float):
        if not math.isfinite(value):
            raise ConfigError("{}: number is not finite".format(where))
        return value
    if isinstance(value, str):
        if value in NAMED_NUMBERS:
            return NAMED_NUMBERS[value]
        try:
            fr = Fraction(value)
        except (ValueError, ZeroDivisionError):
            raise ConfigError("{}: {!r} is not a number; named numbers are "
                              "{}".format(where, value,
                                          ", ".join(sorted(NAMED_NUMBERS))))
        return fr if exact else float(fr)
    raise ConfigError("{}: expected a number, got {}".format(
        where, json.dumps(value)))

class Reader:
    """Typed access to one object of a configuration document.  Errors
    name the offending field by its path.

    """
    def __init__(self, doc, where=""):
        if not isinstance(doc, dict):
            raise ConfigError("{}: expected an object".format(where or "document"))
        self.doc = doc
        self.where = where

    def path(self, key):
        return "{}.{}".format(self.where, key) if self.where else str(key)

    def raw(self, key, default=_MISSING):
        if key in self.doc:
            return self.doc[key]
        if default is _MISSING:
            raise ConfigError("{}: missing".format(self.path(key)))
        return default

    def string(self, key, default=_MISSING):
        v = self.raw(key, default)
        if not isinstance(v, str):
            raise ConfigError("{}: expected a string".format(self.path(key)))
        return v

    def number(self, key, default=_MISSING):
        v = self.raw(key, default)
        return to_number(v, self.path(key))

    def integer(self, key, default=_MISSING):
        v = self.raw(key, default)
        if v is None and default is None:
            return None
        if isinstance(v, bool) or not isinstance(v, int):
            raise ConfigError("{}: expected an integer".format(self.path(key)))
        return v

    def floats(self, key, default=_MISSING):
        v = self.raw(key, default)
        if not isinstance(v, list):
            v = [v]
        return [to_number(x, "{}[{}]".format(self.path(key), i))
                for i, x in enumerate(v)]

    def as_complex(self, value, where):
        if isinstance(value, list):
            if len(value) != 2:
                raise ConfigError("{}: a complex number is [re, im]".format(
                    self.path(where)))
            return complex(to_number(value[0], self.path(where) + "[0]"),
                           to_number(value[1], self.path(where) + "[1]"))
        return complex(to_number(value, self.path(where)))

    def complex(self, key, default=_MISSING):
        return self.as_complex(self.raw(key, default), key)

    def child(self, key):
        return Reader(self.raw(key), self.path(key))

    def items(self, key):
        v = self.raw(key)
        if not isinstance(v, list):
            raise ConfigError("{}: expected a list".format(self.path(key)))
        return v

    def children(self, key):
        return [Reader(x, "{}[{}]".format(self.path(key), i))
                for i, x in enumerate(self.items(key))]

    def mapping(self, key):
        v = self.raw(key)
        if not isinstance(v, dict):
            raise ConfigError("{}: expected an object".format(self.path(key)))
        return sorted(v.items())

    def window(self, key):
        parts = {}
        for r in self.children(key):
            factors = r.raw("factors")
            if not isinstance(factors, list) or not factors or \
               not all(isinstance(i, int) for i in factors):
                raise ConfigError("{}: expected a list of factor indices".format(
                    r.path("factors")))
            part = r.child("part")
            kind = part.string("type")
            if kind == "euclidean_box":
                p = EuclideanBox([[to_number(x, part.path("bounds"))
                                   for x in b] for b in part.items("bounds")])
            elif kind == "torus_box":
                p = TorusBox([[to_number(x, part.path("arcs")) for x in a]
                              for a in part.items("arcs")])
            elif kind == "cyclic_subset":
                p = CyclicSubset(part.items("residues"))
            else:
                raise ConfigError("{}: unknown window part {!r}".format(
                    part.path("type"), kind))
            parts[tuple(factors) if len(factors) > 1 else factors[0]] = p
        return ProductWindow(parts)

def _factor(r):
    kind = r.string("type")
    if kind == "euclidean":
        return Euclidean(r.integer("dim", 1))
    if kind == "torus":
        return Torus(r.integer("dim", 1))
    if kind == "cyclic":
        return Cyclic(r.integer("order"))
    raise ConfigError("{}: unknown factor type {!r}".format(r.path("type"), kind))

def _literal_terms(value, where, exact=True):
    """Term list of one scalar ApFunction literal."""
    if isinstance(value, list):
        terms = []
        for i, v in enumerate(value):
            terms.extend(_literal_terms(v, "{}[{}]".format(where, i)))
        return terms
    if not isinstance(value, dict):
        raise ConfigError("{}: not a function literal".format(where))
    r = Reader(value, where)
    if "tones" in value:
        terms = []
        for i, t in enumerate(r.items("tones")):
            terms.extend(_literal_terms(t, "{}[{}]".format(r.path("tones"), i)))
        return terms
    if "frequencies" in value:
        freqs = r.items("frequencies")
        coeffs = r.items("coefficients")
        if len(freqs) != len(coeffs):
            raise ConfigError("{}: {} frequencies but {} coefficients".format(
                where, len(freqs), len(coeffs)))
        terms = []
        for i, (f, c) in enumerate(zip(freqs, coeffs)):
            row = f if isinstance(f, list) else [f]
            terms.append((
                [to_number(x, "{}.frequencies[{}]".format(where, i), exact)
                 for x in row],
                r.as_complex(c, "coefficients[{}]".format(i))))
        return terms
    if "amp" in value:
        freq = r.raw("freq")
        row = freq if isinstance(freq, list) else [freq]
        shape = r.string("shape", "sin")
        if shape not in ("sin", "cos"):
            raise ConfigError("{}: shape must be sin or cos".format(
                r.path("shape")))
        return tone_terms(r.number("amp"),
                          [to_number(x, r.path("freq"), exact) for x in row],
                          r.number("phase", 0.0), shape)
    raise ConfigError("{}: not a function literal".format(where))

def parse_weight_literal(value, dim, where="modulation.weight"):
    try:
        return ApFunction.scalar(dim, _literal_terms(value, where))
    except StructuralError as e:
        raise ConfigError("{}: {}".format(where, e))

def parse_displacement_literal(value, dim, where="modulation.displacement"):
    if isinstance(value, dict) and "components" in value:
        comps = Reader(value, where).items("components")
        terms = [_literal_terms(c, "{}.components[{}]".format(where, i))
                 for i, c in enumerate(comps)]
    elif dim == 1:
        terms = [_literal_terms(value, where)]
    else:
        raise ConfigError("{}: a displacement on R^{} needs 'components'".format(
            where, dim))
    try:
        return ApFunction.displacement(dim, terms)
    except StructuralError as e:
        raise ConfigError("{}: {}".format(where, e))

def _sine_preset(r):
    epsilon = r.number("epsilon", 0.05)
    alpha = r.number("alpha", "golden4")
    return {"name": "sine", "phys_dim": 1,
            "internal": [{"type": "torus", "dim": 1}],
            "generators": [{"phys": [1.0], "internal": [[alpha]]}],
            "weight": {"family": "constant", "value": 1.0},
            "deformation": {"family": "sine", "factor": 0, "amp": [epsilon],
                            "label": [1], "phase": 0.0}}

def _fibonacci_preset(r):
    lo, hi = -1.0, TAU - 1
    weight = r.raw("weight", "window")
    if weight == "window":
        weight = {"family": "window", "parts": [
            {"factors": [0], "part": {"type": "euclidean_box",
                                      "bounds": [[lo, hi]]}}]}
    elif weight == "tent":
        weight = {"family": "tent", "factor": 0, "center": [(lo + hi) / 2],
                  "halfwidth": [(hi - lo) / 2]}
    elif not isinstance(weight, dict):
        raise ConfigError("{}: expected \"window\", \"tent\" or a weight "
                          "family".format(r.path("weight")))
    return {"name": "fibonacci", "phys_dim": 1,
            "internal": [{"type": "euclidean", "dim": 1}],
            "generators": [{"phys": [1.0], "internal": [[1.0]]},
                           {"phys": [TAU], "internal": [[1 - TAU]]}],
            "weight": weight,
            "deformation": {"family": "zero"}}

def _ideal_crystal_preset(r):
    basis = [[to_number(x, r.path("gamma_basis")) for x in row]
             for row in r.items("gamma_basis")]
    offsets = []
    for i, o in enumerate(r.items("offsets")):
        o = o if isinstance(o, list) else [o]
        offsets.append([to_number(x, "{}[{}]".format(r.path("offsets"), i))
                        for x in o])
    try:
        scheme, window = ideal_crystal_scheme(basis, offsets)
    except StructuralError as e:
        raise ConfigError("{}: {}".format(r.where or "ideal_crystal", e))
    doc = scheme.to_config()
    doc["weight"] = {"family": "window", "parts": window.to_config()}
    doc["deformation"] = {"family": "zero"}
    return doc

def _lattice_preset(r):
    d = r.integer("dim", 1)
    if d < 1:
        raise ConfigError("{}: dimension must be positive".format(r.path("dim")))
    return {"name": "lattice", "phys_dim": d,
            "internal": [{"type": "cyclic", "order": 1}],
            "generators": [{"phys": [1.0 if i == j else 0.0 for j in range(d)],
                            "internal": [0]} for i in range(d)],
            "weight": {"family": "constant", "value": 1.0},
            "deformation": {"family": "zero"}}

PRESETS = {
    "sine": _sine_preset,
    "fibonacci": _fibonacci_preset,
    "ideal_crystal": _ideal_crystal_preset,
    "lattice": _lattice_preset,
}

def expand_preset(doc):
    r = Reader(doc)
    name = r.string("preset")
    if name not in PRESETS:
        raise ConfigError("preset: unknown preset {!r}; known presets are "
                          "{}".format(name, ", ".join(sorted(PRESETS))))
    expanded = PRESETS[name](r)
    if "modulation" in doc:
        expanded["modulation"] = doc["modulation"]
    return expanded

class SchemeConfig:
    """A parsed configuration: the normalised document and the objects
    built from it.

    """
    def __init__(self, doc):
        if "preset" in doc:
            doc = expand_preset(doc)
        r = Reader(doc)
        d = r.integer("phys_dim")
        if d < 1:
            raise ConfigError("phys_dim: must be positive")
        factors = [_factor(f) for f in r.children("internal")]
        if not factors:
            raise ConfigError("internal: needs at least one factor")
        space = InternalSpace(factors)
        V = []
        S = []
        for g in r.children("generators"):
            phys = g.floats("phys")
            if len(phys) != d:
                raise ConfigError("{}: expected {} coordinates".format(
                    g.path("phys"), d))
            parts = g.items("internal")
            if len(parts) != len(factors):
                raise ConfigError("{}: expected one entry per factor ({})".format(
                    g.path("internal"), len(factors)))
            row = []
            for j, (f, c) in enumerate(zip(factors, parts)):
                where = "{}[{}]".format(g.path("internal"), j)
                if f.kind == "cyclic":
                    if isinstance(c, bool) or not isinstance(c, int):
                        raise ConfigError("{}: expected an integer".format(where))
                    row.append(float(c))
                else:
                    c = c if isinstance(c, list) else [c]
                    if len(c) != f.ncoords:
                        raise ConfigError("{}: expected {} coordinates".format(
                            where, f.ncoords))
                    row.extend(to_number(x, where) for x in c)
            V.append(phys)
            S.append(row)
        try:
            self.scheme = CutProjectScheme(d, space, np.array(V).reshape(-1, d),
                                           np.array(S).reshape(-1, space.ncoords),
                                           name=doc.get("name"))
        except StructuralError as e:
            raise ConfigError("generators: {}".format(e))
        try:
            self.weight = WeightFunction.from_config(r.child("weight"), space)
        except StructuralError as e:
            raise ConfigError("weight: {}".format(e))
        try:
            self.deformation = Deformation.from_config(
                r.child("deformation"), space, d)
        except StructuralError as e:
            raise ConfigError("deformation: {}".format(e))
        self.modulation = None
        if "modulation" in doc:
            m = r.child("modulation")
            w = parse_weight_literal(m.raw("weight"), d) if "weight" in m.doc \
                else ApFunction.constant(d, 1.0)
            g = parse_displacement_literal(m.raw("displacement"), d) \
                if "displacement" in m.doc else ApFunction.displacement(d)
            self.modulation = (w, g)
        self.document = self._normalised()

    def _normalised(self):
        doc = self.scheme.to_config()
        doc["weight"] = self.weight.to_config()
        doc["deformation"] = self.deformation.to_config()
        if self.modulation is not None:
            w, g = self.modulation
            doc["modulation"] = {"weight": w.to_config(),
                                 "displacement": g.to_config()}
        return doc

    @property
    def phys_dim(self):
        return self.scheme.phys_dim

    @property
    def fingerprint(self):
        return fingerprint(self.document)

    @classmethod
    def parse(cls, text):
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as e:
            raise ConfigError("line {} column {}: {}".format(
                e.lineno, e.colno, e.msg))
        if not isinstance(doc, dict):
            raise ConfigError("document: expected a JSON object")
        return cls(doc)

    @classmethod
    def load(cls, filename):
        try:
            with open(filename) as f:
                text = f.read()
        except OSError as e:
            raise ConfigError("{}: {}".format(filename, e.strerror))
        return cls.parse(text)

    @classmethod
    def preset(cls, name, **params):
        doc = dict(params)
        doc["preset"] = name
        return cls(doc)

    def serialize(self):
        return dumps(self.document)

def _float_text(x):
    s = apdiffconfig.fmt(x)
    if not any(c in s for c in ".eEn"):
        s += ".0"
    return s

def _dump(value, indent, out):
    pad = "  " * indent
    if isinstance(value, dict):
        if not value:
            out.append("{}")
            return
        out.append("{\n")
        items = sorted(value.items())
        for i, (k, v) in enumerate(items):
            out.append("{}  {}: ".format(pad, json.dumps(str(k))))
            _dump(v, indent + 1, out)
            out.append(",\n" if i < len(items) - 1 else "\n")
        out.append(pad + "}")
    elif isinstance(value, (list, tuple)):
        if not value:
            out.append("[]")
        elif all(not isinstance(v, (dict, list, tuple)) for v in value):
            out.append("[")
            for i, v in enumerate(value):
                _dump(v, indent, out)
                if i < len(value) - 1:
                    out.append(", ")
            out.append("]")
        else:
            out.append("[\n")
            for i, v in enumerate(value):
                out.append(pad + "  ")
                _dump(v, indent + 1, out)
                out.append(",\n" if i < len(value) - 1 else "\n")
            out.append(pad + "]")
    elif isinstance(value, bool) or value is None:
        out.append(json.dumps(value))
    elif isinstance(value, (int, np.integer)):
        out.append(str(int(value)))
    elif isinstance(value, (float, np.floating)):
        out.append(_float_text(value))
    else:
        out.append(json.dumps(str(value)))

def dumps(doc):
    """Canonical JSON text: sorted keys, two-space indent, floats at the
    configured number of significant digits."""
    out = []
    _dump(doc, 0, out)
    out.append("\n")
    return "".join(out)

def template():
    """A complete example document."""
    return SchemeConfig.preset("fibonacci", weight="tent").serialize()
