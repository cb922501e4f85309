from . import families
from .families import WeightFunction, Deformation, TentWeight, BumpWeight, \
    TrigWeight, TableWeight, WindowWeight, ProductWeight, ConstantWeight, \
    SineDeformation, TrigDeformation, TentDeformation, TableDeformation, \
    SawtoothDeformation, SumDeformation
from .groups import InternalSpace, Euclidean, Torus, Cyclic, quadrature_rule
from .cps import ProductWindow, EuclideanBox
from .schemeconfig import Reader
from .errors import ConfigError, StructuralError, PreconditionError
import unittest
import numpy as np

class RegistryTest(unittest.TestCase):
    def test_families_registered(self):
        self.assertLessEqual(
            {"constant", "tent", "bump", "trig", "table", "window", "product"},
            set(WeightFunction.registry))
        self.assertLessEqual(
            {"zero", "trig", "sine", "sawtooth", "tent", "table", "sum"},
            set(Deformation.registry))

    def test_unknown_family(self):
        space = InternalSpace([Torus(1)])
        with self.assertRaises(ConfigError) as cm:
            WeightFunction.from_config(
                Reader({"family": "gaussian"}, "weight"), space)
        self.assertIn("weight.family", str(cm.exception))

class WeightTest(unittest.TestCase):
    def test_tent(self):
        space = InternalSpace([Euclidean(1)])
        f = TentWeight([0.5], [1.0]).bind(space)
        y = space.point([[0.5], [1.0], [-0.5], [2.0]])
        np.testing.assert_allclose(f(y), [1.0, 0.5, 0.0, 0.0])
        np.testing.assert_allclose(f.support_box()[0], [-0.5, 0.5, 1.5])
        rule = quadrature_rule(space, f.support_box(), 8)
        self.assertAlmostEqual(rule.integrate(f).real, 1.0, places=14)

    def test_bump(self):
        space = InternalSpace([Euclidean(1)])
        f = BumpWeight([0.0], [1.0]).bind(space)
        y = space.point([[0.0], [0.5], [1.0]])
        np.testing.assert_allclose(f(y).real, [1.0, 0.5, 0.0], atol=1e-15)
        rule = quadrature_rule(space, f.support_box(), 32)
        self.assertAlmostEqual(rule.integrate(f).real, 1.0, places=12)

    def test_factor_must_be_named(self):
        space = InternalSpace([Euclidean(1), Euclidean(1)])
        with self.assertRaises(StructuralError):
            TentWeight([0.0], [1.0]).bind(space)
        TentWeight([0.0], [1.0], factor=1).bind(space)

    def test_trig(self):
        space = InternalSpace([Torus(1)])
        f = TrigWeight([([1], 0.5), ([-1], 0.5)]).bind(space)
        self.assertTrue(f.real)
        np.testing.assert_allclose(f(space.point([[0.0], [0.5]])).real,
                                   [1.0, -1.0], atol=1e-15)
        g = TrigWeight([([1], 1.0)]).bind(space)
        self.assertFalse(g.real)
        with self.assertRaises(StructuralError):
            TrigWeight([([0.5], 1.0)])

    def test_table(self):
        space = InternalSpace([Cyclic(3)])
        f = TableWeight({0: 1.0, 4: 2j}).bind(space)
        np.testing.assert_allclose(f(space.point([[0], [1], [2]])),
                                   [1.0, 2j, 0.0])
        self.assertFalse(f.real)
        self.assertEqual(f.window().to_config(), [
            {"factors": [0], "part": {"type": "cyclic_subset",
                                      "residues": [0, 1]}}])

    def test_window_and_product(self):
        space = InternalSpace([Euclidean(1), Cyclic(2)])
        w = WindowWeight(ProductWindow({0: EuclideanBox([[0.0, 2.0]])}))
        t = TableWeight({1: 3.0})
        f = ProductWeight([w, TentWeight([1.0], [1.0]), t]).bind(space)
        y = space.point([[1.0, 1], [1.0, 0], [0.5, 1], [2.5, 1]])
        np.testing.assert_allclose(f(y).real, [3.0, 0.0, 1.5, 0.0])
        np.testing.assert_allclose(f.support_box()[0], [0.0, 1.0, 2.0])

    def test_non_compact_support(self):
        space = InternalSpace([Euclidean(1)])
        with self.assertRaises(PreconditionError):
            ConstantWeight(1.0).bind(space).support_box()

class DeformationTest(unittest.TestCase):
    def test_sine(self):
        space = InternalSpace([Torus(1)])
        p = SineDeformation([0.05]).bind(space, 1)
        y = space.point(np.linspace(0, 1, 9, endpoint=False).reshape(-1, 1))
        np.testing.assert_allclose(p(y)[:, 0],
                                   0.05 * np.sin(2 * np.pi * y.coords[:, 0]),
                                   atol=1e-15)
        self.assertAlmostEqual(p.sup_bound(), 0.05)

    def test_trig_needs_partners(self):
        space = InternalSpace([Torus(1)])
        with self.assertRaises(StructuralError):
            TrigDeformation([[([1], 0.5)]]).bind(space, 1)
        with self.assertRaises(StructuralError):
            TrigDeformation([[([1], 0.5), ([-1], 0.5)]]).bind(space, 2)

    def test_tent_and_table(self):
        space = InternalSpace([Euclidean(1), Cyclic(2)])
        p = SumDeformation([
            TentDeformation([0.0], [1.0], [0.2, 0.0]),
            TableDeformation({1: [0.0, 0.1]})]).bind(space, 2)
        y = space.point([[0.5, 1], [0.0, 0]])
        np.testing.assert_allclose(p(y), [[0.1, 0.1], [0.2, 0.0]])
        self.assertAlmostEqual(p.sup_bound(), 0.3)
        with self.assertRaises(StructuralError):
            TableDeformation({0: [1.0]}).bind(space, 2)

    def test_sawtooth(self):
        space = InternalSpace([Torus(1)])
        p = SawtoothDeformation([0.3]).bind(space, 1)
        np.testing.assert_allclose(p(space.point([[0.5], [1.25]]))[:, 0],
                                   [0.15, 0.075])

    def test_from_config(self):
        space = InternalSpace([Torus(1)])
        p = Deformation.from_config(Reader(
            {"family": "sine", "amp": [0.1], "phase": 0.0}, "deformation"),
            space, 1)
        self.assertIsInstance(p, SineDeformation)
        self.assertEqual(p.to_config(), {"family": "sine", "factor": 0,
                                         "amp": [0.1], "label": [1],
                                         "phase": 0.0})
