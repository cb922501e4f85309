from . import groups
from .groups import InternalSpace, Euclidean, Torus, Cyclic
from .errors import StructuralError, PreconditionError
import unittest
import math
import numpy as np

class InternalSpaceTest(unittest.TestCase):
    def setUp(self):
        self.space = InternalSpace([Euclidean(1), Torus(2), Cyclic(5)])

    def test_coordinates(self):
        self.assertEqual(self.space.ncoords, 4)
        self.assertEqual(self.space.euclidean_coords.tolist(), [0])
        self.assertEqual(self.space.torus_coords.tolist(), [1, 2])
        self.assertEqual(self.space.cyclic_coords.tolist(), [3])
        self.assertFalse(self.space.is_compact)

    def test_reduce(self):
        y = self.space.point([2.5, 1.25, -0.25, 7])
        np.testing.assert_allclose(y.coords, [2.5, 0.25, 0.75, 2])
        y = self.space.point([0.0, 0.0, 0.0, -1])
        self.assertEqual(y.coords[3], 4)

    def test_group_law(self):
        a = self.space.point([1.0, 0.75, 0.5, 3])
        b = self.space.point([-0.5, 0.5, 0.75, 4])
        np.testing.assert_allclose((a + b).coords, [0.5, 0.25, 0.25, 2])
        np.testing.assert_allclose((a - a).coords, np.zeros(4))

    def test_character_is_homomorphism(self):
        chi = self.space.character([0.3, 2, -1, 3])
        rng = np.random.default_rng(0)
        a = self.space.point(rng.uniform(0, 5, size=(10, 4)))
        b = self.space.point(rng.uniform(0, 5, size=(10, 4)))
        np.testing.assert_allclose(chi(a + b), chi(a) * chi(b), atol=1e-12)

    def test_bad_labels(self):
        with self.assertRaises(StructuralError):
            self.space.character([0.3, 0.5, 1, 0])
        with self.assertRaises(StructuralError):
            self.space.character([0.3, 1])

    def test_spaces_must_match(self):
        other = InternalSpace([Torus(1)])
        with self.assertRaises(StructuralError):
            self.space.identity() + other.identity()

    def test_bad_factor(self):
        with self.assertRaises(StructuralError):
            Cyclic(0)
        with self.assertRaises(StructuralError):
            InternalSpace([])

class QuadratureTest(unittest.TestCase):
    def test_torus_characters(self):
        space = InternalSpace([Torus(1)])
        for k in range(-5, 6):
            chi = space.character([k])
            v = groups.quadrature(space, chi)
            self.assertAlmostEqual(abs(v - (1 if k == 0 else 0)), 0, places=12)

    def test_cyclic_sum_is_exact(self):
        space = InternalSpace([Cyclic(6)])
        self.assertAlmostEqual(abs(groups.quadrature(
            space, space.character([2]))), 0, places=14)
        self.assertAlmostEqual(
            abs(groups.quadrature(space, lambda y: 1.0) - 1), 0, places=14)

    def test_gauss_legendre_panels(self):
        space = InternalSpace([Euclidean(1)])
        v = groups.quadrature(space, lambda y: y.coords[:, 0] ** 2,
                              support_box=[[0.0, 0.5, 1.0]], resolution=4)
        self.assertAlmostEqual(v.real, 1 / 3, places=14)

    def test_product_space(self):
        space = InternalSpace([Euclidean(1), Torus(1), Cyclic(3)])
        v = groups.quadrature(
            space, lambda y: np.abs(y.coords[:, 0]) + 0 * y.coords[:, 1],
            support_box=[[-1.0, 0.0, 1.0]], resolution=[8, 4, None])
        self.assertAlmostEqual(v.real, 1.0, places=14)

    def test_needs_support(self):
        space = InternalSpace([Euclidean(1)])
        with self.assertRaises(PreconditionError):
            groups.quadrature_rule(space)
        with self.assertRaises(PreconditionError):
            groups.quadrature_rule(space, [[1.0, 0.0]])
        with self.assertRaises(PreconditionError):
            groups.quadrature_rule(space, [[0.0, 1.0]], resolution=0)

def bessel0(z, terms=30):
    return sum((-1) ** k * (z / 2) ** (2 * k) / math.factorial(k) ** 2
               for k in range(terms))

def sine_phase(y):
    return np.exp(2j * np.pi * 0.05 * np.sin(2 * np.pi * y.coords[:, 0]))

class ConvergenceTest(unittest.TestCase):
    def test_sine_phase_integral(self):
        space = InternalSpace([Torus(1)])
        v = groups.quadrature(space, sine_phase)
        self.assertAlmostEqual(bessel0(0.1 * math.pi), 0.97548, places=5)
        self.assertLess(abs(v - bessel0(0.1 * math.pi)), 1e-12)

    def test_resolution_doubling(self):
        space = InternalSpace([Torus(1)])
        values = [groups.quadrature(space, sine_phase, resolution=n)
                  for n in (16, 32, 64, 128)]
        for a, b in zip(values[1:], values[2:]):
            self.assertLess(abs(a - b), 1e-10)

    def test_haar_shift_invariance(self):
        space = InternalSpace([Torus(1), Cyclic(5)])
        def F(y):
            return np.exp(np.cos(2 * np.pi * y.coords[:, 0])) \
                * (1 + y.coords[:, 1] ** 2)
        base = groups.quadrature(space, F, resolution=[64, None])
        for c in ([0.37, 2], [0.5, 4], [0.013, 1]):
            shift = space.point(c)
            v = groups.quadrature(space, lambda y: F(y + shift),
                                  resolution=[64, None])
            self.assertLess(abs(v - base), 1e-12)

    def test_node_limit(self):
        space = InternalSpace([Torus(4)])
        with self.assertRaises(PreconditionError):
            groups.quadrature_rule(space)
        self.assertEqual(len(groups.quadrature_rule(space, resolution=8)),
                         8 ** 4)
