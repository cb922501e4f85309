from . import combs, cps, apdiffconfig
from .combs import WeightedComb, IdealCrystal
from .schemeconfig import SchemeConfig
from .groups import Cyclic
from .apfun import ApFunction, tone_terms, compose_weight, \
    compose_modulation
from .errors import StructuralError, PreconditionError
import unittest
import math
import numpy as np

TAU = (1 + math.sqrt(5)) / 2
ALPHA = 1 / TAU ** 4

def random_modulation(rng, tones):
    """A weight of modulus close to 1 and a displacement, each with up to
    'tones' sine terms."""
    wterms = [([0.0], 1.0)]
    gterms = []
    for _ in range(tones):
        wterms.extend(tone_terms(rng.uniform(0, 0.2),
                                 [rng.uniform(-1.5, 1.5)],
                                 rng.uniform(0, 2 * np.pi)))
        gterms.extend(tone_terms(rng.uniform(0, 0.15),
                                 [rng.uniform(-1.5, 1.5)],
                                 rng.uniform(0, 2 * np.pi)))
    return (ApFunction.scalar(1, wterms),
            ApFunction.displacement(1, [gterms]))

class WeightedCombTest(unittest.TestCase):
    def test_region_must_contain_atoms(self):
        with self.assertRaises(StructuralError):
            WeightedComb([[2.0]], [1.0], [(0.0, 1.0)])
        with self.assertRaises(StructuralError):
            WeightedComb([[0.5], [0.6]], [1.0], [(0.0, 1.0)])

    def test_canonical_merges(self):
        c = WeightedComb([[0.5], [0.2], [0.5]], [1.0, 2.0, 3.0], [(0.0, 1.0)])
        m = c.canonical()
        np.testing.assert_allclose(m.positions[:, 0], [0.2, 0.5])
        np.testing.assert_allclose(m.weights, [2.0, 4.0])
        self.assertAlmostEqual(c.min_separation(), 0.3)

    def test_translate_and_restrict(self):
        c = WeightedComb([[0.0], [1.0], [2.0]], [1, 1, 1], [(0.0, 2.0)])
        t = c.translate([0.5])
        np.testing.assert_allclose(t.region, [[0.5, 2.5]])
        r = c.restrict([(0.5, 5.0)])
        self.assertEqual(len(r), 2)
        np.testing.assert_allclose(r.region, [[0.5, 2.0]])

    def test_translation_bound(self):
        c = WeightedComb([[0.0], [0.5], [0.9], [3.0]], [1, -2, 1j, 1],
                         [(0.0, 3.0)])
        self.assertAlmostEqual(c.translation_bound(), 4.0)

class ModelSetCombTest(unittest.TestCase):
    def test_sine_lattice_selection(self):
        cfg = SchemeConfig.preset("sine", epsilon=0.05)
        comb = combs.deformed_weighted_model_set(
            cfg.scheme, cfg.weight, cfg.deformation, [(-10.0, 10.0)],
            select="lattice")
        self.assertEqual(len(comb), 21)
        l = np.arange(-10, 11)
        np.testing.assert_allclose(
            comb.positions[:, 0],
            l + 0.05 * np.sin(2 * np.pi * np.mod(ALPHA * l, 1.0)), atol=1e-12)
        np.testing.assert_allclose(comb.exhaustive, [[-9.95, 9.95]])
        self.assertEqual(comb.fingerprint, combs.system_fingerprint(
            cfg.scheme, cfg.weight, cfg.deformation))

    def test_deformed_selection(self):
        cfg = SchemeConfig.preset("sine", epsilon=0.2)
        comb = combs.deformed_weighted_model_set(
            cfg.scheme, cfg.weight, cfg.deformation, [(-10.0, 10.0)])
        self.assertTrue(np.all(np.abs(comb.positions) <= 10.0))

    def test_internal_shift(self):
        cfg = SchemeConfig.preset("sine", epsilon=0.05)
        comb = combs.deformed_weighted_model_set(
            cfg.scheme, cfg.weight, cfg.deformation, [(-5.0, 5.0)],
            select="lattice", internal_shift=[0.25])
        l = np.arange(-5, 6)
        np.testing.assert_allclose(
            comb.positions[:, 0],
            l + 0.05 * np.sin(2 * np.pi * (ALPHA * l + 0.25)), atol=1e-12)

    def test_sine_gap_threshold(self):
        cfg = SchemeConfig.preset("sine", epsilon=0.2)
        comb = combs.deformed_weighted_model_set(
            cfg.scheme, cfg.weight, cfg.deformation, [(-5000.0, 5000.0)],
            select="lattice")
        self.assertGreaterEqual(len(comb), 10000)
        lo, hi = combs.sine_gap_interval(0.2, ALPHA)
        self.assertAlmostEqual(lo, 1 - 0.4 * math.sin(math.pi * ALPHA))
        self.assertAlmostEqual(comb.min_separation(), lo, delta=1e-6)
        gaps = combs.sine_gap(np.arange(-5000, 5000), 0.2, ALPHA)
        np.testing.assert_allclose(gaps, np.diff(comb.positions[:, 0]),
                                   atol=1e-9)

    def test_sine_loses_uniform_discreteness(self):
        cfg = SchemeConfig.preset("sine", epsilon=0.6, alpha=1 / TAU)
        comb = combs.deformed_weighted_model_set(
            cfg.scheme, cfg.weight, cfg.deformation, [(-5000.0, 5000.0)],
            select="lattice")
        self.assertLess(comb.min_separation(), 0.05)

    def test_lattice_functions(self):
        cfg = SchemeConfig.preset("sine", epsilon=0.05)
        w, g = combs.lattice_modulation_of(cfg.scheme, cfg.weight,
                                           cfg.deformation)
        l = np.arange(-3.0, 4.0)
        np.testing.assert_allclose(
            g(l)[:, 0], 0.05 * np.sin(2 * np.pi * ALPHA * l), atol=1e-12)
        np.testing.assert_allclose(w(l), np.ones(7))
        with self.assertRaises(PreconditionError):
            g(0.5)

class ModulationTest(unittest.TestCase):
    def lattice_comb(self, radius):
        cfg = SchemeConfig.preset("lattice")
        return cfg, combs.deformed_weighted_model_set(
            cfg.scheme, cfg.weight, cfg.deformation, [(-radius, radius)],
            select="lattice")

    def test_trivial_modulation(self):
        _, comb = self.lattice_comb(20)
        m = combs.modulate(comb, ApFunction.constant(1, 1.0),
                           ApFunction.displacement(1))
        np.testing.assert_array_equal(m.positions, comb.positions)
        np.testing.assert_array_equal(m.weights, comb.weights)

    def test_shape_checks(self):
        _, comb = self.lattice_comb(5)
        with self.assertRaises(StructuralError):
            combs.modulate(comb, ApFunction.displacement(1),
                           ApFunction.displacement(1))
        with self.assertRaises(StructuralError):
            combs.modulate(comb, ApFunction.constant(1, 1.0),
                           ApFunction.displacement(2))

    def test_sequential_equals_composed(self):
        rng = np.random.default_rng(apdiffconfig.seed)
        _, comb = self.lattice_comb(200)
        for trial in range(20):
            w1, g1 = random_modulation(rng, int(rng.integers(1, 4)))
            w2, g2 = random_modulation(rng, int(rng.integers(1, 4)))
            seq = combs.modulate(combs.modulate(comb, w1, g1), w2, g2)
            once = combs.modulate(comb, compose_weight(w1, w2, g1),
                                  compose_modulation(g1, g2))
            np.testing.assert_allclose(seq.positions, once.positions,
                                       rtol=0, atol=1e-12)
            np.testing.assert_allclose(seq.weights, once.weights,
                                       rtol=0, atol=1e-12)

    def test_composed_scheme_matches_modulation(self):
        rng = np.random.default_rng(apdiffconfig.seed + 1)
        cfg, comb = self.lattice_comb(200)
        for trial in range(20):
            w, g = random_modulation(rng, int(rng.integers(1, 4)))
            direct = combs.modulate(comb, w, g)
            ext, f2, p2 = combs.realize_composed_scheme(
                cfg.scheme, cfg.weight, cfg.deformation, w, g)
            self.assertEqual(len(ext.internal.factors), 2)
            realized = combs.deformed_weighted_model_set(
                ext, f2, p2, [(-200.0, 200.0)], select="lattice")
            np.testing.assert_array_equal(realized.labels, direct.labels)
            np.testing.assert_allclose(realized.positions, direct.positions,
                                       rtol=0, atol=1e-12)
            np.testing.assert_allclose(realized.weights, direct.weights,
                                       rtol=0, atol=1e-12)

    def test_composed_scheme_of_sine(self):
        cfg = SchemeConfig.preset("sine", epsilon=0.05)
        g = ApFunction.displacement(1, [tone_terms(0.03, [0.3])])
        w = ApFunction.constant(1, 1.0)
        ext, f2, p2 = combs.realize_composed_scheme(
            cfg.scheme, cfg.weight, cfg.deformation, w, g)
        self.assertEqual([f.kind for f in ext.internal.factors],
                         ["torus", "torus"])
        base = combs.deformed_weighted_model_set(
            cfg.scheme, cfg.weight, cfg.deformation, [(-50.0, 50.0)],
            select="lattice")
        realized = combs.deformed_weighted_model_set(
            ext, f2, p2, [(-50.0, 50.0)], select="lattice")
        np.testing.assert_allclose(
            realized.positions, combs.modulate(base, w, g).positions,
            rtol=0, atol=1e-12)

    def test_identity_modulation_keeps_scheme(self):
        cfg = SchemeConfig.preset("sine")
        out = combs.realize_composed_scheme(
            cfg.scheme, cfg.weight, cfg.deformation,
            ApFunction.constant(1, 1.0), ApFunction.displacement(1))
        self.assertIs(out[0], cfg.scheme)

    def test_constant_weight_modulation(self):
        cfg, comb = self.lattice_comb(10)
        w = ApFunction.constant(1, 0.5j)
        ext, f2, p2 = combs.realize_composed_scheme(
            cfg.scheme, cfg.weight, cfg.deformation, w,
            ApFunction.displacement(1))
        realized = combs.deformed_weighted_model_set(
            ext, f2, p2, [(-10.0, 10.0)], select="lattice")
        np.testing.assert_allclose(realized.weights, np.full(21, 0.5j))

    def test_translation_covariance(self):
        rng = np.random.default_rng(apdiffconfig.seed + 2)
        _, comb = self.lattice_comb(50)
        for t in (0.37, -2.5, 11.0):
            w, g = random_modulation(rng, 2)
            a = combs.modulate(comb, w, g).translate([t])
            b = combs.modulate(comb.translate([t]), w.translate([t]),
                               g.translate([t]))
            np.testing.assert_allclose(a.positions, b.positions,
                                       rtol=0, atol=1e-12)
            np.testing.assert_allclose(a.weights, b.weights,
                                       rtol=0, atol=1e-12)

    def test_fingerprint_matches_composed_scheme(self):
        cfg = SchemeConfig.preset("fibonacci")
        comb = combs.deformed_weighted_model_set(
            cfg.scheme, cfg.weight, cfg.deformation, [(-20.0, 20.0)])
        w = ApFunction.scalar(1, [([0.0], 1.0)] + tone_terms(0.1, [0.3]))
        g = ApFunction.displacement(1, [tone_terms(0.05, [TAU])])
        modulated = combs.modulate(comb, w, g)
        self.assertEqual(modulated.fingerprint, combs.system_fingerprint(
            *combs.realize_composed_scheme(cfg.scheme, cfg.weight,
                                           cfg.deformation, w, g)))
        self.assertNotEqual(modulated.fingerprint, comb.fingerprint)
        moved = combs.modulate(comb.translate([0.5]), w, g)
        self.assertIsNone(moved.system)
        self.assertNotEqual(moved.fingerprint, modulated.fingerprint)

class IdealCrystalTest(unittest.TestCase):
    def test_collapse_to_finer_lattice(self):
        crystal = IdealCrystal([[1.0]], [[0.0], [0.5]])
        found = combs.period_group(crystal.patch([(-20.0, 20.0)]))
        self.assertIsNotNone(found)
        np.testing.assert_allclose(np.abs(found.basis), [[0.5]])
        self.assertEqual(len(found), 1)

    def test_two_dimensional_crystal(self):
        crystal = IdealCrystal([[1.0, 0.0], [0.0, 2.0]], [[0.0, 0.0],
                                                          [0.5, 1.0]])
        found = combs.period_group(crystal.patch([(-6.0, 6.0), (-6.0, 6.0)]))
        self.assertIsNotNone(found)
        self.assertAlmostEqual(abs(np.linalg.det(found.basis)), 1.0)
        self.assertEqual(len(found), 1)

    def test_offsets_are_reduced(self):
        crystal = IdealCrystal([[2.0]], [[0.1], [2.1], [-0.1]])
        np.testing.assert_allclose(sorted(crystal.offsets[:, 0]), [0.1, 1.9])

    def test_fibonacci_has_no_periods(self):
        cfg = SchemeConfig.preset("fibonacci")
        comb = combs.deformed_weighted_model_set(
            cfg.scheme, cfg.weight, cfg.deformation, [(-1000.0, 1000.0)])
        self.assertIsNone(combs.period_group(comb))

    def test_needs_uniform_weights(self):
        comb = WeightedComb([[0.0], [1.0]], [1.0, 2.0], [(0.0, 1.0)])
        with self.assertRaises(PreconditionError):
            combs.period_group(comb)

    def test_commensurate_modulation(self):
        crystal = IdealCrystal([[1.0]], [[0.0]])
        g = ApFunction.displacement(
            1, [tone_terms(0.1, ["1/2"], shape="cos")])
        modulated = combs.commensurate_modulate(crystal, g)
        np.testing.assert_allclose(modulated.basis, [[2.0]])
        np.testing.assert_allclose(sorted(modulated.offsets[:, 0]),
                                   [0.1, 0.9], atol=1e-14)
        direct = combs.modulate(crystal.patch([(-30.0, 30.0)]),
                                ApFunction.constant(1, 1.0), g)
        inner = [(-20.0, 20.0)]
        np.testing.assert_allclose(
            np.sort(direct.restrict(inner).positions[:, 0]),
            np.sort(modulated.patch(inner).positions[:, 0]), atol=1e-12)
        found = combs.period_group(direct)
        np.testing.assert_allclose(np.abs(found.basis), [[2.0]], atol=1e-9)
        np.testing.assert_allclose(sorted(found.fractional[:, 0] * 2),
                                   [0.1, 0.9], atol=1e-9)

    def test_incommensurate_modulation(self):
        crystal = IdealCrystal([[1.0]], [[0.0]])
        g = ApFunction.displacement(1, [tone_terms(0.1, [TAU])])
        with self.assertRaises(PreconditionError):
            combs.commensurate_modulate(crystal, g)

    def test_scheme_round_trip(self):
        crystal = IdealCrystal([[1.0]], [[0.0], [1 / 3]])
        scheme, window = cps.ideal_crystal_scheme([[1.0]], [[0.0], [1 / 3]])
        self.assertEqual(scheme.internal.factors, (Cyclic(3),))
        patch = cps.enumerate_model_set(scheme, window, [(0.0, 3.0)])
        np.testing.assert_allclose(patch.positions[:, 0],
                                   [0, 1 / 3, 1, 4 / 3, 2, 7 / 3, 3],
                                   atol=1e-12)
        region = [(-20.0, 20.0)]
        patch = cps.enumerate_model_set(scheme, window, region)
        np.testing.assert_allclose(np.sort(patch.positions[:, 0]),
                                   crystal.patch(region).positions[:, 0],
                                   atol=1e-12)
        found = combs.period_group(
            WeightedComb(patch.positions, np.ones(len(patch)), region))
        self.assertIsNotNone(found)
        np.testing.assert_allclose(np.abs(found.basis), [[1.0]], atol=1e-9)
        self.assertEqual(len(found), 2)
        np.testing.assert_allclose(sorted(np.mod(found.offsets[:, 0], 1.0)),
                                   [0.0, 1 / 3], atol=1e-9)

    def test_third_frequency_on_two_offsets(self):
        crystal = IdealCrystal([[1.0]], [[0.0], [1 / 3]])
        g = ApFunction.displacement(1, [tone_terms(0.1, ["1/3"])])
        modulated = combs.commensurate_modulate(crystal, g)
        np.testing.assert_allclose(modulated.basis, [[3.0]])
        self.assertEqual(len(modulated), 6)
        direct = combs.modulate(crystal.patch([(-40.0, 40.0)]),
                                ApFunction.constant(1, 1.0), g)
        found = combs.period_group(direct)
        self.assertIsNotNone(found)
        np.testing.assert_allclose(np.abs(found.basis), [[3.0]], atol=1e-9)
        self.assertEqual(len(found), 6)

    def test_sine_has_no_periods(self):
        cfg = SchemeConfig.preset("sine", epsilon=0.05)
        comb = combs.deformed_weighted_model_set(
            cfg.scheme, cfg.weight, cfg.deformation, [(-1000.0, 1000.0)])
        self.assertIsNone(combs.period_group(comb))

class SmoothingTest(unittest.TestCase):
    def test_convolve_tent(self):
        c = WeightedComb([[0.0], [1.0]], [1.0, 2.0], [(0.0, 1.0)])
        v = combs.convolve_tent(c, [[0.25], [0.5], [0.75], [3.0]], 0.5)
        np.testing.assert_allclose(v, [0.5, 0.0, 1.0, 0.0])
        c2 = WeightedComb([[0.0, 0.0]], [1.0], [(0.0, 0.0), (0.0, 0.0)])
        v = combs.convolve_tent(c2, [[0.25, 0.25]], 0.5)
        np.testing.assert_allclose(v, [0.25])

    def test_sine_almost_periods(self):
        cfg = SchemeConfig.preset("sine", epsilon=0.05)
        check = combs.smoothing_almost_periods(
            cfg.scheme, cfg.weight, cfg.deformation, 0.01, 300.0, 0.02,
            kernel_halfwidth=0.5, check_halfwidth=200.0)
        np.testing.assert_allclose(check.report.periods[:, 0],
                                   [0, 48, 96, 144, 185, 233, 281])
        self.assertEqual(len(check.report.rejected), 0)
        self.assertLessEqual(check.report.max_gap, 200)
        self.assertLess(check.max_deviation, 0.02)

    def test_tight_epsilon_rejects(self):
        cfg = SchemeConfig.preset("sine", epsilon=0.05)
        check = combs.smoothing_almost_periods(
            cfg.scheme, cfg.weight, cfg.deformation, 0.01, 300.0, 1e-6,
            kernel_halfwidth=0.5, check_halfwidth=50.0)
        np.testing.assert_allclose(check.report.periods[:, 0], [0])
        self.assertEqual(len(check.report.rejected), 6)
