from . import diffraction, combs, csvio
from .diffraction import sine_modulated_amplitude
from .schemeconfig import SchemeConfig
from .combs import deformed_weighted_model_set
from .cps import dual_characters, CutProjectScheme
from .groups import InternalSpace, Torus
from .families import ConstantWeight, ZeroDeformation
from .apfun import ApFunction, tone_terms
from .errors import PreconditionError, FingerprintMismatch
import unittest
import io
import math
import numpy as np

TAU = (1 + math.sqrt(5)) / 2
ALPHA = 1 / TAU ** 4

def bessel(n, z, terms=40):
    """J_n(z) from its power series."""
    sign = -1 if n < 0 and n % 2 else 1
    n = abs(n)
    return sign * sum((-1) ** k * (z / 2) ** (2 * k + n)
                      / (math.factorial(k) * math.factorial(k + n))
                      for k in range(terms))

def system(name, **params):
    cfg = SchemeConfig.preset(name, **params)
    return cfg.scheme, cfg.weight, cfg.deformation

def patch(name, radius, **params):
    return deformed_weighted_model_set(*system(name, **params),
                                       [(-radius, radius)])

class SineSpectrumTest(unittest.TestCase):
    def setUp(self):
        self.spec = diffraction.spectrum(*system("sine", epsilon=0.05),
                                         3.5, 3)

    def test_bessel_intensities(self):
        self.assertTrue(len(self.spec) > 0)
        for e in self.spec:
            m, n = e.label
            xi = m - ALPHA * n
            self.assertAlmostEqual(e.xi[0], xi, places=12)
            expected = bessel(n, 2 * math.pi * xi * 0.05)
            self.assertLess(abs(e.amplitude - expected), 1e-8)
        self.assertLess(abs(self.spec.entry((0, 0)).intensity - 1), 1e-12)

    def test_sorted_strongest_first(self):
        intensities = [e.intensity for e in self.spec]
        self.assertEqual(self.spec.entries[0].label, (0, 0))
        for a, b in zip(intensities, intensities[1:]):
            self.assertGreaterEqual(a, b - 1e-12)

    def test_eta0(self):
        self.assertAlmostEqual(self.spec.autocorr_at_zero, 1.0, places=12)
        self.assertAlmostEqual(self.spec.density, 1.0)

    def test_closed_form_agrees(self):
        for epsilon in (0.02, 0.05, 0.2):
            scheme, f, p = system("sine", epsilon=epsilon)
            for chi in dual_characters(scheme, 10.0, 3):
                m, n = chi.label
                dyn = diffraction.amplitude_dynamical(scheme, f, p, chi)
                self.assertLess(
                    abs(sine_modulated_amplitude(m, -n, epsilon, ALPHA)
                        - abs(dyn) ** 2), 1e-10)

    def test_negative_intensity_floor(self):
        with self.assertRaises(PreconditionError):
            diffraction.spectrum(*system("sine"), 3.5, 3, min_intensity=-1.0)

    def test_empty_spectrum_columns(self):
        empty = diffraction.spectrum(*system("sine"), 3.5, 3,
                                     min_intensity=2.0)
        self.assertEqual(len(empty), 0)
        out = io.StringIO()
        csvio.write_spectrum(out, empty)
        self.assertEqual(out.getvalue(),
                         "label_1,label_2,xi_1,re_amp,im_amp,intensity\n")

class LatticeTest(unittest.TestCase):
    def test_integer_lattice(self):
        spec = diffraction.spectrum(*system("lattice"), 2.5, 3)
        self.assertEqual(sorted(e.xi[0] for e in spec),
                         [-2.0, -1.0, 0.0, 1.0, 2.0])
        for e in spec:
            self.assertAlmostEqual(e.intensity, 1.0, places=12)

    def test_empirical(self):
        comb = patch("lattice", 5000.0)
        box = comb.exhaustive
        self.assertLess(abs(diffraction.fourier_bohr_empirical(
            comb, [0.5], box)), 1e-3)
        self.assertLess(abs(diffraction.fourier_bohr_empirical(
            comb, [1.0], box) - 1), 1e-3)

    def test_box_must_be_exhaustive(self):
        comb = patch("lattice", 5.0)
        with self.assertRaises(PreconditionError):
            diffraction.fourier_bohr_empirical(comb, [0.5], [[-10.0, 10.0]])

    def test_autocorrelation(self):
        eta = diffraction.autocorrelation(patch("lattice", 100.0), 3.5)
        self.assertEqual(len(eta), 7)
        for k in range(-3, 4):
            self.assertAlmostEqual(abs(eta.at([k]) - 1), 0, places=12)
        self.assertEqual(eta.at([0.5]), 0j)
        with self.assertRaises(PreconditionError):
            diffraction.autocorrelation(patch("lattice", 10.0), 20.0)

class EmpiricalTest(unittest.TestCase):
    def test_peaks_converge(self):
        scheme, f, p = system("sine", epsilon=0.05)
        spec = diffraction.spectrum(scheme, f, p, 3.5, 3)
        comb = deformed_weighted_model_set(scheme, f, p, [(-1e5, 1e5)])
        boxes = [[[-r, r]] for r in (1e3, 1e4, 1e5)]
        errors = np.zeros(3)
        for e in spec.entries[:9]:
            trace = diffraction.fourier_bohr_empirical(comb, e.xi, boxes)
            self.assertEqual(len(trace.values), 3)
            self.assertLess(abs(trace.final - e.amplitude), 1e-2)
            errors += [abs(v - e.amplitude) for v in trace.values]
        self.assertGreater(errors[0], errors[-1])

    def test_fibonacci_zero_peak(self):
        scheme, f, p = system("fibonacci")
        chi = [c for c in dual_characters(scheme, 1.0, 2)
               if c.label == (0, 0)][0]
        a = diffraction.amplitude_dynamical(scheme, f, p, chi)
        self.assertAlmostEqual(abs(a - TAU / math.sqrt(5)), 0, places=12)
        comb = deformed_weighted_model_set(scheme, f, p, [(-2e4, 2e4)])
        emp = diffraction.fourier_bohr_empirical(comb, [0.0], comb.exhaustive)
        self.assertLess(abs(emp - a), 1e-3)

    def test_fibonacci_density(self):
        eta = diffraction.autocorrelation(patch("fibonacci", 500.0), 2.0)
        self.assertAlmostEqual(eta.at_zero.real, TAU / math.sqrt(5),
                               delta=0.01)

class SymmetryTest(unittest.TestCase):
    def test_hermitian(self):
        for scheme, f, p in (system("fibonacci", weight="tent"),
                             system("sine", epsilon=0.2)):
            for chi in dual_characters(scheme, 3.0, 3):
                a = diffraction.amplitude_dynamical(scheme, f, p, chi)
                b = diffraction.amplitude_dynamical(scheme, f, p, -chi)
                self.assertLess(abs(b - a.conjugate()), 1e-12)

    def test_extinction(self):
        scheme = CutProjectScheme(1, InternalSpace([Torus(1)]), [[1.0]],
                                  [[ALPHA]])
        f, p = ConstantWeight(1.0), ZeroDeformation()
        spec = diffraction.spectrum(scheme, f, p, 2.0, 2)
        self.assertEqual(len(spec), len(dual_characters(scheme, 2.0, 2)))
        for e in spec:
            if e.label[1] == 0:
                self.assertAlmostEqual(e.intensity, 1.0, places=12)
            else:
                self.assertLessEqual(e.intensity, 1e-20)

    def test_tent_weighted_eta0(self):
        scheme, f, p = system("fibonacci", weight="tent")
        expected = TAU / (3 * math.sqrt(5))
        spec = diffraction.spectrum(scheme, f, p, 1.0, 2)
        self.assertAlmostEqual(spec.autocorr_at_zero, expected, places=12)
        comb = deformed_weighted_model_set(scheme, f, p, [(-1e4, 1e4)])
        eta = diffraction.autocorrelation(comb, 2.0)
        self.assertAlmostEqual(eta.at_zero.real, expected, delta=1e-2)

    def test_constant_modulus_over_hull(self):
        scheme, f, p = system("sine", epsilon=0.05)
        spec = diffraction.spectrum(scheme, f, p, 2.5, 2)
        region = [(-1e5, 1e5)]
        hull = [deformed_weighted_model_set(scheme, f, p, region),
                deformed_weighted_model_set(scheme, f, p, region)
                .translate([0.37]),
                deformed_weighted_model_set(scheme, f, p, region,
                                            internal_shift=[0.25])]
        for e in spec.entries[:5]:
            moduli = [abs(diffraction.fourier_bohr_empirical(
                c, e.xi, c.exhaustive)) for c in hull]
            for m in moduli:
                self.assertLess(abs(m - abs(e.amplitude)), 1e-2)
            self.assertLess(max(moduli) - min(moduli), 1e-2)

class ParsevalTest(unittest.TestCase):
    def test_captured(self):
        scheme, f, p = system("sine", epsilon=0.05)
        spec = diffraction.spectrum(scheme, f, p, 8.5, 8)
        comb = deformed_weighted_model_set(scheme, f, p, [(-2000.0, 2000.0)])
        report = diffraction.parseval_report(spec, comb)
        self.assertGreaterEqual(report.captured, 0.9)
        self.assertLessEqual(report.captured, 1 + 1e-6)
        self.assertAlmostEqual(report.eta0, 1.0, places=10)
        self.assertAlmostEqual(report.eta0_empirical, 1.0, delta=1e-3)
        self.assertEqual(len(report.deviations), 9)
        for label, dyn, emp in report.deviations:
            self.assertLess(abs(dyn - emp), 1e-2)

    def test_fingerprint_mismatch(self):
        spec = diffraction.spectrum(*system("sine", epsilon=0.05), 3.5, 3)
        with self.assertRaises(FingerprintMismatch):
            diffraction.parseval_report(spec, patch("sine", 100.0,
                                                    epsilon=0.2))

    def test_modulated_system(self):
        scheme, f, p = system("fibonacci")
        w = ApFunction.constant(1, 1.0)
        g = ApFunction.displacement(1, [tone_terms(0.05, [0.3])])
        spec = diffraction.spectrum(
            *combs.realize_composed_scheme(scheme, f, p, w, g), 2.0, 2)
        comb = combs.modulate(
            deformed_weighted_model_set(scheme, f, p, [(-2000.0, 2000.0)]),
            w, g)
        report = diffraction.parseval_report(spec, comb)
        self.assertLessEqual(report.captured, 1 + 1e-6)
        self.assertAlmostEqual(report.eta0, TAU / math.sqrt(5), places=10)
        self.assertAlmostEqual(report.eta0_empirical, report.eta0, delta=1e-2)
        label, dyn, emp = report.deviations[0]
        self.assertEqual(label, (0, 0, 0))
        self.assertLess(abs(dyn - emp), 1e-2)
