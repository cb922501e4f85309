"""Command line front end.

Every command reads a scheme configuration (or a points file), runs one
computation and writes one data file plus a FILE.meta.json sidecar
carrying the run metadata.  Data files hold no timestamps, so running a
command twice gives the same bytes.

"""

import sys
import argparse
import logging
import logging.config
import datetime
import numpy as np
import yaml
from scipy.special import jv
from . import cmdline, apdiffconfig, csvio
from .version import version
from .schemeconfig import SchemeConfig, PRESETS, template, dumps, to_number
from .combs import deformed_weighted_model_set, modulate, period_group, \
    realize_composed_scheme, smoothing_almost_periods
from .diffraction import spectrum, fourier_bohr_empirical, autocorrelation, \
    sine_modulated_amplitude
from .errors import PreconditionError, NumericalInvariantError

log = logging.getLogger(__name__)

_argv = []

def _metadata(**extra):
    meta = {"version": version,
            "command": ["runapdiff"] + list(_argv),
            "timestamp": datetime.datetime.now(
                datetime.timezone.utc).isoformat()}
    meta.update(extra)
    return meta

def _region(cfg, radius):
    return [(-radius, radius)] * cfg.phys_dim

def _patch(cfg, radius, select="deformed", use_modulation=True):
    comb = deformed_weighted_model_set(
        cfg.scheme, cfg.weight, cfg.deformation, _region(cfg, radius), select)
    if use_modulation and cfg.modulation is not None:
        w, g = cfg.modulation
        comb = modulate(comb, w, g)
    return comb

def _system(cfg):
    """Scheme, weight and deformation, with any modulation realised on
    an extended scheme."""
    if cfg.modulation is None:
        return cfg.scheme, cfg.weight, cfg.deformation
    w, g = cfg.modulation
    return realize_composed_scheme(cfg.scheme, cfg.weight, cfg.deformation,
                                   w, g)

def _comb_from(args):
    if args.points:
        return csvio.read_points(args.points)
    if args.radius_patch is None:
        raise PreconditionError("--config needs --radius-patch")
    return _patch(SchemeConfig.load(args.config), args.radius_patch)

def _source_arguments(parser):
    src = parser.add_mutually_exclusive_group(required=True)
    src.add_argument("--points", help="Points file written by 'generate'")
    src.add_argument("--config", help="Scheme configuration file")
    parser.add_argument("--radius-patch", type=float, dest="radius_patch",
                        help="Half-width of the patch generated from --config")

class generate(cmdline.command):
    """Generate a patch of a deformed weighted model set.

    Lattice points l with |l_i| <= R are kept by default, so the patch
    has one atom per lattice point of the box; --select deformed keeps
    atoms by deformed position instead.

    """
    help = "write a point patch"

    @staticmethod
    def add_arguments(parser):
        parser.add_argument("config", help="Scheme configuration file")
        parser.add_argument("--radius", type=float, required=True,
                            help="Half-width R of the box [-R, R]^d")
        parser.add_argument("--out", required=True, help="Output CSV file")
        parser.add_argument("--select", choices=["lattice", "deformed"],
                            default="lattice")
        parser.add_argument("--no-modulation", action="store_true",
                            dest="no_modulation",
                            help="Ignore the modulation in the configuration")

    @staticmethod
    def run(args):
        cfg = SchemeConfig.load(args.config)
        comb = _patch(cfg, args.radius, args.select, not args.no_modulation)
        with cmdline.output_file(args.out) as f:
            csvio.write_points(f, comb)
        meta = _metadata(**csvio.points_metadata(comb))
        meta["atoms"] = len(comb)
        cmdline.write_sidecar(args.out, meta)
        log.info("generate: %d atoms written to %s", len(comb), args.out)

class diffract(cmdline.command):
    """Compute the Bragg peaks of a configuration by quadrature over the
    internal space."""
    help = "write a diffraction spectrum"

    @staticmethod
    def add_arguments(parser):
        parser.add_argument("config", help="Scheme configuration file")
        parser.add_argument("--cutoff", type=float, required=True,
                            help="Largest |xi|")
        parser.add_argument("--label-bound", type=int, required=True,
                            dest="label_bound",
                            help="Largest |label| component searched")
        parser.add_argument("--min-intensity", type=float, default=0.0,
                            dest="min_intensity")
        parser.add_argument("--out", required=True, help="Output CSV file")
        parser.add_argument("--json", help="Also write the spectrum as JSON")
        parser.add_argument("--torus-nodes", type=int, dest="torus_nodes")
        parser.add_argument("--gauss-nodes", type=int, dest="gauss_nodes")

    @staticmethod
    def run(args):
        if args.torus_nodes:
            apdiffconfig.torus_nodes = args.torus_nodes
        if args.gauss_nodes:
            apdiffconfig.gauss_nodes = args.gauss_nodes
        cfg = SchemeConfig.load(args.config)
        scheme, f, p = _system(cfg)
        spec = spectrum(scheme, f, p, args.cutoff, args.label_bound,
                        args.min_intensity)
        with cmdline.output_file(args.out) as out:
            csvio.write_spectrum(out, spec)
        if args.json:
            with cmdline.output_file(args.json) as out:
                out.write(dumps(csvio.spectrum_document(spec)))
        cmdline.write_sidecar(args.out, _metadata(
            fingerprint=spec.fingerprint, entries=len(spec)))
        log.info("diffract: %d peaks, fingerprint %s", len(spec),
                 spec.fingerprint)

class fb(cmdline.command):
    """Fourier-Bohr averages of a points file over centred boxes of
    increasing size."""
    help = "empirical scattering amplitudes"

    @staticmethod
    def add_arguments(parser):
        parser.add_argument("--points", required=True, help="Points file")
        parser.add_argument("--freq", type=float, nargs="+", required=True,
                            help="Frequency xi")
        parser.add_argument("--halfwidths", type=float, nargs="+",
                            required=True)
        parser.add_argument("--out", required=True, help="Output CSV file")

    @staticmethod
    def run(args):
        comb = csvio.read_points(args.points)
        centre = comb.exhaustive.mean(axis=1)
        boxes = [np.column_stack([centre - h, centre + h])
                 for h in args.halfwidths]
        trace = fourier_bohr_empirical(comb, args.freq, boxes)
        rows = [(float(h), v.real, v.imag, abs(v), abs(v) ** 2)
                for h, v in zip(args.halfwidths, trace.values)]
        with cmdline.output_file(args.out) as f:
            csvio.write_table(f, ["halfwidth", "re_amp", "im_amp", "abs_amp",
                                  "intensity"], rows)
        cmdline.write_sidecar(args.out, _metadata(
            fingerprint=comb.fingerprint))

class autocorr(cmdline.command):
    """Autocorrelation coefficients of a patch."""
    help = "estimate the autocorrelation"

    @staticmethod
    def add_arguments(parser):
        _source_arguments(parser)
        parser.add_argument("--radius", type=float, required=True)
        parser.add_argument("--bin-tol", type=float, default=1e-9,
                            dest="bin_tol")
        parser.add_argument("--out", required=True, help="Output CSV file")

    @staticmethod
    def run(args):
        comb = _comb_from(args)
        ac = autocorrelation(comb, args.radius, args.bin_tol)
        header = ["z_{}".format(i + 1) for i in range(comb.dim)] \
            + ["re_eta", "im_eta"]
        rows = [[float(x) for x in z] + [v.real, v.imag] for z, v in ac]
        with cmdline.output_file(args.out) as f:
            csvio.write_table(f, header, rows)
        cmdline.write_sidecar(args.out, _metadata(
            fingerprint=comb.fingerprint, volume=ac.volume))

class periods(cmdline.command):
    """Look for a lattice of periods of a uniformly weighted patch."""
    help = "detect a period lattice"

    @staticmethod
    def add_arguments(parser):
        _source_arguments(parser)
        parser.add_argument("--tol", type=float, default=1e-9)
        parser.add_argument("--out", required=True, help="Output CSV file")

    @staticmethod
    def run(args):
        comb = _comb_from(args)
        crystal = period_group(comb, args.tol)
        header = ["kind", "index"] + \
            ["x_{}".format(i + 1) for i in range(comb.dim)]
        rows = []
        if crystal is None:
            print("no lattice of periods found")
        else:
            for i, b in enumerate(crystal.basis):
                rows.append(["basis", i] + [float(x) for x in b])
            for i, o in enumerate(crystal.offsets):
                rows.append(["offset", i] + [float(x) for x in o])
            print("period lattice basis {}, {} offset(s)".format(
                crystal.basis.tolist(), len(crystal)))
        with cmdline.output_file(args.out) as f:
            csvio.write_table(f, header, rows)
        cmdline.write_sidecar(args.out, _metadata(
            fingerprint=comb.fingerprint, lattice=crystal is not None))

class apcheck(cmdline.command):
    """Check lattice points with star image near the identity as almost
    periods of the comb smoothed by a tent."""
    help = "almost-period scan"

    @staticmethod
    def add_arguments(parser):
        parser.add_argument("config", help="Scheme configuration file")
        parser.add_argument("--epsilon", type=float, required=True)
        parser.add_argument("--range", type=float, required=True,
                            dest="scan_range", help="Scan t in [0, T]")
        parser.add_argument("--ball", type=float, default=0.01,
                            help="Radius of the internal-space ball")
        parser.add_argument("--kernel-halfwidth", type=float, default=0.5,
                            dest="kernel_halfwidth")
        parser.add_argument("--sample-step", type=float, dest="sample_step")
        parser.add_argument("--check-halfwidth", type=float,
                            dest="check_halfwidth",
                            help="Half-width of the sampled region "
                            "(default: the scan range)")
        parser.add_argument("--out", required=True, help="Output CSV file")

    @staticmethod
    def run(args):
        cfg = SchemeConfig.load(args.config)
        scheme, f, p = _system(cfg)
        check = smoothing_almost_periods(
            scheme, f, p, args.ball, args.scan_range, args.epsilon,
            args.kernel_halfwidth, args.check_halfwidth, args.sample_step)
        report = check.report
        d = scheme.phys_dim
        rows = [["period"] + [float(x) for x in t] for t in report.periods]
        rows += [["rejected"] + [float(x) for x in t] for t in report.rejected]
        with cmdline.output_file(args.out) as out:
            csvio.write_table(out, ["status"] + ["t_{}".format(i + 1)
                                                 for i in range(d)], rows)
        cmdline.write_sidecar(args.out, _metadata(
            epsilon=args.epsilon, periods=len(report.periods),
            rejected=len(report.rejected), max_gap=report.max_gap,
            max_deviation=check.max_deviation))
        print("{} almost periods, {} rejected, max gap {}".format(
            len(report.periods), len(report.rejected),
            apdiffconfig.fmt(report.max_gap)))

class figure1(cmdline.command):
    """Bragg peaks of the sine modulated integers, with the closed form
    J_n(2 pi (m - alpha n) epsilon)^2 for comparison.

    Peaks are listed under both label conventions: (m, n) with
    xi = m - alpha n, and (m, -n).

    """
    help = "sine modulated integers peak table"

    @staticmethod
    def add_arguments(parser):
        parser.add_argument("--epsilon", default="0.05")
        parser.add_argument("--alpha", default="golden4")
        parser.add_argument("--cutoff", type=float, default=3.5)
        parser.add_argument("--label-bound", type=int, default=3,
                            dest="label_bound")
        parser.add_argument("--min-intensity", type=float, default=1e-6,
                            dest="min_intensity")
        parser.add_argument("--out", required=True, help="Output CSV file")

    @staticmethod
    def run(args):
        epsilon = to_number(args.epsilon, "--epsilon")
        alpha = to_number(args.alpha, "--alpha")
        cfg = SchemeConfig.preset("sine", epsilon=epsilon, alpha=alpha)
        spec = spectrum(cfg.scheme, cfg.weight, cfg.deformation, args.cutoff,
                        args.label_bound, args.min_intensity)
        rows = []
        worst = 0.0
        for e in spec:
            m, n = e.label
            z = 2 * np.pi * (m - alpha * n) * epsilon
            bessel = float(jv(n, z) ** 2)
            closed = sine_modulated_amplitude(m, -n, epsilon, alpha)
            dev = max(abs(e.intensity - bessel), abs(e.intensity - closed))
            worst = max(worst, dev)
            rows.append([m, n, m, -n, float(e.xi[0]), e.intensity, bessel,
                         closed, dev])
        if worst > 1e-8:
            log.error("figure1: intensity deviates from the Bessel closed "
                      "form by %g", worst)
            raise NumericalInvariantError(
                "intensities deviate from J_n^2 by {:.3g}".format(worst))
        with cmdline.output_file(args.out) as f:
            csvio.write_table(f, ["m", "n", "m_alt", "n_alt", "xi",
                                  "intensity", "bessel", "sine_integral",
                                  "deviation"], rows)
        cmdline.write_sidecar(args.out, _metadata(
            fingerprint=spec.fingerprint, max_deviation=worst))

class config(cmdline.command):
    """Print a scheme configuration.

    With no argument, print a template configuration.  With a preset
    name, print the expanded preset.  With a file name, check the file
    and print its canonical form.

    """
    help = "print, expand or check a scheme configuration"

    @staticmethod
    def add_arguments(parser):
        parser.add_argument("source", nargs="?",
                            help="Preset name ({}) or configuration "
                            "file".format(", ".join(sorted(PRESETS))))

    @staticmethod
    def run(args):
        if not args.source:
            sys.stdout.write(template())
        elif args.source in PRESETS:
            sys.stdout.write(SchemeConfig.preset(args.source).serialize())
        else:
            sys.stdout.write(SchemeConfig.load(args.source).serialize())

def _logging(args):
    """Configure the root logger as the options ask; returns the
    handlers added."""
    rootlog = logging.getLogger()
    added = []
    formatter = logging.Formatter(
        '%(asctime)s %(levelname)s %(name)s\n  %(message)s')
    if args.logconfig:
        logconfig = yaml.safe_load(args.logconfig)
        args.logconfig.close()
        logging.config.dictConfig(logconfig)
    else:
        handler = logging.StreamHandler()
        handler.setFormatter(formatter)
        handler.setLevel(logging.ERROR)
        rootlog.addHandler(handler)
        added.append(handler)
    if args.logfile:
        loglevel = logging.DEBUG if args.debug else logging.INFO
        loghandler = logging.StreamHandler(args.logfile)
        loghandler.setFormatter(formatter)
        loghandler.setLevel(loglevel)
        rootlog.addHandler(loghandler)
        rootlog.setLevel(loglevel)
        added.append(loghandler)
    if args.debug:
        rootlog.setLevel(logging.DEBUG)
    return added

def run(argv=None):
    """Parse the command line, run the command and return its exit
    status.

    """
    global _argv
    _argv = list(sys.argv[1:] if argv is None else argv)
    parser = argparse.ArgumentParser(
        prog="runapdiff",
        description="Cut-and-project combs and their diffraction")
    parser.add_argument("--version", action="version", version=version)
    loggroup = parser.add_mutually_exclusive_group()
    loggroup.add_argument("-y", "--log-config", help="Logging configuration "
                          "file in YAML", type=argparse.FileType('r'),
                          dest="logconfig")
    loggroup.add_argument("-l", "--logfile", type=argparse.FileType('a'),
                          dest="logfile", help="Simple logging output file")
    parser.add_argument("--debug", action="store_true", dest="debug",
                        help="Include debug output in log")
    parser.add_argument("--threads", type=int, dest="threads",
                        help="Maximum number of worker threads")
    parser.add_argument("--seed", type=int, dest="seed", default=0,
                        help="Seed for randomised checks")
    cmdline.command.add_subparsers(parser)
    parser.set_defaults(logconfig=None, logfile=None, debug=False)
    args = parser.parse_args(_argv)

    if not hasattr(args, 'command'):
        parser.error("No command supplied")
    if args.debug:
        apdiffconfig.debug = True
    if args.threads:
        apdiffconfig.threads = max(1, args.threads)
    apdiffconfig.seed = args.seed

    handlers = _logging(args)
    try:
        return cmdline.dispatch(args)
    except Exception:
        log.exception("Exception caught at top level")
        return 1
    finally:
        rootlog = logging.getLogger()
        for h in handlers:
            rootlog.removeHandler(h)
        if args.logfile:
            args.logfile.close()

def main():
    """Usual main entry point for apdiff."""
    sys.exit(run())
