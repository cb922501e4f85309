"""This module is referred to by all the other modules that make up
apdiff for global run configuration.  main() replaces some of the
entries here from the command line and the environment; library users
may replace them directly.

"""

import os

# Has the --debug flag been set on the command line?
debug = False

# Seed for randomised checks.  The computations themselves use no
# randomness.
seed = 0

def _threads_from_environment():
    v = os.environ.get("APDIFF_THREADS")
    if v:
        try:
            return max(1, int(v))
        except ValueError:
            pass
    return os.cpu_count() or 1

# Maximum number of worker threads used for amplitude evaluation
threads = _threads_from_environment()

# Default quadrature resolution: nodes per torus coordinate, and
# Gauss-Legendre points per panel per Euclidean coordinate
torus_nodes = 256
gauss_nodes = 64

# Largest tensor-product quadrature grid built before giving up
max_quadrature_nodes = 20_000_000

# Search horizon ||k||_inf for the projection injectivity check
injectivity_horizon = 10

# Largest denominator accepted when rationalising ideal crystal offsets
max_denominator = 1000

# Sample points per unit cell when estimating sup norms
sample_points = 2048

# Number of lowest atoms whose differences seed period candidates
period_seed_atoms = 50

float_digits = 17

def fmt(x):
    """Format a float with the configured number of significant digits."""
    return "{:.{}g}".format(float(x), float_digits)
