"""
Real subbundle lab.

Divisor-level machinery for real degree-0 line subbundles of rank-2,
degree-1 bundles on real genus-2 hyperelliptic curves: fixed circles and
parity signatures, Atiyah orbits, linear equivalence by interpolation,
two-torsion, subbundle parity tables, the quadric-pencil model and a
seeded Monte Carlo survey.

Author: Ruslan Magana Vsevolodovna
Website: ruslanmv.com
License: Apache 2.0
"""

__version__ = "1.0.0"

__all__ = ["__version__"]
