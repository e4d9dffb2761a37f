"""Numerical tolerances shared across modules."""

UNITARITY_TOL = 1e-12
ANALYTIC_TOL = 1e-10
LAPLACE_TOL = 1e-8
DEGENERACY_TOL = 1e-10
NORM_TOL = 1e-10
SPEC_NORM_TOL = 1e-12
TIE_TOL = 1e-12
TIME_RESOLUTION = 1e-6

DEFAULT_TAIL_TOL = 1e-8
DEFAULT_COHERENT_CUTOFF = 8

# largest dense sector block built by the Fock engine (dimension, not bytes)
DEFAULT_SECTOR_BUDGET = 4000

LAPLACE_REFERENCE_TIME = 0.1
