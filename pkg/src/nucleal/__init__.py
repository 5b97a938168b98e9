"""Executable finite models of relation-like monoidal categories.

The package bundles six concrete model families (boolean relations,
partial injections, degree-graded relations, complex matrices, exact
rational measure couplings, and quadrature kernels) behind one common
contract, together with a law-checking harness and a command line
front end.
"""

from nucleal.core.report import AxiomReport
from nucleal.core.rng import Lcg

__version__ = "0.1.0"

__all__ = ["AxiomReport", "Lcg", "__version__"]
