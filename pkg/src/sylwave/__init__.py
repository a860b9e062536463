"""Multiprecision Sylvester waves of restricted partitions.

Subpackages:

* :mod:`sylwave.numerics` -- precision contexts, complex scalars, series.
* :mod:`sylwave.combinatorics` -- exact number theory and partition counts.
* :mod:`sylwave.waves` -- Sylvester waves and Farey residues.
* :mod:`sylwave.dilog` -- dilogarithm, branch zeros, saddle points.
* :mod:`sylwave.asymptotics` -- saddle-point expansion coefficients.
* :mod:`sylwave.wavesums` -- direct Farey-class residue sums.
* :mod:`sylwave.cli` -- command-line interface and table reproduction.
"""

from .numerics import BigComplex, PrecisionContext, TruncatedSeries

__version__ = "0.1.0"

__all__ = ["BigComplex", "PrecisionContext", "TruncatedSeries", "__version__"]
