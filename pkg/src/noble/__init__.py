"""Rigorous numerics for mean-field percolation bounds.

The package verifies, with certified interval arithmetic, that nearest-neighbor
bond percolation on Z^d exhibits mean-field behavior in high dimensions.  The
verification combines exact lattice-walk enumeration, certified brackets on
simple-random-walk Green's function integrals, diagrammatic bounds on the
coefficients of a non-backtracking lace expansion, and a forbidden-region
bootstrap argument that upgrades an assumed set of bounds into a strictly
smaller proven set.
"""

__version__ = "0.1.0"

from .lattice import canonicalize, orbit_size
from .walks import WalkCountTable, build_table, count_walks, srw_step_mass

__all__ = [
    "canonicalize",
    "orbit_size",
    "WalkCountTable",
    "build_table",
    "count_walks",
    "srw_step_mass",
    "__version__",
]
