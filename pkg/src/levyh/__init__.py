"""Hierarchical-matrix solvers for Levy-driven convection-diffusion
equations, with singularity-subtraction evaluation of fractional
(heavy-tailed) generators.

Subpackage map:

- :mod:`levyh.geometry` -- point sets, cluster trees, admissibility
- :mod:`levyh.hmatrix` -- H-matrix storage and the two builders
- :mod:`levyh.hops` -- H-arithmetic: matvec, triangular solves, H-LU
- :mod:`levyh.levy` -- Crank-Nicolson discretization and stability symbol
- :mod:`levyh.fractional` -- singular/heavy-tail measures (fractional
  Laplacian), variable-order stiffness assembly
- :mod:`levyh.solvers` -- PCG and restarted GMRES with preconditioners
- :mod:`levyh.cli` -- benchmark and experiment harness (``levyh`` command)
"""

from . import fractional, geometry, hmatrix, hops, levy, solvers  # noqa: F401

__version__ = "0.1.0"
