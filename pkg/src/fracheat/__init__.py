"""Numerical toolkit for anisotropic fractional heat flow on simple domains.

The pipeline runs measure -> operator -> eigenpairs -> semigroup, with
boundary-behaviour diagnostics and free-space potential checks on the side:

- measures: spectral measures on the sphere, exact symbols, ellipticity.
- grids: interval / disk / rectangle domains and uniform grids.
- operator: stiffness and mass matrices, grid functions, Dirichlet solve.
- spectral: eigenpairs, Weyl audits, L^p bootstrap exponents.
- heat: eigenexpansion semigroup, decay diagnostics, spectral tail bounds.
- boundary: delta^s quotients, Holder scans, the Pohozaev identity.
- potential: free-space heat kernel, fundamental solution, L^p constants.
- audit: one callable per numbered self-check; run_all for the suite.
- cli: `fracheat <command>` front end over all of the above.
"""

from .errors import NumericalError, ValidationError
from .measures import (SpectralMeasure, ellipticity, power_concavity,
                       second_difference_certificate, symbol, weyl_constant)
from .grids import Disk, DomainGrid, Interval, Rectangle, build_grid, domain_from_json
from .operator import GridFunction, OperatorMatrices, assemble, solve_dirichlet
from .spectral import (EigenSystem, bootstrap_exponents, eigenpairs,
                       save_eigensystem, sup_norm_audit, weyl_audit)
from .heat import (HeatSolution, decay_slope, evaluate, l2_decay, project,
                   tail_bound, tail_bound_value, time_derivative,
                   uniform_bound_audit)
from .boundary import (holder_seminorm, hypothesis_scan, pohozaev_residual,
                       quotient_profile)
from .potential import (KernelProfile, fundamental_audit, fundamental_solution,
                        g_family, heat_kernel, kernel_mass, lp_estimate_check,
                        riesz_constant, riesz_potential)

__version__ = "0.1.0"

__all__ = [
    "NumericalError", "ValidationError",
    "SpectralMeasure", "symbol", "ellipticity", "power_concavity",
    "second_difference_certificate", "weyl_constant",
    "Interval", "Disk", "Rectangle", "DomainGrid", "build_grid",
    "domain_from_json",
    "GridFunction", "OperatorMatrices", "assemble", "solve_dirichlet",
    "EigenSystem", "eigenpairs", "bootstrap_exponents", "weyl_audit",
    "sup_norm_audit", "save_eigensystem",
    "HeatSolution", "project", "evaluate", "time_derivative", "l2_decay",
    "decay_slope", "tail_bound", "tail_bound_value", "uniform_bound_audit",
    "quotient_profile", "holder_seminorm", "hypothesis_scan",
    "pohozaev_residual",
    "KernelProfile", "heat_kernel", "kernel_mass", "fundamental_solution",
    "fundamental_audit", "riesz_constant", "riesz_potential", "g_family",
    "lp_estimate_check",
]
