"""Error taxonomy shared across the package.

Validation failures (bad measures, bad grids, bad parameters) raise
ValidationError; checks that run but come out numerically wrong (certificate
violations, non-convergent quadrature, envelope audits) raise NumericalError.
The CLI maps these to exit codes 1 and 2 respectively.
"""


class ValidationError(ValueError):
    """Input or configuration rejected before any numerics ran."""


class NumericalError(RuntimeError):
    """A numerical guarantee failed at run time."""
