"""Exception types shared across the library.

Plain ``ValueError`` is used for malformed arguments and configuration;
the two classes below mark failures that callers (notably the CLI) treat
differently from bad input.
"""


class ConstraintError(Exception):
    """A feasibility or compatibility constraint is violated.

    Raised e.g. for infeasible constellations, scheme/function mismatches,
    or cyclic-prefix margin violations.
    """


class NumericalError(Exception):
    """A numerical procedure failed (singular matrix, no detection, ...)."""
