"""Exception hierarchy shared across the package.

Two top-level families so the CLI can map failures to exit codes:
``InputError`` covers anything a user can fix by changing inputs or
flags (exit 1), ``NumericalError`` covers rank problems and failed
factorizations discovered during computation (exit 2).
"""


class InputError(ValueError):
    """Invalid user input: bad schema, bad flag value, malformed file."""


class DegenerateInputError(InputError):
    """Input that is syntactically fine but carries no usable signal."""


class NumericalError(RuntimeError):
    """Numerical failure: rank deficiency, non-convergence, bad factorization."""


class CollinearSurprisesError(NumericalError):
    """Surprise and equity series are collinear; no rotation is identified."""


class IdentificationFailureError(NumericalError):
    """No admissible rotation satisfies the sign restrictions."""
