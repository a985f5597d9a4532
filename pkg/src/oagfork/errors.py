"""Exception hierarchy shared by every module."""


class OagforkError(Exception):
    """Base class for all package errors."""


class ConfigurationError(OagforkError):
    """Invalid scene data: bad field spec, mismatched scenes, undeclared primes."""


class UsageError(OagforkError):
    """An operation was called outside its stated precondition."""


class InfeasibleError(OagforkError):
    """A requested construction has no solution (e.g. contradictory residue targets)."""


class NoRationalWitnessError(OagforkError):
    """A constraint system is satisfiable over the reals but pins a variable
    to an irrational value, so no rational witness exists.  Unreachable for
    systems produced by lexicographic sign-pattern expansion."""
