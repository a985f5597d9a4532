"""Exact decision procedures for independence in regular ordered abelian groups.

The package decides, for finitely presented configurations (a lexicographic
ambient group, parameter spans A <= B, a tuple c), whether the tuple is
forking/dividing-independent from B over A, whether its type admits an
invariant extension, and computes the structural apparatus behind the
decision: Archimedean classes, the convex-subgroup invariants of cuts,
valuation block decompositions, normal-form bases, and the classification
of invariant type extensions.

All arithmetic is exact: rationals are `fractions.Fraction`, real algebraic
constants live in a fixed number field with sign determination by Sturm
sequences, and integer congruence conditions are decided by Hermite/Smith
normal forms.
"""

__version__ = "0.1.0"

from .errors import ConfigurationError, InfeasibleError, UsageError

__all__ = [
    "ConfigurationError",
    "InfeasibleError",
    "UsageError",
    "__version__",
]
