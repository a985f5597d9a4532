"""Independent numeric oracles used by several test modules.

Deliberately avoids the package's own refinement machinery: theta is
re-isolated here by plain bisection on Fractions, so numeric cross-checks
do not share state with the code under test.
"""

from fractions import Fraction

from oagfork.numberfield import FieldElement, poly_eval, poly_eval_interval


def bisect_root(minpoly, lo, hi, width):
    """Shrink [lo, hi] around the sign change of minpoly to the given width."""
    lo, hi = Fraction(lo), Fraction(hi)
    slo = poly_eval(minpoly, lo) > 0
    while hi - lo > width:
        mid = (lo + hi) / 2
        v = poly_eval(minpoly, mid)
        if v == 0:
            return mid, mid
        if (v > 0) == slo:
            lo = mid
        else:
            hi = mid
    return lo, hi


def numeric_sign(e: FieldElement, digits: int = 50):
    """Sign of e(theta) by interval evaluation at ~`digits` decimal digits.

    Returns +1/-1 when the evaluation excludes zero, None when the
    numerics are inconclusive at this precision.
    """
    spec = e.spec
    width = Fraction(1, 10 ** (digits + 5))
    lo, hi = bisect_root(spec.minpoly, spec.interval[0], spec.interval[1], width)
    vlo, vhi = poly_eval_interval(e.coeffs, lo, hi)
    if vlo > 0:
        return 1
    if vhi < 0:
        return -1
    return None
