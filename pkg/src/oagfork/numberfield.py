"""Exact arithmetic and sign determination in a real number field Q(theta).

A field is presented by a monic squarefree rational polynomial together
with an isolating interval containing exactly one of its real roots,
theta.  Elements are rational polynomials in theta, reduced below the
degree of the presenting polynomial.  The presenting polynomial may be
reducible (but squarefree): every operation is correct *as a value at
theta*, and the zero test never relies on irreducibility.

Signs are decided exactly:

* zero detection goes through gcd with the presenting polynomial plus a
  Sturm root count on the isolating interval, never through numerics;
* nonzero signs come from interval arithmetic after bisecting the
  isolating interval far enough that the evaluation excludes zero.

Polynomials are tuples of `Fraction`, constant term first, with no
trailing zero coefficients (the zero polynomial is the empty tuple).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import ConfigurationError

Poly = tuple  # tuple[Fraction, ...], constant term first

# Bisection steps before giving up on a sign; unreachable on valid input.
_REFINE_CAP = 10_000


def poly_trim(coeffs: Iterable) -> Poly:
    """Normalize a coefficient sequence: Fractions, no trailing zeros."""
    out = [Fraction(c) for c in coeffs]
    while out and out[-1] == 0:
        out.pop()
    return tuple(out)


def poly_degree(p: Poly) -> int:
    """Degree, with -1 for the zero polynomial."""
    return len(p) - 1


def poly_add(p: Poly, q: Poly) -> Poly:
    n = max(len(p), len(q))
    return poly_trim(
        (p[i] if i < len(p) else 0) + (q[i] if i < len(q) else 0) for i in range(n)
    )


def poly_neg(p: Poly) -> Poly:
    return tuple(-c for c in p)


def poly_sub(p: Poly, q: Poly) -> Poly:
    return poly_add(p, poly_neg(q))


def poly_scale(p: Poly, s) -> Poly:
    s = Fraction(s)
    if s == 0:
        return ()
    return tuple(c * s for c in p)


def poly_mul(p: Poly, q: Poly) -> Poly:
    if not p or not q:
        return ()
    out = [Fraction(0)] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        if a == 0:
            continue
        for j, b in enumerate(q):
            out[i + j] += a * b
    return poly_trim(out)


def poly_divmod(p: Poly, q: Poly) -> "tuple[Poly, Poly]":
    """Exact division with remainder over the rationals; q must be nonzero."""
    if not q:
        raise ZeroDivisionError("polynomial division by zero")
    rem = list(p)
    quo = [Fraction(0)] * max(0, len(p) - len(q) + 1)
    lead = q[-1]
    for shift in range(len(p) - len(q), -1, -1):
        c = rem[shift + len(q) - 1] / lead
        if c != 0:
            quo[shift] = c
            for i, b in enumerate(q):
                rem[shift + i] -= c * b
    return poly_trim(quo), poly_trim(rem)


def poly_mod(p: Poly, q: Poly) -> Poly:
    return poly_divmod(p, q)[1]


def poly_monic(p: Poly) -> Poly:
    if not p:
        return ()
    return poly_scale(p, Fraction(1) / p[-1])


def poly_gcd(p: Poly, q: Poly) -> Poly:
    """Monic gcd by the Euclidean algorithm."""
    a, b = p, q
    while b:
        a, b = b, poly_mod(a, b)
    return poly_monic(a)


def poly_derivative(p: Poly) -> Poly:
    return poly_trim(i * c for i, c in enumerate(p) if i > 0)


def poly_eval(p: Poly, x) -> Fraction:
    x = Fraction(x)
    acc = Fraction(0)
    for c in reversed(p):
        acc = acc * x + c
    return acc


def poly_eval_interval(p: Poly, lo: Fraction, hi: Fraction) -> "tuple[Fraction, Fraction]":
    """Enclosure of p([lo, hi]) by interval Horner evaluation."""
    alo = ahi = Fraction(0)
    for c in reversed(p):
        cands = (alo * lo, alo * hi, ahi * lo, ahi * hi)
        alo, ahi = min(cands) + c, max(cands) + c
    return alo, ahi


def sturm_sequence(p: Poly) -> "list[Poly]":
    seq = [p, poly_derivative(p)]
    while seq[-1]:
        seq.append(poly_neg(poly_mod(seq[-2], seq[-1])))
    seq.pop()
    return seq


def _sign_variations(seq: Sequence[Poly], x: Fraction) -> int:
    signs = []
    for p in seq:
        v = poly_eval(p, x)
        if v != 0:
            signs.append(1 if v > 0 else -1)
    return sum(1 for a, b in zip(signs, signs[1:]) if a != b)


def count_roots(p: Poly, lo: Fraction, hi: Fraction) -> int:
    """Number of distinct real roots of p in the half-open interval (lo, hi]."""
    if not p:
        raise ValueError("root count of the zero polynomial")
    seq = sturm_sequence(p)
    return _sign_variations(seq, lo) - _sign_variations(seq, hi)


@dataclass(frozen=True)
class FieldSpec:
    """A real number field Q(theta): monic squarefree minpoly plus an
    isolating interval containing exactly one real root theta."""

    minpoly: Poly
    interval: "tuple[Fraction, Fraction]"

    @staticmethod
    def make(minpoly: Iterable, interval: Sequence) -> "FieldSpec":
        spec = FieldSpec(poly_trim(minpoly), (Fraction(interval[0]), Fraction(interval[1])))
        spec.validate()
        return spec

    @staticmethod
    def rationals() -> "FieldSpec":
        """The trivial field Q, with theta = 0 presented by x."""
        return FieldSpec.make([0, 1], (-1, 1))

    def validate(self) -> None:
        p = self.minpoly
        lo, hi = self.interval
        if poly_degree(p) < 1:
            raise ConfigurationError("minpoly must have degree >= 1")
        if p[-1] != 1:
            raise ConfigurationError("minpoly must be monic")
        if poly_degree(poly_gcd(p, poly_derivative(p))) > 0:
            raise ConfigurationError("minpoly must be squarefree")
        if not lo < hi:
            raise ConfigurationError("isolating interval must satisfy lo < hi")
        vlo, vhi = poly_eval(p, lo), poly_eval(p, hi)
        if vlo == 0 or vhi == 0 or (vlo > 0) == (vhi > 0):
            raise ConfigurationError("minpoly must change sign across the isolating interval")
        if count_roots(p, lo, hi) != 1:
            raise ConfigurationError("isolating interval must contain exactly one root")

    @property
    def degree(self) -> int:
        return poly_degree(self.minpoly)

    def element(self, coeffs: Iterable) -> "FieldElement":
        return FieldElement(self, poly_mod(poly_trim(coeffs), self.minpoly))

    def rational(self, q) -> "FieldElement":
        return self.element([Fraction(q)])

    def theta(self) -> "FieldElement":
        return self.element([0, 1])

    def zero(self) -> "FieldElement":
        return self.element([])

    def one(self) -> "FieldElement":
        return self.rational(1)


# Refinement state per spec: ('interval', lo, hi) with opposite nonzero
# minpoly signs, or ('point', m) once bisection hits the root exactly.
# Monotone refinement, so sharing across calls is always sound.
_interval_state: dict = {}


def _state(spec: FieldSpec):
    st = _interval_state.get(spec)
    if st is None:
        st = ("interval", spec.interval[0], spec.interval[1])
        _interval_state[spec] = st
    return st


def _refine_once(spec: FieldSpec):
    st = _state(spec)
    if st[0] == "point":
        return st
    _, lo, hi = st
    mid = (lo + hi) / 2
    vmid = poly_eval(spec.minpoly, mid)
    if vmid == 0:
        st = ("point", mid)
    elif (vmid > 0) == (poly_eval(spec.minpoly, lo) > 0):
        st = ("interval", mid, hi)
    else:
        st = ("interval", lo, mid)
    _interval_state[spec] = st
    return st


def theta_enclosure(spec: FieldSpec, width: Fraction) -> "tuple[Fraction, Fraction]":
    """Rational enclosure of theta with hi - lo <= width."""
    st = _state(spec)
    for _ in range(_REFINE_CAP):
        if st[0] == "point":
            return st[1], st[1]
        if st[2] - st[1] <= width:
            return st[1], st[2]
        st = _refine_once(spec)
    raise ConfigurationError("isolating interval refinement did not converge")


def nf_sign(e: "FieldElement", spec: FieldSpec) -> int:
    """Exact sign of e(theta) in {-1, 0, +1}.

    Zero is decided algebraically: theta is a root of gcd(e, minpoly)
    (checked by a Sturm count on the isolating interval) iff the value
    vanishes.  Nonzero signs come from interval evaluation after enough
    bisection steps to exclude zero.
    """
    if e.spec != spec:
        raise ConfigurationError("element does not belong to the given field spec")
    p = e.coeffs
    if not p:
        return 0
    if len(p) == 1:  # rational constant: no refinement needed
        return 1 if p[0] > 0 else -1
    st = _state(spec)
    if st[0] == "point":
        v = poly_eval(p, st[1])
        return 0 if v == 0 else (1 if v > 0 else -1)
    g = poly_gcd(p, spec.minpoly)
    if poly_degree(g) >= 1 and count_roots(g, st[1], st[2]) >= 1:
        return 0
    for _ in range(_REFINE_CAP):
        st = _state(spec)
        if st[0] == "point":
            v = poly_eval(p, st[1])
            return 0 if v == 0 else (1 if v > 0 else -1)
        lo, hi = poly_eval_interval(p, st[1], st[2])
        if lo > 0:
            return 1
        if hi < 0:
            return -1
        _refine_once(spec)
    raise ConfigurationError("sign refinement did not converge; field spec is inconsistent")


def value_enclosure(e: "FieldElement", width: Fraction) -> "tuple[Fraction, Fraction]":
    """Rational enclosure of e(theta) with hi - lo <= width."""
    spec = e.spec
    if not e.coeffs:
        return Fraction(0), Fraction(0)
    if len(e.coeffs) == 1:
        return e.coeffs[0], e.coeffs[0]
    for _ in range(_REFINE_CAP):
        st = _state(spec)
        if st[0] == "point":
            v = poly_eval(e.coeffs, st[1])
            return v, v
        lo, hi = poly_eval_interval(e.coeffs, st[1], st[2])
        if hi - lo <= width:
            return lo, hi
        _refine_once(spec)
    raise ConfigurationError("enclosure refinement did not converge")


@dataclass(frozen=True)
class FieldElement:
    """An element of Q(theta), stored reduced below deg(minpoly).

    Structural equality compares reduced coefficient tuples; when the
    presenting polynomial is reducible two distinct tuples can denote the
    same value at theta, so value comparisons go through :meth:`sign` on
    the difference.
    """

    spec: FieldSpec
    coeffs: Poly

    def _check(self, other: "FieldElement") -> None:
        if self.spec != other.spec:
            raise ConfigurationError("mixed field specs in element arithmetic")

    def __add__(self, other):
        other = self._coerce(other)
        # sums never leave the reduced window, no reduction needed
        return FieldElement(self.spec, poly_add(self.coeffs, other.coeffs))

    def __sub__(self, other):
        other = self._coerce(other)
        return FieldElement(self.spec, poly_sub(self.coeffs, other.coeffs))

    def __neg__(self):
        return FieldElement(self.spec, poly_neg(self.coeffs))

    def __mul__(self, other):
        other = self._coerce(other)
        prod = poly_mul(self.coeffs, other.coeffs)
        if len(prod) < len(self.spec.minpoly):
            return FieldElement(self.spec, prod)
        return FieldElement(self.spec, poly_mod(prod, self.spec.minpoly))

    __radd__ = __add__
    __rmul__ = __mul__

    def __rsub__(self, other):
        return (-self) + other

    def __truediv__(self, other):
        other = self._coerce(other)
        return self * other.inverse()

    def _coerce(self, other) -> "FieldElement":
        if isinstance(other, FieldElement):
            self._check(other)
            return other
        return self.spec.rational(other)

    def scale(self, s) -> "FieldElement":
        return FieldElement(self.spec, poly_scale(self.coeffs, Fraction(s)))

    def sign(self) -> int:
        return nf_sign(self, self.spec)

    def is_zero(self) -> bool:
        """Exact test for value zero at theta."""
        if not self.coeffs:
            return True
        return self.sign() == 0

    def equals_value(self, other) -> bool:
        return (self - other).is_zero()

    def is_rational_repr(self) -> bool:
        """True when the reduced representative is a constant polynomial."""
        return len(self.coeffs) <= 1

    def as_fraction(self) -> Fraction:
        if not self.is_rational_repr():
            raise ValueError("element representative is not a rational constant")
        return self.coeffs[0] if self.coeffs else Fraction(0)

    def inverse(self) -> "FieldElement":
        """Multiplicative inverse of the value at theta.

        With a reducible squarefree presenting polynomial the
        representative need not be invertible modulo it; inverting modulo
        the squarefree cofactor that still vanishes at theta yields a
        representative with the correct value.
        """
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero field element")
        if len(self.coeffs) == 1:
            return FieldElement(self.spec, (Fraction(1) / self.coeffs[0],))
        modulus = self.spec.minpoly
        g = poly_gcd(self.coeffs, modulus)
        if poly_degree(g) >= 1:
            modulus, rem = poly_divmod(modulus, g)
            assert not rem
        inv = _invert_mod(self.coeffs, modulus)
        return FieldElement(self.spec, poly_mod(inv, self.spec.minpoly))


def _invert_mod(p: Poly, modulus: Poly) -> Poly:
    """Extended Euclid: representative r with r*p == 1 (mod modulus)."""
    r0, r1 = modulus, poly_mod(p, modulus)
    s0, s1 = (), (Fraction(1),)
    while r1:
        q, r2 = poly_divmod(r0, r1)
        r0, r1 = r1, r2
        s0, s1 = s1, poly_sub(s0, poly_mul(q, s1))
    if poly_degree(r0) != 0:
        raise ZeroDivisionError("element not invertible modulo the given factor")
    return poly_scale(s0, Fraction(1) / r0[0])
