"""Integer congruence side of the decision: lattices, Hermite/Smith normal
forms, special-subgroup saturation, and the per-prime conditions.

Configurations declare, per prime l, how the ambient group sits over lM:
`divisible` (lM = M), `finite_index` (M/lM of size l^d) or `infinite_index`.
For the non-divisible kinds each declared element carries a residue vector;
the vector reduced mod l^N is the element's image in M/(l^N)M, which is a
free Z/l^N-module in the template.  Every condition below is then a finite
abelian-group computation decided by normal forms, with the stabilization
bound N* read off the elementary divisors.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional, Sequence

from .errors import ConfigurationError, InfeasibleError

Matrix = "list[list[int]]"


def _identity(n: int) -> Matrix:
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


def _row_combine(A: Matrix, dst: int, src: int, q: int) -> None:
    A[dst] = [a - q * b for a, b in zip(A[dst], A[src])]


def hermite_normal_form(rows: Sequence[Sequence[int]]) -> "tuple[Matrix, Matrix]":
    """Row-style Hermite form H with unimodular U such that U*rows = H.

    Pivots are positive, entries above a pivot are reduced into [0, pivot),
    zero rows are pushed to the bottom.
    """
    A = [list(map(int, r)) for r in rows]
    m = len(A)
    n = len(A[0]) if m else 0
    if any(len(r) != n for r in A):
        raise ValueError("ragged matrix")
    U = _identity(m)
    r = 0
    for c in range(n):
        piv = next((i for i in range(r, m) if A[i][c] != 0), None)
        if piv is None:
            continue
        A[r], A[piv] = A[piv], A[r]
        U[r], U[piv] = U[piv], U[r]
        for i in range(r + 1, m):
            while A[i][c] != 0:
                q = A[r][c] // A[i][c]
                _row_combine(A, r, i, q)
                _row_combine(U, r, i, q)
                A[r], A[i] = A[i], A[r]
                U[r], U[i] = U[i], U[r]
        if A[r][c] < 0:
            A[r] = [-x for x in A[r]]
            U[r] = [-x for x in U[r]]
        for i in range(r):
            q = A[i][c] // A[r][c]
            if q:
                _row_combine(A, i, r, q)
                _row_combine(U, i, r, q)
        r += 1
        if r == m:
            break
    return A, U


def smith_normal_form(rows: Sequence[Sequence[int]]) -> "tuple[Matrix, Matrix, Matrix]":
    """Smith form D with unimodular U, V such that U*rows*V = D and the
    diagonal entries divide in a chain."""
    A = [list(map(int, r)) for r in rows]
    m = len(A)
    n = len(A[0]) if m else 0
    U = _identity(m)
    V = _identity(n)

    def col_combine(dst: int, src: int, q: int) -> None:
        for row in A:
            row[dst] -= q * row[src]
        for row in V:
            row[dst] -= q * row[src]

    def col_swap(i: int, j: int) -> None:
        for row in A:
            row[i], row[j] = row[j], row[i]
        for row in V:
            row[i], row[j] = row[j], row[i]

    t = 0
    while True:
        entries = [
            (abs(A[i][j]), i, j)
            for i in range(t, m)
            for j in range(t, n)
            if A[i][j] != 0
        ]
        if not entries:
            break
        _, pi, pj = min(entries)
        A[t], A[pi] = A[pi], A[t]
        U[t], U[pi] = U[pi], U[t]
        if pj != t:
            col_swap(t, pj)
        while True:
            done = True
            for i in range(t + 1, m):
                while A[i][t] != 0:
                    q = A[i][t] // A[t][t]
                    _row_combine(A, i, t, q)
                    _row_combine(U, i, t, q)
                    if A[i][t] != 0:
                        A[t], A[i] = A[i], A[t]
                        U[t], U[i] = U[i], U[t]
                        done = False
            for j in range(t + 1, n):
                while A[t][j] != 0:
                    q = A[t][j] // A[t][t]
                    col_combine(j, t, q)
                    if A[t][j] != 0:
                        col_swap(t, j)
                        done = False
            if done:
                break
        bad = next(
            (
                (i, j)
                for i in range(t + 1, m)
                for j in range(t + 1, n)
                if A[i][j] % A[t][t] != 0
            ),
            None,
        )
        if bad is not None:
            _row_combine(A, t, bad[0], -1)
            _row_combine(U, t, bad[0], -1)
            continue
        if A[t][t] < 0:
            A[t] = [-x for x in A[t]]
            U[t] = [-x for x in U[t]]
        t += 1
        if t == min(m, n):
            break
    return A, U, V


@dataclass(frozen=True)
class HermiteSmith:
    hnf: tuple
    hnf_transform: tuple
    snf: tuple
    row_transform: tuple
    col_transform: tuple
    divisors: tuple

    @property
    def rank(self) -> int:
        return len(self.divisors)


def hermite_smith(mat: Sequence[Sequence[int]]) -> HermiteSmith:
    """Canonical Hermite and Smith forms of an integer matrix, with the
    witnessing unimodular transforms."""
    H, UH = hermite_normal_form(mat)
    D, U, V = smith_normal_form(mat)
    divisors = tuple(
        D[i][i] for i in range(min(len(D), len(D[0]) if D else 0)) if D[i][i] != 0
    )
    freeze = lambda M: tuple(tuple(r) for r in M)
    return HermiteSmith(freeze(H), freeze(UH), freeze(D), freeze(U), freeze(V), divisors)


def _unimodular_inverse(V: Sequence[Sequence[int]]) -> Matrix:
    from fractions import Fraction

    n = len(V)
    aug = [[Fraction(V[i][j]) for j in range(n)] + [Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    for c in range(n):
        piv = next(i for i in range(c, n) if aug[i][c] != 0)
        aug[c], aug[piv] = aug[piv], aug[c]
        aug[c] = [x / aug[c][c] for x in aug[c]]
        for i in range(n):
            if i != c and aug[i][c] != 0:
                f = aug[i][c]
                aug[i] = [x - f * y for x, y in zip(aug[i], aug[c])]
    inv = [[aug[i][n + j] for j in range(n)] for i in range(n)]
    out = [[int(x) for x in row] for row in inv]
    if any(Fraction(out[i][j]) != inv[i][j] for i in range(n) for j in range(n)):
        raise ValueError("matrix is not unimodular")
    return out


class IntegerLattice:
    """A subgroup of Z^m presented by generator rows, with a cached Hermite
    basis for membership queries."""

    def __init__(self, rows: Iterable[Sequence[int]], width: Optional[int] = None):
        rows = [list(map(int, r)) for r in rows]
        if rows:
            w = len(rows[0])
            if any(len(r) != w for r in rows):
                raise ValueError("ragged lattice generators")
            if width is not None and width != w:
                raise ValueError("generator width does not match declared width")
            self.width = w
        else:
            if width is None:
                raise ValueError("empty lattice needs an explicit width")
            self.width = width
        self.rows = rows
        H, _ = hermite_normal_form(rows) if rows else ([], [])
        self.basis = [r for r in H if any(r)]

    @property
    def rank(self) -> int:
        return len(self.basis)

    def contains(self, vec: Sequence[int]) -> bool:
        v = list(map(int, vec))
        if len(v) != self.width:
            raise ValueError("vector width mismatch")
        for row in self.basis:
            c = next(i for i, x in enumerate(row) if x)
            if v[c] % row[c] != 0:
                return False
            q = v[c] // row[c]
            v = [a - q * b for a, b in zip(v, row)]
        return not any(v)

    def join(self, other: "IntegerLattice") -> "IntegerLattice":
        if other.width != self.width:
            raise ValueError("width mismatch in lattice join")
        return IntegerLattice(self.rows + other.rows, width=self.width)

    def scaled(self, k: int) -> "IntegerLattice":
        return IntegerLattice([[k * x for x in r] for r in self.rows], width=self.width)

    def with_modulus(self, k: int) -> "IntegerLattice":
        extra = [[k if i == j else 0 for j in range(self.width)] for i in range(self.width)]
        return IntegerLattice(self.rows + extra, width=self.width)


def left_kernel(rows: Sequence[Sequence[int]]) -> "list[list[int]]":
    """Generators of {v : v * rows = 0} over Z."""
    if not rows:
        return []
    H, U = hermite_normal_form(rows)
    return [U[i] for i in range(len(H)) if not any(H[i])]


def preimage_lattice(
    target_rows: Sequence[Sequence[int]],
    lattice: IntegerLattice,
    modulus: int,
) -> "list[list[int]]":
    """Generators of {f in Z^k : f * target_rows in lattice + modulus*Z^m}."""
    k = len(target_rows)
    stacked = list(target_rows) + lattice.rows + [
        [modulus if i == j else 0 for j in range(lattice.width)]
        for i in range(lattice.width)
    ]
    gens = [v[:k] for v in left_kernel(stacked)]
    gens += [[modulus if i == j else 0 for j in range(k)] for i in range(k)]
    return gens


def saturate_lattice_at(lattice: IntegerLattice, l: int) -> IntegerLattice:
    """The l-saturation {v : l^j v in L for some j}, as an integer lattice."""
    if not lattice.rows:
        return lattice
    D, U, V = smith_normal_form(lattice.rows)
    Vinv = _unimodular_inverse(V)
    out = []
    for i in range(min(len(D), lattice.width)):
        d = D[i][i]
        if d == 0:
            continue
        while d % l == 0:
            d //= l
        out.append([d * Vinv[i][j] for j in range(lattice.width)])
    return IntegerLattice(out, width=lattice.width)


def _valuation(n: int, l: int) -> int:
    n = abs(n)
    v = 0
    while n and n % l == 0:
        n //= l
        v += 1
    return v


def _divisor_valuation(rows: Sequence[Sequence[int]], l: int) -> int:
    if not rows or not rows[0]:
        return 0
    hs = hermite_smith(rows)
    return max((_valuation(d, l) for d in hs.divisors), default=0)


def quotient_map(S: IntegerLattice, l: int):
    """Coordinates of Z_l^m modulo the l-saturation of S.

    The quotient by a saturated lattice is a free Z_l-module; the returned
    callable maps an integer vector to its integer coordinate vector there
    (empty when S spans everything).
    """
    sat = saturate_lattice_at(S, l)
    if not sat.rows:
        return lambda x: tuple(int(v) for v in x)
    D, _, V = smith_normal_form(sat.basis)
    rank = sum(1 for i in range(min(len(D), sat.width)) if D[i][i] != 0)
    cols = list(range(rank, sat.width))

    def project(x):
        xv = [sum(int(x[i]) * V[i][j] for i in range(sat.width)) for j in cols]
        return tuple(xv)

    return project


def stabilization_bound(l: int, target: IntegerLattice, *parameter_lattices: IntegerLattice) -> int:
    """N* such that the per-prime verdicts are constant beyond it.

    Taken as 1 + the largest l-adic valuation among the elementary divisors
    of the target generators reduced modulo each parameter lattice (the
    image module in the free quotient determines where a verdict can first
    flip), maxed with the same quantity for the plainly stacked matrix.
    """
    worst = 0
    stacked = list(target.rows)
    for lat in parameter_lattices:
        stacked += lat.rows
        proj = quotient_map(lat, l)
        reduced = [list(proj(r)) for r in target.rows]
        worst = max(worst, _divisor_valuation(reduced, l))
    worst = max(worst, _divisor_valuation(stacked, l))
    return 1 + worst


KIND_DIVISIBLE = "divisible"
KIND_FINITE = "finite_index"
KIND_INFINITE = "infinite_index"

UNIT_NAME = "one"


@dataclass(frozen=True)
class PrimeSpec:
    """Residue semantics of one prime: the index kind, the residue-vector
    width, and the declared residues per named generator."""

    l: int
    kind: str
    width: int = 0
    residues: tuple = ()  # tuple of (name, tuple[int, ...])
    n_max: Optional[int] = None

    def __post_init__(self):
        if self.kind not in (KIND_DIVISIBLE, KIND_FINITE, KIND_INFINITE):
            raise ConfigurationError(f"unknown prime kind {self.kind!r}")
        if self.kind == KIND_DIVISIBLE:
            if self.residues or self.width:
                raise ConfigurationError("divisible primes carry no residue data")
        else:
            if self.width < 1:
                raise ConfigurationError("non-divisible primes need a residue width")
            for name, vec in self.residues:
                if len(vec) != self.width:
                    raise ConfigurationError(f"residue width mismatch for {name!r}")
        # canonical order so value equality ignores declaration order
        object.__setattr__(
            self,
            "residues",
            tuple(sorted((n, tuple(v)) for n, v in self.residues)),
        )

    def residue(self, name: str) -> "tuple[int, ...]":
        for n, vec in self.residues:
            if n == name:
                return tuple(vec)
        return (0,) * self.width


@dataclass(frozen=True)
class CongruenceSpec:
    """Per-prime residue declarations of one configuration."""

    primes: tuple = ()  # tuple[PrimeSpec, ...]

    def __post_init__(self):
        seen = set()
        for p in self.primes:
            if p.l in seen:
                raise ConfigurationError(f"prime {p.l} declared twice")
            seen.add(p.l)

    def prime(self, l: int) -> PrimeSpec:
        for p in self.primes:
            if p.l == l:
                return p
        raise ConfigurationError(f"prime {l} is not declared in the congruence spec")

    def declared(self) -> "tuple[int, ...]":
        return tuple(p.l for p in self.primes)


def _congruence_of(scene) -> CongruenceSpec:
    spec = getattr(scene, "congruence", scene)
    if not isinstance(spec, CongruenceSpec):
        raise ConfigurationError("expected a scene with a congruence spec")
    return spec


@dataclass(frozen=True)
class SpecialClosure:
    """Relative divisible closure of a set of named generators plus the
    distinguished unit, presented per prime by an l-saturated lattice."""

    names: tuple
    lattices: tuple = field(default=())  # tuple of (l, IntegerLattice)

    def lattice(self, l: int) -> IntegerLattice:
        for p, lat in self.lattices:
            if p == l:
                return lat
        raise ConfigurationError(f"prime {l} not tracked by this closure")


def saturate_special(gens: Sequence[str], scene) -> SpecialClosure:
    """Close the generated subgroup under the divisions the ambient admits,
    after adjoining the unit.  Idempotent by construction (saturation of a
    saturated lattice is itself)."""
    spec = _congruence_of(scene)
    names = tuple(dict.fromkeys(list(gens) + [UNIT_NAME]))
    lattices = []
    for p in spec.primes:
        if p.kind == KIND_DIVISIBLE:
            continue
        rows = [list(p.residue(n)) for n in names]
        lat = saturate_lattice_at(IntegerLattice(rows, width=p.width), p.l)
        lattices.append((p.l, lat))
    return SpecialClosure(names, tuple(lattices))


def member_mod_lN(x: Sequence[int], S: IntegerLattice, l: int, N: int, scene) -> bool:
    """Decide x in S + l^N * M under the scene's residue semantics."""
    spec = _congruence_of(scene)
    p = spec.prime(l)
    if N < 1:
        raise ValueError("N must be >= 1")
    if p.kind == KIND_DIVISIBLE:
        return True
    return S.with_modulus(l**N).contains(x)


def _nstar(p: PrimeSpec, target: IntegerLattice, *parameter_lattices: IntegerLattice) -> int:
    bound = stabilization_bound(p.l, target, *parameter_lattices)
    if p.n_max is not None:
        # an explicit n_max only extends the sweep; shrinking it below the
        # stabilization bound would be unsound
        bound = max(bound, p.n_max)
    return bound


def infinite_index_condition(
    C: IntegerLattice, Aprime: IntegerLattice, Bprime: IntegerLattice, l: int, scene
):
    """Check that every combination of the tuple lying in B' mod l^N already
    lies in A' mod l^N, for all N up to the stabilization bound.

    Returns (True, None) or (False, (coefficients, N)) with the offending
    integer combination.  Decided as the inclusion
    (C + l^N M) cap (B' + l^N M) <= A' + l^N M.
    """
    spec = _congruence_of(scene)
    p = spec.prime(l)
    if p.kind != KIND_INFINITE:
        raise ConfigurationError(f"prime {l} is not declared of infinite index")
    nstar = _nstar(p, C, Aprime, Bprime)
    for N in range(1, nstar + 1):
        modulus = l**N
        for f in preimage_lattice(C.rows, Bprime, modulus):
            combo = [sum(fi * row[j] for fi, row in zip(f, C.rows)) for j in range(C.width)]
            if not member_mod_lN(combo, Aprime, l, N, spec):
                return False, (tuple(f), N)
    return True, None


def finite_index_condition(C: IntegerLattice, Aprime: IntegerLattice, l: int, scene) -> bool:
    """Check that every generator of the tuple subgroup lies in A' + l^N M
    for every N up to the stabilization bound (the template-level reading of
    membership in A' plus the intersection of all l^N M)."""
    spec = _congruence_of(scene)
    p = spec.prime(l)
    if p.kind != KIND_FINITE:
        raise ConfigurationError(f"prime {l} is not declared of finite index")
    nstar = _nstar(p, C, Aprime)
    return all(
        member_mod_lN(row, Aprime, l, N, spec)
        for N in range(1, nstar + 1)
        for row in C.rows
    )


def _as_rows(x) -> "list[list[int]]":
    if not x:
        return []
    if isinstance(x[0], (int,)):
        return [list(x)]
    return [list(r) for r in x]


def ltype_equal(x, y, S: IntegerLattice, l: int, scene) -> bool:
    """Decide whether two tuples realize the same congruence type over the
    parameter lattice: every integer combination must either agree mod l^N
    or fall outside S + l^N M on both sides, for all N up to the bound."""
    spec = _congruence_of(scene)
    p = spec.prime(l)
    if p.kind == KIND_DIVISIBLE:
        return True
    xr, yr = _as_rows(x), _as_rows(y)
    if len(xr) != len(yr):
        raise ValueError("tuple length mismatch")
    diff = [[a - b for a, b in zip(rx, ry)] for rx, ry in zip(xr, yr)]
    # bound from the paired rows (difference | image mod S), for both sides
    proj = quotient_map(S, l)
    paired_x = [list(d) + list(proj(r)) for d, r in zip(diff, xr)]
    paired_y = [list(d) + list(proj(r)) for d, r in zip(diff, yr)]
    worst = max(_divisor_valuation(paired_x, l), _divisor_valuation(paired_y, l))
    nstar = max(
        1 + worst, _nstar(p, IntegerLattice(xr + yr, width=p.width) if xr else S, S)
    )
    for N in range(1, nstar + 1):
        modulus = l**N
        for side in (xr, yr):
            for f in preimage_lattice(side, S, modulus):
                d = [sum(fi * row[j] for fi, row in zip(f, diff)) for j in range(p.width)]
                if any(v % modulus for v in d):
                    return False
    return True


def crt_realize(targets: Sequence) -> "tuple[int, ...]":
    """Residue coordinates matching all (l, N, residue) targets at once, by
    the classical Chinese remainder theorem applied per coordinate."""
    if not targets:
        return (0,)
    norm = []
    width = None
    for l, N, residue in targets:
        vec = [int(residue)] if isinstance(residue, int) else [int(v) for v in residue]
        if width is None:
            width = len(vec)
        elif width != len(vec):
            raise ValueError("residue targets have mixed widths")
        norm.append((int(l), int(N), vec))
    by_prime: "dict[int, tuple[int, list[int]]]" = {}
    for l, N, vec in norm:
        if l in by_prime:
            N0, vec0 = by_prime[l]
            lo = l ** min(N, N0)
            if any((a - b) % lo for a, b in zip(vec, vec0)):
                raise InfeasibleError(f"contradictory residue targets at prime {l}")
            if N > N0:
                by_prime[l] = (N, vec)
        else:
            by_prime[l] = (N, vec)
    out = [0] * width
    modulus = 1
    for l, (N, vec) in sorted(by_prime.items()):
        m = l**N
        # combine out (mod modulus) with vec (mod m)
        inv = pow(modulus, -1, m)
        for j in range(width):
            t = ((vec[j] - out[j]) * inv) % m
            out[j] = out[j] + modulus * t
        modulus *= m
    return tuple(v % modulus for v in out)
