"""Exact arithmetic in the tower field Q(zeta_p, q^(1/p)).

For an odd prime p and a positive rational q that is not a pth power, the
field is a p(p-1)-dimensional Q-algebra with basis zeta^i * t^j for
0 <= i < p-1, 0 <= j < p, subject to the cyclotomic relation
1 + zeta + ... + zeta^(p-1) = 0 and the Kummer relation t^p = q.  It is
Galois over Q with group Z/p x| (Z/p)^*: the automorphisms send
zeta -> zeta^u and t -> zeta^i t.

Inverses are computed by solving the p(p-1)-dimensional linear system of
multiplication; a zero pivot would contradict irreducibility of t^p - q over
Q(zeta_p) and raises an internal error naming that assumption.

The module also computes j-invariants of branch-point triples
(a, b, c, infinity) of curves y^2 = (x-a)(x-b)(x-c), and checks that the
p(p-1) Galois conjugates of the triple (0, 1 - zeta, gamma * t) have pairwise
distinct j-invariants, which certifies the conjugate curves are pairwise
non-isomorphic.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Tuple

from .errors import (
    DegenerateTriple,
    DessinkitError,
    FieldMismatch,
    NotAUnit,
    OutOfRange,
)

__all__ = [
    "TowerField",
    "TowerElement",
    "CurveTriple",
    "DistinctnessReport",
    "j_invariant_of_triple",
    "conjugate_triples_distinct",
]


def _integer_root(x: int, k: int) -> Optional[int]:
    """Exact kth root of a nonnegative integer, or None."""
    if x < 0:
        raise ValueError("negative radicand")
    if x in (0, 1):
        return x
    lo, hi = 1, 1 << (x.bit_length() // k + 1)
    while lo < hi:
        mid = (lo + hi) // 2
        if mid**k < x:
            lo = mid + 1
        else:
            hi = mid
    return lo if lo**k == x else None


def _is_pth_power(q: Fraction, p: int) -> bool:
    # q > 0 in lowest terms is a pth power iff numerator and denominator are
    return (
        _integer_root(q.numerator, p) is not None
        and _integer_root(q.denominator, p) is not None
    )


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


class TowerField:
    """The field Q(zeta_p, q^(1/p)) for odd prime p and non-pth-power q > 0."""

    def __init__(self, p: int, q):
        q = Fraction(q)
        if p < 3 or p % 2 == 0 or not _is_prime(p):
            raise OutOfRange(f"p must be an odd prime, got {p}")
        if q <= 0:
            raise OutOfRange(f"q must be positive, got {q}")
        if _is_pth_power(q, p):
            raise OutOfRange(f"q = {q} is a {p}th power of a rational")
        self.p = p
        self.q = q
        self.dimension = p * (p - 1)

    def __eq__(self, other) -> bool:
        return isinstance(other, TowerField) and (self.p, self.q) == (other.p, other.q)

    def __hash__(self) -> int:
        return hash((self.p, self.q))

    def __repr__(self) -> str:
        return f"TowerField(p={self.p}, q={self.q})"

    # -- element constructors -------------------------------------------------

    def zero(self) -> "TowerElement":
        return TowerElement(self, {})

    def one(self) -> "TowerElement":
        return self.rational(1)

    def rational(self, value) -> "TowerElement":
        v = Fraction(value)
        return TowerElement(self, {(0, 0): v} if v else {})

    def zeta(self, power: int = 1) -> "TowerElement":
        """zeta^power as an element (power taken mod p)."""
        return self._monomial(power % self.p, 0)

    def root(self) -> "TowerElement":
        """The chosen pth root t of q."""
        return self._monomial(0, 1)

    def _monomial(self, zeta_exp: int, t_exp: int, coeff: Fraction = Fraction(1)):
        """coeff * zeta^zeta_exp * t^t_exp reduced into the basis."""
        p = self.p
        zeta_exp %= p
        qpow, t_exp = divmod(t_exp, p)
        coeff = coeff * self.q**qpow
        if coeff == 0:
            return self.zero()
        if zeta_exp < p - 1:
            return TowerElement(self, {(zeta_exp, t_exp): coeff})
        # zeta^(p-1) = -(1 + zeta + ... + zeta^(p-2))
        coords = {(i, t_exp): -coeff for i in range(p - 1)}
        return TowerElement(self, coords)

    def element(self, coords) -> "TowerElement":
        """Element from a {(zeta_exp, t_exp): coefficient} mapping (reduced)."""
        acc = self.zero()
        for (i, j), c in coords.items():
            acc = acc + self._monomial(i, j, Fraction(c))
        return acc


class TowerElement:
    """Element with exact rational coordinates over the fixed basis."""

    __slots__ = ("field", "_coords")

    def __init__(self, field: TowerField, coords: dict):
        self.field = field
        self._coords = {k: v for k, v in coords.items() if v}

    @property
    def coordinates(self) -> dict:
        """Sparse {(zeta_exp, t_exp): Fraction} view of the coordinates."""
        return dict(self._coords)

    def _check(self, other: "TowerElement"):
        if self.field != other.field:
            raise FieldMismatch(f"{self.field} vs {other.field}")

    @property
    def is_zero(self) -> bool:
        return not self._coords

    def is_rational(self) -> bool:
        return all(k == (0, 0) for k in self._coords)

    def rational_value(self) -> Fraction:
        if not self.is_rational():
            raise ValueError(f"{self} is not rational")
        return self._coords.get((0, 0), Fraction(0))

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            other = self.field.rational(other)
        return (
            isinstance(other, TowerElement)
            and self.field == other.field
            and self._coords == other._coords
        )

    def __hash__(self) -> int:
        return hash((self.field, tuple(sorted(self._coords.items()))))

    def __add__(self, other):
        if isinstance(other, (int, Fraction)):
            other = self.field.rational(other)
        self._check(other)
        coords = dict(self._coords)
        for k, v in other._coords.items():
            coords[k] = coords.get(k, Fraction(0)) + v
        return TowerElement(self.field, coords)

    __radd__ = __add__

    def __neg__(self):
        return TowerElement(self.field, {k: -v for k, v in self._coords.items()})

    def __sub__(self, other):
        if isinstance(other, (int, Fraction)):
            other = self.field.rational(other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            factor = Fraction(other)
            return TowerElement(
                self.field, {k: v * factor for k, v in self._coords.items()}
            )
        self._check(other)
        field = self.field
        p = field.p
        acc: dict = {}
        for (i1, j1), c1 in self._coords.items():
            for (i2, j2), c2 in other._coords.items():
                c = c1 * c2
                j = j1 + j2
                if j >= p:
                    j -= p
                    c *= field.q
                i = i1 + i2
                if i >= p:
                    i -= p
                if i < p - 1:
                    key = (i, j)
                    acc[key] = acc.get(key, Fraction(0)) + c
                else:
                    for ii in range(p - 1):
                        key = (ii, j)
                        acc[key] = acc.get(key, Fraction(0)) - c
        return TowerElement(field, acc)

    __rmul__ = __mul__

    def __pow__(self, exponent: int) -> "TowerElement":
        if exponent < 0:
            return self.inverse() ** (-exponent)
        result = self.field.one()
        square = self
        e = exponent
        while e:
            if e & 1:
                result = result * square
            e >>= 1
            if e:
                square = square * square
        return result

    def inverse(self) -> "TowerElement":
        """Multiplicative inverse, by a dense linear solve over Q."""
        if self.is_zero:
            raise ZeroDivisionError("inverse of zero in the tower field")
        field = self.field
        p = field.p
        dim = field.dimension
        basis = [(i, j) for i in range(p - 1) for j in range(p)]
        index = {key: k for k, key in enumerate(basis)}
        # column k of the matrix is self * basis[k]
        matrix = [[Fraction(0)] * dim for _ in range(dim)]
        for k, (i, j) in enumerate(basis):
            product = self * field._monomial(i, j)
            for key, c in product._coords.items():
                matrix[index[key]][k] = c
        rhs = [Fraction(0)] * dim
        rhs[index[(0, 0)]] = Fraction(1)
        solution = _solve(matrix, rhs)
        if solution is None:
            raise DessinkitError(
                "zero divisor encountered: the Kummer polynomial t^p - q must "
                "be irreducible over the cyclotomic field; this contradicts "
                "the certified non-pth-power hypothesis and indicates a bug"
            )
        coords = {basis[k]: solution[k] for k in range(dim) if solution[k]}
        return TowerElement(field, coords)

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return self * (1 / Fraction(other))
        return self * other.inverse()

    def __str__(self) -> str:
        if not self._coords:
            return "0"
        parts = []
        for (i, j) in sorted(self._coords):
            c = self._coords[(i, j)]
            names = []
            if i:
                names.append("z" if i == 1 else f"z^{i}")
            if j:
                names.append("t" if j == 1 else f"t^{j}")
            body = "*".join(names)
            if not body:
                parts.append(str(c))
            elif c == 1:
                parts.append(body)
            elif c == -1:
                parts.append(f"-{body}")
            else:
                parts.append(f"{c}*{body}")
        return " + ".join(parts).replace("+ -", "- ")

    def __repr__(self) -> str:
        return f"TowerElement({self!s})"


def _solve(matrix: List[List[Fraction]], rhs: List[Fraction]):
    """Gaussian elimination over Q; None when the matrix is singular."""
    n = len(matrix)
    aug = [row[:] + [rhs[i]] for i, row in enumerate(matrix)]
    for col in range(n):
        pivot = next((r for r in range(col, n) if aug[r][col] != 0), None)
        if pivot is None:
            return None
        aug[col], aug[pivot] = aug[pivot], aug[col]
        inv = 1 / aug[col][col]
        aug[col] = [v * inv for v in aug[col]]
        for r in range(n):
            if r != col and aug[r][col]:
                factor = aug[r][col]
                aug[r] = [a - factor * b for a, b in zip(aug[r], aug[col])]
    return [aug[r][n] for r in range(n)]


# ---------------------------------------------------------------------------
# Galois action
# ---------------------------------------------------------------------------


def galois_apply(field: TowerField, i: int, u: int, e: TowerElement) -> TowerElement:
    """Automorphism zeta -> zeta^u, t -> zeta^i t applied to an element.

    (i, u) composes by the semidirect product law; u must be a unit mod p.
    """
    p = field.p
    if u % p == 0:
        raise NotAUnit(f"u = {u} is not invertible mod {p}")
    if e.field != field:
        raise FieldMismatch("element belongs to a different tower")
    acc = field.zero()
    for (a, b), c in e.coordinates.items():
        # zeta^a t^b -> zeta^(u a + i b) t^b
        acc = acc + field._monomial(u * a + i * b, b, c)
    return acc


def galois_elements(field: TowerField):
    """All p(p-1) automorphism labels (i, u), in deterministic order."""
    return [(i, u) for i in range(field.p) for u in range(1, field.p)]


# ---------------------------------------------------------------------------
# curve triples and j-invariants
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CurveTriple:
    """Finite branch points (a, b, c) of y^2 = (x-a)(x-b)(x-c)."""

    a: TowerElement
    b: TowerElement
    c: TowerElement

    def __post_init__(self):
        if self.a == self.b or self.a == self.c or self.b == self.c:
            raise DegenerateTriple("branch points must be pairwise distinct")


def j_invariant_of_triple(tr: CurveTriple) -> TowerElement:
    """j-invariant of the curve with the given branch points.

    With lambda = (c - a)/(b - a), j = 256 (lambda^2 - lambda + 1)^3 /
    (lambda^2 (lambda - 1)^2).  Unlike the bare cross-ratio, j is invariant
    under every reordering of (a, b, c), so distinct j values certify
    non-isomorphic curves without tracking the anharmonic orbit.
    """
    lam = (tr.c - tr.a) / (tr.b - tr.a)
    num = (lam * lam - lam + 1) ** 3 * 256
    den = lam * lam * (lam - 1) ** 2
    if den.is_zero:
        raise DegenerateTriple("cross-ratio degenerated to 0 or 1")
    return num / den


@dataclass(frozen=True)
class DistinctnessReport:
    """Outcome of the pairwise j-invariant comparison of a Galois orbit."""

    count: int
    collisions: tuple  # pairs of automorphism labels with equal j

    @property
    def all_distinct(self) -> bool:
        return not self.collisions


def conjugate_triples_distinct(
    field: TowerField, gamma
) -> Tuple[bool, DistinctnessReport]:
    """Check that all Galois conjugates of (0, 1 - zeta, gamma * t) give
    pairwise distinct j-invariants.

    The conjugate under (i, u) is (0, 1 - zeta^u, gamma zeta^i t); there are
    p(p-1) of them and each pair is compared by exact equality in the tower.
    """
    gamma = Fraction(gamma)
    if gamma == 0:
        raise OutOfRange("gamma must be nonzero")
    zero = field.zero()
    b0 = field.one() - field.zeta()
    c0 = field.root() * gamma
    labels = galois_elements(field)
    invariants = []
    for (i, u) in labels:
        triple = CurveTriple(
            zero, galois_apply(field, i, u, b0), galois_apply(field, i, u, c0)
        )
        invariants.append(j_invariant_of_triple(triple))
    collisions = []
    for x in range(len(labels)):
        for y in range(x + 1, len(labels)):
            if invariants[x] == invariants[y]:
                collisions.append((labels[x], labels[y]))
    report = DistinctnessReport(count=len(labels), collisions=tuple(collisions))
    return report.all_distinct, report
