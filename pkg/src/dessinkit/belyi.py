"""Exact rational polynomial and rational-map calculus for Belyi chains.

Everything is a `fractions.Fraction`; there is no floating point anywhere.
The module provides:

* :class:`RatPoly` / :class:`RatMap` arithmetic with gcd-reduced maps,
* extended evaluation on the projective line (:data:`INFINITY` as the pole
  value),
* exact critical-value profiles and their propagation through compositions
  (``crit(g . f) = crit(g) | g(crit(f))``),
* the classical two-parameter Belyi polynomial family
  ``(m+n)^(m+n)/(m^m n^n) X^m (1-X)^n`` both expanded (:func:`bmn`) and as a
  symbolic chain stage (:class:`BmnStage`) that is never expanded — its
  coefficients explode like (m+n)^(m+n) while evaluation at the special
  points 0, 1, m/(m+n) is free,
* Sturm-sequence root counting and strict-monotonicity certificates,
* :func:`belyi_reduce`, which sends a finite set of nonzero rationals to 0 by
  a composition chain whose finite critical values stay inside {0, 1}, with
  an independent postcondition verifier (:func:`verify_reduction`).
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, List, Optional, Sequence, Tuple, Union

from .errors import (
    IrrationalCriticalPoints,
    NotCoprime,
    OutOfRange,
    ParseError,
    ResourceLimit,
    SizeGuard,
)

__all__ = [
    "RatPoly",
    "RatMap",
    "CritProfile",
    "BmnParams",
    "BmnStage",
    "BelyiChain",
    "INFINITY",
    "bmn",
    "eval_extended",
    "finite_critical_values",
    "propagate_crit",
    "pair_from_ratio",
    "rational_roots",
    "sturm_count",
    "certify_increasing",
    "belyi_reduce",
    "verify_reduction",
    "ReductionReport",
    "chain_compose",
    "verify_reduction",
    "parse_map",
    "parse_poly",
]

logger = logging.getLogger(__name__)

#: Default cap on m+n for one chain stage (the offending ratio is reported).
DEFAULT_STAGE_CAP = 10**6

#: Default cap, in result bits, for one exact stage evaluation.  Evaluating
#: the two-parameter polynomial at a generic rational costs about
#: (m+n) * (log2(m+n) + height of the point) bits; past this cap the library
#: fails loudly instead of stalling on multi-megabyte integers.
DEFAULT_EVAL_WORK_BITS = 2_000_000

#: Default cap on m+n for explicit expansion into coefficients (expansion
#: needs ~(m+n)^2 log(m+n) bits in total, far more than evaluation).
DEFAULT_EXPANSION_CAP = 2000


def _brief(value) -> str:
    """Compact description of a possibly enormous integer or fraction."""
    if isinstance(value, Fraction):
        if max(value.numerator.bit_length(), value.denominator.bit_length()) <= 256:
            return str(value)
        return (
            f"<rational with {value.numerator.bit_length()}-bit numerator and "
            f"{value.denominator.bit_length()}-bit denominator>"
        )
    if isinstance(value, int) and value.bit_length() > 256:
        return f"<{value.bit_length()}-bit integer>"
    return str(value)


class _Infinity:
    """The point at infinity of the projective line (a singleton)."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "inf"


INFINITY = _Infinity()

ExtendedRational = Union[Fraction, _Infinity]


# ---------------------------------------------------------------------------
# polynomials
# ---------------------------------------------------------------------------


class RatPoly:
    """Polynomial with exact rational coefficients, low degree first."""

    __slots__ = ("_coeffs",)

    def __init__(self, coefficients: Iterable = ()):
        coeffs = [Fraction(c) for c in coefficients]
        while coeffs and coeffs[-1] == 0:
            coeffs.pop()
        self._coeffs = tuple(coeffs)

    @property
    def coefficients(self) -> tuple:
        return self._coeffs

    @property
    def degree(self) -> int:
        """Degree, with the zero polynomial at -1."""
        return len(self._coeffs) - 1

    @property
    def is_zero(self) -> bool:
        return not self._coeffs

    @property
    def leading(self) -> Fraction:
        if self.is_zero:
            raise ValueError("zero polynomial has no leading coefficient")
        return self._coeffs[-1]

    def __call__(self, v: Fraction) -> Fraction:
        acc = Fraction(0)
        for c in reversed(self._coeffs):
            acc = acc * v + c
        return acc

    def __eq__(self, other) -> bool:
        return isinstance(other, RatPoly) and self._coeffs == other._coeffs

    def __hash__(self) -> int:
        return hash(self._coeffs)

    def __add__(self, other: "RatPoly") -> "RatPoly":
        a, b = self._coeffs, other._coeffs
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for i, c in enumerate(b):
            out[i] += c
        return RatPoly(out)

    def __neg__(self) -> "RatPoly":
        return RatPoly(tuple(-c for c in self._coeffs))

    def __sub__(self, other: "RatPoly") -> "RatPoly":
        return self + (-other)

    def __mul__(self, other) -> "RatPoly":
        if isinstance(other, (int, Fraction)):
            return RatPoly(tuple(c * other for c in self._coeffs))
        a, b = self._coeffs, other._coeffs
        if not a or not b:
            return RatPoly()
        out = [Fraction(0)] * (len(a) + len(b) - 1)
        for i, ca in enumerate(a):
            if ca:
                for j, cb in enumerate(b):
                    out[i + j] += ca * cb
        return RatPoly(out)

    __rmul__ = __mul__

    def __pow__(self, exponent: int) -> "RatPoly":
        if exponent < 0:
            raise ValueError("negative polynomial power")
        result = RatPoly((1,))
        square = self
        e = exponent
        while e:
            if e & 1:
                result = result * square
            e >>= 1
            if e:
                square = square * square
        return result

    def derivative(self) -> "RatPoly":
        return RatPoly(tuple(i * c for i, c in enumerate(self._coeffs) if i))

    def divmod(self, other: "RatPoly"):
        if other.is_zero:
            raise ZeroDivisionError("polynomial division by zero")
        rem = list(self._coeffs)
        d = other.degree
        lead = other.leading
        quo = [Fraction(0)] * max(0, len(rem) - d)
        while len(rem) - 1 >= d and any(rem):
            while rem and rem[-1] == 0:
                rem.pop()
            if len(rem) - 1 < d:
                break
            shift = len(rem) - 1 - d
            factor = rem[-1] / lead
            quo[shift] = factor
            for i, c in enumerate(other._coeffs):
                rem[shift + i] -= factor * c
            rem.pop()
        return RatPoly(quo), RatPoly(rem)

    def monic(self) -> "RatPoly":
        if self.is_zero:
            return self
        lead = self.leading
        return RatPoly(tuple(c / lead for c in self._coeffs))

    def gcd(self, other: "RatPoly") -> "RatPoly":
        """Monic greatest common divisor."""
        a, b = self, other
        while not b.is_zero:
            a, b = b, a.divmod(b)[1]
        return a.monic() if not a.is_zero else a

    def squarefree_part(self) -> "RatPoly":
        if self.degree < 1:
            return self.monic()
        return self.divmod(self.gcd(self.derivative()))[0].monic()

    def primitive_integer_coeffs(self) -> tuple:
        """Integer coefficients after clearing denominators and content."""
        if self.is_zero:
            return ()
        denom_lcm = math.lcm(*(c.denominator for c in self._coeffs))
        ints = [int(c * denom_lcm) for c in self._coeffs]
        content = math.gcd(*(abs(v) for v in ints))
        return tuple(v // content for v in ints)

    def __str__(self) -> str:
        if self.is_zero:
            return "0"
        parts = []
        for i in range(len(self._coeffs) - 1, -1, -1):
            c = self._coeffs[i]
            if c == 0:
                continue
            mag = -c if c < 0 else c
            if i == 0:
                body = str(mag)
            else:
                xs = "X" if i == 1 else f"X^{i}"
                body = xs if mag == 1 else f"{mag}*{xs}"
            if not parts:
                parts.append(body if c > 0 else f"-{body}")
            else:
                parts.append(f"+ {body}" if c > 0 else f"- {body}")
        return " ".join(parts)

    def __repr__(self) -> str:
        return f"RatPoly({self!s})"


X = RatPoly((0, 1))
ONE_POLY = RatPoly((1,))


# ---------------------------------------------------------------------------
# rational maps
# ---------------------------------------------------------------------------


class RatMap:
    """Quotient of coprime polynomials; the denominator is kept monic."""

    __slots__ = ("_num", "_den")

    def __init__(self, numerator: RatPoly, denominator: RatPoly = ONE_POLY):
        if denominator.is_zero:
            raise ZeroDivisionError("zero denominator")
        if numerator.is_zero:
            self._num, self._den = RatPoly(), ONE_POLY
            return
        g = numerator.gcd(denominator)
        if g.degree > 0:
            numerator = numerator.divmod(g)[0]
            denominator = denominator.divmod(g)[0]
        lead = denominator.leading
        self._num = numerator * (1 / lead)
        self._den = denominator * (1 / lead)

    @property
    def numerator(self) -> RatPoly:
        return self._num

    @property
    def denominator(self) -> RatPoly:
        return self._den

    @property
    def is_polynomial(self) -> bool:
        return self._den.degree == 0

    @property
    def mapping_degree(self) -> int:
        return max(self._num.degree, self._den.degree)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, RatMap)
            and self._num == other._num
            and self._den == other._den
        )

    def __hash__(self) -> int:
        return hash((self._num, self._den))

    # field operations, used by the expression parser
    def __add__(self, other: "RatMap") -> "RatMap":
        return RatMap(
            self._num * other._den + other._num * self._den,
            self._den * other._den,
        )

    def __neg__(self) -> "RatMap":
        return RatMap(-self._num, self._den)

    def __sub__(self, other: "RatMap") -> "RatMap":
        return self + (-other)

    def __mul__(self, other: "RatMap") -> "RatMap":
        return RatMap(self._num * other._num, self._den * other._den)

    def __truediv__(self, other: "RatMap") -> "RatMap":
        if other._num.is_zero:
            raise ZeroDivisionError("division by the zero map")
        return RatMap(self._num * other._den, self._den * other._num)

    def __pow__(self, exponent: int) -> "RatMap":
        if exponent < 0:
            return RatMap(self._den, self._num) ** (-exponent)
        return RatMap(self._num ** exponent, self._den ** exponent)

    def compose(self, inner: "RatMap") -> "RatMap":
        """self(inner(X)) as a reduced map."""
        return _poly_of_map(self._num, inner) / _poly_of_map(self._den, inner)

    def eval_extended(self, v: ExtendedRational) -> ExtendedRational:
        """Value on the projective line; poles map to infinity."""
        if v is INFINITY:
            dn, dd = self._num.degree, self._den.degree
            if dn > dd:
                return INFINITY
            if dn < dd:
                return Fraction(0)
            return self._num.leading / self._den.leading
        v = Fraction(v)
        dv = self._den(v)
        if dv == 0:
            nv = self._num(v)
            assert nv != 0, "reduced map evaluated to 0/0"
            return INFINITY
        return self._num(v) / dv

    def wronskian(self) -> RatPoly:
        """num' * den - num * den': its roots are the finite critical points."""
        return self._num.derivative() * self._den - self._num * self._den.derivative()

    def derivative_sign_at(self, v: Fraction) -> int:
        """Sign of the derivative at a non-pole rational point."""
        v = Fraction(v)
        if self._den(v) == 0:
            raise OutOfRange(f"derivative sign requested at pole {v}")
        w = self.wronskian()(v)
        return (w > 0) - (w < 0)

    def finite_critical_values(self) -> "CritProfile":
        return finite_critical_values(self)

    def __str__(self) -> str:
        if self.is_polynomial:
            return str(self._num)
        return f"({self._num}) / ({self._den})"

    def __repr__(self) -> str:
        return f"RatMap({self!s})"


def _poly_of_map(poly: RatPoly, arg: RatMap) -> RatMap:
    acc = RatMap(RatPoly())
    for c in reversed(poly.coefficients):
        acc = acc * arg + RatMap(RatPoly((c,)))
    return acc


def eval_extended(f: RatMap, v: ExtendedRational) -> ExtendedRational:
    return f.eval_extended(v)


# ---------------------------------------------------------------------------
# critical values
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CritProfile:
    """Finite critical values plus an explicit flag for infinity.

    The finite/infinite split follows the usual convention for Belyi
    polynomials, whose set of finite critical values excludes the point at
    infinity even though every polynomial of degree >= 2 ramifies there.
    """

    finite_values: frozenset
    includes_infinity: bool

    @classmethod
    def empty(cls) -> "CritProfile":
        return cls(frozenset(), False)

    @classmethod
    def of(cls, values: Iterable, includes_infinity: bool = False) -> "CritProfile":
        return cls(frozenset(Fraction(v) for v in values), includes_infinity)

    def sorted_finite(self) -> list:
        return sorted(self.finite_values)

    def __str__(self) -> str:
        items = [str(v) for v in self.sorted_finite()]
        if self.includes_infinity:
            items.append("inf")
        return "{" + ", ".join(items) + "}"


def finite_critical_values(f: RatMap) -> CritProfile:
    """Critical-value profile of a rational map.

    Finite critical points are the roots of the Wronskian (poles of order
    >= 2 are among them and contribute infinity); infinity itself is a
    critical point when the map ramifies there.  Requires every critical
    point to be rational: a Wronskian factor without rational roots raises
    :class:`IrrationalCriticalPoints` carrying the offending cofactor.
    """
    if f.mapping_degree <= 0:
        return CritProfile.empty()
    finite = set()
    includes_inf = False

    w = f.wronskian()
    if not w.is_zero and w.degree >= 1:
        roots, cofactor = rational_roots(w)
        if cofactor.degree >= 1:
            raise IrrationalCriticalPoints(
                f"critical points are not all rational; cofactor {cofactor}",
                cofactor=cofactor,
            )
        for r in roots:
            value = f.eval_extended(r)
            if value is INFINITY:
                includes_inf = True
            else:
                finite.add(value)

    dn, dd = f.numerator.degree, f.denominator.degree
    if dn != dd:
        ram_inf = abs(dn - dd)
        value_inf: ExtendedRational = INFINITY if dn > dd else Fraction(0)
    else:
        c = f.numerator.leading / f.denominator.leading
        diff = f.numerator - f.denominator * c
        ram_inf = dn - diff.degree  # diff is nonzero for a nonconstant map
        value_inf = c
    if ram_inf >= 2:
        if value_inf is INFINITY:
            includes_inf = True
        else:
            finite.add(value_inf)
    return CritProfile(frozenset(finite), includes_inf)


def propagate_crit(profile: CritProfile, f) -> CritProfile:
    """Critical profile of ``f . g`` given the profile of ``g``.

    ``f`` may be a :class:`RatMap` or a :class:`BmnStage`.
    """
    out = f.finite_critical_values()
    finite = set(out.finite_values)
    includes_inf = out.includes_infinity
    values: List[ExtendedRational] = list(profile.finite_values)
    if profile.includes_infinity:
        values.append(INFINITY)
    for v in values:
        w = f.eval_extended(v)
        if w is INFINITY:
            includes_inf = True
        else:
            finite.add(w)
    return CritProfile(frozenset(finite), includes_inf)


# ---------------------------------------------------------------------------
# rational root extraction (rational-root theorem with multiplicity stripping)
# ---------------------------------------------------------------------------


def _is_probable_prime(n: int) -> bool:
    if n < 2:
        return False
    for p in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    # deterministic for n < 3.3 * 10^24; fixed bases keep results reproducible
    for a in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _pollard_rho(n: int) -> int:
    if n % 2 == 0:
        return 2
    c = 1
    while True:
        x = y = 2
        d = 1
        f = lambda t: (t * t + c) % n
        while d == 1:
            x = f(x)
            y = f(f(y))
            d = math.gcd(abs(x - y), n)
        if d != n:
            return d
        c += 1


def _factorize(n: int) -> dict:
    """Prime factorization of a positive integer (deterministic)."""
    factors: dict = {}
    for p in (2, 3, 5):
        while n % p == 0:
            factors[p] = factors.get(p, 0) + 1
            n //= p
    p = 7
    wheel = (4, 2, 4, 2, 4, 6, 2, 6)
    i = 0
    while p * p <= n and p < 100_000:
        while n % p == 0:
            factors[p] = factors.get(p, 0) + 1
            n //= p
        p += wheel[i]
        i = (i + 1) % 8
    stack = [n] if n > 1 else []
    while stack:
        m = stack.pop()
        if m == 1:
            continue
        if _is_probable_prime(m):
            factors[m] = factors.get(m, 0) + 1
            continue
        d = _pollard_rho(m)
        stack.extend((d, m // d))
    return factors


def _divisors(n: int, cap: int = 200_000) -> list:
    divs = [1]
    for p, e in sorted(_factorize(n).items()):
        grown = []
        pk = 1
        for _ in range(e + 1):
            grown.extend(d * pk for d in divs)
            pk *= p
        divs = grown
        if len(divs) > cap:
            raise ResourceLimit(
                f"too many divisor candidates ({len(divs)}) for rational roots"
            )
    return sorted(divs)


def rational_roots(p: RatPoly) -> Tuple[dict, RatPoly]:
    """All rational roots with multiplicities, plus the rootless cofactor.

    Candidates come from the rational-root theorem applied to the primitive
    integer form; each discovered root is stripped to full multiplicity
    before moving on.
    """
    if p.is_zero:
        raise ValueError("rational_roots of the zero polynomial")
    roots: dict = {}
    work = p
    # strip the root at 0 first so the trailing coefficient is nonzero
    k = 0
    while work.degree >= 1 and work.coefficients[0] == 0:
        work = work.divmod(X)[0]
        k += 1
    if k:
        roots[Fraction(0)] = k
    if work.degree < 1:
        return roots, work.monic() if not work.is_zero else work
    ints = work.primitive_integer_coeffs()
    trailing, lead = abs(ints[0]), abs(ints[-1])
    for q in _divisors(lead):
        for pnum in _divisors(trailing):
            if math.gcd(pnum, q) != 1:
                continue
            for cand in (Fraction(pnum, q), Fraction(-pnum, q)):
                mult = 0
                while work.degree >= 1 and work(cand) == 0:
                    work = work.divmod(RatPoly((-cand, 1)))[0]
                    mult += 1
                if mult:
                    roots[cand] = mult
    return roots, work.monic() if work.degree >= 1 else RatPoly()


# ---------------------------------------------------------------------------
# Sturm sequences
# ---------------------------------------------------------------------------


def _sturm_chain(p: RatPoly) -> list:
    chain = [p, p.derivative()]
    while chain[-1].degree > 0:
        rem = chain[-2].divmod(chain[-1])[1]
        if rem.is_zero:
            chain.pop()  # should not happen for a squarefree start
            break
        chain.append(-rem)
    return chain


def _sign_variations(chain: Sequence[RatPoly], t: Fraction) -> int:
    signs = []
    for q in chain:
        v = q(t)
        if v:
            signs.append(v > 0)
    return sum(1 for a, b in zip(signs, signs[1:]) if a != b)


def sturm_count(p: RatPoly, lo: Fraction, hi: Fraction) -> int:
    """Number of distinct real roots of ``p`` in the half-open (lo, hi].

    Exact, via the Sturm chain of the squarefree part with the zero-skipping
    sign-variation convention (which makes the half-open count correct even
    when an endpoint is itself a root).
    """
    lo, hi = Fraction(lo), Fraction(hi)
    if not lo < hi:
        raise OutOfRange(f"empty interval ({lo}, {hi}]")
    if p.is_zero:
        raise ValueError("sturm_count of the zero polynomial")
    ps = p.squarefree_part()
    if ps.degree < 1:
        return 0
    chain = _sturm_chain(ps)
    return _sign_variations(chain, lo) - _sign_variations(chain, hi)


def certify_increasing(f: RatPoly, lo: Fraction, hi: Fraction) -> bool:
    """Certificate that f' > 0 on all of [lo, hi].

    True iff f' has no root in (lo, hi] and is positive at both endpoints.
    """
    lo, hi = Fraction(lo), Fraction(hi)
    if not lo < hi:
        raise OutOfRange(f"empty interval ({lo}, {hi}]")
    d = f.derivative()
    if d.is_zero:
        return False
    return d(lo) > 0 and d(hi) > 0 and sturm_count(d, lo, hi) == 0


# ---------------------------------------------------------------------------
# the two-parameter Belyi family
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BmnParams:
    """Coprime positive exponent pair of the Belyi polynomial family."""

    m: int
    n: int

    def __post_init__(self):
        if self.m < 1 or self.n < 1:
            raise OutOfRange(f"exponents must be positive, got ({self.m}, {self.n})")
        if math.gcd(self.m, self.n) != 1:
            raise NotCoprime(f"({self.m}, {self.n}) are not coprime")

    @property
    def peak(self) -> Fraction:
        """The unique interior critical point m/(m+n), where the value is 1."""
        return Fraction(self.m, self.m + self.n)


def pair_from_ratio(v: Fraction) -> BmnParams:
    """The unique coprime (m, n) with m/(m+n) equal to a ratio in (0, 1)."""
    v = Fraction(v)
    if not 0 < v < 1:
        raise OutOfRange(f"ratio {v} outside (0, 1)")
    return BmnParams(v.numerator, v.denominator - v.numerator)


def bmn(params: BmnParams, expansion_cap: Optional[int] = DEFAULT_EXPANSION_CAP) -> RatMap:
    """Expanded coefficients of (m+n)^(m+n)/(m^m n^n) X^m (1-X)^n.

    Refuses (with :class:`SizeGuard`) to expand past ``expansion_cap`` since
    the leading constant alone has ~(m+n) log2(m+n) bits; use
    :class:`BmnStage` for large parameters.
    """
    m, n = params.m, params.n
    if expansion_cap is not None and m + n > expansion_cap:
        raise SizeGuard(
            f"expansion of the ({m}, {n}) stage exceeds cap {expansion_cap}"
        )
    scale = Fraction((m + n) ** (m + n), m**m * n**n)
    coeffs = [Fraction(0)] * (m + n + 1)
    for k in range(n + 1):
        coeffs[m + k] = scale * math.comb(n, k) * (-1) ** k
    return RatMap(RatPoly(coeffs))


@dataclass(frozen=True)
class BmnStage:
    """Symbolic chain stage for the two-parameter family.

    ``m`` and ``n`` may be huge integers: the stage is never expanded, and
    evaluation at 0, 1 and the peak m/(m+n) costs nothing.  Generic exact
    evaluation is allowed only under a work cap.
    """

    m: int
    n: int

    def __post_init__(self):
        if self.m < 1 or self.n < 1:
            raise OutOfRange("stage exponents must be positive")
        if math.gcd(self.m, self.n) != 1:
            raise NotCoprime(f"stage exponents ({self.m}, {self.n}) not coprime")

    @property
    def peak(self) -> Fraction:
        return Fraction(self.m, self.m + self.n)

    def finite_critical_values(self) -> CritProfile:
        return CritProfile.of((0, 1), includes_infinity=True)

    def eval_extended(
        self,
        v: ExtendedRational,
        work_cap_bits: Optional[int] = DEFAULT_EVAL_WORK_BITS,
    ) -> ExtendedRational:
        if v is INFINITY:
            return INFINITY
        v = Fraction(v)
        if v == 0 or v == 1:
            return Fraction(0)
        if v == self.peak:
            return Fraction(1)
        m, n = self.m, self.n
        total = m + n
        estimate = total * (
            total.bit_length()
            + v.numerator.bit_length()
            + v.denominator.bit_length()
        )
        if work_cap_bits is not None and estimate > work_cap_bits:
            raise SizeGuard(
                f"exact evaluation of stage ({_brief(m)}, {_brief(n)}) at "
                f"{_brief(v)} needs about {_brief(estimate)} bits, over the "
                f"work cap {work_cap_bits}"
            )
        p, q = v.numerator, v.denominator
        return Fraction(
            total**total * p**m * (q - p) ** n,
            m**m * n**n * q**total,
        )

    def derivative_sign_at(self, v: Fraction) -> int:
        """Exact sign of the derivative, without any big arithmetic.

        The derivative is scale * X^(m-1) (1-X)^(n-1) (m - (m+n) X) with a
        positive scale, so the sign is a product of three cheap sign checks.
        """
        v = Fraction(v)
        m, n = self.m, self.n
        if v == 0:
            return 1 if m == 1 else 0
        if v == 1:
            return -1 if n == 1 else 0
        sign = 1
        if v < 0 and (m - 1) % 2:
            sign = -sign
        if v > 1 and (n - 1) % 2:
            sign = -sign
        linear = m * v.denominator - (m + n) * v.numerator
        if linear == 0:
            return 0
        if linear < 0:
            sign = -sign
        return sign

    def __str__(self) -> str:
        return f"B[{_brief(self.m)},{_brief(self.n)}]"


Stage = Union[RatMap, BmnStage]


# ---------------------------------------------------------------------------
# composition chains
# ---------------------------------------------------------------------------


class BelyiChain:
    """Ordered composition of stages with a tracked critical-value profile.

    ``input_profile`` is the ramification data of whatever the chain is
    post-composed onto; ``current_profile`` is always that profile propagated
    through every stage, so the invariant holds by construction.
    """

    __slots__ = ("_stages", "_input_profile", "_current_profile")

    def __init__(self, stages: Iterable[Stage] = (),
                 input_profile: Optional[CritProfile] = None):
        self._stages = tuple(stages)
        self._input_profile = input_profile or CritProfile.empty()
        profile = self._input_profile
        for stage in self._stages:
            profile = propagate_crit(profile, stage)
        self._current_profile = profile

    @property
    def stages(self) -> tuple:
        return self._stages

    @property
    def input_profile(self) -> CritProfile:
        return self._input_profile

    @property
    def current_profile(self) -> CritProfile:
        return self._current_profile

    def eval_extended(
        self,
        v: ExtendedRational,
        work_cap_bits: Optional[int] = DEFAULT_EVAL_WORK_BITS,
    ) -> ExtendedRational:
        for stage in self._stages:
            if isinstance(stage, BmnStage):
                v = stage.eval_extended(v, work_cap_bits=work_cap_bits)
            else:
                v = stage.eval_extended(v)
        return v

    def __len__(self) -> int:
        return len(self._stages)

    def __str__(self) -> str:
        return " . ".join(str(s) for s in reversed(self._stages)) or "id"


def chain_compose(chain: BelyiChain, f: Stage) -> BelyiChain:
    """Append a stage, re-propagating the critical profile."""
    return BelyiChain(chain.stages + (f,), input_profile=chain.input_profile)


# ---------------------------------------------------------------------------
# the reduction of rational points to {0}
# ---------------------------------------------------------------------------


def belyi_reduce(
    points: Iterable,
    stage_cap: Optional[int] = DEFAULT_STAGE_CAP,
    work_cap_bits: Optional[int] = DEFAULT_EVAL_WORK_BITS,
) -> BelyiChain:
    """Build a chain P with P(points) = {0}, finite critical values in {0, 1},
    0 < P(0) < 1 and P'(0) > 0.

    Construction: one quadratic stage (X - alpha)^2 / max maps the points
    into (0, 1] with 1 attained, an auxiliary point is inserted below the
    smallest image, then two-parameter stages keyed to the second-largest
    tracked value peel off one point each.  Deterministic choices:
    alpha = (largest negative input)/4 when negative inputs exist, else -1,
    and the auxiliary point is the midpoint of (image of 0, smallest mapped
    point).

    Raises :class:`SizeGuard` when a stage ratio would exceed ``stage_cap``
    (the offending ratio is reported) or a required exact evaluation would
    exceed ``work_cap_bits``.
    """
    raw = list(points)
    pts = sorted({Fraction(p) for p in raw})
    if any(p == 0 for p in pts):
        raise OutOfRange("input points must be nonzero")
    if len(pts) < len(raw):
        logger.info("belyi_reduce: duplicate inputs collapsed (%d -> %d)",
                    len(raw), len(pts))
    if not pts:
        # Degenerate success: no points to kill.  (2X + 1)/4 has no critical
        # points, value 1/4 at 0 and positive derivative.
        return BelyiChain([RatMap(RatPoly((Fraction(1, 4), Fraction(1, 2))))])

    negatives = [p for p in pts if p < 0]
    alpha = max(negatives) / 4 if negatives else Fraction(-1)
    f_alpha = RatPoly((alpha * alpha, -2 * alpha, 1))  # (X - alpha)^2
    peak_value = max(f_alpha(p) for p in pts)
    first = RatMap(f_alpha * (1 / peak_value))

    mapped = sorted({first.eval_extended(p) for p in pts})
    if len(mapped) < len(pts):
        logger.info("belyi_reduce: quadratic stage merged symmetric points "
                    "(%d -> %d)", len(pts), len(mapped))
    at_zero = first.eval_extended(Fraction(0))
    assert mapped[-1] == 1 and 0 < at_zero < mapped[0]
    aux = (at_zero + mapped[0]) / 2
    tracked = [aux] + mapped

    stages: List[Stage] = [first]
    while len(tracked) > 1:
        ratio = tracked[-2]
        if stage_cap is not None and ratio.denominator > stage_cap:
            raise SizeGuard(
                f"next stage ratio {_brief(ratio)} needs m+n = "
                f"{_brief(ratio.denominator)}, over the cap {stage_cap}"
            )
        params = pair_from_ratio(ratio)
        stage = BmnStage(params.m, params.n)
        # the largest tracked value (always 1) maps to 0 and drops out; the
        # others stay strictly increasing because the stage is increasing
        # below its peak
        tracked = [
            stage.eval_extended(t, work_cap_bits=work_cap_bits)
            for t in tracked[:-1]
        ]
        stages.append(stage)
    assert tracked == [Fraction(1)]
    return BelyiChain(stages)


@dataclass(frozen=True)
class ReductionReport:
    """Outcome of the four-postcondition check of a reduction chain."""

    points_to_zero: bool
    critical_values_in_01: bool
    value_at_zero_in_unit_interval: bool
    derivative_positive_at_zero: bool
    value_at_zero: Optional[Fraction]  # None when certified only by interval

    @property
    def ok(self) -> bool:
        return (
            self.points_to_zero
            and self.critical_values_in_01
            and self.value_at_zero_in_unit_interval
            and self.derivative_positive_at_zero
        )


def verify_reduction(
    chain: BelyiChain,
    points: Iterable,
    work_cap_bits: Optional[int] = DEFAULT_EVAL_WORK_BITS,
) -> ReductionReport:
    """Independently check the four postconditions of :func:`belyi_reduce`.

    Works only from the chain's stage list and input points, never from the
    construction path.  Exact evaluation is used throughout with one
    exception: when the *final* stage's exact output would blow the work cap,
    0 < P(0) < 1 is certified by strict monotonicity (input strictly between
    0 and the stage peak) instead of by value; ``value_at_zero`` is then None.
    A mid-chain blow-up raises :class:`SizeGuard` — verification never passes
    silently.
    """
    pts = sorted({Fraction(p) for p in points})

    to_zero = all(
        chain.eval_extended(p, work_cap_bits=work_cap_bits) == 0 for p in pts
    )

    profile = CritProfile.empty()
    for stage in chain.stages:
        profile = propagate_crit(profile, stage)
    crit_ok = profile.finite_values <= {Fraction(0), Fraction(1)}

    value: Optional[Fraction] = Fraction(0)
    in_unit = True
    derivative_positive = True
    for idx, stage in enumerate(chain.stages):
        last = idx == len(chain.stages) - 1
        if isinstance(stage, BmnStage):
            sign = stage.derivative_sign_at(value)
            if sign <= 0:
                derivative_positive = False
            try:
                value = stage.eval_extended(value, work_cap_bits=work_cap_bits)
            except SizeGuard:
                if last and 0 < value < stage.peak:
                    value = None  # certified: strictly increasing into (0, 1)
                    break
                raise
        else:
            if stage.derivative_sign_at(value) <= 0:
                derivative_positive = False
            value = stage.eval_extended(value)
            if value is INFINITY:
                raise OutOfRange("chain has a pole on the traced orbit of 0")
    if value is not None:
        in_unit = 0 < value < 1
    return ReductionReport(
        points_to_zero=to_zero,
        critical_values_in_01=crit_ok,
        value_at_zero_in_unit_interval=in_unit,
        derivative_positive_at_zero=derivative_positive,
        value_at_zero=value,
    )


# ---------------------------------------------------------------------------
# expression parsing (CLI wire syntax)
# ---------------------------------------------------------------------------


class _MapParser:
    """Recursive-descent parser for exact map expressions.

    Grammar: ``expr := term (('+'|'-') term)*``, ``term := factor (('*'|'/')
    factor)*``, ``factor := ('-')* primary ['^' int]``, ``primary := integer |
    'X' | '(' expr ')'``.  Example: ``(X+27)^3 / (243*(X-9)^2)``.
    """

    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def peek(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1
        return self.text[self.pos] if self.pos < len(self.text) else None

    def take(self):
        c = self.peek()
        if c is not None:
            self.pos += 1
        return c

    def parse(self) -> RatMap:
        value = self.expr()
        if self.peek() is not None:
            raise ParseError(f"trailing input at position {self.pos} in expression")
        return value

    def expr(self) -> RatMap:
        value = self.term()
        while self.peek() in ("+", "-"):
            op = self.take()
            rhs = self.term()
            value = value + rhs if op == "+" else value - rhs
        return value

    def term(self) -> RatMap:
        value = self.factor()
        while self.peek() in ("*", "/"):
            op = self.take()
            rhs = self.factor()
            value = value * rhs if op == "*" else value / rhs
        return value

    def factor(self) -> RatMap:
        negate = False
        while self.peek() == "-":
            self.take()
            negate = not negate
        value = self.primary()
        if self.peek() == "^":
            self.take()
            value = value ** self.integer()
        return -value if negate else value

    def primary(self) -> RatMap:
        c = self.peek()
        if c is None:
            raise ParseError("unexpected end of expression")
        if c in ("X", "x"):
            self.take()
            return RatMap(X)
        if c == "(":
            self.take()
            value = self.expr()
            if self.take() != ")":
                raise ParseError(f"missing ')' at position {self.pos}")
            return value
        if c.isdigit():
            return RatMap(RatPoly((self.integer(),)))
        raise ParseError(f"unexpected {c!r} at position {self.pos} in expression")

    def integer(self) -> int:
        sign = 1
        if self.peek() == "-":
            self.take()
            sign = -1
        digits = ""
        while self.peek() is not None and self.peek().isdigit():
            digits += self.take()
        if not digits:
            raise ParseError(f"expected integer at position {self.pos}")
        return sign * int(digits)


def parse_map(text: str) -> RatMap:
    """Parse an exact rational-map expression, e.g. ``(X+27)^3/(243*(X-9)^2)``."""
    return _MapParser(text).parse()


def parse_poly(text: str) -> RatPoly:
    """Parse an expression that must reduce to a polynomial."""
    m = parse_map(text)
    if not m.is_polynomial:
        raise ParseError(f"expected a polynomial, got denominator {m.denominator}")
    return m.numerator
