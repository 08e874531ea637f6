"""Exact polynomial calculus tests: the Belyi family, critical profiles,
Sturm counting against a Descartes-bisection oracle, and the reduction chain."""

import math
import random
from fractions import Fraction as F

import pytest

from dessinkit.belyi import (
    INFINITY,
    BelyiChain,
    BmnParams,
    BmnStage,
    CritProfile,
    RatMap,
    RatPoly,
    belyi_reduce,
    bmn,
    certify_increasing,
    chain_compose,
    eval_extended,
    finite_critical_values,
    pair_from_ratio,
    parse_map,
    parse_poly,
    propagate_crit,
    rational_roots,
    sturm_count,
    verify_reduction,
)
from dessinkit.belyi import X
from dessinkit.errors import (
    IrrationalCriticalPoints,
    NotCoprime,
    OutOfRange,
    ParseError,
    SizeGuard,
)

BETA1 = "(X+27)^3 / (243*(X-9)^2)"


# ---------------------------------------------------------------------------
# oracle: Descartes-rule bisection root isolation (independent of Sturm)
# ---------------------------------------------------------------------------


def _descartes_variations(coeffs):
    signs = [c for c in coeffs if c != 0]
    return sum(1 for a, b in zip(signs, signs[1:]) if (a > 0) != (b > 0))


def _roots_in_01_open(p: RatPoly) -> int:
    """Distinct roots of squarefree p in the open unit interval, by the
    Vincent-Collins-Akritas bisection."""
    n = p.degree
    if n < 1:
        return 0
    # variation bound for (0,1): coefficients of (1+x)^n p(1/(1+x))
    rev = list(reversed(p.coefficients))  # p(1/x) * x^n
    trans = list(rev)
    # substitute x -> x + 1 by repeated synthetic addition
    for i in range(len(trans) - 1):
        for j in range(len(trans) - 2, i - 1, -1):
            trans[j] += trans[j + 1]
    v = _descartes_variations(trans)
    if v == 0:
        return 0
    if v == 1:
        return 1
    half = F(1, 2)
    left = RatPoly([c * half**i for i, c in enumerate(p.coefficients)])
    right_coeffs = list(left.coefficients) + [F(0)] * (n + 1 - len(left.coefficients))
    # p((x+1)/2) from p(x/2) by shifting
    shifted = list(right_coeffs)
    for i in range(len(shifted) - 1):
        for j in range(len(shifted) - 2, i - 1, -1):
            shifted[j] += shifted[j + 1]
    count = _roots_in_01_open(left) + _roots_in_01_open(RatPoly(shifted))
    if p(half) == 0:
        count += 1
    return count


def oracle_count(p: RatPoly, lo: F, hi: F) -> int:
    """Distinct real roots of p in (lo, hi], by VCA on the squarefree part."""
    ps = p.squarefree_part()
    if ps.degree < 1:
        return 0
    # affine change mapping (0,1) onto (lo, hi)
    acc = RatPoly([F(1)])
    result = RatPoly([])
    shift = RatPoly([lo, hi - lo])
    for c in ps.coefficients:
        result = result + acc * c
        acc = acc * shift
    return _roots_in_01_open(result) + (1 if ps(hi) == 0 else 0)


# ---------------------------------------------------------------------------
# arithmetic and parsing
# ---------------------------------------------------------------------------


class TestPolyParsing:
    def test_beta1(self):
        f = parse_map(BETA1)
        assert f.numerator == (X + RatPoly((27,))) ** 3 * F(1, 243)
        assert f.denominator == (X - RatPoly((9,))) ** 2

    def test_rational_coefficients(self):
        assert parse_poly("27/4*X^2*(1-X)") == RatPoly((0, 0, F(27, 4), F(-27, 4)))

    def test_errors(self):
        for bad in ("X +", "(X", "2**3", "X^", "1/0", "Y"):
            with pytest.raises((ParseError, ZeroDivisionError)):
                parse_map(bad)

    def test_non_polynomial_rejected(self):
        with pytest.raises(ParseError):
            parse_poly("1/(X+1)")

    def test_map_reduction(self):
        f = parse_map("(X^2-1)/(X-1)")
        assert f.is_polynomial and f.numerator == X + RatPoly((1,))


class TestEvalExtended:
    def test_beta1_values(self):
        f = parse_map(BETA1)
        assert eval_extended(f, F(-27)) == 0
        assert eval_extended(f, F(9)) is INFINITY
        assert eval_extended(f, F(0)) == 1
        assert eval_extended(f, F(81)) == 1

    def test_at_infinity(self):
        assert eval_extended(parse_map(BETA1), INFINITY) is INFINITY
        assert eval_extended(parse_map("1/(X^2+1)"), INFINITY) == 0
        assert eval_extended(parse_map("(2*X+1)/(3*X-1)"), INFINITY) == F(2, 3)


class TestCriticalValues:
    def test_beta1(self):
        prof = finite_critical_values(parse_map(BETA1))
        assert prof.finite_values == {F(0), F(1)}
        assert prof.includes_infinity  # double pole at 9

    def test_sixth_power(self):
        prof = finite_critical_values(RatMap(X**6))
        assert prof.finite_values == {F(0)} and prof.includes_infinity

    def test_parabola(self):
        prof = finite_critical_values(parse_map("X^2+X+1"))
        assert prof.finite_values == {F(3, 4)}

    def test_moebius_unramified(self):
        prof = finite_critical_values(parse_map("(X+1)/(X-1)"))
        assert prof == CritProfile.empty()

    def test_irrational_critical_points(self):
        with pytest.raises(IrrationalCriticalPoints) as exc:
            finite_critical_values(RatMap(X**3 - 6 * X))  # crit pts +-sqrt(2)
        assert exc.value.cofactor.degree == 2

    def test_reciprocal_square(self):
        prof = finite_critical_values(parse_map("1/(X^2)"))
        assert prof.finite_values == {F(0)} and prof.includes_infinity


class TestPropagation:
    def test_beta1_branch_set(self):
        out = propagate_crit(
            CritProfile.of([0, -27, 9], includes_infinity=True), parse_map(BETA1)
        )
        assert out.finite_values == {F(0), F(1)} and out.includes_infinity

    def test_hexagonal_instance(self):
        # B(3,1) composed with the affine move (X+27)/36, applied to the
        # branch profile {0, -27, 9, inf}
        composed = bmn(BmnParams(3, 1)).compose(parse_map("(X+27)/36"))
        out = propagate_crit(
            CritProfile.of([0, -27, 9], includes_infinity=True), composed
        )
        assert out.finite_values == {F(0), F(1)} and out.includes_infinity

    def test_identity_stage(self):
        out = propagate_crit(CritProfile.empty(), RatMap(X))
        assert out == CritProfile.empty()

    def test_square_stage(self):
        out = propagate_crit(CritProfile.of([4]), RatMap(X**2))
        assert out.finite_values == {F(0), F(16)} and out.includes_infinity

    def test_monotone(self):
        f = parse_map(BETA1)
        prof = CritProfile.of([1, 2, F(5, 7), -27, 81])
        out = propagate_crit(prof, f)
        for v in prof.finite_values:
            img = f.eval_extended(v)
            if img is INFINITY:
                assert out.includes_infinity
            else:
                assert img in out.finite_values


class TestBmnFamily:
    def test_simplest(self):
        assert bmn(BmnParams(1, 1)) == RatMap(RatPoly((0, 4, -4)))

    def test_peak_value(self):
        assert bmn(BmnParams(3, 1)).eval_extended(F(3, 4)) == 1

    def test_two_one(self):
        b = bmn(BmnParams(2, 1))
        assert b == RatMap(RatPoly((0, 0, F(27, 4), F(-27, 4))))
        roots, cof = rational_roots(b.numerator.derivative())
        assert set(roots) == {F(0), F(2, 3)} and cof.degree < 1
        assert finite_critical_values(b).finite_values <= {F(0), F(1)}

    def test_not_coprime(self):
        with pytest.raises(NotCoprime):
            BmnParams(2, 4)

    def test_positivity_required(self):
        with pytest.raises(OutOfRange):
            BmnParams(0, 1)

    def test_expansion_cap(self):
        with pytest.raises(SizeGuard):
            bmn(BmnParams(2001, 2), expansion_cap=2000)

    def test_full_suite_up_to_20(self):
        for total in range(2, 21):
            for m in range(1, total):
                n = total - m
                if math.gcd(m, n) != 1:
                    continue
                b = bmn(BmnParams(m, n))
                assert b.eval_extended(F(0)) == 0
                assert b.eval_extended(F(1)) == 0
                assert b.eval_extended(F(m, m + n)) == 1
                scale = F((m + n) ** (m + n), m**m * n**n)
                closed = (
                    X ** (m - 1)
                    * RatPoly((1, -1)) ** (n - 1)
                    * RatPoly((m, -(m + n)))
                    * scale
                )
                assert b.numerator.derivative() == closed
                assert finite_critical_values(b).finite_values <= {F(0), F(1)}


class TestPairFromRatio:
    def test_hexagonal_ratio(self):
        assert pair_from_ratio(F(27, 27 + 9)) == BmnParams(3, 1)

    def test_half(self):
        assert pair_from_ratio(F(1, 2)) == BmnParams(1, 1)

    def test_seventeen(self):
        assert pair_from_ratio(F(17, 32)) == BmnParams(17, 15)

    def test_out_of_range(self):
        for v in (F(0), F(1), F(3, 2), F(-1, 2)):
            with pytest.raises(OutOfRange):
                pair_from_ratio(v)


class TestSturm:
    def test_reference_counts(self):
        d = bmn(BmnParams(2, 1)).numerator.derivative()
        assert sturm_count(d, F(1, 100), F(1, 2)) == 0
        assert sturm_count(d, F(-1), F(1)) == 2
        assert sturm_count(RatPoly((1, 0, 1)), F(-5), F(5)) == 0

    def test_half_open_semantics(self):
        assert sturm_count(X, F(-1), F(0)) == 1
        assert sturm_count(X, F(0), F(1)) == 0

    def test_multiple_roots_counted_once(self):
        p = (X - RatPoly((1,))) ** 3 * (X + RatPoly((2,)))
        assert sturm_count(p, F(-3), F(3)) == 2

    def test_random_against_oracle(self):
        rng = random.Random(61)
        checked = 0
        while checked < 100:
            degree = rng.randint(1, 6)
            coeffs = [F(rng.randint(-10, 10)) for _ in range(degree + 1)]
            p = RatPoly(coeffs)
            if p.degree < 1:
                continue
            lo = F(rng.randint(-8, 0))
            hi = lo + F(rng.randint(1, 8))
            assert sturm_count(p, lo, hi) == oracle_count(p, lo, hi), (
                p,
                lo,
                hi,
            )
            checked += 1


class TestCertifyIncreasing:
    def test_quadratic(self):
        b = bmn(BmnParams(1, 1)).numerator
        assert certify_increasing(b, F(0), F(1, 4))
        assert not certify_increasing(b, F(0), F(3, 4))

    def test_linear(self):
        assert certify_increasing(X, F(-100), F(100))

    def test_constant(self):
        assert not certify_increasing(RatPoly((5,)), F(0), F(1))


class TestBelyiReduce:
    def test_single_point(self):
        chain = belyi_reduce([1])
        stages = chain.stages
        assert len(stages) == 2
        assert stages[0] == RatMap((X + RatPoly((1,))) ** 2 * F(1, 4))
        assert isinstance(stages[1], BmnStage)
        assert (stages[1].m, stages[1].n) == (5, 3)
        report = verify_reduction(chain, [1])
        assert report.ok and report.value_at_zero == F(256, 3125)

    def test_branch_set(self):
        chain = belyi_reduce([-27, 9], stage_cap=None)
        report = verify_reduction(chain, [-27, 9])
        assert report.ok
        assert report.value_at_zero is None  # certified by monotonicity

    def test_duplicates_collapse(self):
        assert belyi_reduce([2, 2]).stages == belyi_reduce([2]).stages

    def test_zero_rejected(self):
        with pytest.raises(OutOfRange):
            belyi_reduce([0, 1])

    def test_empty_input(self):
        chain = belyi_reduce([])
        report = verify_reduction(chain, [])
        assert report.ok and report.value_at_zero == F(1, 4)

    def test_size_guard_reported(self):
        with pytest.raises(SizeGuard):
            belyi_reduce([-27, 9], stage_cap=100)

    def test_profile_is_propagated(self):
        chain = belyi_reduce([F(1, 3)])
        assert chain.current_profile.finite_values <= {F(0), F(1)}
        assert chain.current_profile.includes_infinity

    def test_default_caps_guard_multi_point_blowup(self):
        # the second stage for {1/3, 2} would need m+n with hundreds of
        # digits; the default cap must refuse it loudly
        with pytest.raises(SizeGuard):
            belyi_reduce([F(1, 3), 2])

    def test_small_random_suite(self):
        rng = random.Random(67)
        successes = guards = 0
        for _ in range(25):
            size = rng.randint(1, 3)
            pts = []
            while len(pts) < size:
                num = rng.randint(-20, 20)
                den = rng.randint(1, 20)
                if num:
                    pts.append(F(num, den))
            try:
                chain = belyi_reduce(pts)
            except SizeGuard:
                guards += 1
                continue
            assert verify_reduction(chain, pts).ok, pts
            successes += 1
        assert successes > 0


class TestChains:
    def test_compose_updates_profile(self):
        chain = BelyiChain([], input_profile=CritProfile.of([4]))
        chain = chain_compose(chain, RatMap(X**2))
        assert chain.current_profile.finite_values == {F(0), F(16)}
        assert chain.current_profile.includes_infinity

    def test_identity_stage_keeps_profile(self):
        chain = BelyiChain([], input_profile=CritProfile.of([F(1, 2)]))
        chain = chain_compose(chain, RatMap(X))
        assert chain.current_profile == CritProfile.of([F(1, 2)])

    def test_final_composition_reaches_three_point_profile(self):
        # beta1 = (X+1)/32 evaluated at 0 and at the point 16, then the two
        # symbolic stages keyed to those values: the tracked profile
        # collapses onto {0, 1, inf}
        beta1 = parse_map("(X+1)/32")
        at_zero = beta1.eval_extended(F(0))
        at_point = beta1.eval_extended(F(16))
        profile = CritProfile.of([0, at_zero, at_point, 1], includes_infinity=True)
        params = pair_from_ratio(at_point)
        first = BmnStage(params.m, params.n)
        second_ratio = first.eval_extended(at_zero)
        second_params = pair_from_ratio(second_ratio)
        chain = BelyiChain([], input_profile=profile)
        chain = chain_compose(chain, first)
        chain = chain_compose(chain, BmnStage(second_params.m, second_params.n))
        assert chain.current_profile.finite_values == {F(0), F(1)}
        assert chain.current_profile.includes_infinity

    def test_stage_special_points_are_free(self):
        huge = BmnStage(31**15, 17**17 * 15**15 - 31**15)
        assert huge.eval_extended(F(0)) == 0
        assert huge.eval_extended(F(1)) == 0
        assert huge.eval_extended(huge.peak) == 1
        assert huge.eval_extended(INFINITY) is INFINITY
        with pytest.raises(SizeGuard):
            huge.eval_extended(F(1, 3))

    def test_stage_derivative_signs(self):
        stage = BmnStage(3, 2)
        assert stage.derivative_sign_at(F(1, 2)) == 1
        assert stage.derivative_sign_at(stage.peak) == 0
        assert stage.derivative_sign_at(F(9, 10)) == -1
