"""Gallery data, local action models, word builders, and 2-adic checks."""

import random
from fractions import Fraction as F

import pytest

from dessinkit.belyi import RatPoly, parse_poly
from dessinkit.errors import BadShape, HypothesisFailed, OutOfRange
from dessinkit.models import (
    GALLERY_SIZE,
    TwoAdicInstance,
    build_mu0,
    build_mu_omega,
    commutes_with_y2,
    delta_tilde_check,
    expected_witness_value,
    gallery_dessin,
    gallery_text,
    local_model_24,
    local_model_8p,
    two_adic_verify,
    witness_word,
)
from dessinkit.words import FreeWord, parse_word


class TestGallery:
    def test_all_transitive_degree_36(self):
        for k in range(1, GALLERY_SIZE + 1):
            d = gallery_dessin(k)
            assert d.degree == 36
            assert d.cartographic_group.is_transitive()

    def test_shared_sigma0_byte_level(self):
        lines = [
            next(l for l in gallery_text(k).splitlines() if l.startswith("sigma0"))
            for k in range(1, GALLERY_SIZE + 1)
        ]
        assert len(set(lines)) == 1

    def test_pairwise_distinct_sigma1(self):
        sigmas = [gallery_dessin(k).sigma1 for k in range(1, GALLERY_SIZE + 1)]
        assert len({str(s) for s in sigmas}) == GALLERY_SIZE

    def test_out_of_range(self):
        for k in (0, 7, -1):
            with pytest.raises(OutOfRange):
                gallery_dessin(k)

    def test_specific_cycles(self):
        assert "(14,15)(16,17)" in gallery_text(1)
        assert "(13,24)" in gallery_text(6) and "(25,36)" in gallery_text(6)

    def test_witness_values(self):
        w = witness_word()
        for k in range(1, GALLERY_SIZE + 1):
            assert gallery_dessin(k).evaluate(w) == expected_witness_value(k)

    def test_witness_is_identity_only_first(self):
        w = witness_word()
        for k in range(1, GALLERY_SIZE + 1):
            assert gallery_dessin(k).evaluate(w).is_identity == (k == 1)


class TestLocalModel24:
    def test_first_equals_pairing(self):
        model = local_model_24(1)
        assert model.omega == model.s
        assert commutes_with_y2(model)

    def test_commutes_only_first(self):
        for k in range(1, 7):
            assert commutes_with_y2(local_model_24(k)) == (k == 1)

    def test_omega_is_conjugate_of_pairing(self):
        for k in range(1, 7):
            model = local_model_24(k)
            assert model.omega == model.t * model.s * model.t

    def test_point_images(self):
        assert local_model_24(2).omega.apply(4) == 15
        assert local_model_24(4).omega.apply(1) == 14

    def test_traces(self):
        assert local_model_24(2).trace() == (4, 17, 5)
        assert local_model_24(4).trace() == (1, 16, 4)

    def test_out_of_range(self):
        for k in (0, 7):
            with pytest.raises(OutOfRange):
                local_model_24(k)


class TestLocalModel8p:
    @pytest.mark.parametrize("p", [3, 5, 7])
    def test_plain_commutes_only_first(self, p):
        for k in range(1, 2 * p + 1):
            assert commutes_with_y2(local_model_8p(p, k, "plain")) == (k == 1)

    @pytest.mark.parametrize("p", [3, 5, 7])
    def test_j_variant_never_commutes(self, p):
        for k in range(1, 2 * p + 1):
            assert not commutes_with_y2(local_model_8p(p, k, "j"))

    def test_structure(self):
        model = local_model_8p(3, 2)
        assert model.point_count == 24
        assert model.omega == model.t * model.s * model.t

    def test_special_edge_trace(self):
        # second conjugate: B^(omega y^2) = D^y while B^(y^2 omega) = B^y
        p, k = 3, 2
        model = local_model_8p(p, k)
        b, d = 2 * k, 4 * p + 2 * k
        y2 = model.y * model.y
        assert (model.omega * y2).apply(b) == model.y.apply(d)
        assert (y2 * model.omega).apply(b) == model.y.apply(b)

    def test_later_conjugate_trace(self):
        # conjugates k >= 3: A^(omega y^2) = C^(y^3) vs A^(y^2 omega) = A^(y^3)
        p = 5
        for k in range(3, 2 * p + 1):
            model = local_model_8p(p, k)
            a, c = 1, 4 * p + 1
            y2 = model.y * model.y
            y3 = model.y * y2
            assert (model.omega * y2).apply(a) == y3.apply(c)
            assert (y2 * model.omega).apply(a) == y3.apply(a)

    def test_bad_arguments(self):
        with pytest.raises(OutOfRange):
            local_model_8p(4, 1)
        with pytest.raises(OutOfRange):
            local_model_8p(3, 7)
        with pytest.raises(OutOfRange):
            local_model_8p(3, 1, "weird")


class TestWordBuilders:
    def test_single_block(self):
        assert build_mu0([1]) == parse_word("x^2")

    def test_three_ones(self):
        assert build_mu0([1, 1, 1]) == parse_word("x y x^2 y x")

    def test_mixed(self):
        assert build_mu0([2, 3, 1]) == parse_word("x^2 y^3 x^2 y^3 x^2")

    def test_palindrome(self):
        for blocks in ([1], [1, 2, 3], [2, 1, 4, 1, 2]):
            word = build_mu0(blocks)
            assert word.syllables == tuple(reversed(word.syllables))

    def test_bad_shape(self):
        for bad in ([], [1, 2], [1, 0, 1]):
            with pytest.raises(BadShape):
                build_mu0(bad)

    def test_mu_template(self):
        mu, _ = build_mu_omega([1, 1, 1], 1, 1, 1, 1)
        assert mu == parse_word("(x y x y)(x y x y)(x^2 y x y)(x y x y) x")

    def test_mu_block_exponents(self):
        mu, _ = build_mu_omega([2, 3, 1], 2, 5, 3, 7)
        x_exponents = [e for g, e in mu.syllables if g == "x"]
        # blocks m*r*d1 = 12, n*r*d2 = 45, doubled center 2*m*r*d3 = 12,
        # mirrored, with the hop x^7 between blocks and a bare x^12 suffix
        assert x_exponents == [12, 7, 45, 7, 12, 7, 45, 7, 12]

    def test_omega_shape(self):
        mu, omega = build_mu_omega([1, 1, 1], 1, 1, 1, 2)
        y = parse_word("y")
        x2s = parse_word("x^4")
        assert omega == mu * y * mu.inverse() * x2s * y.inverse() * mu

    def test_omega_y_exponent_matches_mu(self):
        for args in (([1, 1, 1], 1, 1, 1, 1), ([2, 1, 3], 3, 2, 2, 5)):
            mu, omega = build_mu_omega(*args)
            assert omega.exponent_sum("y") == mu.exponent_sum("y")

    def test_no_cancellation_across_core(self):
        # the x^(2s) core must survive free reduction: the adjacent
        # boundary exponents -m r d1 + 2s stay nonzero for these parameters
        for args in (([1, 1, 1], 1, 1, 1, 1), ([1, 2, 1], 2, 3, 1, 4)):
            mu, omega = build_mu_omega(*args)
            m, r, d1, s = args[1], args[3], args[0][0], args[4]
            assert 2 * s != m * r * d1
            assert not omega.is_empty
            # rebuild step by step and confirm no collapse at the junction
            partial = mu * parse_word("y") * mu.inverse()
            merged = partial * FreeWord((("x", 2 * s),))
            assert len(merged) > len(partial) - 2 * s

    def test_mu_rejects_single_block(self):
        with pytest.raises(BadShape):
            build_mu_omega([1], 1, 1, 1, 1)

    def test_prefix_x_counts_match_partial_sums_mod_s(self):
        # every prefix of mu ending in y has x-count congruent, mod s, to a
        # partial sum of the block coefficient sequence (the hop exponents
        # x^s vanish mod s); this is the bridge to the 2-adic partial sums
        d, m, n, r, s = [2, 1, 3], 3, 2, 2, 7
        mu, _ = build_mu_omega(d, m, n, r, s)
        t = len(d)
        coeffs = []
        for i in list(range(1, t)) + [t] + list(range(t - 1, 0, -1)):
            base = (m if i % 2 else n) * r * d[i - 1]
            coeffs.append(2 * base if i == t else base)
        partials = []
        acc = 0
        for c in coeffs[:-1]:
            acc += c
            partials.append(acc % s)
        prefix_counts = []
        count = 0
        for g, e in mu.syllables:
            if g == "x":
                count += abs(e)
            else:
                prefix_counts.append(count % s)
        # prefixes alternate rho_i (before the hop) and rho_i' (after); both
        # reduce to the same partial sum mod s
        assert prefix_counts == [v for v in partials for _ in (0, 1)][: len(prefix_counts)]


class TestDeltaTilde:
    def test_passing_instance(self):
        report = delta_tilde_check([1, 1, 1], 1, 4, 4)
        assert report.ok
        assert report.total == 10
        assert report.partial_sums == (1, 4, 6, 9)

    def test_parity_failure(self):
        report = delta_tilde_check([1, 1, 1], 1, 2, 1)
        assert not report.ok

    def test_total_collision(self):
        report = delta_tilde_check([1, 1, 1], 1, 3, 3)
        assert report.total == 8 and report.modulus == 8
        assert not report.ok

    def test_bad_shapes(self):
        with pytest.raises(BadShape):
            delta_tilde_check([1, 1], 1, 4, 4)
        with pytest.raises(OutOfRange):
            delta_tilde_check([1, 1, 1], 5, 4, 4)
        with pytest.raises(OutOfRange):
            delta_tilde_check([1, 1, 1], 1, 4, 0)


class TestTwoAdic:
    def test_reference_instance(self):
        inst = TwoAdicInstance(RatPoly((1, 1)), 32, 3, 4, 1)
        assert inst.alpha == 4 and inst.nu == 0
        assert inst.point == 16 and (inst.a, inst.b) == (1, 1)
        report = two_adic_verify(inst)
        assert (report.m, report.n) == (17, 15)
        assert report.e == 1 and report.congruences_consistent
        assert report.v2_s >= report.required == 4
        assert report.ok
        assert report.r == 31**15
        assert report.s == 17**17 * 15**15 - 31**15

    def test_reference_oracle_mod_16(self):
        # direct modular computation: 17^17 * 15^15 = 31^15 (mod 16)
        assert pow(17, 17, 16) * pow(15, 15, 16) % 16 == pow(31, 15, 16)

    def test_hypothesis_failed(self):
        # q = 1, gamma = 1: alpha = 0 <= nu
        inst = TwoAdicInstance(RatPoly((1, 1)), 32, 3, 1, 1)
        assert inst.alpha == 0
        with pytest.raises(HypothesisFailed):
            two_adic_verify(inst)

    def test_gamma_candidate_shape(self):
        inst = TwoAdicInstance(RatPoly((1, 1)), 32, 3, 1, F(2**3, 2**5 + 1))
        assert inst.alpha == 18  # 6u for u = 3 at p = 3
        assert inst.b == (2**5 + 1) ** 6 and inst.b % 2 == 1
        assert inst.a == 2**0 or inst.a % 2 == 1

    def test_bad_instances(self):
        with pytest.raises(OutOfRange):
            TwoAdicInstance(parse_poly("X/2 + 1"), 4, 3, 2, 1)
        with pytest.raises(OutOfRange):
            TwoAdicInstance(RatPoly((5, 1)), 4, 3, 2, 1)  # c0 >= c
        with pytest.raises(OutOfRange):
            TwoAdicInstance(RatPoly((1, 1)), 4, 4, 2, 1)

    def test_random_valid_instances_never_contradict(self):
        rng = random.Random(71)
        checked = 0
        while checked < 20:
            c0 = rng.randint(1, 30)
            c = c0 + rng.randint(1, 30)
            degree = rng.randint(1, 3)
            coeffs = [c0] + [rng.randint(-5, 5) for _ in range(degree)]
            if coeffs[-1] == 0:
                coeffs[-1] = 1
            u = rng.randint(3, 8)
            odd = 2 * rng.randint(1, 15) + 1
            gamma = F(2**u, odd)
            q = F(2 * rng.randint(1, 7) + 1)
            p = rng.choice((3, 5))
            try:
                inst = TwoAdicInstance(RatPoly(coeffs), c, p, q, gamma)
            except OutOfRange:
                continue
            if inst.alpha <= inst.nu:
                continue
            try:
                report = two_adic_verify(inst)
            except OutOfRange:
                continue  # beta1 landed outside (0, 1): not a valid instance
            assert report.v2_s >= report.required, (coeffs, c, p, q, gamma)
            assert report.congruences_consistent
            checked += 1
