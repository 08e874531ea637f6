"""Free-word parsing, reduction, and homomorphism evaluation tests."""

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dessinkit.errors import DegreeMismatch, ParseError
from dessinkit.perms import Permutation, compose_right
from dessinkit.words import FreeWord, commutator_word, evaluate_word, parse_word


def random_perm(rng, n):
    images = list(range(1, n + 1))
    rng.shuffle(images)
    return Permutation(images)


syllable_lists = st.lists(
    st.tuples(st.sampled_from("xy"), st.integers(-6, 6).filter(bool)),
    max_size=8,
)


class TestParsing:
    def test_explicit_exponents(self):
        w = parse_word("x^3 y^-1 x^2 y x^3")
        assert w.syllables == (("x", 3), ("y", -1), ("x", 2), ("y", 1), ("x", 3))

    def test_free_reduction(self):
        assert parse_word("x x^-1").is_empty
        assert parse_word("x y y^-1 x^-1").is_empty
        assert parse_word("x^2 x^-1") == parse_word("x")

    def test_commutator_bracket(self):
        w = parse_word("[x^-1 y^2 x, x y]")
        a, b = parse_word("x^-1 y^2 x"), parse_word("x y")
        assert w == commutator_word(a, b)
        assert w == a * b * a.inverse() * b.inverse()

    def test_group_power(self):
        assert parse_word("(x y)^2") == parse_word("x y x y")
        assert parse_word("(x y)^-1") == parse_word("y^-1 x^-1")

    def test_nested(self):
        assert parse_word("((x)^2)^3") == parse_word("x^6")
        assert parse_word("[x, [x, y]]").syllables  # parses and reduces

    def test_whitespace(self):
        assert parse_word("  x ^ 2   y") == parse_word("x^2 y")

    def test_rejects_other_generators(self):
        for bad in ("z", "x^", "x**2", "(x", "[x, y", "x,y", "x^1.5"):
            with pytest.raises(ParseError):
                parse_word(bad)

    def test_empty_word(self):
        w = parse_word("")
        assert w.is_empty and str(w) == "1"


class TestCommutator:
    def test_self_commutator(self):
        x = parse_word("x")
        assert commutator_word(x, x).is_empty

    def test_definition(self):
        x, y = parse_word("x"), parse_word("y")
        assert commutator_word(x, y) == parse_word("x y x^-1 y^-1")

    def test_convention_immaterial_for_kernels(self):
        # [a,b] = id exactly when [b,a] = id under either bracket order
        rng = random.Random(2)
        for _ in range(20):
            mx, my = random_perm(rng, 6), random_perm(rng, 6)
            a = parse_word("x^-1 y^2 x")
            b = parse_word("x y")
            fwd = evaluate_word(commutator_word(a, b), mx, my)
            rev = evaluate_word(commutator_word(b, a), mx, my)
            assert fwd.is_identity == rev.is_identity


class TestEvaluation:
    def test_generator(self):
        rng = random.Random(7)
        mx, my = random_perm(rng, 6), random_perm(rng, 6)
        assert evaluate_word(parse_word("x"), mx, my) == mx
        assert evaluate_word(parse_word("y"), mx, my) == my

    def test_empty_is_identity(self):
        rng = random.Random(8)
        mx, my = random_perm(rng, 5), random_perm(rng, 5)
        assert evaluate_word(FreeWord(), mx, my).is_identity

    def test_degree_mismatch(self):
        with pytest.raises(DegreeMismatch):
            evaluate_word(
                parse_word("x"), Permutation.identity(3), Permutation.identity(4)
            )

    def test_large_exponent_square_and_multiply(self):
        cyc = Permutation([2, 3, 4, 5, 1])
        w = parse_word("x^1000000000000000001")
        assert evaluate_word(w, cyc, Permutation.identity(5)) == cyc

    @given(syllable_lists, syllable_lists, st.integers(2, 10), st.data())
    @settings(max_examples=60, deadline=None)
    def test_homomorphism_law(self, u_syll, v_syll, n, data):
        u, v = FreeWord(u_syll), FreeWord(v_syll)
        mx = Permutation(data.draw(st.permutations(list(range(1, n + 1)))))
        my = Permutation(data.draw(st.permutations(list(range(1, n + 1)))))
        left = evaluate_word(u * v, mx, my)
        right = compose_right(evaluate_word(u, mx, my), evaluate_word(v, mx, my))
        assert left == right
        assert evaluate_word(u.inverse(), mx, my) == evaluate_word(u, mx, my).inverse()

    def test_kernel_inversion_invariance(self):
        rng = random.Random(13)
        for _ in range(30):
            mx, my = random_perm(rng, 6), random_perm(rng, 6)
            syll = [
                (rng.choice("xy"), rng.choice([-2, -1, 1, 2])) for _ in range(5)
            ]
            w = FreeWord(syll)
            assert (
                evaluate_word(w, mx, my).is_identity
                == evaluate_word(w.inverse(), mx, my).is_identity
            )


class TestWordAlgebra:
    def test_reduction_invariants(self):
        rng = random.Random(4)
        for _ in range(50):
            syll = [
                (rng.choice("xy"), rng.randint(-5, 5)) for _ in range(rng.randint(0, 8))
            ]
            w = FreeWord(syll)
            for (g1, e1), (g2, e2) in zip(w.syllables, w.syllables[1:]):
                assert g1 != g2 and e1 != 0 and e2 != 0
            assert (w * w.inverse()).is_empty

    def test_word_power(self):
        w = parse_word("x y")
        assert w**3 == parse_word("x y x y x y")
        assert w**0 == FreeWord()
        assert w**-2 == parse_word("y^-1 x^-1 y^-1 x^-1")

    def test_exponent_sum(self):
        w = parse_word("x^3 y^-1 x^2 y x^3")
        assert w.exponent_sum("x") == 8
        assert w.exponent_sum("y") == 0
        assert len(w) == 10
