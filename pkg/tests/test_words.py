import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import naive_reduce
from slopegrowth.words import (
    Alphabet, GeneratorMap, ReducedWord, WordError, apply_map, invert, multiply, parse_word, reduce,
)

A2 = Alphabet.standard("a", 2)
A3 = Alphabet.standard("a", 3)


def raw_words(rank, max_len=24):
    return st.lists(st.tuples(st.integers(0, rank - 1), st.sampled_from((1, -1))), max_size=max_len)


def reduced(rank=3, max_len=16):
    alph = Alphabet.standard("a", rank)
    return raw_words(rank, max_len).map(lambda w: reduce(w, alph))


def is_reduced(letters):
    return all(not (i == j and s == -t) for (i, s), (j, t) in zip(letters, letters[1:]))


class TestReduce:
    def test_forced_cancellation(self):
        assert reduce([(0, 1), (0, -1)], A2).letters == ()

    def test_interior_cancellation(self):
        w = reduce([(0, 1), (1, 1), (1, -1), (0, 1)], A2)
        assert w.letters == ((0, 1), (0, 1))
        assert w == parse_word("a1 a1", A2)

    def test_against_naive_oracle(self):
        rng = random.Random(7)
        for _ in range(1000):
            raw = [(rng.randrange(2), rng.choice((1, -1))) for _ in range(rng.randrange(30))]
            w = reduce(raw, A2)
            assert w.letters == naive_reduce(raw)
            assert (len(raw) - len(w)) % 2 == 0

    def test_bad_index(self):
        with pytest.raises(WordError):
            reduce([(2, 1)], A2)
        with pytest.raises(WordError):
            reduce([(0, 2)], A2)

    @given(raw_words(3))
    def test_idempotent(self, raw):
        w = reduce(raw, A3)
        assert reduce(w.letters, A3) == w
        assert is_reduced(w.letters)
        assert len(w) <= len(raw)


class TestGroupAxioms:
    def test_examples(self):
        u, v = parse_word("a1 a2", A2), parse_word("a2^-1 a1", A2)
        assert multiply(u, v) == parse_word("a1 a1", A2)
        assert u * ReducedWord.identity(A2) == u
        assert invert(u).to_literal() == "a2^-1 a1^-1"
        assert invert(ReducedWord.identity(A2)).is_identity()

    def test_random_words(self):
        rng = random.Random(11)
        e = ReducedWord.identity(A3)

        def rand():
            return reduce([(rng.randrange(3), rng.choice((1, -1))) for _ in range(rng.randrange(12))], A3)

        for _ in range(10_000):
            u, v, w = rand(), rand(), rand()
            assert (u * v) * w == u * (v * w)
            # concatenate-then-reduce oracle
            assert (u * v).letters == naive_reduce(u.letters + v.letters)
            assert u * e == e * u == u
            assert u * ~u == ~u * u == e
            assert len(~u) == len(u)
            assert abs(len(u) - len(v)) <= len(u * v) <= len(u) + len(v)

    def test_alphabet_mismatch(self):
        with pytest.raises(WordError):
            multiply(parse_word("a1", A2), parse_word("a1", A3))


class TestApplyMap:
    def test_example51_first_factor(self):
        g = Alphabet.standard("g", 4)
        h = GeneratorMap(g, A2, tuple(parse_word(x, A2) for x in ("a1", "a2", "", "")))
        assert apply_map(h, parse_word("g1 g3 g1^-1", g)).is_identity()
        assert apply_map(h, parse_word("g1 g2", g)) == parse_word("a1 a2", A2)

    def test_example41_second_factor(self):
        src = Alphabet("G", ("x", "y"))
        b = Alphabet.standard("b", 2)
        h = GeneratorMap(src, b, (parse_word("b1", b), parse_word("b2 b2", b)))
        img = apply_map(h, parse_word("x y", src))
        assert img == parse_word("b1 b2 b2", b) and len(img) == 3

    def test_mismatch(self):
        g = Alphabet.standard("g", 2)
        h = GeneratorMap(g, A2, (parse_word("a1", A2), parse_word("a2", A2)))
        with pytest.raises(WordError):
            apply_map(h, parse_word("a1", A2))
        with pytest.raises(WordError):
            GeneratorMap(g, A2, (parse_word("a1", A2),))

    @settings(max_examples=300)
    @given(
        reduced(3),
        reduced(3),
        st.lists(raw_words(2, 4), min_size=3, max_size=3),
    )
    def test_homomorphism_law(self, u, v, imgs):
        h = GeneratorMap(A3, A2, tuple(reduce(w, A2) for w in imgs))
        assert apply_map(h, u * v) == apply_map(h, u) * apply_map(h, v)
        assert apply_map(h, ~u) == ~apply_map(h, u)


class TestParse:
    def test_literals(self):
        assert parse_word("", A2).is_identity()
        assert parse_word("1", A2).is_identity()
        assert parse_word("a1^3 a1^-1", A2) == parse_word("a1 a1", A2)
        assert parse_word("a2^-1", A2).letters == ((1, -1),)

    @pytest.mark.parametrize("text", ["a3", "b1", "a1^x", "a1^^2", "a"])
    def test_unknown_tokens(self, text):
        with pytest.raises(WordError):
            parse_word(text, A2)

    @given(reduced(3))
    def test_literal_roundtrip(self, w):
        assert parse_word(w.to_literal(), A3) == w

    def test_alphabet_checks(self):
        with pytest.raises(WordError):
            Alphabet("x", ())
        with pytest.raises(WordError):
            Alphabet("x", ("a", "a"))
        assert A2.signed_letters() == [(0, 1), (0, -1), (1, 1), (1, -1)]
