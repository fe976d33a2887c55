import itertools
import math
from collections import Counter
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from roughsew.shuffle import (
    ShuffleAlgebra,
    TruncationExceeded,
    WordPolynomial,
    is_lyndon,
    lyndon_factorization,
    necklace_count,
    parse_word,
    word_str,
)

ALG = ShuffleAlgebra(3, 4)
WORDS = [()] + ALG.all_words()


def interleavings(u, v):
    """Every way of merging ``u`` and ``v``, by choosing the positions of ``u``."""
    n = len(u) + len(v)
    out = Counter()
    for pos in itertools.combinations(range(n), len(u)):
        w, iu, iv = [], iter(u), iter(v)
        for i in range(n):
            w.append(next(iu) if i in pos else next(iv))
        out[tuple(w)] += 1
    return dict(out)


def test_shuffle_examples():
    assert ALG.shuffle_product((1,), (1,)) == {(1, 1): 2}
    assert ALG.shuffle_product((1,), (2,)) == {(1, 2): 1, (2, 1): 1}
    assert ALG.shuffle_product((1, 2), (3,)) == {(1, 2, 3): 1, (1, 3, 2): 1, (3, 1, 2): 1}
    assert ALG.shuffle_product((), (2, 1)) == {(2, 1): 1}
    with pytest.raises(TruncationExceeded):
        ALG.shuffle_product((1, 2, 3), (1, 2))


def test_shuffle_matches_interleavings_and_binomial():
    for u in WORDS:
        for v in WORDS:
            if len(u) + len(v) <= 4:
                prod = ALG.shuffle_product(u, v)
                assert prod == interleavings(u, v)
                assert sum(prod.values()) == math.comb(len(u) + len(v), len(u))


def test_shuffle_commutative_and_associative():
    for u, v in itertools.product(WORDS, repeat=2):
        if len(u) + len(v) <= 4:
            assert ALG.shuffle_product(u, v) == ALG.shuffle_product(v, u)
    for u, v, w in itertools.product(WORDS, repeat=3):
        if len(u) + len(v) + len(w) > 4:
            continue
        left, right = Counter(), Counter()
        for x, c in ALG.shuffle_product(u, v).items():
            for y, k in ALG.shuffle_product(x, w).items():
                left[y] += c * k
        for x, c in ALG.shuffle_product(v, w).items():
            for y, k in ALG.shuffle_product(u, x).items():
                right[y] += c * k
        assert left == right


def test_reduced_coproduct_examples():
    assert ALG.reduced_coproduct((1,)) == []
    assert ALG.reduced_coproduct((1, 2)) == [((1,), (2,))]
    assert ALG.reduced_coproduct((1, 2, 3)) == [((1,), (2, 3)), ((1, 2), (3,))]
    with pytest.raises(ValueError):
        ALG.reduced_coproduct(())


def test_coassociativity_exhaustive():
    assert all(not ALG.coassociativity_defect(w) for w in ALG.all_words())


def test_compatibility_exhaustive():
    for u, v in itertools.product(WORDS, repeat=2):
        if len(u) + len(v) <= 4:
            assert ALG.compatibility_defect(u, v) == {}


def test_lyndon_examples():
    alg = ShuffleAlgebra(2, 4)
    assert alg.lyndon_words(1) == [(1,), (2,)]
    assert alg.lyndon_words(2) == [(1, 2)]
    assert alg.lyndon_words(3) == [(1, 1, 2), (1, 2, 2)]
    for d in (1, 2, 3):
        a = ShuffleAlgebra(d, 4)
        for n in range(1, 5):
            words = a.lyndon_words(n)
            assert words == sorted(words)
            assert len(words) == necklace_count(d, n)
    with pytest.raises(TruncationExceeded):
        alg.lyndon_words(5)


@given(st.lists(st.integers(1, 3), min_size=1, max_size=8))
def test_lyndon_factorization(word):
    w = tuple(word)
    factors = lyndon_factorization(w)
    assert sum(factors, ()) == w
    assert all(is_lyndon(f) for f in factors)
    assert all(a >= b for a, b in zip(factors, factors[1:]))


def test_radford_examples():
    alg = ShuffleAlgebra(2, 4)
    assert alg.radford_decompose((1, 2)) == {((1, 2),): 1}
    assert alg.radford_decompose((1, 1)) == {((1,), (1,)): Fraction(1, 2)}
    assert alg.radford_decompose((2, 1)) == {((1,), (2,)): 1, ((1, 2),): -1}


def test_radford_round_trip_exhaustive():
    for d in (1, 2, 3):
        alg = ShuffleAlgebra(d, 4)
        for w in alg.all_words():
            poly = alg.radford_decompose(w)
            assert all(isinstance(c, Fraction) for c in poly.values())
            assert all(is_lyndon(h) for mono in poly for h in mono)
            assert poly.expand() == {w: 1}


def test_word_polynomial_json_round_trip():
    poly = ALG.radford_decompose((3, 2, 1, 1))
    again = WordPolynomial.from_json(poly.to_json())
    assert again == poly
    assert '"coeff": "' in poly.to_json()


def test_word_notation():
    assert word_str((1, 2, 1)) == "1.2.1"
    assert parse_word("1.2.1") == (1, 2, 1)
    assert parse_word("") == ()


def test_grading_of_tables():
    for w in ALG.all_words():
        for a, b in ALG.reduced_coproduct(w):
            assert len(a) >= 1 and len(b) >= 1 and len(a) + len(b) == len(w)
    with pytest.raises(ValueError):
        ShuffleAlgebra(0, 3)
