"""The truncated shuffle Hopf algebra on the alphabet ``{1, ..., d}``.

Words are tuples of ints; the empty tuple is the unit.  Linear combinations
are plain dicts ``{word: coefficient}`` with exact integer or ``Fraction``
coefficients.  Only the reduced deconcatenation coproduct is tabulated.
"""
import itertools
import json
from collections import Counter
from fractions import Fraction
from functools import lru_cache

Word = tuple


class TruncationExceeded(ValueError):
    pass


def word_str(w) -> str:
    """Dot notation, ``(1, 2, 1) -> "1.2.1"``; the empty word is ``""``."""
    return ".".join(str(a) for a in w)


def parse_word(text: str) -> Word:
    text = text.strip()
    return tuple(int(a) for a in text.split(".")) if text else ()


def is_lyndon(w) -> bool:
    """Nonempty and strictly smaller than each of its proper suffixes."""
    return len(w) > 0 and all(w < w[i:] for i in range(1, len(w)))


def lyndon_factorization(w) -> list:
    """Duval's algorithm: ``w = l1 l2 ... lk`` with ``l1 >= l2 >= ... >= lk`` Lyndon."""
    w = tuple(w)
    factors = []
    i, n = 0, len(w)
    while i < n:
        j, k = i + 1, i
        while j < n and w[k] <= w[j]:
            k = i if w[k] < w[j] else k + 1
            j += 1
        while i <= k:
            factors.append(w[i:i + j - k])
            i += j - k
    return factors


def mobius(n: int) -> int:
    result, p = 1, 2
    while p * p <= n:
        if n % p == 0:
            n //= p
            if n % p == 0:
                return 0
            result = -result
        p += 1
    return -result if n > 1 else result


def necklace_count(d: int, n: int) -> int:
    """Number of Lyndon words of length ``n`` over ``d`` letters."""
    return sum(mobius(k) * d ** (n // k) for k in range(1, n + 1) if n % k == 0) // n


@lru_cache(maxsize=None)
def _shuffle(u, v):
    if not u:
        return {v: 1}
    if not v:
        return {u: 1}
    out = Counter()
    for w, c in _shuffle(u[:-1], v).items():
        out[w + u[-1:]] += c
    for w, c in _shuffle(u, v[:-1]).items():
        out[w + v[-1:]] += c
    return dict(out)


def shuffle_combinations(x: dict, y: dict) -> dict:
    """Bilinear extension of the shuffle product to linear combinations."""
    out = Counter()
    for u, a in x.items():
        for v, b in y.items():
            for w, c in _shuffle(u, v).items():
                out[w] += a * b * c
    return {w: c for w, c in out.items() if c != 0}


class WordPolynomial(dict):
    """``{monomial: coefficient}`` where a monomial is a sorted tuple of Lyndon words.

    The monomial ``(h1, h2)`` stands for the shuffle product ``h1 ⧢ h2``.
    """

    def expand(self) -> dict:
        """Evaluate every monomial by shuffling, giving a combination of words."""
        out = Counter()
        for mono, c in self.items():
            prod = {(): 1}
            for h in mono:
                prod = shuffle_combinations(prod, {h: 1})
            for w, k in prod.items():
                out[w] += c * k
        return {w: c for w, c in out.items() if c != 0}

    def evaluate(self, values):
        """Apply a character given on Lyndon words (``values[h]``, arrays allowed)."""
        total = 0
        for mono, c in self.items():
            term = float(c) if isinstance(c, Fraction) else c
            for h in mono:
                term = term * values[h]
            total = total + term
        return total

    def to_json(self) -> str:
        terms = [
            {"monomial": [word_str(h) for h in mono], "coeff": str(Fraction(c))}
            for mono, c in sorted(self.items())
        ]
        return json.dumps(terms)

    @classmethod
    def from_json(cls, text: str) -> "WordPolynomial":
        return cls(
            {
                tuple(sorted(parse_word(h) for h in term["monomial"])): Fraction(term["coeff"])
                for term in json.loads(text)
            }
        )


class ShuffleAlgebra:
    """Words of length at most ``max_level`` over ``d`` letters.

    Lyndon words, shuffle products and reduced coproducts are built once, at
    construction, and every table is checked to respect the grading.
    """

    def __init__(self, d: int, max_level: int = 4):
        if d < 1 or max_level < 1:
            raise ValueError("need d >= 1 and max_level >= 1")
        self.d = d
        self.max_level = max_level
        self._words = {
            n: [tuple(w) for w in itertools.product(range(1, d + 1), repeat=n)]
            for n in range(max_level + 1)
        }
        self._lyndon = {n: [w for w in self._words[n] if is_lyndon(w)] for n in range(1, max_level + 1)}
        self._radford = {}
        self._build_tables()

    def _build_tables(self):
        self._coproduct = {}
        for n in range(1, self.max_level + 1):
            for w in self._words[n]:
                terms = [(w[:k], w[k:]) for k in range(1, n)]
                assert all(len(a) + len(b) == n and a and b for a, b in terms)
                self._coproduct[w] = terms
        self._products = {}
        for p in range(1, self.max_level + 1):
            for q in range(1, self.max_level + 1 - p):
                for u in self._words[p]:
                    for v in self._words[q]:
                        prod = _shuffle(u, v)
                        assert all(len(w) == p + q and c > 0 for w, c in prod.items())
                        self._products[u, v] = prod

    def _check_degree(self, n):
        if n > self.max_level:
            raise TruncationExceeded(f"degree {n} exceeds truncation level {self.max_level}")

    def words(self, degree: int) -> list:
        self._check_degree(degree)
        return list(self._words[degree])

    def all_words(self, max_degree=None) -> list:
        top = self.max_level if max_degree is None else max_degree
        self._check_degree(top)
        return [w for n in range(1, top + 1) for w in self._words[n]]

    def lyndon_words(self, degree: int) -> list:
        if degree < 1:
            raise ValueError("degree must be at least 1")
        self._check_degree(degree)
        return list(self._lyndon[degree])

    def lyndon_basis(self, max_degree: int) -> list:
        return [h for n in range(1, max_degree + 1) for h in self.lyndon_words(n)]

    def shuffle_product(self, u, v) -> dict:
        u, v = tuple(u), tuple(v)
        self._check_degree(len(u) + len(v))
        if (u, v) in self._products:
            return dict(self._products[u, v])
        return dict(_shuffle(u, v))

    def reduced_coproduct(self, w) -> list:
        """``[(w1, w2), ...]`` over the nontrivial deconcatenations, each with coefficient 1."""
        w = tuple(w)
        if not w:
            raise ValueError("the reduced coproduct is defined for nonempty words")
        self._check_degree(len(w))
        return list(self._coproduct[w])

    def coassociativity_defect(self, w) -> dict:
        """``(Id ⊗ Δ')Δ'w - (Δ' ⊗ Id)Δ'w`` as ``{(a, b, c): coefficient}``."""
        out = Counter()
        for a, bc in self.reduced_coproduct(w):
            if len(bc) > 1:
                for b, c in self.reduced_coproduct(bc):
                    out[a, b, c] += 1
        for ab, c in self.reduced_coproduct(w):
            if len(ab) > 1:
                for a, b in self.reduced_coproduct(ab):
                    out[a, b, c] -= 1
        return {k: v for k, v in out.items() if v != 0}

    def compatibility_defect(self, u, v) -> dict:
        """``Δ(u ⧢ v) - (m ⊗ m) τ23 (Δu ⊗ Δv)`` with the full deconcatenation Δ."""
        out = Counter()
        for w, c in self.shuffle_product(u, v).items():
            for k in range(len(w) + 1):
                out[w[:k], w[k:]] += c
        for i in range(len(u) + 1):
            for j in range(len(v) + 1):
                left = _shuffle(u[:i], v[:j])
                right = _shuffle(u[i:], v[j:])
                for a, ca in left.items():
                    for b, cb in right.items():
                        out[a, b] -= ca * cb
        return {k: c for k, c in out.items() if c != 0}

    def radford_decompose(self, w) -> WordPolynomial:
        """Write ``w`` as a polynomial (under shuffle) in Lyndon words, exactly.

        The shuffle of the Lyndon factors of ``w`` is a positive multiple of
        ``w`` plus lexicographically smaller words of the same degree, which
        are eliminated recursively.
        """
        w = tuple(w)
        self._check_degree(len(w))
        if not w:
            return WordPolynomial({(): Fraction(1)})
        if w in self._radford:
            return WordPolynomial(self._radford[w])
        factors = lyndon_factorization(w)
        mono = tuple(sorted(factors))
        prod = {(): 1}
        for h in factors:
            prod = shuffle_combinations(prod, {h: 1})
        lead = prod.pop(w)
        if any(x > w for x in prod):
            raise AssertionError(f"triangularity fails for {w}")
        poly = Counter({mono: Fraction(1, lead)})
        for x, c in prod.items():
            for m, a in self.radford_decompose(x).items():
                poly[m] -= Fraction(c, lead) * a
        result = {m: a for m, a in poly.items() if a != 0}
        self._radford[w] = result
        return WordPolynomial(result)
