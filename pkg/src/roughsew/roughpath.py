"""Geometric rough paths over the shuffle algebra, sampled on dyadic grid pairs.

A :class:`RoughPathGrid` stores ``<X_{s,t}, w>`` as an ``n x n`` array per
word.  :func:`extend` builds one from a family of Hoelder functions indexed by
Lyndon words, :func:`project` inverts it, and :func:`act` translates rough
paths by families.
"""
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from ._kernels import triple_sup
from .grid import DyadicGrid, Grid1Fn, Grid2Fn, delta1, norm_c1_holder, norm_c2
from .sewing import sew_high, sew_low
from .shuffle import ShuffleAlgebra, TruncationExceeded, word_str


class AlphaReciprocalInteger(ValueError):
    pass


def levels_for(alpha: float) -> int:
    """``N = floor(1/alpha)``, rejecting ``1/alpha`` integer."""
    if not 0 < alpha < 1:
        raise ValueError(f"alpha must lie in (0, 1), got {alpha}")
    inv = 1.0 / alpha
    if abs(inv - round(inv)) < 1e-12:
        raise AlphaReciprocalInteger(
            f"1/alpha = {inv:g} is an integer; the level-{round(inv)} sewing would sit at "
            f"gamma = 1 exactly. Perturb alpha slightly, e.g. alpha={alpha - 0.01:g}"
        )
    return math.floor(inv)


@dataclass(frozen=True, eq=False)
class RoughPathGrid:
    grid: DyadicGrid
    algebra: ShuffleAlgebra
    alpha: float
    values: dict
    stored_level: int

    def __post_init__(self):
        if self.stored_level > self.algebra.max_level:
            raise TruncationExceeded(
                f"stored level {self.stored_level} exceeds algebra truncation {self.algebra.max_level}"
            )
        n = self.grid.size
        for w in self.algebra.all_words(self.stored_level):
            if w not in self.values:
                raise ValueError(f"missing values for word {word_str(w)}")
            arr = self.values[w]
            if arr.shape != (n, n):
                raise ValueError(f"word {word_str(w)}: expected shape {(n, n)}, got {arr.shape}")
            arr.flags.writeable = False

    @property
    def N(self) -> int:
        return math.floor(1.0 / self.alpha)

    def words(self) -> list:
        return self.algebra.all_words(self.stored_level)

    def __getitem__(self, w) -> np.ndarray:
        return self.values[tuple(w)]

    def component(self, w) -> Grid2Fn:
        return Grid2Fn(self.grid, self.values[tuple(w)])

    def scale(self) -> float:
        """Largest stored magnitude, at least 1; used to make tolerances relative."""
        return max(1.0, max(float(np.abs(v).max()) for v in self.values.values()))


@dataclass(frozen=True, eq=False)
class HolderFamily:
    """Functions ``f^h`` vanishing at 0, one per Lyndon word of degree at most N."""

    algebra: ShuffleAlgebra
    grid: DyadicGrid
    alpha: float
    components: dict = field(default_factory=dict)

    def __post_init__(self):
        N = levels_for(self.alpha)
        if N > self.algebra.max_level:
            raise TruncationExceeded(f"N = {N} exceeds algebra truncation {self.algebra.max_level}")
        basis = set(self.algebra.lyndon_basis(N))
        comps = {}
        for h, f in self.components.items():
            h = tuple(h)
            if h not in basis:
                raise ValueError(f"{word_str(h)} is not a Lyndon word of degree <= {N}")
            if f.grid != self.grid:
                raise ValueError(f"component {word_str(h)} lives on {f.grid}, expected {self.grid}")
            if abs(f.values[0]) > 0:
                raise ValueError(f"component {word_str(h)} must vanish at 0")
            comps[h] = f
        for h in basis - comps.keys():
            comps[h] = Grid1Fn.zeros(self.grid)
        object.__setattr__(self, "components", comps)

    @property
    def N(self) -> int:
        return levels_for(self.alpha)

    def basis(self) -> list:
        return self.algebra.lyndon_basis(self.N)

    def __getitem__(self, h) -> Grid1Fn:
        return self.components[tuple(h)]

    def _like(self, comps):
        return HolderFamily(self.algebra, self.grid, self.alpha, comps)

    def _check(self, other):
        if (other.grid, other.alpha, other.algebra.d) != (self.grid, self.alpha, self.algebra.d):
            raise ValueError("families live on different grids, exponents or alphabets")

    def __add__(self, other):
        self._check(other)
        return self._like({h: self[h] + other[h] for h in self.basis()})

    def __sub__(self, other):
        self._check(other)
        return self._like({h: self[h] - other[h] for h in self.basis()})

    def __mul__(self, c):
        return self._like({h: self[h] * c for h in self.basis()})

    __rmul__ = __mul__


# --------------------------------------------------------------------------
# invariants


def _coproduct_stacks(X: RoughPathGrid, w):
    pairs = X.algebra.reduced_coproduct(w)
    n = X.grid.size
    if not pairs:
        return np.zeros((0, n, n)), np.zeros((0, n, n))
    left = np.stack([X.values[a] for a, _ in pairs])
    right = np.stack([X.values[b] for _, b in pairs])
    return left, right


def chen_defect(X: RoughPathGrid, w, s, u, t):
    """``delta <X, w>(s,u,t) - <X_{s,u} (x) X_{u,t}, reduced coproduct of w>`` at index triples."""
    w = tuple(w)
    V = X.values[w]
    s, u, t = np.asarray(s), np.asarray(u), np.asarray(t)
    out = V[s, t] - V[s, u] - V[u, t]
    for a, b in X.algebra.reduced_coproduct(w):
        out = out - X.values[a][s, u] * X.values[b][u, t]
    return out


def chen_sup(X: RoughPathGrid, w) -> tuple:
    """Largest Chen defect of ``w`` over all grid triples, with its argmax ``(s, u, t)``."""
    left, right = _coproduct_stacks(X, tuple(w))
    weight = np.ones(X.grid.size)
    weight[0] = 0.0
    best, arg = triple_sup(X.values[tuple(w)], left, right, weight, ordered=False)
    # the compiled loop skips s = u = t, where the defect is -<X_{s,s}, w> - products
    k = np.arange(X.grid.size)
    diag = np.abs(chen_defect(X, w, k, k, k))
    if diag.max() > best:
        i = int(np.argmax(diag))
        return float(diag[i]), (i, i, i)
    return best, arg


def shuffle_defect(X: RoughPathGrid) -> tuple:
    """``max |<X, u sh v> - <X, u><X, v>|`` over words with ``|u| + |v| <= stored_level``."""
    best, where = 0.0, None
    words = X.words()
    for u in words:
        for v in words:
            if len(u) + len(v) > X.stored_level or v < u:
                continue
            lhs = sum(c * X.values[w] for w, c in X.algebra.shuffle_product(u, v).items())
            err = float(np.abs(lhs - X.values[u] * X.values[v]).max())
            if where is None or err > best:
                best, where = err, (u, v)
    return best, where


# --------------------------------------------------------------------------
# construction


def _fill_polynomial_words(values, algebra, degree):
    lyndon = set(algebra.lyndon_words(degree))
    for w in algebra.words(degree):
        if w not in lyndon:
            values[w] = np.asarray(algebra.radford_decompose(w).evaluate(values), dtype=float)


def _germ_F(values, h, n):
    """``F[s, t] = <X_{0,s} (x) X_{s,t}, reduced coproduct of h>``."""
    F = np.zeros((n, n))
    for k in range(1, len(h)):
        F += values[h[:k]][0, :, None] * values[h[k:]]
    return F


def extend(f: HolderFamily, stored_level: Optional[int] = None) -> RoughPathGrid:
    """Lift a Hoelder family to the rough path with ``project(extend(f)) == f``.

    Each Lyndon ``h`` of degree ``n <= N`` gets ``<X, h> = delta(I(F) + f^h) - F``
    with ``I`` the dyadic integration map at ``gamma = alpha n``; other words
    follow from the character property.
    """
    algebra, grid, alpha = f.algebra, f.grid, f.alpha
    N = levels_for(alpha)
    n = grid.size
    values = {}
    for (i,) in algebra.lyndon_words(1):
        values[(i,)] = delta1(f[(i,)]).values
    for deg in range(2, N + 1):
        for h in algebra.lyndon_words(deg):
            F = Grid2Fn(grid, _germ_F(values, h, n))
            I = sew_low(F).I
            values[h] = delta1(I + f[h]).values - F.values
        _fill_polynomial_words(values, algebra, deg)
    X = RoughPathGrid(grid, algebra, alpha, values, N)
    if stored_level is not None and stored_level > N:
        X = extend_above_n(X, stored_level)
    return X


def extend_above_n(X: RoughPathGrid, target_level: int, oracle_level: Optional[int] = None) -> RoughPathGrid:
    """The unique extension to ``target_level`` through Riemann-sum sewing at ``gamma = alpha n > 1``.

    ``oracle_level`` (at most the grid level) sets the partition used for the
    Riemann sums; it defaults to the grid itself.
    """
    if target_level <= X.N:
        raise ValueError(f"target level must exceed N = {X.N}")
    if target_level > X.algebra.max_level:
        raise TruncationExceeded(f"target level {target_level} exceeds algebra truncation {X.algebra.max_level}")
    if oracle_level is not None and oracle_level > X.grid.level:
        raise ValueError("oracle level cannot exceed the grid level: the germ is only known on the grid")
    values = {w: X.values[w] for w in X.algebra.all_words(min(X.stored_level, X.N))}
    n = X.grid.size
    for deg in range(X.N + 1, target_level + 1):
        gamma = X.alpha * deg
        for h in X.algebra.lyndon_words(deg):
            F = Grid2Fn(X.grid, _germ_F(values, h, n))
            I = sew_high(F, gamma, oracle_level=oracle_level).I
            values[h] = delta1(I).values - F.values
        _fill_polynomial_words(values, X.algebra, deg)
    return RoughPathGrid(X.grid, X.algebra, X.alpha, values, target_level)


def project(X: RoughPathGrid) -> HolderFamily:
    """``f^h = I(<X, h>)`` for every Lyndon word of degree at most N."""
    comps = {}
    for h in X.algebra.lyndon_basis(X.N):
        comps[h] = sew_low(X.component(h)).I
    return HolderFamily(X.algebra, X.grid, X.alpha, comps)


def act(g: HolderFamily, X: RoughPathGrid) -> RoughPathGrid:
    """Translate ``X`` by ``g``: ``extend(g + project(X))`` at the same stored level."""
    if g.grid != X.grid or g.alpha != X.alpha or g.algebra.d != X.algebra.d:
        raise ValueError("family and rough path live on different grids, exponents or alphabets")
    return extend(project(X) + g, stored_level=X.stored_level if X.stored_level > X.N else None)


# --------------------------------------------------------------------------
# metrics and reports


def d_rp(X: RoughPathGrid, Y: RoughPathGrid) -> float:
    """Sum over Lyndon ``h`` of degree at most N of ``||<X,h> - <Y,h>||`` at exponent ``alpha |h|``."""
    return sum(
        norm_c2(Grid2Fn(X.grid, X.values[h] - Y.values[h]), X.alpha * len(h))
        for h in X.algebra.lyndon_basis(X.N)
    )


def d_family(f: HolderFamily, g: HolderFamily) -> float:
    return sum(norm_c1_holder(f[h] - g[h], f.alpha * len(h)) for h in f.basis())


def holder_report(X: RoughPathGrid) -> dict:
    """Per-word Hoelder norms together with the Chen, shuffle and diagonal defects."""
    norms, chen = {}, {}
    worst, worst_at = 0.0, None
    for w in X.words():
        norms[word_str(w)] = norm_c2(X.component(w), X.alpha * len(w))
        value, (s, u, t) = chen_sup(X, w)
        chen[word_str(w)] = value
        if worst_at is None or value > worst:
            worst, worst_at = value, {"word": word_str(w), "s": s, "u": u, "t": t}
    shuffle_max, pair = shuffle_defect(X)
    diagonal = max(float(np.abs(np.diagonal(v)).max()) for v in X.values.values())
    return {
        "alpha": X.alpha,
        "N": X.N,
        "stored_level": X.stored_level,
        "grid_level": X.grid.level,
        "scale": X.scale(),
        "norms": norms,
        "chen": chen,
        "chen_max": worst,
        "chen_argmax": worst_at,
        "shuffle_max": shuffle_max,
        "shuffle_argmax": [word_str(w) for w in pair] if pair else None,
        "diagonal_max": diagonal,
    }
