"""Dyadic grids on [0, T] and functions of one, two and three grid times.

Grid times are always addressed by their integer index ``k`` on the grid of
level ``M`` (time ``k * T / 2**M``), so that dyadic midpoints are exact and
a level-``m`` grid sits inside every finer grid bit for bit.
"""
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional

import numpy as np

from ._kernels import triple_sup

FULL_ENUMERATION_MAX_LEVEL = 8


@dataclass(frozen=True)
class DyadicGrid:
    horizon: float
    level: int

    def __post_init__(self):
        if not self.horizon > 0:
            raise ValueError(f"horizon must be positive, got {self.horizon}")
        if self.level < 0 or int(self.level) != self.level:
            raise ValueError(f"level must be a nonnegative integer, got {self.level}")
        object.__setattr__(self, "level", int(self.level))

    @property
    def intervals(self) -> int:
        return 1 << self.level

    @property
    def size(self) -> int:
        """Number of grid points, ``2**M + 1``."""
        return self.intervals + 1

    @property
    def mesh(self) -> float:
        return self.horizon / self.intervals

    @property
    def points(self) -> np.ndarray:
        return np.arange(self.size) * self.mesh

    def exact_time(self, k: int) -> Fraction:
        return Fraction(self.horizon) * k / self.intervals

    def refine(self, levels: int = 1) -> "DyadicGrid":
        return DyadicGrid(self.horizon, self.level + levels)

    def at_level(self, level: int) -> "DyadicGrid":
        return DyadicGrid(self.horizon, level)

    def stride_to(self, coarse: "DyadicGrid") -> int:
        """Index stride of ``coarse`` inside this grid."""
        if coarse.horizon != self.horizon or coarse.level > self.level:
            raise ValueError(f"{coarse} is not a sub-grid of {self}")
        return 1 << (self.level - coarse.level)

    def gap_weights(self, gamma: float) -> np.ndarray:
        """``w[g] = (g * mesh) ** -gamma`` for index gaps ``g >= 1``; ``w[0] = 0``."""
        w = np.zeros(self.size)
        w[1:] = (np.arange(1, self.size) * self.mesh) ** (-gamma)
        return w


def _frozen(values, dtype=None):
    arr = np.array(values, dtype=dtype, copy=True)
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True, eq=False)
class Grid1Fn:
    grid: DyadicGrid
    values: np.ndarray

    def __post_init__(self):
        vals = _frozen(self.values)
        if vals.shape != (self.grid.size,):
            raise ValueError(f"expected {self.grid.size} values, got shape {vals.shape}")
        object.__setattr__(self, "values", vals)

    @classmethod
    def from_function(cls, grid: DyadicGrid, f: Callable) -> "Grid1Fn":
        return cls(grid, np.asarray(f(grid.points), dtype=float))

    @classmethod
    def zeros(cls, grid: DyadicGrid) -> "Grid1Fn":
        return cls(grid, np.zeros(grid.size))

    def restrict(self, grid: DyadicGrid) -> "Grid1Fn":
        stride = self.grid.stride_to(grid)
        return Grid1Fn(grid, self.values[::stride])

    def rebased(self) -> "Grid1Fn":
        """Same function shifted so that its value at 0 is 0."""
        return Grid1Fn(self.grid, self.values - self.values[0])

    def _check(self, other):
        if other.grid != self.grid:
            raise ValueError(f"grid mismatch: {self.grid} vs {other.grid}")

    def __add__(self, other):
        self._check(other)
        return Grid1Fn(self.grid, self.values + other.values)

    def __sub__(self, other):
        self._check(other)
        return Grid1Fn(self.grid, self.values - other.values)

    def __neg__(self):
        return Grid1Fn(self.grid, -self.values)

    def __mul__(self, c):
        return Grid1Fn(self.grid, self.values * c)

    __rmul__ = __mul__


@dataclass(frozen=True, eq=False)
class Grid2Fn:
    """``values[j, k]`` is the function at the pair (t_j, t_k), any order."""

    grid: DyadicGrid
    values: np.ndarray

    def __post_init__(self):
        vals = _frozen(self.values)
        n = self.grid.size
        if vals.shape != (n, n):
            raise ValueError(f"expected shape {(n, n)}, got {vals.shape}")
        if vals.dtype != object and not np.all(np.isfinite(vals)):
            raise ValueError("Grid2Fn values must be finite")
        object.__setattr__(self, "values", vals)

    @classmethod
    def from_function(cls, grid: DyadicGrid, f: Callable) -> "Grid2Fn":
        """Tabulate ``f(s, t)`` (vectorised over time arrays) on all pairs."""
        t = grid.points
        return cls(grid, np.asarray(f(t[:, None], t[None, :]), dtype=float))

    def at(self, j, k):
        return self.values[j, k]

    def restrict(self, grid: DyadicGrid) -> "Grid2Fn":
        stride = self.grid.stride_to(grid)
        return Grid2Fn(grid, self.values[::stride, ::stride])

    def _check(self, other):
        if other.grid != self.grid:
            raise ValueError(f"grid mismatch: {self.grid} vs {other.grid}")

    def __add__(self, other):
        self._check(other)
        return Grid2Fn(self.grid, self.values + other.values)

    def __sub__(self, other):
        self._check(other)
        return Grid2Fn(self.grid, self.values - other.values)

    def __neg__(self):
        return Grid2Fn(self.grid, -self.values)

    def __mul__(self, c):
        return Grid2Fn(self.grid, self.values * c)

    __rmul__ = __mul__


@dataclass(frozen=True, eq=False)
class Grid3View:
    """A three-time function evaluated on demand from index arrays.

    When the view has the form ``A[s,t] - A[s,u] - A[u,t] - sum_k P[k,s,u] Q[k,u,t]``
    the arrays are kept so that suprema can run in the compiled loop.
    """

    grid: DyadicGrid
    fn: Callable
    base: Optional[np.ndarray] = None
    left: Optional[np.ndarray] = None
    right: Optional[np.ndarray] = None

    def __call__(self, s, u, t):
        return self.fn(np.asarray(s), np.asarray(u), np.asarray(t))

    @property
    def compiled(self) -> bool:
        return self.base is not None and self.base.dtype != object


def delta1(I: Grid1Fn) -> Grid2Fn:
    """``(delta I)[s, t] = I[t] - I[s]`` on every pair."""
    v = I.values
    return Grid2Fn(I.grid, v[None, :] - v[:, None])


def delta2(A: Grid2Fn) -> Grid3View:
    """``(delta A)[s, u, t] = A[s, t] - A[s, u] - A[u, t]``."""
    V = A.values

    def fn(s, u, t):
        return V[s, t] - V[s, u] - V[u, t]

    return Grid3View(A.grid, fn, base=V)


def pair_sup(A: Grid2Fn, weight: np.ndarray, chunk: int = 512) -> float:
    """``max |A[j, k]| * weight[|j - k|]`` over all pairs, streamed by rows."""
    n = A.grid.size
    cols = np.arange(n)
    best = 0.0
    for j0 in range(0, n, chunk):
        rows = np.arange(j0, min(j0 + chunk, n))
        gaps = np.abs(rows[:, None] - cols[None, :])
        vals = np.abs(A.values[j0:j0 + len(rows)].astype(float)) * weight[gaps]
        best = max(best, float(vals.max()))
    return best


def norm_c2(A: Grid2Fn, gamma: float) -> float:
    """``sup |A[s,t]| / |t-s|**gamma`` over grid pairs with ``s != t``."""
    if not gamma > 0:
        raise ValueError(f"gamma must be positive, got {gamma}")
    return pair_sup(A, A.grid.gap_weights(gamma))


def norm_c3(
    B: Grid3View,
    gamma: float,
    ordered: bool = False,
    strategy: Optional[str] = None,
    samples: int = 1 << 20,
    seed: int = 0,
) -> float:
    """Coherence norm of a three-time function.

    Unordered (default): sup over triples of ``|B| / max(|t-u|, |u-s|)**gamma``,
    skipping only ``s = u = t``.  Ordered: sup over ``s <= u <= t``, ``s < t``
    of ``|B| / (t-s)**gamma``.

    ``strategy`` is ``"full"`` or ``"sampled"``; by default full enumeration
    is used up to level 8.  Sampling draws ``samples`` random triples from a
    generator seeded with ``seed`` and therefore underestimates the sup.
    """
    value, _ = coherence_sup(B, gamma, ordered, strategy, samples, seed)
    return value


def coherence_sup(B, gamma, ordered=False, strategy=None, samples=1 << 20, seed=0):
    """Like :func:`norm_c3` but also returns the maximising index triple."""
    if not gamma > 0:
        raise ValueError(f"gamma must be positive, got {gamma}")
    grid = B.grid
    if strategy is None:
        strategy = "full" if grid.level <= FULL_ENUMERATION_MAX_LEVEL else "sampled"
    weight = grid.gap_weights(gamma)
    if strategy == "sampled":
        return _sampled_sup(B, weight, ordered, samples, seed)
    if strategy != "full":
        raise ValueError(f"unknown strategy {strategy!r}")
    if B.compiled:
        return triple_sup(B.base, B.left, B.right, weight, ordered=ordered)
    return _streamed_sup(B, weight, ordered)


def _gap(s, u, t, ordered):
    if ordered:
        return t - s
    return np.maximum(np.abs(t - u), np.abs(u - s))


def _streamed_sup(B, weight, ordered):
    n = B.grid.size
    idx = np.arange(n)
    u = idx[:, None]
    t = idx[None, :]
    best, arg = 0.0, (-1, -1, -1)
    for s in range(n):
        g = _gap(s, u, t, ordered)
        valid = g > 0
        if ordered:
            valid = valid & (u >= s) & (t >= u)
        vals = np.where(valid, np.abs(B(s, u, t).astype(float)) * weight[g], 0.0)
        i = int(np.argmax(vals))
        if vals.flat[i] > best:
            best, arg = float(vals.flat[i]), (s, i // n, i % n)
    return best, arg


def _sampled_sup(B, weight, ordered, samples, seed):
    n = B.grid.size
    rng = np.random.default_rng(seed)
    trip = rng.integers(0, n, size=(samples, 3))
    if ordered:
        trip.sort(axis=1)
    s, u, t = trip.T
    g = _gap(s, u, t, ordered)
    vals = np.where(g > 0, np.abs(B(s, u, t).astype(float)) * weight[g], 0.0)
    i = int(np.argmax(vals))
    return float(vals[i]), (int(s[i]), int(u[i]), int(t[i]))


def norm_c1_holder(I: Grid1Fn, beta: float) -> float:
    """Hoelder seminorm ``sup |I_t - I_s| / |t-s|**beta`` for ``0 < beta <= 1``."""
    if not 0 < beta <= 1:
        raise ValueError(f"beta must lie in (0, 1], got {beta}")
    v = I.values.astype(float)
    weight = I.grid.gap_weights(beta)
    best = 0.0
    # |I_t - I_s| only depends on unordered pairs; scan by gap.
    for g in range(1, I.grid.size):
        best = max(best, float(np.abs(v[g:] - v[:-g]).max()) * weight[g])
    return best
