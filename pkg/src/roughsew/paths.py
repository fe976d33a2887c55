"""Synthetic Hoelder paths and two-parameter germs on dyadic grids.

Every generator is deterministic; random paths draw from ``random.Random``,
whose output sequence for a given integer seed is stable across platforms
and Python versions.
"""
import math
import random
from dataclasses import dataclass, field
from statistics import NormalDist
from typing import Callable, Optional, Union

import numpy as np

from .grid import DyadicGrid, Grid1Fn, Grid2Fn, norm_c1_holder

_STD_NORMAL = NormalDist()


# --------------------------------------------------------------------------
# paths


@dataclass(frozen=True)
class PowerPath:
    """``t -> t**alpha``."""

    alpha: float

    def __post_init__(self):
        if not 0 < self.alpha <= 1:
            raise ValueError(f"alpha must lie in (0, 1], got {self.alpha}")

    def sample(self, grid: DyadicGrid) -> Grid1Fn:
        return Grid1Fn(grid, grid.points ** self.alpha)


@dataclass(frozen=True)
class Weierstrass:
    """``sum_n a**n sin(b**n pi t)``, Hoelder of order ``log(1/a) / log(b)``.

    For integer ``b`` and unit horizon the phases ``b**n k / 2**M`` are reduced
    modulo 2 in exact integer arithmetic, so no precision is lost at high ``n``.
    """

    a: float
    b: float
    alpha: Optional[float] = None

    def __post_init__(self):
        if not 0 < self.a < 1 or not self.b > 1:
            raise ValueError("need 0 < a < 1 and b > 1")
        if self.alpha is not None:
            if self.a * self.b <= 1:
                raise ValueError(
                    f"a*b = {self.a * self.b} <= 1: the series is Lipschitz, "
                    "not a rough path of the declared order"
                )
            if self.alpha > self.exponent + 1e-12:
                raise ValueError(f"declared alpha {self.alpha} exceeds {self.exponent:.6g}")

    @property
    def exponent(self) -> float:
        return math.log(1 / self.a) / math.log(self.b)

    def _terms(self):
        # stop once a**n is below double resolution of the leading term
        return int(math.ceil(math.log(1e-17) / math.log(self.a))) + 1

    def sample(self, grid: DyadicGrid) -> Grid1Fn:
        k = np.arange(grid.size)
        out = np.zeros(grid.size)
        exact = float(self.b).is_integer() and grid.horizon == 1.0
        b = int(self.b)
        period = 2 << grid.level
        for n in range(self._terms()):
            if exact:
                phase = np.array([(b ** n * int(j)) % period for j in k], dtype=float)
                out += self.a ** n * np.sin(np.pi * phase / grid.intervals)
            else:
                out += self.a ** n * np.sin(self.b ** n * np.pi * grid.points)
        return Grid1Fn(grid, out - out[0])


@dataclass(frozen=True)
class MidpointDisplacement:
    """Random path built level by level on nested dyadic grids.

    ``X(0) = 0``, ``X(T) ~ N(0, T**(2 alpha))`` and every new midpoint is the
    average of its neighbours plus an independent Gaussian of standard
    deviation ``(T 2**-n)**alpha * sqrt(1 - 2**(2 alpha - 2))``.  Draws are
    consumed coarse to fine, so the level-``M`` sample restricted to a coarser
    grid is the coarser sample.
    """

    alpha: float
    seed: int = 0

    def __post_init__(self):
        if not 0 < self.alpha < 1:
            raise ValueError(f"alpha must lie in (0, 1), got {self.alpha}")

    def component(self, i: int) -> "MidpointDisplacement":
        """The ``i``-th coordinate (0-based) of a multidimensional path."""
        return MidpointDisplacement(self.alpha, self.seed + i)

    def sample(self, grid: DyadicGrid) -> Grid1Fn:
        rng = random.Random(self.seed)

        def normals(n):
            # 1 - random() lies in (0, 1], keeping inv_cdf finite
            return np.array([_STD_NORMAL.inv_cdf(1.0 - rng.random()) for _ in range(n)])

        T, a = grid.horizon, self.alpha
        x = np.array([0.0, T ** a * normals(1)[0]])
        shrink = math.sqrt(1 - 2.0 ** (2 * a - 2))
        for n in range(1, grid.level + 1):
            sigma = (T * 2.0 ** (-n)) ** a * shrink
            mid = 0.5 * (x[:-1] + x[1:]) + sigma * normals(len(x) - 1)
            new = np.empty(2 * len(x) - 1)
            new[0::2] = x
            new[1::2] = mid
            x = new
        return Grid1Fn(grid, x)


@dataclass(frozen=True)
class SmoothPoly:
    """``sum_i coeffs[i] t**i`` re-based to vanish at 0."""

    coeffs: tuple
    alpha: float = 1.0

    def sample(self, grid: DyadicGrid) -> Grid1Fn:
        t = grid.points
        vals = sum(c * t ** i for i, c in enumerate(self.coeffs))
        vals = np.broadcast_to(np.asarray(vals, dtype=float), t.shape)
        return Grid1Fn(grid, vals - vals[0])


PathSpec = Union[PowerPath, Weierstrass, MidpointDisplacement, SmoothPoly]


def generate_path(spec: PathSpec, grid: DyadicGrid, alpha: Optional[float] = None) -> Grid1Fn:
    """Sample ``spec`` on ``grid`` and certify its Hoelder norm is finite."""
    path = spec.sample(grid)
    beta = alpha if alpha is not None else getattr(spec, "alpha", None)
    if beta is not None:
        norm = norm_c1_holder(path, min(beta, 1.0))
        if not math.isfinite(norm):
            raise ValueError(f"generated path has infinite {beta}-Hoelder norm")
    return path


def _as_values(path, grid: DyadicGrid) -> np.ndarray:
    if isinstance(path, Grid1Fn):
        if path.grid == grid:
            return path.values
        if path.grid.level >= grid.level:
            return path.restrict(grid).values
        raise ValueError(f"sampled path on {path.grid} cannot be evaluated on {grid}")
    return path.sample(grid).values


# --------------------------------------------------------------------------
# germs


class Germ:
    """A two-parameter function evaluated on pairs of grid indices."""

    def pairs(self, grid: DyadicGrid, j, k) -> np.ndarray:
        raise NotImplementedError

    def on(self, grid: DyadicGrid) -> Grid2Fn:
        idx = np.arange(grid.size)
        return Grid2Fn(grid, self.pairs(grid, idx[:, None], idx[None, :]))

    def __add__(self, other):
        return Mixture(((1.0, self), (1.0, other)))

    def __mul__(self, c):
        return Mixture(((float(c), self),))

    __rmul__ = __mul__


class _Sampled(Germ):
    """Germs built from paths; samples are cached per grid."""

    def _values(self, path, grid):
        cache = self.__dict__.setdefault("_cache", {})
        key = (id(path), grid)
        if key not in cache:
            cache[key] = _as_values(path, grid)
        return cache[key]


class Coboundary(_Sampled):
    """``A[s, t] = g(t) - g(s)``."""

    def __init__(self, path):
        self.path = path

    def pairs(self, grid, j, k):
        g = self._values(self.path, grid)
        return g[k] - g[j]


class YoungProduct(_Sampled):
    """``A[s, t] = Y(s) (X(t) - X(s))``."""

    def __init__(self, x, y):
        self.x, self.y = x, y

    def pairs(self, grid, j, k):
        X = self._values(self.x, grid)
        Y = self._values(self.y, grid)
        return Y[j] * (X[k] - X[j])


class LogGerm(Germ):
    """``A[s, t] = |t - s| log |t - s|``, set to 0 on the diagonal."""

    def pairs(self, grid, j, k):
        h = np.abs(np.asarray(k) - np.asarray(j)) * grid.mesh
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.where(h > 0, h * np.log(np.where(h > 0, h, 1.0)), 0.0)


class PowerGerm(Germ):
    """``A[s, t] = |t - s|**gamma``."""

    def __init__(self, gamma: float):
        if not gamma > 0:
            raise ValueError(f"gamma must be positive, got {gamma}")
        self.gamma = gamma

    def pairs(self, grid, j, k):
        h = np.abs(np.asarray(k) - np.asarray(j)) * grid.mesh
        return h ** self.gamma


class Custom(Germ):
    """A germ given by a vectorised ``f(s, t)`` of times, or a tabulated Grid2Fn."""

    def __init__(self, source: Union[Callable, Grid2Fn]):
        self.source = source

    def pairs(self, grid, j, k):
        if isinstance(self.source, Grid2Fn):
            if self.source.grid == grid:
                return self.source.values[j, k]
            stride = self.source.grid.stride_to(grid)
            return self.source.values[np.asarray(j) * stride, np.asarray(k) * stride]
        t = grid.points
        return np.asarray(self.source(t[j], t[k]), dtype=float) + 0.0 * (np.asarray(j) + np.asarray(k))


@dataclass(frozen=True)
class Mixture(Germ):
    terms: tuple = field(default=())

    def pairs(self, grid, j, k):
        return sum(c * g.pairs(grid, j, k) for c, g in self.terms)

    def __add__(self, other):
        extra = other.terms if isinstance(other, Mixture) else ((1.0, other),)
        return Mixture(self.terms + extra)

    def __mul__(self, c):
        return Mixture(tuple((c * a, g) for a, g in self.terms))

    __rmul__ = __mul__


GermSpec = Germ


def generate_germ(spec: Germ, grid: DyadicGrid) -> Grid2Fn:
    return spec.on(grid)
