"""Sewing maps on dyadic grids.

Two constructions are provided.  For ``gamma > 1`` the integral is the limit
of Riemann sums along nested dyadic partitions (:func:`sew_high`).  For any
``gamma`` the dyadic recursion of :func:`sew_low` builds an ``I`` whose
increments over consecutive dyadic intervals differ from ``A`` by an explicit
table ``u[n][k]`` that depends on ``delta A`` only; below ``gamma = 1`` this is
the only construction available and it is not unique.

Public remainders follow ``R = A - delta I``, so that ``delta R = delta A``.
"""
import math
from dataclasses import asdict, dataclass
from typing import NamedTuple, Optional

import numpy as np

from .grid import (
    DyadicGrid,
    Grid1Fn,
    Grid2Fn,
    delta1,
    delta2,
    norm_c2,
    norm_c3,
    pair_sup,
)

MAX_SERIES_TERMS = 10_000
SERIES_RTOL = 1e-12


class SewingError(ValueError):
    pass


class NonConvergent(SewingError):
    pass


class LevelMismatch(SewingError):
    pass


class NotConverging(SewingError):
    pass


# --------------------------------------------------------------------------
# control functions


@dataclass(frozen=True)
class ControlFn:
    """A modulus ``V`` on ``[0, T]`` together with the parameter ``k0``.

    ``kind == "power"``: ``V(u) = scale * u**gamma``.
    ``kind == "tabulated"``: ``table[j] = V(T 2**-j)``, and ``V`` vanishes on
    gaps finer than the table (no grid triple lives there).
    """

    kind: str
    k0: int
    horizon: float = 1.0
    gamma: float = 0.0
    scale: float = 1.0
    table: tuple = ()

    def __post_init__(self):
        if self.k0 < 1:
            raise ValueError("k0 must be a positive integer")
        if self.kind == "power":
            if not self.gamma > 0:
                raise ValueError("power-law control needs gamma > 0")
            if self.scale < 0:
                raise ValueError("scale must be nonnegative")
            if self.scale > 0 and (self.k0 * self.gamma <= 1 or self.k0 < 2):
                raise NonConvergent(
                    f"series diverges for gamma={self.gamma}, k0={self.k0}; "
                    "need k0 > 1/gamma and k0 >= 2"
                )
        elif self.kind == "tabulated":
            tab = np.asarray(self.table, dtype=float)
            if np.any(tab < 0) or np.any(np.diff(tab) > 0):
                raise ValueError("tabulated V must be nonnegative and increasing in the gap")
            if self.k0 < 2 and np.any(tab > 0):
                raise NonConvergent("tabulated control needs k0 >= 2")
        else:
            raise ValueError(f"unknown control kind {self.kind!r}")

    @classmethod
    def power_law(cls, gamma, horizon=1.0, scale=1.0, k0=None):
        return cls("power", default_k0(gamma) if k0 is None else k0, horizon, gamma, scale)

    @classmethod
    def tabulated(cls, values, horizon=1.0, k0=2):
        return cls("tabulated", k0, horizon, table=tuple(float(v) for v in values))

    def at_dyadic(self, j: int) -> float:
        """``V(T 2**-j)``."""
        if self.kind == "power":
            return self.scale * (self.horizon * 2.0 ** (-j)) ** self.gamma
        return self.table[j] if j < len(self.table) else 0.0

    def __call__(self, u: float) -> float:
        if u <= 0:
            return 0.0
        if self.kind == "power":
            return self.scale * u ** self.gamma
        # step majorant: value at the smallest dyadic gap >= u
        j = math.floor(math.log2(self.horizon / u))
        if self.horizon * 2.0 ** (-j) < u:
            j -= 1
        return self.at_dyadic(max(j, 0))


def default_k0(gamma: float) -> int:
    return max(2, math.floor(1 / gamma) + 1)


def vbar(V: ControlFn, r: int) -> float:
    """The majorant ``Vbar_(k0)(T 2**-r)`` of the dyadic remainder."""
    if r < 0:
        raise ValueError("r must be nonnegative")
    if V.kind == "power":
        return _vbar_power(V, r)
    return _vbar_series(V, r)


def vbar_at(V: ControlFn, u: float) -> float:
    """Step extension: ``Vbar(u) = Vbar(T 2**-r)`` for ``T 2**-(r+1) < u <= T 2**-r``."""
    if u <= 0:
        return 0.0
    r = math.floor(math.log2(V.horizon / u))
    if V.horizon * 2.0 ** (-r) < u:
        r -= 1
    return vbar(V, max(r, 0))


def _vbar_power(V, r):
    if V.scale == 0:
        return 0.0
    g, k0 = V.gamma, V.k0
    c = V.scale * V.horizon ** g
    q = 2.0 ** (1 - k0 * g)
    first = (k0 + 1) * 2 * c * 2.0 ** (-g * r) / (1 - q)
    p = 2.0 ** (1 - k0)
    second = 0.0
    for k in range(k0 + 1):
        pre = c * 2.0 ** (1 - r - k)
        if g == 1:
            # inner sum over l equals 2 L with L = r + m k0 + k
            second += pre * 2 * ((r + k) / (1 - p) + k0 * p / (1 - p) ** 2)
        else:
            rho = 2.0 ** (1 - g)
            lead = 2.0 ** g * rho / (rho - 1)
            second += pre * lead * (rho ** (r + k) / (1 - q) - 1 / (1 - p))
    return first + second


def _vbar_series(V, r):
    """Direct summation of both series, truncated on relative increment."""
    k0 = V.k0
    total = 0.0
    for m in range(MAX_SERIES_TERMS):
        inc = (k0 + 1) * 2.0 ** (m + 1) * V.at_dyadic(r + m * k0)
        for k in range(k0 + 1):
            for l in range(1, r + m * k0 + k + 1):
                v = V.at_dyadic(l - 1)
                if v:
                    inc += 2.0 ** (m + 1 - r - m * k0 - k + l) * v
        total += inc
        exhausted = V.kind == "tabulated" and r + m * k0 >= len(V.table)
        if exhausted and inc <= SERIES_RTOL * total:
            return total
        if V.kind == "power" and m > 0 and inc <= SERIES_RTOL * total:
            return total
    raise NonConvergent(f"Vbar series not converged after {MAX_SERIES_TERMS} terms")


def empirical_control(A: Grid2Fn, k0: int = 2) -> ControlFn:
    """Smallest step modulus with ``|delta A(s,u,t)| <= V(t-s)`` on ordered grid triples."""
    grid = A.grid
    V = A.values.astype(float)
    n = grid.size
    # worst[g] = max |delta A| over ordered triples with t - s == g
    worst = np.zeros(n)
    for s in range(n):
        u = np.arange(s, n)[:, None]
        t = np.arange(s, n)[None, :]
        vals = np.where(t >= u, np.abs(V[s, t] - V[s, u] - V[u, t]), 0.0)
        # the gap t - s depends on the column only
        worst[: n - s] = np.maximum(worst[: n - s], vals.max(axis=0))
    table = []
    for j in range(grid.level + 1):
        table.append(float(worst[: (grid.intervals >> j) + 1].max()))
    return ControlFn.tabulated(table, grid.horizon, k0)


# --------------------------------------------------------------------------
# constants and norms


def constant_c(gamma: float, T: float = 1.0) -> float:
    """Continuity constant of the sewing map at exponent ``gamma``."""
    if not gamma > 0:
        raise ValueError(f"gamma must be positive, got {gamma}")
    if gamma > 1:
        return 1.0 / (2.0 ** gamma - 2.0)
    if gamma == 1:
        return 96.0 / math.log(2.0) * (1.0 + abs(math.log(T)))
    f = math.floor(1 / gamma)
    head = 2.0 ** (gamma + 1) / (1.0 - 2.0 ** (1.0 - gamma * (f + 1)))
    tail = 2.0 + f + 2.0 / ((2.0 ** (1.0 - gamma) - 1.0) * (1.0 - 2.0 ** (-gamma)))
    return head * tail


def log_weighted_norm(R: Grid2Fn) -> float:
    """``sup |R[s,t]| / ((1 + |log|t-s||) |t-s|)`` over pairs ``s != t``."""
    grid = R.grid
    h = np.arange(1, grid.size) * grid.mesh
    weight = np.zeros(grid.size)
    weight[1:] = 1.0 / ((1.0 + np.abs(np.log(h))) * h)
    return pair_sup(R, weight)


# --------------------------------------------------------------------------
# the two sewing constructions


class Sewing(NamedTuple):
    I: Grid1Fn
    R: Grid2Fn


class HighSewing(NamedTuple):
    I: Grid1Fn
    R: Grid2Fn
    refinements: np.ndarray


def u_table(A: Grid2Fn) -> list:
    """The remainder table of the dyadic construction.

    ``table[n][k]`` is the remainder ``I_t - I_s - A_{s,t}``
    on the ``k``-th consecutive interval of the level-``n`` sub-grid,
    the negative of the public ``R = A - delta I``.
    """
    V = A.values
    M = A.grid.level
    zero = V.flat[0] * 0
    u = np.full(1, zero, dtype=V.dtype)
    table = [u]
    for lev in range(1, M + 1):
        step = 1 << (M - lev)
        s = np.arange(1 << (lev - 1)) * 2 * step
        m, e = s + step, s + 2 * step
        half = u / 2
        new = np.empty(2 * len(u), dtype=V.dtype)
        new[0::2] = half
        new[1::2] = half + (V[s, e] - V[s, m] - V[m, e])
        u = new
        table.append(u)
    return table


def sew_low(A: Grid2Fn, gamma: Optional[float] = None, grid: Optional[DyadicGrid] = None) -> Sewing:
    """Dyadic sewing: ``I`` on every grid point and ``R = A - delta I``.

    The construction itself does not depend on ``gamma``; it is accepted for
    symmetry with :func:`sew_high` and validated.  Works for float and
    ``Fraction`` (object) arrays alike.
    """
    if gamma is not None and not gamma > 0:
        raise ValueError(f"gamma must be positive, got {gamma}")
    if grid is not None and grid != A.grid:
        raise LevelMismatch(f"germ lives on {A.grid}, requested {grid}")
    V = A.values
    M = A.grid.level
    table = u_table(A)
    I = np.full(A.grid.size, V.flat[0] * 0, dtype=V.dtype)
    I[-1] = I[0] + V[0, -1] + table[0][0]
    for lev in range(1, M + 1):
        step = 1 << (M - lev)
        s = np.arange(1 << (lev - 1)) * 2 * step
        m = s + step
        I[m] = I[s] + V[s, m] + table[lev][0::2]
    I = Grid1Fn(A.grid, I)
    return Sewing(I, A - delta1(I))


def riemann_refinements(A: Grid2Fn, levels: int, germ=None) -> np.ndarray:
    """Riemann sums of ``A`` over ``[0, t_k]`` along dyadic partitions.

    Row ``m`` uses the partition ``D_m`` of ``[0, t_k]`` completed by ``t_k``.
    Rows beyond the grid level need ``germ`` (anything with
    ``pairs(grid, j, k)``) to evaluate ``A`` on the finer grid.
    """
    grid = A.grid
    M = grid.level
    V = A.values
    k = np.arange(grid.size)
    rows = []
    for m in range(levels + 1):
        if m <= M:
            r = 1 << (M - m)
            starts = np.arange(0, grid.intervals, r)
            cums = np.concatenate([[0.0], np.cumsum(V[starts, starts + r])])
            q = k // r
            tail = np.where(k % r != 0, V[np.minimum(q * r, grid.intervals), k], 0.0)
            rows.append(cums[q] + tail)
        else:
            if germ is None:
                raise LevelMismatch(f"refinement to level {m} > {M} needs a germ")
            fine = grid.at_level(m)
            i = np.arange(fine.intervals)
            cums = np.concatenate([[0.0], np.cumsum(germ.pairs(fine, i, i + 1))])
            rows.append(cums[k << (m - M)])
    return np.array(rows)


def sew_high(
    A: Grid2Fn,
    gamma: float,
    oracle_level: Optional[int] = None,
    germ=None,
    check: bool = True,
    growth_tol: float = 2.0,
) -> HighSewing:
    """Sewing for ``gamma > 1`` as the limit of dyadic Riemann sums.

    ``I`` is the sum at ``oracle_level`` (default: the grid level).  With
    ``check`` the successive differences of the refinement sequence are
    normalised by their theoretical decay ``2**((1-gamma) m)``; growth of the
    normalised sequence by more than ``growth_tol`` between the coarse and the
    fine half of the levels raises :class:`NotConverging`.
    """
    if not gamma > 1:
        raise ValueError(f"sew_high needs gamma > 1, got {gamma}")
    grid = A.grid
    L = grid.level if oracle_level is None else oracle_level
    if L < 0:
        raise ValueError("oracle_level must be nonnegative")
    sums = riemann_refinements(A, L, germ)
    if check and L >= 4:
        _check_refinements(sums, gamma, grid.horizon, growth_tol, A)
    I = Grid1Fn(grid, sums[-1])
    return HighSewing(I, A - delta1(I), sums)


def _check_refinements(sums, gamma, T, growth_tol, A):
    L = len(sums) - 1
    diffs = np.abs(np.diff(sums, axis=0)).max(axis=1)
    m = np.arange(1, L + 1)
    normalised = diffs / (T ** gamma * 2.0 ** ((1 - gamma) * (m - 1)))
    half = (L + 1) // 2
    early, late = normalised[:half].max(), normalised[half:].max()
    atol = 1e-12 * max(1.0, float(np.abs(A.values).max()))
    if late > growth_tol * early + atol:
        raise NotConverging(
            f"Riemann refinements do not decay like 2^((1-gamma)m) for gamma={gamma}: "
            f"normalised increments grow from {early:.3g} to {late:.3g}"
        )


def sew(A: Grid2Fn, gamma: float, **kwargs):
    """Dispatch on ``gamma``: dyadic construction up to 1, Riemann sums above."""
    if gamma > 1:
        return sew_high(A, gamma, **kwargs)
    return sew_low(A, gamma)


def lambda_unordered(A: Grid2Fn, gamma: float, **kwargs) -> Grid2Fn:
    """The sewing map applied to ``delta A``, on every ordered and reversed pair.

    Computed as ``A - delta I`` everywhere; when ``A`` vanishes on the
    diagonal this agrees with ``R[s,t] = -delta A(s,t,s) - R[t,s]`` for
    ``s > t``.
    """
    return sew(A, gamma, **kwargs).R


def integrate(A: Grid2Fn, gamma: float, **kwargs) -> Grid1Fn:
    """The integration map: ``I_0 = 0`` and ``delta I = A - Lambda(delta A)``."""
    return sew(A, gamma, **kwargs).I


# --------------------------------------------------------------------------
# reporting


@dataclass(frozen=True)
class SewingReport:
    gamma: float
    input_c3_norm: float
    output_c2_norm: float
    bound_constant: float
    bound_satisfied: bool
    grid_level: int

    def to_dict(self) -> dict:
        return asdict(self)


def sewing_report(A: Grid2Fn, gamma: float, R: Optional[Grid2Fn] = None, strategy=None, rtol=1e-10):
    """Check ``||Lambda(delta A)|| <= (C_gamma + 1) ||delta A||`` on the grid."""
    if R is None:
        R = lambda_unordered(A, gamma)
    coherence = norm_c3(delta2(A), gamma, strategy=strategy)
    out = log_weighted_norm(R) if gamma == 1 else norm_c2(R, gamma)
    bound = constant_c(gamma, A.grid.horizon) + 1
    tol = rtol * max(1.0, float(np.abs(A.values).max()))
    return SewingReport(
        gamma=float(gamma),
        input_c3_norm=coherence,
        output_c2_norm=out,
        bound_constant=bound,
        bound_satisfied=bool(out <= bound * coherence + tol),
        grid_level=A.grid.level,
    )
