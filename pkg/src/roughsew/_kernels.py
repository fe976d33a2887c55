"""Compiled triple loops.

Everything indexed by three grid times goes through here: coherence norms and
Chen defects are both suprema of

    |A[s,t] - A[s,u] - A[u,t] - sum_k P[k,s,u] * Q[k,u,t]| * weight[gap]

over a set of index triples.  Triples are streamed, never stored.
"""
import numpy as np
from numba import njit

ORDERED = 0
UNORDERED = 1


@njit(cache=True)
def _triple_sup(A, P, Q, weight, mode):
    n = A.shape[0]
    K = P.shape[0]
    best = 0.0
    bs, bu, bt = -1, -1, -1
    for s in range(n):
        u0 = s if mode == ORDERED else 0
        for u in range(u0, n):
            t0 = u if mode == ORDERED else 0
            a_su = A[s, u]
            for t in range(t0, n):
                if mode == ORDERED:
                    g = t - s
                else:
                    g1 = t - u if t >= u else u - t
                    g2 = u - s if u >= s else s - u
                    g = g1 if g1 > g2 else g2
                if g == 0:
                    continue
                b = A[s, t] - a_su - A[u, t]
                for k in range(K):
                    b -= P[k, s, u] * Q[k, u, t]
                r = abs(b) * weight[g]
                if r > best:
                    best = r
                    bs, bu, bt = s, u, t
    return best, bs, bu, bt


def triple_sup(A, P=None, Q=None, weight=None, ordered=False):
    """Return ``(sup, (s, u, t))`` over all admissible index triples.

    ``weight[g]`` multiplies a triple whose gap index is ``g``; the gap is
    ``t - s`` for ordered triples and ``max(|t-u|, |u-s|)`` otherwise.
    Triples with gap zero are skipped.
    """
    A = np.ascontiguousarray(A, dtype=np.float64)
    n = A.shape[0]
    if P is None:
        P = np.zeros((0, n, n))
        Q = np.zeros((0, n, n))
    if weight is None:
        weight = np.ones(n)
    best, s, u, t = _triple_sup(
        A,
        np.ascontiguousarray(P, dtype=np.float64),
        np.ascontiguousarray(Q, dtype=np.float64),
        np.ascontiguousarray(weight, dtype=np.float64),
        ORDERED if ordered else UNORDERED,
    )
    return float(best), (int(s), int(u), int(t))
