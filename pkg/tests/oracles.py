"""Slow, loop-based reference implementations used only as test oracles.

They follow the index definitions term by term and share no code with the package.
"""
import itertools

import numpy as np


def kn_loop(E, T):
    n = E.shape[0]
    out = np.zeros((n,) * 4)
    for a, b, c, d in itertools.product(range(n), repeat=4):
        out[a, b, c, d] = (E[a, d] * T[b, c] + E[b, c] * T[a, d]
                           - E[a, c] * T[b, d] - E[b, d] * T[a, c])
    return out


def tachibana_loop(A, T):
    """Q(A,T)_{i1..ik l m} = sum_s A_{i_s l} T(.., m at s, ..) - A_{i_s m} T(.., l at s, ..)."""
    n = A.shape[0]
    k = T.ndim
    out = np.zeros((n,) * (k + 2))
    for idx in itertools.product(range(n), repeat=k + 2):
        *ii, l, m = idx
        acc = 0.0
        for s in range(k):
            jm = list(ii)
            jm[s] = m
            jl = list(ii)
            jl[s] = l
            acc += A[ii[s], l] * T[tuple(jm)] - A[ii[s], m] * T[tuple(jl)]
        out[idx] = acc
    return out


def action_loop(B, gi, T):
    """(B.T)_{i1..ik l m} = sum_s g^{pq} T(.., p at s, ..) B_{q i_s l m}."""
    n = gi.shape[0]
    k = T.ndim
    out = np.zeros((n,) * (k + 2))
    for idx in itertools.product(range(n), repeat=k + 2):
        *ii, l, m = idx
        acc = 0.0
        for s in range(k):
            for p in range(n):
                for q in range(n):
                    if gi[p, q] == 0.0:
                        continue
                    jp = list(ii)
                    jp[s] = p
                    acc += gi[p, q] * T[tuple(jp)] * B[q, ii[s], l, m]
        out[idx] = acc
    return out


def christoffel_fd(metric, x, h=1e-5):
    """Gamma[m,i,j] from central differences of the metric."""
    n = x.size
    dg = np.zeros((n, n, n))
    for c in range(n):
        e = np.zeros(n)
        e[c] = h
        dg[c] = (metric(x + e) - metric(x - e)) / (2 * h)
    gi = np.linalg.inv(metric(x))
    low = np.zeros((n, n, n))
    for k, i, j in itertools.product(range(n), repeat=3):
        low[k, i, j] = 0.5 * (dg[i, k, j] + dg[j, k, i] - dg[k, i, j])
    return np.einsum("mk,kij->mij", gi, low)


def sphere_metric(x):
    """Round unit sphere metric in hyperspherical coordinates."""
    m = x.size
    diag = [1.0]
    acc = 1.0
    for j in range(m - 1):
        acc *= np.sin(x[j]) ** 2
        diag.append(acc)
    return np.diag(diag)
