"""Small dense linear algebra helpers."""

from __future__ import annotations

import numpy as np
from scipy.linalg import schur

__all__ = ["unitary_log", "unitary_completion"]


def unitary_log(r: np.ndarray) -> np.ndarray:
    """Skew-Hermitian ``K`` with ``exp(K) = r`` for unitary ``r``.

    Real orthogonal input with ``det r = +1`` yields a real ``K``; the
    eigenvalue ``-1`` (even multiplicity) is paired into rotations by ``pi``.
    """
    r = np.asarray(r)
    if np.iscomplexobj(r):
        t, z = schur(r, output="complex")
        theta = np.angle(np.diag(t))
        return (z * (1j * theta)) @ z.conj().T
    if np.linalg.det(r) < 0:
        raise ValueError("real orthogonal matrix with negative determinant has no real logarithm")
    t, z = schur(r, output="real")
    n = r.shape[0]
    k = np.zeros((n, n))
    minus = []
    i = 0
    while i < n:
        if i + 1 < n and abs(t[i + 1, i]) > 1e-12:
            th = np.arctan2(t[i + 1, i], t[i, i])
            k[i, i + 1], k[i + 1, i] = -th, th
            i += 2
            continue
        if t[i, i] < 0:
            minus.append(i)
        i += 1
    for a, b in zip(minus[::2], minus[1::2]):
        k[a, b], k[b, a] = -np.pi, np.pi
    return z @ k @ z.T


def unitary_completion(q: np.ndarray) -> np.ndarray:
    """Extend orthonormal columns ``q`` to a square unitary matrix."""
    n, k = q.shape
    if k == n:
        return q
    u = np.linalg.svd(q, full_matrices=True)[0]
    return np.hstack([q, u[:, k:]])
