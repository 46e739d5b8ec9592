"""Pure numpy versions of the compiled kernels in ``_kernels.pyx``."""

from __future__ import annotations

import numpy as np

# three-point Gauss-Legendre rule on [-1, 1]
GAUSS_NODES = np.array([-np.sqrt(0.6), 0.0, np.sqrt(0.6)])
GAUSS_WEIGHTS = np.array([5.0, 8.0, 5.0]) / 9.0

# two-stage Gauss-Legendre collocation tableau
_S3 = np.sqrt(3.0) / 6.0
GL2_C = np.array([0.5 - _S3, 0.5 + _S3])
GL2_A = np.array([[0.25, 0.25 - _S3], [0.25 + _S3, 0.25]])


def assemble_p1(p: np.ndarray, q: np.ndarray, r: np.ndarray, h: float):
    """Block-tridiagonal stiffness of a first-order index form on hat functions.

    Parameters
    ----------
    p, q, r : ndarray, shape (E, 3, n, n)
        Coefficients at the three Gauss points of each of the ``E`` elements.
    h : float
        Element length.

    Returns
    -------
    diag : ndarray, shape (E + 1, n, n)
    upper : ndarray, shape (E, n, n)
        ``upper[e]`` is the block coupling test node ``e`` with trial node ``e + 1``.
    """
    p = np.asarray(p, dtype=np.complex128)
    q = np.asarray(q, dtype=np.complex128)
    r = np.asarray(r, dtype=np.complex128)
    e_count, _, n, _ = p.shape
    w = GAUSS_WEIGHTS * (0.5 * h)
    phi = np.stack([(1.0 - GAUSS_NODES) / 2.0, (1.0 + GAUSS_NODES) / 2.0])  # (2, 3)
    dphi = np.array([-1.0 / h, 1.0 / h])
    qh = np.conj(np.swapaxes(q, -1, -2))

    def local(b, a):
        coef = (w * dphi[b] * dphi[a])[None, :, None, None] * p
        coef = coef + (w * dphi[b] * phi[a])[None, :, None, None] * q
        coef = coef + (w * phi[b] * dphi[a])[None, :, None, None] * qh
        coef = coef + (w * phi[b] * phi[a])[None, :, None, None] * r
        return coef.sum(axis=1)

    diag = np.zeros((e_count + 1, n, n), dtype=np.complex128)
    diag[:-1] += local(0, 0)
    diag[1:] += local(1, 1)
    upper = local(0, 1)
    return diag, upper


def gl2_propagate(a1: np.ndarray, a2: np.ndarray, h: float, omega: np.ndarray,
                  project_every: int, record_every: int) -> np.ndarray:
    """Propagate ``U' = A(t) U`` from ``U(0) = I`` with two-stage Gauss collocation.

    Parameters
    ----------
    a1, a2 : ndarray, shape (N, d, d)
        ``A`` at the two collocation times of each step.
    h : float
        Step length.
    omega : ndarray, shape (d, d)
        Structure preserved by the flow; every ``project_every`` steps the
        state is pulled back towards ``U^H omega U = omega``.
    record_every : int
        Stride of recorded states; the output starts with the identity.
    """
    a1 = np.asarray(a1, dtype=np.complex128)
    a2 = np.asarray(a2, dtype=np.complex128)
    steps, d, _ = a1.shape
    omega = np.asarray(omega, dtype=np.complex128)
    omega_inv = np.linalg.inv(omega)
    eye = np.eye(d)
    u = np.eye(d, dtype=np.complex128)
    out = [u.copy()]
    system = np.empty((2 * d, 2 * d), dtype=np.complex128)
    for i in range(steps):
        system[:d, :d] = eye - h * GL2_A[0, 0] * a1[i]
        system[:d, d:] = -h * GL2_A[0, 1] * a1[i]
        system[d:, :d] = -h * GL2_A[1, 0] * a2[i]
        system[d:, d:] = eye - h * GL2_A[1, 1] * a2[i]
        k = np.linalg.solve(system, np.vstack([a1[i], a2[i]]))
        u = (eye + 0.5 * h * (k[:d] + k[d:])) @ u
        if project_every and (i + 1) % project_every == 0:
            err = u.conj().T @ omega @ u - omega
            u = u @ (eye - 0.5 * omega_inv @ err)
        if (i + 1) % record_every == 0:
            out.append(u.copy())
    return np.array(out)
