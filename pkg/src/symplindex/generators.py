"""Random test instances: Lagrangians, triangular paths and symplectic matrices."""

from __future__ import annotations

from typing import Sequence

import numpy as np
from scipy.linalg import expm

from ._linalg import unitary_completion, unitary_log
from .maslov import LagrangianPairPath
from .subspace import Subspace
from .symplectic import SymplecticSpace, standard_form
from .triangular import TriangularPath

__all__ = [
    "random_hermitian",
    "random_orthonormal",
    "random_symplectic_matrix",
    "random_lagrangian",
    "random_triangular_path",
    "random_diagonal_path",
    "random_diagonal_triple",
    "random_block_triangular",
    "random_triangular_symplectic_path",
    "random_symplectic_path",
    "random_index_form",
]


def _rng(seed) -> np.random.Generator:
    return seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)


def _gauss(rng, shape, field):
    g = rng.standard_normal(shape)
    if field == "complex":
        g = g + 1j * rng.standard_normal(shape)
    return g


def random_hermitian(n: int, rng=None, field: str = "real") -> np.ndarray:
    g = _gauss(_rng(rng), (n, n), field)
    return 0.5 * (g + g.conj().T)


def random_skew(n: int, rng=None, field: str = "real") -> np.ndarray:
    g = _gauss(_rng(rng), (n, n), field)
    return 0.5 * (g - g.conj().T)


def random_orthonormal(n: int, k: int, rng=None, field: str = "real") -> np.ndarray:
    q, _ = np.linalg.qr(_gauss(_rng(rng), (n, max(k, 1)), field))
    return q[:, :k]


def random_symplectic_matrix(n: int, rng=None, field: str = "real", scale: float = 0.5,
                             form: np.ndarray | None = None) -> np.ndarray:
    """``exp(J H)`` for a random Hermitian ``H``; ``J = Omega^{-1}``."""
    om = standard_form(n) if form is None else np.asarray(form)
    h = random_hermitian(2 * n, rng, field)
    return expm(scale * np.linalg.solve(om, h))


def _graph(n, h, a, field):
    """``{(x, h x + y) : x perp A, y in A}`` with ``a`` an orthonormal basis of A."""
    p = np.eye(n) - a @ a.conj().T
    if a.shape[1] < n:
        comp = np.linalg.svd(p)[0][:, : n - a.shape[1]]
    else:
        comp = np.zeros((n, 0))
    top = np.hstack([comp, np.zeros((n, a.shape[1]))])
    bot = np.hstack([h @ comp, a])
    return np.vstack([top, bot])


def random_lagrangian(n: int, rng=None, field: str = "real", k: int | None = None,
                      form: np.ndarray | None = None) -> Subspace:
    """A random Lagrangian, optionally with ``dim(lam & Y) = k`` in standard coordinates."""
    rng = _rng(rng)
    if k is None:
        k = int(rng.integers(0, n + 1))
    a = random_orthonormal(n, k, rng, field)
    basis = _graph(n, random_hermitian(n, rng, field), a, field)
    lam = Subspace.span(basis, 2 * n, field)
    if form is not None:
        t = _darboux_to(form)
        lam = Subspace.span(t @ lam.basis, 2 * n, field)
    return lam


def _darboux_to(form):
    from .symplectic import darboux_basis

    field = "complex" if np.iscomplexobj(form) else "real"
    return darboux_basis(SymplecticSpace(form, field))


def _restricted_diag(c, vals):
    """Hermitian matrix equal to ``diag(vals)`` on the columns of ``c`` and zero elsewhere."""
    return c @ np.diag(vals) @ c.conj().T


def random_triangular_path(n: int, rng=None, *, field: str = "real", dim_a: int | None = None,
                           dim_b: int | None = None, shared: int = 0, null_start: int = 0,
                           null_end: int = 0, samples: int = 41, general_form: bool = False,
                           spread: float = 3.0) -> TriangularPath:
    """A path ``(lam(s), mu(s))`` in triangular form for the standard splitting.

    ``dim(lam & Y)`` and ``dim(mu & Y)`` are constant. ``shared`` directions of
    ``A = lam & Y`` and ``B = mu & Y`` coincide at both endpoints, and the
    relation form has ``null_start`` / ``null_end`` prescribed zero
    eigenvalues at the endpoints. With ``general_form`` the whole picture is
    moved by a random change of coordinates that turns the standard form into
    a generic one.
    """
    rng = _rng(rng)
    if dim_a is None:
        dim_a = int(rng.integers(0, n // 2 + 1))
    if dim_b is None:
        dim_b = int(rng.integers(0, n // 2 + 1))
    if shared > min(dim_a, dim_b):
        raise ValueError("shared exceeds dim A or dim B")
    if dim_a + dim_b - shared > n:
        raise ValueError("A + B does not fit in Y")
    core = n - (dim_a + dim_b - shared)
    if max(null_start, null_end) > core:
        raise ValueError("too many prescribed zero eigenvalues")

    base = random_orthonormal(n, dim_a + dim_b - shared, rng, field)
    a0 = base[:, :dim_a]
    b0 = np.hstack([base[:, :shared], base[:, dim_a:]])
    k_u = random_skew(n, rng, field)
    k_v = random_skew(n, rng, field)
    h_mu0 = random_hermitian(n, rng, field)
    h_mu1 = random_hermitian(n, rng, field)

    def frames(s):
        u = expm(s * k_u)
        v = expm(np.sin(np.pi * s) * k_v)
        return u @ a0, u @ v @ b0

    def dom(a, b):
        m = np.hstack([a, b])
        if m.shape[1] == 0:
            return np.eye(n, dtype=a.dtype)
        uu, sv, _ = np.linalg.svd(m)
        r = int(np.count_nonzero(sv > 1e-10 * max(1.0, sv[0])))
        return uu[:, r:]

    def endpoint_d(s, nulls):
        c = dom(*frames(s))
        vals = spread * rng.standard_normal(c.shape[1])
        vals[:nulls] = 0.0
        extra = random_hermitian(n, rng, field)
        p = np.eye(n) - c @ c.conj().T
        return _restricted_diag(c, vals) + p @ extra @ p

    d0 = endpoint_d(0.0, null_start)
    d1 = endpoint_d(1.0, null_end)
    mid = spread * random_hermitian(n, rng, field)

    t = None
    form = standard_form(n)
    if general_form:
        g = _gauss(rng, (2 * n, 2 * n), field)
        t = np.eye(2 * n) + 0.3 * g / np.linalg.norm(g, 2)
        t_inv = np.linalg.inv(t)
        form = t_inv.conj().T @ standard_form(n) @ t_inv
        form = 0.5 * (form - form.conj().T)
    space = SymplecticSpace(form, field)

    def move(basis):
        return basis if t is None else t @ basis

    def gen(s):
        a, b = frames(s)
        h_mu = (1 - s) * h_mu0 + s * h_mu1
        d = (1 - s) * d0 + s * d1 + np.sin(np.pi * s) * mid
        lam = _graph(n, h_mu + d, a, field)
        mu = _graph(n, h_mu, b, field)
        return (Subspace.span(move(lam), 2 * n, field), Subspace.span(move(mu), 2 * n, field))

    path = LagrangianPairPath.from_generator(gen, np.linspace(0.0, 1.0, samples), space)
    x = Subspace.span(move(np.vstack([np.eye(n), np.zeros((n, n))])), 2 * n, field)
    y = Subspace.span(move(np.vstack([np.zeros((n, n)), np.eye(n)])), 2 * n, field)
    return TriangularPath(path, x, y)


def _diagonal(n, ell):
    """``ell + ell^perp`` placed in ``X + Y`` of the standard splitting."""
    comp = unitary_completion(ell)[:, ell.shape[1]:]
    top = np.hstack([ell, np.zeros((n, n - ell.shape[1]))])
    bot = np.hstack([np.zeros((n, ell.shape[1])), comp])
    return np.vstack([top, bot])


def _pair_with_overlap(n, dl, dm, shared, rng, field):
    """Orthonormal ``L`` (dim dl), ``M`` (dim dm) with ``dim(L & M) = shared`` generically."""
    base = random_orthonormal(n, dl + dm - shared, rng, field)
    return base[:, :dl], np.hstack([base[:, :shared], base[:, dl:]])


def _rotation_between(m0, m1, rng, field):
    """Unitary ``R`` with ``R m0 = m1`` (as subspaces), ``det R = 1`` in the real case."""
    q0 = unitary_completion(m0)
    q1 = unitary_completion(m1)
    r = q1 @ q0.conj().T
    if field == "real" and np.linalg.det(r) < 0:
        # flipping one column keeps the span of m1
        q1 = q1.copy()
        q1[:, -1] *= -1
        r = q1 @ q0.conj().T
    return r


def random_diagonal_path(n: int, rng=None, *, field: str = "real", dim_l: int | None = None,
                         dim_m: int | None = None, shared_start: int | None = None,
                         shared_end: int | None = None, samples: int = 41,
                         wiggle: float = 1.0) -> TriangularPath:
    """A path of diagonal pairs ``lam = L + L^perp``, ``mu = M + M^perp``.

    ``L(s)`` and ``M(s)`` move inside ``X`` with constant dimensions and
    prescribed overlaps ``dim(L & M)`` at the endpoints.
    """
    rng = _rng(rng)
    if dim_l is None:
        dim_l = int(rng.integers(0, n + 1))
    if dim_m is None:
        dim_m = int(rng.integers(0, n + 1))
    lo = max(0, dim_l + dim_m - n)
    hi = min(dim_l, dim_m)
    if shared_start is None:
        shared_start = int(rng.integers(lo, hi + 1))
    if shared_end is None:
        shared_end = int(rng.integers(lo, hi + 1))
    if not (lo <= shared_start <= hi and lo <= shared_end <= hi):
        raise ValueError("infeasible overlap")
    l0, m0 = _pair_with_overlap(n, dim_l, dim_m, shared_start, rng, field)
    l1, m1 = _pair_with_overlap(n, dim_l, dim_m, shared_end, rng, field)
    kl = unitary_log(_rotation_between(l0, l1, rng, field))
    km = unitary_log(_rotation_between(m0, m1, rng, field))
    kw = random_skew(n, rng, field)
    space = SymplecticSpace(standard_form(n), field)

    def gen(s):
        w = expm(wiggle * np.sin(np.pi * s) * kw)
        ell = w @ expm(s * kl) @ l0
        em = w @ expm(np.sin(np.pi * s) * kw) @ expm(s * km) @ m0
        return (Subspace.span(_diagonal(n, ell), 2 * n, field),
                Subspace.span(_diagonal(n, em), 2 * n, field))

    path = LagrangianPairPath.from_generator(gen, np.linspace(0.0, 1.0, samples), space)
    x = Subspace.span(np.vstack([np.eye(n), np.zeros((n, n))]), 2 * n, field)
    y = Subspace.span(np.vstack([np.zeros((n, n)), np.eye(n)]), 2 * n, field)
    return TriangularPath(path, x, y)


def random_diagonal_triple(n: int, rng=None, *, field: str = "real", dim_l: int | None = None,
                           shared: int | None = None):
    """Diagonal Lagrangians ``lam, mu, V`` with ``lam + V = mu + V`` direct.

    Returns ``(space, X, Y, lam, mu, V)`` in the standard splitting.
    """
    rng = _rng(rng)
    if dim_l is None:
        dim_l = int(rng.integers(0, n + 1))
    lo = max(0, 2 * dim_l - n)
    if shared is None:
        shared = int(rng.integers(lo, dim_l + 1))
    ell, em = _pair_with_overlap(n, dim_l, dim_l, shared, rng, field)
    nv = random_orthonormal(n, n - dim_l, rng, field)
    space = SymplecticSpace(standard_form(n), field)
    x = Subspace.span(np.vstack([np.eye(n), np.zeros((n, n))]), 2 * n, field)
    y = Subspace.span(np.vstack([np.zeros((n, n)), np.eye(n)]), 2 * n, field)
    sub = [Subspace.span(_diagonal(n, b), 2 * n, field) for b in (ell, em, nv)]
    return (space, x, y, *sub)


def _complete_triangular(a, s, oc, kind):
    """Symplectic block-triangular matrix with diagonal block ``a`` and Hermitian ``s``.

    The form is ``[[0, oc], [-oc^H, 0]]``; ``D = oc^-1 a^-H oc`` and the off
    block makes ``D^H oc^H B`` (upper) or ``A^H oc C`` (lower) equal to ``s``.
    """
    n = a.shape[0]
    d = np.linalg.solve(oc, np.linalg.inv(a).conj().T @ oc)
    z = np.zeros((n, n), dtype=np.result_type(a, s, oc))
    if kind == "upper":
        b = np.linalg.solve(d.conj().T @ oc.conj().T, s)
        return np.block([[a, b], [z, d]])
    c = np.linalg.solve(a.conj().T @ oc, s)
    return np.block([[a, z], [c, d]])


def _sesquilinear_space(n, rng, field, general):
    """A form ``[[0, oc], [-oc^H, 0]]`` moved by a random change of coordinates."""
    if general:
        # perturbations of norm about 1 keep oc and t well conditioned
        oc = 2 * np.eye(n) + 0.5 * _gauss(rng, (n, n), field) / np.sqrt(n)
        t = np.eye(2 * n) + 0.3 * _gauss(rng, (2 * n, 2 * n), field) / np.sqrt(2 * n)
    else:
        oc = -np.eye(n)
        t = np.eye(2 * n)
    zero = np.zeros((n, n))
    base = np.block([[zero, oc], [-oc.conj().T, zero]])
    t_inv = np.linalg.inv(t)
    form = t_inv.conj().T @ base @ t_inv
    form = 0.5 * (form - form.conj().T)
    space = SymplecticSpace(form, field)
    x = Subspace.span(t[:, :n], 2 * n, field)
    y = Subspace.span(t[:, n:], 2 * n, field)
    return space, x, y, oc, t


def _spectrum_block(n, rng, field, unit):
    """Matrix with the unit-circle eigenvalues ``unit`` (closed under conjugation when real)."""
    blocks = []
    used = 0
    for z in unit:
        z = complex(z)
        if field == "real" and abs(z.imag) > 1e-12:
            if z.imag < 0:
                continue
            c, s = z.real, z.imag
            blocks.append(np.array([[c, -s], [s, c]]))
            used += 2
        else:
            blocks.append(np.array([[z.real if field == "real" else z]]))
            used += 1
    if used > n:
        raise ValueError("too many prescribed eigenvalues")
    rest = n - used
    if rest:
        # keep the remaining spectrum off the unit circle
        sv = np.exp(rng.uniform(0.3, 1.0, rest) * rng.choice([-1, 1], rest))
        blocks.append(np.diag(sv * rng.choice([-1, 1], rest)))
    out = np.zeros((n, n), dtype=np.complex128 if field == "complex" else float)
    i = 0
    for b in blocks:
        k = b.shape[0]
        out[i:i + k, i:i + k] = b
        i += k
    if rest:
        out[n - rest:, n - rest:] += np.triu(0.3 * _gauss(rng, (rest, rest), field), 1)
    v = np.eye(n) + 0.25 * _gauss(rng, (n, n), field) / np.sqrt(n)
    return v @ out @ np.linalg.inv(v)


def random_block_triangular(n: int, rng=None, *, field: str = "real", kind: str = "upper",
                            unit: Sequence | None = None, general_form: bool = False):
    """A block-triangular symplectic matrix with prescribed unit-circle eigenvalues of ``A``.

    Returns ``(space, X, Y, M)``; ``M`` is triangular for the splitting ``X + Y``.
    """
    rng = _rng(rng)
    if unit is None:
        unit = []
    space, x, y, oc, t = _sesquilinear_space(n, rng, field, general_form)
    a = _spectrum_block(n, rng, field, unit)
    s = 2.0 * random_hermitian(n, rng, field)
    blocks = _complete_triangular(a, s, oc, kind)
    m = t @ blocks @ np.linalg.inv(t)
    return space, x, y, m


def random_triangular_symplectic_path(n: int, rng=None, *, field: str = "real", kind: str = "upper",
                                      samples: int = 33, general_form: bool = False):
    """A path ``s -> M(s)`` on ``[0, 1]`` of block-triangular symplectic matrices.

    Returns ``(SymplecticPath, X, Y)``.
    """
    from .spgroup import SymplecticPath

    rng = _rng(rng)
    space, x, y, oc, t = _sesquilinear_space(n, rng, field, general_form)
    t_inv = np.linalg.inv(t)
    a0 = np.eye(n) + 0.5 * _gauss(rng, (n, n), field) / np.sqrt(n)
    ka = 0.8 * _gauss(rng, (n, n), field) / np.sqrt(n)
    s0 = 2.0 * random_hermitian(n, rng, field)
    s1 = 2.0 * random_hermitian(n, rng, field)
    s_mid = 2.0 * random_hermitian(n, rng, field)

    def gen(s):
        a = a0 @ expm(s * ka)
        herm = (1 - s) * s0 + s * s1 + np.sin(np.pi * s) * s_mid
        return t @ _complete_triangular(a, herm, oc, kind) @ t_inv

    path = SymplecticPath.from_function(space, gen, np.linspace(0.0, 1.0, samples))
    return path, x, y


def random_symplectic_path(n: int, rng=None, *, field: str = "real", samples: int = 33,
                           pieces: int = 2, scale: float = 1.5, from_identity: bool = True):
    """A product of exponentials ``exp(t J H_1) ... exp(t J H_p)`` on ``[0, 1]``.

    With ``from_identity=False`` the path is multiplied by a random symplectic
    matrix on the left.
    """
    from .spgroup import SymplecticPath

    rng = _rng(rng)
    space = SymplecticSpace(standard_form(n), field)
    j = np.linalg.inv(standard_form(n))
    gens = [scale * j @ random_hermitian(2 * n, rng, field) for _ in range(pieces)]
    left = np.eye(2 * n) if from_identity else random_symplectic_matrix(n, rng, field, 0.7)

    def gen(t):
        out = left
        for g in gens:
            out = out @ expm(t * g)
        return out

    return SymplecticPath.from_function(space, gen, np.linspace(0.0, 1.0, samples))


def random_index_form(n: int, rng=None, *, field: str = "real", holonomy: str = "random", samples: int = 9,
                      depth: tuple[float, float] = (5.0, 40.0)):
    """Smooth periodic-in-``t`` coefficients with ``p > 0`` and a negative shift of ``r``.

    ``holonomy`` is ``"random"``, ``"identity"``, ``"minus_identity"`` or
    ``"reflection"`` (a real ``a`` with ``det a < 0``).
    """
    from .morse_oracle import IndexFormData

    rng = _rng(rng)
    ts = np.linspace(0.0, 1.0, samples)

    def smooth(scale):
        c = scale * _gauss(rng, (3, n, n), field)
        return np.array([c[0] + np.sin(2 * np.pi * t) * c[1] + np.cos(2 * np.pi * t) * c[2] for t in ts])

    g = smooth(0.3)
    p = np.eye(n) + g @ np.conj(np.swapaxes(g, 1, 2))
    q = smooth(0.5)
    r = smooth(3.0)
    r = 0.5 * (r + np.conj(np.swapaxes(r, 1, 2))) - rng.uniform(*depth) * np.eye(n)
    if holonomy == "identity":
        a = np.eye(n)
    elif holonomy == "minus_identity":
        a = -np.eye(n)
    elif holonomy == "reflection":
        a = np.eye(n) + 0.3 * rng.standard_normal((n, n))
        if np.linalg.det(a) > 0:
            a[:, 0] *= -1
    elif holonomy == "random":
        u = random_orthonormal(n, n, rng, field)
        v = random_orthonormal(n, n, rng, field)
        a = (u * np.exp(rng.uniform(-0.7, 0.7, n))) @ v.conj().T
    else:
        raise ValueError(f"unknown holonomy {holonomy!r}")
    return IndexFormData(ts, p, q, r, a)
