"""Maslov-type indices of symplectic paths, splitting numbers, iteration and mod 2.

A symplectic ``M`` on ``(V, omega)`` is read through its graph
``Gr(M) = {(x, M x)}``, a Lagrangian of ``V x V`` with the form
``(-omega) + omega``. The Maslov-type index against a Lagrangian ``W`` of the
product is the Maslov index of the pair path ``(Gr(gamma(t)), W)``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.linalg import expm, polar, schur

from ._config import get_tolerances
from .maslov import LagrangianPairPath, maslov_index
from .quadform import morse
from .subspace import Subspace, decode_matrix, encode_matrix, intersect, null_space
from .symplectic import SymplecticSpace, darboux_basis, standard_form

__all__ = [
    "NotSymplectic",
    "NotTriangular",
    "NoEigenGap",
    "SymplecticPath",
    "MaslovTypeResult",
    "SplittingReport",
    "IterationReport",
    "Mod2Report",
    "product_space",
    "graph_lagrangian",
    "diagonal_lagrangian",
    "split_lagrangian",
    "block_form",
    "maslov_type_index",
    "maslov_type_triangular",
    "splitting_numbers",
    "path_from_identity",
    "iteration_path",
    "iteration_index",
    "f_value",
    "iterate",
    "power_closed_form",
    "f_closed_form",
    "hyperbolic_index",
    "tilde_alpha",
    "d_z",
    "elliptic_pairs",
    "mod2_index",
]

_ORACLE_SAMPLES = 32
_CLUSTER = 1e-5


class NotSymplectic(ValueError):
    pass


class NotTriangular(ValueError):
    pass


class NoEigenGap(RuntimeError):
    """The spectrum near ``z`` cannot be separated from ``z`` itself."""


def _check_symplectic(space: SymplecticSpace, m: np.ndarray, what: str = "matrix") -> None:
    if m.shape != (space.dim, space.dim):
        raise ValueError(f"{what} has shape {m.shape}, expected {(space.dim, space.dim)}")
    if not space.is_symplectic_matrix(m):
        raise NotSymplectic(f"{what} is not symplectic")


def product_space(space: SymplecticSpace) -> SymplecticSpace:
    """``(V x V, (-omega) + omega)``."""
    om = space.form
    z = np.zeros_like(om)
    return SymplecticSpace(np.block([[-om, z], [z, om]]), space.field)


def graph_lagrangian(space: SymplecticSpace, m, check: bool = True) -> Subspace:
    """``Gr(M) = {(x, M x)}`` as a Lagrangian of the product space."""
    m = np.asarray(m)
    if check:
        _check_symplectic(space, m)
    field = "complex" if (space.field == "complex" or np.iscomplexobj(m)) else "real"
    # with M = U S V^H the columns (v_j, s_j u_j) are already orthogonal
    u, sv, vh = np.linalg.svd(m)
    c = 1.0 / np.sqrt(1.0 + sv**2)
    basis = np.vstack([vh.conj().T * c, u * (sv * c)])
    return Subspace(basis, field, _trusted=True)


def diagonal_lagrangian(space: SymplecticSpace) -> Subspace:
    return graph_lagrangian(space, np.eye(space.dim), check=False)


# block coordinates ---------------------------------------------------------

@dataclass(frozen=True)
class _Blocks:
    t: np.ndarray
    t_inv: np.ndarray
    omega_c: np.ndarray
    n: int

    def split(self, m: np.ndarray):
        mm = self.t_inv @ m @ self.t
        n = self.n
        return mm[:n, :n], mm[:n, n:], mm[n:, :n], mm[n:, n:]


def _blocks(space: SymplecticSpace, x: Subspace, y: Subspace) -> _Blocks:
    if not (space.is_lagrangian(x) and space.is_lagrangian(y)):
        raise ValueError("X and Y must be Lagrangian")
    t = np.hstack([x.basis, y.basis])
    if np.linalg.matrix_rank(t) < space.dim:
        raise ValueError("X and Y are not transversal")
    omega_c = x.basis.conj().T @ space.form @ y.basis
    return _Blocks(t, np.linalg.inv(t), omega_c, space.n)


def block_form(space: SymplecticSpace, x: Subspace, y: Subspace, m) -> tuple:
    """Blocks ``(A, B, C, D)`` of ``M`` and the pairing ``Omega_c`` of ``X`` with ``Y``.

    Coordinates are the bases of ``X`` and ``Y``; ``omega`` then reads
    ``Omega_c(x1, y2) - conj(Omega_c(x2, y1))`` with ``Omega_c(a, b) = a^H Omega_c b``.
    """
    b = _blocks(space, x, y)
    return (*b.split(np.asarray(m)), b.omega_c)


def split_lagrangian(space: SymplecticSpace, x: Subspace, y: Subspace, r1, r2) -> Subspace:
    """``W = R1 + R2`` with ``R1`` in ``X x X`` and ``R2`` in ``Y x Y``.

    ``r1`` and ``r2`` are given in block coordinates (``2n``-row bases in the
    coordinates of ``X`` resp. ``Y``, first factor on top).
    """
    b = _blocks(space, x, y)
    n = b.n
    r1 = np.asarray(r1)
    r2 = np.asarray(r2)
    z1 = np.zeros((n, r1.shape[1]))
    z2 = np.zeros((n, r2.shape[1]))
    top = np.hstack([b.t @ np.vstack([r1[:n], z1]), b.t @ np.vstack([z2, r2[:n]])])
    bot = np.hstack([b.t @ np.vstack([r1[n:], z1]), b.t @ np.vstack([z2, r2[n:]])])
    field = "complex" if any(np.iscomplexobj(v) for v in (top, bot)) or space.field == "complex" else "real"
    return Subspace.span(np.vstack([top, bot]), 2 * space.dim, field)


# paths ---------------------------------------------------------------------

MatrixGenerator = Callable[[float], np.ndarray]


class SymplecticPath:
    """Samples ``(t_i, gamma_i)`` of a path of symplectic matrices.

    ``generator`` (``t -> matrix``) lets the Maslov engine insert samples.
    """

    def __init__(self, space: SymplecticSpace, samples: Sequence[tuple], generator: MatrixGenerator | None = None,
                 validate: bool = True):
        if len(samples) < 1:
            raise ValueError("a path needs at least one sample")
        ts = np.array([float(s[0]) for s in samples])
        if np.any(np.diff(ts) <= 0):
            raise ValueError("sample parameters must be strictly increasing")
        self.space = space
        self.params = ts
        self.mats = [np.asarray(s[1]) for s in samples]
        self.generator = generator
        if validate:
            for i, m in enumerate(self.mats):
                _check_symplectic(space, m, f"gamma at sample {i} (t={ts[i]:g})")

    @classmethod
    def from_function(cls, space: SymplecticSpace, fn: MatrixGenerator, ts) -> SymplecticPath:
        return cls(space, [(float(t), fn(float(t))) for t in ts], fn)

    def __len__(self) -> int:
        return len(self.params)

    @property
    def start(self) -> np.ndarray:
        return self.mats[0]

    @property
    def end(self) -> np.ndarray:
        return self.mats[-1]

    @property
    def starts_at_identity(self) -> bool:
        d = self.space.dim
        return np.linalg.norm(self.mats[0] - np.eye(d), 2) <= get_tolerances().sp * d

    def map(self, fn: Callable[[np.ndarray], np.ndarray]) -> SymplecticPath:
        """Pointwise image ``t -> fn(gamma(t))`` (``fn`` must keep symplecticity)."""
        gen = None
        if self.generator is not None:
            g = self.generator
            gen = lambda t: fn(g(t))  # noqa: E731
        return SymplecticPath(self.space, [(t, fn(m)) for t, m in zip(self.params, self.mats)], gen,
                              validate=False)

    def pair_path(self, w: Subspace, complexify: bool = True) -> LagrangianPairPath:
        """``t -> (Gr(gamma(t)), W)`` in the product space."""
        prod = product_space(self.space)
        if complexify:
            prod = prod.as_complex()
            w = w.as_complex()

        def graph(m):
            g = graph_lagrangian(self.space, m, check=False)
            return g.as_complex() if complexify else g

        gen = None
        if self.generator is not None:
            g0 = self.generator
            gen = lambda t: (graph(g0(t)), w)  # noqa: E731
        samples = [(t, graph(m), w) for t, m in zip(self.params, self.mats)]
        return LagrangianPairPath(prod, samples, gen, validate=False)

    def to_json(self) -> dict:
        return {"space": self.space.to_json(),
                "samples": [{"t": float(t), "M": encode_matrix(m)} for t, m in zip(self.params, self.mats)]}

    @classmethod
    def from_json(cls, obj: dict) -> SymplecticPath:
        space = SymplecticSpace.from_json(obj["space"]) if "space" in obj else None
        samples = [(float(r["t"]), decode_matrix(r["M"])) for r in obj["samples"]]
        if space is None:
            space = SymplecticSpace.standard(samples[0][1].shape[0] // 2,
                                             "complex" if np.iscomplexobj(samples[0][1]) else "real")
        return cls(space, samples)

    @classmethod
    def loads(cls, text: str) -> SymplecticPath:
        return cls.from_json(json.loads(text))


@dataclass
class MaslovTypeResult:
    i_plus: int
    i_minus: int
    nullities: list[int]
    params: list[float] = field(default_factory=list)

    def __iter__(self):
        return iter((self.i_plus, self.i_minus))


def maslov_type_index(path: SymplecticPath, w: Subspace | None = None) -> MaslovTypeResult:
    """``i_{+-,W}(gamma) = Mas+-{Gr(gamma), W}`` with ``W`` the diagonal by default.

    ``nullities`` are ``dim(Gr(gamma(t)) & W)`` at the samples actually used.
    """
    if w is None:
        w = diagonal_lagrangian(path.space)
    prod = product_space(path.space)
    if not prod.is_lagrangian(w):
        raise ValueError("W is not Lagrangian in the product space")
    res = maslov_index(path.pair_path(w))
    return MaslovTypeResult(res.mas_plus, res.mas_minus, res.intersection_dims, res.params)


def _i1(space: SymplecticSpace, fn: MatrixGenerator, t0: float, t1: float, samples: int) -> MaslovTypeResult:
    p = SymplecticPath.from_function(space, fn, np.linspace(t0, t1, samples))
    return maslov_type_index(p)


# triangular Maslov-type formula ----------------------------------------------

def _triangularity(blocks, m, scale) -> str:
    a, b, c, d = blocks.split(m)
    tol = get_tolerances().sp * scale
    cz = np.linalg.norm(c, 2) <= tol
    bz = np.linalg.norm(b, 2) <= tol
    if cz and bz:
        return "diagonal"
    if cz:
        return "upper"
    if bz:
        return "lower"
    return "none"


def _graph_dim(m: np.ndarray, r: Subspace) -> int:
    g = Subspace.span(np.vstack([np.eye(m.shape[0]), m]), 2 * m.shape[0], r.field)
    return intersect(g, r).dim


def _domain(m: np.ndarray, r: Subspace) -> np.ndarray:
    """Orthonormal basis of ``{v : (v, m v) in r}``."""
    k = m.shape[0]
    proj = np.eye(2 * k) - r.projector()
    return null_space(proj @ np.vstack([np.eye(k), m]), scale=max(1.0, np.linalg.norm(m, 2)))


def _coord_diagonal(n: int, field: str) -> Subspace:
    return Subspace.span(np.vstack([np.eye(n), np.eye(n)]), 2 * n, field)


def maslov_type_triangular(path: SymplecticPath, x: Subspace, y: Subspace, r1=None, r2=None) -> MaslovTypeResult:
    """Maslov-type index of a block-triangular path from endpoint data.

    ``r1`` and ``r2`` are bases of ``R1 in X x X`` and ``R2 in Y x Y`` in block
    coordinates; the default is the diagonal, i.e. ``W`` the diagonal of
    ``V x V``. Upper-triangular paths use the form
    ``g(y1, y2) = conj(Omega_c(B y2, D y1))`` on ``{y : (y, D y) in R2}``,
    lower-triangular paths ``h(x1, x2) = Omega_c(A x1, C x2)`` on
    ``{x : (x, A x) in R1}``.
    """
    space = path.space
    blk = _blocks(space, x, y)
    n = blk.n
    field = "complex"
    r1s = _coord_diagonal(n, field) if r1 is None else Subspace.span(np.asarray(r1), 2 * n, field)
    r2s = _coord_diagonal(n, field) if r2 is None else Subspace.span(np.asarray(r2), 2 * n, field)
    kinds = set()
    for i, m in enumerate(path.mats):
        kind = _triangularity(blk, m, max(1.0, np.linalg.norm(m, 2)))
        if kind == "none":
            raise NotTriangular(f"sample {i} is neither upper nor lower triangular")
        kinds.add(kind)
    kinds.discard("diagonal")
    if len(kinds) > 1:
        raise NotTriangular("path mixes upper and lower triangular samples")
    kind = kinds.pop() if kinds else "upper"
    oc = blk.omega_c

    def data(m):
        a, b, c, d = blk.split(m)
        if kind == "upper":
            eta = _domain(d, r2s)
            g = eta.conj().T @ d.conj().T @ oc.conj().T @ b @ eta
            return _graph_dim(a, r1s), morse(g)
        xi = _domain(a, r1s)
        h = xi.conj().T @ a.conj().T @ oc @ c @ xi
        return _graph_dim(d, r2s), morse(h)

    nulls = []
    for m in path.mats:
        dd, mi = data(m)
        nulls.append(dd + mi.m_zero)
    d0, q0 = data(path.mats[0])
    d1, q1 = data(path.mats[-1])
    if kind == "upper":
        plus = d0 - d1 + q1.m_minus - q0.m_minus
        minus = -d0 + d1 - q1.m_plus + q0.m_plus
    else:
        plus = d0 - d1 + q1.m_plus - q0.m_plus
        minus = -d0 + d1 - q1.m_minus + q0.m_minus
    return MaslovTypeResult(plus, minus, nulls, [float(t) for t in path.params])


# splitting numbers ---------------------------------------------------------

@dataclass(frozen=True)
class SplittingReport:
    """``s_minus_pair = (S+, S-)`` and ``s_plus_pair = (S+_+, S-_+)`` at ``z``."""

    z: complex
    s_minus_pair: tuple[int, int]
    s_plus_pair: tuple[int, int]
    method: str
    nullity: int

    def to_json(self) -> dict:
        return {"z": [self.z.real, self.z.imag], "S_minus": list(self.s_minus_pair),
                "S_plus": list(self.s_plus_pair), "method": self.method, "nullity": self.nullity}


def _unit(z) -> complex:
    z = complex(z)
    if abs(abs(z) - 1.0) > 1e-12:
        raise ValueError(f"z = {z} is not on the unit circle")
    return z / abs(z)


def _kernel_dim(m: np.ndarray) -> int:
    return null_space(m, scale=max(1.0, np.linalg.norm(m, 2))).shape[1]


def _gap_angle(m: np.ndarray, z: complex) -> float:
    """Half the angular distance from ``z`` to the rest of the unit-circle spectrum."""
    ev = np.linalg.eigvals(m)
    rho = max(1.0, float(np.abs(ev).max()))
    near = np.abs(np.abs(ev) - 1.0) <= 1e-6 * rho
    ang = np.abs(np.angle(ev[near] / z))
    others = ang[np.abs(ev[near] - z) > _CLUSTER * rho]
    if others.size and others.min() <= 10 * _CLUSTER:
        raise NoEigenGap(f"eigenvalues accumulate at z = {z}")
    return 0.5 * float(others.min()) if others.size else np.pi


def splitting_numbers(space: SymplecticSpace, m, z, method: str = "oracle",
                      x: Subspace | None = None, y: Subspace | None = None) -> SplittingReport:
    """Splitting numbers of ``M`` at the unit scalar ``z``.

    ``oracle`` evaluates the short paths ``s -> M z^-1 e^{-+is}`` below the
    eigen-gap; ``formula`` uses the block-triangular expression with respect
    to the Lagrangian splitting ``(x, y)``.
    """
    z = _unit(z)
    m = np.asarray(m)
    _check_symplectic(space, m)
    if method == "oracle":
        return _splitting_oracle(space, m, z)
    if method != "formula":
        raise ValueError(f"unknown method {method!r}")
    if x is None or y is None:
        raise ValueError("formula method needs the Lagrangian splitting X, Y")
    blk = _blocks(space, x, y)
    a, b, c, d = blk.split(m.astype(np.complex128))
    scale = max(1.0, np.linalg.norm(m, 2))
    tol = get_tolerances().sp * scale
    n = blk.n
    oc = blk.omega_c
    if np.linalg.norm(c, 2) <= tol:
        eta = null_space(d - z * np.eye(n), scale=scale)
        g = eta.conj().T @ d.conj().T @ oc.conj().T @ b @ eta
        mi = morse(g)
        k = _kernel_dim(a - z * np.eye(n))
        s_m, s_p = k - mi.m_minus, k - mi.m_plus
        nullity = mi.m_zero + k
    elif np.linalg.norm(b, 2) <= tol:
        xi = null_space(a - z * np.eye(n), scale=scale)
        h = xi.conj().T @ a.conj().T @ oc @ c @ xi
        mi = morse(h)
        k = _kernel_dim(d - z * np.eye(n))
        s_m, s_p = k - mi.m_plus, k - mi.m_minus
        nullity = mi.m_zero + k
    else:
        raise NotTriangular("M is not block triangular for the given splitting")
    return SplittingReport(z, (s_m, s_m), (s_p, s_p), "formula", nullity)


def _splitting_oracle(space: SymplecticSpace, m: np.ndarray, z: complex) -> SplittingReport:
    cspace = space.as_complex()
    mz = m.astype(np.complex128) / z
    t0 = min(np.pi / 180, _gap_angle(m, z))
    out = {}
    for sign, key in ((-1, "+"), (1, "-")):
        res = _i1(cspace, lambda s, sg=sign: mz * np.exp(sg * 1j * s), 0.0, t0, _ORACLE_SAMPLES)
        out[key] = res
    nullity = out["+"].nullities[0]
    return SplittingReport(z, (out["+"].i_plus, out["-"].i_plus), (-out["+"].i_minus, -out["-"].i_minus),
                           "oracle", nullity)


# paths from the identity ---------------------------------------------------

def _branch_log_unitary(u: np.ndarray) -> np.ndarray:
    """Logarithm of a unitary matrix as a spectral function, cut in the widest angular gap."""
    t, z = schur(u.astype(np.complex128), output="complex")
    lam = np.diag(t)
    ang = np.sort(np.angle(lam))
    if ang.size:
        gaps = np.diff(np.concatenate([ang, [ang[0] + 2 * np.pi]]))
        j = int(np.argmax(gaps))
        cut = ang[j] + 0.5 * gaps[j]
    else:
        cut = np.pi
    theta = np.angle(lam * np.exp(-1j * cut)) + cut
    theta = np.where(theta > cut, theta - 2 * np.pi, theta)
    # bring the branch as close to zero as possible
    theta = theta - 2 * np.pi * np.round(np.mean(theta) / (2 * np.pi)) if theta.size else theta
    return (z * (1j * theta)) @ z.conj().T


def _std_path_generator(n_std: np.ndarray, field: str) -> Callable[[float], np.ndarray]:
    n = n_std.shape[0] // 2
    u, p = polar(n_std, side="right")
    w, v = np.linalg.eigh(0.5 * (p + p.conj().T))
    h = (v * np.log(w)) @ v.conj().T
    if field == "real":
        uc = u[:n, :n] + 1j * u[n:, :n]
        kc = _branch_log_unitary(uc)
        k = np.block([[kc.real, -kc.imag], [kc.imag, kc.real]])
        h = h.real
    else:
        k = _branch_log_unitary(u)
    return lambda t: expm(t * k) @ expm(t * h)


def path_from_identity(space: SymplecticSpace, m, samples: int = 33, tau: float = 1.0) -> SymplecticPath:
    """A symplectic path from ``I`` to ``M`` built from the polar decomposition."""
    m = np.asarray(m)
    _check_symplectic(space, m)
    field = "complex" if (space.field == "complex" or np.iscomplexobj(m)) else "real"
    t = darboux_basis(space if field == space.field else space.as_complex())
    t_inv = np.linalg.inv(t)
    gen_std = _std_path_generator(t_inv @ m @ t, field)
    if field == "real":
        t, t_inv = t.real, t_inv.real

    def gen(s):
        g = t @ gen_std(s / tau) @ t_inv
        return g.real if field == "real" else g

    sp = space if field == space.field else space.as_complex()
    return SymplecticPath.from_function(sp, gen, np.linspace(0.0, tau, samples))


# iteration -----------------------------------------------------------------

def iteration_path(gamma: SymplecticPath, p, k: int) -> SymplecticPath:
    """``gamma(k, P)(t) = P^j gamma(t - j tau) (P^-1 gamma(tau))^j`` on ``[0, k tau]``."""
    if k < 1:
        raise ValueError("k must be a positive integer")
    if not gamma.starts_at_identity:
        raise ValueError("the path must start at the identity")
    p = np.asarray(p)
    _check_symplectic(gamma.space, p, "P")
    t0, tau = gamma.params[0], gamma.params[-1] - gamma.params[0]
    step = np.linalg.solve(p, gamma.end)
    pw = [np.linalg.matrix_power(p, j) for j in range(k)]
    sw = [np.linalg.matrix_power(step, j) for j in range(k)]
    samples = []
    for j in range(k):
        for idx, (t, g) in enumerate(zip(gamma.params, gamma.mats)):
            if j > 0 and idx == 0:
                continue
            samples.append((t + j * tau, pw[j] @ g @ sw[j]))
    gen = None
    if gamma.generator is not None:
        g0 = gamma.generator

        def gen(t):
            j = min(int(np.floor((t - t0) / tau)), k - 1)
            return pw[j] @ g0(t - j * tau) @ sw[j]

    return SymplecticPath(gamma.space, samples, gen, validate=False)


def iteration_index(gamma: SymplecticPath, p, k: int, method: str = "pieces") -> int:
    """``i(k, gamma; P) = i_1(P^-k gamma(k, P))``.

    ``direct`` runs the Maslov engine on the iterated path itself. ``pieces``
    uses that ``(x, y) -> (B x, A^-1 y)`` carries ``Gr(A M B)`` to ``Gr(M)``
    and the diagonal to ``Gr(A^-1 B^-1)``: the ``j``-th piece
    ``P^{j-k} gamma S^j`` (``S = P^-1 gamma(tau)``) contributes
    ``i_W(gamma)`` with ``W = Gr(P^{k-j} S^-j)``. Only ``gamma`` is sampled,
    which avoids resolving the fast motion of graphs of large iterates.
    """
    p = np.asarray(p)
    if method == "direct":
        it = iteration_path(gamma, p, k)
        pk_inv = np.linalg.inv(np.linalg.matrix_power(p, k))
        return maslov_type_index(it.map(lambda m: pk_inv @ m)).i_plus
    if method != "pieces":
        raise ValueError(f"unknown method {method!r}")
    if k < 1:
        raise ValueError("k must be a positive integer")
    if not gamma.starts_at_identity:
        raise ValueError("the path must start at the identity")
    _check_symplectic(gamma.space, p, "P")
    s_inv = np.linalg.solve(gamma.end, p)
    mp = np.linalg.matrix_power
    total = 0
    for j in range(k):
        w = graph_lagrangian(gamma.space, mp(p, k - j) @ mp(s_inv, j), check=False)
        total += maslov_type_index(gamma, w).i_plus
    return total


def f_value(gamma: SymplecticPath, p, k: int, method: str = "pieces") -> int:
    """``f(k, gamma(tau), P) = i(k, gamma; P) - k i(1, gamma; P)``."""
    if k == 1:
        return 0
    return iteration_index(gamma, p, k, method) - k * iteration_index(gamma, p, 1, method)


def _binom(n: int, j: int) -> int:
    from math import comb

    return comb(n, j)


def power_closed_form(space: SymplecticSpace, x: Subspace, y: Subspace, p, k: int,
                      variant: str = "printed") -> np.ndarray:
    """``P^k`` for block-triangular ``P`` from its blocks.

    ``printed`` uses the off-diagonal block ``sum_{j=1}^{k-1} C(k-1, j) A^j B D^{k-j}``
    (lower case ``D^j C A^{k-j}``); ``telescoped`` uses
    ``sum_{j=0}^{k-1} A^j B D^{k-1-j}`` (lower case ``D^j C A^{k-1-j}``).
    """
    blk = _blocks(space, x, y)
    a, b, c, d = blk.split(np.asarray(p))
    n = blk.n
    scale = max(1.0, np.linalg.norm(p, 2))
    tol = get_tolerances().sp * scale
    mp = np.linalg.matrix_power
    upper = np.linalg.norm(c, 2) <= tol
    if not upper and np.linalg.norm(b, 2) > tol:
        raise NotTriangular("P is not block triangular for the given splitting")
    if k == 1:
        off = b if upper else c
    elif variant == "printed":
        if upper:
            off = sum((_binom(k - 1, j) * mp(a, j) @ b @ mp(d, k - j) for j in range(1, k)),
                      np.zeros_like(b))
        else:
            off = sum((_binom(k - 1, j) * mp(d, j) @ c @ mp(a, k - j) for j in range(1, k)),
                      np.zeros_like(c))
    elif variant == "telescoped":
        if upper:
            off = sum(mp(a, j) @ b @ mp(d, k - 1 - j) for j in range(k))
        else:
            off = sum(mp(d, j) @ c @ mp(a, k - 1 - j) for j in range(k))
    else:
        raise ValueError(f"unknown variant {variant!r}")
    z = np.zeros((n, n), dtype=off.dtype)
    blocks = np.block([[mp(a, k), off], [z, mp(d, k)]]) if upper else np.block([[mp(a, k), z], [off, mp(d, k)]])
    return blk.t @ blocks @ blk.t_inv


def f_closed_form(space: SymplecticSpace, x: Subspace, y: Subspace, p, k: int) -> int:
    """``f(k, P, I)`` for block-triangular ``P`` from kernel dimensions and Morse indices."""
    blk = _blocks(space, x, y)
    p = np.asarray(p).astype(np.complex128)
    a, b, c, d = blk.split(p)
    n = blk.n
    oc = blk.omega_c
    scale = max(1.0, np.linalg.norm(p, 2))
    tol = get_tolerances().sp * scale
    upper = np.linalg.norm(c, 2) <= tol
    if not upper and np.linalg.norm(b, 2) > tol:
        raise NotTriangular("P is not block triangular for the given splitting")
    mp = np.linalg.matrix_power
    eye = np.eye(n)

    def form(j):
        ak, bk, ck, dk = blk.split(mp(p, j))
        if upper:
            eta = null_space(dk - eye, scale=max(1.0, np.linalg.norm(dk, 2)))
            return morse(eta.conj().T @ dk.conj().T @ oc.conj().T @ bk @ eta).m_minus
        xi = null_space(ak - eye, scale=max(1.0, np.linalg.norm(ak, 2)))
        hk = xi.conj().T @ ak.conj().T @ oc @ ck @ xi
        return morse(hk.conj()).m_plus

    base = (1 - k) * n + k * _kernel_dim(a - eye)
    last = _kernel_dim(mp(a, k) - eye) if upper else _kernel_dim(mp(d, k) - eye)
    return base - last + form(k) - k * form(1)


@dataclass
class IterationReport:
    k: int
    i_k: int
    i_1: int
    f: int
    frame_rhs: int
    frame_terms: tuple[int, int]
    path: SymplecticPath | None = None
    closed_form: int | None = None
    power_error: dict = field(default_factory=dict)

    @property
    def frame_identity(self) -> bool:
        return self.f == self.frame_rhs

    def to_json(self) -> dict:
        out = {"k": self.k, "i_k": self.i_k, "i_1": self.i_1, "f": self.f,
               "frame_rhs": self.frame_rhs, "frame_terms": list(self.frame_terms),
               "frame_identity": self.frame_identity}
        if self.closed_form is not None:
            out["closed_form"] = self.closed_form
        if self.power_error:
            out["power_relative_error"] = dict(self.power_error)
        return out


def iterate(gamma: SymplecticPath, p, k: int, x: Subspace | None = None, y: Subspace | None = None,
            samples: int = 33, method: str = "pieces") -> IterationReport:
    """Iterated path, ``f(k, M, P)`` and both sides of the frame identity.

    With a Lagrangian splitting ``(x, y)`` for which ``P`` is block
    triangular, also the closed form of ``f(k, P, I)`` and the relative
    errors of both closed forms of ``P^k``.
    """
    space = gamma.space
    p = np.asarray(p)
    _check_symplectic(space, p, "P")
    it = iteration_path(gamma, p, k)
    ik = iteration_index(gamma, p, k, method)
    i1 = iteration_index(gamma, p, 1, method)
    f = ik - k * i1
    p_inv = np.linalg.inv(p)
    g1 = path_from_identity(space, p_inv @ gamma.end, samples)
    g2 = path_from_identity(space, p_inv, samples)
    eye = np.eye(space.dim)
    f1 = f_value(g1, eye, k, method)
    f2 = f_value(g2, eye, k, method)
    rep = IterationReport(k, ik, i1, f, f1 - f2, (f1, f2), it)
    if x is not None and y is not None:
        rep.closed_form = f_closed_form(space, x, y, p, k)
        direct = np.linalg.matrix_power(p, k)
        nrm = max(np.linalg.norm(direct, 2), 1e-300)
        for variant in ("printed", "telescoped"):
            cf = power_closed_form(space, x, y, p, k, variant)
            rep.power_error[variant] = float(np.linalg.norm(cf - direct, 2) / nrm)
    return rep


# mod 2 ---------------------------------------------------------------------

def _require_real(m: np.ndarray) -> np.ndarray:
    if np.iscomplexobj(m):
        if np.abs(m.imag).max(initial=0.0) > 0:
            raise ValueError("mod 2 index is defined for real symplectic matrices")
        m = m.real
    return m


def _eigs(m: np.ndarray):
    ev = np.linalg.eigvals(m)
    rho = max(1.0, float(np.abs(ev).max()))
    return ev, _CLUSTER * rho


def hyperbolic_index(m) -> int:
    """Parity of the algebraic multiplicity of real eigenvalues below ``-1``."""
    m = _require_real(np.asarray(m))
    ev, tol = _eigs(m)
    real = np.abs(ev.imag) <= tol
    return int(np.count_nonzero(real & (ev.real < -1 - tol)) % 2)


def _mult(m: np.ndarray, lam: complex) -> int:
    ev, tol = _eigs(m)
    return int(np.count_nonzero(np.abs(ev - lam) <= tol))


def tilde_alpha(m) -> int:
    """``alpha(M) + dim E_{-1}(M) / 2`` mod 2."""
    m = _require_real(np.asarray(m))
    e = _mult(m, -1.0)
    if e % 2:
        raise ValueError("root space of -1 has odd dimension")
    return (hyperbolic_index(m) + e // 2) % 2


def elliptic_pairs(m) -> int:
    """Number of eigenvalues ``e^{i theta}``, ``0 < theta < pi``, with multiplicity."""
    m = np.asarray(m)
    ev, tol = _eigs(m)
    unit = np.abs(np.abs(ev) - 1.0) <= tol
    upper = ev.imag > tol
    return int(np.count_nonzero(unit & upper))


def d_z(m, z) -> complex:
    """``D_z(M) = (-1)^{n-1} z^{-n} det(M - z I)``."""
    m = np.asarray(m)
    n = m.shape[0] // 2
    z = complex(z)
    return (-1) ** (n - 1) * z ** (-n) * np.linalg.det(m - z * np.eye(2 * n))


@dataclass
class Mod2Report:
    """Both sides of the mod 2 identity together with their ingredients.

    ``lhs`` is ``i_1(gamma)``; ``rhs`` is ``tilde_alpha + S+(1)`` at the end
    minus the same at the start, or ``tilde_alpha(M) + S+_M(1) + n`` when
    ``gamma(0) = I``. ``sign_d`` is the sign of ``D_{e^{i eps}}(gamma(tau))``
    and ``sign_predicted`` is ``-(-1)^{tilde_alpha}``. ``elliptic`` counts
    the eigenvalues of the endpoint on the open upper unit half circle
    (``elliptic_start`` those of the start point); the parity of
    ``rhs + elliptic - elliptic_start`` is reported as ``rhs_with_elliptic``.
    """

    lhs: int
    rhs: int
    n: int
    from_identity: bool
    tilde_alpha_end: int
    s_plus_end: int
    tilde_alpha_start: int
    s_plus_start: int
    sign_d: int
    sign_predicted: int
    elliptic: int
    elliptic_start: int
    epsilon: float

    @property
    def lhs_parity(self) -> int:
        return self.lhs % 2

    @property
    def rhs_parity(self) -> int:
        return self.rhs % 2

    @property
    def parity_holds(self) -> bool:
        return self.lhs_parity == self.rhs_parity

    @property
    def sign_holds(self) -> bool:
        return self.sign_d == self.sign_predicted

    @property
    def rhs_with_elliptic(self) -> int:
        return (self.rhs + self.elliptic - self.elliptic_start) % 2

    def to_json(self) -> dict:
        return {
            "i1": self.lhs, "lhs_parity": self.lhs_parity, "rhs": self.rhs, "rhs_parity": self.rhs_parity,
            "parity_holds": self.parity_holds, "n": self.n, "from_identity": self.from_identity,
            "tilde_alpha_end": self.tilde_alpha_end, "S_plus_end": self.s_plus_end,
            "tilde_alpha_start": self.tilde_alpha_start, "S_plus_start": self.s_plus_start,
            "sign_D": self.sign_d, "sign_predicted": self.sign_predicted, "sign_holds": self.sign_holds,
            "elliptic_eigenvalues": self.elliptic, "elliptic_eigenvalues_start": self.elliptic_start,
            "rhs_with_elliptic_parity": self.rhs_with_elliptic,
            "epsilon": self.epsilon,
        }


def _epsilon(m: np.ndarray) -> float:
    """An angle below the gap between ``1`` and the rest of the unit-circle spectrum."""
    return min(np.pi / 180, _gap_angle(m, 1.0))


def mod2_index(path: SymplecticPath) -> Mod2Report:
    """The mod 2 identity for a real symplectic path."""
    if path.space.field != "real" or any(np.iscomplexobj(m) and np.abs(m.imag).max() > 0 for m in path.mats):
        raise ValueError("mod 2 index needs a real path")
    space = path.space
    n = space.n
    lhs = maslov_type_index(path).i_plus
    end = _require_real(path.end)
    start = _require_real(path.start)
    ta_end = tilde_alpha(end)
    sp_end = splitting_numbers(space, end, 1.0).s_minus_pair[0]
    from_id = bool(path.starts_at_identity)
    if from_id:
        ta_start, sp_start = 0, 0
        rhs = ta_end + sp_end + n
    else:
        ta_start = tilde_alpha(start)
        sp_start = splitting_numbers(space, start, 1.0).s_minus_pair[0]
        rhs = ta_end + sp_end - ta_start - sp_start
    eps = _epsilon(end)
    dz = d_z(end, np.exp(1j * eps))
    sign_d = int(np.sign(dz.real))
    return Mod2Report(lhs, rhs, n, from_id, ta_end, sp_end, ta_start, sp_start, sign_d,
                      -(-1) ** ta_end, elliptic_pairs(end), elliptic_pairs(start), eps)
