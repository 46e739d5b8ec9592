"""Symplectic structures on K^{2n} and the constructions built on them.

The form is ``omega(x, y) = x^H Omega y`` with ``Omega^H = -Omega``; over the
reals this is the usual skew-symmetric bilinear form, over the complex numbers
it is Hermitian-skew and conjugate-linear in the first slot.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
import scipy.linalg as sla

from ._config import get_tolerances
from .quadform import HermitianForm
from .subspace import Subspace, intersect, null_space, orth, span_sum

__all__ = [
    "SymplecticSpace",
    "NotIsotropic",
    "NotCoisotropic",
    "NotLagrangian",
    "TripleForm",
    "Reduction",
    "DiagonalPart",
    "standard_form",
    "annihilator",
    "classify",
    "reduce",
    "triple_form",
    "diagonal_part",
    "darboux_complement",
    "darboux_basis",
    "properties",
    "splitting_coordinates",
]


class NotIsotropic(ValueError):
    pass


class NotCoisotropic(ValueError):
    pass


class NotLagrangian(ValueError):
    pass


def standard_form(n: int) -> np.ndarray:
    """``[[0, -I], [I, 0]]``."""
    eye = np.eye(n)
    zero = np.zeros((n, n))
    return np.block([[zero, -eye], [eye, zero]])


def _loose() -> float:
    return float(np.sqrt(get_tolerances().rank))


class SymplecticSpace:
    """K^{2n} with a nondegenerate (Hermitian-)skew form matrix.

    Parameters
    ----------
    form : array_like, shape (2n, 2n)
        Matrix ``Omega`` with ``Omega^H = -Omega``.
    field : {"real", "complex"}, optional
    """

    __slots__ = ("_form", "_field", "_norm")

    def __init__(self, form, field: str | None = None):
        f = np.asarray(form)
        if f.ndim != 2 or f.shape[0] != f.shape[1] or f.shape[0] % 2:
            raise ValueError("form must be a square matrix of even size")
        if field is None:
            field = "complex" if np.iscomplexobj(f) else "real"
        f = f.real.astype(np.float64) if field == "real" else f.astype(np.complex128)
        s = np.linalg.svd(f, compute_uv=False)
        if s[-1] <= get_tolerances().rank * s[0]:
            raise ValueError("form is degenerate")
        if np.linalg.norm(f + f.conj().T, 2) > _loose() * s[0]:
            raise ValueError("form is not (Hermitian-)skew")
        f = 0.5 * (f - f.conj().T)
        f.setflags(write=False)
        self._form = f
        self._field = field
        self._norm = float(s[0])

    @classmethod
    def standard(cls, n: int, field: str = "real") -> SymplecticSpace:
        f = standard_form(n)
        return cls(f.astype(np.complex128) if field == "complex" else f, field)

    @property
    def form(self) -> np.ndarray:
        return self._form

    @property
    def field(self) -> str:
        return self._field

    @property
    def dim(self) -> int:
        return self._form.shape[0]

    @property
    def n(self) -> int:
        return self._form.shape[0] // 2

    @property
    def form_norm(self) -> float:
        return self._norm

    def __repr__(self) -> str:
        return f"SymplecticSpace(n={self.n}, field={self._field!r})"

    def as_complex(self) -> SymplecticSpace:
        if self._field == "complex":
            return self
        return SymplecticSpace(self._form.astype(np.complex128), "complex")

    def omega(self, x, y):
        """``x^H Omega y`` for vectors or column blocks."""
        return np.asarray(x).conj().T @ self._form @ np.asarray(y)

    def gram(self, v: Subspace, w: Subspace | None = None) -> np.ndarray:
        w = v if w is None else w
        return v.basis.conj().T @ self._form @ w.basis

    # predicates -------------------------------------------------------
    def is_isotropic(self, v: Subspace) -> bool:
        if v.dim == 0:
            return True
        return np.linalg.norm(self.gram(v), 2) <= _loose() * self._norm

    def is_lagrangian(self, v: Subspace) -> bool:
        return v.dim == self.n and self.is_isotropic(v)

    def is_symplectic_matrix(self, m: np.ndarray) -> bool:
        m = np.asarray(m)
        resid = m.conj().T @ self._form @ m - self._form
        scale = self._norm * max(1.0, np.linalg.norm(m, 2)) ** 2
        return np.linalg.norm(resid, 2) <= get_tolerances().sp * scale

    def annihilator(self, v: Subspace) -> Subspace:
        return annihilator(self, v)

    def subspace(self, basis) -> Subspace:
        field = "complex" if (self._field == "complex" or np.iscomplexobj(basis)) else "real"
        return Subspace.span(basis, self.dim, field)

    def to_json(self) -> dict:
        from .subspace import encode_matrix

        return {"n": self.n, "field": self._field, "form": encode_matrix(self._form)}

    @classmethod
    def from_json(cls, obj: dict) -> SymplecticSpace:
        from .subspace import decode_matrix

        n = int(obj["n"])
        field = obj.get("field", "complex")
        if "form" not in obj or obj["form"] is None:
            return cls.standard(n, field)
        f = decode_matrix(obj["form"])
        if f.shape != (2 * n, 2 * n):
            raise ValueError(f"form has shape {f.shape}, expected {(2 * n, 2 * n)}")
        return cls(f.real if field == "real" else f, field)


def _check_space(space: SymplecticSpace, v: Subspace) -> None:
    if v.ambient_dim != space.dim:
        from .subspace import AmbientMismatch

        raise AmbientMismatch(f"subspace lives in K^{v.ambient_dim}, space is K^{space.dim}")


def _field_of(space: SymplecticSpace, *vs: Subspace) -> str:
    if space.field == "complex" or any(v.field == "complex" for v in vs):
        return "complex"
    return "real"


def annihilator(space: SymplecticSpace, v: Subspace) -> Subspace:
    """``v^omega = {x : omega(y, x) = 0 for all y in v}``."""
    _check_space(space, v)
    field = _field_of(space, v)
    if v.dim == 0:
        return Subspace.full(space.dim, field)
    return Subspace(null_space(v.basis.conj().T @ space.form), field, _trusted=True) \
        if v.dim < space.dim else Subspace.zero(space.dim, field)


def classify(space: SymplecticSpace, v: Subspace) -> str:
    """One of ``lagrangian``, ``isotropic``, ``coisotropic``, ``symplectic``, ``none``.

    The first matching label in that order is returned; :func:`properties`
    lists every property that holds.
    """
    props = properties(space, v)
    for label in ("lagrangian", "isotropic", "coisotropic", "symplectic"):
        if label in props:
            return label
    return "none"


def properties(space: SymplecticSpace, v: Subspace) -> frozenset[str]:
    _check_space(space, v)
    out = set()
    ann = annihilator(space, v)
    iso = space.is_isotropic(v)
    coiso = space.is_isotropic(ann)
    if iso:
        out.add("isotropic")
    if coiso:
        out.add("coisotropic")
    if iso and coiso:
        out.add("lagrangian")
    g = space.gram(v) if v.dim else np.zeros((0, 0))
    if v.dim == 0 or np.linalg.svd(g, compute_uv=False)[-1] > _loose() * space.form_norm:
        out.add("symplectic")
    return frozenset(out)


@dataclass(frozen=True)
class Reduction:
    """Symplectic reduction by a coisotropic ``W``.

    ``complement`` is an orthonormal basis ``C`` of the orthogonal complement
    of ``W^omega`` inside ``W``; the reduced space ``W / W^omega`` is
    identified with ``C``-coordinates and carries the form ``C^H Omega C``.
    """

    space: SymplecticSpace | None
    complement: np.ndarray
    w: Subspace
    w_omega: Subspace

    @property
    def dim(self) -> int:
        return self.complement.shape[1]

    def image(self, lam: Subspace) -> Subspace:
        """``R_W(lam) = ((lam + W^omega) & W) / W^omega`` in reduced coordinates."""
        if self.dim == 0:
            raise ValueError("reduced space is zero-dimensional")
        field = "complex" if np.iscomplexobj(self.complement) else lam.field
        s = intersect(span_sum(lam, self.w_omega), self.w)
        if s.dim == 0:
            return Subspace.zero(self.dim, field)
        return Subspace.span(self.complement.conj().T @ s.basis, self.dim, field)

    def lift(self, coords: np.ndarray) -> np.ndarray:
        return self.complement @ coords


def reduce(space: SymplecticSpace, w: Subspace, lam: Subspace | None = None):
    """Reduce by a coisotropic ``w``.

    Returns the :class:`Reduction`, or ``(reduction, R_W(lam))`` when ``lam``
    is given. A zero-dimensional reduced space is reported with
    ``reduction.space is None`` and ``R_W(lam)`` is then ``None``.
    """
    _check_space(space, w)
    w_om = annihilator(space, w)
    if not w_om.is_subset(w):
        raise NotCoisotropic("W does not contain its annihilator")
    if w_om.dim == 0:
        comp = w.basis
    else:
        comp = w.basis @ null_space(w_om.basis.conj().T @ w.basis)
    field = _field_of(space, w)
    if comp.shape[1]:
        red_form = comp.conj().T @ space.form @ comp
        red = SymplecticSpace(red_form.real if field == "real" else red_form, field)
    else:
        red = None
    r = Reduction(red, comp, w, w_om)
    if lam is None:
        return r
    if red is None:
        return r, None
    return r, r.image(lam)


@dataclass(frozen=True)
class TripleForm:
    """The form ``Q(alpha, beta; gamma)(z1, z2) = omega(x1, y2)``.

    ``carrier`` is ``gamma & (alpha + beta)``; ``matrix`` is the form in the
    orthonormal basis of the carrier.
    """

    space: SymplecticSpace
    alpha: Subspace
    beta: Subspace
    carrier: Subspace
    matrix: np.ndarray

    @property
    def form(self) -> HermitianForm:
        return HermitianForm(self.matrix)

    def morse(self):
        return self.form.morse()

    def split(self, z: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Minimal-norm decomposition ``z = x + y`` with ``x`` in alpha, ``y`` in beta."""
        return _split(self.alpha, self.beta, np.asarray(z))

    def evaluate(self, z1, z2) -> complex:
        x1, _ = self.split(np.asarray(z1))
        _, y2 = self.split(np.asarray(z2))
        val = self.space.omega(x1, y2)
        return complex(np.asarray(val).reshape(()))


def _split(alpha: Subspace, beta: Subspace, z: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    stacked = np.hstack([alpha.basis, beta.basis])
    coef = np.linalg.lstsq(stacked, z, rcond=None)[0]
    return alpha.basis @ coef[: alpha.dim], beta.basis @ coef[alpha.dim:]


def triple_form(space: SymplecticSpace, alpha: Subspace, beta: Subspace, gamma: Subspace) -> TripleForm:
    for name, v in (("alpha", alpha), ("beta", beta), ("gamma", gamma)):
        _check_space(space, v)
        if not space.is_isotropic(v):
            raise NotIsotropic(f"{name} is not isotropic")
    carrier = intersect(gamma, span_sum(alpha, beta))
    k = carrier.dim
    if k == 0:
        return TripleForm(space, alpha, beta, carrier, np.zeros((0, 0)))
    x, y = _split(alpha, beta, carrier.basis)
    q = x.conj().T @ space.form @ y
    skew = np.linalg.norm(q - q.conj().T, 2)
    if skew > _loose() * max(1.0, np.linalg.norm(q, 2)) * space.form_norm:
        raise NotIsotropic("triple form is not Hermitian; inputs are not isotropic enough")
    q = 0.5 * (q + q.conj().T)
    if not np.iscomplexobj(carrier.basis) and np.iscomplexobj(q):
        q = q.real
    return TripleForm(space, alpha, beta, carrier, q)


def splitting_coordinates(x: Subspace, y: Subspace) -> np.ndarray:
    """Invertible ``T = [X | Y]`` built from the bases of a direct sum."""
    if x.dim + y.dim != x.ambient_dim:
        raise ValueError("X and Y are not complementary")
    t = np.hstack([x.basis, y.basis])
    s = np.linalg.svd(t, compute_uv=False)
    if s[-1] <= get_tolerances().rank * s[0]:
        raise ValueError("X and Y are not complementary")
    return t


@dataclass(frozen=True)
class DiagonalPart:
    """Diagonal part ``alpha(0)`` of a Lagrangian and the homotopy ``alpha(t)``."""

    alpha0: Subspace
    w: Subspace
    homotopy: Callable[[float], Subspace]

    def sample(self, ts) -> list[Subspace]:
        return [self.homotopy(float(t)) for t in ts]


def diagonal_part(space: SymplecticSpace, x: Subspace, y: Subspace, lam: Subspace) -> DiagonalPart:
    """``alpha(t) = P(t) lam + W`` with ``W = lam & Y`` and ``P(t)(x + y) = x + t y``."""
    for name, v in (("X", x), ("Y", y), ("lam", lam)):
        _check_space(space, v)
        if not space.is_lagrangian(v):
            raise NotLagrangian(f"{name} is not Lagrangian")
    t_mat = splitting_coordinates(x, y)
    t_inv = np.linalg.inv(t_mat)
    n = x.dim
    w = intersect(lam, y)
    field = _field_of(space, x, y, lam)
    coords = t_inv @ lam.basis

    def alpha(t: float) -> Subspace:
        scaled = coords.copy()
        scaled[n:] *= t
        return span_sum(Subspace.span(t_mat @ scaled, space.dim, field), w)

    return DiagonalPart(alpha(0.0), w, alpha)


def darboux_complement(space: SymplecticSpace, e: np.ndarray, shift: float = 0.0) -> np.ndarray:
    """Isotropic ``V`` paired with an isotropic block ``E``: ``E^H Omega V = I``.

    ``V = F + E (G / 2 + shift I)`` with ``F = Omega^H E (E^H Omega Omega^H E)^{-1}``
    and ``G = F^H Omega F``. Any real ``shift`` keeps ``V`` isotropic. When
    ``E`` spans a Lagrangian the result is a Lagrangian complement.
    """
    e = np.asarray(e)
    om = space.form
    f = om.conj().T @ e
    f = f @ np.linalg.inv(e.conj().T @ om @ f)
    g = f.conj().T @ om @ f
    return f + e @ (0.5 * g + shift * np.eye(e.shape[1]))


def darboux_basis(space: SymplecticSpace) -> np.ndarray:
    """Matrix ``T`` with ``T^H Omega T = [[0, -I], [I, 0]]``.

    Real forms give a real ``T`` (from the real Schur form), complex forms a
    complex one (from the spectral decomposition of ``i Omega``).
    """
    om = space.form
    n = space.n
    if space.field == "real":
        tmat, z = sla.schur(om, output="real")
        es, fs = [], []
        i = 0
        while i < 2 * n:
            b = tmat[i, i + 1]
            z1, z2 = z[:, i], z[:, i + 1]
            c = 1.0 / np.sqrt(abs(b))
            if b > 0:
                es.append(c * z2)
                fs.append(c * z1)
            else:
                es.append(c * z1)
                fs.append(c * z2)
            i += 2
        return np.column_stack(es + fs)
    d, u = np.linalg.eigh(1j * om)
    if np.count_nonzero(d > 0) != n:
        raise ValueError("form has no Lagrangian subspaces (signature is not (n, n))")
    s, v = np.linalg.eigh(1j * standard_form(n).astype(np.complex128))
    return u @ np.diag(1.0 / np.sqrt(np.abs(d))) @ v.conj().T
