"""Subspaces of K^d stored by orthonormal bases.

All rank decisions go through :func:`null_space` / :func:`orth`, which use a
singular-value cutoff relative to the largest singular value of the matrix
under test (see :mod:`symplindex._config`).
"""

from __future__ import annotations

from typing import Iterable

import numpy as np

from ._config import get_tolerances

__all__ = [
    "Subspace",
    "AmbientMismatch",
    "null_space",
    "orth",
    "numerical_rank",
    "span_sum",
    "intersect",
    "fredholm_index",
    "relative_dimension",
    "delta",
    "gap",
    "min_gap",
    "encode_matrix",
    "decode_matrix",
]


class AmbientMismatch(ValueError):
    """Raised when two subspaces live in different ambient spaces."""


def _svd_cut(s: np.ndarray, scale: float | None) -> float:
    tol = get_tolerances().rank
    ref = s[0] if s.size else 0.0
    if scale is not None:
        ref = max(ref, scale)
    return tol * ref


def _svd(m: np.ndarray):
    return np.linalg.svd(m, full_matrices=True)


def numerical_rank(m: np.ndarray, scale: float | None = None) -> int:
    m = np.atleast_2d(np.asarray(m))
    if m.size == 0:
        return 0
    s = np.linalg.svd(m, compute_uv=False)
    if s[0] == 0.0 and scale is None:
        return 0
    return int(np.count_nonzero(s > _svd_cut(s, scale)))


def null_space(m: np.ndarray, scale: float | None = None) -> np.ndarray:
    """Orthonormal basis (columns) of the right null space of ``m``."""
    m = np.atleast_2d(np.asarray(m))
    rows, cols = m.shape
    dtype = np.result_type(m.dtype, np.float64)
    if cols == 0:
        return np.zeros((0, 0), dtype=dtype)
    if rows == 0:
        return np.eye(cols, dtype=dtype)
    _, s, vh = _svd(m)
    r = 0 if s[0] == 0.0 and scale is None else int(np.count_nonzero(s > _svd_cut(s, scale)))
    return vh[r:].conj().T.astype(dtype, copy=False)


def orth(m: np.ndarray, scale: float | None = None) -> np.ndarray:
    """Orthonormal basis of the column span of ``m``."""
    m = np.atleast_2d(np.asarray(m))
    rows, cols = m.shape
    dtype = np.result_type(m.dtype, np.float64)
    if cols == 0 or rows == 0:
        return np.zeros((rows, 0), dtype=dtype)
    u, s, _ = np.linalg.svd(m, full_matrices=False)
    r = 0 if s[0] == 0.0 and scale is None else int(np.count_nonzero(s > _svd_cut(s, scale)))
    return u[:, :r]


def _orthonormalize_exact(m: np.ndarray, k: int) -> np.ndarray:
    if k == 0:
        return np.zeros((m.shape[0], 0), dtype=m.dtype)
    u, _, _ = np.linalg.svd(m, full_matrices=False)
    return u[:, :k]


class Subspace:
    """A linear subspace of K^d, K real or complex.

    Parameters
    ----------
    basis : array_like, shape (d, k)
        Columns spanning the subspace. They must be linearly independent;
        use :meth:`span` for an arbitrary spanning set.
    field : {"real", "complex"}, optional
        Scalar field. Inferred from the dtype when omitted.
    """

    __slots__ = ("_basis", "_field")

    def __init__(self, basis, field: str | None = None, *, _trusted: bool = False):
        b = np.asarray(basis)
        if b.ndim == 1:
            b = b[:, None]
        if b.ndim != 2 or b.shape[0] == 0:
            raise ValueError("basis must be a non-empty d x k matrix")
        if field is None:
            field = "complex" if np.iscomplexobj(b) else "real"
        if field not in ("real", "complex"):
            raise ValueError(f"unknown field {field!r}")
        if field == "real":
            if np.iscomplexobj(b):
                if np.abs(b.imag).max(initial=0.0) > 0:
                    raise ValueError("complex entries in a real subspace")
                b = b.real
            b = b.astype(np.float64)
        else:
            b = b.astype(np.complex128)
        if not _trusted:
            k = b.shape[1]
            q = orth(b)
            if q.shape[1] != k:
                raise ValueError(f"basis columns are dependent (rank {q.shape[1]} < {k})")
            b = q
        b.setflags(write=False)
        self._basis = b
        self._field = field

    # constructors
    @classmethod
    def span(cls, vectors, ambient_dim: int | None = None, field: str | None = None) -> Subspace:
        """Span of the columns of ``vectors`` (dependent columns allowed)."""
        v = np.asarray(vectors)
        if v.ndim == 1:
            v = v[:, None]
        if v.size == 0:
            d = ambient_dim if ambient_dim is not None else v.shape[0]
            return cls.zero(d, field or ("complex" if np.iscomplexobj(v) else "real"))
        if field is None:
            field = "complex" if np.iscomplexobj(v) else "real"
        if field == "real":
            v = v.real if np.iscomplexobj(v) else v
        return cls(orth(v), field, _trusted=True)

    @classmethod
    def zero(cls, d: int, field: str = "real") -> Subspace:
        dtype = np.complex128 if field == "complex" else np.float64
        return cls(np.zeros((d, 0), dtype=dtype), field, _trusted=True)

    @classmethod
    def full(cls, d: int, field: str = "real") -> Subspace:
        dtype = np.complex128 if field == "complex" else np.float64
        return cls(np.eye(d, dtype=dtype), field, _trusted=True)

    @classmethod
    def coordinate(cls, d: int, indices: Iterable[int], field: str = "real") -> Subspace:
        idx = list(indices)
        dtype = np.complex128 if field == "complex" else np.float64
        return cls(np.eye(d, dtype=dtype)[:, idx], field, _trusted=True)

    # accessors
    @property
    def basis(self) -> np.ndarray:
        return self._basis

    @property
    def field(self) -> str:
        return self._field

    @property
    def ambient_dim(self) -> int:
        return self._basis.shape[0]

    @property
    def dim(self) -> int:
        return self._basis.shape[1]

    def __len__(self) -> int:
        return self.dim

    def __repr__(self) -> str:
        return f"Subspace(dim={self.dim}, ambient_dim={self.ambient_dim}, field={self._field!r})"

    def as_complex(self) -> Subspace:
        if self._field == "complex":
            return self
        return Subspace(self._basis.astype(np.complex128), "complex", _trusted=True)

    def projector(self) -> np.ndarray:
        return self._basis @ self._basis.conj().T

    def complement(self) -> Subspace:
        """Orthogonal complement in the ambient space."""
        return Subspace(null_space(self._basis.conj().T) if self.dim else np.eye(self.ambient_dim, dtype=self._basis.dtype),
                        self._field, _trusted=True)

    def residual(self, v: np.ndarray) -> np.ndarray:
        v = np.asarray(v)
        return v - self._basis @ (self._basis.conj().T @ v)

    def contains(self, v: np.ndarray) -> bool:
        v = np.asarray(v)
        if v.ndim == 1:
            v = v[:, None]
        if v.shape[1] == 0:
            return True
        norm = np.linalg.norm(v, 2)
        if norm == 0:
            return True
        return np.linalg.norm(self.residual(v), 2) <= np.sqrt(get_tolerances().rank) * norm

    def is_subset(self, other: Subspace) -> bool:
        _check(self, other)
        return self.dim == 0 or delta(self, other) <= np.sqrt(get_tolerances().rank)

    def equals(self, other: Subspace) -> bool:
        _check(self, other)
        if self.dim != other.dim:
            return False
        return self.dim == 0 or gap(self, other) <= np.sqrt(get_tolerances().rank)

    def apply(self, m: np.ndarray) -> Subspace:
        """Image of the subspace under a linear map."""
        m = np.asarray(m)
        field = "complex" if (self._field == "complex" or np.iscomplexobj(m)) else "real"
        return Subspace.span(m @ self._basis, m.shape[0], field)

    def to_json(self) -> dict:
        return {"ambient_dim": self.ambient_dim, "field": self._field,
                "basis": encode_matrix(self._basis, columns=True)}

    @classmethod
    def from_json(cls, obj: dict) -> Subspace:
        d = int(obj["ambient_dim"])
        field = obj.get("field", "complex")
        cols = obj["basis"]
        if len(cols) == 0:
            return cls.zero(d, field)
        mat = decode_matrix(cols, columns=True)
        if mat.shape[0] != d:
            raise ValueError(f"basis vectors have length {mat.shape[0]}, expected {d}")
        return cls.span(mat, d, field)

    def __add__(self, other: Subspace) -> Subspace:
        return span_sum(self, other)

    def __and__(self, other: Subspace) -> Subspace:
        return intersect(self, other)


def encode_matrix(m: np.ndarray, columns: bool = False) -> list:
    """Nested ``[re, im]`` lists; rows by default, columns when requested."""
    m = np.asarray(m, dtype=np.complex128)
    if columns:
        m = m.T
    return [[[float(z.real), float(z.imag)] for z in row] for row in m]


def decode_matrix(data, columns: bool = False) -> np.ndarray:
    """Inverse of :func:`encode_matrix`; plain real entries are accepted too."""
    arr = np.asarray(data, dtype=np.float64)
    if arr.ndim == 3 and arr.shape[-1] == 2:
        m = arr[..., 0] + 1j * arr[..., 1]
    elif arr.ndim == 2:
        m = arr.astype(np.complex128)
    else:
        raise ValueError("matrix must be a 2-d array of numbers or [re, im] pairs")
    return m.T if columns else m


def _check(a: Subspace, b: Subspace) -> None:
    if a.ambient_dim != b.ambient_dim:
        raise AmbientMismatch(f"ambient dimensions differ: {a.ambient_dim} != {b.ambient_dim}")


def _field(a: Subspace, b: Subspace) -> str:
    return "complex" if "complex" in (a.field, b.field) else "real"


def _sum_and_intersection(a: Subspace, b: Subspace) -> tuple[Subspace, Subspace]:
    _check(a, b)
    field = _field(a, b)
    d = a.ambient_dim
    if a.dim == 0 or b.dim == 0:
        s = b if a.dim == 0 else a
        return Subspace(s.basis, field, _trusted=True), Subspace.zero(d, field)
    stacked = np.hstack([a.basis, -b.basis])
    u, s, vh = np.linalg.svd(stacked, full_matrices=True)
    cut = _svd_cut(s, None)
    r = int(np.count_nonzero(s > cut))
    total = Subspace(u[:, :r], field, _trusted=True)
    null = vh[r:].conj().T
    k = null.shape[1]
    if k == 0:
        return total, Subspace.zero(d, field)
    vecs = 0.5 * (a.basis @ null[: a.dim] + b.basis @ null[a.dim:])
    return total, Subspace(_orthonormalize_exact(vecs, k), field, _trusted=True)


def span_sum(a: Subspace, b: Subspace, *more: Subspace) -> Subspace:
    """The sum ``a + b (+ ...)``."""
    out = _sum_and_intersection(a, b)[0]
    for c in more:
        out = _sum_and_intersection(out, c)[0]
    return out


def intersect(a: Subspace, b: Subspace, *more: Subspace) -> Subspace:
    """The intersection ``a & b (& ...)``, from the null space of ``[A | -B]``."""
    out = _sum_and_intersection(a, b)[1]
    for c in more:
        out = _sum_and_intersection(out, c)[1]
    return out


def fredholm_index(a: Subspace, b: Subspace) -> int:
    """``dim(a & b) - codim(a + b)``."""
    total, inter = _sum_and_intersection(a, b)
    return inter.dim - (a.ambient_dim - total.dim)


def relative_dimension(m: Subspace, n: Subspace) -> int:
    """``[m - n] = dim m/(m & n) - dim n/(m & n)``."""
    k = intersect(m, n).dim
    return (m.dim - k) - (n.dim - k)


def delta(a: Subspace, b: Subspace) -> float:
    """One-sided gap: sup of ``dist(u, b)`` over unit vectors ``u`` of ``a``."""
    _check(a, b)
    if a.dim == 0:
        return 0.0
    if b.dim == 0:
        return 1.0
    r = a.basis - b.basis @ (b.basis.conj().T @ a.basis)
    return float(min(np.linalg.norm(r, 2), 1.0))


def gap(a: Subspace, b: Subspace) -> float:
    """Symmetric gap ``max(delta(a, b), delta(b, a))``."""
    return max(delta(a, b), delta(b, a))


def min_gap(a: Subspace, b: Subspace) -> float:
    """Minimum gap: inf of ``dist(u, b) / dist(u, a & b)`` over ``u`` in ``a`` outside ``b``."""
    _check(a, b)
    inter = intersect(a, b)
    if inter.dim == a.dim:
        return 1.0
    if inter.dim:
        coords = null_space(inter.basis.conj().T @ a.basis)
        rest = a.basis @ coords
    else:
        rest = a.basis
    if b.dim:
        r = rest - b.basis @ (b.basis.conj().T @ rest)
    else:
        r = rest
    return float(np.linalg.svd(r, compute_uv=False)[-1])


# Name used by the published API; defined last so the module never calls it.
sum = span_sum  # noqa: A001
