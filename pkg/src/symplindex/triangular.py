"""Closed-form Maslov indices for Lagrangian pairs in triangular form.

With a fixed Lagrangian splitting ``Z = X + Y`` a Lagrangian ``lam`` is read
as a linear relation from ``X`` to ``Y``: its domain is the projection of
``lam`` to ``X`` along ``Y`` and its indeterminacy is ``A = lam & Y``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .maslov import LagrangianPairPath
from .quadform import MorseIndices, morse
from .subspace import Subspace, fredholm_index, intersect, span_sum
from .symplectic import (
    NotLagrangian,
    SymplecticSpace,
    _loose,
    annihilator,
    reduce,
    splitting_coordinates,
    triple_form,
)

__all__ = [
    "StructureError",
    "TriangleStructure",
    "TriangularPath",
    "TriangularResult",
    "DiagonalResult",
    "triangle_structure",
    "relation_domain",
    "relation_form",
    "maslov_triangular",
    "maslov_diagonal",
    "maslov_fixed_intersection",
    "q_diagonal_indices",
    "is_diagonal",
]


class StructureError(ValueError):
    """A triangular-form hypothesis fails at some sample."""


class _Splitting:
    def __init__(self, space: SymplecticSpace, x: Subspace, y: Subspace):
        for name, v in (("X", x), ("Y", y)):
            if not space.is_lagrangian(v):
                raise NotLagrangian(f"{name} is not Lagrangian")
        self.space = space
        self.x = x
        self.y = y
        self.t = splitting_coordinates(x, y)
        self.t_inv = np.linalg.inv(self.t)
        self.n = x.dim
        self.field = "complex" if "complex" in (space.field, x.field, y.field) else "real"

    def domain(self, lam: Subspace) -> Subspace:
        coords = self.t_inv[: self.n] @ lam.basis
        return Subspace.span(self.x.basis @ coords, self.space.dim, self.field)

    def fiber_rep(self, lam: Subspace, xs: np.ndarray) -> np.ndarray:
        """Minimal-norm ``y`` with ``x + y`` in ``lam`` for each column ``x``."""
        stacked = np.hstack([lam.basis, -self.y.basis])
        coef = np.linalg.lstsq(stacked, xs, rcond=None)[0]
        resid = stacked @ coef - xs
        if np.linalg.norm(resid) > _loose() * max(1.0, np.linalg.norm(xs)):
            raise StructureError("vector is not in the domain of the relation")
        return self.y.basis @ coef[lam.dim:]


def relation_domain(space: SymplecticSpace, x: Subspace, y: Subspace, lam: Subspace) -> Subspace:
    """Domain of ``lam`` viewed as a relation from ``X`` to ``Y``."""
    return _Splitting(space, x, y).domain(lam)


def _relation_form(sp: _Splitting, lam: Subspace, mu: Subspace) -> tuple[Subspace, np.ndarray]:
    dom = intersect(sp.domain(lam), sp.domain(mu))
    if dom.dim == 0:
        return dom, np.zeros((0, 0))
    diff = sp.fiber_rep(lam, dom.basis) - sp.fiber_rep(mu, dom.basis)
    q = dom.basis.conj().T @ sp.space.form @ diff
    if np.linalg.norm(q - q.conj().T, 2) > _loose() * max(1.0, np.linalg.norm(q, 2)) * sp.space.form_norm:
        raise StructureError("relation form is not Hermitian")
    q = 0.5 * (q + q.conj().T)
    return dom, q


def relation_form(space: SymplecticSpace, x: Subspace, y: Subspace, lam: Subspace, mu: Subspace):
    """``Q(x1, x2) = omega(x1, (lam - mu) x2)`` on ``dom lam & dom mu``.

    Returns the carrier (orthonormal basis of the common domain) and the
    Hermitian matrix of ``Q`` in that basis.
    """
    return _relation_form(_Splitting(space, x, y), lam, mu)


@dataclass(frozen=True)
class TriangleStructure:
    w1: Subspace
    w2: Subspace
    dom_alpha: Subspace
    dom_beta: Subspace
    gamma: Subspace
    delta: Subspace
    checks: dict

    @property
    def ok(self) -> bool:
        return all(self.checks.values())


def _structure(sp: _Splitting, alpha: Subspace, beta: Subspace) -> TriangleStructure:
    space = sp.space
    w1 = intersect(alpha, sp.y)
    w2 = intersect(beta, sp.y)
    w1o = annihilator(space, w1)
    w2o = annihilator(space, w2)
    d1 = intersect(w1o, sp.x)
    d2 = intersect(w2o, sp.x)
    dom_a = sp.domain(alpha)
    dom_b = sp.domain(beta)
    gamma = span_sum(d1, w1)
    delta = span_sum(d2, w2)
    n = sp.n
    checks = {
        "codim_sum_identity": n - span_sum(w1, w2).dim == intersect(w1o, w2o, sp.x).dim,
        "intersection_identity": intersect(w1, w2).dim == n - span_sum(d1, d2).dim,
        "dom_alpha": dom_a.equals(d1),
        "dom_beta": dom_b.equals(d2),
        "alpha_plus_y": span_sum(alpha, sp.y).equals(w1o),
        "beta_plus_y": span_sum(beta, sp.y).equals(w2o),
        "gamma_lagrangian": space.is_lagrangian(gamma),
        "delta_lagrangian": space.is_lagrangian(delta),
        "index_zero": fredholm_index(gamma, delta) == 0,
    }
    return TriangleStructure(w1, w2, dom_a, dom_b, gamma, delta, checks)


def triangle_structure(space: SymplecticSpace, x: Subspace, y: Subspace,
                       alpha: Subspace, beta: Subspace) -> TriangleStructure:
    """Indeterminacies, domains and the diagonal pair ``(gamma, delta)``."""
    for name, v in (("alpha", alpha), ("beta", beta)):
        if not space.is_lagrangian(v):
            raise NotLagrangian(f"{name} is not Lagrangian")
    return _structure(_Splitting(space, x, y), alpha, beta)


class TriangularPath:
    """A path of Lagrangian pairs together with a fixed Lagrangian splitting."""

    def __init__(self, path: LagrangianPairPath, x: Subspace, y: Subspace):
        if not path.constant_space:
            raise ValueError("triangular paths use a fixed symplectic space")
        self.path = path
        self.x = x
        self.y = y
        self._split = _Splitting(path.space, x, y)

    @property
    def space(self) -> SymplecticSpace:
        return self.path.space

    def to_json(self) -> dict:
        out = self.path.to_json()
        out["X"] = self.x.to_json()
        out["Y"] = self.y.to_json()
        return out

    @classmethod
    def from_json(cls, obj: dict) -> TriangularPath:
        return cls(LagrangianPairPath.from_json(obj), Subspace.from_json(obj["X"]), Subspace.from_json(obj["Y"]))


@dataclass
class TriangularResult:
    """Outcome of :func:`maslov_triangular`.

    ``nullities`` are ``dim ker Q(s) + dim(A(s) & B(s))`` and
    ``intersection_dims`` are ``dim(lambda(s) & mu(s))`` from a rank test.
    """

    mas_plus: int
    mas_minus: int
    q_start: MorseIndices
    q_end: MorseIndices
    ab_start: int
    ab_end: int
    nullities: list[int]
    intersection_dims: list[int]
    params: list[float] = field(default_factory=list)

    def __iter__(self):
        return iter((self.mas_plus, self.mas_minus))

    @property
    def nullity_consistent(self) -> bool:
        return self.nullities == self.intersection_dims


def maslov_triangular(path: TriangularPath, check_structure: bool = True) -> TriangularResult:
    """``Mas+-`` from the endpoint data of the relation form.

    ``Mas+- = +-dim(A&B)(0) -+ dim(A&B)(1) +- m+-(Q(1)) -+ m+-(Q(0))``.
    """
    sp = path._split
    p = path.path
    nulls, inter = [], []
    ends = {}
    dims_ab = None
    last = len(p) - 1
    for i in range(len(p)):
        lam, mu = p.lams[i], p.mus[i]
        a = intersect(lam, sp.y)
        b = intersect(mu, sp.y)
        if dims_ab is None:
            dims_ab = (a.dim, b.dim)
        elif (a.dim, b.dim) != dims_ab:
            raise StructureError(f"dim(lambda & Y), dim(mu & Y) jump at sample {i}: {(a.dim, b.dim)} != {dims_ab}")
        if check_structure:
            st = _structure(sp, lam, mu)
            if not st.ok:
                bad = [k for k, v in st.checks.items() if not v]
                raise StructureError(f"structure checks fail at sample {i}: {bad}")
        _, q = _relation_form(sp, lam, mu)
        mi = morse(q)
        ab = intersect(a, b).dim
        nulls.append(mi.m_zero + ab)
        inter.append(intersect(lam, mu).dim)
        if i in (0, last):
            ends[i] = (mi, ab)
    (q0, ab0), (q1, ab1) = ends[0], ends[last]
    plus = ab0 - ab1 + q1.m_plus - q0.m_plus
    minus = -ab0 + ab1 - q1.m_minus + q0.m_minus
    return TriangularResult(plus, minus, q0, q1, ab0, ab1, nulls, inter, [float(s) for s in p.params])


def is_diagonal(lam: Subspace, x: Subspace, y: Subspace) -> bool:
    """``lam = (lam & X) + (lam & Y)``."""
    return intersect(lam, x).dim + intersect(lam, y).dim == lam.dim


@dataclass
class DiagonalResult:
    half_difference: tuple[int, int]
    x_form: tuple[int, int]
    y_form: tuple[int, int]
    a_values: list[int]
    b_values: list[int]

    @property
    def consistent(self) -> bool:
        return (self.half_difference == self.x_form == self.y_form
                and len(set(self.a_values)) == 1
                and all(a == -b for a, b in zip(self.a_values, self.b_values)))

    def __iter__(self):
        return iter(self.half_difference)


def maslov_diagonal(path: TriangularPath) -> DiagonalResult:
    """Maslov index of a path of diagonal pairs from intersection dimensions."""
    p = path.path
    x, y = path.x, path.y
    for i in range(len(p)):
        if not (is_diagonal(p.lams[i], x, y) and is_diagonal(p.mus[i], x, y)):
            raise StructureError(f"pair at sample {i} is not diagonal")
    a_vals = [_index_in(p.lams[i], p.mus[i], x) for i in range(len(p))]
    b_vals = [_index_in(p.lams[i], p.mus[i], y) for i in range(len(p))]

    def dims(i, sub=None):
        inter = intersect(p.lams[i], p.mus[i])
        return inter.dim if sub is None else intersect(inter, sub).dim

    last = len(p) - 1
    diff = dims(0) - dims(last)
    if diff % 2:
        raise StructureError("intersection dimensions of a diagonal path differ by an odd number")
    half = diff // 2
    dx = dims(0, x) - dims(last, x)
    dy = dims(0, y) - dims(last, y)
    return DiagonalResult((half, -half), (dx, -dx), (dy, -dy), a_vals, b_vals)


def _index_in(lam: Subspace, mu: Subspace, part: Subspace) -> int:
    """Fredholm index of ``(lam & part, mu & part)`` inside ``part``."""
    a = intersect(lam, part)
    b = intersect(mu, part)
    return intersect(a, b).dim - (part.dim - span_sum(a, b).dim)


def q_diagonal_indices(space: SymplecticSpace, x: Subspace, y: Subspace,
                       lam: Subspace, mu: Subspace, v: Subspace) -> dict:
    """Morse indices of ``Q(mu, V; lam)`` next to their closed forms."""
    q = triple_form(space, mu, v, lam)
    mi = q.morse()
    n = space.n
    inter = intersect(lam, mu)
    half = n - inter.dim
    return {
        "m_plus": mi.m_plus,
        "m_minus": mi.m_minus,
        "m_zero": mi.m_zero,
        "half_codim_twice": half,
        "x_count": intersect(lam, x).dim - intersect(inter, x).dim,
        "y_count": intersect(lam, y).dim - intersect(inter, y).dim,
    }


def maslov_fixed_intersection(path: TriangularPath) -> tuple[int, int]:
    """``Mas+- = +-m+-(Q(1)) -+ m+-(Q(0))`` after reducing by ``W = A + B``.

    Requires ``lam & Y``, ``mu & Y``, ``lam + Y`` and ``mu + Y`` constant.
    """
    p = path.path
    space = path.space
    y = path.y
    a0 = intersect(p.lams[0], y)
    b0 = intersect(p.mus[0], y)
    ly0 = span_sum(p.lams[0], y)
    my0 = span_sum(p.mus[0], y)
    for i in range(len(p)):
        if not (intersect(p.lams[i], y).equals(a0) and intersect(p.mus[i], y).equals(b0)
                and span_sum(p.lams[i], y).equals(ly0) and span_sum(p.mus[i], y).equals(my0)):
            raise StructureError(f"intersections with Y vary at sample {i}")
    w = span_sum(a0, b0)
    red = reduce(space, annihilator(space, w))
    if red.space is None:
        return 0, 0

    def q_at(i):
        lam_r = red.image(p.lams[i])
        mu_r = red.image(p.mus[i])
        y_r = red.image(y)
        return triple_form(red.space, mu_r, y_r, lam_r).morse()

    q0, q1 = q_at(0), q_at(len(p) - 1)
    return q1.m_plus - q0.m_plus, q0.m_minus - q1.m_minus
