from __future__ import annotations

import json

import numpy as np
import pytest
from hypothesis import given, strategies as st

from oracles import gauss_rank
from symplindex.generators import (
    random_diagonal_path, random_diagonal_triple, random_hermitian, random_lagrangian,
    random_triangular_path,
)
from symplindex.maslov import LagrangianPairPath, maslov_index
from symplindex.subspace import Subspace, intersect, span_sum
from symplindex.symplectic import SymplecticSpace
from symplindex.triangular import (
    StructureError, TriangularPath, is_diagonal, maslov_diagonal, maslov_fixed_intersection,
    maslov_triangular, q_diagonal_indices, triangle_structure,
)

seeds = st.integers(0, 2**32 - 1)
fields = st.sampled_from(["real", "complex"])


def splitting(n, field="real"):
    x = Subspace.span(np.vstack([np.eye(n), np.zeros((n, n))]), 2 * n, field)
    y = Subspace.span(np.vstack([np.zeros((n, n)), np.eye(n)]), 2 * n, field)
    return x, y


def graph(s, field="real"):
    n = s.shape[0]
    return Subspace.span(np.vstack([np.eye(n), s]), 2 * n, field)


# triangle_structure -------------------------------------------------------
def test_structure_of_the_splitting():
    sp = SymplecticSpace.standard(2)
    x, y = splitting(2)
    st_ = triangle_structure(sp, x, y, x, y)
    assert st_.ok
    assert st_.w1.dim == 0 and st_.w2.equals(y)
    assert st_.gamma.equals(x) and st_.delta.equals(y)


def test_structure_equal_diagonal_pair():
    sp = SymplecticSpace.standard(3)
    x, y = splitting(3)
    lam = Subspace.coordinate(6, [0, 4, 5])
    st_ = triangle_structure(sp, x, y, lam, lam)
    assert st_.ok and st_.gamma.equals(lam) and st_.delta.equals(lam)


def test_structure_random_dim8_rank_oracle(rng):
    sp = SymplecticSpace.standard(4)
    x, y = splitting(4)
    for _ in range(10):
        a = random_lagrangian(4, rng, k=int(rng.integers(0, 3)))
        b = random_lagrangian(4, rng, k=int(rng.integers(0, 3)))
        st_ = triangle_structure(sp, x, y, a, b)
        assert st_.ok
        # dim Y/(W1+W2) by elimination
        w = np.hstack([st_.w1.basis, st_.w2.basis])
        codim = 4 - (gauss_rank(w) if w.shape[1] else 0)
        assert codim == 4 - span_sum(st_.w1, st_.w2).dim


# maslov_triangular -------------------------------------------------------
def test_constant_triangular_path(rng):
    sp = SymplecticSpace.standard(2)
    x, y = splitting(2)
    lam, mu = random_lagrangian(2, rng, k=1), random_lagrangian(2, rng, k=0)
    p = LagrangianPairPath(sp, [(s, lam, mu) for s in np.linspace(0, 1, 4)])
    assert tuple(maslov_triangular(TriangularPath(p, x, y))) == (0, 0)


def test_diagonal_path_degenerates_to_diagonal_formula(rng):
    for _ in range(5):
        path = random_diagonal_path(3, rng, dim_l=1, dim_m=2)
        res = maslov_triangular(path)
        assert res.q_start.m_plus == res.q_start.m_minus == 0
        assert res.q_end.m_plus == res.q_end.m_minus == 0
        dy = [intersect(path.path.lams[i], path.path.mus[i], path.y).dim for i in (0, -1)]
        assert tuple(res) == (dy[0] - dy[1], dy[1] - dy[0])


def test_random_triangular_dim4_cross_engine(rng):
    for _ in range(10):
        path = random_triangular_path(2, rng, dim_a=1, dim_b=0, null_start=int(rng.integers(0, 2)))
        assert tuple(maslov_triangular(path)) == tuple(maslov_index(path.path))


def test_json_round_trip(rng):
    path = random_triangular_path(2, rng, samples=5)
    back = TriangularPath.from_json(json.loads(json.dumps(path.to_json())))
    assert back.x.equals(path.x) and back.y.equals(path.y) and len(back.path) == 5


# maslov_diagonal ----------------------------------------------------------
def test_diagonal_constant_equal_pair():
    sp = SymplecticSpace.standard(2)
    x, y = splitting(2)
    lam = Subspace.coordinate(4, [0, 3])
    p = LagrangianPairPath(sp, [(s, lam, lam) for s in (0.0, 0.5, 1.0)])
    res = maslov_diagonal(TriangularPath(p, x, y))
    assert tuple(res) == (0, 0) and res.consistent


def test_diagonal_rotation_out_of_x_intersection(rng):
    path = random_diagonal_path(2, rng, dim_l=1, dim_m=1, shared_start=1, shared_end=0)
    p = path.path

    def x_dim(i):
        a = intersect(p.lams[i], path.x).basis
        b = intersect(p.mus[i], path.x).basis
        return a.shape[1] + b.shape[1] - gauss_rank(np.hstack([a, b]))

    drop = x_dim(0) - x_dim(len(p) - 1)
    assert drop == 1
    res = maslov_diagonal(path)
    assert res.x_form == (drop, -drop)
    assert res.consistent


def test_non_diagonal_rejected(rng):
    path = random_triangular_path(2, rng, dim_a=0, dim_b=0, samples=5)
    with pytest.raises(StructureError):
        maslov_diagonal(path)


# fixed intersection -------------------------------------------------------
def test_fixed_intersection_graph_path(rng):
    n = 3
    sp = SymplecticSpace.standard(n)
    x, y = splitting(n)
    for _ in range(5):
        s0, s1 = 2 * random_hermitian(n, rng), 2 * random_hermitian(n, rng)
        t0 = 2 * random_hermitian(n, rng)
        ss = np.linspace(0, 1, 41)
        p = LagrangianPairPath(sp, [(s, graph((1 - s) * s0 + s * s1), graph(t0)) for s in ss])
        tp = TriangularPath(p, x, y)
        assert maslov_fixed_intersection(tp) == tuple(maslov_index(p)) == tuple(maslov_triangular(tp))


# invariants ---------------------------------------------------------------
@given(seeds, fields, st.integers(1, 4))
def test_cross_engine_equality(seed, field, n):
    rng = np.random.default_rng(seed)
    path = random_triangular_path(n, rng, field=field)
    tri = maslov_triangular(path)
    eng = maslov_index(path.path)
    assert tuple(tri) == tuple(eng)
    assert tri.nullity_consistent


@given(seeds, fields, st.integers(1, 4))
def test_general_form_cross_engine(seed, field, n):
    rng = np.random.default_rng(seed)
    path = random_triangular_path(n, rng, field=field, general_form=True)
    assert tuple(maslov_triangular(path)) == tuple(maslov_index(path.path))


@given(seeds, fields, st.integers(1, 4))
def test_q_diagonal_indices_half_codimension(seed, field, n):
    rng = np.random.default_rng(seed)
    dim_l = int(rng.integers(0, n + 1))
    sp, x, y, lam, mu, v = random_diagonal_triple(n, rng, field=field, dim_l=dim_l)
    assert all(is_diagonal(s, x, y) for s in (lam, mu, v))
    out = q_diagonal_indices(sp, x, y, lam, mu, v)
    half = n - intersect(lam, mu).dim
    assert half % 2 == 0
    assert out["m_plus"] == out["m_minus"] == half // 2 == out["x_count"] == out["y_count"]
