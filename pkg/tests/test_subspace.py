from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, strategies as st

from oracles import gauss_rank, sampled_delta
from symplindex.subspace import (
    AmbientMismatch, Subspace, delta, fredholm_index, gap, intersect, min_gap,
    relative_dimension, span_sum,
)

seeds = st.integers(0, 2**32 - 1)


def e(d, *idx):
    return Subspace.coordinate(d, idx)


def random_subspace(rng, d, k, field="real"):
    b = rng.standard_normal((d, k))
    if field == "complex":
        b = b + 1j * rng.standard_normal((d, k))
    return Subspace.span(b, d, field)


def correlated_pair(rng, d, ka, kb, shared, field="real"):
    """Two random subspaces sharing ``shared`` random directions."""
    c = rng.standard_normal((d, shared))
    a = np.hstack([c, rng.standard_normal((d, ka - shared))])
    b = np.hstack([c, rng.standard_normal((d, kb - shared))])
    if field == "complex":
        a = a + 1j * np.hstack([np.zeros((d, shared)), rng.standard_normal((d, ka - shared))])
        b = b + 1j * np.hstack([np.zeros((d, shared)), rng.standard_normal((d, kb - shared))])
    return Subspace.span(a, d, field), Subspace.span(b, d, field)


# sum ---------------------------------------------------------------------
def test_sum_of_coordinate_lines():
    assert span_sum(e(3, 0), e(3, 1)).equals(e(3, 0, 1))


def test_sum_idempotent(rng):
    a = random_subspace(rng, 5, 3)
    assert span_sum(a, a).equals(a)


def test_sum_dimension_against_elimination(rng):
    for _ in range(20):
        a, b = correlated_pair(rng, 6, int(rng.integers(1, 5)), int(rng.integers(1, 5)), 0)
        expected = gauss_rank(np.hstack([a.basis, b.basis]))
        assert span_sum(a, b).dim == expected


def test_ambient_mismatch():
    with pytest.raises(AmbientMismatch):
        span_sum(e(3, 0), e(4, 0))
    with pytest.raises(AmbientMismatch):
        intersect(e(3, 0), e(4, 0))


# intersect ---------------------------------------------------------------
def test_intersection_of_coordinate_planes():
    assert intersect(e(3, 0, 1), e(3, 1, 2)).equals(e(3, 1))


def test_intersection_with_ambient(rng):
    a = random_subspace(rng, 4, 2)
    assert intersect(a, Subspace.full(4)).equals(a)


def test_intersection_dimension_identity_dim8(rng):
    for _ in range(20):
        ka, kb = int(rng.integers(2, 7)), int(rng.integers(2, 7))
        shared = int(rng.integers(0, min(ka, kb) + 1))
        a, b = correlated_pair(rng, 8, ka, kb, shared)
        oracle = a.dim + b.dim - gauss_rank(np.hstack([a.basis, b.basis]))
        got = intersect(a, b)
        assert got.dim == oracle
        assert got.is_subset(a) and got.is_subset(b)


# fredholm index ----------------------------------------------------------
def test_index_complementary():
    assert fredholm_index(e(4, 0, 1), e(4, 2, 3)) == 0


def test_index_equal_planes():
    assert fredholm_index(e(4, 0, 1), e(4, 0, 1)) == 0


def test_index_finite_perturbation(rng):
    # enlarging a by one dimension raises the index by one
    for _ in range(10):
        a2, b = correlated_pair(rng, 6, 2, 3, 1)
        v = rng.standard_normal(6)
        a1 = span_sum(a2, Subspace.span(v[:, None], 6))
        assert fredholm_index(a1, b) == fredholm_index(a2, b) + relative_dimension(a1, a2)
        assert relative_dimension(a1, a2) == 1


# gap ---------------------------------------------------------------------
def test_gap_self_zero(rng):
    a = random_subspace(rng, 5, 2)
    assert gap(a, a) == pytest.approx(0.0, abs=1e-12)


def test_gap_orthogonal_lines():
    assert gap(e(2, 0), e(2, 1)) == pytest.approx(1.0)


def test_gap_rotated_line_against_sampling():
    th = np.pi / 6
    a = e(2, 0)
    b = Subspace.span(np.array([[np.cos(th)], [np.sin(th)]]), 2)
    rng = np.random.default_rng(0)
    sampled = max(sampled_delta(a.basis, b.basis, rng, 50), sampled_delta(b.basis, a.basis, rng, 50))
    assert gap(a, b) == pytest.approx(np.sin(th), abs=1e-12)
    assert sampled == pytest.approx(np.sin(th), abs=1e-12)


def test_delta_against_sampling(rng):
    for _ in range(5):
        a, b = random_subspace(rng, 4, 2), random_subspace(rng, 4, 2)
        s = sampled_delta(a.basis, b.basis, rng, 3000)
        d = delta(a, b)
        assert s <= d + 1e-12
        assert d - s < 5e-2


def test_min_gap_bounds(rng):
    for _ in range(10):
        a, b = correlated_pair(rng, 6, 3, 3, 1)
        g = min_gap(a, b)
        assert 0.0 < g <= 1.0
        # the minimum gap is attained below the one-sided gap
        assert g <= delta(a, b) + 1e-12


# relative dimension ------------------------------------------------------
def test_relative_dimension_self(rng):
    m = random_subspace(rng, 5, 3)
    assert relative_dimension(m, m) == 0


def test_relative_dimension_values(rng):
    m, n = random_subspace(rng, 5, 3), random_subspace(rng, 5, 1)
    assert relative_dimension(m, n) == 2


def test_relative_dimension_is_index_difference(rng):
    for _ in range(10):
        m, n = random_subspace(rng, 6, int(rng.integers(1, 6))), random_subspace(rng, 6, int(rng.integers(1, 6)))
        w = random_subspace(rng, 6, int(rng.integers(1, 6)))
        assert fredholm_index(m, w) - fredholm_index(n, w) == relative_dimension(m, n)


# JSON --------------------------------------------------------------------
def test_json_round_trip(rng):
    a = random_subspace(rng, 4, 2, "complex")
    b = Subspace.from_json(a.to_json())
    assert b.field == "complex" and b.equals(a)
    z = Subspace.zero(3)
    assert Subspace.from_json(z.to_json()).dim == 0


def test_dependent_basis_rejected():
    with pytest.raises(ValueError):
        Subspace(np.array([[1.0, 2.0], [1.0, 2.0]]))


# invariants --------------------------------------------------------------
@given(seeds, st.integers(2, 7), st.sampled_from(["real", "complex"]))
def test_dimension_identity(seed, d, field):
    rng = np.random.default_rng(seed)
    ka, kb = int(rng.integers(0, d + 1)), int(rng.integers(0, d + 1))
    shared = int(rng.integers(0, min(ka, kb) + 1))
    a, b = correlated_pair(rng, d, ka, kb, shared, field)
    assert span_sum(a, b).dim + intersect(a, b).dim == a.dim + b.dim


@given(seeds, st.integers(2, 7))
def test_index_symmetric(seed, d):
    rng = np.random.default_rng(seed)
    a, b = correlated_pair(rng, d, int(rng.integers(0, d + 1)), int(rng.integers(0, d + 1)), 0)
    assert fredholm_index(a, b) == fredholm_index(b, a)


@given(seeds)
def test_modular_dimension_identity(seed):
    rng = np.random.default_rng(seed)
    d = 6
    v1, v2, v3 = (random_subspace(rng, d, int(rng.integers(1, 5))) for _ in range(3))
    lhs = intersect(v2, span_sum(v1, v3)).dim + intersect(v1, v3).dim
    rhs = intersect(v1, span_sum(v2, v3)).dim + intersect(v2, v3).dim
    assert lhs == rhs


@given(seeds, st.integers(2, 6))
def test_gap_zero_iff_equal(seed, d):
    rng = np.random.default_rng(seed)
    k = int(rng.integers(1, d))
    a = random_subspace(rng, d, k)
    mix = rng.standard_normal((k, k)) + 3 * np.eye(k)
    same = Subspace.span(a.basis @ mix, d)
    other = random_subspace(rng, d, k)
    assert gap(a, same) < 1e-10 and a.equals(same)
    assert gap(a, other) > 1e-6 and not a.equals(other)
    assert gap(a, other) <= 1.0
