from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, strategies as st

from oracles import gauss_rank, omega_gram
from symplindex.generators import random_lagrangian
from symplindex.subspace import Subspace, intersect, span_sum, fredholm_index
from symplindex.symplectic import (
    NotCoisotropic, NotIsotropic, SymplecticSpace, annihilator, classify, diagonal_part,
    reduce, standard_form, triple_form,
)

seeds = st.integers(0, 2**32 - 1)
fields = st.sampled_from(["real", "complex"])


def rand_sub(rng, d, k, field="real"):
    b = rng.standard_normal((d, k))
    if field == "complex":
        b = b + 1j * rng.standard_normal((d, k))
    return Subspace.span(b, d, field)


def splitting(n, field="real"):
    x = Subspace.span(np.vstack([np.eye(n), np.zeros((n, n))]), 2 * n, field)
    y = Subspace.span(np.vstack([np.zeros((n, n)), np.eye(n)]), 2 * n, field)
    return x, y


def test_standard_form_layout():
    om = standard_form(2)
    assert np.array_equal(om, np.block([[np.zeros((2, 2)), -np.eye(2)], [np.eye(2), np.zeros((2, 2))]]))


def test_degenerate_and_symmetric_forms_rejected():
    with pytest.raises(ValueError):
        SymplecticSpace(np.zeros((2, 2)))
    with pytest.raises(ValueError):
        SymplecticSpace(np.eye(2))


# annihilator ------------------------------------------------------------
def test_annihilator_of_zero():
    sp = SymplecticSpace.standard(2)
    assert annihilator(sp, Subspace.zero(4)).dim == 4


def test_annihilator_of_line_in_plane():
    sp = SymplecticSpace.standard(1)
    e1 = Subspace.coordinate(2, [0])
    assert annihilator(sp, e1).equals(e1)


def test_annihilator_involution_dim6(rng):
    sp = SymplecticSpace.standard(3)
    for k in range(7):
        v = rand_sub(rng, 6, k)
        ann = annihilator(sp, v)
        assert ann.dim == 6 - k
        assert annihilator(sp, ann).equals(v)


# classify ---------------------------------------------------------------
def test_classify_zero_is_isotropic():
    assert classify(SymplecticSpace.standard(2), Subspace.zero(4)) == "isotropic"


def test_classify_coordinate_lagrangian():
    x, _ = splitting(3)
    assert classify(SymplecticSpace.standard(3), x) == "lagrangian"


def test_classify_graphs_against_direct_evaluation(rng):
    n = 3
    sp = SymplecticSpace.standard(n)
    for _ in range(10):
        g = rng.standard_normal((n, n))
        sym = g + g.T
        for mat, expect in ((sym, "lagrangian"), (g - g.T + 0.1 * np.eye(n), "none")):
            basis = np.vstack([np.eye(n), mat])
            oracle_iso = np.abs(omega_gram(sp.form, basis)).max() < 1e-9
            got = classify(sp, Subspace.span(basis, 2 * n))
            assert got == expect
            assert oracle_iso == (expect == "lagrangian")


def test_classify_symplectic_plane():
    sp = SymplecticSpace.standard(2)
    plane = Subspace.coordinate(4, [0, 2])
    assert classify(sp, plane) == "symplectic"


# reduce -----------------------------------------------------------------
def test_reduce_by_whole_space_is_identity(rng):
    sp = SymplecticSpace.standard(2)
    lam = random_lagrangian(2, rng)
    r, image = reduce(sp, Subspace.full(4), lam)
    assert r.dim == 4
    assert Subspace.span(r.lift(image.basis), 4).equals(lam)


def test_reduce_by_lagrangian_is_zero(rng):
    sp = SymplecticSpace.standard(2)
    w = random_lagrangian(2, rng)
    r, image = reduce(sp, w, random_lagrangian(2, rng))
    assert r.dim == 0 and r.space is None and image is None


def test_reduce_rejects_non_coisotropic():
    sp = SymplecticSpace.standard(2)
    with pytest.raises(NotCoisotropic):
        reduce(sp, Subspace.coordinate(4, [0]))


def test_reduce_hyperplane_dimension_oracle(rng):
    # W of dim 2n-1 (n=2), lam Lagrangian; quotient dims by ranks
    sp = SymplecticSpace.standard(2)
    for _ in range(20):
        w = rand_sub(rng, 4, 3)
        lam = random_lagrangian(2, rng)
        r, image = reduce(sp, w, lam)
        w_om = annihilator(sp, w)
        # dim ((lam + W^om) & W) / W^om by rank oracles
        s = np.hstack([lam.basis, w_om.basis])
        dim_sum = gauss_rank(s)
        dim_cap = dim_sum + w.dim - gauss_rank(np.hstack([s, w.basis]))
        assert image.dim == dim_cap - w_om.dim
        assert r.space.is_lagrangian(image)


@given(seeds, fields)
def test_reduce_preserves_lagrangian_pairs(seed, field):
    rng = np.random.default_rng(seed)
    n = 3
    sp = SymplecticSpace(standard_form(n), field)
    iso = random_lagrangian(n, rng, field)
    w = annihilator(sp, Subspace.span(iso.basis[:, :1], 2 * n, field))
    lam, mu = random_lagrangian(n, rng, field), random_lagrangian(n, rng, field)
    r = reduce(sp, w)
    a, b = r.image(lam), r.image(mu)
    assert r.space.is_lagrangian(a) and r.space.is_lagrangian(b)
    assert fredholm_index(a, b) == 0


# triple form ------------------------------------------------------------
def test_triple_form_alpha_equals_gamma(rng):
    sp = SymplecticSpace.standard(2)
    a, b = random_lagrangian(2, rng), random_lagrangian(2, rng)
    tf = triple_form(sp, a, b, a)
    assert np.allclose(tf.matrix, 0.0, atol=1e-10)


def test_triple_form_hand_evaluation():
    sp = SymplecticSpace.standard(1)
    e1, e2 = Subspace.coordinate(2, [0]), Subspace.coordinate(2, [1])
    g = Subspace.span(np.array([[1.0], [1.0]]), 2)
    tf = triple_form(sp, e1, e2, g)
    # z = (e1 + e2)/sqrt 2, x = e1/sqrt 2, y = e2/sqrt 2
    assert tf.matrix.shape == (1, 1)
    assert tf.matrix[0, 0] == pytest.approx(0.5 * sp.omega(np.array([1.0, 0.0]), np.array([0.0, 1.0])))
    assert tf.evaluate(g.basis[:, 0], g.basis[:, 0]) == pytest.approx(tf.matrix[0, 0])
    z = np.array([1.0, 1.0])
    assert tf.evaluate(z, z) == pytest.approx(sp.omega(np.array([1.0, 0.0]), np.array([0.0, 1.0])))


def test_triple_form_rejects_non_isotropic():
    sp = SymplecticSpace.standard(2)
    with pytest.raises(NotIsotropic):
        triple_form(sp, Subspace.coordinate(4, [0, 2]), Subspace.coordinate(4, [1]), Subspace.coordinate(4, [0]))


def test_triple_form_kernel_contains_intersections(rng):
    sp = SymplecticSpace.standard(3)
    for _ in range(10):
        a, b, g = (random_lagrangian(3, rng) for _ in range(3))
        tf = triple_form(sp, a, b, g)
        for part in (intersect(a, g), intersect(b, g)):
            if part.dim:
                c = tf.carrier.basis.conj().T @ part.basis
                assert np.linalg.norm(tf.matrix @ c) < 1e-8


# diagonal part -----------------------------------------------------------
def test_diagonal_part_of_diagonal_lagrangian():
    x, y = splitting(2)
    sp = SymplecticSpace.standard(2)
    lam = Subspace.coordinate(4, [0, 3])
    dp = diagonal_part(sp, x, y, lam)
    for t in (0.0, 0.3, 1.0):
        assert dp.homotopy(t).equals(lam)


def test_diagonal_part_of_invertible_graph(rng):
    x, y = splitting(2)
    sp = SymplecticSpace.standard(2)
    s = np.diag([1.0, -2.0])
    lam = Subspace.span(np.vstack([np.eye(2), s]), 4)
    assert diagonal_part(sp, x, y, lam).alpha0.equals(x)


def test_diagonal_part_homotopy_lagrangian_dim6(rng):
    x, y = splitting(3)
    sp = SymplecticSpace.standard(3)
    for k in range(4):
        lam = random_lagrangian(3, rng, k=k)
        dp = diagonal_part(sp, x, y, lam)
        half = dp.homotopy(0.5)
        assert classify(sp, half) == "lagrangian"
        assert dp.homotopy(1.0).equals(lam)
        assert intersect(half, y).equals(dp.w)
        assert intersect(dp.alpha0, y).equals(dp.w)


# invariants ---------------------------------------------------------------
@given(seeds, fields)
def test_annihilator_of_sum_is_intersection(seed, field):
    rng = np.random.default_rng(seed)
    sp = SymplecticSpace(standard_form(3), field)
    us = [rand_sub(rng, 6, int(rng.integers(0, 4)), field) for _ in range(3)]
    lhs = annihilator(sp, span_sum(*us))
    rhs = intersect(*(annihilator(sp, u) for u in us))
    assert lhs.equals(rhs)


@given(seeds, fields)
def test_complement_to_lagrangian(seed, field):
    rng = np.random.default_rng(seed)
    n = 3
    sp = SymplecticSpace(standard_form(n), field)
    lam = random_lagrangian(n, rng, field)
    v = rand_sub(rng, 2 * n, int(rng.integers(1, n + 1)), field)
    if intersect(v, lam).dim:
        return
    ann = annihilator(sp, v)
    assert lam.dim - intersect(ann, lam).dim == v.dim
    assert span_sum(ann, lam).dim == 2 * n


@given(seeds, fields, st.integers(1, 3))
def test_two_finite_equivalence(seed, field, k):
    rng = np.random.default_rng(seed)
    sp = SymplecticSpace(standard_form(3), field)
    v = rand_sub(rng, 6, k, field)
    # W either generic or forced to meet V^omega
    w = rand_sub(rng, 6, k, field)
    if rng.random() < 0.5:
        ann = annihilator(sp, v)
        w = Subspace.span(np.hstack([ann.basis[:, :1], w.basis[:, 1:]]), 6, field)
    left = intersect(v, annihilator(sp, w)).dim == 0
    right = intersect(annihilator(sp, v), w).dim == 0
    assert left == right
