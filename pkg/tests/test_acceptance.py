"""Acceptance criteria 1-10 at their stated sizes and tolerances.

Each criterion is computed once (cached) and summarized by one line in the
terminal summary. Parts that fail faithfully because of a defect in the
stated identity are marked ``xfail(strict=True)``: they must keep failing,
and they never hide the passing parts of the same criterion.
"""

from __future__ import annotations

import time
from functools import lru_cache

import numpy as np
import pytest

from acceptance_log import record
from paths import flow_pair_path
from symplindex.generators import (
    random_block_triangular, random_diagonal_path, random_diagonal_triple, random_index_form,
    random_symplectic_path, random_triangular_path,
)
from symplindex.maslov import NoTransversalFound, maslov_index
from symplindex.morse_oracle import verify_iteration_corollary, verify_mod2_corollary
from symplindex.quadform import morse
from symplindex.relations import LinearRelation, Splitting, verify_appendix_estimates
from symplindex.spgroup import f_value, iterate, mod2_index, path_from_identity, splitting_numbers
from symplindex.subspace import Subspace, intersect
from symplindex.triangular import maslov_diagonal, maslov_triangular, q_diagonal_indices

pytestmark = pytest.mark.acceptance

FIELDS = ("real", "complex")


def _frac(hits: int, total: int) -> str:
    return f"{hits}/{total}"


# 1 and 2: triangular formula and nullity formula ------------------------------------

@lru_cache(maxsize=None)
def _triangular_run():
    rows = []
    start = time.perf_counter()
    for i in range(200):
        rng = np.random.default_rng(1000 + i)
        n = 1 + i % 4
        field = FIELDS[(i // 4) % 2]
        dim_a = int(rng.integers(0, n // 2 + 1))
        dim_b = int(rng.integers(0, n // 2 + 1))
        shared = int(rng.integers(0, min(dim_a, dim_b) + 1))
        core = n - (dim_a + dim_b - shared)
        # every fourth path starts or ends on a crossing of the relation form
        nulls = (int(rng.integers(0, core + 1)), int(rng.integers(0, core + 1))) if i % 4 == 3 else (0, 0)
        tp = random_triangular_path(n, rng, field=field, dim_a=dim_a, dim_b=dim_b, shared=shared,
                                    null_start=nulls[0], null_end=nulls[1], general_form=i % 3 == 2)
        tri = maslov_triangular(tp)
        eng = maslov_index(tp.path)
        rows.append((tuple(tri) == tuple(eng), tri.nullities == tri.intersection_dims, len(tri.nullities)))
    return rows, time.perf_counter() - start


def test_criterion_1_triangular_formula_equals_engine():
    rows, elapsed = _triangular_run()
    hits = sum(r[0] for r in rows)
    ok = hits == len(rows) >= 200 and elapsed < 60.0
    record(1, ok, f"triangular formula = engine on {_frac(hits, len(rows))} paths, 2n in {{2,4,6,8}}, "
                  f"{elapsed:.1f} s (target < 60 s)")
    assert hits == len(rows) >= 200
    assert elapsed < 60.0


def test_criterion_2_nullity_formula_at_every_sample():
    rows, _ = _triangular_run()
    hits = sum(r[1] for r in rows)
    samples = sum(r[2] for r in rows)
    ok = hits == len(rows)
    record(2, ok, f"dim(lam & mu) = dim ker Q + dim(A & B) at every sample on {_frac(hits, len(rows))} paths "
                  f"({samples} samples)")
    assert ok


# 3: splitting numbers -----------------------------------------------------------------

def _unit_spectrum(n, field, rng):
    if field == "real":
        # real blocks: unit eigenvalues are +-1 or conjugate pairs
        opts = [[1.0], [-1.0]]
        if n >= 2:
            a = rng.uniform(0.2, np.pi - 0.2)
            opts += [[np.exp(1j * a)], [1.0, np.exp(1j * a)]]
        if n >= 4:
            b = rng.uniform(0.2, np.pi - 0.2)
            opts.append([np.exp(1j * a), np.exp(1j * b)])
        return opts[int(rng.integers(len(opts)))]
    angles = rng.uniform(0.2, 2 * np.pi - 0.2, size=int(rng.integers(1, n + 1)))
    unit = [np.exp(1j * t) for t in angles]
    if rng.random() < 0.3:
        unit[0] = 1.0
    return unit


def _targets(unit, field):
    zs = [complex(z) for z in unit]
    if field == "real":
        zs += [z.conjugate() for z in zs if abs(z.imag) > 0]
    return zs


@lru_cache(maxsize=None)
def _splitting_run():
    rows = []
    for i in range(120):
        rng = np.random.default_rng(3000 + i)
        n = 1 + i % 4
        field = FIELDS[(i // 4) % 2]
        kind = ("upper", "lower")[(i // 8) % 2]
        unit = _unit_spectrum(n, field, rng)
        sp, x, y, m = random_block_triangular(n, rng, field=field, kind=kind, unit=unit,
                                              general_form=i % 5 == 4)
        for z in _targets(unit, field):
            f = splitting_numbers(sp, m, z, "formula", x, y)
            o = splitting_numbers(sp, m, z, "oracle")
            rows.append((i, (f.s_minus_pair, f.s_plus_pair) == (o.s_minus_pair, o.s_plus_pair)))
    return rows


def test_criterion_3_splitting_formula_equals_oracle():
    rows = _splitting_run()
    matrices = len({r[0] for r in rows})
    hits = sum(r[1] for r in rows)
    ok = hits == len(rows) and matrices >= 100
    record(3, ok, f"all four splitting numbers formula = oracle at {_frac(hits, len(rows))} eigenvalues "
                  f"of {matrices} block-triangular matrices, dims 2-8")
    assert ok


# 4 and 5: diagonal formulas --------------------------------------------------------------

@lru_cache(maxsize=None)
def _diagonal_run():
    rows = []
    for i in range(100):
        rng = np.random.default_rng(4000 + i)
        n = 1 + i % 4
        tp = random_diagonal_path(n, rng, field=FIELDS[(i // 4) % 2])
        dg = maslov_diagonal(tp)
        eng = tuple(maslov_index(tp.path))
        rows.append(tuple(dg.half_difference) == tuple(dg.x_form) == tuple(dg.y_form) == eng)
    return rows


def test_criterion_4_diagonal_formula():
    rows = _diagonal_run()
    ok = all(rows) and len(rows) >= 100
    record(4, ok, f"half-difference = X-form = Y-form = engine on {_frac(sum(rows), len(rows))} diagonal paths")
    assert ok


@lru_cache(maxsize=None)
def _triple_run():
    rows = []
    for i in range(120):
        rng = np.random.default_rng(5000 + i)
        n = 1 + i % 4
        dim_l = int(rng.integers(0, n + 1))
        shared = int(rng.integers(max(0, 2 * dim_l - n), dim_l + 1))
        sp, x, y, lam, mu, v = random_diagonal_triple(n, rng, field=FIELDS[(i // 4) % 2],
                                                      dim_l=dim_l, shared=shared)
        out = q_diagonal_indices(sp, x, y, lam, mu, v)
        twice = n - intersect(lam, mu).dim
        rows.append((twice, twice % 2 == 0 and out["m_plus"] == out["m_minus"] == twice // 2))
    return rows


def test_criterion_5_triple_form_indices():
    rows = _triple_run()
    hits = sum(r[1] for r in rows)
    nontrivial = sum(r[0] > 0 for r in rows)
    ok = hits == len(rows) >= 100
    record(5, ok, f"m+-(Q(mu, V; lam)) = (n - dim(lam & mu))/2 on {_frac(hits, len(rows))} triples, n <= 4 "
                  f"({nontrivial} with nonzero value)")
    assert ok


# 6: iteration frame identity and triangular closed forms -----------------------------------

@lru_cache(maxsize=None)
def _iteration_run():
    rows = []
    for i in range(60):
        rng = np.random.default_rng(6000 + i)
        n = 1 + i % 2
        field = FIELDS[(i // 2) % 2]
        kind = ("upper", "lower")[(i // 4) % 2]
        k = 1 + i % 5
        unit = [1.0] if i % 3 == 0 else []
        sp, x, y, p = random_block_triangular(n, rng, field=field, kind=kind, unit=unit)
        gamma = random_symplectic_path(n, rng, field=field)
        rep = iterate(gamma, p, k, x, y)
        direct = f_value(path_from_identity(sp, p), np.eye(2 * n), k)
        rows.append(dict(frame=rep.frame_identity, index=rep.closed_form == direct,
                         printed=rep.power_error["printed"], telescoped=rep.power_error["telescoped"], k=k))
    return rows


def _iteration_counts():
    rows = _iteration_run()
    frame = sum(r["frame"] for r in rows)
    index = sum(r["index"] for r in rows)
    printed = sum(r["printed"] <= 1e-10 for r in rows)
    telescoped = sum(r["telescoped"] <= 1e-10 for r in rows)
    return len(rows), frame, index, printed, telescoped


def test_criterion_6_frame_identity_and_index_closed_form():
    total, frame, index, printed, telescoped = _iteration_counts()
    ok = frame == index == printed == total >= 50
    record(6, ok, f"frame identity {_frac(frame, total)}, f(k,P,I) closed form {_frac(index, total)}, "
                  f"P^k printed block within 1e-10 {_frac(printed, total)} "
                  f"(telescoped block {_frac(telescoped, total)}), k <= 5")
    assert frame == index == total >= 50
    assert telescoped == total


@pytest.mark.xfail(strict=True, reason="the printed off-diagonal block of P^k is not the matrix power")
def test_criterion_6_power_closed_form_matrix_side():
    total, _, _, printed, _ = _iteration_counts()
    assert printed == total


# 7: mod-2 identity -------------------------------------------------------------------------

def _gap_safe(m, sep=1e-3):
    ev = np.linalg.eigvals(m)
    if np.min(np.abs(ev - 1.0)) <= sep or np.min(np.abs(ev + 1.0)) <= sep:
        return False
    d = np.abs(ev[:, None] - ev[None, :]) + np.eye(len(ev))
    return bool(d.min() > sep)


@lru_cache(maxsize=None)
def _mod2_run():
    rows = []
    seed = 7000
    while len(rows) < 100:
        rng = np.random.default_rng(seed)
        seed += 1
        n = 1 + len(rows) % 3
        path = random_symplectic_path(n, rng, field="real")
        if not _gap_safe(path.end):
            continue
        rep = mod2_index(path)
        rows.append(dict(parity=rep.parity_holds, sign=rep.sign_holds, elliptic=rep.elliptic,
                         corrected=rep.lhs % 2 == rep.rhs_with_elliptic % 2,
                         corrected_sign=rep.sign_d == -(-1) ** (rep.tilde_alpha_end + rep.elliptic)))
    return rows


def test_criterion_7_mod2_line_and_corrected_identity():
    rows = _mod2_run()
    total = len(rows)
    parity = sum(r["parity"] for r in rows)
    sign = sum(r["sign"] for r in rows)
    corrected = sum(r["corrected"] for r in rows)
    corrected_sign = sum(r["corrected_sign"] for r in rows)
    hyper = [r for r in rows if r["elliptic"] == 0]
    ok = parity == sign == total >= 100
    record(7, ok, f"parity {_frac(parity, total)}, sign {_frac(sign, total)} on real paths n <= 3; "
                  f"with the elliptic count U: parity {_frac(corrected, total)}, sign {_frac(corrected_sign, total)}")
    # the identities hold wherever the endpoint has no elliptic spectrum
    assert all(r["parity"] and r["sign"] for r in hyper) and hyper
    assert corrected == corrected_sign == total >= 100


@pytest.mark.xfail(strict=True, reason="parity and sign identities omit the elliptic eigenvalue count")
def test_criterion_7_mod2_stated_identity():
    rows = _mod2_run()
    assert all(r["parity"] and r["sign"] for r in rows)


# 8: Morse-oracle corollaries ------------------------------------------------------------------

@lru_cache(maxsize=None)
def _morse_run():
    rows = []
    start = time.perf_counter()
    # every holonomy type at every (n, k); random holonomy is the generic case and is drawn twice
    holonomies = ("minus_identity", "identity", "reflection", "random", "random")
    grid = [(hol, n, k) for hol in holonomies for n in (1, 2) for k in (1, 2, 3)]
    for i, (hol, n, k) in enumerate(grid):
        rng = np.random.default_rng(8000 + i)
        data = random_index_form(n, rng, holonomy=hol)
        it = verify_iteration_corollary(data, k)
        m2 = verify_mod2_corollary(data)
        stable = all(h[-1][1] == h[-2][1] for h in it.mesh_history.values())
        rows.append(dict(hol=hol, iteration=it.holds, iteration_inverse=it.holds_inverse, parity=m2.holds,
                         parity_corrected=m2.parity_with_elliptic and m2.inverse["parity_with_elliptic"],
                         stable=stable))
    return rows, time.perf_counter() - start


def test_criterion_8_mesh_stability_and_inverse_holonomy():
    rows, elapsed = _morse_run()
    total = len(rows)
    it = sum(r["iteration"] for r in rows)
    inv = sum(r["iteration_inverse"] for r in rows)
    par = sum(r["parity"] for r in rows)
    stable = sum(r["stable"] for r in rows)
    ok = it == par == stable == total >= 20 and elapsed < 300
    record(8, ok, f"iteration equality {_frac(it, total)} (with P^-1: {_frac(inv, total)}), "
                  f"mod-2 parity {_frac(par, total)}, mesh-stable {_frac(stable, total)}, "
                  f"n <= 2, k <= 3, {elapsed:.0f} s (target < 300 s)")
    assert any(r["hol"] == "minus_identity" for r in rows)
    assert stable == inv == total >= 20
    assert elapsed < 300
    # both holonomy conventions agree when a is an involution
    assert all(r["iteration"] for r in rows if r["hol"] in ("identity", "minus_identity"))


@pytest.mark.xfail(strict=True, reason="printed holonomy P should be its inverse; the mod-2 identity omits "
                                       "the elliptic eigenvalue count")
def test_criterion_8_stated_corollaries():
    rows, _ = _morse_run()
    assert all(r["iteration"] and r["parity"] for r in rows)


# 9: appendix inequality suite ----------------------------------------------------------------

def _relation(rng, x, y, k, field):
    v = rng.standard_normal((x + y, k))
    if field == "complex":
        v = v + 1j * rng.standard_normal((x + y, k))
    return LinearRelation(x, y, Subspace.span(v, x + y, field))


def _perturbed(rng, rel, eps):
    b = rel.carrier.basis
    noise = rng.standard_normal(b.shape)
    if np.iscomplexobj(b):
        noise = noise + 1j * rng.standard_normal(b.shape)
    return LinearRelation(rel.x_dim, rel.y_dim, Subspace.span(b + eps * noise, b.shape[0], rel.carrier.field))


def _pair(seed):
    rng = np.random.default_rng(seed)
    x, y = int(rng.integers(1, 5)), int(rng.integers(1, 5))
    field = "complex" if seed % 4 == 3 else "real"
    k = int(rng.integers(1, x + y))
    m = _relation(rng, x, y, k, field)
    n = _perturbed(rng, m, float(rng.choice([1e-3, 1e-2, 1e-1])))
    return rng, m, n


@lru_cache(maxsize=None)
def _appendix_run():
    rows = []
    for i in range(100):
        rng, m, n = _pair(9000 + i)
        rep = verify_appendix_estimates(m, n, rng=rng)
        rows.append([v.name for v in rep.violations])
    return rows


@lru_cache(maxsize=None)
def _appendix_gram_run():
    rows = []
    for i in range(30):
        rng, m, n = _pair(9500 + i)
        d = m.x_dim + m.y_dim
        g = rng.standard_normal((d, d))
        split = Splitting(m.x_dim, m.y_dim, g @ g.T + 0.5 * np.eye(d))
        rep = verify_appendix_estimates(m, n, split, rng=rng)
        rows.append([v.name for v in rep.violations])
    return rows


def test_criterion_9_appendix_suite():
    rows = _appendix_run()
    clean = sum(not r for r in rows)
    gram = _appendix_gram_run()
    gram_bad = sorted({name for r in gram for name in r})
    ok = clean == len(rows) >= 100
    record(9, ok, f"0 violations beyond 1e-9 on {_frac(clean, len(rows))} relation pairs, x, y <= 4 "
                  f"(Gram-norm variant: {_frac(sum(not r for r in gram), len(gram))} clean, "
                  f"failing: {', '.join(gram_bad) or 'none'})")
    assert ok, [r for r in rows if r]


@pytest.mark.xfail(strict=True, reason="the gamma(M, Y) estimate fails for non-Euclidean Gram norms")
def test_criterion_9_gram_norm_variant():
    assert all(not r for r in _appendix_gram_run())


# 10: invariance suite -------------------------------------------------------------------------

def _additivity(seed):
    rng = np.random.default_rng(seed)
    n, field = 1 + seed % 3, FIELDS[seed % 2]
    whole, data = flow_pair_path(n, rng, field, samples=41)
    left, _ = flow_pair_path(n, rng, field, samples=21, t1=0.5, data=data)
    right, _ = flow_pair_path(n, rng, field, samples=21, t0=0.5, data=data)
    parts = np.add(tuple(maslov_index(left)), tuple(maslov_index(right)))
    return tuple(maslov_index(whole)) == tuple(int(v) for v in parts) == tuple(maslov_index(left.concat(right)))


def _homotopy(seed):
    rng = np.random.default_rng(seed)
    n, field = 1 + seed % 2, FIELDS[seed % 2]
    base, data = flow_pair_path(n, rng, field)
    ref = tuple(maslov_index(base))
    return all(tuple(maslov_index(flow_pair_path(n, rng, field, bend=b, data=data)[0])) == ref
               for b in (0.25, 0.5, 1.0))


def _localization(seed):
    rng = np.random.default_rng(seed)
    n, field = 1 + seed % 3, FIELDS[seed % 2]
    path, _ = flow_pair_path(n, rng, field)
    try:
        glob = maslov_index(path, method="global")
    except NoTransversalFound:
        return None
    return tuple(maslov_index(path, method="local")) == tuple(glob)


def _congruence(seed):
    rng = np.random.default_rng(seed)
    k = int(rng.integers(1, 7))
    vals = rng.choice([-1.0, 1.0], size=k) * rng.uniform(0.5, 3.0, size=k)
    vals[rng.random(k) < 0.2] = 0.0
    s = rng.standard_normal((k, k))
    if seed % 2:
        s = s + 1j * rng.standard_normal((k, k))
    s = s + 2.0 * np.eye(k)
    d = np.diag(vals)
    expected = (int(np.sum(vals > 0)), int(np.sum(vals < 0)), int(np.sum(vals == 0)))
    return tuple(morse(s.conj().T @ d @ s)) == tuple(morse(d)) == expected


@lru_cache(maxsize=None)
def _invariance_run():
    out = {}
    out["additivity"] = [_additivity(10000 + i) for i in range(50)]
    out["homotopy"] = [_homotopy(11000 + i) for i in range(50)]
    loc, seed = [], 12000
    while len(loc) < 50:
        r = _localization(seed)
        seed += 1
        if r is not None:
            loc.append(r)
    out["localization"] = loc
    out["congruence"] = [_congruence(13000 + i) for i in range(50)]
    return out


def test_criterion_10_invariance_suite():
    out = _invariance_run()
    ok = all(all(v) and len(v) >= 50 for v in out.values())
    record(10, ok, "; ".join(f"{key} {_frac(sum(v), len(v))}" for key, v in out.items()))
    assert ok, {key: sum(v) for key, v in out.items()}
