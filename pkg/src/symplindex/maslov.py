"""Maslov indices of sampled paths of Lagrangian pairs by local charts.

A chart based at a sample fixes an isotropic ``V`` of dimension ``k`` paired
with the ``k`` directions of ``lambda`` closest to ``mu``. On every sample of
the chart the pair splits into a ``2k``-dimensional piece
``X0 = V + lambda0`` carrying all intersections and a transversal remainder,
and ``lambda0`` is the graph of ``A: mu0 -> W`` over a Lagrangian ``W`` of
``X0``. The form ``Q(x, y) = omega(x, A y)`` changes its Morse indices only
through crossings, so each chart contributes ``m+(Q_end) - m+(Q_start)`` to
``Mas+`` and ``m-(Q_start) - m-(Q_end)`` to ``Mas-``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from ._config import get_tolerances
from .quadform import morse
from .subspace import Subspace, intersect, span_sum
from .symplectic import (
    NotLagrangian,
    SymplecticSpace,
    annihilator,
    darboux_complement,
)

__all__ = [
    "LagrangianPairPath",
    "LocalizationData",
    "MaslovResult",
    "NoTransversalFound",
    "NotLagrangian",
    "localize",
    "maslov_index",
]

_SHIFTS = (0.0, 1.0, -1.0, 0.5, -0.5, 2.0, -2.0)
_MARGIN = 1e-3
_MAX_STEP = 0.1


class NoTransversalFound(RuntimeError):
    """No chart covers a stretch of the path within the refinement budget."""


Generator = Callable[[float], tuple]


class LagrangianPairPath:
    """Samples ``(s_i, lambda_i, mu_i)`` of a path of Lagrangian pairs.

    Parameters
    ----------
    space : SymplecticSpace or sequence of SymplecticSpace
        A fixed space, or one space per sample when the form varies.
    samples : sequence of (s, lam, mu)
        Strictly increasing parameters with Lagrangian subspaces.
    generator : callable, optional
        ``s -> (lam, mu)`` or ``s -> (lam, mu, space)``; used to insert extra
        samples when the given ones are too coarse.
    """

    def __init__(self, space, samples: Sequence[tuple], generator: Generator | None = None,
                 validate: bool = True):
        if len(samples) < 1:
            raise ValueError("a path needs at least one sample")
        s = np.array([float(x[0]) for x in samples])
        if np.any(np.diff(s) <= 0):
            raise ValueError("sample parameters must be strictly increasing")
        if isinstance(space, SymplecticSpace):
            spaces = [space] * len(samples)
        else:
            spaces = list(space)
            if len(spaces) != len(samples):
                raise ValueError("one space per sample is required")
        self.params = s
        self.lams = [x[1] for x in samples]
        self.mus = [x[2] for x in samples]
        self.spaces = spaces
        self.generator = generator
        if validate:
            for i, (sp, lam, mu) in enumerate(zip(self.spaces, self.lams, self.mus)):
                if not sp.is_lagrangian(lam):
                    raise NotLagrangian(f"lambda at sample {i} (s={s[i]:g}) is not Lagrangian")
                if not sp.is_lagrangian(mu):
                    raise NotLagrangian(f"mu at sample {i} (s={s[i]:g}) is not Lagrangian")

    @classmethod
    def from_generator(cls, generator: Generator, params, space: SymplecticSpace | None = None):
        samples, spaces = [], []
        for s in params:
            out = generator(float(s))
            samples.append((float(s), out[0], out[1]))
            spaces.append(out[2] if len(out) > 2 else space)
        if any(sp is None for sp in spaces):
            raise ValueError("space must be given when the generator does not return one")
        return cls(spaces, samples, generator)

    def __len__(self) -> int:
        return len(self.params)

    @property
    def space(self) -> SymplecticSpace:
        return self.spaces[0]

    @property
    def constant_space(self) -> bool:
        return all(sp is self.spaces[0] for sp in self.spaces)

    def sample(self, i: int) -> tuple[float, Subspace, Subspace, SymplecticSpace]:
        return self.params[i], self.lams[i], self.mus[i], self.spaces[i]

    def reversed(self) -> LagrangianPairPath:
        """The same pairs traversed backwards, reparametrized by ``s -> -s``."""
        gen = None
        if self.generator is not None:
            g = self.generator
            gen = lambda s: g(-s)  # noqa: E731
        idx = range(len(self) - 1, -1, -1)
        return LagrangianPairPath([self.spaces[i] for i in idx],
                                  [(-self.params[i], self.lams[i], self.mus[i]) for i in idx],
                                  gen, validate=False)

    def concat(self, other: LagrangianPairPath) -> LagrangianPairPath:
        """Concatenation; ``other`` is shifted so its first sample follows the last one."""
        if not (self.lams[-1].equals(other.lams[0]) and self.mus[-1].equals(other.mus[0])):
            raise ValueError("paths do not join")
        shift = self.params[-1] - other.params[0]
        samples = [(s, a, b) for s, a, b in zip(self.params, self.lams, self.mus)]
        samples += [(s + shift, a, b) for s, a, b in zip(other.params[1:], other.lams[1:], other.mus[1:])]
        return LagrangianPairPath(self.spaces + other.spaces[1:], samples, validate=False)

    def to_json(self) -> dict:
        out = {"samples": [{"s": float(s), "lambda": a.to_json(), "mu": b.to_json()}
                           for s, a, b in zip(self.params, self.lams, self.mus)]}
        if self.constant_space:
            out["space"] = self.space.to_json()
        else:
            out["space"] = self.spaces[0].to_json()
            for rec, sp in zip(out["samples"], self.spaces):
                rec["space"] = sp.to_json()
        return out

    @classmethod
    def from_json(cls, obj: dict) -> LagrangianPairPath:
        base = SymplecticSpace.from_json(obj["space"])
        samples, spaces = [], []
        for rec in obj["samples"]:
            sp = SymplecticSpace.from_json(rec["space"]) if "space" in rec else base
            lam = Subspace.from_json(rec["lambda"])
            mu = Subspace.from_json(rec["mu"])
            samples.append((float(rec["s"]), lam, mu))
            spaces.append(sp)
        return cls(spaces, samples)

    @classmethod
    def loads(cls, text: str) -> LagrangianPairPath:
        return cls.from_json(json.loads(text))


@dataclass(frozen=True)
class LocalizationData:
    v: Subspace
    lam0: Subspace
    lam1: Subspace
    mu0: Subspace
    mu1: Subspace
    x0: Subspace
    x1: Subspace


def localize(space: SymplecticSpace, lam: Subspace, mu: Subspace, v: Subspace) -> LocalizationData:
    """Split a Lagrangian pair along a complement ``V`` of ``lam + mu``."""
    total = span_sum(lam, mu)
    if v.dim + total.dim != space.dim or intersect(v, total).dim != 0:
        raise ValueError("V is not a complement of lambda + mu")
    v_om = annihilator(space, v)
    lam0 = intersect(lam, span_sum(v, mu))
    mu0 = intersect(mu, span_sum(v, lam))
    lam1 = intersect(v_om, lam)
    mu1 = intersect(v_om, mu)
    x0 = intersect(span_sum(v, lam), span_sum(v, mu))
    x1 = span_sum(lam1, mu1)
    data = LocalizationData(v, lam0, lam1, mu0, mu1, x0, x1)
    k = v.dim
    dims = (lam0.dim, mu0.dim, x0.dim, lam1.dim + lam0.dim, mu1.dim + mu0.dim, x0.dim + x1.dim)
    if dims != (k, k, 2 * k, lam.dim, mu.dim, space.dim):
        raise ValueError(f"localization dimensions inconsistent: {dims}")
    return data


@dataclass
class MaslovResult:
    """Outcome of :func:`maslov_index`.

    Attributes
    ----------
    mas_plus, mas_minus : int
    nullities : list of int
        ``m0(Q(s_i))`` on the samples used (after refinement).
    intersection_dims : list of int
        ``dim(lambda(s_i) & mu(s_i))`` from a rank test.
    params : list of float
        Parameters of the samples used.
    charts : list of (start, end, k)
        Sample index ranges and chart sizes.
    """

    mas_plus: int
    mas_minus: int
    nullities: list[int]
    intersection_dims: list[int]
    params: list[float]
    charts: list[tuple[int, int, int]] = field(default_factory=list)

    def __iter__(self):
        return iter((self.mas_plus, self.mas_minus))

    @property
    def nullity_consistent(self) -> bool:
        return self.nullities == self.intersection_dims


# chart machinery ------------------------------------------------------------

def _smin(*blocks: np.ndarray) -> float:
    m = np.hstack(blocks)
    if m.shape[1] == 0:
        return 1.0
    if m.shape[1] > m.shape[0]:
        return 0.0
    return float(np.linalg.svd(m, compute_uv=False)[-1])


def _orthonormal(m: np.ndarray) -> np.ndarray:
    if m.shape[1] == 0:
        return m
    q, _ = np.linalg.qr(m)
    return q


@dataclass
class _Eval:
    margin: float
    q: np.ndarray


class _Chart:
    __slots__ = ("v", "vhat", "k")

    def __init__(self, v: np.ndarray, k: int):
        self.v = v
        self.vhat = _orthonormal(v)
        self.k = k

    def evaluate(self, om: np.ndarray, om_norm: float, lam: np.ndarray, mu: np.ndarray) -> _Eval:
        k = self.k
        n = lam.shape[1]
        if k == 0:
            return _Eval(_smin(lam, mu), np.zeros((0, 0), dtype=lam.dtype))
        v, vh = self.v, self.vhat
        margins = [_smin(vh, lam), _smin(vh, mu)]
        g = vh.conj().T @ om @ lam / om_norm
        _, s, wh = np.linalg.svd(g)
        margins.append(float(s[k - 1]))
        lam1 = lam @ wh[k:].conj().T
        margins.append(_smin(vh, lam1, mu))
        if min(margins) < _MARGIN:
            return _Eval(0.0, None)
        # lambda0 = lambda & (V + mu), mu0 = mu & (V + lambda)
        lam0 = _closest(lam, np.hstack([vh, mu]), k)
        mu0 = _closest(mu, np.hstack([vh, lam]), k)
        # W: graph over V into mu0, isotropic for the form at this sample
        kk = v.conj().T @ om @ mu0
        kk_min = float(np.linalg.svd(kk, compute_uv=False)[-1]) / (om_norm * np.linalg.norm(v, 2))
        if kk_min < _MARGIN:
            return _Eval(0.0, None)
        margins.append(kk_min)
        gg = v.conj().T @ om @ v
        w = v - 0.5 * mu0 @ np.linalg.solve(kk, gg)
        what = _orthonormal(w)
        margins.append(_smin(what, lam0))
        coef = np.linalg.lstsq(np.hstack([mu0, what]), lam0, rcond=None)[0]
        alpha, beta = coef[:k], coef[k:]
        margins.append(float(np.linalg.svd(alpha, compute_uv=False)[-1]))
        if min(margins) < _MARGIN:
            return _Eval(0.0, None)
        q = mu0.conj().T @ om @ what @ beta @ np.linalg.inv(alpha) / om_norm
        q = 0.5 * (q + q.conj().T)
        return _Eval(min(margins), q)


def _closest(a: np.ndarray, b: np.ndarray, k: int) -> np.ndarray:
    """The ``k`` directions of span(a) closest to span(b) (a orthonormal)."""
    qb = _orthonormal(b)
    r = a - qb @ (qb.conj().T @ a)
    _, _, wh = np.linalg.svd(r)
    return a @ wh[-k:].conj().T


def _principal_block(lam: np.ndarray, mu: np.ndarray, k: int) -> np.ndarray:
    u, _, _ = np.linalg.svd(lam.conj().T @ mu)
    return lam @ u[:, :k]


class _Samples:
    """Mutable working copy of the path with cached dense arrays."""

    def __init__(self, path: LagrangianPairPath):
        self.path = path
        self.params = list(path.params)
        self.spaces = list(path.spaces)
        complex_ = any(sp.field == "complex" for sp in self.spaces) or any(
            x.field == "complex" for x in path.lams + path.mus)
        dt = np.complex128 if complex_ else np.float64
        self.dtype = dt
        self.lams = [x.basis.astype(dt) for x in path.lams]
        self.mus = [x.basis.astype(dt) for x in path.mus]
        self.depth = [0] * len(self.params)

    def __len__(self):
        return len(self.params)

    def om(self, i):
        sp = self.spaces[i]
        return sp.form.astype(self.dtype), sp.form_norm

    def movement(self, i: int) -> float:
        """Size of the step from sample ``i`` to ``i + 1``."""
        out = 0.0
        for seq in (self.lams, self.mus):
            a, b = seq[i], seq[i + 1]
            r = a - b @ (b.conj().T @ a)
            out = max(out, float(np.linalg.norm(r, 2)))
        om0, n0 = self.om(i)
        om1, _ = self.om(i + 1)
        if om0 is not om1:
            out = max(out, float(np.linalg.norm(om0 - om1, 2)) / n0)
        return out

    def nullity(self, i: int) -> int:
        a, b = self.lams[i], self.mus[i]
        s = np.linalg.svd(np.hstack([a, -b]), compute_uv=False)
        return int(np.count_nonzero(s <= get_tolerances().rank * s[0]))

    def refine(self, i: int) -> bool:
        """Insert the midpoint of ``[s_i, s_{i+1}]``; False when not possible."""
        gen = self.path.generator
        depth = max(self.depth[i], self.depth[i + 1]) + 1
        if gen is None or depth > get_tolerances().refine_depth:
            return False
        s = 0.5 * (self.params[i] + self.params[i + 1])
        out = gen(s)
        sp = out[2] if len(out) > 2 else self.spaces[i]
        self.params.insert(i + 1, s)
        self.spaces.insert(i + 1, sp)
        self.lams.insert(i + 1, out[0].basis.astype(self.dtype))
        self.mus.insert(i + 1, out[1].basis.astype(self.dtype))
        self.depth.insert(i + 1, depth)
        return True


def _build_chart(smp: _Samples, i: int, k: int) -> tuple[_Chart, _Eval] | None:
    om, on = smp.om(i)
    lam, mu = smp.lams[i], smp.mus[i]
    if k == 0:
        ch = _Chart(np.zeros((lam.shape[0], 0), dtype=lam.dtype), 0)
        return ch, ch.evaluate(om, on, lam, mu)
    e = _principal_block(lam, mu, k)
    best = None
    space = smp.spaces[i]
    for t in _SHIFTS:
        v = darboux_complement(space, e, t).astype(smp.dtype)
        ch = _Chart(v, k)
        ev = ch.evaluate(om, on, lam, mu)
        if best is None or ev.margin > best[1].margin:
            best = (ch, ev)
        if ev.margin > 0.25:
            break
    return best


def _extend(smp: _Samples, chart: _Chart, first: _Eval, i: int, step: int, stop: int):
    """Walk from sample ``i`` in direction ``step``; return (last index, evals)."""
    evals = {i: first}
    j = i
    prev = first
    while j != stop:
        nxt = j + step
        om, on = smp.om(nxt)
        ev = chart.evaluate(om, on, smp.lams[nxt], smp.mus[nxt])
        lo = min(j, nxt)
        if ev.margin < _MARGIN or smp.movement(lo) > 0.5 * min(prev.margin, ev.margin):
            break
        evals[nxt] = ev
        prev = ev
        j = nxt
    return j, evals


def _prerefine(smp: _Samples, max_step: float) -> None:
    i = 0
    while i < len(smp) - 1:
        if smp.movement(i) > max_step and smp.refine(i):
            continue
        i += 1


def maslov_index(path: LagrangianPairPath, method: str = "local", max_step: float = _MAX_STEP) -> MaslovResult:
    """``(Mas+, Mas-)`` of a path of Lagrangian pairs.

    Parameters
    ----------
    path : LagrangianPairPath
    method : {"local", "global"}
        ``local`` uses the smallest chart that reaches furthest; ``global``
        forces Lagrangian charts (``V`` transversal to both ``lambda`` and
        ``mu``), which is the classical graph-form computation.
    max_step : float
        When the path has a generator, steps whose endpoints are further
        apart than this (largest principal-angle sine) are subdivided first.

    Raises
    ------
    NoTransversalFound
        When a stretch of the path cannot be covered by any chart even after
        refinement.
    """
    if method not in ("local", "global"):
        raise ValueError(f"unknown method {method!r}")
    smp = _Samples(path)
    if path.generator is not None:
        _prerefine(smp, max_step)
    n = smp.lams[0].shape[1]
    plus = minus = 0
    charts: list[tuple[int, int, int]] = []
    q_null: dict[int, int] = {}
    i = 0
    if len(smp) == 1:
        ch = _build_chart(smp, 0, n if method == "global" else smp.nullity(0))
        if ch is None or ch[1].margin < _MARGIN:
            raise NoTransversalFound("no chart at the single sample")
        q_null[0] = morse(ch[1].q).m_zero
    while i < len(smp) - 1:
        nu = smp.nullity(i)
        ks = [n] if method == "global" else range(nu, n + 1)
        best = None
        for k in ks:
            built = _build_chart(smp, i, k)
            if built is None or built[1].margin < _MARGIN:
                continue
            reach, evals = _extend(smp, built[0], built[1], i, 1, len(smp) - 1)
            if reach > i and (best is None or reach > best[0]):
                best = (reach, evals, k)
            if reach == len(smp) - 1:
                break
        if best is None:
            # a chart based at the next sample may still cover the step backwards
            nu1 = smp.nullity(i + 1)
            for k in ([n] if method == "global" else range(nu1, n + 1)):
                built = _build_chart(smp, i + 1, k)
                if built is None or built[1].margin < _MARGIN:
                    continue
                reach, evals = _extend(smp, built[0], built[1], i + 1, -1, i)
                if reach == i:
                    best = (i + 1, evals, k)
                    break
        if best is None:
            if smp.refine(i):
                continue
            raise NoTransversalFound(
                f"no chart covers [{smp.params[i]:g}, {smp.params[i + 1]:g}]; supply denser samples or a generator")
        reach, evals, k = best
        qa, qb = morse(evals[i].q), morse(evals[reach].q)
        plus += qb.m_plus - qa.m_plus
        minus += qa.m_minus - qb.m_minus
        for j, ev in evals.items():
            q_null.setdefault(j, morse(ev.q).m_zero)
        charts.append((i, reach, k))
        i = reach
    nullities = [q_null[j] for j in range(len(smp))]
    inter = [smp.nullity(j) for j in range(len(smp))]
    return MaslovResult(plus, minus, nullities, inter, list(smp.params), charts)

