"""Numerical tolerance policy shared by every module."""

from __future__ import annotations

import contextlib
import contextvars
from dataclasses import dataclass, replace


@dataclass(frozen=True)
class Tolerances:
    """Thresholds used for rank, eigenvalue and group-membership decisions.

    Attributes
    ----------
    rank : float
        Relative singular-value cutoff; a singular value counts as zero when
        it is below ``rank * sigma_max``.
    eig : float
        Eigenvalue cutoff factor; an eigenvalue counts as zero when its modulus
        is below ``eig * max(1, spectral_radius)``.
    sp : float
        Relative residual allowed in ``M^H Omega M = Omega``.
    refine_depth : int
        Maximum number of bisection levels used when a path generator is
        available.
    """

    rank: float = 1e-10
    eig: float = 1e-9
    sp: float = 1e-8
    refine_depth: int = 20


_current: contextvars.ContextVar[Tolerances] = contextvars.ContextVar(
    "symplindex_tolerances", default=Tolerances()
)


def get_tolerances() -> Tolerances:
    return _current.get()


@contextlib.contextmanager
def tolerances(**overrides):
    """Temporarily override tolerances, e.g. ``with tolerances(rank=1e-8):``."""
    token = _current.set(replace(_current.get(), **overrides))
    try:
        yield _current.get()
    finally:
        _current.reset(token)
