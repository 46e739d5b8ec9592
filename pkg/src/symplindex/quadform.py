"""Morse indices of Hermitian forms."""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

from ._config import get_tolerances

__all__ = ["HermitianForm", "MorseIndices", "morse", "hermitian_part"]


class MorseIndices(NamedTuple):
    m_plus: int
    m_minus: int
    m_zero: int


def hermitian_part(m: np.ndarray) -> np.ndarray:
    m = np.atleast_2d(np.asarray(m))
    return 0.5 * (m + m.conj().T)


class HermitianForm:
    """A Hermitian (real symmetric) form on K^k, symmetrized on construction."""

    __slots__ = ("_matrix",)

    def __init__(self, matrix):
        m = np.asarray(matrix)
        if m.size == 0:
            m = np.zeros((0, 0))
        m = hermitian_part(m)
        if m.shape[0] != m.shape[1]:
            raise ValueError("form matrix must be square")
        if np.iscomplexobj(m) and np.abs(m.imag).max(initial=0.0) == 0.0:
            m = m.real
        m.setflags(write=False)
        self._matrix = m

    @property
    def matrix(self) -> np.ndarray:
        return self._matrix

    @property
    def dim(self) -> int:
        return self._matrix.shape[0]

    def eigenvalues(self) -> np.ndarray:
        if self.dim == 0:
            return np.zeros(0)
        return np.linalg.eigvalsh(self._matrix)

    def morse(self) -> MorseIndices:
        ev = self.eigenvalues()
        if ev.size == 0:
            return MorseIndices(0, 0, 0)
        cut = get_tolerances().eig * max(1.0, float(np.abs(ev).max()))
        plus = int(np.count_nonzero(ev > cut))
        minus = int(np.count_nonzero(ev < -cut))
        return MorseIndices(plus, minus, ev.size - plus - minus)

    def __neg__(self) -> HermitianForm:
        return HermitianForm(-self._matrix)

    def congruent(self, s: np.ndarray) -> HermitianForm:
        """The form ``S^H A S``."""
        s = np.asarray(s)
        return HermitianForm(s.conj().T @ self._matrix @ s)

    def __repr__(self) -> str:
        return f"HermitianForm(dim={self.dim}, morse={tuple(self.morse())})"


def morse(form) -> MorseIndices:
    """``(m_plus, m_minus, m_zero)`` of a form or a square matrix."""
    if not isinstance(form, HermitianForm):
        form = HermitianForm(form)
    return form.morse()
