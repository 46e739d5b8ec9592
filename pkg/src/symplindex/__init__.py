"""Index theory for paths of Lagrangian pairs and symplectic matrices."""

from __future__ import annotations

from ._config import Tolerances, get_tolerances, tolerances
from .quadform import HermitianForm, morse
from .subspace import Subspace
from .symplectic import SymplecticSpace

__version__ = "0.1.0"

__all__ = [
    "HermitianForm",
    "Subspace",
    "SymplecticSpace",
    "Tolerances",
    "get_tolerances",
    "morse",
    "tolerances",
]
