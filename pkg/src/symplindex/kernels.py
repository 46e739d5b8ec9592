"""Hot kernels, compiled when available.

The Cython extension ``_kernels`` is used when it was built; otherwise the
numpy versions in ``_kernels_py`` are. Setting ``SYMPLINDEX_PURE_PYTHON=1``
forces the fallback.
"""

from __future__ import annotations

import os

from . import _kernels_py

__all__ = ["BACKEND", "assemble_p1", "gl2_propagate", "python_backend", "compiled_backend"]


def python_backend():
    return _kernels_py


def compiled_backend():
    """The compiled module, or ``None`` when it is not built."""
    try:
        from . import _kernels
    except ImportError:
        return None
    return _kernels


_impl = None if os.environ.get("SYMPLINDEX_PURE_PYTHON") == "1" else compiled_backend()
if _impl is None:
    _impl = _kernels_py
    BACKEND = "python"
else:
    BACKEND = "cython"

assemble_p1 = _impl.assemble_p1
gl2_propagate = _impl.gl2_propagate
