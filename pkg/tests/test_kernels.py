from __future__ import annotations

import os
import subprocess
import sys

import numpy as np
import pytest
from scipy.linalg import expm

from symplindex import kernels
from symplindex.symplectic import standard_form

compiled = kernels.compiled_backend()
needs_compiled = pytest.mark.skipif(compiled is None, reason="compiled extension not built")


def _propagate_inputs(rng, n, steps, field):
    d = 2 * n
    j = standard_form(n)
    h = rng.standard_normal((steps, 2, d, d))
    if field == "complex":
        h = h + 1j * rng.standard_normal((steps, 2, d, d))
    h = h + np.conj(np.swapaxes(h, -1, -2))
    return j.T @ h[:, 0], j.T @ h[:, 1], 1.0 / steps, j.T


def test_python_propagation_of_constant_generator(rng):
    n = 2
    j = standard_form(n)
    h = rng.standard_normal((4, 4))
    a = j.T @ (h + h.T)
    steps = 256
    stack = np.broadcast_to(a, (steps, 4, 4)).copy()
    out = kernels.python_backend().gl2_propagate(stack, stack, 1.0 / steps, j.T, 32, steps)
    assert np.allclose(out[-1], expm(a), rtol=1e-8, atol=1e-8)


@needs_compiled
@pytest.mark.parametrize("field", ["real", "complex"])
def test_propagate_backends_agree(rng, field):
    a1, a2, h, om = _propagate_inputs(rng, 2, 200, field)
    py = kernels.python_backend().gl2_propagate(a1, a2, h, om, 32, 50)
    cy = compiled.gl2_propagate(a1, a2, h, om, 32, 50)
    assert py.shape == cy.shape
    assert np.allclose(py, cy, rtol=1e-11, atol=1e-11)


@needs_compiled
@pytest.mark.parametrize("field", ["real", "complex"])
def test_assemble_backends_agree(rng, field):
    shape = (40, 3, 2, 2)
    p, q, r = (rng.standard_normal(shape) + (1j * rng.standard_normal(shape) if field == "complex" else 0)
               for _ in range(3))
    py = kernels.python_backend().assemble_p1(p, q, r, 0.025)
    cy = compiled.assemble_p1(p, q, r, 0.025)
    for a, b in zip(py, cy):
        assert np.allclose(a, b, rtol=1e-12, atol=1e-12)


def test_selected_backend():
    assert kernels.BACKEND == ("cython" if compiled is not None else "python")


def test_pure_python_switch():
    env = dict(os.environ, SYMPLINDEX_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c", "from symplindex import kernels; print(kernels.BACKEND)"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"
