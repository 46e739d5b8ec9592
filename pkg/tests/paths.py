"""Random Lagrangian-pair paths with generators, shared by several test files."""

from __future__ import annotations

import numpy as np
from scipy.linalg import expm

from symplindex.generators import random_hermitian, random_lagrangian
from symplindex.maslov import LagrangianPairPath
from symplindex.symplectic import SymplecticSpace, standard_form


def flow_pair_path(n, rng, field="real", samples=41, scale=2.0, bend=0.0, moving_mu=True,
                   t0=0.0, t1=1.0, data=None):
    """``lam(s) = exp(s J H1 + bend sin(pi s) J H3) lam0``, ``mu(s) = exp(s J H2) mu0``.

    ``bend`` deforms the interior only, so paths with different ``bend``
    share their endpoints on ``[0, 1]``.
    """
    space = SymplecticSpace(standard_form(n), field)
    j = np.linalg.inv(standard_form(n))
    if data is None:
        data = dict(
            lam0=random_lagrangian(n, rng, field), mu0=random_lagrangian(n, rng, field),
            h1=scale * random_hermitian(2 * n, rng, field), h2=scale * random_hermitian(2 * n, rng, field),
            h3=scale * random_hermitian(2 * n, rng, field),
        )
    h2 = data["h2"] if moving_mu else 0 * data["h2"]

    def gen(s):
        lam = data["lam0"].apply(expm(j @ (s * data["h1"] + bend * np.sin(np.pi * s) * data["h3"])))
        mu = data["mu0"].apply(expm(s * j @ h2))
        return lam, mu

    path = LagrangianPairPath.from_generator(gen, np.linspace(t0, t1, samples), space)
    return path, data
