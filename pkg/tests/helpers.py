"""Solver-independent references: MU vectors by least squares over phases."""

import numpy as np
from scipy.optimize import least_squares


def lsq_mu_vector(basis, rng):
    """A unit vector with unimodular-over-sqrt(d) entries and |<b_l|v>|^2 = 1/d for every column b_l."""
    d = basis.shape[0]

    def vec(phi):
        return np.exp(1j * np.concatenate([[0.0], phi])) / np.sqrt(d)

    def resid(phi):
        return np.abs(basis.conj().T @ vec(phi)) ** 2 - 1 / d

    for _ in range(200):
        sol = least_squares(resid, rng.uniform(0, 2 * np.pi, d - 1), xtol=1e-15, ftol=1e-15, gtol=1e-15)
        if np.max(np.abs(resid(sol.x))) < 1e-14:
            return vec(sol.x)
    raise RuntimeError("no MU vector found")
