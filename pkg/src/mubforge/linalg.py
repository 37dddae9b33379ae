"""Small dense complex linear algebra and the MU / Hadamard predicates."""

from __future__ import annotations

import numpy as np

STRUCTURAL_TOL = 1e-10
ALGEBRAIC_TOL = 1e-12


class DimensionError(ValueError):
    pass


class ZeroEntryError(ValueError):
    pass


def as_matrix(m) -> np.ndarray:
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2:
        raise DimensionError(f"expected a 2-d array, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix contains NaN or Inf")
    return m


def normalize(v) -> np.ndarray:
    v = np.asarray(v, dtype=complex)
    n = np.linalg.norm(v)
    if n == 0:
        raise ValueError("cannot normalize the zero vector")
    return v / n


def basis_vector(d: int, k: int) -> np.ndarray:
    e = np.zeros(d, dtype=complex)
    e[k] = 1
    return e


def inner(u, v) -> complex:
    """<u|v>, conjugating the first argument."""
    u = np.asarray(u, dtype=complex)
    v = np.asarray(v, dtype=complex)
    if u.shape != v.shape:
        raise DimensionError(f"dimension mismatch: {u.shape} vs {v.shape}")
    return complex(np.vdot(u, v))


def tensor(a, b) -> np.ndarray:
    return np.kron(as_matrix(a), as_matrix(b))


def is_hadamard(m, tol: float = STRUCTURAL_TOL) -> bool:
    m = as_matrix(m)
    d, c = m.shape
    if d != c:
        return False
    if np.max(np.abs(np.abs(m) - 1)) > tol:
        return False
    return bool(np.max(np.abs(m.conj().T @ m - d * np.eye(d))) <= tol)


def is_orthonormal(basis, tol: float = STRUCTURAL_TOL) -> bool:
    b = as_matrix(basis)
    return bool(np.max(np.abs(b.conj().T @ b - np.eye(b.shape[1]))) <= tol)


def hadamard_basis(h) -> np.ndarray:
    """Orthonormal basis given by the columns of a complex Hadamard matrix."""
    h = as_matrix(h)
    return h / np.sqrt(h.shape[0])


def mu_deviation(b1, b2) -> float:
    """Largest departure of |<b1_k|b2_l>|^2 from 1/d over all pairs of columns.

    Zero means the two bases are exactly mutually unbiased.
    """
    b1 = as_matrix(b1)
    b2 = as_matrix(b2)
    if b1.shape != b2.shape:
        raise DimensionError(f"dimension mismatch: {b1.shape} vs {b2.shape}")
    d = b1.shape[0]
    overlaps = np.abs(b1.conj().T @ b2) ** 2
    return float(np.max(np.abs(overlaps - 1 / d)))


def dephase(m, tol: float = ALGEBRAIC_TOL) -> np.ndarray:
    """Rescale rows and columns by unimodular phases so that row 0 and column 0 are all ones."""
    m = as_matrix(m)
    if np.min(np.abs(m[0, :])) <= tol or np.min(np.abs(m[:, 0])) <= tol:
        raise ZeroEntryError("cannot dephase: zero entry in the first row or column")
    row = m[0, :] / np.abs(m[0, :])
    col = m[:, 0] / np.abs(m[:, 0])
    corner = m[0, 0] / abs(m[0, 0])
    out = m * corner / np.outer(col, row)
    # snap the pivot row and column so they are exactly real
    out[0, :] = np.abs(m[0, :])
    out[:, 0] = np.abs(m[:, 0])
    return out


def random_unimodular_diagonal(d: int, rng: np.random.Generator) -> np.ndarray:
    return np.diag(np.exp(2j * np.pi * rng.random(d)))


def permutation_matrix(perm) -> np.ndarray:
    """Matrix P with P @ e_k = e_perm[k]."""
    perm = list(perm)
    p = np.zeros((len(perm), len(perm)))
    for k, j in enumerate(perm):
        p[j, k] = 1
    return p


def transposition(d: int, *pairs: tuple[int, int]) -> np.ndarray:
    """Product of transpositions given with 1-based indices (P_34 swaps entries 3 and 4)."""
    perm = list(range(d))
    for a, b in pairs:
        perm[a - 1], perm[b - 1] = perm[b - 1], perm[a - 1]
    return permutation_matrix(perm)
