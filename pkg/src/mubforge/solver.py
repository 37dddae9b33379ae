"""Imposition operators, the alternating cycle and the Hellinger-type distances."""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numba
import numpy as np

from .linalg import DimensionError, STRUCTURAL_TOL, as_matrix, is_orthonormal

ZERO_TOL = 1e-14


@dataclass(frozen=True)
class MeasurementConstraint:
    basis: np.ndarray
    target: np.ndarray

    def __post_init__(self):
        b = as_matrix(self.basis)
        p = np.asarray(self.target, dtype=float)
        if b.shape[0] != b.shape[1] or p.shape != (b.shape[0],):
            raise DimensionError(f"basis {b.shape} and target {p.shape} do not fit")
        if not is_orthonormal(b, STRUCTURAL_TOL):
            raise ValueError("constraint basis is not orthonormal")
        if np.any(p < -1e-15) or abs(p.sum() - 1) > 1e-12:
            raise ValueError("target is not a probability distribution")
        object.__setattr__(self, "basis", b)
        object.__setattr__(self, "target", np.clip(p, 0, None))

    @classmethod
    def uniform(cls, basis) -> "MeasurementConstraint":
        d = as_matrix(basis).shape[0]
        return cls(basis, np.full(d, 1 / d))

    @property
    def d(self) -> int:
        return self.basis.shape[0]


def uniform_constraints(bases) -> list[MeasurementConstraint]:
    return [MeasurementConstraint.uniform(b) for b in bases]


@dataclass(frozen=True)
class SolverConfig:
    max_iterations: int = 10_000
    convergence_threshold: float = 0.01
    polish_threshold: float = 1e-12
    rng_seed: int = 0

    def __post_init__(self):
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be positive")
        if not 0 < self.polish_threshold <= self.convergence_threshold:
            raise ValueError("need 0 < polish_threshold <= convergence_threshold")
        if self.rng_seed < 0:
            raise ValueError("rng_seed must be unsigned")


class Status(enum.Enum):
    CONVERGED = "Converged"
    MAX_ITERATIONS = "MaxIterations"
    # fixed point of the cycle that does not satisfy the constraints
    STALLED = "Stalled"


@dataclass
class IterationOutcome:
    status: Status
    state: np.ndarray
    distance: float
    iterations: int

    @property
    def converged(self) -> bool:
        return self.status is Status.CONVERGED


def haar_states(rng: np.random.Generator, n: int, d: int) -> np.ndarray:
    """n Haar-random pure states in C^d, one per row."""
    psi = rng.standard_normal((n, d)) + 1j * rng.standard_normal((n, d))
    return psi / np.linalg.norm(psi, axis=1, keepdims=True)


def _overlaps(basis: np.ndarray, psi: np.ndarray) -> np.ndarray:
    # <phi_k|psi> along the last axis
    return psi @ basis.conj()


def impose(c: MeasurementConstraint, psi) -> np.ndarray:
    """Replace the moduli of the amplitudes of psi in c.basis by sqrt(c.target), keeping phases.

    Accepts a single state or a stack of states along the leading axes.
    """
    psi = np.asarray(psi, dtype=complex)
    if psi.shape[-1] != c.d:
        raise DimensionError(f"state of length {psi.shape[-1]} against a basis in d={c.d}")
    return _impose(c.basis.conj(), c.basis.T, np.sqrt(c.target), psi)


def _impose(basis_conj, basis_t, root, psi):
    amp = psi @ basis_conj
    mod = np.abs(amp)
    out = (root * np.divide(amp, mod, out=np.ones_like(amp), where=mod > ZERO_TOL)) @ basis_t
    return out / np.linalg.norm(out, axis=-1, keepdims=True)


def cycle(constraints, psi) -> np.ndarray:
    if not constraints:
        raise ValueError("cycle needs at least one constraint")
    for c in constraints:
        psi = impose(c, psi)
    return psi


def hellinger(basis, u, v) -> float:
    b = as_matrix(basis)
    du = np.abs(_overlaps(b, np.asarray(u, dtype=complex)))
    dv = np.abs(_overlaps(b, np.asarray(v, dtype=complex)))
    return float(np.sqrt(np.sum((du - dv) ** 2)))


def distributional(bases, u, v) -> float:
    if len(bases) == 0:
        raise ValueError("distributional metric needs at least one basis")
    return float(np.sqrt(np.mean([hellinger(b, u, v) ** 2 for b in bases])))


def constraint_distance(constraints, psi) -> np.ndarray:
    """Distributional distance from psi to the targets; vectorized over leading axes."""
    psi = np.asarray(psi, dtype=complex)
    total = 0.0
    for c in constraints:
        total = total + np.sum((np.abs(_overlaps(c.basis, psi)) - np.sqrt(c.target)) ** 2, axis=-1)
    return np.sqrt(total / len(constraints))


def _successive_distance(constraints, a, b) -> np.ndarray:
    total = 0.0
    for c in constraints:
        da = np.abs(_overlaps(c.basis, a))
        db = np.abs(_overlaps(c.basis, b))
        total = total + np.sum((da - db) ** 2, axis=-1)
    return np.sqrt(total / len(constraints))


def mu_distance(pair, psi):
    """Distributional distance of psi to the uniform targets of both bases of pair.

    Evaluated as a sum of squares; the equivalent closed form in mu_distance_closed
    loses all digits below ~1e-8 to cancellation.
    """
    b1, b2 = (as_matrix(b) for b in pair)
    if b1.shape != b2.shape:
        raise DimensionError(f"dimension mismatch: {b1.shape} vs {b2.shape}")
    return constraint_distance(uniform_constraints((b1, b2)), psi)


def mu_distance_closed(pair, psi):
    """sqrt(2 - (sum_k |<phi_k|psi>| + sum_l |<chi_l|psi>|) / sqrt(d)) for unit psi."""
    b1, b2 = (as_matrix(b) for b in pair)
    psi = np.asarray(psi, dtype=complex)
    d = b1.shape[0]
    s = np.sum(np.abs(_overlaps(b1, psi)), axis=-1) + np.sum(np.abs(_overlaps(b2, psi)), axis=-1)
    return np.sqrt(np.maximum(2 - s / np.sqrt(d), 0.0))


_CODES = (Status.MAX_ITERATIONS, Status.CONVERGED, Status.STALLED)


@numba.njit(cache=True)
def _overlap(bh, v, l):
    a = 0j
    for i in range(v.shape[0]):
        a += bh[l, i] * v[i]
    return a


@numba.njit(cache=True)
def _cycle_kernel(bh, b, roots, psi, max_iter, polish, threshold, zero_tol, iters, codes):
    # bh[j] = basis_j^H, b[j] = basis_j; updates psi in place, one seed at a time
    m, d, _ = b.shape
    amp = np.empty(d, dtype=np.complex128)
    v = np.empty(d, dtype=np.complex128)
    mods = np.empty((m, d))
    for k in range(psi.shape[0]):
        v[:] = psi[k]
        for j in range(m):
            for l in range(d):
                mods[j, l] = abs(_overlap(bh[j], v, l))
        for it in range(1, max_iter + 1):
            for j in range(m):
                for l in range(d):
                    a = _overlap(bh[j], v, l)
                    r = abs(a)
                    amp[l] = roots[j, l] * (a / r if r > zero_tol else 1.0)
                norm = 0.0
                for i in range(d):
                    x = 0j
                    for l in range(d):
                        x += b[j, i, l] * amp[l]
                    v[i] = x
                    norm += x.real * x.real + x.imag * x.imag
                norm = np.sqrt(norm)
                for i in range(d):
                    v[i] /= norm
            dist = 0.0
            step = 0.0
            for j in range(m):
                for l in range(d):
                    r = abs(_overlap(bh[j], v, l))
                    dist += (r - roots[j, l]) ** 2
                    step += (r - mods[j, l]) ** 2
                    mods[j, l] = r
            dist = np.sqrt(dist / m)
            step = np.sqrt(step / m)
            iters[k] = it
            still = step < polish
            if dist < polish or (still and dist <= 10 * polish):
                codes[k] = 1
                break
            if still and dist >= threshold:
                codes[k] = 2
                break
        psi[k] = v


def iterate_many(constraints, config: SolverConfig, states) -> list[IterationOutcome]:
    """Run the alternating cycle on a stack of seeds (n, d), each independently.

    A run stops once its distance to the targets is below polish_threshold, or below
    10 * polish_threshold with the change over one cycle below polish_threshold. A run
    that stops changing while still convergence_threshold away is reported as stalled.
    """
    if not constraints:
        raise ValueError("iterate needs at least one constraint")
    psi = np.array(states, dtype=complex, ndmin=2)
    n = psi.shape[0]
    bh = np.ascontiguousarray(np.stack([c.basis.conj().T for c in constraints]))
    b = np.ascontiguousarray(np.stack([c.basis for c in constraints]))
    roots = np.stack([np.sqrt(c.target) for c in constraints])
    iters = np.zeros(n, dtype=np.int64)
    codes = np.zeros(n, dtype=np.int64)
    _cycle_kernel(bh, b, roots, psi, config.max_iterations, config.polish_threshold,
                  config.convergence_threshold, ZERO_TOL, iters, codes)
    status = [_CODES[c] for c in codes]
    dist = constraint_distance(constraints, psi)
    out = []
    for k in range(n):
        s = status[k]
        # convergence bookkeeping depends only on the final distance
        if s is Status.MAX_ITERATIONS and dist[k] < config.convergence_threshold:
            s = Status.CONVERGED
        out.append(IterationOutcome(s, psi[k].copy(), float(dist[k]), int(iters[k])))
    return out


def iterate(constraints, config: SolverConfig | None = None, seed_state=None) -> IterationOutcome:
    config = config or SolverConfig()
    if not constraints:
        raise ValueError("iterate needs at least one constraint")
    if seed_state is None:
        rng = np.random.default_rng(config.rng_seed)
        seed_state = haar_states(rng, 1, constraints[0].d)[0]
    return iterate_many(constraints, config, np.asarray(seed_state)[None, :])[0]
