"""From converged states to MU-vector sets, third bases, extensions and displacement orbits."""

from __future__ import annotations

import itertools
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import networkx as nx
import numpy as np

from .linalg import DimensionError, STRUCTURAL_TOL, as_matrix, is_orthonormal, mu_deviation
from .solver import SolverConfig, Status, haar_states, iterate_many, uniform_constraints

DEDUP_TOL = 1e-8
ORTHO_TOL = 1e-8
CHUNK = 256


def canonicalize(v, tol: float = 1e-9) -> np.ndarray:
    """Unit vector with its first component of modulus > tol made real positive."""
    v = np.asarray(v, dtype=complex)
    v = v / np.linalg.norm(v)
    k = int(np.argmax(np.abs(v) > tol))
    return v * (np.conj(v[k]) / abs(v[k]))


@dataclass
class MUVectorSet:
    """Distinct states (rows of `vectors`, canonical phase) with the number of seeds that reached each."""

    bases: tuple
    vectors: np.ndarray
    hits: list[int] = field(default_factory=list)
    dedup_tol: float = DEDUP_TOL
    n_seeds: int = 0
    n_converged: int = 0
    n_stalled: int = 0

    @classmethod
    def empty(cls, bases, dedup_tol: float = DEDUP_TOL) -> "MUVectorSet":
        bases = tuple(as_matrix(b) for b in bases)
        return cls(bases, np.zeros((0, bases[0].shape[0]), dtype=complex), [], dedup_tol)

    def __len__(self) -> int:
        return len(self.vectors)

    @property
    def d(self) -> int:
        return self.vectors.shape[1]

    def index_of(self, v) -> int | None:
        if len(self.vectors) == 0:
            return None
        ov = np.abs(self.vectors.conj() @ np.asarray(v, dtype=complex))
        k = int(np.argmax(ov))
        return k if ov[k] > 1 - self.dedup_tol else None

    def add(self, v, hits: int = 1) -> bool:
        """Record v; True when it is new."""
        k = self.index_of(v)
        if k is not None:
            self.hits[k] += hits
            return False
        self.vectors = np.vstack([self.vectors, canonicalize(v)])
        self.hits.append(hits)
        return True

    def merge(self, other: "MUVectorSet") -> "MUVectorSet":
        out = MUVectorSet(self.bases, self.vectors.copy(), list(self.hits), self.dedup_tol,
                          self.n_seeds + other.n_seeds, self.n_converged + other.n_converged,
                          self.n_stalled + other.n_stalled)
        for v, h in zip(other.vectors, other.hits):
            out.add(v, h)
        return out


def _run_chunk(bases, config: SolverConfig, index: int, size: int):
    # one seed stream per chunk keeps results independent of the worker count
    d = bases[0].shape[0]
    rng = np.random.default_rng([config.rng_seed, index])
    outcomes = iterate_many(uniform_constraints(bases), config, haar_states(rng, size, d))
    polished = 10 * config.polish_threshold
    return [(o.status, o.state if o.converged and o.distance <= polished else None) for o in outcomes]


def _chunks(bases, config, n_seeds, workers, chunk):
    sizes = [min(chunk, n_seeds - s) for s in range(0, n_seeds, chunk)]
    if workers <= 1:
        for i, size in enumerate(sizes):
            yield _run_chunk(bases, config, i, size)
        return
    with ProcessPoolExecutor(workers) as pool:
        for start in range(0, len(sizes), workers):
            wave = [pool.submit(_run_chunk, bases, config, i, sizes[i])
                    for i in range(start, min(start + workers, len(sizes)))]
            for f in wave:
                yield f.result()


def search(bases, n_seeds: int, config: SolverConfig | None = None, workers: int = 1,
           early_stop: bool = True, stop_when=None, dedup_tol: float = DEDUP_TOL,
           chunk: int = CHUNK) -> MUVectorSet:
    """Collect the distinct states MU to every basis in `bases` reached from n_seeds Haar seeds.

    With early_stop the search ends once max(1000, 20 * size) consecutive seeds produced
    nothing new. stop_when(set) is consulted after every chunk of seeds; the seed
    stream depends on the chunk size.
    """
    config = config or SolverConfig()
    bases = tuple(as_matrix(b) for b in bases)
    out = MUVectorSet.empty(bases, dedup_tol)
    since_new = 0
    for results in _chunks(bases, config, n_seeds, workers, chunk):
        done = False
        for status, s in results:
            out.n_seeds += 1
            out.n_converged += status is Status.CONVERGED
            out.n_stalled += status is Status.STALLED
            if s is not None and out.add(s):
                since_new = 0
            else:
                since_new += 1
            if early_stop and since_new >= max(1000, 20 * len(out)):
                done = True
                break
        if done or (stop_when is not None and stop_when(out)):
            break
    return out


def collect(pair, n_seeds: int, config: SolverConfig | None = None, workers: int = 1,
            **kwargs) -> MUVectorSet:
    b1, b2 = (as_matrix(b) for b in pair)
    if mu_deviation(b1, b2) > STRUCTURAL_TOL:
        raise ValueError("collect needs a mutually unbiased pair")
    return search((b1, b2), n_seeds, config, workers, **kwargs)


def _polish_basis(b: np.ndarray) -> np.ndarray:
    # nearest unitary with the same column rays
    u, _, vh = np.linalg.svd(b)
    return u @ vh


def third_bases(vs: MUVectorSet, ortho_tol: float = ORTHO_TOL) -> list[np.ndarray]:
    """Every d-clique of the orthogonality graph, as a basis with the clique vectors as columns."""
    n, d = vs.vectors.shape if len(vs) else (0, vs.bases[0].shape[0])
    g = nx.Graph()
    g.add_nodes_from(range(n))
    if n:
        gram = np.abs(vs.vectors.conj() @ vs.vectors.T)
        i, j = np.nonzero(np.triu(gram <= ortho_tol, 1))
        g.add_edges_from(zip(i.tolist(), j.tolist()))
    out = []
    for c in sorted(sorted(c) for c in nx.find_cliques(g) if len(c) == d):
        b = _polish_basis(vs.vectors[c].T)
        if is_orthonormal(b) and all(mu_deviation(b, p) <= STRUCTURAL_TOL for p in vs.bases):
            out.append(b)
    return out


@dataclass(frozen=True)
class Triplet:
    pair: tuple
    third: np.ndarray

    def __post_init__(self):
        b1, b2 = (as_matrix(b) for b in self.pair)
        b3 = as_matrix(self.third)
        for x, y in ((b1, b2), (b1, b3), (b2, b3)):
            if mu_deviation(x, y) > STRUCTURAL_TOL:
                raise ValueError("bases of a triplet must be pairwise MU")
        object.__setattr__(self, "pair", (b1, b2))
        object.__setattr__(self, "third", b3)

    @property
    def bases(self) -> tuple:
        return (*self.pair, self.third)


def extend_triplet(t: Triplet, n_seeds: int, config: SolverConfig | None = None,
                   workers: int = 1) -> MUVectorSet:
    """Vectors MU to all three bases of t; every seed is run."""
    return search(t.bases, n_seeds, config, workers, early_stop=False)


def same_basis(b1, b2, tol: float = STRUCTURAL_TOL) -> bool:
    """True when b1 and b2 consist of the same rays in some order."""
    o = np.abs(as_matrix(b1).conj().T @ as_matrix(b2))
    ones = np.abs(o - 1) <= tol
    return bool(np.all(ones | (o <= tol)) and np.all(ones.sum(0) == 1) and np.all(ones.sum(1) == 1))


def pair_permutations(pair, tol: float = STRUCTURAL_TOL) -> list[np.ndarray]:
    """Permutation matrices mapping each basis of the pair onto itself as a set of rays."""
    b1, b2 = (as_matrix(b) for b in pair)
    d = b1.shape[0]
    if d > 8:
        raise DimensionError("permutation symmetry search is limited to d <= 8")
    out = []
    for perm in itertools.permutations(range(d)):
        p = np.eye(d)[list(perm)]
        if same_basis(p @ b1, b1, tol) and same_basis(p @ b2, b2, tol):
            out.append(p)
    return out


def triplet_classes(pair, thirds, tol: float = STRUCTURAL_TOL) -> list[int]:
    """Label third bases of a common pair; equal labels iff related by a permutation symmetry of the pair.

    Plain Hadamard equivalence of the third bases is too coarse here: it can merge
    triplets that no symmetry of the pair relates.
    """
    sym = pair_permutations(pair, tol)
    labels: list[int] = []
    for i, b in enumerate(thirds):
        labels.append(i)
        for j in range(i):
            if labels[j] == j and any(same_basis(p @ b, thirds[j], tol) for p in sym):
                labels[i] = j
                break
    return labels


# ---------------------------------------------------------------------------
# Weyl-Heisenberg displacements


def default_tau(d: int) -> complex:
    return -np.exp(1j * np.pi / d)


def shift_operator(d: int) -> np.ndarray:
    return np.roll(np.eye(d, dtype=complex), 1, axis=0)


def clock_operator(d: int) -> np.ndarray:
    return np.diag(np.exp(2j * np.pi * np.arange(d) / d))


def displacement(p1: int, p2: int, d: int, tau: complex | None = None) -> np.ndarray:
    """tau^(p1 p2) X^p1 Z^p2 with X|k> = |k+1>, Z|k> = w^k |k>."""
    tau = default_tau(d) if tau is None else tau
    p1, p2 = p1 % d, p2 % d
    return tau ** (p1 * p2) * np.linalg.matrix_power(shift_operator(d), p1) @ np.linalg.matrix_power(
        clock_operator(d), p2
    )


def xz_eigenbases(d: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Eigenbases of Z, X and XZ."""
    x, z = shift_operator(d), clock_operator(d)
    out = []
    for op in (z, x, x @ z):
        _, vecs = np.linalg.eig(op)
        out.append(_polish_basis(vecs))
    return tuple(out)


def is_eigenvector(m, v, tol: float = 1e-10) -> bool:
    v = np.asarray(v, dtype=complex)
    w = as_matrix(m) @ v
    return bool(abs(abs(np.vdot(v, w)) - np.linalg.norm(v) * np.linalg.norm(w)) <= tol)


def orbit(v, dedup_tol: float = DEDUP_TOL) -> list[np.ndarray]:
    """Distinct canonical states D_p v over p in Z_d^2."""
    v = np.asarray(v, dtype=complex)
    d = len(v)
    out: list[np.ndarray] = []
    for p1 in range(d):
        for p2 in range(d):
            w = canonicalize(displacement(p1, p2, d) @ v)
            if all(abs(np.vdot(u, w)) <= 1 - dedup_tol for u in out):
                out.append(w)
    return out


def stabilizing_displacements(v, tol: float = 1e-10) -> list[tuple[int, int]]:
    d = len(v)
    return [(p1, p2) for p1 in range(d) for p2 in range(d)
            if (p1, p2) != (0, 0) and is_eigenvector(displacement(p1, p2, d), v, tol)]


@dataclass
class OrbitPartition:
    orbits: list[list[int]]
    closed: bool

    @property
    def sizes(self) -> list[int]:
        return sorted(len(o) for o in self.orbits)


def classify_orbits(vs: MUVectorSet) -> OrbitPartition:
    """Split the set into displacement orbits; closed is False if some image lies outside the set."""
    seen: set[int] = set()
    orbits = []
    closed = True
    for k in range(len(vs)):
        if k in seen:
            continue
        members = set()
        for w in orbit(vs.vectors[k], vs.dedup_tol):
            j = vs.index_of(w)
            if j is None:
                closed = False
            else:
                members.add(j)
        seen |= members
        orbits.append(sorted(members))
    return OrbitPartition(orbits, closed)


# ---------------------------------------------------------------------------
# algebraic identification

BJORCK_A = (1 - np.sqrt(3)) / 2 + 1j * np.sqrt(np.sqrt(3) / 2)
DITA_B2 = (-1 + 2j) / np.sqrt(5)


def _roots(n: int) -> np.ndarray:
    return np.exp(2j * np.pi * np.arange(n) / n)


def fourier_alphabets() -> tuple[np.ndarray, np.ndarray]:
    """(roots, irrational): products of i and sixth roots; those roots times a, a*, a^2, (a^2)*."""
    a = BJORCK_A
    roots = _roots(12)
    return roots, np.concatenate([roots * x for x in (a, np.conj(a), a * a, np.conj(a * a))])


def dita_alphabets() -> tuple[np.ndarray, np.ndarray]:
    b = DITA_B2
    return _roots(24), np.array([1j * b, -1j * b, 1j * np.conj(b), -1j * np.conj(b)])


@dataclass
class AlgebraicMatch:
    pure_roots: list[int]
    with_irrational: list[int]
    unmatched: list[int]

    @property
    def coverage(self) -> float:
        n = len(self.pure_roots) + len(self.with_irrational) + len(self.unmatched)
        return (len(self.pure_roots) + len(self.with_irrational)) / n if n else 1.0


def dephased_components(v) -> np.ndarray:
    """v rescaled so that its first component is 1; unimodular when v is MU to the standard basis."""
    v = np.asarray(v, dtype=complex)
    return v / v[0]


def match_algebraic(vectors, alphabets, tol: float = 1e-8) -> AlgebraicMatch:
    roots, irr = alphabets
    out = AlgebraicMatch([], [], [])
    for k, v in enumerate(np.atleast_2d(vectors)):
        u = dephased_components(v)
        in_roots = np.min(np.abs(u[:, None] - roots[None, :]), axis=1) <= tol
        in_irr = np.min(np.abs(u[:, None] - irr[None, :]), axis=1) <= tol
        if np.all(in_roots):
            out.pure_roots.append(k)
        elif np.all(in_roots | in_irr):
            out.with_irrational.append(k)
        else:
            out.unmatched.append(k)
    return out


def default_workers() -> int:
    env = os.environ.get("MUBFORGE_THREADS")
    return max(1, int(env)) if env else 1
