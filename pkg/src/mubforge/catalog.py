"""Complex Hadamard matrices and families of order six (plus Fourier matrices of any order).

Parameters are in radians unless stated otherwise.  Constructors evaluate the
defining formulas verbatim for any real input; reduction of parameters into a
fundamental domain is done by :class:`FamilyPoint`, so that relations such as
``K(x1 + pi, x2) = K(x1, x2) P34 P56`` can be checked on the raw formulas.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .linalg import DimensionError, as_matrix, tensor, transposition

I2 = 1j


class CatalogError(ValueError):
    pass


class ParameterRangeError(CatalogError):
    pass


class SingularParameterError(CatalogError):
    pass


class FamilyId(enum.Enum):
    FOURIER = "F"
    FOURIER6 = "F6"
    DITA6 = "D6"
    TAO6 = "S6"
    BJORCK6 = "B6"
    MATOLCSI6 = "M6"
    KARLSSON2 = "K2"
    KARLSSON3 = "K3"

    @classmethod
    def parse(cls, name: str) -> "FamilyId":
        try:
            return cls(name)
        except ValueError:
            known = ", ".join(f.value for f in cls)
            raise CatalogError(f"unknown family {name!r} (expected one of {known})") from None

    @property
    def arity(self) -> int:
        return _ARITY[self]


_ARITY = {
    FamilyId.FOURIER: 0,
    FamilyId.FOURIER6: 2,
    FamilyId.DITA6: 1,
    FamilyId.TAO6: 0,
    FamilyId.BJORCK6: 1,
    FamilyId.MATOLCSI6: 1,
    FamilyId.KARLSSON2: 2,
    FamilyId.KARLSSON3: 3,
}


# ---------------------------------------------------------------------------
# affine families


@dataclass(frozen=True)
class AffineFamilySpec:
    """H(x) = H(0) o Exp(i R(x)), with o the entrywise product."""

    base: np.ndarray
    phase_pattern: Callable[..., np.ndarray]

    def __call__(self, *params: float) -> np.ndarray:
        r = np.asarray(self.phase_pattern(*params), dtype=float)
        return self.base * np.exp(1j * r)


def fourier(d: int) -> np.ndarray:
    if d < 2:
        raise ParameterRangeError(f"Fourier matrix needs d >= 2, got {d}")
    k = np.arange(d)
    return np.exp(2j * np.pi * np.outer(k, k) / d)


def _fourier6_pattern(a: float, b: float) -> np.ndarray:
    r = np.zeros((6, 6))
    r[1::2, 1:] = [a, b, 0, a, b]
    return r


FOURIER6_FAMILY = AffineFamilySpec(fourier(6), _fourier6_pattern)


def fourier_family6(a: float, b: float) -> np.ndarray:
    """Two-parameter affine family through F6; (0, 0) gives F6 itself."""
    return FOURIER6_FAMILY(a, b)


_DITA_BASE = np.array(
    [
        [1, 1, 1, 1, 1, 1],
        [1, -1, I2, -I2, -I2, I2],
        [1, I2, -1, I2, -I2, -I2],
        [1, -I2, I2, -1, I2, -I2],
        [1, -I2, -I2, I2, -1, I2],
        [1, I2, -I2, -I2, I2, -1],
    ]
)
_DITA_SIGNS = np.array(
    [
        [0, 0, 0, 0, 0, 0],
        [0, 0, 1, 1, 0, 0],
        [0, -1, 0, 0, -1, 0],
        [0, -1, 0, 0, -1, 0],
        [0, 0, 1, 1, 0, 0],
        [0, 0, 0, 0, 0, 0],
    ]
)
# the family parameter c is a fraction of a full turn: the phase is 2*pi*c
DITA_RANGE = (-1 / 8, 1 / 8)
DITA_FAMILY = AffineFamilySpec(_DITA_BASE, lambda c: 2 * np.pi * c * _DITA_SIGNS)


def dita(c: float) -> np.ndarray:
    lo, hi = DITA_RANGE
    if not lo - 1e-12 <= c <= hi + 1e-12:
        raise ParameterRangeError(f"Dita parameter c={c} outside [{lo}, {hi}]")
    return DITA_FAMILY(c)


def tao() -> np.ndarray:
    """Tao's isolated spectral matrix; every entry is a cube root of unity."""
    w = np.exp(2j * np.pi / 3)
    powers = np.array(
        [
            [0, 0, 0, 0, 0, 0],
            [0, 0, 1, 1, 2, 2],
            [0, 1, 0, 2, 2, 1],
            [0, 1, 2, 0, 1, 2],
            [0, 2, 2, 1, 0, 1],
            [0, 2, 1, 2, 1, 0],
        ]
    )
    return w**powers


# ---------------------------------------------------------------------------
# Beauchamp-Nicoara self-adjoint family (catalog symbol B6)

BJORCK_EDGE = float(np.arccos((-1 + np.sqrt(3)) / 2))


def bjorck_in_domain(s: float, tol: float = 1e-12) -> bool:
    return -np.pi - tol <= s <= np.pi + tol and np.cos(s) <= np.cos(BJORCK_EDGE) + tol


def bjorck(s: float) -> np.ndarray:
    """Self-adjoint one-parameter family, s in [-pi, -e] U [e, pi] with e = arccos((sqrt(3)-1)/2).

    With y = exp(is), z = (1 + 2y - y^2) / (y (-1 + 2y + y^2)) and w = 2 + y + conj(z),
    the remaining entries x, t are the unimodular pair with x + conj(t) = w
    (branch: Im(x conj(w)) >= 0).
    """
    if not bjorck_in_domain(s):
        raise ParameterRangeError(
            f"B6 parameter s={s} outside [-pi, -{BJORCK_EDGE:.6f}] U [{BJORCK_EDGE:.6f}, pi]"
        )
    y = np.exp(1j * s)
    z = (1 + 2 * y - y * y) / (y * (-1 + 2 * y + y * y))
    w = 2 + y + np.conj(z)
    # w -> 0 at s = +-pi, approaching along the positive real axis from both sides
    direction = w / abs(w) if abs(w) > 1e-12 else 1.0
    x = 0.5 * w + 1j * direction * np.sqrt(max(0.0, 1 - 0.25 * abs(w) ** 2))
    t = np.conj(w - x)
    c = np.conj
    return np.array(
        [
            [1, 1, 1, 1, 1, 1],
            [1, -1, c(x), -y, -c(x), y],
            [1, x, -1, t, -t, -x],
            [1, -c(y), c(t), -1, c(y), -c(t)],
            [1, -x, -c(t), y, 1, c(z)],
            [1, c(y), -c(x), -t, z, 1],
        ]
    )


# ---------------------------------------------------------------------------
# Karlsson's two-parameter family


def _karlsson_f(x1: float, x2: float, direction: tuple[float, float] | None = None) -> complex:
    """Generator f of K2, written as exp(i(x1+x2)/2) u (sqrt(s)/2 + i sqrt(1 - s/4)).

    Here p = cos((x1-x2)/2) - i sin((x1+x2)/2), s = |p|^2 = 1 + sin x1 sin x2 and
    u = p/|p|.  At s = 0 the value depends on how the point is approached;
    ``direction`` supplies the approach direction and u becomes the direction
    of the first-order change of p.
    """
    p = np.cos(0.5 * (x1 - x2)) - 1j * np.sin(0.5 * (x1 + x2))
    s = abs(p) ** 2
    if abs(p) <= _SINGULAR_TOL:
        if direction is None:
            raise SingularParameterError(f"f is singular at ({x1}, {x2})")
        d1, d2 = direction
        p = -0.5 * np.sin(0.5 * (x1 - x2)) * (d1 - d2) - 0.5j * np.cos(0.5 * (x1 + x2)) * (d1 + d2)
        s = 0.0
    u = p / abs(p)
    return np.exp(0.5j * (x1 + x2)) * u * (0.5 * np.sqrt(s) + 1j * np.sqrt(1 - 0.25 * s))


_SINGULAR_TOL = 1e-14


def karlsson2_singular(x1: float, x2: float) -> bool:
    # f is evaluated at (+-x1, +-x2); |p| vanishes where 1 +- sin x1 sin x2 = 0
    for y1, y2 in ((x1, x2), (x1, -x2)):
        for a, b in ((y1, y2), (-y1, -y2)):
            p = np.cos(0.5 * (a - b)) - 1j * np.sin(0.5 * (a + b))
            if abs(p) <= _SINGULAR_TOL:
                return True
    return False


def _karlsson2_matrix(x1: float, x2: float, direction=None) -> np.ndarray:
    z1, z2 = np.exp(1j * x1), np.exp(1j * x2)
    if direction is None:
        d1 = d2 = None
    else:
        d1, d2 = direction
    f1 = _karlsson_f(x1, x2, None if d1 is None else (d1, d2))
    f2 = _karlsson_f(x1, -x2, None if d1 is None else (d1, -d2))
    f3 = _karlsson_f(-x1, -x2, None if d1 is None else (-d1, -d2))
    f4 = _karlsson_f(-x1, x2, None if d1 is None else (-d1, d2))
    c = np.conj
    return np.array(
        [
            [1, 1, 1, 1, 1, 1],
            [1, -1, z1, -z1, z1, -z1],
            [1, z2, -f1, -z2 * f2, -c(f3), -z2 * c(f4)],
            [1, -z2, -z1 * c(f2), z1 * z2 * c(f1), -z1 * f4, z1 * z2 * f3],
            [1, z2, -c(f3), -z2 * c(f4), -f1, -z2 * f2],
            [1, -z2, -z1 * f4, z1 * z2 * f3, -z1 * c(f2), z1 * z2 * c(f1)],
        ]
    )


def karlsson2(x1: float, x2: float) -> np.ndarray:
    if karlsson2_singular(x1, x2):
        raise SingularParameterError(
            f"K2 is singular at ({x1}, {x2}): the corners (+-pi/2, +-pi/2) are "
            "direction-dependent limits equivalent to members of the Dita family; "
            "use dita(c) or karlsson2_corner_limit() instead"
        )
    return _karlsson2_matrix(x1, x2)


def karlsson2_corner_limit(sign1: int, sign2: int, angle: float) -> np.ndarray:
    """Limit of K2 at the corner (sign1 pi/2, sign2 pi/2) approached from inside the square.

    The approach direction is (-sign1 cos(angle), -sign2 sin(angle)), angle in [0, pi/2].
    """
    corner = (sign1 * np.pi / 2, sign2 * np.pi / 2)
    direction = (-sign1 * np.cos(angle), -sign2 * np.sin(angle))
    return _karlsson2_matrix(*corner, direction=direction)


P34_P56 = transposition(6, (3, 4), (5, 6))
P36_P45 = transposition(6, (3, 6), (4, 5))
P12_P34_P56 = transposition(6, (1, 2), (3, 4), (5, 6))
P35_P46 = transposition(6, (3, 5), (4, 6))
P46 = transposition(6, (4, 6))


def _half_sign_diag(z: complex) -> np.ndarray:
    zc = np.conj(z)
    return np.diag([1, -1, zc, -zc, zc, -zc])


def karlsson2_relations(x1: float, x2: float) -> dict[str, float]:
    """Entrywise residuals of the exact reflection, transposition and pi-shift identities of K2."""
    k = karlsson2(x1, x2)
    z1, z2 = np.exp(1j * x1), np.exp(1j * x2)
    rhs = {
        "reflect_x2": (karlsson2(x1, -x2), _half_sign_diag(z2) @ k @ P12_P34_P56),
        "reflect_x1": (karlsson2(-x1, x2), P12_P34_P56 @ k @ _half_sign_diag(z1) @ P35_P46),
        "swap": (karlsson2(x2, x1), P46 @ k.T @ P46),
        "shift_x1": (karlsson2(x1 + np.pi, x2), k @ P34_P56),
        "shift_x2": (karlsson2(x1, x2 + np.pi), P36_P45 @ k),
    }
    return {name: float(np.max(np.abs(a - b))) for name, (a, b) in rhs.items()}


def karlsson2_relations_up_to_equivalence(x1: float, x2: float, tol: float = 1e-8) -> dict[str, bool]:
    """Reflections hold modulo equivalence, the swap modulo transposition."""
    k = karlsson2(x1, x2)
    return {
        "reflect_x2": equivalence_test(karlsson2(x1, -x2), P36_P45 @ k, tol),
        "reflect_x1": equivalence_test(karlsson2(-x1, x2), P36_P45 @ k, tol),
        "swap": equivalence_test(karlsson2(x2, x1), k.T, tol),
    }


def pi_shift_check(x1: float, x2: float, tol: float = 1e-12) -> bool:
    r = karlsson2_relations(x1, x2)
    return r["shift_x1"] <= tol and r["shift_x2"] <= tol


# ---------------------------------------------------------------------------
# Matolcsi-Szollosi family (catalog symbol M6), the diagonal of K2

MATOLCSI_DOMAIN = ((np.pi / 2, np.pi), (3 * np.pi / 2, 2 * np.pi))


def matolcsi_diagonal(t: float) -> float:
    """Diagonal coordinate x of K2(x, x) for M6(t); the open ends t -> pi/2, 3pi/2 sit on the singular corner."""
    for lo, hi in MATOLCSI_DOMAIN:
        if lo < t <= hi + 1e-12:
            return float(hi - t)
    raise ParameterRangeError(f"M6 parameter t={t} outside (pi/2, pi] U (3pi/2, 2pi]")


def matolcsi(t: float) -> np.ndarray:
    return karlsson2(*(2 * (matolcsi_diagonal(t),)))


# ---------------------------------------------------------------------------
# Karlsson's three-parameter family


def mobius(alpha: complex, beta: complex, z: complex, tol: float = 1e-14) -> complex:
    """(alpha z - beta) / (conj(beta) z - conj(alpha))."""
    den = np.conj(beta) * z - np.conj(alpha)
    if abs(den) <= tol:
        raise SingularParameterError(
            f"Mobius map with alpha={alpha}, beta={beta} has a pole at z={z}"
        )
    return (alpha * z - beta) / den


def mobius_inverse(alpha: complex, beta: complex, w: complex, tol: float = 1e-14) -> complex:
    # inverse of M_(alpha, beta) is M_(conj(alpha), beta)
    return mobius(np.conj(alpha), beta, w, tol)


def karlsson3_blocks(theta: float, phi: float) -> tuple[np.ndarray, np.ndarray]:
    """The 2x2 blocks A and B = -F2 - A."""
    a11 = -0.5 + 0.5j * np.sqrt(3) * (np.cos(theta) + np.exp(-1j * phi) * np.sin(theta))
    a12 = -0.5 + 0.5j * np.sqrt(3) * (-np.cos(theta) + np.exp(1j * phi) * np.sin(theta))
    a = np.array([[a11, a12], [np.conj(a12), -np.conj(a11)]])
    return a, -fourier(2) - a


def karlsson3_phases(theta: float, phi: float, psi: float) -> tuple[complex, complex, complex, complex]:
    """z1..z4; z2..z4 are principal square roots of their Mobius images.

    At theta = 0 the two maps are the constant 1 and the chain defining z2 is
    0/0; there z2 = z3 = z4 = 1, which is the affine Fourier slice.
    """
    a, b = karlsson3_blocks(theta, phi)
    z1 = np.exp(1j * psi)
    if np.sin(theta) == 0:
        return z1, 1 + 0j, 1 + 0j, 1 + 0j
    alpha_a, beta_a = a[0, 1] ** 2, a[0, 0] ** 2
    alpha_b, beta_b = b[0, 1] ** 2, b[0, 0] ** 2
    try:
        z3_sq = mobius(alpha_a, beta_a, z1**2)
        z4_sq = mobius(alpha_b, beta_b, z1**2)
        z2_sq = mobius_inverse(alpha_a, beta_a, z4_sq)
    except SingularParameterError as err:
        raise SingularParameterError(
            f"K3({theta}, {phi}, {psi}): {err}"
        ) from None
    return z1, np.sqrt(z2_sq), np.sqrt(z3_sq), np.sqrt(z4_sq)


def karlsson3(theta: float, phi: float, psi: float) -> np.ndarray:
    a, b = karlsson3_blocks(theta, phi)
    z1, z2, z3, z4 = karlsson3_phases(theta, phi, psi)

    def row_type(z):
        return np.array([[1, 1], [z, -z]])

    def col_type(z):
        return np.array([[1, z], [1, -z]])

    Z1, Z2, Z3, Z4 = row_type(z1), row_type(z2), col_type(z3), col_type(z4)
    return np.block(
        [
            [fourier(2), Z1, Z2],
            [Z3, Z3 @ a @ Z1 / 2, Z3 @ b @ Z2 / 2],
            [Z4, Z4 @ b @ Z1 / 2, Z4 @ a @ Z2 / 2],
        ]
    )


def karlsson3_affine_slice(psi: float) -> np.ndarray:
    """(P46 . F2 (x) F3) o Exp(i R(psi)); the tensor factor order is the one
    where the F2 index runs fastest, i.e. numpy.kron(F3, F2)."""
    r = np.zeros((6, 6))
    r[1::2, 2:4] = psi
    base = transposition(6, (4, 6)) @ tensor(fourier(3), fourier(2))
    return base * np.exp(1j * r)


# ---------------------------------------------------------------------------
# equivalence


def _dephase_stack(m: np.ndarray, first_col: int) -> np.ndarray:
    """Dephase a stack of matrices (n, d, d) against row 0 and column `first_col`."""
    row = m[:, :1, :]
    col = m[:, :, first_col : first_col + 1]
    corner = m[:, :1, first_col : first_col + 1]
    return m * corner / (row * col)


@dataclass(frozen=True)
class EquivalenceWitness:
    """h1 = P1 @ D1 @ h2 @ D2 @ P2."""

    p1: np.ndarray
    d1: np.ndarray
    d2: np.ndarray
    p2: np.ndarray

    def apply(self, h2) -> np.ndarray:
        return self.p1 @ self.d1 @ as_matrix(h2) @ self.d2 @ self.p2


def _perm_matrix_rows(order) -> np.ndarray:
    # (P @ m)[i] = m[order[i]]
    return np.eye(len(order))[list(order)]


def equivalence_witness(h1, h2, tol: float = 1e-8) -> EquivalenceWitness | None:
    """Search for P1, D1, D2, P2 with h1 = P1 D1 h2 D2 P2; None when inequivalent.

    Exhausts the row permutations of h2 and the choice of its leading column,
    dephases, and compares the resulting column multiset with that of h1.
    """
    h1 = as_matrix(h1)
    h2 = as_matrix(h2)
    if h1.shape != h2.shape or h1.shape[0] != h1.shape[1]:
        raise DimensionError(f"dimension mismatch: {h1.shape} vs {h2.shape}")
    d = h1.shape[0]
    if d > 8:
        raise DimensionError("exhaustive equivalence search is limited to d <= 8")
    if np.min(np.abs(h1)) <= tol or np.min(np.abs(h2)) <= tol:
        raise CatalogError("equivalence test needs matrices without zero entries")
    if np.max(np.abs(np.abs(h1) - np.abs(h1[0, 0]))) > tol * abs(h1[0, 0]):
        raise CatalogError("equivalence test expects matrices with entries of equal modulus")
    u1 = h1 / np.abs(h1)
    u2 = h2 / np.abs(h2)
    target = _dephase_stack(u1[None], 0)[0]
    perms = np.array(list(itertools.permutations(range(d))))
    stack = u2[perms]
    for c in range(d):
        cand = _dephase_stack(stack, c)
        # dist[p, k, l] = max_j |cand[p, j, k] - target[j, l]|
        dist = np.max(np.abs(cand[:, :, :, None] - target[None, :, None, :]), axis=1)
        match = dist <= tol
        ok = np.all(match.sum(axis=1) == 1, axis=1) & np.all(match.sum(axis=2) == 1, axis=1)
        hits = np.flatnonzero(ok)
        if hits.size == 0:
            continue
        p = hits[0]
        col_order = np.argmax(match[p], axis=0)  # target column l <- candidate column col_order[l]
        p1 = _perm_matrix_rows(perms[p])
        p2 = _perm_matrix_rows(col_order).T
        ratio = h1 / (p1 @ h2 @ p2)  # = a_j b_k
        b = ratio[0, :]
        a = ratio[:, 0] / b[0]
        # diag(a) P1 h2 P2 diag(b) = P1 D1 h2 D2 P2
        return EquivalenceWitness(p1, p1.T @ np.diag(a) @ p1, p2 @ np.diag(b) @ p2.T, p2)
    return None


def equivalence_test(h1, h2, tol: float = 1e-8) -> bool:
    """True iff h1 = P1 D1 h2 D2 P2 for permutations P and unimodular diagonals D."""
    return equivalence_witness(h1, h2, tol) is not None


# ---------------------------------------------------------------------------
# family points and dispatch


def _wrap(x: float, lo: float, period: float) -> float:
    return float((x - lo) % period + lo)


def canonical_karlsson2(x1: float, x2: float) -> tuple[float, float]:
    """Reduce (x1, x2) into [-pi/2, pi/2]^2 using the pi-shift relations."""
    return _wrap(x1, -np.pi / 2, np.pi), _wrap(x2, -np.pi / 2, np.pi)


@dataclass(frozen=True)
class FamilyPoint:
    family: FamilyId
    params: tuple[float, ...] = ()
    d: int = 6

    def __post_init__(self):
        if len(self.params) != self.family.arity:
            raise CatalogError(
                f"{self.family.value} takes {self.family.arity} parameters, got {len(self.params)}"
            )
        params = tuple(float(p) for p in self.params)
        if self.family is FamilyId.KARLSSON2:
            params = canonical_karlsson2(*params)
        elif self.family is FamilyId.KARLSSON3:
            params = tuple(_wrap(p, 0.0, np.pi) for p in params)
        object.__setattr__(self, "params", params)
        if self.family is not FamilyId.FOURIER and self.d != 6:
            raise CatalogError(f"family {self.family.value} exists only in dimension 6")

    def matrix(self) -> np.ndarray:
        return build(self.family, self.params, self.d)


def build(family: FamilyId | str, params=(), d: int = 6) -> np.ndarray:
    if isinstance(family, str):
        family = FamilyId.parse(family)
    params = tuple(params)
    if len(params) != family.arity:
        raise CatalogError(f"{family.value} takes {family.arity} parameters, got {len(params)}")
    if family is FamilyId.FOURIER:
        return fourier(d)
    if d != 6:
        raise CatalogError(f"family {family.value} exists only in dimension 6")
    ctor = {
        FamilyId.FOURIER6: fourier_family6,
        FamilyId.DITA6: dita,
        FamilyId.TAO6: tao,
        FamilyId.BJORCK6: bjorck,
        FamilyId.MATOLCSI6: matolcsi,
        FamilyId.KARLSSON2: karlsson2,
        FamilyId.KARLSSON3: karlsson3,
    }[family]
    return ctor(*params)
