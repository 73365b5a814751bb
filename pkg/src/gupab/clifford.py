"""Dirac matrix algebra in the standard (Dirac) representation.

Conventions, fixed once for the whole package:

    alpha_i = [[0, sigma_i], [sigma_i, 0]],   beta = diag(1, 1, -1, -1),
    gamma^0 = beta,   gamma^i = beta alpha_i,   metric eta = (+, -, -, -).

Constructor matrices have entries in {0, +-1, +-i}; sums and products of a
handful of them stay exact in double precision, so algebraic identities
(anticommutators, squares) can be asserted with zero tolerance.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError

PAULI = (
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [1j, 0]], dtype=complex),
    np.array([[1, 0], [0, -1]], dtype=complex),
)

MINKOWSKI_METRIC = np.diag([1.0, -1.0, -1.0, -1.0])

_I2 = np.eye(2, dtype=complex)
_ALPHA = tuple(
    np.block([[np.zeros((2, 2), dtype=complex), s], [s, np.zeros((2, 2), dtype=complex)]])
    for s in PAULI
)
_BETA = np.block([[_I2, np.zeros((2, 2), dtype=complex)], [np.zeros((2, 2), dtype=complex), -_I2]])
_GAMMA = (_BETA.copy(),) + tuple(_BETA @ a for a in _ALPHA)


def alpha(i: int) -> np.ndarray:
    """alpha_i for i in {1, 2, 3}: off-diagonal Pauli blocks."""
    if i not in (1, 2, 3):
        raise DomainError(f"alpha index must be 1, 2 or 3, got {i}")
    return _ALPHA[i - 1].copy()


def beta() -> np.ndarray:
    """beta = diag(1, 1, -1, -1)."""
    return _BETA.copy()


def gamma(mu: int) -> np.ndarray:
    """gamma^mu for mu in {0, 1, 2, 3}; gamma^0 = beta, gamma^i = beta alpha_i."""
    if mu not in (0, 1, 2, 3):
        raise DomainError(f"gamma index must be in 0..3, got {mu}")
    return _GAMMA[mu].copy()


@dataclass(frozen=True)
class FourVector:
    """Contravariant components (t, x, y, z) with the (+, -, -, -) metric."""

    t: float
    x: float
    y: float
    z: float

    def dot(self, other: "FourVector") -> float:
        return self.t * other.t - self.x * other.x - self.y * other.y - self.z * other.z

    def square(self) -> float:
        return self.dot(self)

    def spatial(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z])

    def __add__(self, other: "FourVector") -> "FourVector":
        return FourVector(self.t + other.t, self.x + other.x, self.y + other.y, self.z + other.z)

    def __neg__(self) -> "FourVector":
        return FourVector(-self.t, -self.x, -self.y, -self.z)

    @classmethod
    def from_spatial(cls, t: float, p3) -> "FourVector":
        p3 = np.asarray(p3, dtype=float)
        return cls(float(t), float(p3[0]), float(p3[1]), float(p3[2]))


def slash(p: FourVector) -> np.ndarray:
    """Metric-contracted gamma^mu p_mu = p_t g0 - p_x g1 - p_y g2 - p_z g3.

    Satisfies slash(p) @ slash(p) = (p . p) * I.
    """
    return p.t * _GAMMA[0] - p.x * _GAMMA[1] - p.y * _GAMMA[2] - p.z * _GAMMA[3]


def on_shell_spinor(p3, m: float, branch: str = "particle1") -> np.ndarray:
    """Positive-energy free spinor u with slash(p) u = m u and <u|u> = 1.

    E = +sqrt(|p3|^2 + m^2) is computed internally. The two branches are
    built from the two-spinors (1,0) and (0,1); they are exactly orthogonal
    because (sigma.p)^dagger (sigma.p) = |p|^2 I.
    """
    if not (m > 0.0):
        raise DomainError("on-shell spinor requires m > 0")
    if branch not in ("particle1", "particle2"):
        raise DomainError(f"unknown spinor branch {branch!r}")
    p3 = np.asarray(p3, dtype=float)
    if p3.shape != (3,):
        raise DomainError("p3 must be a 3-vector")
    energy = float(np.sqrt(p3 @ p3 + m * m))
    chi = np.array([1.0, 0.0], dtype=complex) if branch == "particle1" else np.array([0.0, 1.0], dtype=complex)
    sigma_p = p3[0] * PAULI[0] + p3[1] * PAULI[1] + p3[2] * PAULI[2]
    lower = (sigma_p @ chi) / (energy + m)
    u = np.concatenate([chi, lower])
    return u / np.linalg.norm(u)
