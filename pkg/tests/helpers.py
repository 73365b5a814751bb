"""Shared oracles and geometry generators for the test suite.

Everything here is deliberately independent of the package's quadrature and
matrix plumbing: Dirac matrices are rebuilt inline from Pauli blocks, and
contour integrals are brute-force midpoint Riemann sums.
"""

import numpy as np

from gupab.field_geometry import LoopPath, Segment

# Dirac representation rebuilt from scratch (oracle side).
_S = [
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [1j, 0]], dtype=complex),
    np.array([[1, 0], [0, -1]], dtype=complex),
]
_Z2 = np.zeros((2, 2), dtype=complex)
_I2 = np.eye(2, dtype=complex)
ORACLE_BETA = np.block([[_I2, _Z2], [_Z2, -_I2]])
ORACLE_ALPHA = [np.block([[_Z2, s], [s, _Z2]]) for s in _S]
ORACLE_GAMMA = [ORACLE_BETA] + [ORACLE_BETA @ a for a in ORACLE_ALPHA]


def oracle_slash(t, p3):
    p3 = np.asarray(p3, dtype=float)
    return t * ORACLE_GAMMA[0] - p3[0] * ORACLE_GAMMA[1] - p3[1] * ORACLE_GAMMA[2] - p3[2] * ORACLE_GAMMA[3]


def fourier_loop(rng, base_radius=1.5, wobble=0.4, harmonics=3, z_amplitude=0.0):
    """Random smooth closed curve winding once about the z axis.

    rho(s) = base_radius + sum_k (a_k cos(2 pi k s) + b_k sin(2 pi k s)),
    theta(s) = 2 pi s, with the harmonic amplitudes rescaled so rho stays
    within base_radius +- wobble (never reaching the axis).
    """
    a = rng.normal(size=harmonics)
    b = rng.normal(size=harmonics)
    budget = np.sum(np.abs(a)) + np.sum(np.abs(b))
    if budget > 0:
        a *= wobble / budget
        b *= wobble / budget
    k = np.arange(1, harmonics + 1)

    def rho(s):
        angles = 2.0 * np.pi * np.outer(s, k)
        return base_radius + np.cos(angles) @ a + np.sin(angles) @ b

    def drho(s):
        angles = 2.0 * np.pi * np.outer(s, k)
        return (-np.sin(angles) * (2.0 * np.pi * k)) @ a + (np.cos(angles) * (2.0 * np.pi * k)) @ b

    def point(s):
        s = np.atleast_1d(np.asarray(s, dtype=float))
        r = rho(s)
        th = 2.0 * np.pi * s
        return np.column_stack([r * np.cos(th), r * np.sin(th), z_amplitude * np.sin(2.0 * np.pi * s)])

    def tangent(s):
        s = np.atleast_1d(np.asarray(s, dtype=float))
        r = rho(s)
        dr = drho(s)
        th = 2.0 * np.pi * s
        two_pi = 2.0 * np.pi
        return np.column_stack(
            [
                dr * np.cos(th) - r * two_pi * np.sin(th),
                dr * np.sin(th) + r * two_pi * np.cos(th),
                z_amplitude * two_pi * np.cos(two_pi * s),
            ]
        )

    return LoopPath((Segment(point, tangent),))


def random_polynomial_gauge(rng, max_degree=2, terms=4):
    """Random trivariate polynomial chi; returns (chi, grad chi) callables."""
    monomials = []
    for _ in range(terms):
        coeff = rng.uniform(-1.0, 1.0)
        powers = rng.integers(0, max_degree + 1, size=3)
        monomials.append((coeff, tuple(int(p) for p in powers)))

    def chi(point):
        x, y, z = point
        return sum(c * x**i * y**j * z**k for c, (i, j, k) in monomials)

    def grad(point):
        x, y, z = point
        gx = sum(c * i * x ** max(i - 1, 0) * y**j * z**k for c, (i, j, k) in monomials if i)
        gy = sum(c * j * x**i * y ** max(j - 1, 0) * z**k for c, (i, j, k) in monomials if j)
        gz = sum(c * k * x**i * y**j * z ** max(k - 1, 0) for c, (i, j, k) in monomials if k)
        return np.array([gx, gy, gz])

    return chi, grad


def riemann_tangent_sums(loop, nodes=1_000_000, chunk=200_000):
    """Midpoint Riemann sums of |r'(s)| ds and r'(s) ds over the whole path."""
    length = 0.0
    displacement = np.zeros(3)
    for seg in loop.segments:
        done = 0
        while done < nodes:
            count = min(chunk, nodes - done)
            s = (np.arange(done, done + count) + 0.5) / nodes
            tans = seg.tangent(s)
            speed = np.linalg.norm(tans, axis=1)
            length += float(np.sum(speed)) / nodes
            displacement += np.sum(tans, axis=0) / nodes
            done += count
    return length, displacement


def riemann_phase_matrix(loop, particle, a, nodes=1_000_000):
    """Brute-force Riemann evaluation of -a q contour slash(p0) (p0 . dx)."""
    energy, p, v, q = particle.energy, particle.momentum, particle.speed, particle.charge
    total = np.zeros((4, 4), dtype=complex)
    for seg in loop.segments:
        done = 0
        while done < nodes:
            count = min(200_000, nodes - done)
            s = (np.arange(done, done + count) + 0.5) / nodes
            tans = seg.tangent(s)
            speed = np.linalg.norm(tans, axis=1)
            that = tans / speed[:, None]
            weight = (energy / v - p) * speed / nodes  # (p0 . x') ds
            total += np.sum(weight) * energy * ORACLE_GAMMA[0]
            coeffs = -p * (weight @ that)
            total += coeffs[0] * ORACLE_GAMMA[1] + coeffs[1] * ORACLE_GAMMA[2] + coeffs[2] * ORACLE_GAMMA[3]
            done += count
    return -a * q * total


def riemann_projected_phase(loop, particle, a, nodes=1_000_000):
    """Brute-force Riemann evaluation of the comoving projection -a q m (E/v - p) L."""
    length, _ = riemann_tangent_sums(loop, nodes)
    return -a * particle.charge * particle.mass * (particle.energy / particle.speed - particle.momentum) * length


def riemann_circulation(field, loop, nodes=20_000):
    """Midpoint Riemann circulation for per-point field callables."""
    total = 0.0
    for seg in loop.segments:
        s = (np.arange(nodes) + 0.5) / nodes
        pts = seg.point(s)
        tans = seg.tangent(s)
        vals = np.array([field(p) for p in pts])
        total += float(np.einsum("ij,ij->", vals, tans)) / nodes
    return total
