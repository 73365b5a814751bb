import math

import numpy as np
import pytest

from helpers import (
    ORACLE_GAMMA,
    fourier_loop,
    riemann_phase_matrix,
    riemann_projected_phase,
    riemann_tangent_sums,
)
from gupab.clifford import gamma, on_shell_spinor
from gupab.errors import DomainError, GeometryError
from gupab.field_geometry import (
    LoopPath,
    QuadratureSpec,
    SolenoidSpec,
    circle_loop,
    line_segment,
    rectangle_loop,
    winding_number,
)
from gupab.phase_engine import (
    ParticleSpec,
    PhaseResult,
    ab_phase,
    dispersion,
    fringe_shift,
    gup_phase_matrix,
    gup_phase_projected,
    kinematic_momentum,
    total_phase,
)

DOUBLING = QuadratureSpec(refinement="doubling", tolerance=1e-12)
PARTICLE = ParticleSpec(charge=1.0, mass=1.0, speed=0.6)
SOLENOID = SolenoidSpec(flux=1.0, radius=0.1)

# Worked values for m = 1, v = 0.6 (gamma = 1.25, E = 1.25, p = 0.75):
# E/v - p = 4/3, so the unit circle gives -0.01 * (4/3) * 2 pi = -2 pi / 75.
DELTA_PHI_UNIT_CIRCLE = -2.0 * math.pi / 75.0
TOTAL_PHASE_R2 = 1.0 - 4.0 * math.pi / 75.0


def closed_form(particle, a, length):
    return -a * particle.charge * particle.mass * (
        particle.energy / particle.speed - particle.momentum
    ) * length


def test_particle_spec_kinematics():
    assert PARTICLE.lorentz_gamma == pytest.approx(1.25, rel=1e-15)
    assert PARTICLE.energy == pytest.approx(1.25, rel=1e-15)
    assert PARTICLE.momentum == pytest.approx(0.75, rel=1e-15)
    rng = np.random.default_rng(71)
    for _ in range(50):
        particle = ParticleSpec(1.0, rng.uniform(0.1, 3.0), rng.uniform(0.01, 0.99))
        mass_sq = particle.energy**2 - particle.momentum**2
        assert mass_sq == pytest.approx(particle.mass**2, rel=1e-12)


def test_particle_spec_validation():
    with pytest.raises(DomainError):
        ParticleSpec(1.0, 0.0, 0.5)
    with pytest.raises(DomainError):
        ParticleSpec(1.0, 1.0, 1.0)
    with pytest.raises(DomainError):
        ParticleSpec(1.0, 1.0, -0.2)


def test_ab_phase_unit_flux():
    value = ab_phase(PARTICLE, SOLENOID, circle_loop(radius=2.0), DOUBLING)
    assert value == pytest.approx(1.0, abs=1e-10)


def test_ab_phase_non_enclosing_loop():
    loop = circle_loop(center=(5.0, 0.0, 0.0), radius=1.0)
    assert ab_phase(PARTICLE, SOLENOID, loop, DOUBLING) == pytest.approx(0.0, abs=1e-10)


def test_ab_phase_triple_winding():
    value = ab_phase(PARTICLE, SOLENOID, circle_loop(radius=2.0, windings=3), DOUBLING)
    assert value == pytest.approx(3.0, abs=1e-9)


def test_ab_phase_rejects_penetrating_loop():
    with pytest.raises(GeometryError):
        ab_phase(PARTICLE, SOLENOID, circle_loop(center=(0.1, 0.0, 0.0), radius=0.15), DOUBLING)


def test_flux_quantization_across_shapes():
    rng = np.random.default_rng(73)
    loops = [
        circle_loop(radius=0.5),
        circle_loop(radius=2.0, windings=-2),
        rectangle_loop([(1, 1, 0), (-1, 1, 0), (-1, -1, 0), (1, -1, 0)]),
        fourier_loop(rng),
    ]
    for loop in loops:
        w = winding_number(loop).number
        value = ab_phase(PARTICLE, SOLENOID, loop, DOUBLING)
        assert abs(value / (PARTICLE.charge * SOLENOID.flux) - w) <= 1e-9


def test_kinematic_momentum_on_shell():
    momentum = kinematic_momentum(circle_loop(radius=1.0), PARTICLE)
    for s in np.linspace(0.0, 1.0, 17):
        p = momentum(s)
        assert p.square() == pytest.approx(PARTICLE.mass**2, rel=1e-12)
        assert np.linalg.norm(p.spatial()) == pytest.approx(PARTICLE.momentum, rel=1e-12)


def test_kinematic_momentum_constant_on_straight_segment():
    path = LoopPath((line_segment((0, 0, 0), (3, 4, 0)),), closed=False)
    momentum = kinematic_momentum(path, PARTICLE)
    first = momentum(0.0)
    for s in (0.25, 0.5, 0.99):
        p = momentum(s)
        assert p.t == first.t and p.x == first.x and p.y == first.y and p.z == first.z
    assert np.allclose(first.spatial(), PARTICLE.momentum * np.array([0.6, 0.8, 0.0]), atol=1e-15)


def test_kinematic_momentum_circle_tangent_rotates():
    momentum = kinematic_momentum(circle_loop(radius=2.0), PARTICLE)
    quarter = momentum(0.25).spatial()
    assert np.allclose(quarter, PARTICLE.momentum * np.array([-1.0, 0.0, 0.0]), atol=1e-12)


def test_gup_matrix_vanishes_at_zero_coupling():
    matrix = gup_phase_matrix(PARTICLE, circle_loop(radius=1.0), 0.0, DOUBLING)
    assert np.array_equal(matrix, np.zeros((4, 4), dtype=complex))


def test_gup_matrix_exact_linearity():
    loop = circle_loop(radius=1.0)
    once = gup_phase_matrix(PARTICLE, loop, 0.01, DOUBLING)
    twice = gup_phase_matrix(PARTICLE, loop, 0.02, DOUBLING)
    assert np.array_equal(twice, 2.0 * once)


def test_gup_matrix_circle_structure():
    # closed loop: spatial gamma parts integrate away, gamma^0 block remains
    a = 0.01
    loop = circle_loop(radius=1.0)
    matrix = gup_phase_matrix(PARTICLE, loop, a, DOUBLING)
    coefficient = -a * PARTICLE.charge * PARTICLE.energy * (
        PARTICLE.energy / PARTICLE.speed - PARTICLE.momentum
    ) * 2.0 * math.pi
    assert np.max(np.abs(matrix - coefficient * gamma(0))) < 1e-12


def test_gup_matrix_out_and_back_path():
    a, end = 0.02, np.array([1.0, 2.0, 0.0])
    path = LoopPath((line_segment((0, 0, 0), end), line_segment(end, (0, 0, 0))))
    matrix = gup_phase_matrix(PARTICLE, path, a, DOUBLING)
    length = 2.0 * np.linalg.norm(end)
    coefficient = -a * PARTICLE.charge * PARTICLE.energy * (
        PARTICLE.energy / PARTICLE.speed - PARTICLE.momentum
    ) * length
    assert np.max(np.abs(matrix - coefficient * ORACLE_GAMMA[0])) < 1e-12
    oracle = riemann_phase_matrix(path, PARTICLE, a, nodes=200_000)
    assert np.max(np.abs(matrix - oracle)) < 1e-10


def test_gup_matrix_generic_loop_against_riemann_oracle():
    loop = fourier_loop(np.random.default_rng(79), z_amplitude=0.2)
    matrix = gup_phase_matrix(PARTICLE, loop, 0.01, DOUBLING)
    oracle = riemann_phase_matrix(loop, PARTICLE, 0.01, nodes=400_000)
    assert np.max(np.abs(matrix - oracle)) < 1e-10


def test_gup_matrix_hermiticity():
    loops = [
        circle_loop(radius=1.0),
        rectangle_loop([(1, 1, 0), (-1, 1, 0), (-1, -1, 0), (1, -1, 0)]),
    ]
    for loop in loops:
        matrix = gup_phase_matrix(PARTICLE, loop, 0.01, DOUBLING)
        # gamma^0 block carries a purely real coefficient, exactly
        assert np.array_equal(np.diag(matrix).imag, np.zeros(4))
        assert np.max(np.abs(matrix - matrix.conj().T)) < 1e-12


def test_gup_projected_worked_value():
    projected = gup_phase_projected(PARTICLE, circle_loop(radius=1.0), 0.01, DOUBLING)
    assert projected == pytest.approx(DELTA_PHI_UNIT_CIRCLE, abs=1e-12)
    oracle = riemann_projected_phase(circle_loop(radius=1.0), PARTICLE, 0.01, nodes=1_000_000)
    assert projected == pytest.approx(oracle, abs=1e-8)


def test_gup_projected_zero_coupling():
    assert gup_phase_projected(PARTICLE, circle_loop(radius=1.0), 0.0, DOUBLING) == 0.0


def test_gup_projected_exact_linearity():
    loop = circle_loop(radius=1.3)
    once = gup_phase_projected(PARTICLE, loop, 0.005, DOUBLING)
    twice = gup_phase_projected(PARTICLE, loop, 0.01, DOUBLING)
    assert twice / once == pytest.approx(2.0, rel=1e-14)


def test_closed_form_across_loop_shapes():
    rng = np.random.default_rng(83)
    a = 0.01
    cases = [
        (circle_loop(radius=1.0), 2.0 * math.pi),
        (circle_loop(radius=2.5), 5.0 * math.pi),
        (rectangle_loop([(1, 1, 0), (-1, 1, 0), (-1, -1, 0), (1, -1, 0)]), 8.0),
    ]
    for _ in range(10):
        loop = fourier_loop(rng, z_amplitude=rng.uniform(0.0, 0.3))
        length, _ = riemann_tangent_sums(loop, nodes=100_000)
        cases.append((loop, length))
    for loop, length in cases:
        projected = gup_phase_projected(PARTICLE, loop, a, DOUBLING)
        expected = closed_form(PARTICLE, a, length)
        assert projected == pytest.approx(expected, rel=1e-10)


def test_energy_speed_identity():
    # E/v - p = m / (gamma v), the on-shell contraction behind the closed form
    for v in np.linspace(0.01, 0.99, 50):
        particle = ParticleSpec(1.0, 1.0, float(v))
        lhs = particle.energy / particle.speed - particle.momentum
        rhs = particle.mass / (particle.lorentz_gamma * particle.speed)
        assert lhs == pytest.approx(rhs, rel=1e-12)


def test_fixed_spinor_matches_comoving_on_straight_segment():
    path = LoopPath((line_segment((0, 0, 0), (0, 0, 2.0)),), closed=False)
    u = on_shell_spinor((0.0, 0.0, PARTICLE.momentum), PARTICLE.mass)
    fixed = gup_phase_projected(PARTICLE, path, 0.01, DOUBLING, projection="fixed_spinor", spinor=u)
    comoving = gup_phase_projected(PARTICLE, path, 0.01, DOUBLING)
    assert fixed == pytest.approx(comoving, abs=1e-10)


def test_fixed_spinor_requires_spinor():
    with pytest.raises(DomainError):
        gup_phase_projected(PARTICLE, circle_loop(radius=1.0), 0.01, DOUBLING, projection="fixed_spinor")
    with pytest.raises(DomainError):
        gup_phase_projected(PARTICLE, circle_loop(radius=1.0), 0.01, DOUBLING, projection="unknown")


def test_total_phase_zero_coupling_recovers_standard():
    result = total_phase(PARTICLE, SOLENOID, circle_loop(radius=2.0), 0.0, DOUBLING)
    assert result.projected_correction == 0.0
    assert np.array_equal(result.correction_matrix, np.zeros((4, 4), dtype=complex))
    assert result.total_phase == result.standard_phase


def test_total_phase_worked_example():
    result = total_phase(PARTICLE, SOLENOID, circle_loop(radius=2.0), 0.01, DOUBLING)
    assert result.standard_phase == pytest.approx(1.0, abs=1e-10)
    assert result.projected_correction == pytest.approx(2.0 * DELTA_PHI_UNIT_CIRCLE, rel=1e-10)
    assert result.total_phase == pytest.approx(TOTAL_PHASE_R2, abs=1e-9)
    assert result.total_phase == result.standard_phase + result.projected_correction
    assert result.quadrature_error < 1e-10
    assert result.a == 0.01


def test_total_phase_orientation_flip():
    forward = total_phase(PARTICLE, SOLENOID, circle_loop(radius=2.0), 0.01, DOUBLING)
    backward = total_phase(PARTICLE, SOLENOID, circle_loop(radius=2.0, windings=-1), 0.01, DOUBLING)
    assert backward.standard_phase == pytest.approx(-forward.standard_phase, rel=1e-10)
    # the worldline element (E/v - p)|dr| is orientation independent
    assert backward.projected_correction == pytest.approx(forward.projected_correction, rel=1e-10)
    oracle = riemann_phase_matrix(circle_loop(radius=2.0, windings=-1), PARTICLE, 0.01, nodes=200_000)
    assert np.max(np.abs(backward.correction_matrix - oracle)) < 1e-10


def test_phase_result_json_round_trip():
    result = total_phase(PARTICLE, SOLENOID, circle_loop(radius=2.0), 0.01, DOUBLING)
    payload = result.to_json_dict()
    assert len(payload["correction_matrix"]) == 16
    restored = PhaseResult.from_json_dict(payload)
    assert restored.standard_phase == result.standard_phase
    assert restored.total_phase == result.total_phase
    assert np.array_equal(restored.correction_matrix, result.correction_matrix)


def test_dispersion_rest_frame():
    result = dispersion((0.0, 0.0, 0.0), 1.0, 0.0)
    assert np.allclose(result.eigenvalues, [-1.0, -1.0, 1.0, 1.0], atol=1e-15)
    assert result.e_plus == 1.0 and result.e_minus == -1.0


def test_dispersion_worked_value():
    result = dispersion((0.6, 0.0, 0.0), 1.0, 0.1)
    assert result.e_plus == pytest.approx(math.sqrt(1.36) + 0.036, rel=1e-14)
    expected = np.array([result.e_minus, result.e_minus, result.e_plus, result.e_plus])
    assert np.max(np.abs(result.eigenvalues - expected)) < 1e-12


def test_dispersion_branch_uniform_shift():
    rng = np.random.default_rng(89)
    for _ in range(25):
        p3 = rng.uniform(-2.0, 2.0, size=3)
        m = rng.uniform(0.2, 2.0)
        a = rng.uniform(0.0, 0.3)
        base = dispersion(p3, m, 0.0)
        shifted = dispersion(p3, m, a)
        expected_shift = a * float(p3 @ p3)
        assert shifted.e_plus - base.e_plus == pytest.approx(expected_shift, abs=1e-12)
        assert shifted.e_minus - base.e_minus == pytest.approx(expected_shift, abs=1e-12)
        assert np.max(np.abs(shifted.eigenvalues - (base.eigenvalues + expected_shift))) < 1e-12


def test_dispersion_random_agreement():
    rng = np.random.default_rng(97)
    for _ in range(100):
        p3 = rng.uniform(-2.0, 2.0, size=3)
        m = rng.uniform(0.2, 2.0)
        a = rng.uniform(0.0, 0.3)
        result = dispersion(p3, m, a)
        expected = np.array([result.e_minus, result.e_minus, result.e_plus, result.e_plus])
        assert np.max(np.abs(result.eigenvalues - expected)) <= 1e-12


def test_dispersion_domain():
    with pytest.raises(DomainError):
        dispersion((0.1, 0.0, 0.0), -1.0, 0.0)


def test_fringe_shift_values():
    assert fringe_shift(0.0).delta_n == 0.0
    assert fringe_shift(2.0 * math.pi).delta_n == pytest.approx(1.0, rel=1e-15)
    phi = 0.7
    assert fringe_shift(phi + 2.0 * math.pi).delta_n == pytest.approx(fringe_shift(phi).delta_n + 1.0, rel=1e-14)
    reading = fringe_shift(phi)
    assert reading.intensity(-phi) == pytest.approx(1.0, rel=1e-15)
    assert reading.intensity(math.pi - phi) == pytest.approx(0.0, abs=1e-15)
