import numpy as np
import pytest

from qslab.lindblad import (
    ControlSystem,
    DissipationConvention,
    Dissipator,
    JumpTerm,
    LindbladGenerator,
    apply,
    build_superoperator,
    choi_matrix,
    end_to_end_propagator,
    hamiltonian_superoperator,
    is_cptp,
    propagate,
    validate_density_matrix,
)
from qslab.linalg import kron, vec
from qslab.control import Schedule
from qslab.models import KET_0, KET_1, KET_MINUS, LOWERING, SIGMA_X, SIGMA_Z, make_single_qubit, projector
from qslab.norms import trace_distance


def _damped_qubit(omega, gamma):
    return make_single_qubit(omega, gamma)


def _random_generator(rng, d, n_jumps=2):
    m = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    drift = 0.5 * (m + m.conj().T)
    terms = tuple(
        JumpTerm(rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d)), rng.uniform(0.1, 1.0))
        for _ in range(n_jumps))
    return LindbladGenerator(drift=drift, dissipator=Dissipator(terms))


def test_superoperator_unitary_qubit():
    gen = LindbladGenerator(drift=SIGMA_Z)
    m = build_superoperator(gen)
    eigs = np.sort_complex(np.linalg.eigvals(m))
    assert np.allclose(sorted(eigs.imag), [-2, 0, 0, 2], atol=1e-12)
    assert np.allclose(eigs.real, 0, atol=1e-12)
    assert np.isclose(np.linalg.svd(m, compute_uv=False)[0], 2.0, atol=1e-12)


@pytest.mark.parametrize("omega,gamma", [(1.0, 0.1), (1.0, 1.0), (0.5, 3.0)])
def test_superoperator_damped_qubit_norm(omega, gamma):
    # coherence sector |gamma + 2i*omega|, population sector 2*sqrt(2)*gamma
    sys = _damped_qubit(omega, gamma)
    m = build_superoperator(sys.generator)
    expected = max(np.hypot(gamma, 2 * omega), 2 * np.sqrt(2) * gamma)
    assert np.isclose(np.linalg.svd(m, compute_uv=False)[0], expected, rtol=1e-12)


def test_superoperator_zero_generator():
    gen = LindbladGenerator(drift=np.zeros((2, 2)))
    assert np.array_equal(build_superoperator(gen), np.zeros((4, 4)))


def test_apply_amplitude_damping_excited_state():
    gamma = 0.7
    sys = _damped_qubit(0.0, gamma)
    out = apply(sys.generator, projector(KET_1))
    expected = 2 * gamma * (projector(KET_0) - projector(KET_1))
    assert np.allclose(out, expected, atol=1e-12)


def test_apply_fixed_point_ground_state():
    sys = _damped_qubit(1.3, 0.4)
    assert np.abs(apply(sys.generator, sys.target)).max() <= 1e-12


def test_apply_traceless_and_hermitian():
    rng = np.random.default_rng(41)
    for d in (2, 3, 4):
        gen = _random_generator(rng, d)
        m = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
        rho = 0.5 * (m + m.conj().T)
        out = apply(gen, rho)
        assert abs(np.trace(out)) <= 1e-10 * max(1.0, np.abs(out).max())
        assert np.abs(out - out.conj().T).max() <= 1e-10 * max(1.0, np.abs(out).max())


def test_trace_preservation_of_superoperator():
    rng = np.random.default_rng(43)
    for d in (2, 3, 4):
        gen = _random_generator(rng, d)
        m = build_superoperator(gen)
        vid = vec(np.eye(d))
        assert np.abs(vid.conj() @ m).max() <= 1e-10 * max(1.0, np.abs(m).max())


def test_convention_independence():
    gamma = 0.37
    half = Dissipator((JumpTerm(LOWERING, 2 * gamma),), DissipationConvention.HALF)
    ftwo = Dissipator((JumpTerm(LOWERING, gamma),), DissipationConvention.FACTOR_TWO)
    m_half = build_superoperator(LindbladGenerator(-SIGMA_Z, half))
    m_ftwo = build_superoperator(LindbladGenerator(-SIGMA_Z, ftwo))
    assert np.array_equal(m_half, m_ftwo)


def test_propagate_zero_time():
    sys = _damped_qubit(1.0, 1.0)
    sched = Schedule.zero(0.0, 20, 1)
    out = propagate(sys, sched, samples=3)
    assert len(out) == 3
    assert np.allclose(out[-1], sys.initial)


def test_propagate_free_decay_closed_form():
    # from |-><-|: populations halve at rate 2*gamma, coherences at gamma
    omega, gamma = 1.0, 0.8
    sys = _damped_qubit(omega, gamma)
    t = 1.3
    sched = Schedule.zero(t, 20, 1)
    rho = propagate(sys, sched, samples=1)[-1]
    assert np.isclose(rho[1, 1].real, 0.5 * np.exp(-2 * gamma * t), atol=1e-10)
    assert np.isclose(abs(rho[0, 1]), 0.5 * np.exp(-gamma * t), atol=1e-10)
    expected_01 = -0.5 * np.exp((2j * omega - gamma) * t)
    assert np.allclose(rho[0, 1], expected_01, atol=1e-10)


def test_propagate_unitary_rabi_rotation():
    f, t = 0.7, 2.1
    u = np.cos(f * t) * np.eye(2) - 1j * np.sin(f * t) * SIGMA_X
    rho_exact = u @ projector(KET_0) @ u.conj().T
    sys = ControlSystem(
        generator=LindbladGenerator(drift=f * SIGMA_X),
        controls=(), initial=projector(KET_0), target=rho_exact)
    sched = Schedule(t, np.zeros((8, 0)))
    rho = propagate(sys, sched, samples=1)[-1]
    assert trace_distance(rho, rho_exact) <= 1e-9


def test_propagate_sample_times_match_direct():
    from qslab.linalg import matrix_exp, unvec, vec
    from qslab.lindblad import interval_generators

    sys = _damped_qubit(0.9, 0.5)
    amps = np.linspace(-1.0, 1.0, 6).reshape(6, 1)
    sched = Schedule(2.0, amps)
    samples = propagate(sys, sched, samples=5)
    assert np.allclose(samples[0], sys.initial)
    # oracle: advance interval by interval, then a partial exponential
    mats = interval_generators(sys, sched)
    dt = 2.0 / 6
    for t, rho in zip(np.linspace(0.0, 2.0, 5)[1:], samples[1:]):
        j = min(int(t / dt), 5)
        v = vec(sys.initial)
        for m in mats[:j]:
            v = matrix_exp(dt * m) @ v
        direct = unvec(matrix_exp((t - j * dt) * mats[j]) @ v, 2)
        assert np.abs(rho - direct).max() <= 1e-10


def test_propagation_composition():
    sys = _damped_qubit(1.0, 0.7)
    rng = np.random.default_rng(7)
    amps = rng.uniform(-2, 2, size=(8, 1))
    full = propagate(sys, Schedule(1.6, amps), samples=1)[-1]
    first = propagate(sys, Schedule(0.8, amps[:4]), samples=1)[-1]
    second = propagate(sys, Schedule(0.8, amps[4:]), samples=1, initial=first)[-1]
    assert np.abs(full - second).max() <= 1e-9


def test_is_cptp_identity_channel():
    sys = ControlSystem(
        generator=LindbladGenerator(drift=np.zeros((2, 2))),
        controls=(), initial=projector(KET_0), target=projector(KET_0))
    report = is_cptp(sys, Schedule(1.0, np.zeros((4, 0))))
    assert abs(report.min_choi_eigenvalue) <= 1e-12
    assert report.trace_residual <= 1e-12
    assert report.is_cptp


def test_is_cptp_random_schedule():
    sys = _damped_qubit(1.0, 0.1)
    rng = np.random.default_rng(19)
    sched = Schedule(2.0, rng.uniform(-5, 5, size=(20, 1)))
    report = is_cptp(sys, sched)
    assert report.min_choi_eigenvalue >= -1e-8
    assert report.trace_residual <= 1e-9


def test_is_cptp_long_time_damping_is_constant_map():
    sys = _damped_qubit(0.3, 1.0)
    sched = Schedule.zero(30.0, 10, 1)
    report = is_cptp(sys, sched)
    assert report.min_choi_eigenvalue >= -1e-8
    prop = end_to_end_propagator(sys, sched)
    choi = choi_matrix(prop, 2)
    expected = kron(projector(KET_0), np.eye(2))
    assert np.abs(choi - expected).max() <= 1e-8


def test_density_matrix_validation():
    validate_density_matrix(projector(KET_MINUS))
    with pytest.raises(ValueError):
        validate_density_matrix(np.array([[0.6, 0.0], [0.0, 0.6]]))
    with pytest.raises(ValueError):
        validate_density_matrix(np.array([[1.5, 0.0], [0.0, -0.5]]))


def test_control_system_requires_commuting_initial():
    with pytest.raises(ValueError):
        ControlSystem(
            generator=LindbladGenerator(drift=SIGMA_Z),
            controls=(SIGMA_X,), initial=projector(KET_0), target=projector(KET_0))


def test_hamiltonian_superoperator_matches_apply():
    rng = np.random.default_rng(53)
    m = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
    h = 0.5 * (m + m.conj().T)
    gen = LindbladGenerator(drift=h)
    rho = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
    lhs = hamiltonian_superoperator(h) @ vec(rho)
    assert np.allclose(lhs, vec(apply(gen, rho)), atol=1e-12)
