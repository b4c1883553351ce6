import numpy as np
import pytest

from qslab.lindblad import Dissipator, JumpTerm, LindbladGenerator, build_superoperator
from qslab.models import KET_0, KET_MINUS, SIGMA_Z, make_single_qubit, projector
from qslab.norms import (
    NormMethod,
    induced_11_bracket,
    induced_11_estimate,
    induced_22,
    trace_distance,
    trace_norm,
)


def _random_generator(rng, d, unitary=False):
    m = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    drift = 0.5 * (m + m.conj().T)
    if unitary:
        return LindbladGenerator(drift=drift)
    terms = tuple(
        JumpTerm(rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d)), rng.uniform(0.1, 1.0))
        for _ in range(2))
    return LindbladGenerator(drift=drift, dissipator=Dissipator(terms))


def test_trace_norm_of_density_matrix_is_one():
    rng = np.random.default_rng(2)
    m = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
    rho = m @ m.conj().T
    rho /= np.trace(rho)
    assert np.isclose(trace_norm(rho), 1.0, atol=1e-12)


def test_trace_norm_qubit_state_difference():
    # pure-state formula: 2*sqrt(1 - |<0|->|^2) with overlap^2 = 1/2
    diff = projector(KET_0) - projector(KET_MINUS)
    assert np.isclose(trace_norm(diff), np.sqrt(2.0), atol=1e-12)


def test_trace_norm_orthogonal_bell_pair():
    from qslab.models import bell_state
    minus2 = np.kron(KET_MINUS, KET_MINUS)
    assert abs(np.vdot(bell_state(3), minus2)) <= 1e-12
    diff = projector(bell_state(3)) - projector(minus2)
    assert np.isclose(trace_norm(diff), 2.0, atol=1e-12)


def test_trace_distance_basics():
    rho = projector(KET_0)
    assert trace_distance(rho, rho) == 0.0
    assert np.isclose(trace_distance(projector(KET_0), projector(np.array([0.0, 1.0]))), 1.0)
    assert np.isclose(trace_distance(projector(KET_0), projector(KET_MINUS)),
                      np.sqrt(2.0) / 2.0, atol=1e-12)


def test_induced_22_examples():
    gen = LindbladGenerator(drift=SIGMA_Z)
    assert np.isclose(induced_22(build_superoperator(gen)).value, 2.0, atol=1e-12)
    sys = make_single_qubit(1.0, 0.1)
    report = induced_22(build_superoperator(sys.generator))
    assert report.method is NormMethod.EXACT
    assert np.isclose(report.value, np.sqrt(4.01), rtol=1e-12)


def test_induced_11_identity_superoperator():
    report = induced_11_estimate(np.eye(4), restarts=2)
    assert np.isclose(report.value, 1.0, atol=1e-12)


def test_induced_11_unitary_generator_equals_spread():
    rng = np.random.default_rng(31)
    for d in (2, 3, 4):
        gen = _random_generator(rng, d, unitary=True)
        spread = np.ptp(np.linalg.eigvalsh(gen.drift))
        est = induced_11_estimate(gen, restarts=8)
        assert abs(est.value - spread) <= 1e-9 * max(1.0, spread)
        assert np.isclose(induced_22(build_superoperator(gen)).value, spread, rtol=1e-10)


def test_induced_11_below_sqrt_d_upper_bound():
    rng = np.random.default_rng(37)
    for _ in range(50):
        d = int(rng.integers(2, 5))
        gen = _random_generator(rng, d, unitary=bool(rng.integers(0, 2)))
        report, upper = induced_11_bracket(gen, restarts=8)
        assert report.value <= upper + 1e-9


def test_induced_11_monotone_in_restarts():
    rng = np.random.default_rng(39)
    gen = _random_generator(rng, 3)
    values = [induced_11_estimate(gen, restarts=k).value for k in (1, 2, 4, 8, 16)]
    assert all(b >= a - 1e-14 for a, b in zip(values, values[1:]))


def test_schatten_norm_chain():
    rng = np.random.default_rng(41)
    for _ in range(30):
        d = int(rng.integers(2, 6))
        a = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
        n1 = trace_norm(a)
        n2 = np.linalg.norm(a)
        assert n2 <= n1 + 1e-12
        assert n1 <= np.sqrt(d) * n2 + 1e-12


def test_norm_report_rejects_negative():
    from qslab.norms import NormReport
    with pytest.raises(ValueError):
        NormReport(value=-1.0, method=NormMethod.EXACT)
