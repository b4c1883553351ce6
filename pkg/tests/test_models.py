import math

import numpy as np
import pytest

from qslab.lindblad import (
    DissipationConvention,
    Dissipator,
    JumpTerm,
    LindbladGenerator,
    apply,
    build_superoperator,
)
from qslab.models import (
    BathSpec,
    IsingSpec,
    KET_MINUS,
    LOWERING,
    SIGMA_X,
    SIGMA_Z,
    bell_state,
    bohr_decomposition,
    davies_rate,
    gibbs_state,
    ising_hamiltonian,
    make_bell,
    make_ising_davies,
    make_single_qubit,
    site_operator,
    transverse_field,
)
from qslab.norms import trace_norm


def test_single_qubit_fixed_point_and_commutation():
    sys = make_single_qubit(1.0, 0.5)
    assert np.abs(apply(sys.generator, sys.target)).max() <= 1e-12
    h1 = sys.controls[0]
    assert np.abs(h1 @ sys.initial - sys.initial @ h1).max() <= 1e-12


def test_single_qubit_superoperator_norm_formula():
    for omega, gamma in [(1.0, 0.1), (1.0, 2.0), (0.0, 1.0)]:
        sys = make_single_qubit(omega, gamma)
        smax = np.linalg.svd(build_superoperator(sys.generator), compute_uv=False)[0]
        assert np.isclose(smax, max(np.hypot(gamma, 2 * omega), 2 * np.sqrt(2) * gamma),
                          rtol=1e-12)


def test_single_qubit_matches_half_convention_construction():
    gamma = 0.9
    sys = make_single_qubit(1.0, gamma)
    manual = LindbladGenerator(
        drift=-SIGMA_Z,
        dissipator=Dissipator((JumpTerm(LOWERING, 2 * gamma),), DissipationConvention.HALF))
    assert np.array_equal(build_superoperator(sys.generator), build_superoperator(manual))


def test_bell_target_is_fixed_point():
    sys = make_bell(1.0, 1.0)
    assert np.abs(apply(sys.generator, sys.target)).max() <= 1e-12


def test_bell_states_orthonormal_and_initial_orthogonal_to_target():
    overlaps = np.array([[abs(np.vdot(bell_state(i), bell_state(j))) for j in range(4)]
                         for i in range(4)])
    assert np.allclose(overlaps, np.eye(4), atol=1e-12)
    minus2 = np.kron(KET_MINUS, KET_MINUS)
    assert abs(np.vdot(bell_state(3), minus2)) <= 1e-12
    sys = make_bell(1.0, 1.0)
    assert np.isclose(trace_norm(sys.target - sys.initial), 2.0, atol=1e-12)


def test_bell_unique_fixed_point():
    sys = make_bell(1.0, 1.0)
    eigs = np.linalg.eigvals(build_superoperator(sys.generator))
    assert int(np.sum(np.abs(eigs) < 1e-10)) == 1


def test_bell_extended_controls_commute_with_initial():
    sys = make_bell(1.0, 0.5, extended_controls=True)
    assert len(sys.controls) == 3
    for h in sys.controls:
        assert np.abs(h @ sys.initial - sys.initial @ h).max() <= 1e-10


def test_davies_rate_zero_frequency_limit():
    bath = BathSpec(beta=2.0)
    limit = davies_rate(0.0, bath)
    assert np.isclose(limit, 2 * math.pi * bath.eta_g2 / bath.beta, rtol=1e-12)
    # the formula approaches the limit from both sides
    for w in (1e-8, -1e-8):
        assert np.isclose(davies_rate(w, bath), limit, rtol=1e-6)


def test_davies_rate_kms_detailed_balance():
    bath = BathSpec(beta=1.0)
    for w in (1.0, 0.5, 4.0, 9.0):
        ratio = davies_rate(-w, bath) / davies_rate(w, bath)
        assert abs(ratio - math.exp(-bath.beta * w)) <= 1e-12


def test_davies_rate_high_temperature_scaling():
    w = 2.0
    r1 = davies_rate(w, BathSpec(beta=1e-4))
    r2 = davies_rate(w, BathSpec(beta=2e-4))
    assert np.isclose(r1 / r2, 2.0, rtol=1e-3)
    expected = 2 * math.pi * math.exp(-abs(w) / (8 * math.pi)) * 1e-3 / 1e-4
    assert np.isclose(r1, expected, rtol=1e-3)


def test_ising_hamiltonian_two_spin_spectrum():
    spec = IsingSpec.extensive_antiferromagnet(2)
    evals = np.linalg.eigvalsh(ising_hamiltonian(spec))
    assert np.allclose(evals, [0, 0, 0, 4], atol=1e-12)
    spec_no_diag = IsingSpec.extensive_antiferromagnet(2, include_diagonal=False)
    evals2 = np.linalg.eigvalsh(ising_hamiltonian(spec_no_diag))
    assert np.allclose(evals2, [-1, -1, -1, 3], atol=1e-12)


def test_bohr_decomposition_two_spin():
    spec = IsingSpec.extensive_antiferromagnet(2)
    h0 = ising_hamiltonian(spec)
    coupling = [site_operator(SIGMA_X, k, 2) for k in range(2)]
    decomp = bohr_decomposition(h0, coupling)
    assert set(decomp.frequencies) <= {-4.0, 0.0, 4.0}
    # completeness: summing over frequencies reproduces each coupling operator
    for k in range(2):
        total = sum(decomp.operator(w, k) for w in decomp.frequencies
                    if (w, k) in decomp.jump_ops)
        assert np.abs(total - coupling[k]).max() <= 1e-10
    # opposite frequencies are adjoints
    for (w, k), op in decomp.jump_ops.items():
        if (-w, k) in decomp.jump_ops:
            assert np.abs(decomp.operator(-w, k) - op.conj().T).max() <= 1e-10


def test_gibbs_state_limits():
    spec = IsingSpec.extensive_antiferromagnet(2)
    h0 = ising_hamiltonian(spec)
    assert np.allclose(gibbs_state(h0, 0.0), np.eye(4) / 4, atol=1e-14)
    cold = gibbs_state(h0, 100.0)
    # three-fold degenerate ground space: each ground diagonal ~ 1/3
    diag = np.sort(np.real(np.diag(cold)))
    assert np.allclose(diag, [0, 1 / 3, 1 / 3, 1 / 3], atol=1e-10)
    comm = h0 @ cold - cold @ h0
    assert np.abs(comm).max() <= 1e-12


@pytest.mark.parametrize("n", [2, 3])
@pytest.mark.parametrize("beta", [0.01, 0.1, 1.0, 10.0])
def test_gibbs_is_fixed_point_of_davies_generator(n, beta):
    spec = IsingSpec.extensive_antiferromagnet(n)
    sys = make_ising_davies(spec, BathSpec(beta=beta))
    residual = np.linalg.norm(apply(sys.generator, sys.target))
    assert residual <= 1e-8


def test_ising_davies_control_sign_and_initial():
    sys = make_ising_davies(IsingSpec.extensive_antiferromagnet(2), BathSpec(beta=1.0))
    assert np.array_equal(sys.controls[0], -transverse_field(2))
    minus2 = np.kron(KET_MINUS, KET_MINUS)
    assert np.abs(sys.initial - np.outer(minus2, minus2.conj())).max() <= 1e-12


def test_zero_frequency_davies_term():
    # a free spin couples through sigma_x entirely at Bohr frequency zero,
    # exercising the finite omega -> 0 rate limit
    spec = IsingSpec(n_spins=1, fields=(0.0,), couplings=np.zeros((1, 1)))
    bath = BathSpec(beta=2.0)
    decomp = bohr_decomposition(ising_hamiltonian(spec), [SIGMA_X])
    assert decomp.frequencies == (0.0,)
    assert np.allclose(decomp.operator(0.0, 0), SIGMA_X, atol=1e-12)
    sys_ = make_ising_davies(spec, bath)
    rates = [t.rate for t in sys_.generator.dissipator.terms]
    assert np.isclose(rates[0], 2 * math.pi * bath.eta_g2 / bath.beta, rtol=1e-12)
    assert np.allclose(sys_.target, np.eye(2) / 2, atol=1e-12)
    assert np.linalg.norm(apply(sys_.generator, sys_.target)) <= 1e-12


def test_frustrated_ground_space_at_four_spins():
    spec = IsingSpec.extensive_antiferromagnet(4)
    evals = np.linalg.eigvalsh(ising_hamiltonian(spec))
    ground = evals[np.abs(evals - evals.min()) <= 1e-9]
    assert len(ground) > 1


def test_ising_spec_validation():
    with pytest.raises(ValueError):
        IsingSpec(n_spins=5, fields=(1.0,) * 5, couplings=np.eye(5))
    with pytest.raises(ValueError):
        IsingSpec(n_spins=2, fields=(1.0, 1.0), couplings=np.array([[0.0, 1.0], [0.5, 0.0]]))
    with pytest.raises(ValueError):
        BathSpec(beta=-1.0)
