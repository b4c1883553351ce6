"""The runtime invariant suite behind the ``check`` command.

Each check computes a residual against a fixed tolerance; the suite passes
only if every residual is within tolerance.  The suite covers the linear
algebra contracts, superoperator trace preservation, the norm-equivalence
property on random generators, fixed points of all three models, detailed
balance of the thermal rates, convention independence, and the reduction of
the general bound family to the schedule-independent bound.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bounds import NormKind, ReferenceGenerator, bound_general, bound_schedule_independent
from .control import Schedule
from .lindblad import (
    DissipationConvention,
    Dissipator,
    JumpTerm,
    LindbladGenerator,
    apply,
    build_superoperator,
    propagate,
)
from .linalg import hermitian_eig, kron, largest_singular_value, matrix_exp, vec
from .models import (
    BathSpec,
    IsingSpec,
    LOWERING,
    SIGMA_Z,
    davies_rate,
    ising_hamiltonian,
    make_bell,
    make_ising_davies,
    make_single_qubit,
)
from .norms import induced_11_estimate, induced_22


@dataclass(frozen=True)
class CheckResult:
    name: str
    residual: float
    tolerance: float
    count: int = 1

    @property
    def passed(self) -> bool:
        return self.residual <= self.tolerance


def _random_matrix(rng, n):
    return rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))


def _random_generator(rng, d, unitary=False):
    m = _random_matrix(rng, d)
    drift = 0.5 * (m + m.conj().T)
    if unitary:
        return LindbladGenerator(drift=drift)
    terms = tuple(JumpTerm(_random_matrix(rng, d), rng.uniform(0.1, 1.0)) for _ in range(2))
    return LindbladGenerator(drift=drift, dissipator=Dissipator(terms))


def check_vec_kron_identity(rng) -> CheckResult:
    worst = 0.0
    for _ in range(100):
        n = int(rng.integers(2, 5))
        a, b, c = (_random_matrix(rng, n) for _ in range(3))
        lhs = vec(a @ b @ c)
        rhs = kron(c.T, a) @ vec(b)
        worst = max(worst, float(np.linalg.norm(lhs - rhs) / np.linalg.norm(lhs)))
    return CheckResult("vec_kron_identity", worst, 1e-12, count=100)


def check_spectrum_contracts(rng) -> CheckResult:
    worst = 0.0
    for n in (2, 4, 8, 16):
        m = _random_matrix(rng, n)
        h = m + m.conj().T
        spec = hermitian_eig(h)
        scale = float(np.linalg.norm(h, 2))
        worst = max(worst, float(np.linalg.norm(spec.reconstruct() - h, 2)) / scale)
        v = spec.eigenvectors
        worst = max(worst, float(np.abs(v.conj().T @ v - np.eye(n)).max()))
    return CheckResult("spectrum_reconstruction_unitarity", worst, 1e-10, count=4)


def check_matrix_exp_inverse(rng) -> CheckResult:
    worst = 0.0
    for _ in range(10):
        m = _random_matrix(rng, 4)
        m *= rng.uniform(0.1, 10.0) / np.linalg.norm(m, 2)
        worst = max(worst, float(np.abs(matrix_exp(m) @ matrix_exp(-m) - np.eye(4)).max()))
    return CheckResult("matrix_exp_inverse_pair", worst, 1e-9, count=10)


def check_singular_value_unitary_invariance(rng) -> CheckResult:
    worst = 0.0
    for _ in range(20):
        n = int(rng.integers(2, 6))
        m = _random_matrix(rng, n)
        u = np.linalg.qr(_random_matrix(rng, n))[0]
        v = np.linalg.qr(_random_matrix(rng, n))[0]
        s0 = largest_singular_value(m)
        worst = max(worst, abs(largest_singular_value(u @ m @ v) - s0) / max(1.0, s0))
    return CheckResult("singular_value_unitary_invariance", worst, 1e-10, count=20)


def check_norm_equivalence(rng, n_generators: int = 200) -> CheckResult:
    """Estimated (1->1) norm never exceeds sqrt(d) * (2->2); unitary generators
    reach the spectral spread exactly."""
    worst = 0.0
    for i in range(n_generators):
        d = int(rng.integers(2, 5))
        unitary = i % 4 == 0
        gen = _random_generator(rng, d, unitary=unitary)
        est = induced_11_estimate(gen, restarts=8, seed=int(rng.integers(0, 2**31)))
        upper = np.sqrt(d) * induced_22(build_superoperator(gen)).value
        worst = max(worst, est.value - upper - 1e-9)
        if unitary:
            spread = hermitian_eig(gen.drift).spread
            worst = max(worst, abs(induced_22(build_superoperator(gen)).value - spread)
                        - 1e-10 * max(1.0, spread))
    return CheckResult("norm_equivalence_bound", max(worst, 0.0), 0.0, count=n_generators)


def check_trace_preservation(rng) -> CheckResult:
    worst = 0.0
    models = [make_single_qubit(1.0, 0.3).generator, make_bell(1.0, 0.7).generator]
    models += [_random_generator(rng, d) for d in (2, 3, 4)]
    for gen in models:
        m = build_superoperator(gen)
        vid = vec(np.eye(gen.dim))
        worst = max(worst, float(np.abs(vid.conj() @ m).max()) / max(1.0, float(np.abs(m).max())))
    return CheckResult("superoperator_trace_preservation", worst, 1e-10, count=len(models))


def check_fixed_points(corrupt_convention: bool = False) -> CheckResult:
    worst = 0.0
    qubit = make_single_qubit(1.0, 0.5)
    if corrupt_convention:
        # test hook: silently reinterpret the factor-two dissipator as half form
        broken = Dissipator(qubit.generator.dissipator.terms, DissipationConvention.HALF)
        gen = LindbladGenerator(qubit.generator.drift, broken)
        ref = build_superoperator(make_single_qubit(1.0, 0.5).generator)
        worst = max(worst, float(np.abs(build_superoperator(gen) - ref).max()))
    worst = max(worst, float(np.linalg.norm(apply(qubit.generator, qubit.target))))
    bell = make_bell(1.0, 1.0)
    worst = max(worst, float(np.linalg.norm(apply(bell.generator, bell.target))))
    return CheckResult("model_fixed_points", worst, 1e-10, count=2)


def check_gibbs_fixed_points() -> CheckResult:
    worst = 0.0
    count = 0
    for n in (2, 3):
        for beta in (0.01, 0.1, 1.0, 10.0):
            sys = make_ising_davies(IsingSpec.extensive_antiferromagnet(n), BathSpec(beta=beta))
            worst = max(worst, float(np.linalg.norm(apply(sys.generator, sys.target))))
            count += 1
    return CheckResult("gibbs_fixed_points", worst, 1e-8, count=count)


def check_kms_ratios() -> CheckResult:
    worst = 0.0
    count = 0
    for beta in (0.1, 1.0, 10.0):
        bath = BathSpec(beta=beta)
        for w in (0.5, 1.0, 3.0, 4.0, 9.0):
            ratio = davies_rate(-w, bath) / davies_rate(w, bath)
            worst = max(worst, abs(ratio - np.exp(-beta * w)))
            count += 1
    return CheckResult("kms_detailed_balance", worst, 1e-12, count=count)


def check_convention_independence(corrupt_convention: bool = False) -> CheckResult:
    gamma = 0.42
    ftwo = Dissipator((JumpTerm(LOWERING, gamma),), DissipationConvention.FACTOR_TWO)
    half_rate = gamma if corrupt_convention else 2 * gamma
    half = Dissipator((JumpTerm(LOWERING, half_rate),), DissipationConvention.HALF)
    m1 = build_superoperator(LindbladGenerator(-SIGMA_Z, ftwo))
    m2 = build_superoperator(LindbladGenerator(-SIGMA_Z, half))
    return CheckResult("convention_independence", float(np.abs(m1 - m2).max()), 0.0)


def check_propagation_composition(rng) -> CheckResult:
    sys = make_single_qubit(1.0, 0.7)
    amps = rng.uniform(-2, 2, size=(8, 1))
    full = propagate(sys, Schedule(1.6, amps), samples=1)[-1]
    first = propagate(sys, Schedule(0.8, amps[:4]), samples=1)[-1]
    second = propagate(sys, Schedule(0.8, amps[4:]), samples=1, initial=first)[-1]
    return CheckResult("propagation_composition", float(np.abs(full - second).max()), 1e-9)


def check_general_bound_reduction(rng) -> CheckResult:
    sys = make_single_qubit(1.0, 0.7)
    sched = Schedule(2.0, rng.uniform(-3, 3, size=(20, 1)))
    ref = ReferenceGenerator(sys.controls[0], sched.amplitudes[:, 0])
    worst = 0.0
    for kind in NormKind:
        direct = bound_schedule_independent(sys, kind)
        via = bound_general(sys, ref, sched, kind)
        worst = max(worst, abs(via.bound - direct.bound))
    return CheckResult("general_bound_reduction", worst, 0.0, count=2)


def check_frustration() -> CheckResult:
    evals = np.linalg.eigvalsh(ising_hamiltonian(IsingSpec.extensive_antiferromagnet(4)))
    multiplicity = int(np.sum(np.abs(evals - evals.min()) <= 1e-9))
    return CheckResult("frustrated_ground_multiplicity", 0.0 if multiplicity > 1 else 1.0, 0.0)


def run_all(seed: int = 12345, corrupt_convention: bool = False) -> list[CheckResult]:
    rng = np.random.default_rng(seed)
    return [
        check_vec_kron_identity(rng),
        check_spectrum_contracts(rng),
        check_matrix_exp_inverse(rng),
        check_singular_value_unitary_invariance(rng),
        check_norm_equivalence(rng),
        check_trace_preservation(rng),
        check_fixed_points(corrupt_convention),
        check_gibbs_fixed_points(),
        check_kms_ratios(),
        check_convention_independence(corrupt_convention),
        check_propagation_composition(rng),
        check_general_bound_reduction(rng),
        check_frustration(),
    ]
