"""The three concrete model systems and the thermal-bath machinery.

Single qubit under amplitude damping, dissipative Bell-state preparation,
and an extensive antiferromagnetic Ising chain weakly coupled to independent
Ohmic baths (a Davies-type generator whose jump operators live in the energy
eigenbasis and whose rates satisfy Kubo-Martin-Schwinger detailed balance, so
that the Gibbs state is stationary).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import reduce

import numpy as np

from .lindblad import (
    ControlSystem,
    DissipationConvention,
    Dissipator,
    JumpTerm,
    LindbladGenerator,
)
from .linalg import hermitian_eig, kron, require_hermitian

SIGMA_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
SIGMA_Y = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex)
SIGMA_Z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)
IDENTITY_2 = np.eye(2, dtype=complex)

KET_0 = np.array([1.0, 0.0], dtype=complex)
KET_1 = np.array([0.0, 1.0], dtype=complex)
KET_MINUS = (KET_0 - KET_1) / math.sqrt(2.0)

LOWERING = np.outer(KET_0, KET_1.conj())  # |0><1|


def projector(psi) -> np.ndarray:
    v = np.asarray(psi, dtype=complex).reshape(-1)
    return np.outer(v, v.conj())


def site_operator(op: np.ndarray, site: int, n_sites: int) -> np.ndarray:
    """Embed a single-qubit operator at one site of an n-qubit register."""
    factors = [IDENTITY_2] * n_sites
    factors[site] = op
    return reduce(kron, factors)


def bell_state(k: int) -> np.ndarray:
    """The four Bell states, indexed 0..3 (3 is the singlet)."""
    pairs = {
        0: (np.kron(KET_0, KET_0) + np.kron(KET_1, KET_1)),
        1: (np.kron(KET_0, KET_1) + np.kron(KET_1, KET_0)),
        2: (np.kron(KET_0, KET_0) - np.kron(KET_1, KET_1)),
        3: (np.kron(KET_0, KET_1) - np.kron(KET_1, KET_0)),
    }
    return pairs[k] / math.sqrt(2.0)


def make_single_qubit(omega: float, gamma: float) -> ControlSystem:
    """Qubit with drift -omega*sigma_z, control sigma_x, amplitude damping at rate gamma.

    Starts in the sigma_x ground state |-><-|; the target |0><0| is the unique
    fixed point of the damping.
    """
    if omega < 0 or gamma < 0:
        raise ValueError("omega and gamma must be nonnegative")
    diss = Dissipator(terms=(JumpTerm(LOWERING, gamma),),
                      convention=DissipationConvention.FACTOR_TWO)
    gen = LindbladGenerator(drift=-omega * SIGMA_Z, dissipator=diss)
    return ControlSystem(generator=gen, controls=(SIGMA_X,),
                         initial=projector(KET_MINUS), target=projector(KET_0))


def make_bell(omega: float, gamma: float, extended_controls: bool = False) -> ControlSystem:
    """Two qubits with exchange drift and engineered dissipation into the singlet.

    Drift omega*(XX + ZZ) is diagonal in the Bell basis; the jump operators
    |b3><b_k| (k = 0, 1, 2) transfer population from the three bright Bell
    states into the singlet b3, which is the unique fixed point.  The default
    control is the uniform transverse field X1 + X2; ``extended_controls``
    exposes {X1, X2, X1 X2} as three independent controls instead.
    """
    if omega < 0 or gamma < 0:
        raise ValueError("omega and gamma must be nonnegative")
    xx = kron(SIGMA_X, SIGMA_X)
    zz = kron(SIGMA_Z, SIGMA_Z)
    drift = omega * (xx + zz)
    target_ket = bell_state(3)
    jumps = tuple(JumpTerm(np.outer(target_ket, bell_state(k).conj()), gamma)
                  for k in range(3))
    diss = Dissipator(terms=jumps, convention=DissipationConvention.FACTOR_TWO)
    gen = LindbladGenerator(drift=drift, dissipator=diss)
    x1 = kron(SIGMA_X, IDENTITY_2)
    x2 = kron(IDENTITY_2, SIGMA_X)
    controls = (x1, x2, xx) if extended_controls else (x1 + x2,)
    minus2 = np.kron(KET_MINUS, KET_MINUS)
    return ControlSystem(generator=gen, controls=controls,
                         initial=projector(minus2), target=projector(target_ket))


@dataclass(frozen=True)
class IsingSpec:
    """Longitudinal-field Ising couplings; the double sum over i,j runs literally
    over all pairs including i=j (a constant shift) unless ``include_diagonal``
    is cleared."""

    n_spins: int
    fields: tuple[float, ...]
    couplings: np.ndarray
    include_diagonal: bool = True

    def __post_init__(self):
        if not 1 <= self.n_spins <= 4:
            raise ValueError("n_spins must be between 1 and 4")
        if len(self.fields) != self.n_spins:
            raise ValueError("need one field per spin")
        j = np.asarray(self.couplings, dtype=float)
        if j.shape != (self.n_spins, self.n_spins):
            raise ValueError(f"couplings must be {self.n_spins}x{self.n_spins}")
        if float(np.abs(j - j.T).max()) > 1e-12:
            raise ValueError("couplings must be symmetric")
        object.__setattr__(self, "couplings", j)

    @classmethod
    def extensive_antiferromagnet(cls, n_spins: int, include_diagonal: bool = True) -> "IsingSpec":
        """Uniform fields h_i = 1 and all-to-all couplings J_ij = 1/N."""
        j = np.full((n_spins, n_spins), 1.0 / n_spins)
        return cls(n_spins=n_spins, fields=(1.0,) * n_spins, couplings=j,
                   include_diagonal=include_diagonal)


@dataclass(frozen=True)
class BathSpec:
    """Ohmic bath at inverse temperature beta with exponential cutoff omega_c
    and system-bath coupling strength eta_g2."""

    beta: float
    omega_c: float = 8.0 * math.pi
    eta_g2: float = 1e-3

    def __post_init__(self):
        if self.beta <= 0 or self.omega_c <= 0 or self.eta_g2 <= 0:
            raise ValueError("beta, omega_c and eta_g2 must be positive")


def ising_hamiltonian(spec: IsingSpec) -> np.ndarray:
    """Drift -sum_i h_i Z_i + sum_{i,j} J_ij Z_i Z_j (literal double sum)."""
    n = spec.n_spins
    d = 2**n
    h = np.zeros((d, d), dtype=complex)
    z_ops = [site_operator(SIGMA_Z, i, n) for i in range(n)]
    for i in range(n):
        h -= spec.fields[i] * z_ops[i]
    for i in range(n):
        for j in range(n):
            if i == j and not spec.include_diagonal:
                continue
            h += spec.couplings[i, j] * (z_ops[i] @ z_ops[j])
    return h


def transverse_field(n_spins: int) -> np.ndarray:
    return sum(site_operator(SIGMA_X, i, n_spins) for i in range(n_spins))


def davies_rate(omega: float, bath: BathSpec) -> float:
    """Ohmic decay rate 2*pi*w*exp(-|w|/w_c)/(1 - exp(-beta*w)) * eta_g2.

    The w = 0 value is the finite limit 2*pi*eta_g2/beta.  Rates at opposite
    frequencies satisfy detailed balance, rate(-w) = rate(w)*exp(-beta*w).
    """
    if not math.isfinite(omega):
        raise ValueError("omega must be finite")
    if omega == 0.0:
        return 2.0 * math.pi * bath.eta_g2 / bath.beta
    x = bath.beta * omega
    try:
        denom = 1.0 - math.exp(-x)
    except OverflowError:
        denom = -math.inf
    return 2.0 * math.pi * omega * math.exp(-abs(omega) / bath.omega_c) / denom * bath.eta_g2


def _cluster(values: np.ndarray, tol: float) -> list[np.ndarray]:
    """Group sorted values into clusters of indices closer than tol."""
    order = np.argsort(values)
    groups: list[list[int]] = [[order[0]]]
    for idx in order[1:]:
        if values[idx] - values[groups[-1][0]] <= tol:
            groups[-1].append(idx)
        else:
            groups.append([idx])
    return [np.array(g) for g in groups]


@dataclass(frozen=True)
class BohrDecomposition:
    """Jump operators of a coupling operator resolved by energy differences.

    For each distinct Bohr frequency w = e_b - e_a of the drift spectrum and
    each site k, ``operator(w, k)`` projects the site coupling onto transitions
    of that frequency.  Summed over w they reproduce the coupling operator,
    and operators at opposite frequencies are mutual adjoints.
    """

    frequencies: tuple[float, ...]
    jump_ops: dict = field(repr=False)

    def operator(self, omega: float, site: int) -> np.ndarray:
        return self.jump_ops[(omega, site)]

    def sites(self) -> tuple[int, ...]:
        return tuple(sorted({k for (_, k) in self.jump_ops}))


def bohr_decomposition(h0, coupling_ops: list[np.ndarray]) -> BohrDecomposition:
    """Resolve each coupling operator into jump operators per Bohr frequency."""
    spectrum = hermitian_eig(h0)
    evals, evecs = spectrum.eigenvalues, spectrum.eigenvectors
    tol = 1e-9 * max(1.0, spectrum.spread)
    groups = _cluster(evals, tol)
    energies = [float(np.mean(evals[g])) for g in groups]
    projectors = [evecs[:, g] @ evecs[:, g].conj().T for g in groups]
    # cluster the pairwise energy differences the same way
    diffs = np.array([eb - ea for ea in energies for eb in energies])
    freq_groups = _cluster(diffs, tol)
    freq_of_pair = {}
    frequencies = []
    for g in freq_groups:
        w = float(np.mean(diffs[g]))
        if abs(w) <= tol:
            w = 0.0
        frequencies.append(w)
        for flat in g:
            freq_of_pair[(flat // len(energies), flat % len(energies))] = w
    jump_ops = {}
    for k, op in enumerate(coupling_ops):
        for a in range(len(energies)):
            for b in range(len(energies)):
                w = freq_of_pair[(a, b)]
                block = projectors[a] @ op @ projectors[b]
                key = (w, k)
                jump_ops[key] = jump_ops.get(key, 0.0) + block
    # drop all-zero operators (transitions the coupling does not connect)
    jump_ops = {key: m for key, m in jump_ops.items() if float(np.abs(m).max()) > 1e-14}
    present = tuple(sorted({w for (w, _) in jump_ops}))
    return BohrDecomposition(frequencies=present, jump_ops=jump_ops)


def gibbs_state(h0, beta: float) -> np.ndarray:
    """Thermal state exp(-beta*H0)/Z via eigendecomposition.

    The smallest eigenvalue is shifted out before exponentiation so every
    Boltzmann weight is <= 1.
    """
    if beta < 0:
        raise ValueError("beta must be >= 0")
    spectrum = hermitian_eig(h0)
    weights = np.exp(-beta * (spectrum.eigenvalues - spectrum.eigenvalues[0]))
    weights /= weights.sum()
    v = spectrum.eigenvectors
    return (v * weights) @ v.conj().T


def make_ising_davies(spec: IsingSpec, bath: BathSpec) -> ControlSystem:
    """Ising drift with per-site Davies dissipators; target is the Gibbs state.

    The control Hamiltonian is the negated uniform transverse field (the
    schedule amplitude enters with a minus sign in the printed model), and the
    initial state is the transverse-field ground state |-><-|^N.
    """
    n = spec.n_spins
    h0 = ising_hamiltonian(spec)
    coupling = [site_operator(SIGMA_X, k, n) for k in range(n)]
    decomp = bohr_decomposition(h0, coupling)
    terms = tuple(JumpTerm(op, davies_rate(w, bath))
                  for (w, _), op in sorted(decomp.jump_ops.items(),
                                           key=lambda kv: (kv[0][1], kv[0][0])))
    diss = Dissipator(terms=terms, convention=DissipationConvention.HALF)
    gen = LindbladGenerator(drift=require_hermitian(h0), dissipator=diss)
    minus_all = reduce(np.kron, [KET_MINUS] * n)
    return ControlSystem(generator=gen, controls=(-transverse_field(n),),
                         initial=projector(minus_all),
                         target=gibbs_state(h0, bath.beta))
