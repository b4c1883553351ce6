"""Lindblad generators, their superoperator matrices, and piecewise-constant propagation.

A generator acts on density matrices as

    L(rho) = -i [H0, rho] + D(rho),

where the dissipator ``D`` is a sum of jump terms.  Two printed conventions
for a jump operator L with rate g are supported:

    FACTOR_TWO:  g (2 L rho L+ - L+L rho - rho L+L)
    HALF:        g (L rho L+ - {L+L, rho} / 2)

Internally everything is normalized to HALF form, doubling FACTOR_TWO rates.
All superoperator matrices act on column-stacked density matrices (see
:mod:`qslab.linalg`).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .linalg import (
    DimensionError,
    as_complex_matrix,
    kron,
    matrix_exp,
    require_hermitian,
    unvec,
    vec,
)


class DissipationConvention(enum.Enum):
    FACTOR_TWO = "factor_two"
    HALF = "half"


def validate_density_matrix(rho, tol: float = 1e-10) -> np.ndarray:
    """Check Hermiticity, unit trace and positivity (eigenvalues >= -1e-8)."""
    a = as_complex_matrix(rho)
    if a.shape[0] != a.shape[1]:
        raise DimensionError(f"density matrix must be square, got {a.shape}")
    scale = max(1.0, float(np.abs(a).max()))
    if float(np.abs(a - a.conj().T).max()) > tol * scale:
        raise ValueError("density matrix is not Hermitian")
    if abs(complex(np.trace(a)) - 1.0) > tol:
        raise ValueError(f"density matrix trace {complex(np.trace(a)):.12g} != 1")
    evals = np.linalg.eigvalsh(0.5 * (a + a.conj().T))
    if float(evals.min()) < -1e-8:
        raise ValueError(f"density matrix has negative eigenvalue {evals.min():.3e}")
    return a


@dataclass(frozen=True)
class JumpTerm:
    """A jump operator together with its nonnegative rate."""

    operator: np.ndarray
    rate: float

    def __post_init__(self):
        object.__setattr__(self, "operator", as_complex_matrix(self.operator))
        if self.operator.shape[0] != self.operator.shape[1]:
            raise DimensionError("jump operator must be square")
        if self.rate < 0:
            raise ValueError(f"negative rate {self.rate}")


@dataclass(frozen=True)
class Dissipator:
    """A list of jump terms under one rate convention."""

    terms: tuple[JumpTerm, ...] = ()
    convention: DissipationConvention = DissipationConvention.HALF

    def half_normalized(self) -> list[tuple[np.ndarray, float]]:
        """Jump operators with rates converted to the HALF convention."""
        factor = 2.0 if self.convention is DissipationConvention.FACTOR_TWO else 1.0
        return [(t.operator, factor * t.rate) for t in self.terms]


@dataclass(frozen=True)
class LindbladGenerator:
    """Hermitian drift Hamiltonian plus dissipator."""

    drift: np.ndarray
    dissipator: Dissipator = field(default_factory=Dissipator)

    def __post_init__(self):
        object.__setattr__(self, "drift", require_hermitian(self.drift))
        d = self.drift.shape[0]
        for op, _ in self.dissipator.half_normalized():
            if op.shape != (d, d):
                raise DimensionError(f"jump operator shape {op.shape} != drift shape {(d, d)}")

    @property
    def dim(self) -> int:
        return self.drift.shape[0]


@dataclass(frozen=True)
class ControlSystem:
    """Generator, control Hamiltonians, initial and target density matrices.

    The initial state must commute with every control Hamiltonian; the
    bound derivations require the initial state to be stationary under the
    control flow alone, and commutation is the testable statement.
    """

    generator: LindbladGenerator
    controls: tuple[np.ndarray, ...]
    initial: np.ndarray
    target: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "controls", tuple(require_hermitian(h) for h in self.controls))
        object.__setattr__(self, "initial", validate_density_matrix(self.initial))
        object.__setattr__(self, "target", validate_density_matrix(self.target))
        d = self.generator.dim
        for m in (*self.controls, self.initial, self.target):
            if m.shape != (d, d):
                raise DimensionError("all operators must share the generator dimension")
        for k, h in enumerate(self.controls):
            comm = h @ self.initial - self.initial @ h
            if float(np.abs(comm).max()) > 1e-10 * max(1.0, float(np.abs(h).max())):
                raise ValueError(f"initial state does not commute with control {k}")

    @property
    def dim(self) -> int:
        return self.generator.dim


def hamiltonian_superoperator(h) -> np.ndarray:
    """Matrix of rho -> -i [H, rho] on column-stacked density matrices."""
    a = as_complex_matrix(h)
    d = a.shape[0]
    ident = np.eye(d, dtype=complex)
    return -1j * (kron(ident, a) - kron(a.T, ident))


def dissipator_superoperator(diss: Dissipator, dim: int) -> np.ndarray:
    """Matrix of the dissipator on column-stacked density matrices."""
    d = dim
    ident = np.eye(d, dtype=complex)
    m = np.zeros((d * d, d * d), dtype=complex)
    for op, rate in diss.half_normalized():
        ldl = op.conj().T @ op
        m += rate * (kron(op.conj(), op)
                     - 0.5 * kron(ident, ldl)
                     - 0.5 * kron(ldl.T, ident))
    return m


def build_superoperator(g: LindbladGenerator) -> np.ndarray:
    """Full generator matrix: Hamiltonian part plus dissipator."""
    return hamiltonian_superoperator(g.drift) + dissipator_superoperator(g.dissipator, g.dim)


def apply(g: LindbladGenerator, rho) -> np.ndarray:
    """Time derivative of rho under the generator, computed directly."""
    a = as_complex_matrix(rho)
    d = g.dim
    if a.shape != (d, d):
        raise DimensionError(f"state shape {a.shape} != generator dimension {(d, d)}")
    h = g.drift
    out = -1j * (h @ a - a @ h)
    for op, rate in g.dissipator.half_normalized():
        ldl = op.conj().T @ op
        out += rate * (op @ a @ op.conj().T - 0.5 * (ldl @ a + a @ ldl))
    return out


def interval_generators(sys: ControlSystem, schedule) -> list[np.ndarray]:
    """Superoperator matrix for each schedule interval (drift + controls + dissipator)."""
    amps = np.asarray(schedule.amplitudes, dtype=float)
    if amps.ndim != 2 or amps.shape[1] != len(sys.controls):
        raise DimensionError(
            f"schedule has {amps.shape} amplitudes for {len(sys.controls)} controls")
    m_free = build_superoperator(sys.generator)
    m_controls = [hamiltonian_superoperator(h) for h in sys.controls]
    out = []
    for row in amps:
        m = m_free.copy()
        for f, mc in zip(row, m_controls):
            if f != 0.0:
                m += f * mc
        out.append(m)
    return out


def propagate(sys: ControlSystem, schedule, samples: int = 1, initial=None) -> list[np.ndarray]:
    """Propagate the initial state under a piecewise-constant schedule.

    Each interval is advanced by the exact matrix exponential of its constant
    generator.  Returns density matrices at ``samples`` equally spaced times
    spanning [0, T] (endpoint included); ``samples=1`` returns only the final
    state.  ``initial`` overrides the system's initial state (used e.g. for
    propagation from an intermediate state).
    """
    if samples < 1:
        raise ValueError("samples must be >= 1")
    d = sys.dim
    rho0 = sys.initial if initial is None else as_complex_matrix(initial)
    t_total = float(schedule.total_time)
    if t_total < 0:
        raise ValueError("total_time must be >= 0")
    if t_total == 0.0:
        return [rho0.copy() for _ in range(samples)]
    times = np.linspace(0.0, t_total, samples) if samples > 1 else np.array([t_total])
    mats = interval_generators(sys, schedule)
    n = len(mats)
    dt = t_total / n
    out: list[np.ndarray] = []
    v = vec(rho0)
    idx = 0
    t_edge = 0.0
    for j, m in enumerate(mats):
        while idx < len(times) and times[idx] <= t_edge + dt + 1e-12 * t_total:
            offset = min(max(times[idx] - t_edge, 0.0), dt)
            if j == n - 1 and idx == len(times) - 1:
                offset = dt  # land exactly on T
            out.append(unvec(matrix_exp(offset * m) @ v, d))
            idx += 1
        v = matrix_exp(dt * m) @ v
        t_edge += dt
    while idx < len(times):  # guard against float edge cases at t = T
        out.append(unvec(v, d))
        idx += 1
    return out


def end_to_end_propagator(sys: ControlSystem, schedule) -> np.ndarray:
    """The full channel matrix: ordered product of interval exponentials."""
    mats = interval_generators(sys, schedule)
    dt = float(schedule.total_time) / len(mats)
    d2 = sys.dim**2
    prop = np.eye(d2, dtype=complex)
    for m in mats:
        prop = matrix_exp(dt * m) @ prop
    return prop


@dataclass(frozen=True)
class CptpReport:
    """Complete positivity and trace preservation diagnostics for a channel."""

    min_choi_eigenvalue: float
    trace_residual: float

    @property
    def is_cptp(self) -> bool:
        return self.min_choi_eigenvalue >= -1e-8 and self.trace_residual <= 1e-8


def choi_matrix(prop: np.ndarray, d: int) -> np.ndarray:
    """Choi matrix C[(a,i),(b,j)] = E(|i><j|)_{ab} of a channel matrix."""
    p4 = prop.reshape(d, d, d, d)
    return np.ascontiguousarray(p4.transpose(1, 3, 0, 2)).reshape(d * d, d * d)


def is_cptp(sys: ControlSystem, schedule) -> CptpReport:
    """Build the end-to-end propagator and report Choi positivity and trace residual."""
    d = sys.dim
    prop = end_to_end_propagator(sys, schedule)
    choi = choi_matrix(prop, d)
    choi = 0.5 * (choi + choi.conj().T)
    min_eig = float(np.linalg.eigvalsh(choi)[0])
    vid = vec(np.eye(d))
    residual = float(np.linalg.norm(prop.conj().T @ vid - vid))
    return CptpReport(min_choi_eigenvalue=min_eig, trace_residual=residual)
