"""Speed-limit lower bounds on state-preparation times.

The central object is the schedule-independent bound

    T >= ||rho_T - rho_0||_1 / ||L||,

where L is the free generator (drift plus dissipator, controls excluded) and
the denominator norm is either the rank-one-probe estimate of the induced
(1->1) norm or its computable sqrt(d) * (2->2) upper bound.  A more general
family subtracts an arbitrary reference unitary flow that fixes the initial
state; choosing the reference equal to the control term reproduces the
schedule-independent bound, choosing zero reference gives a trajectory-style
bound with the max (not the average) of the per-interval generator norms.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .lindblad import ControlSystem, LindbladGenerator, build_superoperator
from .linalg import hermitian_eig, require_hermitian
from .norms import induced_11_estimate, induced_22, trace_norm


class UnreachableTargetError(RuntimeError):
    """The free dynamics cannot move the state: the bound denominator vanishes."""


class NormKind(enum.Enum):
    INDUCED_11_ESTIMATE = "induced_11_estimate"
    SQRT_D_INDUCED_22 = "sqrt_d_induced_22"


@dataclass(frozen=True)
class BoundReport:
    """A lower bound on the preparation time with its ingredients."""

    numerator: float
    denominator: float
    norm_kind: NormKind
    notes: str = ""
    bound: float = field(init=False)

    def __post_init__(self):
        if not self.denominator > 0:
            raise UnreachableTargetError(
                "denominator vanishes: target unreachable under drift and dissipation alone")
        object.__setattr__(self, "bound", self.numerator / self.denominator)


@dataclass(frozen=True)
class ReferenceGenerator:
    """A reference unitary flow -i*a(t)*[H, .] used by the general bound family.

    ``amplitudes`` holds one reference amplitude per schedule interval; None
    means the zero reference.
    """

    hamiltonian: np.ndarray
    amplitudes: np.ndarray | None = None

    def __post_init__(self):
        object.__setattr__(self, "hamiltonian", require_hermitian(self.hamiltonian))
        if self.amplitudes is not None:
            object.__setattr__(self, "amplitudes", np.asarray(self.amplitudes, dtype=float))


def _generator_norm(h_eff: np.ndarray, sys: ControlSystem, norm_kind: NormKind,
                    restarts: int, seed: int) -> float:
    gen = LindbladGenerator(drift=h_eff, dissipator=sys.generator.dissipator)
    if norm_kind is NormKind.INDUCED_11_ESTIMATE:
        return induced_11_estimate(gen, restarts=restarts, seed=seed).value
    return math.sqrt(sys.dim) * induced_22(build_superoperator(gen)).value


def _combine_hamiltonians(mats: list[np.ndarray], coefs: list[float], dim: int) -> np.ndarray:
    """Sum c_k * H_k after merging identical matrices, so cancelling
    coefficients drop out exactly."""
    merged_mats: list[np.ndarray] = []
    merged_coefs: list[float] = []
    for m, c in zip(mats, coefs):
        for i, known in enumerate(merged_mats):
            if known.shape == m.shape and np.array_equal(known, m):
                merged_coefs[i] += c
                break
        else:
            merged_mats.append(m)
            merged_coefs.append(c)
    h_eff = None
    for m, c in zip(merged_mats, merged_coefs):
        if c == 0.0:
            continue
        term = m if c == 1.0 else c * m
        h_eff = term if h_eff is None else h_eff + term
    if h_eff is None:
        h_eff = np.zeros((dim, dim), dtype=complex)
    return h_eff


def bound_schedule_independent(sys: ControlSystem,
                               norm_kind: NormKind = NormKind.SQRT_D_INDUCED_22,
                               restarts: int = 32, seed: int = 7) -> BoundReport:
    """The schedule-independent bound: controls drop out entirely."""
    numerator = trace_norm(sys.target - sys.initial)
    denominator = _generator_norm(sys.generator.drift, sys, norm_kind, restarts, seed)
    return BoundReport(numerator=numerator, denominator=denominator, norm_kind=norm_kind,
                       notes="free generator norm; schedule independent")


def bound_general(sys: ControlSystem, ref: ReferenceGenerator, schedule,
                  norm_kind: NormKind = NormKind.SQRT_D_INDUCED_22,
                  restarts: int = 32, seed: int = 7) -> BoundReport:
    """Bound from an arbitrary reference unitary flow fixing the initial state.

    The denominator is the maximum over schedule intervals of the norm of the
    difference generator.  With the reference tracking the control term this
    reduces exactly to :func:`bound_schedule_independent`.
    """
    comm = ref.hamiltonian @ sys.initial - sys.initial @ ref.hamiltonian
    if float(np.abs(comm).max()) > 1e-10 * max(1.0, float(np.abs(ref.hamiltonian).max())):
        raise ValueError("reference Hamiltonian does not fix the initial state")
    amps = np.asarray(schedule.amplitudes, dtype=float)
    n = amps.shape[0]
    ref_amps = np.zeros(n) if ref.amplitudes is None else ref.amplitudes
    if len(ref_amps) != n:
        raise ValueError("reference amplitudes must match the schedule intervals")
    numerator = trace_norm(sys.target - sys.initial)
    denominator = 0.0
    seen: dict[tuple, float] = {}
    for j in range(n):
        key = (tuple(amps[j]), float(ref_amps[j]))
        if key not in seen:
            mats = [sys.generator.drift, *sys.controls, ref.hamiltonian]
            coefs = [1.0, *amps[j], -float(ref_amps[j])]
            h_eff = _combine_hamiltonians(mats, coefs, sys.dim)
            seen[key] = _generator_norm(h_eff, sys, norm_kind, restarts, seed)
        denominator = max(denominator, seen[key])
    return BoundReport(numerator=numerator, denominator=denominator, norm_kind=norm_kind,
                       notes="max interval norm of (generator - reference flow)")


def bound_trajectory_avg(sys: ControlSystem, schedule,
                         restarts: int = 32, seed: int = 7,
                         norm_kind: NormKind = NormKind.SQRT_D_INDUCED_22) -> BoundReport:
    """Trajectory-style bound: interval-weighted average of the full generator norm.

    With equal intervals the average is the mean of per-interval norms.  In
    the sqrt(d) backend each term upper-bounds the (1->1) norm, so the
    averaged denominator still yields a valid lower bound on the time.
    """
    amps = np.asarray(schedule.amplitudes, dtype=float)
    values = []
    seen: dict[tuple, float] = {}
    for row in amps:
        key = tuple(row)
        if key not in seen:
            mats = [sys.generator.drift, *sys.controls]
            coefs = [1.0, *row]
            h_eff = _combine_hamiltonians(mats, coefs, sys.dim)
            seen[key] = _generator_norm(h_eff, sys, norm_kind, restarts, seed)
        values.append(seen[key])
    numerator = trace_norm(sys.target - sys.initial)
    denominator = float(np.mean(values))
    return BoundReport(numerator=numerator, denominator=denominator, norm_kind=norm_kind,
                       notes="interval-averaged full generator norm")


UNIT_NUMERATOR = "unit"
DEFINITIONAL_NUMERATOR = "definitional"


def single_qubit_analytic_bound(omega: float, gamma: float,
                                numerator: str = UNIT_NUMERATOR) -> float:
    """Closed-form bound for the damped qubit using the coherence-sector norm.

    The denominator is sqrt(2)*|gamma + 2i*omega|; the numerator is either 1
    (unit convention) or sqrt(2) (the trace norm of the actual state
    difference).  Both rates zero means the target is unreachable and the
    bound diverges (returns inf).
    """
    if omega < 0 or gamma < 0:
        raise ValueError("omega and gamma must be nonnegative")
    if numerator == UNIT_NUMERATOR:
        num = 1.0
    elif numerator == DEFINITIONAL_NUMERATOR:
        num = math.sqrt(2.0)
    else:
        raise ValueError(f"unknown numerator convention {numerator!r}")
    if omega == 0.0 and gamma == 0.0:
        return math.inf
    return num / (math.sqrt(2.0) * math.hypot(gamma, 2.0 * omega))


COHERENCE_LIMITED = "coherence_limited"
DISSIPATION_LIMITED = "dissipation_limited"


def single_qubit_denominator(omega: float, gamma: float) -> tuple[float, str]:
    """Analytic sqrt(d)*||L||_(2->2) denominator for the damped qubit with its regime.

    The superoperator splits into a coherence sector of norm
    sqrt(gamma^2 + 4 omega^2) and a population sector of norm 2*sqrt(2)*gamma;
    the crossover sits at gamma = 2*omega/sqrt(7).
    """
    coherence = math.hypot(gamma, 2.0 * omega)
    population = 2.0 * math.sqrt(2.0) * gamma
    if coherence >= population:
        return math.sqrt(2.0) * coherence, COHERENCE_LIMITED
    return math.sqrt(2.0) * population, DISSIPATION_LIMITED


@dataclass(frozen=True)
class ClosedSystemReport:
    """Comparison of the trace-norm bound with the variance-based reference bound
    for unitary dynamics between pure states."""

    trace_norm_difference: float
    bures_distance: float
    variance: float
    spectral_spread: float
    trace_norm_bound: float
    reference_bound: float
    reference_divergent: bool
    chain_holds: bool
    popoviciu_holds: bool
    comparison_holds: bool


def closed_system_report(psi0, psi_t, h0, tol: float = 1e-10) -> ClosedSystemReport:
    """Evaluate both closed-system bounds and the inequalities linking them.

    Checks the sandwich ||d_rho||_1 <= 2 D_B <= sqrt(2) ||d_rho||_1, the
    variance bound sqrt(Var) <= spread/2, and that the trace-norm bound never
    exceeds the variance-based reference bound.  Zero variance with distinct
    states makes the reference bound divergent; this is flagged, not an error.
    """
    u = np.asarray(psi0, dtype=complex).reshape(-1)
    v = np.asarray(psi_t, dtype=complex).reshape(-1)
    for name, w in (("psi0", u), ("psi_t", v)):
        if abs(np.linalg.norm(w) - 1.0) > 1e-10:
            raise ValueError(f"{name} is not normalized")
    h = require_hermitian(h0)
    rho0 = np.outer(u, u.conj())
    rho_t = np.outer(v, v.conj())
    diff_norm = trace_norm(rho_t - rho0)
    overlap = abs(np.vdot(v, u))
    bures = math.sqrt(max(2.0 * (1.0 - overlap), 0.0))
    h_mean = float(np.real(np.vdot(v, h @ v)))
    h_sq = float(np.real(np.vdot(v, h @ (h @ v))))
    variance = max(h_sq - h_mean**2, 0.0)
    spread = hermitian_eig(h).spread

    if diff_norm <= tol:
        trace_bound = 0.0
    elif spread <= tol:
        trace_bound = math.inf
    else:
        trace_bound = diff_norm / spread

    reference_divergent = variance <= tol and bures > tol
    if bures <= tol:
        reference_bound = 0.0
    elif reference_divergent:
        reference_bound = math.inf
    else:
        reference_bound = bures / math.sqrt(variance)

    chain = (diff_norm <= 2.0 * bures + tol) and (2.0 * bures <= math.sqrt(2.0) * diff_norm + tol)
    popoviciu = math.sqrt(variance) <= 0.5 * spread + tol
    comparison = trace_bound <= reference_bound + tol
    return ClosedSystemReport(
        trace_norm_difference=diff_norm, bures_distance=bures, variance=variance,
        spectral_spread=spread, trace_norm_bound=trace_bound,
        reference_bound=reference_bound, reference_divergent=reference_divergent,
        chain_holds=chain, popoviciu_holds=popoviciu, comparison_holds=comparison)
