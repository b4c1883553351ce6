"""Schatten norms on operators and induced norms on superoperators.

The induced (2->2) norm of a superoperator is exact: it is the largest
singular value of its matrix.  The induced (1->1) norm has no tractable
exact algorithm, so it is estimated from below by ascending over rank-one
probes |u><v| (the extreme points of the unit trace-norm ball); the best
probe value is a certified lower bound.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .linalg import as_complex_matrix, largest_singular_value, unvec
from .lindblad import LindbladGenerator, build_superoperator


class NormMethod(enum.Enum):
    EXACT = "exact"
    ESTIMATED = "estimated"


@dataclass(frozen=True)
class NormReport:
    value: float
    method: NormMethod
    probes: int = 0

    def __post_init__(self):
        if self.value < 0:
            raise ValueError("norm value must be nonnegative")


def trace_norm(a) -> float:
    """Sum of singular values of a square matrix."""
    m = as_complex_matrix(a)
    if m.shape[0] != m.shape[1]:
        raise ValueError(f"trace norm expects a square matrix, got {m.shape}")
    dev = float(np.abs(m - m.conj().T).max())
    if dev <= 1e-13 * max(1.0, float(np.abs(m).max())):
        return float(np.abs(np.linalg.eigvalsh(0.5 * (m + m.conj().T))).sum())
    return float(np.linalg.svd(m, compute_uv=False).sum())


def hilbert_schmidt_norm(a) -> float:
    """Frobenius norm."""
    return float(np.linalg.norm(as_complex_matrix(a)))


def trace_distance(rho, sigma) -> float:
    """Half the trace norm of the difference."""
    r = as_complex_matrix(rho)
    s = as_complex_matrix(sigma)
    if r.shape != s.shape:
        raise ValueError(f"shape mismatch {r.shape} vs {s.shape}")
    return 0.5 * trace_norm(r - s)


def induced_22(m) -> NormReport:
    """Induced (2->2) norm of a superoperator matrix: its largest singular value."""
    a = as_complex_matrix(m)
    if a.shape[0] != a.shape[1]:
        raise ValueError("superoperator matrix must be square")
    return NormReport(value=largest_singular_value(a), method=NormMethod.EXACT)


def _superoperator_and_dim(g):
    if isinstance(g, LindbladGenerator):
        return build_superoperator(g), g.dim
    a = as_complex_matrix(g)
    d = int(round(np.sqrt(a.shape[0])))
    if a.shape[0] != a.shape[1] or d * d != a.shape[0]:
        raise ValueError(f"superoperator matrix must be d^2 x d^2, got {a.shape}")
    return a, d


def _probe_value(m: np.ndarray, d: int, u: np.ndarray, v: np.ndarray) -> float:
    x = unvec(m @ np.kron(v.conj(), u), d)
    return float(np.linalg.svd(x, compute_uv=False).sum())


def _ascend(m: np.ndarray, d: int, u0: np.ndarray, v0: np.ndarray,
            max_iters: int = 300, rel_tol: float = 1e-12) -> tuple[float, np.ndarray, np.ndarray]:
    """Alternating subgradient ascent of ||L(|u><v|)||_1 over unit vectors u, v.

    Each half step replaces one vector by the normalized gradient of the
    (convex, degree-one homogeneous) objective, which cannot decrease it.
    """
    u = u0 / np.linalg.norm(u0)
    v = v0 / np.linalg.norm(v0)
    mh = m.conj().T
    value = _probe_value(m, d, u, v)
    for _ in range(max_iters):
        for which in ("u", "v"):
            x = unvec(m @ np.kron(v.conj(), u), d)
            p, s, qh = np.linalg.svd(x, full_matrices=False)
            g = p @ qh
            y = unvec(mh @ g.reshape(-1, order="F"), d)
            if which == "u":
                w = y @ v
                nw = np.linalg.norm(w)
                if nw > 0:
                    u = w / nw
            else:
                w = y.T @ u.conj()
                nw = np.linalg.norm(w)
                if nw > 0:
                    v = w.conj() / nw
        new_value = _probe_value(m, d, u, v)
        if new_value <= value + rel_tol * max(1.0, value):
            value = max(value, new_value)
            break
        value = new_value
    return value, u, v


def induced_11_estimate(g, restarts: int = 32, seed: int = 7) -> NormReport:
    """Lower-bound estimate of the induced (1->1) norm via multi-start probe ascent.

    ``g`` may be a :class:`LindbladGenerator` or a raw superoperator matrix.
    The start list is deterministic in ``seed`` and grows as a prefix with
    ``restarts``, so the estimate is nondecreasing in the number of restarts.
    Pair with the sqrt(d) * induced_22 upper bound (see
    :func:`induced_11_bracket`) to bracket the true norm.
    """
    if restarts < 1:
        raise ValueError("restarts must be >= 1")
    m, d = _superoperator_and_dim(g)
    starts: list[tuple[np.ndarray, np.ndarray]] = []
    if isinstance(g, LindbladGenerator):
        evecs = np.linalg.eigh(g.drift)[1]
        lo, hi = evecs[:, 0], evecs[:, -1]
    else:
        lo = np.zeros(d, dtype=complex)
        lo[0] = 1.0
        hi = np.zeros(d, dtype=complex)
        hi[-1] = 1.0
    starts.extend([(hi, lo), (lo, hi), (hi, hi), (lo, lo)])
    rng = np.random.default_rng(seed)
    for _ in range(restarts):
        u = rng.normal(size=d) + 1j * rng.normal(size=d)
        v = rng.normal(size=d) + 1j * rng.normal(size=d)
        starts.append((u, v))
    best = 0.0
    for u0, v0 in starts:
        value, _, _ = _ascend(m, d, u0, v0)
        best = max(best, value)
    return NormReport(value=best, method=NormMethod.ESTIMATED, probes=len(starts))


def induced_11_bracket(g, restarts: int = 32, seed: int = 7) -> tuple[NormReport, float]:
    """The (1->1) lower-bound estimate together with its sqrt(d) * ||.||_(2->2) upper bound."""
    m, d = _superoperator_and_dim(g)
    report = induced_11_estimate(g, restarts=restarts, seed=seed)
    return report, float(np.sqrt(d)) * induced_22(m).value
