"""Fock-space propagation and two-point work measurement for the ramp.

All operators are represented in the number basis of a fixed reference
oscillator (frequency omega_ref, usually omega_i).  In that ladder basis
the instantaneous Hamiltonian

    H0(t) = p^2/(2m) + m omega(t)^2 q^2 / 2

is real, symmetric and pentadiagonal with only the (n, n) and (n, n+2)
entries populated:

    <n|H0|n>     = (hbar/4) (omega_ref + omega^2/omega_ref) (2n + 1)
    <n+2|H0|n>   = (hbar/4) (omega^2/omega_ref - omega_ref)
                   * sqrt((n+1)(n+2))

and the shortcut control

    Hc(t) = -(omega_dot / (4 omega)) (q p + p q)
          = -(omega_dot / (4 omega)) * i hbar (adag^2 - a^2)

contributes the purely imaginary co-diagonal
<n+2|Hc|n> = -i (hbar omega_dot / (4 omega)) sqrt((n+1)(n+2)).  With the
control on, the propagator maps every instantaneous eigenstate of
H0(omega_i) onto the corresponding eigenstate of H0(omega_f) up to phase,
for arbitrarily short ramps.

Work is defined by projective energy measurements before and after the
ramp: the outcome W = E_m(omega_f) - E_n(omega_i) happens with probability
P_n(thermal) * P(n -> m).  Because H0 and Hc only couple states two levels
apart, parity is conserved and P(n -> m) vanishes whenever n and m have
opposite parity.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import solve_ivp

from .classical_analytics import BasicSolutions
from .errors import IntegrationError, TruncationLeakageError
from .protocols import FrequencyProtocol, omega_at, omega_dot_at

#: Fraction of the top of the basis watched for truncation leakage.
_LEAK_FRACTION = 0.1
#: Maximum tolerated population in that top slice.
_LEAK_TOL = 1e-8
#: Row-sum completeness target for transition matrices.
_ROW_SUM_TOL = 1e-6


@dataclass(frozen=True)
class FockBasisConfig:
    """Truncated number-basis setup: dimension, reference frequency, constants."""

    dimension: int = 512
    omega_ref: float = 1.0
    mass: float = 1.0
    hbar: float = 1.0

    def __post_init__(self):
        if self.dimension < 4 or self.dimension % 2:
            raise ValueError("dimension must be an even integer >= 4")
        for name in ("omega_ref", "mass", "hbar"):
            value = getattr(self, name)
            if not math.isfinite(value) or value <= 0.0:
                raise ValueError(f"{name} must be positive and finite")


@dataclass
class QuantumState:
    """Normalized state vector in the reference number basis."""

    amplitudes: np.ndarray

    def __post_init__(self):
        amp = np.asarray(self.amplitudes, dtype=complex)
        if amp.ndim != 1:
            raise ValueError("amplitudes must be one-dimensional")
        if not np.all(np.isfinite(amp.view(float))):
            raise ValueError("amplitudes must be finite")
        norm = np.linalg.norm(amp)
        if abs(norm - 1.0) > 1e-9:
            raise ValueError(f"state norm {norm!r} deviates from 1 beyond 1e-9")
        tail = int(math.ceil(len(amp) * (1.0 - _LEAK_FRACTION)))
        leak = float(np.sum(np.abs(amp[tail:]) ** 2))
        if leak > _LEAK_TOL:
            raise TruncationLeakageError(
                f"top-of-basis population {leak:.3e} exceeds {_LEAK_TOL:g}; "
                "use a larger basis dimension"
            )
        self.amplitudes = amp


def _codiag_coeffs(dimension: int) -> np.ndarray:
    n = np.arange(dimension - 2, dtype=float)
    return np.sqrt((n + 1.0) * (n + 2.0))


def h0_matrix(omega: float, cfg: FockBasisConfig) -> np.ndarray:
    """Dense bare Hamiltonian at frequency omega, in the reference basis."""
    if omega <= 0.0:
        raise ValueError("omega must be positive")
    N = cfg.dimension
    n = np.arange(N, dtype=float)
    diag = 0.25 * cfg.hbar * (cfg.omega_ref + omega**2 / cfg.omega_ref) * (2.0 * n + 1.0)
    off = 0.25 * cfg.hbar * (omega**2 / cfg.omega_ref - cfg.omega_ref) * _codiag_coeffs(N)
    h = np.diag(diag)
    idx = np.arange(N - 2)
    h[idx, idx + 2] = off
    h[idx + 2, idx] = off
    return h


def hc_matrix(protocol: FrequencyProtocol, t: float, cfg: FockBasisConfig) -> np.ndarray:
    """Dense control Hamiltonian -(omega_dot/4 omega)(qp + pq) at time t."""
    w = omega_at(protocol, t)
    wd = omega_dot_at(protocol, t)
    N = cfg.dimension
    g = 0.25 * cfg.hbar * wd / w
    off = -1j * g * _codiag_coeffs(N)
    h = np.zeros((N, N), dtype=complex)
    idx = np.arange(N - 2)
    h[idx + 2, idx] = off
    h[idx, idx + 2] = np.conj(off)
    return h


def eigenbasis(omega: float, cfg: FockBasisConfig) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues (ascending) and eigenvector columns of H0(omega)."""
    energies, vectors = np.linalg.eigh(h0_matrix(omega, cfg))
    return energies, vectors


def _apply_hamiltonian(psi, d, u):
    """y = H psi for the pentadiagonal H given by diagonal d and co-diagonal u."""
    y = d[:, None] * psi
    y[:-2] += u[:, None] * psi[2:]
    y[2:] += np.conj(u)[:, None] * psi[:-2]
    return y


def _propagate_columns(
    psi0: np.ndarray,
    protocol: FrequencyProtocol,
    with_control: bool,
    cfg: FockBasisConfig,
    tol: float = 1e-10,
) -> np.ndarray:
    """Solve i hbar dpsi/dt = H(t) psi for a stack of column vectors."""
    N = cfg.dimension
    cols = psi0.shape[1]
    roots = _codiag_coeffs(N)
    two_n_plus_1 = 2.0 * np.arange(N, dtype=float) + 1.0
    hbar, wref = cfg.hbar, cfg.omega_ref

    def rhs(t, y):
        w = omega_at(protocol, t)
        d = 0.25 * hbar * (wref + w * w / wref) * two_n_plus_1
        u = (0.25 * hbar * (w * w / wref - wref)) * roots + 0j
        if with_control:
            wd = omega_dot_at(protocol, t)
            # upper co-diagonal of Hc: <n|Hc|n+2> = +i hbar wd/(4 w) sqrt(...)
            u = u + (0.25j * hbar * wd / w) * roots
        psi = y.reshape(N, cols)
        return (-1j / hbar) * _apply_hamiltonian(psi, d, u).ravel()

    sol = solve_ivp(
        rhs,
        (0.0, protocol.tau),
        psi0.astype(complex).ravel(),
        method="DOP853",
        rtol=tol,
        atol=tol * 1e-2,
    )
    if not sol.success:
        raise IntegrationError(f"Schrodinger propagation failed: {sol.message}")
    psi_tau = sol.y[:, -1].reshape(N, cols)

    norms = np.linalg.norm(psi_tau, axis=0)
    if np.any(np.abs(norms - np.linalg.norm(psi0, axis=0)) > 1e-9):
        raise IntegrationError(
            f"propagation norm drift {np.max(np.abs(norms - 1.0)):.3e} beyond 1e-9; "
            "tighten tol"
        )
    tail = int(math.ceil(N * (1.0 - _LEAK_FRACTION)))
    leak = float(np.max(np.sum(np.abs(psi_tau[tail:]) ** 2, axis=0)))
    if leak > _LEAK_TOL:
        raise TruncationLeakageError(
            f"population {leak:.3e} reached the top {_LEAK_FRACTION:.0%} of the "
            f"basis (dimension {N}); increase the dimension"
        )
    return psi_tau


def propagate(
    initial: QuantumState,
    protocol: FrequencyProtocol,
    with_control: bool = False,
    cfg: FockBasisConfig | None = None,
    tol: float = 1e-10,
) -> QuantumState:
    """Propagate one state through the ramp, t: 0 -> tau."""
    if cfg is None:
        cfg = FockBasisConfig(dimension=len(initial.amplitudes))
    if len(initial.amplitudes) != cfg.dimension:
        raise ValueError("state length does not match basis dimension")
    psi_tau = _propagate_columns(
        initial.amplitudes[:, None], protocol, with_control, cfg, tol
    )
    return QuantumState(amplitudes=psi_tau[:, 0])


@dataclass(frozen=True)
class TransitionMatrix:
    """Level-to-level transition probabilities across one ramp.

    ``probs[n, m]`` is P(n -> m) from eigenstate n of H0(omega_i) into
    eigenstate m of H0(omega_f).  Rows cover n < n_max initial levels; the
    column count is chosen automatically so that every row sums to 1
    within the completeness tolerance (bare ramps scatter population to
    levels well above n).
    """

    probs: np.ndarray
    omega_i: float
    omega_f: float
    with_control: bool
    hbar: float = 1.0
    protocol: FrequencyProtocol | None = field(default=None, compare=False)

    @property
    def n_max(self) -> int:
        return self.probs.shape[0]

    @property
    def m_max(self) -> int:
        return self.probs.shape[1]

    def row_sums(self) -> np.ndarray:
        return self.probs.sum(axis=1)


def transition_matrix(
    protocol: FrequencyProtocol,
    with_control: bool = False,
    cfg: FockBasisConfig | None = None,
    n_max: int = 32,
    tol: float = 1e-10,
) -> TransitionMatrix:
    """Propagate the lowest n_max initial eigenstates and project at tau.

    n_max is capped at a quarter of the basis dimension so the propagated
    states stay far from the truncation edge.
    """
    if cfg is None:
        cfg = FockBasisConfig(omega_ref=protocol.omega_i)
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    if n_max > cfg.dimension // 4:
        raise ValueError(
            f"n_max = {n_max} exceeds dimension/4 = {cfg.dimension // 4}; "
            "enlarge the basis"
        )
    _, v_i = eigenbasis(protocol.omega_i, cfg)
    _, v_f = eigenbasis(protocol.omega_f, cfg)
    psi_tau = _propagate_columns(v_i[:, :n_max] + 0j, protocol, with_control, cfg, tol)
    # full (final level m, initial level n) probability table
    amplitudes = v_f.conj().T @ psi_tau
    p_full = (np.abs(amplitudes) ** 2).T  # (n, m)

    m_max = max(16, n_max)
    while True:
        deficits = 1.0 - p_full[:, :m_max].sum(axis=1)
        if np.all(deficits <= _ROW_SUM_TOL):
            break
        if m_max >= cfg.dimension:
            raise TruncationLeakageError(
                f"transition rows stay incomplete even with all {cfg.dimension} "
                f"final levels (worst deficit {deficits.max():.3e}); increase "
                "the basis dimension"
            )
        m_max = min(2 * m_max, cfg.dimension)
    return TransitionMatrix(
        probs=p_full[:, :m_max].copy(),
        omega_i=protocol.omega_i,
        omega_f=protocol.omega_f,
        with_control=with_control,
        hbar=cfg.hbar,
        protocol=protocol,
    )


@dataclass(frozen=True)
class QuantumWorkAtoms:
    """Discrete two-point-measurement work distribution.

    ``works`` is sorted ascending; ``probs`` sums to 1 within 1e-6 (the
    shortfall is basis truncation).  ``gibbs_tail`` reports the raw
    thermal weight discarded by cutting the initial-level sum.
    """

    works: np.ndarray
    probs: np.ndarray
    gibbs_tail: float = 0.0

    def __post_init__(self):
        works = np.asarray(self.works, dtype=float)
        probs = np.asarray(self.probs, dtype=float)
        if works.shape != probs.shape or works.ndim != 1:
            raise ValueError("works and probs must be matching 1-d arrays")
        if np.any(np.diff(works) < 0.0):
            raise ValueError("works must be sorted ascending")
        if np.any(probs < 0.0):
            raise ValueError("probabilities must be non-negative")
        total = probs.sum()
        if abs(total - 1.0) > 1e-6:
            raise ValueError(f"atom probabilities sum to {total!r}, not 1 within 1e-6")
        object.__setattr__(self, "works", works)
        object.__setattr__(self, "probs", probs)

    def mean(self) -> float:
        return float(np.dot(self.probs, self.works))

    def std(self) -> float:
        m = self.mean()
        return float(math.sqrt(np.dot(self.probs, (self.works - m) ** 2)))

    def negative_probability(self) -> float:
        """Total weight on strictly negative work outcomes."""
        return float(self.probs[self.works < 0.0].sum())


def _merge_atoms(works: np.ndarray, probs: np.ndarray, scale: float):
    """Sort atoms and coalesce values closer than 1e-9 relative."""
    order = np.argsort(works)
    works = works[order]
    probs = probs[order]
    tol = 1e-9
    merged_w = [works[0]]
    merged_p = [probs[0]]
    for w, p in zip(works[1:], probs[1:]):
        ref = max(abs(w), abs(merged_w[-1]), scale * 1e-6)
        if w - merged_w[-1] <= tol * ref:
            # probability-weighted position keeps merged atoms unbiased
            total = merged_p[-1] + p
            if total > 0.0:
                merged_w[-1] = (merged_w[-1] * merged_p[-1] + w * p) / total
            merged_p[-1] = total
        else:
            merged_w.append(w)
            merged_p.append(p)
    return np.array(merged_w), np.array(merged_p)


def quantum_work_atoms(
    tm: TransitionMatrix,
    beta: float,
    omega_i: float | None = None,
    omega_f: float | None = None,
    hbar: float | None = None,
) -> QuantumWorkAtoms:
    """Two-point-measurement work atoms for a thermal initial state.

    Initial level n carries the truncated-and-renormalized thermal weight
    proportional to exp(-n beta hbar omega_i); each (n, m) pair contributes
    an atom at W = hbar omega_f (m + 1/2) - hbar omega_i (n + 1/2).
    """
    if beta <= 0.0:
        raise ValueError("beta must be positive")
    omega_i = tm.omega_i if omega_i is None else omega_i
    omega_f = tm.omega_f if omega_f is None else omega_f
    hbar = tm.hbar if hbar is None else hbar
    n_max, m_max = tm.probs.shape
    x = math.exp(-beta * hbar * omega_i)
    raw = x ** np.arange(n_max)
    weights = raw / raw.sum()
    gibbs_tail = x**n_max  # discarded mass relative to the full geometric sum

    n = np.arange(n_max, dtype=float)
    m = np.arange(m_max, dtype=float)
    w_grid = hbar * omega_f * (m[None, :] + 0.5) - hbar * omega_i * (n[:, None] + 0.5)
    p_grid = weights[:, None] * tm.probs
    works, probs = _merge_atoms(w_grid.ravel(), p_grid.ravel(), scale=hbar * omega_f)
    return QuantumWorkAtoms(works=works, probs=probs, gibbs_tail=gibbs_tail)


def pdf_quantum_adiabatic(
    beta: float, omega_i: float, omega_f: float, hbar: float = 1.0, n_max: int = 64
) -> QuantumWorkAtoms:
    """Atoms of the transitionless (or infinitely slow) quantum ramp.

    Level populations never change, so the only outcomes are
    W = hbar (omega_f - omega_i)(n + 1/2) with geometric thermal weights
    (1 - x) x^n, x = exp(-beta hbar omega_i).  n_max must leave a raw
    geometric tail below 1e-10.
    """
    if beta <= 0.0 or hbar <= 0.0:
        raise ValueError("beta and hbar must be positive")
    if omega_i <= 0.0 or omega_f <= 0.0:
        raise ValueError("frequencies must be positive")
    x = math.exp(-beta * hbar * omega_i)
    tail = x**n_max
    if tail >= 1e-10:
        needed = int(math.ceil(math.log(1e-10) / math.log(x))) + 1
        raise ValueError(
            f"geometric tail {tail:.3e} at n_max={n_max} exceeds 1e-10; "
            f"use n_max >= {needed}"
        )
    n = np.arange(n_max, dtype=float)
    works = hbar * (omega_f - omega_i) * (n + 0.5)
    probs = (1.0 - x) * x**n
    probs = probs / probs.sum()  # absorb the sub-1e-10 truncation remainder
    if omega_f < omega_i:
        works = works[::-1].copy()
        probs = probs[::-1].copy()
    return QuantumWorkAtoms(works=works, probs=probs, gibbs_tail=tail)


def _log_sinh(x: float) -> float:
    """log(sinh(x)) for x > 0 without overflow."""
    return x + math.log1p(-math.exp(-2.0 * x)) - math.log(2.0)


def delta_f_quantum(beta: float, omega_i: float, omega_f: float, hbar: float = 1.0) -> float:
    """Free-energy difference of the quantum oscillator between frequencies.

    (1/beta) log[ sinh(beta hbar omega_f / 2) / sinh(beta hbar omega_i / 2) ],
    evaluated through log-sinh so that deep-quantum arguments cannot
    overflow.
    """
    if beta <= 0.0 or hbar <= 0.0 or omega_i <= 0.0 or omega_f <= 0.0:
        raise ValueError("all arguments must be positive")
    a = 0.5 * beta * hbar * omega_f
    b = 0.5 * beta * hbar * omega_i
    return (_log_sinh(a) - _log_sinh(b)) / beta


def adiabaticity_parameter(basic: BasicSolutions, omega_i: float, omega_f: float) -> float:
    """Energy-magnification factor Q* of a bare ramp.

    Built from the classical basic solutions:

        Q* = [Sdot^2 omega_i^2 + omega_f^2 omega_i^2 S^2
              + Cdot^2 + omega_f^2 C^2] / (2 omega_i omega_f).

    Q* = 1 for an adiabatic ramp and (omega_i^2 + omega_f^2) /
    (2 omega_i omega_f) for a sudden jump; the mean bare work of a
    classical thermal ensemble is (Q* omega_f/omega_i - 1)/beta.  The same
    factor magnifies quantum level energies, which is how the engine layer
    uses it.
    """
    if omega_i <= 0.0 or omega_f <= 0.0:
        raise ValueError("frequencies must be positive")
    num = (
        basic.Sdot_tau**2 * omega_i**2
        + omega_f**2 * omega_i**2 * basic.S_tau**2
        + basic.Cdot_tau**2
        + omega_f**2 * basic.C_tau**2
    )
    return num / (2.0 * omega_i * omega_f)
