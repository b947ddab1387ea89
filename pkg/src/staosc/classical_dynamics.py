"""Classical trajectories and ensembles of the driven oscillator.

The bare Hamiltonian is H0 = p**2/(2m) + m omega(t)**2 q**2 / 2.  Switching
the shortcut control on adds

    Hc = -(omega_dot / (2 omega)) * p * q,

whose flow rescale-rotates phase space so that the action I = H0/omega of
every trajectory is an exact constant of motion for arbitrarily fast ramps.
Work for a single trajectory is measured endpoint-to-endpoint,
W = H0(tau) - H0(0), which is the integral of the explicit time derivative
m omega omega_dot q**2 along the path (the control term contributes nothing
at the endpoints because omega_dot vanishes there).

Both flows are linear in (p, q), so an ensemble can be pushed through a
ramp by integrating the 2x2 fundamental matrix once and applying it to
every member; :func:`propagate_ensemble` does exactly that and agrees with
per-trajectory :func:`integrate` to solver accuracy.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp

from .errors import IntegrationError
from .protocols import FrequencyProtocol, omega_at, omega_dot_at

_TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class PhaseState:
    """A single phase-space point (momentum first)."""

    p: float
    q: float

    def __post_init__(self):
        if not (math.isfinite(self.p) and math.isfinite(self.q)):
            raise ValueError(f"phase-space coordinates must be finite: {self!r}")


@dataclass(frozen=True)
class ActionAngle:
    """Action-angle coordinates; theta is stored wrapped into [0, 2*pi)."""

    I: float
    theta: float

    def __post_init__(self):
        if not (math.isfinite(self.I) and math.isfinite(self.theta)):
            raise ValueError("action-angle coordinates must be finite")
        if self.I < 0.0:
            raise ValueError(f"action must be non-negative, got {self.I!r}")
        object.__setattr__(self, "theta", self.theta % _TWO_PI)


@dataclass(frozen=True)
class OscillatorParams:
    """Static oscillator constants (only the mass, in this model)."""

    m: float = 1.0

    def __post_init__(self):
        if not math.isfinite(self.m) or self.m <= 0.0:
            raise ValueError(f"mass must be positive, got {self.m!r}")


@dataclass(frozen=True)
class EnsembleSpec:
    """Size, temperature and seed of a canonical initial ensemble."""

    beta: float
    count: int
    seed: int

    def __post_init__(self):
        if not math.isfinite(self.beta) or self.beta <= 0.0:
            raise ValueError(f"beta must be positive, got {self.beta!r}")
        if self.count < 1:
            raise ValueError(f"count must be >= 1, got {self.count!r}")


def oscillator_energy(p, q, omega, params: OscillatorParams = OscillatorParams()):
    """Bare oscillator energy p**2/(2m) + m omega**2 q**2/2 (vectorized)."""
    return np.asarray(p) ** 2 / (2.0 * params.m) + 0.5 * params.m * omega**2 * np.asarray(q) ** 2


def to_action_angle(
    state: PhaseState, omega: float, params: OscillatorParams = OscillatorParams()
) -> ActionAngle:
    """Map (p, q) to (I, theta) at fixed frequency omega.

    Conventions: q = sqrt(2 I / (m omega)) sin(theta),
    p = sqrt(2 m omega I) cos(theta), so I = H0/omega.  The origin gets
    theta = 0 by convention.
    """
    if omega <= 0.0:
        raise ValueError("omega must be positive")
    energy = float(oscillator_energy(state.p, state.q, omega, params))
    action = energy / omega
    if action == 0.0:
        return ActionAngle(I=0.0, theta=0.0)
    root_momega = math.sqrt(params.m * omega)
    theta = math.atan2(state.q * root_momega, state.p / root_momega)
    return ActionAngle(I=action, theta=theta)


def from_action_angle(
    aa: ActionAngle, omega: float, params: OscillatorParams = OscillatorParams()
) -> PhaseState:
    """Inverse of :func:`to_action_angle` at the same omega."""
    if omega <= 0.0:
        raise ValueError("omega must be positive")
    q = math.sqrt(2.0 * aa.I / (params.m * omega)) * math.sin(aa.theta)
    p = math.sqrt(2.0 * params.m * omega * aa.I) * math.cos(aa.theta)
    return PhaseState(p=p, q=q)


def control_value(state: PhaseState, protocol: FrequencyProtocol, t: float) -> float:
    """Instantaneous value of the control term -(omega_dot/2 omega) p q."""
    w = omega_at(protocol, t)
    wd = omega_dot_at(protocol, t)
    return -(wd / (2.0 * w)) * state.p * state.q


def derivative(
    state: PhaseState,
    t: float,
    protocol: FrequencyProtocol,
    with_control: bool = False,
    params: OscillatorParams = OscillatorParams(),
):
    """Phase-space velocity (p_dot, q_dot) at time t.

    Bare flow: q_dot = p/m, p_dot = -m omega**2 q.  The control adds the
    divergence-free shear (+g p, -g q) with g = omega_dot/(2 omega).
    """
    w = omega_at(protocol, t)
    p_dot = -params.m * w**2 * state.q
    q_dot = state.p / params.m
    if with_control:
        g = omega_dot_at(protocol, t) / (2.0 * w)
        p_dot += g * state.p
        q_dot -= g * state.q
    return (p_dot, q_dot)


def _rhs(t, y, protocol, with_control, m):
    w = omega_at(protocol, t)
    p, q = y
    p_dot = -m * w * w * q
    q_dot = p / m
    if with_control:
        g = omega_dot_at(protocol, t) / (2.0 * w)
        p_dot += g * p
        q_dot -= g * q
    return (p_dot, q_dot)


def integrate(
    initial: PhaseState,
    protocol: FrequencyProtocol,
    with_control: bool = False,
    params: OscillatorParams = OscillatorParams(),
    tol: float = 1e-10,
) -> PhaseState:
    """Propagate one state through the full ramp, t: 0 -> tau."""
    p_scale = max(abs(initial.p), params.m * protocol.omega_i * abs(initial.q), 1e-30)
    atol = np.array([tol * p_scale, tol * p_scale / (params.m * protocol.omega_i)])
    sol = solve_ivp(
        _rhs,
        (0.0, protocol.tau),
        (initial.p, initial.q),
        method="DOP853",
        rtol=tol,
        atol=atol,
        args=(protocol, with_control, params.m),
    )
    if not sol.success:
        raise IntegrationError(
            f"trajectory integration failed: {sol.message} "
            f"(kind={protocol.kind}, tau={protocol.tau}, with_control={with_control})"
        )
    return PhaseState(p=float(sol.y[0, -1]), q=float(sol.y[1, -1]))


def fundamental_matrix(
    protocol: FrequencyProtocol,
    with_control: bool = False,
    params: OscillatorParams = OscillatorParams(),
    tol: float = 1e-12,
) -> np.ndarray:
    """2x2 matrix Phi mapping (p, q) at t=0 to (p, q) at t=tau.

    Both flows are linear, so Phi characterizes the whole ramp.  Its
    determinant is 1 (both flows are divergence-free); this is checked and
    enforced as an accuracy gate.
    """

    def rhs(t, y):
        w = omega_at(protocol, t)
        mat = y.reshape(2, 2)
        out = np.empty_like(mat)
        out[0] = -params.m * w * w * mat[1]
        out[1] = mat[0] / params.m
        if with_control:
            g = omega_dot_at(protocol, t) / (2.0 * w)
            out[0] += g * mat[0]
            out[1] -= g * mat[1]
        return out.ravel()

    mw = params.m * protocol.omega_i
    y0 = np.eye(2).ravel()
    atol = (np.array([[1.0, mw], [1.0 / mw, 1.0]]) * tol).ravel()
    sol = solve_ivp(rhs, (0.0, protocol.tau), y0, method="DOP853", rtol=tol, atol=atol)
    if not sol.success:
        raise IntegrationError(f"fundamental-matrix integration failed: {sol.message}")
    phi = sol.y[:, -1].reshape(2, 2)
    det = phi[0, 0] * phi[1, 1] - phi[0, 1] * phi[1, 0]
    if abs(det - 1.0) > 1e-8:
        raise IntegrationError(
            f"fundamental matrix lost area preservation: det = {det!r}; "
            "tighten tol or inspect the protocol"
        )
    return phi


def sample_gibbs(
    spec: EnsembleSpec, omega: float, params: OscillatorParams = OscillatorParams()
) -> np.ndarray:
    """Draw canonical-ensemble phase points at frequency omega.

    Returns an (count, 2) array with columns (p, q).  In action-angle form
    the canonical density factorizes into I ~ Exp(mean 1/(beta*omega)) and
    theta ~ Uniform[0, 2*pi); the draw happens in those variables and is
    mapped back.  The generator is counter-based (Philox keyed by the
    seed), so a given (seed, count) always yields the same array regardless
    of platform or call history.
    """
    if omega <= 0.0:
        raise ValueError("omega must be positive")
    rng = np.random.Generator(np.random.Philox(key=spec.seed))
    action = rng.exponential(scale=1.0 / (spec.beta * omega), size=spec.count)
    theta = rng.uniform(0.0, _TWO_PI, size=spec.count)
    p = np.sqrt(2.0 * params.m * omega * action) * np.cos(theta)
    q = np.sqrt(2.0 * action / (params.m * omega)) * np.sin(theta)
    return np.column_stack([p, q])


def propagate_ensemble(
    states: np.ndarray,
    protocol: FrequencyProtocol,
    with_control: bool = False,
    params: OscillatorParams = OscillatorParams(),
    tol: float = 1e-12,
) -> np.ndarray:
    """Push an (n, 2) array of (p, q) points through the ramp.

    Equivalent to calling :func:`integrate` on every row, but exploits the
    linearity of the flow: one fundamental-matrix solve serves the whole
    ensemble.
    """
    states = np.asarray(states, dtype=float)
    if states.ndim != 2 or states.shape[1] != 2:
        raise ValueError("states must be an (n, 2) array of (p, q) rows")
    phi = fundamental_matrix(protocol, with_control, params, tol)
    return states @ phi.T


def trajectory_work(
    initial: PhaseState,
    final: PhaseState,
    protocol: FrequencyProtocol,
    params: OscillatorParams = OscillatorParams(),
) -> float:
    """Endpoint work H0(final at omega_f) - H0(initial at omega_i)."""
    e_in = oscillator_energy(initial.p, initial.q, protocol.omega_i, params)
    e_out = oscillator_energy(final.p, final.q, protocol.omega_f, params)
    return float(e_out - e_in)


def ensemble_work(
    initial: np.ndarray,
    final: np.ndarray,
    protocol: FrequencyProtocol,
    params: OscillatorParams = OscillatorParams(),
) -> np.ndarray:
    """Vectorized endpoint work for paired (n, 2) state arrays."""
    initial = np.asarray(initial, dtype=float)
    final = np.asarray(final, dtype=float)
    if initial.shape != final.shape:
        raise ValueError("initial and final ensembles must have matching shapes")
    e_in = oscillator_energy(initial[:, 0], initial[:, 1], protocol.omega_i, params)
    e_out = oscillator_energy(final[:, 0], final[:, 1], protocol.omega_f, params)
    return e_out - e_in
