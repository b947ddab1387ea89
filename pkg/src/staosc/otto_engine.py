"""Four-stroke Otto engine built from frequency ramps of one oscillator.

Cycle corners (cold bath beta_1, hot bath beta_2 < beta_1):

    A: thermal at (beta_1, omega_i)
    A -> B: isolated expansion stroke, omega_i -> omega_f   (work in: W1)
    B -> C: contact with the hot bath at omega_f            (heat in: Q2)
    C -> D: isolated compression stroke, omega_f -> omega_i (work in: W3)
    D -> A: contact with the cold bath at omega_i           (heat out: Q4)

Every isolated stroke multiplies the mean energy by Q* omega_to/omega_from
where Q* is the adiabaticity factor of the stroke (1 for quasistatic or
shortcut-controlled strokes, (omega_from^2+omega_to^2)/(2 omega_from
omega_to) for sudden jumps, and whatever the ramp actually does for bare
finite-time strokes).  Net output is W_net = -(W1 + W3) and efficiency
eta = W_net / Q2 whenever the cycle actually operates as an engine
(W_net > 0 and Q2 > 0); otherwise the result is flagged infeasible.

Shortcut strokes buy adiabatic energetics in arbitrarily short stroke
times, which is the whole point: at maximum power the shortcut engine
reaches the efficiency of the quasistatic cycle while cycling as fast as
the bath contacts allow.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .classical_analytics import basic_solutions
from .protocols import FrequencyProtocol
from .quantum_dynamics import (
    FockBasisConfig,
    adiabaticity_parameter,
    transition_matrix,
)

CLASSICAL = "classical"
QUANTUM = "quantum"

STA = "sta"
QUASISTATIC = "quasistatic"
SUDDEN = "sudden"
BARE = "bare"

_STROKE_KINDS = (STA, QUASISTATIC, SUDDEN, BARE)

_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class StrokeKind:
    """How an isolated stroke is driven; bare strokes carry their protocol."""

    kind: str
    protocol: FrequencyProtocol | None = None

    def __post_init__(self):
        if self.kind not in _STROKE_KINDS:
            raise ValueError(f"unknown stroke kind {self.kind!r}")
        if self.kind == BARE and self.protocol is None:
            raise ValueError("bare strokes need an explicit protocol")
        if self.kind != BARE and self.protocol is not None:
            raise ValueError(f"{self.kind} strokes must not carry a protocol")

    @classmethod
    def sta(cls) -> "StrokeKind":
        return cls(STA)

    @classmethod
    def quasistatic(cls) -> "StrokeKind":
        return cls(QUASISTATIC)

    @classmethod
    def sudden(cls) -> "StrokeKind":
        return cls(SUDDEN)

    @classmethod
    def bare(cls, protocol: FrequencyProtocol) -> "StrokeKind":
        return cls(BARE, protocol=protocol)

    def duration(self) -> float:
        """Stroke time: protocols report tau, limits report 0 or inf."""
        if self.kind == QUASISTATIC:
            return math.inf
        if self.kind == BARE:
            return self.protocol.tau
        return 0.0


@dataclass(frozen=True)
class OttoCycleSpec:
    """Full engine description; omega_f = None leaves it to the optimizer."""

    beta_1: float
    beta_2: float
    omega_i: float
    omega_f: float | None
    regime: str = CLASSICAL
    stroke_1: StrokeKind = field(default_factory=StrokeKind.sta)
    stroke_3: StrokeKind = field(default_factory=StrokeKind.sta)
    mass: float = 1.0
    hbar: float = 1.0
    relaxation_times: tuple[float, float] | None = None
    basis: FockBasisConfig | None = None

    def __post_init__(self):
        if self.regime not in (CLASSICAL, QUANTUM):
            raise ValueError(f"regime must be 'classical' or 'quantum', got {self.regime!r}")
        for name in ("beta_1", "beta_2", "omega_i", "mass", "hbar"):
            value = getattr(self, name)
            if not math.isfinite(value) or value <= 0.0:
                raise ValueError(f"{name} must be positive and finite")
        if self.beta_2 >= self.beta_1:
            raise ValueError(
                "the engine needs a hotter second bath: beta_2 < beta_1 "
                f"(got beta_1={self.beta_1!r}, beta_2={self.beta_2!r})"
            )
        if self.omega_f is not None and self.omega_f <= self.omega_i:
            raise ValueError("omega_f must exceed omega_i")


@dataclass(frozen=True)
class StrokeDurations:
    """Cycle timing metadata; relaxation times are user-supplied or nan."""

    stroke_1: float
    relax_2: float
    stroke_3: float
    relax_4: float

    @property
    def total(self) -> float:
        return self.stroke_1 + self.relax_2 + self.stroke_3 + self.relax_4


@dataclass(frozen=True)
class CycleResult:
    """Energy bookkeeping of one evaluated cycle."""

    energy_a: float
    energy_b: float
    energy_c: float
    energy_d: float
    work_in_1: float
    work_in_3: float
    heat_in_2: float
    heat_in_4: float
    w_net: float
    efficiency: float
    feasible: bool
    durations: StrokeDurations


def thermal_energy(beta: float, omega: float, regime: str, hbar: float = 1.0) -> float:
    """Mean energy of a thermal oscillator: 1/beta, or the coth law.

    The quantum value (hbar omega / 2) coth(beta hbar omega / 2) is
    evaluated through tanh, which neither overflows deep in the quantum
    regime nor loses the classical limit.
    """
    if beta <= 0.0 or omega <= 0.0 or hbar <= 0.0:
        raise ValueError("beta, omega, hbar must be positive")
    if regime == CLASSICAL:
        return 1.0 / beta
    if regime == QUANTUM:
        return 0.5 * hbar * omega / math.tanh(0.5 * beta * hbar * omega)
    raise ValueError(f"unknown regime {regime!r}")


def _bare_q_star_quantum(
    protocol: FrequencyProtocol, hbar: float, basis: FockBasisConfig | None
) -> float:
    """Q* of a bare stroke from its quantum transition matrix.

    Mean final level obeys <m + 1/2> = Q* (n + 1/2) for every initial
    level n, so the slope read off any row gives Q*; the first rows are
    averaged and checked for consistency.
    """
    cfg = basis or FockBasisConfig(dimension=256, omega_ref=protocol.omega_i, hbar=hbar)
    rows = min(4, cfg.dimension // 4)
    tm = transition_matrix(protocol, with_control=False, cfg=cfg, n_max=rows)
    m = np.arange(tm.m_max) + 0.5
    slopes = (tm.probs @ m) / (np.arange(rows) + 0.5)
    if np.max(slopes) - np.min(slopes) > 1e-4 * np.mean(slopes):
        raise RuntimeError(
            f"inconsistent Q* estimates across levels: {slopes!r}; "
            "increase the basis dimension"
        )
    return float(np.mean(slopes))


def stroke_energy_factor(
    stroke: StrokeKind,
    omega_from: float,
    omega_to: float,
    regime: str,
    hbar: float = 1.0,
    basis: FockBasisConfig | None = None,
) -> float:
    """Mean-energy multiplier of an isolated stroke, Q* omega_to/omega_from."""
    if omega_from <= 0.0 or omega_to <= 0.0:
        raise ValueError("frequencies must be positive")
    if stroke.kind in (STA, QUASISTATIC):
        q_star = 1.0
    elif stroke.kind == SUDDEN:
        q_star = (omega_from**2 + omega_to**2) / (2.0 * omega_from * omega_to)
    else:
        proto = stroke.protocol
        if (
            abs(proto.omega_i - omega_from) > 1e-9 * omega_from
            or abs(proto.omega_f - omega_to) > 1e-9 * omega_to
        ):
            raise ValueError(
                f"bare stroke protocol runs {proto.omega_i} -> {proto.omega_f}, "
                f"but the cycle needs {omega_from} -> {omega_to}"
            )
        if regime == CLASSICAL:
            q_star = adiabaticity_parameter(basic_solutions(proto), omega_from, omega_to)
        else:
            q_star = _bare_q_star_quantum(proto, hbar, basis)
    return q_star * (omega_to / omega_from)


def evaluate_cycle(spec: OttoCycleSpec) -> CycleResult:
    """Run the energy bookkeeping of one full cycle.

    Sign conventions: work_in_* is energy pushed *into* the oscillator by
    the drive, heat_in_* is energy absorbed *from* the bath.  Their sums
    close the first law exactly; W_net = -(work_in_1 + work_in_3).
    """
    if spec.omega_f is None:
        raise ValueError("omega_f is unset; call optimize_frequency instead")
    wi, wf = spec.omega_i, spec.omega_f
    e_a = thermal_energy(spec.beta_1, wi, spec.regime, spec.hbar)
    factor_1 = stroke_energy_factor(
        spec.stroke_1, wi, wf, spec.regime, spec.hbar, spec.basis
    )
    e_b = factor_1 * e_a
    e_c = thermal_energy(spec.beta_2, wf, spec.regime, spec.hbar)
    factor_3 = stroke_energy_factor(
        spec.stroke_3, wf, wi, spec.regime, spec.hbar, spec.basis
    )
    e_d = factor_3 * e_c

    work_in_1 = e_b - e_a
    heat_in_2 = e_c - e_b
    work_in_3 = e_d - e_c
    heat_in_4 = e_a - e_d
    w_net = -(work_in_1 + work_in_3)
    feasible = w_net > 0.0 and heat_in_2 > 0.0
    efficiency = w_net / heat_in_2 if feasible else math.nan

    relax = spec.relaxation_times or (math.nan, math.nan)
    durations = StrokeDurations(
        stroke_1=spec.stroke_1.duration(),
        relax_2=relax[0],
        stroke_3=spec.stroke_3.duration(),
        relax_4=relax[1],
    )
    return CycleResult(
        energy_a=e_a,
        energy_b=e_b,
        energy_c=e_c,
        energy_d=e_d,
        work_in_1=work_in_1,
        work_in_3=work_in_3,
        heat_in_2=heat_in_2,
        heat_in_4=heat_in_4,
        w_net=w_net,
        efficiency=efficiency,
        feasible=feasible,
        durations=durations,
    )


@dataclass(frozen=True)
class OptimizationResult:
    """Frequency chosen for maximum net work, plus the cycle it produces."""

    omega_f: float
    cycle: CycleResult
    at_boundary: bool


def optimize_frequency(
    spec: OttoCycleSpec,
    bracket: tuple[float, float] | None = None,
    tol: float = 1e-8,
) -> OptimizationResult:
    """Golden-section maximization of W_net over omega_f.

    The default bracket spans (1 + 1e-6) omega_i up to a multiple of the
    classical maximum-power optimum sqrt(beta_1/beta_2) omega_i, which
    contains the interior maximum for every stroke combination used here.
    A result within a few tolerances of either edge is flagged
    at_boundary — the caller asked for a maximum the bracket does not
    contain.
    """
    if bracket is None:
        ratio = spec.beta_1 / spec.beta_2
        hi = spec.omega_i * max(10.0, 3.0 * math.sqrt(ratio))
        bracket = (spec.omega_i * (1.0 + 1e-6), hi)
    lo, hi = bracket
    if not (spec.omega_i < lo < hi):
        raise ValueError(f"bracket {bracket!r} must satisfy omega_i < lo < hi")

    def w_net(omega_f: float) -> float:
        return evaluate_cycle(replace(spec, omega_f=omega_f)).w_net

    # golden-section: iteration count fixed by the bracket and tolerance
    span = hi - lo
    steps = max(1, math.ceil(math.log(tol * spec.omega_i / span) / math.log(_GOLDEN)))
    a, b = lo, hi
    c = b - _GOLDEN * (b - a)
    d = a + _GOLDEN * (b - a)
    fc, fd = w_net(c), w_net(d)
    for _ in range(steps):
        if fc > fd:
            b, d, fd = d, c, fc
            c = b - _GOLDEN * (b - a)
            fc = w_net(c)
        else:
            a, c, fc = c, d, fd
            d = a + _GOLDEN * (b - a)
            fd = w_net(d)
    omega_star = 0.5 * (a + b)
    cycle = evaluate_cycle(replace(spec, omega_f=omega_star))
    edge = 10.0 * max(tol * spec.omega_i, 1e-12 * span)
    at_boundary = (omega_star - lo) < edge or (hi - omega_star) < edge
    return OptimizationResult(omega_f=omega_star, cycle=cycle, at_boundary=at_boundary)


def eta_adiabatic_max_power(beta_ratio: float) -> float:
    """Classical maximum-power efficiency with adiabatic-energetics strokes.

    1 - sqrt(beta_2/beta_1), with beta_ratio = beta_1/beta_2 > 1 (the
    Curzon-Ahlborn value for this cycle).
    """
    if beta_ratio <= 1.0:
        raise ValueError("beta_ratio = beta_1/beta_2 must exceed 1")
    return 1.0 - math.sqrt(1.0 / beta_ratio)


def eta_sudden_max_power(beta_ratio: float) -> float:
    """Classical maximum-power efficiency with sudden jumps: (1-s)/(2+s)."""
    if beta_ratio <= 1.0:
        raise ValueError("beta_ratio = beta_1/beta_2 must exceed 1")
    s = math.sqrt(1.0 / beta_ratio)
    return (1.0 - s) / (2.0 + s)


@dataclass(frozen=True)
class EfficiencyTable:
    """Maximum-power efficiencies on a grid of bath-temperature ratios."""

    beta_ratios: np.ndarray
    efficiencies: dict


def efficiency_curves(
    regime: str,
    beta_1: float,
    beta_ratios,
    stroke_kinds: tuple[str, ...] = (STA, SUDDEN),
    omega_i: float = 10.0,
    hbar: float = 1.0,
) -> EfficiencyTable:
    """Efficiency at maximum power versus beta_1/beta_2.

    Classical curves come straight from the closed forms; quantum points
    run the optimizer cycle by cycle.  Stroke kinds apply to both strokes
    of the cycle.
    """
    ratios = np.asarray(beta_ratios, dtype=float)
    if np.any(ratios <= 1.0):
        raise ValueError("every beta_1/beta_2 ratio must exceed 1")
    table: dict[str, np.ndarray] = {}
    for kind in stroke_kinds:
        values = np.empty_like(ratios)
        for i, r in enumerate(ratios):
            if regime == CLASSICAL:
                values[i] = (
                    eta_adiabatic_max_power(r)
                    if kind in (STA, QUASISTATIC)
                    else eta_sudden_max_power(r)
                )
            else:
                spec = OttoCycleSpec(
                    beta_1=beta_1,
                    beta_2=beta_1 / r,
                    omega_i=omega_i,
                    omega_f=None,
                    regime=QUANTUM,
                    stroke_1=StrokeKind(kind),
                    stroke_3=StrokeKind(kind),
                    hbar=hbar,
                )
                result = optimize_frequency(spec)
                values[i] = result.cycle.efficiency
        table[kind] = values
    return EfficiencyTable(beta_ratios=ratios, efficiencies=table)
