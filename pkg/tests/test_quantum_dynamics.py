import math

import numpy as np
import pytest

from staosc.classical_analytics import basic_solutions, quadratic_form, moments_from_form
from staosc.errors import TruncationLeakageError
from staosc.protocols import constant_protocol, cosine_ramp, omega_at, omega_dot_at
from staosc.quantum_dynamics import (
    FockBasisConfig,
    QuantumState,
    QuantumWorkAtoms,
    adiabaticity_parameter,
    delta_f_quantum,
    eigenbasis,
    h0_matrix,
    hc_matrix,
    pdf_quantum_adiabatic,
    propagate,
    quantum_work_atoms,
    transition_matrix,
)

WI = 10.0
WF = 10.0 * math.sqrt(3.0)
BETA = 0.2
FAST = cosine_ramp(WI, WF, 1e-4)
SMALL = FockBasisConfig(dimension=128, omega_ref=WI)


def _ladder(n: int) -> np.ndarray:
    a = np.zeros((n, n))
    for k in range(1, n):
        a[k - 1, k] = math.sqrt(k)
    return a


# ---------------------------------------------------------------------------
# matrix construction
# ---------------------------------------------------------------------------

def test_h0_matrix_against_ladder_construction():
    n, omega, wref, hbar = 24, 13.0, WI, 1.0
    cfg = FockBasisConfig(dimension=n, omega_ref=wref, hbar=hbar)
    a = _ladder(n)
    # q = sqrt(hbar/(2 m wref)) (a + a+), p = i sqrt(hbar m wref / 2) (a+ - a)
    q = math.sqrt(hbar / (2.0 * wref)) * (a + a.T)
    p = 1j * math.sqrt(hbar * wref / 2.0) * (a.T - a)
    h_ref = (p @ p).real / 2.0 + 0.5 * omega**2 * (q @ q)
    h_ours = h0_matrix(omega, cfg)
    # truncation corrupts only the final ladder entries of the product
    inner = slice(0, n - 2)
    assert np.allclose(h_ours[inner, inner], h_ref[inner, inner], atol=1e-10)


def test_h0_diagonal_and_codiagonal_values():
    cfg = FockBasisConfig(dimension=16, omega_ref=WI)
    omega = 17.0
    h = h0_matrix(omega, cfg)
    for n in range(16):
        assert h[n, n] == pytest.approx(
            0.25 * (WI + omega**2 / WI) * (2 * n + 1), rel=1e-14
        )
    for n in range(14):
        assert h[n, n + 2] == pytest.approx(
            0.25 * (omega**2 / WI - WI) * math.sqrt((n + 1) * (n + 2)), rel=1e-14
        )
    assert np.allclose(h, h.conj().T)


def test_hc_matrix_against_ladder_construction():
    n = 24
    cfg = FockBasisConfig(dimension=n, omega_ref=WI)
    proto = cosine_ramp(WI, WF, 0.5)
    t = 0.2
    a = _ladder(n)
    q = math.sqrt(1.0 / (2.0 * WI)) * (a + a.T)
    p = 1j * math.sqrt(WI / 2.0) * (a.T - a)
    rate = omega_dot_at(proto, t) / omega_at(proto, t)
    h_ref = -(rate / 4.0) * (q @ p + p @ q)
    h_ours = hc_matrix(proto, t, cfg)
    inner = slice(0, n - 2)
    assert np.allclose(h_ours[inner, inner], h_ref[inner, inner], atol=1e-12)
    assert np.allclose(h_ours, h_ours.conj().T)


def test_hc_vanishes_at_endpoints():
    proto = cosine_ramp(WI, WF, 0.5)
    cfg = FockBasisConfig(dimension=16, omega_ref=WI)
    # omega_dot vanishes at both ends; floating sin(pi) leaves ~1e-16 dust
    scale = abs(omega_dot_at(proto, proto.tau / 2.0))
    assert np.max(np.abs(hc_matrix(proto, 0.0, cfg))) <= 1e-12 * scale
    assert np.max(np.abs(hc_matrix(proto, proto.tau, cfg))) <= 1e-12 * scale


def test_hc_offdiagonal_magnitude():
    # |<n+2|Hc|n>| = (hbar |omega_dot| / 4 omega) sqrt((n+1)(n+2))
    proto = cosine_ramp(WI, WF, 0.5)
    t = proto.tau / 2.0
    cfg = FockBasisConfig(dimension=16, omega_ref=WI)
    h = hc_matrix(proto, t, cfg)
    scale = abs(omega_dot_at(proto, t)) / (4.0 * omega_at(proto, t))
    for n in range(14):
        assert abs(h[n, n + 2]) == pytest.approx(
            scale * math.sqrt((n + 1) * (n + 2)), rel=1e-12
        )
    assert np.all(np.abs(np.diag(h)) == 0.0)


def test_eigenbasis_recovers_harmonic_spectrum():
    cfg = FockBasisConfig(dimension=200, omega_ref=WI)
    omega = 14.0
    energies, _ = eigenbasis(omega, cfg)
    expected = omega * (np.arange(40) + 0.5)
    assert np.allclose(energies[:40], expected, rtol=1e-8)


def test_eigenbasis_at_reference_frequency_is_fock():
    cfg = FockBasisConfig(dimension=64, omega_ref=WI)
    energies, vecs = eigenbasis(WI, cfg)
    assert np.allclose(energies, WI * (np.arange(64) + 0.5), rtol=1e-12)
    overlap = np.abs(vecs) ** 2
    assert np.allclose(overlap, np.eye(64), atol=1e-12)


# ---------------------------------------------------------------------------
# propagation
# ---------------------------------------------------------------------------

def test_stationary_state_under_constant_frequency():
    cfg = FockBasisConfig(dimension=64, omega_ref=WI)
    psi0 = np.zeros(64, dtype=complex)
    psi0[3] = 1.0
    proto = constant_protocol(WI, 0.37)
    final = propagate(QuantumState(psi0), proto, cfg=cfg, tol=1e-12)
    probs = np.abs(final.amplitudes) ** 2
    assert probs[3] == pytest.approx(1.0, abs=1e-10)
    # the acquired phase is exp(-i E_3 tau)
    expected_phase = np.exp(-1j * WI * 3.5 * 0.37)
    assert final.amplitudes[3] == pytest.approx(expected_phase, abs=1e-8)


def test_controlled_drive_keeps_ground_state():
    cfg = FockBasisConfig(dimension=256, omega_ref=WI)
    energies, vecs = eigenbasis(WI, cfg)
    proto = cosine_ramp(WI, WF, 1e-3 * 2.0 * math.pi / WI)
    final = propagate(QuantumState(vecs[:, 0].astype(complex)), proto,
                      with_control=True, cfg=cfg)
    _, vecs_f = eigenbasis(WF, cfg)
    overlap = abs(np.vdot(vecs_f[:, 0], final.amplitudes)) ** 2
    assert overlap == pytest.approx(1.0, abs=1e-6)


def test_bare_fast_ramp_ground_state_survival():
    # |<0_f|U|0_i>|^2 = 2 sqrt(wi wf) / (wi + wf) for an ideal jump
    cfg = FockBasisConfig(dimension=256, omega_ref=WI)
    _, vecs = eigenbasis(WI, cfg)
    final = propagate(QuantumState(vecs[:, 0].astype(complex)), FAST, cfg=cfg)
    _, vecs_f = eigenbasis(WF, cfg)
    p00 = abs(np.vdot(vecs_f[:, 0], final.amplitudes)) ** 2
    expected = 2.0 * math.sqrt(WI * WF) / (WI + WF)
    assert expected == pytest.approx(0.9634330440022851, rel=1e-12)
    assert p00 == pytest.approx(expected, abs=1e-6)


def test_propagation_preserves_norm():
    cfg = SMALL
    rng = np.random.default_rng(5)
    psi = rng.normal(size=64) + 1j * rng.normal(size=64)
    amp = np.zeros(128, dtype=complex)
    amp[:64] = psi / np.linalg.norm(psi)
    final = propagate(QuantumState(amp), cosine_ramp(WI, WF, 0.02), cfg=cfg)
    assert np.linalg.norm(final.amplitudes) == pytest.approx(1.0, abs=1e-9)


def test_leaky_state_rejected():
    amp = np.zeros(16, dtype=complex)
    amp[-1] = 1.0
    with pytest.raises(TruncationLeakageError):
        QuantumState(amp)


def test_quantum_state_requires_normalization():
    amp = np.zeros(16, dtype=complex)
    amp[0] = 0.7
    with pytest.raises(ValueError):
        QuantumState(amp)


# ---------------------------------------------------------------------------
# transition matrix
# ---------------------------------------------------------------------------

def test_transition_matrix_rows_sum_to_one():
    tm = transition_matrix(FAST, n_max=16, cfg=FockBasisConfig(dimension=256, omega_ref=WI))
    sums = tm.row_sums()
    assert sums.shape == (16,)
    assert np.all(sums >= 1.0 - 1e-6)
    assert np.all(sums <= 1.0 + 1e-9)


def test_transition_matrix_control_is_identity():
    tm = transition_matrix(
        FAST, with_control=True, n_max=12,
        cfg=FockBasisConfig(dimension=256, omega_ref=WI),
    )
    eye = np.zeros((tm.n_max, tm.m_max))
    eye[:, : tm.n_max] = np.eye(tm.n_max)[:, : tm.m_max]
    assert np.allclose(tm.probs, eye[:, : tm.m_max], atol=1e-6)


def test_transition_matrix_parity_selection():
    tm = transition_matrix(FAST, n_max=8, cfg=FockBasisConfig(dimension=256, omega_ref=WI))
    for n in range(tm.n_max):
        for m in range(tm.m_max):
            if (n + m) % 2 == 1:
                assert tm.probs[n, m] < 1e-12


def test_transition_matrix_ideal_jump_values():
    # analytic ideal-jump ground row: P(0 -> 2m) with lambda = (wf-wi)/(wf+wi)
    tm = transition_matrix(FAST, n_max=4, cfg=FockBasisConfig(dimension=256, omega_ref=WI))
    lam = (WF - WI) / (WF + WI)
    p00 = 2.0 * math.sqrt(WI * WF) / (WI + WF)
    # P(0->2m) = p00 * lam^(2m) * (2m-1)!! / (2m)!!
    expected = [p00, p00 * lam**2 / 2.0, p00 * lam**4 * 3.0 / 8.0]
    for m, val in enumerate(expected):
        assert tm.probs[0, 2 * m] == pytest.approx(val, abs=2e-6)


def test_transition_matrix_detailed_balance_symmetry():
    # microreversibility of the quadratic Hamiltonian: P(n->m) weights satisfy
    # the same ladder structure transposed; check P(0->2) vs P(2->0) ratio
    tm = transition_matrix(FAST, n_max=8, cfg=FockBasisConfig(dimension=256, omega_ref=WI))
    # for the ideal jump the matrix is symmetric in (n, m) up to the measure
    assert tm.probs[0, 2] == pytest.approx(tm.probs[2, 0], rel=5e-4)


def test_transition_matrix_convergence_in_basis_size():
    cfg_a = FockBasisConfig(dimension=256, omega_ref=WI)
    cfg_b = FockBasisConfig(dimension=512, omega_ref=WI)
    tm_a = transition_matrix(FAST, n_max=12, cfg=cfg_a)
    tm_b = transition_matrix(FAST, n_max=12, cfg=cfg_b)
    m = min(tm_a.m_max, tm_b.m_max, 21)
    assert np.allclose(tm_a.probs[:, :m], tm_b.probs[:, :m], atol=1e-8)


def test_transition_matrix_nmax_guard():
    with pytest.raises(ValueError):
        transition_matrix(FAST, n_max=80, cfg=FockBasisConfig(dimension=128, omega_ref=WI))


# ---------------------------------------------------------------------------
# work atoms
# ---------------------------------------------------------------------------

def test_work_atoms_controlled_drive_adiabatic_spectrum():
    tm = transition_matrix(
        FAST, with_control=True, n_max=24,
        cfg=FockBasisConfig(dimension=512, omega_ref=WI),
    )
    atoms = quantum_work_atoms(tm, BETA)
    # off-diagonal dust from the integrator carries < 1e-12 total weight
    assert atoms.negative_probability() <= 1e-12
    # the dominant atom is the ground-to-ground gap
    top = int(np.argmax(atoms.probs))
    assert atoms.works[top] == pytest.approx(0.5 * (WF - WI), rel=1e-9)
    # mean matches the adiabatic-invariant prediction <W> = (wf-wi)<n+1/2>
    occ = 0.5 / math.tanh(0.5 * BETA * WI)
    assert atoms.mean() == pytest.approx((WF - WI) * occ, rel=1e-6)


def test_work_atoms_weights_are_geometric():
    tm = transition_matrix(
        FAST, with_control=True, n_max=24,
        cfg=FockBasisConfig(dimension=512, omega_ref=WI),
    )
    atoms = quantum_work_atoms(tm, BETA)
    x = math.exp(-BETA * WI)
    weights = (1 - x) * x ** np.arange(24)
    weights /= weights.sum()  # truncated-geometric renormalization
    expected_works = 0.5 * (WF - WI) + (WF - WI) * np.arange(24)
    # locate each expected atom among the (dust-padded) set by position
    for w_exp, p_exp in zip(expected_works[:12], weights[:12]):
        idx = int(np.argmin(np.abs(atoms.works - w_exp)))
        assert atoms.works[idx] == pytest.approx(w_exp, rel=1e-9)
        assert atoms.probs[idx] == pytest.approx(p_exp, abs=1e-9)


def test_work_atoms_jarzynski_exact():
    for with_control in (False, True):
        tm = transition_matrix(
            FAST, with_control=with_control, n_max=24,
            cfg=FockBasisConfig(dimension=512, omega_ref=WI),
        )
        atoms = quantum_work_atoms(tm, BETA)
        estimate = float(np.sum(atoms.probs * np.exp(-BETA * atoms.works)))
        estimate += atoms.gibbs_tail
        target = math.exp(-BETA * delta_f_quantum(BETA, WI, WF))
        assert target == pytest.approx(0.4292727403497249, rel=1e-10)
        assert estimate == pytest.approx(target, abs=1e-6)


def test_work_atoms_bare_statistics():
    tm = transition_matrix(
        FAST, n_max=64, cfg=FockBasisConfig(dimension=512, omega_ref=WI)
    )
    atoms = quantum_work_atoms(tm, BETA)
    assert atoms.std() == pytest.approx(9.284555547754996, rel=1e-4)
    assert atoms.negative_probability() == pytest.approx(8.05e-4, rel=0.05)


def test_work_atoms_validation():
    with pytest.raises(ValueError):
        QuantumWorkAtoms(works=np.array([1.0, 0.5]), probs=np.array([0.5, 0.5]))
    with pytest.raises(ValueError):
        QuantumWorkAtoms(works=np.array([0.5, 1.0]), probs=np.array([0.6, 0.6]))


# ---------------------------------------------------------------------------
# closed forms
# ---------------------------------------------------------------------------

def test_delta_f_quantum_value_and_classical_limit():
    df = delta_f_quantum(BETA, WI, WF)
    # direct evaluation from partition functions
    z = lambda w: math.exp(-BETA * w / 2.0) / (1.0 - math.exp(-BETA * w))
    expected = -math.log(z(WF) / z(WI)) / BETA
    assert df == pytest.approx(expected, rel=1e-12)
    # small-beta limit approaches ln(wf/wi)/beta
    beta_small = 1e-4
    classical = math.log(WF / WI) / beta_small
    assert delta_f_quantum(beta_small, WI, WF) == pytest.approx(classical, rel=1e-3)


def test_delta_f_quantum_deep_quantum_limit():
    # large beta: delta F -> hbar (wf - wi)/2 (ground-state energies)
    beta = 50.0
    assert delta_f_quantum(beta, WI, WF) == pytest.approx(0.5 * (WF - WI), rel=1e-6)


def test_pdf_quantum_adiabatic_matches_atoms():
    atoms = pdf_quantum_adiabatic(BETA, WI, WF, n_max=64)
    x = math.exp(-BETA * WI)
    assert atoms.works[0] == pytest.approx(0.5 * (WF - WI), rel=1e-14)
    assert atoms.probs[0] == pytest.approx(1.0 - x, abs=1e-10)
    assert atoms.works[1] - atoms.works[0] == pytest.approx(WF - WI, rel=1e-12)
    jarz = float(np.sum(atoms.probs * np.exp(-BETA * atoms.works))) + atoms.gibbs_tail
    assert jarz == pytest.approx(0.4292727403497249, abs=1e-9)


def test_pdf_quantum_adiabatic_tail_guard():
    with pytest.raises(ValueError):
        pdf_quantum_adiabatic(0.01, WI, WF, n_max=8)  # truncation too small


def test_adiabaticity_parameter_limits():
    slow = basic_solutions(cosine_ramp(WI, WF, 60.0))
    assert adiabaticity_parameter(slow, WI, WF) == pytest.approx(1.0, abs=1e-3)
    fast = basic_solutions(FAST)
    sudden = (WI**2 + WF**2) / (2.0 * WI * WF)
    assert sudden == pytest.approx(1.1547005383792515, rel=1e-12)
    assert adiabaticity_parameter(fast, WI, WF) == pytest.approx(sudden, rel=1e-5)
    # >= 1 up to integrator noise
    assert adiabaticity_parameter(slow, WI, WF) >= 1.0 - 1e-8


def test_adiabaticity_parameter_sudden_substitution_exact():
    from staosc.classical_analytics import BasicSolutions

    basic = BasicSolutions(C_tau=1.0, Cdot_tau=0.0, S_tau=0.0, Sdot_tau=1.0)
    assert adiabaticity_parameter(basic, WI, WF) == pytest.approx(
        (WI**2 + WF**2) / (2.0 * WI * WF), rel=1e-14
    )


def test_quantum_classical_mean_work_correspondence():
    # high-temperature quantum mean work approaches the classical formula
    hbar = 0.1
    cfg = FockBasisConfig(dimension=512, omega_ref=WI, hbar=hbar)
    tm = transition_matrix(FAST, n_max=128, cfg=cfg, tol=1e-9)
    atoms = quantum_work_atoms(tm, BETA)
    form = quadratic_form(basic_solutions(FAST), BETA, WI, WF)
    mean_cl, std_cl = moments_from_form(form)
    assert atoms.mean() == pytest.approx(mean_cl, rel=0.01)
    assert atoms.std() == pytest.approx(std_cl, rel=0.01)
