import math

import numpy as np
import pytest

from staosc.protocols import (
    cosine_ramp,
    constant_protocol,
    omega_at,
    omega_dot_at,
    protocol_from_table,
    validate,
)

WI = 10.0
WF = 10.0 * math.sqrt(3.0)


def test_cosine_ramp_endpoints_exact():
    proto = cosine_ramp(WI, WF, 1e-4)
    assert omega_at(proto, 0.0) == pytest.approx(WI, abs=0.0)
    assert omega_at(proto, proto.tau) == pytest.approx(WF, rel=1e-15)


def test_cosine_ramp_midpoint_value():
    # omega(tau/2)^2 = omega_i^2 (a^2+1)/2 -> 10*sqrt(2) for a^2 = 3
    proto = cosine_ramp(WI, WF, 2.0)
    assert omega_at(proto, 1.0) == pytest.approx(10.0 * math.sqrt(2.0), rel=1e-14)


def test_cosine_ramp_endpoint_slopes_vanish():
    proto = cosine_ramp(WI, WF, 1e-4)
    tol = 1e-10 * WI / proto.tau
    assert abs(omega_dot_at(proto, 0.0)) <= tol
    assert abs(omega_dot_at(proto, proto.tau)) <= tol


def test_omega_dot_matches_finite_differences():
    proto = cosine_ramp(WI, WF, 0.37)
    ts = np.linspace(0.05, 0.32, 9)
    h = 1e-7
    for t in ts:
        fd = (omega_at(proto, t + h) - omega_at(proto, t - h)) / (2.0 * h)
        assert omega_dot_at(proto, t) == pytest.approx(fd, rel=1e-6)


def test_omega_monotone_increasing_for_upward_ramp():
    proto = cosine_ramp(WI, WF, 1.0)
    grid = np.linspace(0.0, 1.0, 500)
    w = omega_at(proto, grid)
    assert np.all(np.diff(w) >= 0.0)


def test_domain_error_outside_interval():
    proto = cosine_ramp(WI, WF, 1.0)
    with pytest.raises(ValueError):
        omega_at(proto, -0.1)
    with pytest.raises(ValueError):
        omega_at(proto, 1.1)
    with pytest.raises(ValueError):
        omega_dot_at(proto, 2.0)


def test_constant_protocol():
    proto = constant_protocol(WI, 5.0)
    grid = np.linspace(0.0, 5.0, 50)
    assert np.all(omega_at(proto, grid) == WI)
    assert np.all(omega_dot_at(proto, grid) == 0.0)
    assert validate(proto).passed


def test_invalid_parameters_rejected():
    with pytest.raises(ValueError):
        cosine_ramp(-1.0, WF, 1.0)
    with pytest.raises(ValueError):
        cosine_ramp(WI, WF, 0.0)
    with pytest.raises(ValueError):
        constant_protocol(0.0, 1.0)


def test_validation_passes_for_cosine_ramp():
    report = validate(cosine_ramp(WI, WF, 1e-4))
    assert report.passed
    assert not report.warnings


def test_validation_warns_on_decreasing_ramp():
    report = validate(cosine_ramp(WF, WI, 1e-4))
    assert report.passed  # warnings only
    assert any("monoton" in w for w in report.warnings)


def test_table_reproduces_cosine_ramp():
    src = cosine_ramp(WI, WF, 1.0)
    t = np.linspace(0.0, 1.0, 200)
    table = protocol_from_table(list(zip(t, omega_at(src, t))))
    assert validate(table).passed
    grid = np.linspace(0.0, 1.0, 1500)
    rel = np.abs(omega_at(table, grid) - omega_at(src, grid)) / omega_at(src, grid)
    # monotone cubic interpolation error at this sampling; a denser table
    # tightens it quadratically (see the 800-point case below)
    assert np.max(rel) < 1e-5

    t_dense = np.linspace(0.0, 1.0, 800)
    dense = protocol_from_table(list(zip(t_dense, omega_at(src, t_dense))))
    assert validate(dense).passed
    rel_dense = np.abs(omega_at(dense, grid) - omega_at(src, grid)) / omega_at(src, grid)
    assert np.max(rel_dense) < 1e-6


def test_table_with_sloped_start_fails_validation():
    t = np.linspace(0.0, 1.0, 120)
    w = WI + 0.5 * t + 1.5 * t**2
    report = validate(protocol_from_table(list(zip(t, w))))
    assert not report.passed
    assert any("omega_dot(0)" in e for e in report.errors)


def test_table_rejects_bad_data():
    with pytest.raises(ValueError):
        protocol_from_table([(0.0, 1.0), (1.0, 2.0)])  # too few points
    with pytest.raises(ValueError):
        protocol_from_table([(0.1, 1.0), (0.2, 1.1), (0.3, 1.2), (0.4, 1.3)])  # t0 != 0
    with pytest.raises(ValueError):
        protocol_from_table([(0.0, 1.0), (0.2, -1.1), (0.3, 1.2), (0.4, 1.3)])


def test_validation_catches_interior_zero_crossing():
    # dip through zero in the middle of the table
    t = np.linspace(0.0, 1.0, 41)
    w = 1.0 + 0.0 * t
    w[15:26] = np.linspace(1.0, -0.2, 11)[: 11]
    w[25:] = 1.0
    # table constructor itself refuses non-positive sample values
    with pytest.raises(ValueError):
        protocol_from_table(list(zip(t, w)))
