"""Reflection coefficient, operating point, and Stark-shift solver."""
import math

import numpy as np
import pytest

from cavityqft.cavity import (
    CavityParams,
    DegenerateCooperativity,
    OperatingPoint,
    OutOfRangeError,
    ZeemanConfig,
    controlled_phase,
    cooperativity,
    default_operating_point,
    high_cooperativity_phase,
    phase_curve,
    quantum_dot_params,
    reflection,
    solve_stark_shift,
    zeeman_splitting,
)


@pytest.fixture(scope="module")
def qd():
    return quantum_dot_params()


@pytest.fixture(scope="module")
def op_defaults(qd):
    return default_operating_point(qd)


def test_quantum_dot_cooperativity(qd):
    assert cooperativity(qd) == pytest.approx(4 * 11.0**2 / (28.0 * 0.3))
    assert qd.cooperativity == cooperativity(qd)


def test_params_validation():
    with pytest.raises(ValueError):
        CavityParams(g=1.0, kappa=0.0, gamma=1.0)
    with pytest.raises(ValueError):
        CavityParams(g=1.0, kappa=1.0, gamma=-2.0)


def test_reflection_magnitude_bounded(qd):
    for delta in np.linspace(-200.0, 200.0, 101):
        assert abs(reflection(qd, float(delta))) <= 1.0 + 1e-12


def test_reflection_far_detuned_is_bare_mirror(qd):
    # far off resonance the atom decouples and the bare cavity reflects with a sign flip
    assert reflection(qd, 1e9) == pytest.approx(-1.0, abs=1e-6)


def test_reflection_on_resonance(qd):
    C = cooperativity(qd)
    assert reflection(qd, 0.0) == pytest.approx((C - 1) / (C + 1))


def test_high_cooperativity_phase_matches_arg(qd):
    # the large-C closed form tracks arg(r) with zero offset
    for delta in (0.0, 2.0, 8.64, -5.0, 40.0):
        exact = math.atan2(reflection(qd, delta).imag, reflection(qd, delta).real)
        assert high_cooperativity_phase(qd, delta) == pytest.approx(exact, abs=2e-3)


def test_default_operating_point_value(qd):
    delta_0, delta_Z = default_operating_point(qd)
    C = cooperativity(qd)
    assert delta_0 == pytest.approx(0.5 * 0.3 * math.sqrt(C**2 - 1))
    assert delta_Z == pytest.approx(-2.0 * delta_0)
    assert delta_0 == pytest.approx(8.64, abs=0.01)


def test_default_operating_point_degenerate():
    weak = CavityParams(g=0.1, kappa=0.3, gamma=28.0)
    assert cooperativity(weak) < 1.0
    with pytest.raises(DegenerateCooperativity):
        default_operating_point(weak)


def test_controlled_phase_pi_at_zero_stark(qd, op_defaults):
    delta_0, delta_Z = op_defaults
    res = controlled_phase(qd, OperatingPoint(delta_0, delta_Z, 0.0))
    assert res.delta_theta == pytest.approx(math.pi, abs=1e-9)
    # the two spin reflections sit at conjugate detunings with unit |r|
    assert abs(res.r_up) == pytest.approx(abs(res.r_down), abs=1e-12)


def test_delta_theta_monotone_decreasing(qd, op_defaults):
    delta_0, delta_Z = op_defaults
    values = [
        controlled_phase(qd, OperatingPoint(delta_0, delta_Z, s)).delta_theta
        for s in np.geomspace(0.5, 800.0, 40)
    ]
    assert all(a > b for a, b in zip(values, values[1:]))


def test_delta_theta_in_principal_range(qd, op_defaults):
    delta_0, delta_Z = op_defaults
    for s in (0.0, 1.0, 10.0, 100.0):
        dt = controlled_phase(qd, OperatingPoint(delta_0, delta_Z, s)).delta_theta
        assert 0.0 <= dt < 2 * math.pi


def test_zeeman_splitting_matches_field():
    cfg = ZeemanConfig(g_e=0.43, g_h=0.21, B=1.93)
    assert zeeman_splitting(cfg) == pytest.approx((0.43 + 0.21) * 13.996 * 1.93)


def test_zeeman_matches_twice_offset(qd, op_defaults):
    delta_0, _ = op_defaults
    split = zeeman_splitting(ZeemanConfig(0.43, 0.21, 1.93))
    assert split == pytest.approx(2 * delta_0, rel=5e-3)


def test_solve_stark_shift_k1_is_zero(qd, op_defaults):
    delta_0, delta_Z = op_defaults
    assert solve_stark_shift(qd, delta_0, delta_Z, 1, 1000.0) == 0.0


def test_solve_stark_shift_hits_target(qd, op_defaults):
    delta_0, delta_Z = op_defaults
    for k in range(2, 11):
        s = solve_stark_shift(qd, delta_0, delta_Z, k, 1000.0)
        dt = controlled_phase(qd, OperatingPoint(delta_0, delta_Z, s)).delta_theta
        assert dt == pytest.approx(2 * math.pi / 2**k, abs=1e-8)


def test_solve_stark_shift_out_of_range(qd, op_defaults):
    delta_0, delta_Z = op_defaults
    with pytest.raises(OutOfRangeError):
        solve_stark_shift(qd, delta_0, delta_Z, 15, 1000.0)


def test_solve_stark_shift_asymptotic_scaling(qd, op_defaults):
    delta_0, delta_Z = op_defaults
    C = cooperativity(qd)
    for k in (8, 10, 12, 14):
        s = solve_stark_shift(qd, delta_0, delta_Z, k, 1000.0)
        predicted = 0.3 * C * math.sqrt(2**k / (2 * math.pi))
        assert s == pytest.approx(predicted, rel=0.1)


def test_phase_curve_rows(qd, op_defaults):
    delta_0, delta_Z = op_defaults
    rows = phase_curve(qd, delta_0, delta_Z, [0.0, 10.0])
    assert len(rows) == 2
    assert rows[0][0] == 0.0
    assert rows[0][1] == pytest.approx(math.pi, abs=1e-9)
    assert all(0.0 < r[2] <= 1.0 and 0.0 < r[3] <= 1.0 for r in rows)
