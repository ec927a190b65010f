import logging

import pytest

from circuit_model import FluxBias
from errors import DomainError, PoleError
from perturbation import (
    PoleGuard,
    corrected_coupling_g_cr,
    decouple,
    decoupled_frequencies,
    detunings,
    dispersive_shifts_chi,
    effective_coupling_g_d,
    high_excited_shift,
    resonator_effective_coupling,
    transformed_nonlinear_terms,
)


@pytest.fixture
def resonant_qubits(fig2_params):
    return fig2_params.with_qubit_frequencies(omega_x=4.56, omega_y=4.56).replace(g_xy=0.0)


def test_pole_guard():
    guard = PoleGuard()
    assert guard("far", 0.5) == 0.5
    assert not guard.near_pole
    guard("close", 0.005)
    assert guard.near == ["close"]
    with pytest.raises(PoleError) as info:
        guard("at", 1e-7)
    assert info.value.term == "at"


def test_detuning_signs(fig2_params):
    det = detunings(fig2_params)
    assert det.delta[("a", "x")] == pytest.approx(0.46)
    assert det.delta[("b", "y")] == pytest.approx(-0.08)
    assert det.sigma[("a", "x")] == pytest.approx(8.66)
    assert det.delta_xy == pytest.approx(0.56)


def test_g_d_without_resonator_couplings_is_direct(uncoupled):
    params = uncoupled.replace(g_xy=0.0025)
    g = effective_coupling_g_d(params)
    assert g.value == 0.0025
    assert g.induced == {"a": 0.0, "b": 0.0}


def test_g_d_induced_parts(resonant_qubits):
    g = effective_coupling_g_d(resonant_qubits)
    assert g.induced["a"] * 1e3 == pytest.approx(2.108, abs=2e-3)
    assert g.induced["b"] * 1e3 == pytest.approx(-1.499, abs=2e-3)
    assert g.value * 1e3 == pytest.approx(0.609, abs=2e-3)


def test_g_d_at_resonance_raises(fig2_params):
    with pytest.raises(PoleError):
        effective_coupling_g_d(fig2_params.with_qubit_frequencies(omega_y=4.10))


def test_g_d_near_resonance_is_flagged(fig2_params):
    g = effective_coupling_g_d(fig2_params.with_qubit_frequencies(omega_y=4.105))
    assert "Δ_ay" in g.near_pole


def test_decoupled_frequencies_shift_qubits_away(fig2_params):
    freqs = decoupled_frequencies(fig2_params)
    assert freqs.omega_d_y < 5.12
    assert freqs.omega_d_b > 5.20
    assert freqs.omega_d_a < 4.10


def test_high_excited_shift_of_y(fig2_params):
    _, dy = high_excited_shift(fig2_params)
    assert dy * 1e3 == pytest.approx(-27.6, abs=0.1)


def test_high_excited_shift_follows_anharmonicity(fig2_params):
    dx, dy = high_excited_shift(fig2_params)
    assert dx < 0 and dy < 0
    doubled = fig2_params.replace(alpha_y=2 * fig2_params.alpha_y)
    assert high_excited_shift(doubled)[1] == pytest.approx(2 * dy)
    harmonic = fig2_params.replace(alpha_x=0.0, alpha_y=0.0)
    assert high_excited_shift(harmonic) == (0.0, 0.0)


def test_vacuum_shift_keeps_anti_normal_terms_only(fig2_params):
    # Σ_λ 2 g_λβ² α_β / Σ_λβ² at ω_x = 4.56, ω_y = 5.12
    vacuum = transformed_nonlinear_terms(fig2_params).vacuum_shift()
    assert vacuum["x"] * 1e6 == pytest.approx(-8.08577, abs=1e-4)
    assert vacuum["y"] * 1e6 == pytest.approx(-7.99359, abs=1e-4)


def test_vacuum_shift_ignores_normal_ordered_terms(fig2_params):
    coefficients = transformed_nonlinear_terms(fig2_params)
    assert coefficients.cross_kerr_normal[("b", "y")] != 0.0
    dy = high_excited_shift(fig2_params)[1]
    assert abs(coefficients.vacuum_shift()["y"]) < abs(dy) / 100


def test_corrected_coupling_differs_from_g_d(fig2_params):
    g_d = effective_coupling_g_d(fig2_params).value
    g_cr = corrected_coupling_g_cr(fig2_params).value
    assert g_cr != g_d
    assert abs(g_cr - g_d) < abs(g_d)


def test_decouple_row(fig2_params):
    d = decouple(fig2_params, FluxBias(0.0, 0.2))
    assert d.omega_cr_x == pytest.approx(d.omega_d_x + d.delta_omega_x)
    assert d.g_d_ab == pytest.approx(resonator_effective_coupling(fig2_params, FluxBias(0.0, 0.2)))
    row = d.as_row()
    for key in ("g_d_mhz", "g_cr_mhz", "g_in_a_mhz", "g_in_b_mhz", "delta_omega_x_mhz", "omega_cr_y_ghz"):
        assert key in row
    assert row["g_d_mhz"] == pytest.approx(d.g_d_xy * 1e3)


def test_non_dispersive_pair_warns(fig2_params, caplog):
    with caplog.at_level(logging.WARNING):
        decouple(fig2_params.with_qubit_frequencies(omega_y=4.15))
    assert "not dispersive" in caplog.text


def test_dispersive_shift_of_ground_state(fig2_params):
    det = detunings(fig2_params)
    shift = dispersive_shifts_chi(fig2_params, FluxBias(), "a", "x", 0)
    assert shift.kappa == 0.0
    assert shift.chi == pytest.approx(-fig2_params.g_ax ** 2 / det.delta[("a", "x")])


def test_dispersive_shift_at_top_level(fig2_params):
    shift = dispersive_shifts_chi(fig2_params, FluxBias(), "b", "y", 2, n_levels=3)
    assert shift.chi == shift.kappa


def test_dispersive_shift_rejects_bad_input(fig2_params):
    with pytest.raises(DomainError):
        dispersive_shifts_chi(fig2_params, FluxBias(), "a", "x", -1)
    with pytest.raises(DomainError):
        dispersive_shifts_chi(fig2_params, FluxBias(), "c", "x", 0)
