import math

import numpy as np
import pytest

from circuit_model import ZERO_BIAS
from errors import DomainError, PoleError
from spectrum import solve, zz_numeric
from zz_analytic import (
    pole_catalog,
    zz_cross_kerr_excited,
    zz_cross_kerr_ground,
    zz_fourth_self,
    zz_second_order,
    zz_third_order,
    zz_total,
    zz_two_resonator,
)


def _at(params, omega_x, omega_y, g_xy=0.0005):
    return params.with_qubit_frequencies(omega_x=omega_x, omega_y=omega_y).replace(g_xy=g_xy)


def test_second_order_value(fig2_params):
    params = _at(fig2_params, 4.52, 5.0, g_xy=0.010)
    assert zz_second_order(params) * 1e3 == pytest.approx(-0.3964, rel=1e-3)


def test_all_terms_vanish_without_couplings(uncoupled):
    zz = zz_total(uncoupled, include_cross_kerr=True)
    for value in zz.as_row().values():
        assert value == 0.0 or value is False


def test_terms_linear_in_g_xy_vanish_without_it(fig2_params):
    params = _at(fig2_params, 4.52, 4.9, g_xy=0.0)
    zz = zz_total(params)
    assert zz.xi2 == 0.0
    assert zz.xi3 == 0.0
    assert zz.xi4s != 0.0


@pytest.mark.parametrize("form", ["literal", "symmetrized", "rayleigh_schrodinger"])
def test_third_order_follows_resonator_swap(fig2_params, form):
    params = _at(fig2_params, 4.52, 4.9)
    swapped = params.swapped_resonators()
    assert zz_third_order(swapped, resonator="a", form=form) == pytest.approx(
        zz_third_order(params, resonator="b", form=form), rel=1e-12)


def test_zz_forms_differ(fig2_params):
    params = _at(fig2_params, 4.52, 4.9)
    literal = zz_third_order(params, form="literal")
    assert zz_third_order(params, form="symmetrized") != pytest.approx(literal)


def test_unknown_zz_form(fig2_params):
    with pytest.raises(DomainError):
        zz_third_order(fig2_params, form="fifth")


def test_cross_kerr_scales_with_fourth_power(fig2_params):
    params = _at(fig2_params, 4.52, 4.9)
    half = params.scaled_couplings(0.5)
    for term in (zz_cross_kerr_ground, zz_cross_kerr_excited):
        assert term(half) == pytest.approx(term(params) / 16, rel=1e-12)


def test_pole_catalog_locations(fig2_params):
    poles = pole_catalog(fig2_params, omega_x=4.52, omega_y_range=(4.2, 5.0))
    assert [p.omega_y for p in poles] == pytest.approx([4.295, 4.345, 4.52, 4.715, 4.7475])
    without = pole_catalog(fig2_params, omega_x=4.52, omega_y_range=(4.2, 5.0), include_cross_kerr=False)
    assert [p.omega_y for p in without] == pytest.approx([4.345, 4.52, 4.715])
    assert all(p.mechanism for p in poles)


def test_total_at_a_pole_is_flagged(fig2_params):
    zz = zz_total(_at(fig2_params, 4.52, 4.715))
    assert math.isnan(zz.xi2)
    assert math.isnan(zz.xi_total)
    assert "xi2" in zz.at_pole
    assert zz.unreliable
    assert zz.as_row()["near_pole"]


def test_total_near_a_pole_is_flagged_but_finite(fig2_params):
    zz = zz_total(_at(fig2_params, 4.52, 4.72))
    assert math.isfinite(zz.xi_total)
    assert zz.near_pole["xi2"]
    assert not zz.unreliable


def test_row_columns(fig2_params):
    params = _at(fig2_params, 4.52, 4.9)
    plain = zz_total(params).as_row()
    assert list(plain) == ["xi2_mhz", "xi3_mhz", "xi4s_mhz", "xi_total_mhz", "near_pole"]
    kerr = zz_total(params, include_cross_kerr=True).as_row()
    assert list(kerr) == ["xi2_mhz", "xi3_mhz", "xi4s_mhz", "xi4c0_mhz", "xi4c1_mhz", "xi_total_mhz", "near_pole"]


def test_total_is_the_signed_sum(fig2_params):
    zz = zz_total(_at(fig2_params, 4.52, 4.9), include_cross_kerr=True)
    expected = zz.xi2 + zz.xi3 + zz.xi4s + zz.xi4c0 - zz.xi4c1
    assert zz.xi_total == pytest.approx(expected, rel=1e-12)


@pytest.mark.parametrize("omega_y", np.linspace(4.78, 4.96, 19))
def test_weak_direct_coupling_keeps_zz_below_a_megahertz(fig2_params, omega_y):
    zz = zz_total(_at(fig2_params, 4.52, omega_y, g_xy=0.0005))
    assert abs(zz.xi_total) < 1.0


def test_third_order_scales_with_square_of_resonator_couplings(fig2_params):
    params = _at(fig2_params, 4.52, 4.9)
    half = params.scaled_couplings(0.5)
    for lam in ("a", "b"):
        assert zz_third_order(half, resonator=lam) == pytest.approx(zz_third_order(params, resonator=lam) / 4,
                                                                    rel=1e-12)


def test_fourth_order_self_scales_with_fourth_power(fig2_params):
    params = _at(fig2_params, 4.52, 4.9)
    half = params.scaled_couplings(0.5)
    for lam in ("a", "b"):
        assert zz_fourth_self(half, resonator=lam) == pytest.approx(zz_fourth_self(params, resonator=lam) / 16,
                                                                    rel=1e-4)


def test_third_order_is_linear_in_direct_coupling(fig2_params):
    single = zz_third_order(_at(fig2_params, 4.52, 4.8, g_xy=0.0005))
    double = zz_third_order(_at(fig2_params, 4.52, 4.8, g_xy=0.0010))
    assert single != 0.0
    assert double == pytest.approx(2 * single, rel=1e-12)


def test_cross_resonator_terms_follow_resonator_swap(fig2_params):
    params = _at(fig2_params, 4.52, 4.9)
    swapped = params.swapped_resonators()
    for term in (zz_cross_kerr_ground, zz_cross_kerr_excited):
        for qubit in ("x", "y"):
            assert term(swapped, qubit=qubit) == pytest.approx(term(params, qubit=qubit), rel=1e-12)
    assert zz_two_resonator(swapped) == pytest.approx(zz_two_resonator(params), rel=1e-12)


@pytest.mark.parametrize("omega_y", [4.8, 4.9, 5.0])
def test_derived_ladder_vanishes_for_harmonic_qubits(fig2_params, omega_y):
    params = _at(fig2_params, 4.52, omega_y, g_xy=0.001).replace(alpha_x=0.0, alpha_y=0.0)
    for lam in ("a", "b"):
        assert zz_third_order(params, resonator=lam, form="rayleigh_schrodinger") == pytest.approx(0.0, abs=1e-15)
        assert zz_fourth_self(params, resonator=lam, form="rayleigh_schrodinger") == pytest.approx(0.0, abs=1e-15)
    assert zz_two_resonator(params) == pytest.approx(0.0, abs=1e-15)


def test_derived_self_term_matches_printed_away_from_two_photon_pole(fig2_params):
    params = _at(fig2_params, 4.52, 4.9)
    for lam in ("a", "b"):
        printed = zz_fourth_self(params, resonator=lam)
        assert zz_fourth_self(params, resonator=lam, form="rayleigh_schrodinger") == pytest.approx(printed, rel=1e-3)


def test_derived_third_order_has_no_pole_at_equal_frequencies(fig2_params):
    params = _at(fig2_params, 4.52, 4.52)
    assert math.isfinite(zz_third_order(params, form="rayleigh_schrodinger"))
    with pytest.raises(PoleError):
        zz_third_order(params)


def test_derived_ladder_tracks_diagonalization(fig2_params, trunc, bosonic):
    params = _at(fig2_params, 4.52, 4.9, g_xy=0.001)
    analytic = zz_total(params, include_cross_kerr=True, zz_form="rayleigh_schrodinger").xi_total
    numeric = zz_numeric(solve(params, ZERO_BIAS, trunc, bosonic)).value * 1e3
    assert abs(analytic - numeric) < max(0.2 * abs(numeric), 0.03)
    assert analytic == pytest.approx(-0.0257, abs=5e-3)


def test_derived_row_columns(fig2_params):
    zz = zz_total(_at(fig2_params, 4.52, 4.9), include_cross_kerr=True, zz_form="rayleigh_schrodinger")
    assert list(zz.as_row()) == ["xi2_mhz", "xi3_mhz", "xi4s_mhz", "xi4ab_mhz", "xi_total_mhz", "near_pole"]
    assert zz.xi4c0 == 0.0 and zz.xi4c1 == 0.0
    assert zz.xi_total == pytest.approx(zz.xi2 + zz.xi3 + zz.xi4s + zz.xi4ab, rel=1e-12)


def test_derived_pole_catalog(fig2_params):
    poles = pole_catalog(fig2_params, omega_x=4.52, omega_y_range=(4.2, 5.0), zz_form="rayleigh_schrodinger")
    assert [p.omega_y for p in poles] == pytest.approx([4.345, 4.52, 4.715, 4.78])
    assert [p.divergent for p in poles] == [True, False, True, False]


def test_printed_catalog_marks_only_equal_frequencies_removable(fig2_params):
    poles = pole_catalog(fig2_params, omega_x=4.52, omega_y_range=(4.2, 5.0))
    assert [p.condition for p in poles if not p.divergent] == ["Δ_xy = 0"]
