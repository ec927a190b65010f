import pytest

from errors import DomainError
from validation import (
    check_capacitance_approximation,
    check_oracle_equivalence,
    check_perturbation_scaling,
    check_pole_taxonomy,
    check_sub_mhz_suppression,
    check_switchoff_without_direct_coupling,
    check_zz_cancellation,
    run_checks,
)


def _assert_passed(result):
    assert result.passed, result.detail


def test_capacitance_approximation():
    _assert_passed(check_capacitance_approximation())


@pytest.mark.parametrize("form", ["literal", "rayleigh_schrodinger"])
def test_pole_taxonomy(form):
    _assert_passed(check_pole_taxonomy(zz_form=form))


def test_pole_taxonomy_reports_removable_points():
    literal = check_pole_taxonomy().detail
    assert literal.count("(removable)") == 1
    assert "Δ_xy = 0@4.5200 (removable)" in literal
    derived = check_pole_taxonomy(zz_form="rayleigh_schrodinger").detail
    assert derived.count("(removable)") == 2
    assert "2ω_y + α_y" not in derived


def test_sub_mhz_suppression():
    _assert_passed(check_sub_mhz_suppression())


def test_zz_cancellation():
    _assert_passed(check_zz_cancellation())


@pytest.mark.slow
def test_perturbation_scaling():
    _assert_passed(check_perturbation_scaling())


@pytest.mark.slow
def test_switchoff_without_direct_coupling():
    _assert_passed(check_switchoff_without_direct_coupling())


@pytest.mark.slow
def test_oracle_equivalence():
    _assert_passed(check_oracle_equivalence())


@pytest.mark.slow
def test_printed_ladder_misses_the_oracle():
    result = check_oracle_equivalence(points=61, zz_form="literal")
    assert not result.passed
    assert "literal" in result.detail


def test_run_checks_selection():
    results = run_checks(["capacitance_approximation", "pole_taxonomy"])
    assert [r.name for r in results] == ["capacitance_approximation", "pole_taxonomy"]
    assert all(r.seconds >= 0.0 for r in results)


def test_run_checks_unknown():
    with pytest.raises(DomainError):
        run_checks(["nonexistent"])
