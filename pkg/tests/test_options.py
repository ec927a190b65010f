import pytest

from errors import ConfigError
from options import resolve_coupling_convention, resolve_grid_points, resolve_workers, resolve_zz_form


@pytest.fixture(autouse=True)
def clean_env(monkeypatch):
    for name in ("COUPLER_CONVENTION", "COUPLER_ZZ_FORM", "COUPLER_GRID_POINTS", "COUPLER_WORKERS"):
        monkeypatch.delenv(name, raising=False)


def test_convention_defaults_to_uniform():
    assert resolve_coupling_convention() == "uniform"


def test_convention_priority(monkeypatch):
    monkeypatch.setenv("COUPLER_CONVENTION", "bosonic")
    assert resolve_coupling_convention() == "bosonic"
    assert resolve_coupling_convention(config="uniform") == "uniform"
    assert resolve_coupling_convention(cli="bosonic", config="uniform") == "bosonic"


def test_bad_environment_value_is_ignored(monkeypatch, caplog):
    monkeypatch.setenv("COUPLER_CONVENTION", "fermionic")
    assert resolve_coupling_convention() == "uniform"
    assert "ignoring COUPLER_CONVENTION" in caplog.text


def test_bad_explicit_value_raises():
    with pytest.raises(ConfigError):
        resolve_coupling_convention(cli="fermionic")
    with pytest.raises(ConfigError):
        resolve_zz_form(config="fifth")


def test_zz_form_priority(monkeypatch):
    assert resolve_zz_form() == "literal"
    monkeypatch.setenv("COUPLER_ZZ_FORM", "symmetrized")
    assert resolve_zz_form() == "symmetrized"
    assert resolve_zz_form(cli="rayleigh_schrodinger") == "rayleigh_schrodinger"


def test_grid_points(monkeypatch):
    assert resolve_grid_points() == 1001
    assert resolve_grid_points(two_d=True) == 201
    monkeypatch.setenv("COUPLER_GRID_POINTS", "51")
    assert resolve_grid_points() == 51
    assert resolve_grid_points(config=21) == 21
    assert resolve_grid_points(cli=11, config=21) == 11
    with pytest.raises(ConfigError):
        resolve_grid_points(cli=0)


def test_workers(monkeypatch, caplog):
    assert resolve_workers() == 1
    monkeypatch.setenv("COUPLER_WORKERS", "4")
    assert resolve_workers() == 4
    assert resolve_workers(cli=2) == 2
    monkeypatch.setenv("COUPLER_WORKERS", "many")
    assert resolve_workers() == 1
    assert "ignoring COUPLER_WORKERS" in caplog.text
    with pytest.raises(ConfigError):
        resolve_workers(cli=0)
