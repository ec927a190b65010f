import os

import pytest

from circuit_model import FIG2_PARAMS
from config_utils import load_config, parse_config_text
from errors import ConfigError

BASE_DIR = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))

FIG2_TEXT = """\
omega_a_ghz = 4.10
omega_b_ghz = 5.20
omega_x_max_ghz = 4.56
omega_y_max_ghz = 5.12
alpha_x_mhz = -175
alpha_y_mhz = -195
g_ax_mhz = 32   # a-x
g_ay_mhz = 32
g_bx_mhz = 30
g_by_mhz = 30
g_xy_mhz = 1
g_ab_mhz = 0.1
"""


def test_parse_direct_parameters():
    config = parse_config_text(FIG2_TEXT + "phi_y = 0.3\ncoupling_convention = bosonic\n")
    assert config.params.as_dict() == pytest.approx(FIG2_PARAMS.as_dict())
    assert config.bias.phi_y == 0.3
    assert config.coupling_convention == "bosonic"
    assert config.truncation is None
    assert config.network is None


@pytest.mark.parametrize("extra, line, fragment", [
    ("g_zz_mhz = 1\n", 13, "unknown key"),
    ("g_xy_mhz = 2\n", 13, "duplicate key"),
    ("phi_y 0.3\n", 13, "key = value"),
    ("phi_y = fast\n", 13, "must be a number"),
    ("truncation = 4,3,3\n", 13, "truncation"),
    ("coupling_convention = fermionic\n", 13, "coupling_convention"),
    ("grid_points = 0\n", 13, "grid_points"),
])
def test_errors_carry_line_numbers(extra, line, fragment):
    with pytest.raises(ConfigError) as info:
        parse_config_text(FIG2_TEXT + extra, "dev.conf")
    assert info.value.line == line
    assert f"dev.conf:{line}:" in str(info.value)
    assert fragment in str(info.value)


def test_missing_keys_are_listed():
    text = "\n".join(line for line in FIG2_TEXT.splitlines() if not line.startswith("g_ab"))
    with pytest.raises(ConfigError, match="g_ab_mhz"):
        parse_config_text(text)


def test_direct_and_capacitance_routes_are_exclusive():
    with pytest.raises(ConfigError, match="not both"):
        parse_config_text(FIG2_TEXT + "C_a_fF = 900\n")


def test_physical_violations_become_config_errors():
    with pytest.raises(ConfigError, match="anharmonicities"):
        parse_config_text(FIG2_TEXT.replace("alpha_x_mhz = -175", "alpha_x_mhz = 175"))


def test_bom_is_tolerated(tmp_path):
    path = tmp_path / "bom.conf"
    path.write_bytes(b"\xef\xbb\xbf" + FIG2_TEXT.encode("utf-8"))
    assert load_config(str(path)).params.as_dict() == pytest.approx(FIG2_PARAMS.as_dict())


def test_invalid_utf8(tmp_path):
    path = tmp_path / "bad.conf"
    path.write_bytes(FIG2_TEXT.encode("utf-8") + b"# \xff\n")
    with pytest.raises(ConfigError, match="UTF-8"):
        load_config(str(path))


def test_unreadable_file(tmp_path):
    with pytest.raises(ConfigError, match="cannot read"):
        load_config(str(tmp_path / "absent.conf"))


def test_shipped_fig2_config():
    config = load_config(os.path.join(BASE_DIR, "configs", "fig2.conf"))
    assert config.params.as_dict() == pytest.approx(FIG2_PARAMS.as_dict())
    assert config.params.ordering_warnings(config.bias) == []


def test_shipped_capacitance_config():
    config = load_config(os.path.join(BASE_DIR, "configs", "hierarchy_network.conf"))
    assert config.network is not None
    assert config.network.respects_hierarchy()
    assert str(config.truncation) == "4,3,3,4"
    assert config.params.omega_a < config.params.omega_x_max < config.params.omega_y_max < config.params.omega_b
