import pandas as pd
import pytest

from errors import DomainError
from figures import FIG6_G_XY_MHZ, FIG9_G_XY_MHZ, RECIPES, figure_recipes


def test_level_recipe_rows():
    data = figure_recipes("fig2", points=4)
    assert set(data) == {"fig2_single", "fig2_double"}
    assert len(data["fig2_single"]) == 4 * 4
    assert len(data["fig2_double"]) == 4 * 10


def test_coupling_recipe_columns():
    data = figure_recipes("fig4", points=5)
    assert list(data["fig4_couplings"].columns) == ["phi_y", "omega_y_ghz", "g_d_mhz", "g_cr_mhz"]
    frequencies = data["fig4_frequencies"].columns
    assert "delta_omega_y_mhz" in frequencies and "omega_cr_y_ghz" in frequencies


def test_zz_recipes_toggle_cross_kerr():
    fig6 = figure_recipes("fig6", points=11)["fig6_zz"]
    fig9 = figure_recipes("fig9", points=11)["fig9_zz"]
    assert len(fig6) == 11 * len(FIG6_G_XY_MHZ)
    assert len(fig9) == 11 * len(FIG9_G_XY_MHZ)
    assert list(fig6.columns[:2]) == ["g_xy_mhz", "omega_y_ghz"]
    assert "xi4c0_mhz" not in fig6.columns
    assert {"xi4c0_mhz", "xi4c1_mhz"} <= set(fig9.columns)


def test_interval_table():
    intervals = figure_recipes("fig7", points=96)["fig7_intervals"]
    assert list(intervals.columns) == ["omega_x_ghz", "g_xy_mhz", "switchoff_ghz", "zz_zero_ghz", "interval_mhz"]
    assert len(intervals) == 8


def test_surface_recipe_rows():
    data = figure_recipes("fig10", points=3)
    assert len(data["fig10_single"]) == 9 * 4
    assert len(data["fig10_double"]) == 9 * 10


def test_recipes_are_deterministic():
    first = figure_recipes("fig6", points=7)["fig6_zz"]
    second = figure_recipes("fig6", points=7)["fig6_zz"]
    pd.testing.assert_frame_equal(first, second)


def test_unknown_figure():
    with pytest.raises(DomainError):
        figure_recipes("fig8")
    assert "fig8" not in RECIPES
