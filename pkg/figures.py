"""Dataset recipes behind each figure panel.

Every recipe starts from FIG2_PARAMS plus its own overrides and returns
``{dataset name: DataFrame}``. Flux sweeps stay inside the open single-well
branch (-π/2, π/2).
"""
from __future__ import annotations

import dataclasses
import logging
import math
from typing import Callable, Optional

import numpy as np
import pandas as pd

from analysis import (EvaluationOptions, SweepAxis, SweepSpec, find_switchoff, find_zz_zero,
                      run_level_sweep, run_sweep)
from circuit_model import FIG2_PARAMS, CircuitParams, FluxBias
from errors import DomainError, PoleError
from perturbation import decouple

_logger = logging.getLogger(__name__)

PHI_EDGE = math.pi / 2 - 0.05
FIG2_PHI_STOP = 1.2

SINGLE_EXCITATION = ("1000", "0100", "0010", "0001")
DOUBLE_EXCITATION = ("2000", "0200", "0020", "0002", "1100", "1010", "1001", "0110", "0101", "0011")

COUPLING_WINDOW = (4.2, 5.0)
ZZ_WINDOW = (4.70, 5.00)
ZZ_ZERO_WINDOW = (4.05, 5.00)

FIG5_G_XY_MHZ = (0.0, 0.5, 1.0)
FIG5_OMEGA_X = (4.56, 4.53)
FIG5_ALPHA_Y_MHZ = (-190.0, -195.0, -200.0)
FIG6_G_XY_MHZ = (0.0, 0.5, 1.0, 1.5)
FIG7_OMEGA_X = (4.0, 3.95)
FIG7_G_XY_MHZ = (0.9, 1.0, 1.2, 1.6)
FIG9_G_XY_MHZ = (0.2, 1.4, 2.0)

DEFAULT_POINTS_1D = 1001
DEFAULT_POINTS_2D = 201
DEFAULT_POINTS_LEVELS = 301
DEFAULT_POINTS_SURFACE = 61


def _at(omega_x: float, g_xy_mhz: float, **changes) -> CircuitParams:
    return FIG2_PARAMS.with_qubit_frequencies(omega_x=omega_x).replace(g_xy=g_xy_mhz / 1e3, **changes)


def _family(rows: list[tuple[dict, pd.DataFrame]]) -> pd.DataFrame:
    """Stack per-member frames, prefixing each with its member columns."""
    frames = []
    for member, frame in rows:
        frame = frame.copy()
        for k, (column, value) in enumerate(member.items()):
            frame.insert(k, column, value)
        frames.append(frame)
    return pd.concat(frames, ignore_index=True)


def fig2(points: Optional[int] = None, options: EvaluationOptions = EvaluationOptions()) -> dict[str, pd.DataFrame]:
    """Single- and double-excitation levels against φ_y at ω_x = 4.56 GHz."""
    spec = SweepSpec.line("phi_y", 0.0, FIG2_PHI_STOP, points or DEFAULT_POINTS_LEVELS)
    return {
        "fig2_single": run_level_sweep(FIG2_PARAMS, spec, SINGLE_EXCITATION, trunc=options.trunc,
                                       options=options.hamiltonian),
        "fig2_double": run_level_sweep(FIG2_PARAMS, spec, DOUBLE_EXCITATION, trunc=options.trunc,
                                       options=options.hamiltonian),
    }


def _diagonal_frequencies(params: CircuitParams, phis: np.ndarray) -> pd.DataFrame:
    rows = []
    for phi in phis:
        bias = FluxBias(phi, phi)
        try:
            row = decouple(params, bias).as_row()
        except PoleError:
            row = {}
        rows.append({"phi": phi, **{k: row.get(k, math.nan) for k in (
            "omega_x_ghz", "omega_y_ghz", "omega_d_x_ghz", "omega_d_y_ghz",
            "omega_cr_x_ghz", "omega_cr_y_ghz", "g_cr_mhz")}})
    return pd.DataFrame(rows)


def fig3(points: Optional[int] = None, options: EvaluationOptions = EvaluationOptions()) -> dict[str, pd.DataFrame]:
    """g_cr over the (φ_x, φ_y) plane for g_xy = 3 MHz and 0, with its zero contours."""
    n = points or DEFAULT_POINTS_2D
    spec = SweepSpec(SweepAxis("phi_x", -PHI_EDGE, PHI_EDGE, n), SweepAxis("phi_y", -PHI_EDGE, PHI_EDGE, n))
    datasets = {}
    for tag, g_xy_mhz in (("gxy3", 3.0), ("gxy0", 0.0)):
        params = FIG2_PARAMS.replace(g_xy=g_xy_mhz / 1e3)
        datasets[f"fig3_surface_{tag}"] = run_sweep(params, spec, {"g_cr"}, options)
        datasets[f"fig3_contour_{tag}"] = find_switchoff(params, spec, "g_cr").frame()
    datasets["fig3_diagonal"] = _diagonal_frequencies(FIG2_PARAMS.replace(g_xy=0.003),
                                                      np.linspace(-PHI_EDGE, PHI_EDGE, n))
    return datasets


def fig4(points: Optional[int] = None, options: EvaluationOptions = EvaluationOptions()) -> dict[str, pd.DataFrame]:
    """Effective couplings and decoupled frequencies against φ_y (ω_x = 4.56 GHz, g_xy = 1 MHz)."""
    params = _at(4.56, 1.0)
    spec = SweepSpec.line("phi_y", 0.0, FIG2_PHI_STOP, points or DEFAULT_POINTS_1D)
    return {
        "fig4_couplings": run_sweep(params, spec, {"g_d", "g_cr"}, options),
        "fig4_frequencies": run_sweep(params, spec, {"decoupled", "delta_omega"}, options),
    }


def fig5(points: Optional[int] = None, options: EvaluationOptions = EvaluationOptions()) -> dict[str, pd.DataFrame]:
    """Switch-off curves g_cr(ω_y) for the g_xy × ω_x family and the α_y family."""
    spec = SweepSpec.line("omega_y", *COUPLING_WINDOW, points or DEFAULT_POINTS_1D)
    coupling_family = [
        ({"omega_x_ghz": omega_x, "g_xy_mhz": g_xy},
         run_sweep(_at(omega_x, g_xy), spec, {"g_cr"}, options))
        for omega_x in FIG5_OMEGA_X for g_xy in FIG5_G_XY_MHZ
    ]
    alpha_family = [
        ({"alpha_y_mhz": alpha_y},
         run_sweep(_at(4.56, 0.5, alpha_y=alpha_y / 1e3), spec, {"g_cr"}, options))
        for alpha_y in FIG5_ALPHA_Y_MHZ
    ]
    return {"fig5_coupling": _family(coupling_family), "fig5_anharmonicity": _family(alpha_family)}


def _zz_family(omega_x: float, g_values: tuple[float, ...], window: tuple[float, float], n: int,
               options: EvaluationOptions) -> pd.DataFrame:
    spec = SweepSpec.line("omega_y", *window, n)
    return _family([({"g_xy_mhz": g}, run_sweep(_at(omega_x, g), spec, {"zz"}, options)) for g in g_values])


def fig6(points: Optional[int] = None, options: EvaluationOptions = EvaluationOptions()) -> dict[str, pd.DataFrame]:
    """ZZ breakdown without cross-Kerr terms at ω_x = 4.52 GHz."""
    options = dataclasses.replace(options, include_cross_kerr=False)
    return {"fig6_zz": _zz_family(4.52, FIG6_G_XY_MHZ, ZZ_WINDOW, points or DEFAULT_POINTS_1D, options)}


def switchoff_zz_intervals(omega_x: float, g_values: tuple[float, ...], window: tuple[float, float], n: int,
                           options: EvaluationOptions = EvaluationOptions()) -> pd.DataFrame:
    """Distance between the g_cr switch-off point and the nearest ZZ zero, per g_xy."""
    spec = SweepSpec.line("omega_y", *window, n)
    rows = []
    for g_xy in g_values:
        params = _at(omega_x, g_xy)
        switchoff = find_switchoff(params, spec, "g_cr").locations
        zeros = find_zz_zero(params, spec, options.include_cross_kerr, options.zz_form).locations
        row = {"omega_x_ghz": omega_x, "g_xy_mhz": g_xy, "switchoff_ghz": math.nan,
               "zz_zero_ghz": math.nan, "interval_mhz": math.nan}
        if switchoff and zeros:
            s = switchoff[0]
            z = min(zeros, key=lambda x: abs(x - s))
            row.update(switchoff_ghz=s, zz_zero_ghz=z, interval_mhz=(z - s) * 1e3)
        elif switchoff:
            row["switchoff_ghz"] = switchoff[0]
        elif zeros:
            row["zz_zero_ghz"] = zeros[0]
        rows.append(row)
    return pd.DataFrame(rows)


def fig7(points: Optional[int] = None, options: EvaluationOptions = EvaluationOptions()) -> dict[str, pd.DataFrame]:
    """ZZ cancellation family at ω_x = 4.0 and 3.95 GHz, with switch-off to ZZ-zero intervals."""
    n = points or DEFAULT_POINTS_1D
    options = dataclasses.replace(options, include_cross_kerr=False)
    zz = [({"omega_x_ghz": omega_x}, _zz_family(omega_x, FIG7_G_XY_MHZ, ZZ_ZERO_WINDOW, n, options))
          for omega_x in FIG7_OMEGA_X]
    intervals = pd.concat([switchoff_zz_intervals(omega_x, FIG7_G_XY_MHZ, ZZ_ZERO_WINDOW, n, options)
                           for omega_x in FIG7_OMEGA_X], ignore_index=True)
    return {"fig7_zz": _family(zz), "fig7_intervals": intervals}


def fig9(points: Optional[int] = None, options: EvaluationOptions = EvaluationOptions()) -> dict[str, pd.DataFrame]:
    """ZZ breakdown with the cross-Kerr corrections at ω_x = 4.52 GHz."""
    options = dataclasses.replace(options, include_cross_kerr=True)
    return {"fig9_zz": _zz_family(4.52, FIG9_G_XY_MHZ, ZZ_WINDOW, points or DEFAULT_POINTS_1D, options)}


def fig10(points: Optional[int] = None, options: EvaluationOptions = EvaluationOptions()) -> dict[str, pd.DataFrame]:
    """Single- and double-excitation level surfaces over (φ_x, φ_y)."""
    n = points or DEFAULT_POINTS_SURFACE
    spec = SweepSpec(SweepAxis("phi_x", -PHI_EDGE, PHI_EDGE, n), SweepAxis("phi_y", -PHI_EDGE, PHI_EDGE, n))
    return {
        "fig10_single": run_level_sweep(FIG2_PARAMS, spec, SINGLE_EXCITATION, trunc=options.trunc,
                                        options=options.hamiltonian),
        "fig10_double": run_level_sweep(FIG2_PARAMS, spec, DOUBLE_EXCITATION, trunc=options.trunc,
                                        options=options.hamiltonian),
    }


RECIPES: dict[str, Callable[..., dict[str, pd.DataFrame]]] = {
    "fig2": fig2, "fig3": fig3, "fig4": fig4, "fig5": fig5,
    "fig6": fig6, "fig7": fig7, "fig9": fig9, "fig10": fig10,
}


def figure_recipes(name: str, points: Optional[int] = None,
                   options: EvaluationOptions = EvaluationOptions()) -> dict[str, pd.DataFrame]:
    try:
        recipe = RECIPES[name]
    except KeyError:
        raise DomainError(f"unknown figure {name!r}; choose from {', '.join(RECIPES)}") from None
    _logger.info(f"building {name} datasets")
    return recipe(points, options)
