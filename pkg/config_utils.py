"""Flat ``key = value`` parameter files.

Direct route::

    omega_a_ghz = 4.10
    alpha_x_mhz = -175
    g_ax_mhz = 32
    ...

or a capacitance block (``C_*_fF``, ``L_*_nH``, ``EJ_*_ghz``) from which the
model parameters are derived. ``#`` starts a comment.
"""
from __future__ import annotations

import logging
import os
from dataclasses import dataclass
from typing import Optional

from circuit_model import CapacitanceNetwork, CircuitParams, FluxBias, couplings_from_network
from errors import ConfigError, DomainError
from hamiltonian import TruncationScheme
from options import CONVENTIONS
from zz_analytic import ZZ_FORMS

_logger = logging.getLogger(__name__)

DIRECT_KEYS = (
    "omega_a_ghz", "omega_b_ghz", "omega_x_max_ghz", "omega_y_max_ghz",
    "alpha_x_mhz", "alpha_y_mhz",
    "g_ax_mhz", "g_ay_mhz", "g_bx_mhz", "g_by_mhz", "g_xy_mhz", "g_ab_mhz",
)
CAPACITANCE_KEYS = (
    "C_a_fF", "C_b_fF", "C_x_fF", "C_y_fF",
    "C_ab_fF", "C_xy_fF", "C_ax_fF", "C_ay_fF", "C_bx_fF", "C_by_fF",
    "L_a_nH", "L_b_nH", "EJ_x_ghz", "EJ_y_ghz",
)
RUN_KEYS = ("phi_x", "phi_y", "truncation", "coupling_convention", "zz_form", "grid_points")
KNOWN_KEYS = frozenset(DIRECT_KEYS + CAPACITANCE_KEYS + RUN_KEYS)


@dataclass(frozen=True)
class RunConfig:
    params: CircuitParams
    bias: FluxBias = FluxBias()
    truncation: Optional[TruncationScheme] = None
    coupling_convention: Optional[str] = None
    zz_form: Optional[str] = None
    grid_points: Optional[int] = None
    network: Optional[CapacitanceNetwork] = None
    source: Optional[str] = None


def _strip_utf8_bom(data: bytes) -> bytes:
    if data.startswith(b"\xEF\xBB\xBF"):
        return data[3:]
    return data


def read_entries(text: str, path: Optional[str] = None) -> dict[str, tuple[str, int]]:
    """Return {key: (raw value, line number)}; rejects malformed, unknown and duplicate keys."""
    entries: dict[str, tuple[str, int]] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"expected 'key = value', got {raw.strip()!r}", path, lineno)
        key, value = (part.strip() for part in line.split("=", 1))
        if not key or not value:
            raise ConfigError(f"expected 'key = value', got {raw.strip()!r}", path, lineno)
        if key not in KNOWN_KEYS:
            raise ConfigError(f"unknown key {key!r}", path, lineno)
        if key in entries:
            raise ConfigError(f"duplicate key {key!r} (first set on line {entries[key][1]})", path, lineno)
        entries[key] = (value, lineno)
    return entries


def _number(entries: dict[str, tuple[str, int]], key: str, path: Optional[str]) -> float:
    value, lineno = entries[key]
    try:
        return float(value)
    except ValueError:
        raise ConfigError(f"{key} must be a number, got {value!r}", path, lineno) from None


def _params_from_direct(entries, path) -> CircuitParams:
    v = {key: _number(entries, key, path) for key in DIRECT_KEYS}
    return CircuitParams(
        omega_a=v["omega_a_ghz"], omega_b=v["omega_b_ghz"],
        omega_x_max=v["omega_x_max_ghz"], omega_y_max=v["omega_y_max_ghz"],
        alpha_x=v["alpha_x_mhz"] / 1e3, alpha_y=v["alpha_y_mhz"] / 1e3,
        g_ax=v["g_ax_mhz"] / 1e3, g_ay=v["g_ay_mhz"] / 1e3,
        g_bx=v["g_bx_mhz"] / 1e3, g_by=v["g_by_mhz"] / 1e3,
        g_xy=v["g_xy_mhz"] / 1e3, g_ab=v["g_ab_mhz"] / 1e3,
    )


def _network_from_block(entries, path) -> CapacitanceNetwork:
    v = {key: _number(entries, key, path) for key in CAPACITANCE_KEYS}
    caps = {key[:-3]: v[key] for key in CAPACITANCE_KEYS if key.endswith("_fF")}
    return CapacitanceNetwork.from_femtofarads(
        L_a_nH=v["L_a_nH"], L_b_nH=v["L_b_nH"], EJ_x=v["EJ_x_ghz"], EJ_y=v["EJ_y_ghz"], **caps)


def parse_config_text(text: str, path: Optional[str] = None) -> RunConfig:
    entries = read_entries(text, path)
    direct = [k for k in DIRECT_KEYS if k in entries]
    block = [k for k in CAPACITANCE_KEYS if k in entries]
    if direct and block:
        raise ConfigError("give either direct model parameters or a capacitance block, not both", path)
    network = None
    try:
        if block:
            missing = [k for k in CAPACITANCE_KEYS if k not in entries]
            if missing:
                raise ConfigError(f"capacitance block incomplete, missing {', '.join(missing)}", path)
            network = _network_from_block(entries, path)
            params = couplings_from_network(network)
        else:
            missing = [k for k in DIRECT_KEYS if k not in entries]
            if missing:
                raise ConfigError(f"missing required keys {', '.join(missing)}", path)
            params = _params_from_direct(entries, path)
    except DomainError as e:
        raise ConfigError(str(e), path) from None

    phi_x = _number(entries, "phi_x", path) if "phi_x" in entries else 0.0
    phi_y = _number(entries, "phi_y", path) if "phi_y" in entries else 0.0
    try:
        bias = FluxBias(phi_x, phi_y)
    except DomainError as e:
        raise ConfigError(str(e), path) from None

    truncation = None
    if "truncation" in entries:
        value, lineno = entries["truncation"]
        try:
            truncation = TruncationScheme.parse(value)
        except DomainError as e:
            raise ConfigError(str(e), path, lineno) from None

    choices = {"coupling_convention": CONVENTIONS, "zz_form": ZZ_FORMS}
    text_values: dict[str, Optional[str]] = {}
    for key, allowed in choices.items():
        text_values[key] = None
        if key in entries:
            value, lineno = entries[key]
            if value not in allowed:
                raise ConfigError(f"{key} must be one of {', '.join(allowed)}, got {value!r}", path, lineno)
            text_values[key] = value

    grid_points = None
    if "grid_points" in entries:
        value, lineno = entries["grid_points"]
        try:
            grid_points = int(value)
        except ValueError:
            raise ConfigError(f"grid_points must be an integer, got {value!r}", path, lineno) from None
        if grid_points < 1:
            raise ConfigError(f"grid_points must be >= 1, got {grid_points}", path, lineno)

    return RunConfig(
        params=params, bias=bias, truncation=truncation,
        coupling_convention=text_values["coupling_convention"],
        zz_form=text_values["zz_form"],
        grid_points=grid_points, network=network, source=path,
    )


def load_config(path: str) -> RunConfig:
    try:
        with open(path, "rb") as f:
            raw = f.read()
    except OSError as e:
        raise ConfigError(f"cannot read file: {e.strerror or e}", path) from None
    try:
        text = _strip_utf8_bom(raw).decode("utf-8", errors="strict")
    except UnicodeDecodeError as e:
        raise ConfigError(f"invalid UTF-8 at byte {e.start}", path) from None
    config = parse_config_text(text, os.fspath(path))
    _logger.debug(f"loaded parameters from {path}")
    return config
