from __future__ import annotations

import logging
import os
from typing import Optional

from errors import ConfigError
from hamiltonian import CouplingConvention
from zz_analytic import ZZ_FORMS, ZZForm

_logger = logging.getLogger(__name__)

CONVENTIONS = ("uniform", "bosonic")
DEFAULT_CONVENTION: CouplingConvention = "uniform"
DEFAULT_ZZ_FORM: ZZForm = "literal"
DEFAULT_GRID_1D = 1001
DEFAULT_GRID_2D = 201


def _from_env(name: str, allowed: tuple[str, ...]) -> Optional[str]:
    value = os.getenv(name)
    if value is None or value == "":
        return None
    if value not in allowed:
        _logger.warning(f"ignoring {name}={value!r}; expected one of {', '.join(allowed)}")
        return None
    return value


def _explicit(value: Optional[str], allowed: tuple[str, ...], what: str) -> Optional[str]:
    if value is None:
        return None
    if value not in allowed:
        raise ConfigError(f"unknown {what} {value!r}; expected one of {', '.join(allowed)}")
    return value


def resolve_coupling_convention(cli: Optional[str] = None, config: Optional[str] = None) -> CouplingConvention:
    """
    Decide the qubit ladder-operator convention.

    Priority:
    1) --convention on the command line
    2) coupling_convention in the parameter file
    3) COUPLER_CONVENTION environment variable
    4) 'uniform'
    """
    return (
        _explicit(cli, CONVENTIONS, "coupling convention")
        or _explicit(config, CONVENTIONS, "coupling convention")
        or _from_env("COUPLER_CONVENTION", CONVENTIONS)
        or DEFAULT_CONVENTION
    )


def resolve_zz_form(cli: Optional[str] = None, config: Optional[str] = None) -> ZZForm:
    """
    Decide which closed-form ZZ ladder is evaluated.

    Priority: command line, parameter file, COUPLER_ZZ_FORM, 'literal'.
    """
    return (
        _explicit(cli, ZZ_FORMS, "ZZ form")
        or _explicit(config, ZZ_FORMS, "ZZ form")
        or _from_env("COUPLER_ZZ_FORM", ZZ_FORMS)
        or DEFAULT_ZZ_FORM
    )


def resolve_grid_points(cli: Optional[int] = None, config: Optional[int] = None, two_d: bool = False) -> int:
    """
    Points per sweep axis.

    Priority: --grid, grid_points in the parameter file, COUPLER_GRID_POINTS,
    then 1001 (1D) or 201 (per axis, 2D).
    """
    for value in (cli, config):
        if value is not None:
            if value < 1:
                raise ConfigError(f"grid points must be >= 1, got {value}")
            return int(value)
    env = os.getenv("COUPLER_GRID_POINTS")
    if env:
        try:
            points = int(env)
            if points >= 1:
                return points
        except ValueError:
            pass
        _logger.warning(f"ignoring COUPLER_GRID_POINTS={env!r}; expected a positive integer")
    return DEFAULT_GRID_2D if two_d else DEFAULT_GRID_1D


def resolve_workers(cli: Optional[int] = None) -> int:
    """
    Processes used for sweep evaluation.

    Priority: --workers, COUPLER_WORKERS, then 1 (serial).
    """
    if cli is not None:
        if cli < 1:
            raise ConfigError(f"workers must be >= 1, got {cli}")
        return int(cli)
    env = os.getenv("COUPLER_WORKERS")
    if env:
        try:
            workers = int(env)
            if workers >= 1:
                return workers
        except ValueError:
            pass
        _logger.warning(f"ignoring COUPLER_WORKERS={env!r}; expected a positive integer")
    return 1
