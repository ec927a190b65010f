"""Closed-form static ZZ coupling and its pole structure.

Term functions return GHz. ZZBreakdown carries MHz, the unit the figures use.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Literal

from circuit_model import ZERO_BIAS, CircuitParams, FluxBias, flux_tuned_frequency
from errors import DomainError, PoleError
from perturbation import QUBITS, DetuningSet, PoleGuard, detunings

_logger = logging.getLogger(__name__)

ZZForm = Literal["literal", "symmetrized", "rayleigh_schrodinger"]
ZZ_FORMS = ("literal", "symmetrized", "rayleigh_schrodinger")


def _guard(guard: PoleGuard | None) -> PoleGuard:
    return guard if guard is not None else PoleGuard()


def zz_second_order(params: CircuitParams, bias: FluxBias = ZERO_BIAS, guard: PoleGuard | None = None) -> float:
    """2 g_xy² (α_x + α_y) / ((Δ_xy + α_y)(Δ_xy − α_x))."""
    if params.g_xy == 0.0:
        return 0.0
    guard = _guard(guard)
    det = detunings(params, bias)
    d_plus = guard("Δ_xy+α_y", det.delta_xy + params.alpha_y)
    d_minus = guard("Δ_xy−α_x", det.delta_xy - params.alpha_x)
    return 2.0 * params.g_xy ** 2 * (params.alpha_x + params.alpha_y) / (d_plus * d_minus)

def zz_third_order(params: CircuitParams, bias: FluxBias = ZERO_BIAS, resonator: str = "a",
                   form: ZZForm = "literal", guard: PoleGuard | None = None) -> float:
    """Third-order ZZ through one resonator, linear in g_xy.

    ``literal`` carries 1/Δ_λy on both bracketed groups, ``symmetrized``
    uses 1/Δ_λx on the second, ``rayleigh_schrodinger`` is the
    nondegenerate third-order result, written without the removable
    1/Δ_xy.
    """
    if form not in ZZ_FORMS:
        raise DomainError(f"unknown ZZ form {form!r}")
    gg = params.g(resonator, "x") * params.g(resonator, "y")
    if params.g_xy == 0.0 or gg == 0.0:
        return 0.0
    guard = _guard(guard)
    det = detunings(params, bias)
    d_plus = guard("Δ_xy+α_y", det.delta_xy + params.alpha_y)
    d_minus = guard("Δ_xy−α_x", det.delta_xy - params.alpha_x)
    d_ly = guard(f"Δ_{resonator}y", det.delta[(resonator, "y")])
    d_lx = guard(f"Δ_{resonator}x", det.delta[(resonator, "x")])
    if form == "rayleigh_schrodinger":
        return 4.0 * params.g_xy * gg * (1.0 / (d_ly * d_minus) - 1.0 / (d_lx * d_plus) + 1.0 / (d_lx * d_ly))
    d = guard("Δ_xy", det.delta_xy)
    second = d_ly if form == "literal" else d_lx
    bracket = (1.0 / d_ly) * (1.0 / d - 2.0 / d_plus) - (1.0 / second) * (1.0 / d - 2.0 / d_minus)
    return 2.0 * params.g_xy * gg * bracket


def induced_resonator_nonlinearity(params: CircuitParams, det: DetuningSet, resonator: str) -> float:
    """α_λ = Σ_β α_β (g_λβ/Δ_λβ)⁴."""
    total = 0.0
    for beta in QUBITS:
        g = params.g(resonator, beta)
        if g:
            total += params.alpha(beta) * (g / det.delta[(resonator, beta)]) ** 4
    return total


def zz_fourth_self(params: CircuitParams, bias: FluxBias = ZERO_BIAS, resonator: str = "a",
                   guard: PoleGuard | None = None, form: ZZForm = "literal") -> float:
    """Fourth-order ZZ from the self-Kerr resonance of one resonator.

    ``rayleigh_schrodinger`` gives the nondegenerate fourth-order result
    with the two-photon denominator cancelled against its numerator.
    """
    if form not in ZZ_FORMS:
        raise DomainError(f"unknown ZZ form {form!r}")
    g_x, g_y = params.g(resonator, "x"), params.g(resonator, "y")
    if g_x == 0.0 or g_y == 0.0:
        return 0.0
    guard = _guard(guard)
    det = detunings(params, bias)
    d_lx = guard(f"Δ_{resonator}x", det.delta[(resonator, "x")])
    d_ly = guard(f"Δ_{resonator}y", det.delta[(resonator, "y")])
    d_plus = guard("Δ_xy+α_y", det.delta_xy + params.alpha_y)
    d_minus = guard("Δ_xy−α_x", det.delta_xy - params.alpha_x)
    g4 = g_y * g_y * g_x * g_x
    if form == "rayleigh_schrodinger":
        return 2.0 * g4 * (
            (d_lx + d_ly) / (d_lx * d_lx * d_ly * d_ly)
            + 1.0 / (d_ly * d_ly * d_minus)
            - 1.0 / (d_lx * d_lx * d_plus)
        )
    d = guard("Δ_xy", det.delta_xy)
    alpha_l = induced_resonator_nonlinearity(params, det, resonator)
    two_photon = guard(f"Δ_{resonator}y+Δ_{resonator}x−α_{resonator}", d_ly + d_lx - alpha_l)
    return (
        2.0 * g4 / two_photon * (1.0 / d_ly + 1.0 / d_lx) ** 2
        - g4 / (d_ly * d_ly) * (1.0 / d + 1.0 / d_lx - 2.0 / d_minus)
        - g4 / (d_lx * d_lx) * (2.0 / d_plus - 1.0 / d + 1.0 / d_ly)
    )


def zz_two_resonator(params: CircuitParams, bias: FluxBias = ZERO_BIAS, guard: PoleGuard | None = None) -> float:
    """Fourth-order ZZ from paths that pass through both resonators.

    Proportional to g_ax g_ay g_bx g_by; vanishes for harmonic qubits.
    """
    product = params.g_ax * params.g_ay * params.g_bx * params.g_by
    if product == 0.0:
        return 0.0
    guard = _guard(guard)
    det = detunings(params, bias)
    d_ax = guard("Δ_ax", det.delta[("a", "x")])
    d_bx = guard("Δ_bx", det.delta[("b", "x")])
    d_ay = guard("Δ_ay", det.delta[("a", "y")])
    d_by = guard("Δ_by", det.delta[("b", "y")])
    d_plus = guard("Δ_xy+α_y", det.delta_xy + params.alpha_y)
    d_minus = guard("Δ_xy−α_x", det.delta_xy - params.alpha_x)
    excess = det.omega_x + det.omega_y - params.omega_a - params.omega_b
    return 4.0 * product * (
        excess / (d_ax * d_bx * d_ay * d_by)
        + 1.0 / (d_ay * d_by * d_minus)
        - 1.0 / (d_ax * d_bx * d_plus)
    )


def _qubit_frequency(det: DetuningSet, qubit: str) -> float:
    return det.omega_x if qubit == "x" else det.omega_y


def zz_cross_kerr_ground(params: CircuitParams, bias: FluxBias = ZERO_BIAS, qubit: str = "y",
                         guard: PoleGuard | None = None) -> float:
    """Cross-Kerr correction to the ground state of one qubit."""
    g_a, g_b = params.g("a", qubit), params.g("b", qubit)
    if g_a == 0.0 or g_b == 0.0:
        return 0.0
    guard = _guard(guard)
    det = detunings(params, bias)
    omega = guard(f"ω_{qubit}", _qubit_frequency(det, qubit))
    d_a = guard(f"Δ_a{qubit}", det.delta[("a", qubit)])
    d_b = guard(f"Δ_b{qubit}", det.delta[("b", qubit)])
    two_photon = guard(f"2ω_{qubit}+α_{qubit}−ω_a−ω_b",
                       2.0 * omega + params.alpha(qubit) - params.omega_a - params.omega_b)
    ratio = (2.0 * omega - params.omega_a - params.omega_b) / (d_a * d_b)
    return g_a ** 2 * g_b ** 2 * (2.0 / (d_a * d_b * omega) + ratio ** 2 / two_photon)


def zz_cross_kerr_excited(params: CircuitParams, bias: FluxBias = ZERO_BIAS, qubit: str = "y",
                          guard: PoleGuard | None = None) -> float:
    """Cross-Kerr correction to the first excited state of one qubit."""
    g_a, g_b = params.g("a", qubit), params.g("b", qubit)
    if g_a == 0.0 or g_b == 0.0:
        return 0.0
    guard = _guard(guard)
    det = detunings(params, bias)
    alpha = params.alpha(qubit)
    omega = guard(f"ω_{qubit}", _qubit_frequency(det, qubit))
    d_a = guard(f"Δ_a{qubit}", det.delta[("a", qubit)])
    d_b = guard(f"Δ_b{qubit}", det.delta[("b", qubit)])
    d_a2 = guard(f"Δ_a{qubit}+α_{qubit}", d_a + alpha)
    d_b2 = guard(f"Δ_b{qubit}+α_{qubit}", d_b + alpha)
    g4 = g_a ** 2 * g_b ** 2
    return 2.0 * g4 / (omega * d_a2 * d_b2) + 2.0 * g4 / (omega * d_a * d_b)


TERMS = ("xi2", "xi3_a", "xi3_b", "xi4s_a", "xi4s_b", "xi4c0_x", "xi4c0_y", "xi4c1_x", "xi4c1_y", "xi4ab")


@dataclass(frozen=True)
class ZZBreakdown:
    """Static ZZ terms in MHz; a term at a pole is NaN and flagged.

    The cross-resonator correction is ξ4c0 − ξ4c1 for the printed forms
    and ξ4ab for ``rayleigh_schrodinger``.
    """
    xi2: float
    xi3_a: float
    xi3_b: float
    xi4s_a: float
    xi4s_b: float
    xi4c0_x: float
    xi4c0_y: float
    xi4c1_x: float
    xi4c1_y: float
    xi4ab: float
    xi_total: float
    near_pole: dict[str, bool] = field(default_factory=dict)
    at_pole: tuple[str, ...] = ()
    include_cross_kerr: bool = False
    zz_form: ZZForm = "literal"

    @property
    def xi3(self) -> float:
        return self.xi3_a + self.xi3_b

    @property
    def xi4s(self) -> float:
        return self.xi4s_a + self.xi4s_b

    @property
    def xi4c0(self) -> float:
        return self.xi4c0_x + self.xi4c0_y

    @property
    def xi4c1(self) -> float:
        return self.xi4c1_x + self.xi4c1_y

    @property
    def unreliable(self) -> bool:
        return bool(self.at_pole)

    @property
    def any_near_pole(self) -> bool:
        return any(self.near_pole.values())

    def as_row(self) -> dict[str, float | bool]:
        row: dict[str, float | bool] = {"xi2_mhz": self.xi2, "xi3_mhz": self.xi3, "xi4s_mhz": self.xi4s}
        if self.include_cross_kerr and self.zz_form == "rayleigh_schrodinger":
            row["xi4ab_mhz"] = self.xi4ab
        elif self.include_cross_kerr:
            row.update({"xi4c0_mhz": self.xi4c0, "xi4c1_mhz": self.xi4c1})
        row.update({"xi_total_mhz": self.xi_total, "near_pole": self.any_near_pole or self.unreliable})
        return row


def zz_total(params: CircuitParams, bias: FluxBias = ZERO_BIAS, include_cross_kerr: bool = False,
             zz_form: ZZForm = "literal") -> ZZBreakdown:
    """ξ2 + Σξ3 + Σξ4s, plus the cross-resonator correction when requested.

    The printed forms add Σξ4c0 − Σξ4c1; ``rayleigh_schrodinger`` adds ξ4ab.
    """
    if zz_form not in ZZ_FORMS:
        raise DomainError(f"unknown ZZ form {zz_form!r}")
    evaluators = {
        "xi2": lambda g: zz_second_order(params, bias, g),
        "xi3_a": lambda g: zz_third_order(params, bias, "a", zz_form, g),
        "xi3_b": lambda g: zz_third_order(params, bias, "b", zz_form, g),
        "xi4s_a": lambda g: zz_fourth_self(params, bias, "a", g, zz_form),
        "xi4s_b": lambda g: zz_fourth_self(params, bias, "b", g, zz_form),
    }
    if include_cross_kerr and zz_form == "rayleigh_schrodinger":
        evaluators["xi4ab"] = lambda g: zz_two_resonator(params, bias, g)
    elif include_cross_kerr:
        evaluators.update({
            "xi4c0_x": lambda g: zz_cross_kerr_ground(params, bias, "x", g),
            "xi4c0_y": lambda g: zz_cross_kerr_ground(params, bias, "y", g),
            "xi4c1_x": lambda g: zz_cross_kerr_excited(params, bias, "x", g),
            "xi4c1_y": lambda g: zz_cross_kerr_excited(params, bias, "y", g),
        })

    values = {name: 0.0 for name in TERMS}
    near_pole = {name: False for name in TERMS}
    at_pole: list[str] = []
    for name, evaluate in evaluators.items():
        guard = PoleGuard()
        try:
            values[name] = evaluate(guard) * 1e3
        except PoleError as e:
            _logger.debug(f"{name} at pole: {e}")
            values[name] = math.nan
            at_pole.append(name)
            near_pole[name] = True
            continue
        near_pole[name] = guard.near_pole

    total = (values["xi2"] + values["xi3_a"] + values["xi3_b"] + values["xi4s_a"] + values["xi4s_b"]
             + values["xi4c0_x"] + values["xi4c0_y"] - values["xi4c1_x"] - values["xi4c1_y"] + values["xi4ab"])
    return ZZBreakdown(**values, xi_total=total, near_pole=near_pole, at_pole=tuple(at_pole),
                       include_cross_kerr=include_cross_kerr, zz_form=zz_form)


@dataclass(frozen=True, order=True)
class Pole:
    """A vanishing ZZ denominator; ``divergent`` is False when the ladder stays finite across it."""
    omega_y: float
    condition: str = field(compare=False)
    terms: tuple[str, ...] = field(compare=False)
    mechanism: str = field(compare=False)
    divergent: bool = field(default=True, compare=False)


def pole_catalog(params: CircuitParams, omega_x: float | None = None,
                 omega_y_range: tuple[float, float] | None = None,
                 include_cross_kerr: bool = True, zz_form: ZZForm = "literal") -> list[Pole]:
    """ω_y locations where a ZZ denominator vanishes for fixed ω_x, sorted.

    ``omega_x`` defaults to the zero-bias qubit frequency; ``omega_y_range``
    keeps only poles inside [lo, hi]. Removable points are listed with
    ``divergent=False``.
    """
    if zz_form not in ZZ_FORMS:
        raise DomainError(f"unknown ZZ form {zz_form!r}")
    if omega_x is None:
        omega_x = flux_tuned_frequency(params)[0]
    a_x, a_y = params.alpha_x, params.alpha_y
    w_a, w_b = params.omega_a, params.omega_b
    derived = zz_form == "rayleigh_schrodinger"
    exchange_terms = ("xi2", "xi3", "xi4s", "xi4ab") if derived and include_cross_kerr else ("xi2", "xi3", "xi4s")
    poles = [
        Pole(omega_x, "Δ_xy = 0", ("xi3", "xi4s"), "|0100⟩↔|0010⟩ single-excitation exchange", divergent=False),
        Pole(omega_x + a_x, "Δ_xy = α_x", exchange_terms, "|0200⟩↔|0110⟩ resonant state exchange"),
        Pole(omega_x - a_y, "Δ_xy = −α_y", exchange_terms, "|0020⟩↔|0110⟩ resonant state exchange"),
    ]
    for lam, w in (("a", w_a), ("b", w_b)):
        poles.append(Pole(w, f"Δ_{lam}y = 0", exchange_terms[1:],
                          f"qubit y resonant with resonator {lam} (dispersive breakdown)"))
        # α_λ is fourth order in g/Δ and left out of the location
        condition = f"Δ_{lam}y + Δ_{lam}x = 0" if derived else f"Δ_{lam}y + Δ_{lam}x = α_{lam}"
        poles.append(Pole(2.0 * w - omega_x, condition, ("xi4s",),
                          f"|0110⟩ two-photon exchange with resonator {lam}", divergent=False))
    if include_cross_kerr and derived:
        poles.append(Pole(w_a + w_b - omega_x, "ω_x + ω_y = ω_a + ω_b", ("xi4ab",),
                          "|0110⟩↔|1001⟩ exchange of both excitations with the resonators", divergent=False))
    elif include_cross_kerr:
        poles += [
            Pole(w_a - a_y, "ω_y + α_y = ω_a", ("xi4c1",),
                 "qubit y 1→2 transition resonant with resonator a (cross-Kerr virtual exchange)"),
            Pole(w_b - a_y, "ω_y + α_y = ω_b", ("xi4c1",),
                 "qubit y 1→2 transition resonant with resonator b (cross-Kerr virtual exchange)"),
            Pole(0.5 * (w_a + w_b - a_y), "2ω_y + α_y = ω_a + ω_b", ("xi4c0",),
                 "|0020⟩↔|1001⟩ two-photon cross-Kerr exchange"),
        ]
    if omega_y_range is not None:
        lo, hi = omega_y_range
        poles = [p for p in poles if lo <= p.omega_y <= hi]
    return sorted(poles)
