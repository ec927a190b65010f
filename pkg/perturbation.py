"""Dispersive (Schrieffer-Wolff) decoupling of the qubits from both resonators.

Every function takes the circuit parameters and a flux bias, tunes the qubit
frequencies and evaluates closed-form second-order results. All values are GHz.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import NamedTuple

from circuit_model import ZERO_BIAS, CircuitParams, FluxBias, flux_tuned_frequency
from errors import DomainError, PoleError

_logger = logging.getLogger(__name__)

POLE_HARD_GHZ = 1e-6    # 1 kHz
POLE_SOFT_GHZ = 1e-2    # 10 MHz
DISPERSIVE_RATIO = 0.25

RESONATORS = ("a", "b")
QUBITS = ("x", "y")
PAIRS = tuple((lam, beta) for lam in RESONATORS for beta in QUBITS)


class PoleGuard:
    """Checks denominators: raises inside the hard guard, records those inside the soft one."""

    def __init__(self, hard: float = POLE_HARD_GHZ, soft: float = POLE_SOFT_GHZ):
        self.hard = hard
        self.soft = soft
        self.near: list[str] = []

    def __call__(self, term: str, denominator: float) -> float:
        if abs(denominator) < self.hard:
            raise PoleError(term, denominator)
        if abs(denominator) < self.soft and term not in self.near:
            self.near.append(term)
        return denominator

    @property
    def near_pole(self) -> bool:
        return bool(self.near)


@dataclass(frozen=True)
class DetuningSet:
    omega_x: float
    omega_y: float
    delta: dict[tuple[str, str], float]   # Δ_λβ = ω_β − ω_λ
    sigma: dict[tuple[str, str], float]   # Σ_λβ = ω_β + ω_λ
    delta_xy: float
    delta_ab: float
    dispersive: dict[tuple[str, str], bool]

    @property
    def non_dispersive(self) -> list[tuple[str, str]]:
        return [pair for pair, ok in self.dispersive.items() if not ok]


def detunings_at(params: CircuitParams, omega_x: float, omega_y: float) -> DetuningSet:
    """Detunings for explicit qubit frequencies (resonators bare)."""
    qubit = {"x": omega_x, "y": omega_y}
    delta = {(lam, beta): qubit[beta] - params.resonator_frequency(lam) for lam, beta in PAIRS}
    sigma = {(lam, beta): qubit[beta] + params.resonator_frequency(lam) for lam, beta in PAIRS}
    if any(s <= 0 for s in sigma.values()):
        raise DomainError("frequencies must be positive")
    dispersive = {}
    for pair in PAIRS:
        g = params.g(*pair)
        d = abs(delta[pair])
        dispersive[pair] = g == 0.0 or (d > 0 and g / d < DISPERSIVE_RATIO)
    return DetuningSet(
        omega_x=omega_x, omega_y=omega_y, delta=delta, sigma=sigma,
        delta_xy=omega_y - omega_x, delta_ab=params.omega_b - params.omega_a,
        dispersive=dispersive,
    )


def detunings(params: CircuitParams, bias: FluxBias = ZERO_BIAS) -> DetuningSet:
    return detunings_at(params, *flux_tuned_frequency(params, bias))


class DecoupledFrequencies(NamedTuple):
    omega_d_a: float
    omega_d_b: float
    omega_d_x: float
    omega_d_y: float
    near_pole: tuple[str, ...]


def _pair_shift(params: CircuitParams, det: DetuningSet, pair: tuple[str, str], guard: PoleGuard) -> float:
    """g²(1/Δ − 1/Σ) for one resonator-qubit pair."""
    g = params.g(*pair)
    if g == 0.0:
        return 0.0
    d = guard(f"Δ_{''.join(pair)}", det.delta[pair])
    return g * g * (1.0 / d - 1.0 / det.sigma[pair])


def _frequencies(params: CircuitParams, det: DetuningSet, guard: PoleGuard) -> DecoupledFrequencies:
    shift = {pair: _pair_shift(params, det, pair, guard) for pair in PAIRS}
    return DecoupledFrequencies(
        omega_d_a=params.omega_a - shift[("a", "x")] - shift[("a", "y")],
        omega_d_b=params.omega_b - shift[("b", "x")] - shift[("b", "y")],
        omega_d_x=det.omega_x + shift[("a", "x")] + shift[("b", "x")],
        omega_d_y=det.omega_y + shift[("a", "y")] + shift[("b", "y")],
        near_pole=tuple(guard.near),
    )


def decoupled_frequencies(params: CircuitParams, bias: FluxBias = ZERO_BIAS) -> DecoupledFrequencies:
    """Dressed frequencies: qubits gain Σ_λ g²(1/Δ − 1/Σ), resonators lose the same per pair."""
    return _frequencies(params, detunings(params, bias), PoleGuard())


class EffectiveCoupling(NamedTuple):
    value: float
    induced: dict[str, float]
    near_pole: tuple[str, ...]


def _induced_xy(params: CircuitParams, det: DetuningSet, guard: PoleGuard) -> dict[str, float]:
    out = {}
    for lam in RESONATORS:
        gg = params.g(lam, "x") * params.g(lam, "y")
        if gg == 0.0:
            out[lam] = 0.0
            continue
        total = 0.0
        for beta in QUBITS:
            pair = (lam, beta)
            d = guard(f"Δ_{lam}{beta}", det.delta[pair])
            total += gg / d - gg / det.sigma[pair]
        out[lam] = 0.5 * total
    return out


def _coupling_from(params: CircuitParams, det: DetuningSet, guard: PoleGuard) -> EffectiveCoupling:
    induced = _induced_xy(params, det, guard)
    return EffectiveCoupling(induced["a"] + induced["b"] + params.g_xy, induced, tuple(guard.near))


def effective_coupling_g_d(params: CircuitParams, bias: FluxBias = ZERO_BIAS) -> EffectiveCoupling:
    """g_xy + Σ_λ g_in_λ with g_in_λ = ½ Σ_β g_λx g_λy (1/Δ_λβ − 1/Σ_λβ)."""
    return _coupling_from(params, detunings(params, bias), PoleGuard())


def _resonator_coupling(params: CircuitParams, det: DetuningSet, guard: PoleGuard) -> float:
    total = 0.0
    for beta in QUBITS:
        gg = params.g("a", beta) * params.g("b", beta)
        if gg == 0.0:
            continue
        for lam in RESONATORS:
            d = guard(f"Δ_{lam}{beta}", det.delta[(lam, beta)])
            total += gg / d - gg / det.sigma[(lam, beta)]
    return 0.5 * total + params.g_ab


def resonator_effective_coupling(params: CircuitParams, bias: FluxBias = ZERO_BIAS) -> float:
    """g_d_ab = ½ Σ_β Σ_λ g_aβ g_bβ (1/Δ_λβ − 1/Σ_λβ) + g_ab."""
    return _resonator_coupling(params, detunings(params, bias), PoleGuard())


def _shift_terms(params: CircuitParams, det: DetuningSet, guard: PoleGuard) -> dict[str, float]:
    out = {}
    for beta in QUBITS:
        alpha = params.alpha(beta)
        total = 0.0
        for lam in RESONATORS:
            g = params.g(lam, beta)
            if g == 0.0:
                continue
            d = guard(f"Δ_{lam}{beta}", det.delta[(lam, beta)])
            total += g * g / (d * d) + g * g / det.sigma[(lam, beta)] ** 2
        out[beta] = total * alpha
    return out


def high_excited_shift(params: CircuitParams, bias: FluxBias = ZERO_BIAS) -> tuple[float, float]:
    """(Δω_x, Δω_y) with Δω_β = α_β Σ_λ g²(1/Δ² + 1/Σ²)."""
    shift = _shift_terms(params, detunings(params, bias), PoleGuard())
    return shift["x"], shift["y"]


def _corrected_coupling(params: CircuitParams, freqs: DecoupledFrequencies, shift: dict[str, float],
                        guard: PoleGuard) -> EffectiveCoupling:
    det_cr = detunings_at(params, freqs.omega_d_x + shift["x"], freqs.omega_d_y + shift["y"])
    return _coupling_from(params, det_cr, guard)


def corrected_coupling_g_cr(params: CircuitParams, bias: FluxBias = ZERO_BIAS) -> EffectiveCoupling:
    """g_d re-evaluated with detunings built from ω_cr_β = ω_d_β + Δω_β (resonators bare)."""
    guard = PoleGuard()
    det = detunings(params, bias)
    freqs = _frequencies(params, det, guard)
    shift = _shift_terms(params, det, guard)
    cr_guard = PoleGuard()
    result = _corrected_coupling(params, freqs, shift, cr_guard)
    return result._replace(near_pole=tuple(dict.fromkeys(guard.near + cr_guard.near)))


@dataclass(frozen=True)
class DecoupledParams:
    omega_x: float
    omega_y: float
    omega_d_a: float
    omega_d_b: float
    omega_d_x: float
    omega_d_y: float
    g_d_xy: float
    g_d_ab: float
    delta_omega_x: float
    delta_omega_y: float
    omega_cr_x: float
    omega_cr_y: float
    g_cr_xy: float
    g_in: dict[str, float] = field(default_factory=dict)
    g_cr_in: dict[str, float] = field(default_factory=dict)
    near_pole: tuple[str, ...] = ()

    def as_row(self) -> dict[str, float]:
        """Flat record in MHz for couplings and shifts, GHz for frequencies."""
        return {
            "omega_x_ghz": self.omega_x, "omega_y_ghz": self.omega_y,
            "omega_d_x_ghz": self.omega_d_x, "omega_d_y_ghz": self.omega_d_y,
            "omega_d_a_ghz": self.omega_d_a, "omega_d_b_ghz": self.omega_d_b,
            "omega_cr_x_ghz": self.omega_cr_x, "omega_cr_y_ghz": self.omega_cr_y,
            "delta_omega_x_mhz": self.delta_omega_x * 1e3, "delta_omega_y_mhz": self.delta_omega_y * 1e3,
            "g_d_mhz": self.g_d_xy * 1e3, "g_cr_mhz": self.g_cr_xy * 1e3,
            "g_in_a_mhz": self.g_in["a"] * 1e3, "g_in_b_mhz": self.g_in["b"] * 1e3,
            "g_d_ab_mhz": self.g_d_ab * 1e3,
        }


def decouple(params: CircuitParams, bias: FluxBias = ZERO_BIAS) -> DecoupledParams:
    """The full decoupled parameter set at one operating point."""
    det = detunings(params, bias)
    for pair in det.non_dispersive:
        _logger.warning(f"pair {''.join(pair)} is not dispersive (g/|Δ| >= {DISPERSIVE_RATIO})")
    guard = PoleGuard()
    freqs = _frequencies(params, det, guard)
    g_d = _coupling_from(params, det, guard)
    g_ab = _resonator_coupling(params, det, guard)
    shift = _shift_terms(params, det, guard)
    g_cr = _corrected_coupling(params, freqs, shift, guard)
    return DecoupledParams(
        omega_x=det.omega_x, omega_y=det.omega_y,
        omega_d_a=freqs.omega_d_a, omega_d_b=freqs.omega_d_b,
        omega_d_x=freqs.omega_d_x, omega_d_y=freqs.omega_d_y,
        g_d_xy=g_d.value, g_d_ab=g_ab,
        delta_omega_x=shift["x"], delta_omega_y=shift["y"],
        omega_cr_x=freqs.omega_d_x + shift["x"], omega_cr_y=freqs.omega_d_y + shift["y"],
        g_cr_xy=g_cr.value, g_in=g_d.induced, g_cr_in=g_cr.induced,
        near_pole=tuple(guard.near),
    )


@dataclass(frozen=True)
class NonlinearCoefficients:
    """Coefficients generated by transforming the qubit Duffing terms, keyed by (λ, β) or β."""
    self_kerr: dict[str, float]
    cross_kerr_normal: dict[tuple[str, str], float]     # c†c a†a
    cross_kerr_anti: dict[tuple[str, str], float]       # c c† a†a
    double_virtual: dict[tuple[str, str], float]        # c†c† a a + c c a† a†
    exchange_assisted: dict[tuple[str, str], float]     # c† a† a a + c a† a† a
    near_pole: tuple[str, ...] = ()

    def vacuum_shift(self) -> dict[str, float]:
        """Qubit level shift with every resonator in vacuum.

        c c† = c†c + 1, so at ⟨c†c⟩ = 0 the normal-ordered cross-Kerr drops
        out and each anti-normal-ordered one leaves K_anti a†a.
        """
        return {beta: sum(self.cross_kerr_anti[(lam, beta)] for lam in RESONATORS) for beta in QUBITS}


def transformed_nonlinear_terms(params: CircuitParams, bias: FluxBias = ZERO_BIAS) -> NonlinearCoefficients:
    det = detunings(params, bias)
    guard = PoleGuard()
    self_kerr = {beta: 0.0 for beta in QUBITS}
    normal, anti, double, assisted = {}, {}, {}, {}
    for lam, beta in PAIRS:
        pair = (lam, beta)
        g, alpha = params.g(lam, beta), params.alpha(beta)
        if g == 0.0:
            normal[pair] = anti[pair] = double[pair] = assisted[pair] = 0.0
            continue
        d = guard(f"Δ_{lam}{beta}", det.delta[pair])
        s = det.sigma[pair]
        self_kerr[beta] += g * g * alpha / (s * s) - g * g * alpha / (d * d)
        normal[pair] = 2.0 * g * g * alpha / (d * d)
        anti[pair] = 2.0 * g * g * alpha / (s * s)
        double[pair] = g * g * alpha / (2.0 * d * d)
        assisted[pair] = g * alpha / d
    return NonlinearCoefficients(self_kerr=self_kerr, cross_kerr_normal=normal, cross_kerr_anti=anti,
                                 double_virtual=double, exchange_assisted=assisted,
                                 near_pole=tuple(guard.near))


class DispersiveShift(NamedTuple):
    kappa: float
    chi: float


def _transition_shift(g: float, delta: float, alpha: float, j: int, guard: PoleGuard) -> float:
    """χ^{j−1,j} = j g² / (Δ + (j−1) α); zero for j = 0."""
    if j <= 0 or g == 0.0:
        return 0.0
    d = guard(f"Δ+{j - 1}α", delta + (j - 1) * alpha)
    return j * g * g / d


def dispersive_shifts_chi(params: CircuitParams, bias: FluxBias, resonator: str, qubit: str,
                          level: int, n_levels: int | None = None) -> DispersiveShift:
    """Lamb-type shift κ_j = χ^{j−1,j} and dispersive shift χ_j = χ^{j−1,j} − χ^{j,j+1}.

    χ^{j,j+1} is taken as zero when level j+1 is outside ``n_levels``.
    """
    if level < 0:
        raise DomainError(f"level must be non-negative, got {level}")
    if resonator not in RESONATORS or qubit not in QUBITS:
        raise DomainError(f"unknown pair ({resonator!r}, {qubit!r})")
    det = detunings(params, bias)
    g = params.g(resonator, qubit)
    alpha = params.alpha(qubit)
    delta = det.delta[(resonator, qubit)]
    guard = PoleGuard()
    lower = _transition_shift(g, delta, alpha, level, guard)
    if n_levels is not None and level + 1 >= n_levels:
        upper = 0.0
    else:
        upper = _transition_shift(g, delta, alpha, level + 1, guard)
    return DispersiveShift(kappa=lower, chi=lower - upper)
