"""Physical circuit -> abstract model parameters.

Frequencies, anharmonicities and couplings are ω/2π values in GHz throughout.
Capacitances are in farads, inductances in henries, Josephson energies in GHz
(E_J/h).
"""
from __future__ import annotations

import dataclasses
import logging
import math
from dataclasses import dataclass, field
from typing import Literal, NamedTuple

import numpy as np
from scipy import constants

from errors import DomainError, NumericError

_logger = logging.getLogger(__name__)

InverseMode = Literal["exact", "approximate", "approximate-self"]

# E_J/E_C below this leaves the transmon regime.
TRANSMON_MIN_RATIO = 20.0
# Each level of C_ab << C_xy << C_λβ << C_x,C_y << C_a,C_b must differ by this factor.
HIERARCHY_RATIO = 5.0
MAX_CONDITION = 1e12

DEVICE_ORDER = ("a", "b", "x", "y")


@dataclass(frozen=True)
class CapacitanceNetwork:
    C_a: float
    C_b: float
    C_x: float
    C_y: float
    C_ab: float
    C_xy: float
    C_ax: float
    C_ay: float
    C_bx: float
    C_by: float
    L_a: float
    L_b: float
    EJ_x: float
    EJ_y: float

    def __post_init__(self):
        for name in ("C_a", "C_b", "C_x", "C_y", "L_a", "L_b"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise DomainError(f"{name} must be positive, got {value!r}")
        for name in ("C_ab", "C_xy", "C_ax", "C_ay", "C_bx", "C_by", "EJ_x", "EJ_y"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value >= 0):
                raise DomainError(f"{name} must be non-negative, got {value!r}")

    @classmethod
    def from_femtofarads(cls, *, L_a_nH: float, L_b_nH: float, EJ_x: float, EJ_y: float,
                         **caps_fF: float) -> "CapacitanceNetwork":
        caps = {name: value * 1e-15 for name, value in caps_fF.items()}
        return cls(L_a=L_a_nH * 1e-9, L_b=L_b_nH * 1e-9, EJ_x=EJ_x, EJ_y=EJ_y, **caps)

    def scaled_mutuals(self, s: float) -> "CapacitanceNetwork":
        return dataclasses.replace(
            self,
            C_ab=self.C_ab * s, C_xy=self.C_xy * s,
            C_ax=self.C_ax * s, C_ay=self.C_ay * s,
            C_bx=self.C_bx * s, C_by=self.C_by * s,
        )

    def hierarchy_violations(self, ratio: float = HIERARCHY_RATIO) -> list[str]:
        """Return a message per broken link of C_ab << C_xy << C_λβ << C_x,C_y << C_a,C_b."""
        levels = [
            ("C_ab", (self.C_ab,)),
            ("C_xy", (self.C_xy,)),
            ("C_λβ", (self.C_ax, self.C_ay, self.C_bx, self.C_by)),
            ("C_x,C_y", (self.C_x, self.C_y)),
            ("C_a,C_b", (self.C_a, self.C_b)),
        ]
        out: list[str] = []
        for (lo_name, lo), (hi_name, hi) in zip(levels, levels[1:]):
            if max(lo) > 0 and min(hi) < ratio * max(lo):
                out.append(f"{lo_name} is not << {hi_name} ({max(lo):.3g} vs {min(hi):.3g})")
        return out

    def respects_hierarchy(self, ratio: float = HIERARCHY_RATIO) -> bool:
        return not self.hierarchy_violations(ratio)


@dataclass(frozen=True)
class FluxBias:
    phi_x: float = 0.0
    phi_y: float = 0.0

    def __post_init__(self):
        if not (math.isfinite(self.phi_x) and math.isfinite(self.phi_y)):
            raise DomainError(f"flux bias must be finite, got ({self.phi_x!r}, {self.phi_y!r})")


ZERO_BIAS = FluxBias()


@dataclass(frozen=True)
class CircuitParams:
    omega_a: float
    omega_b: float
    omega_x_max: float
    omega_y_max: float
    alpha_x: float
    alpha_y: float
    g_ax: float
    g_ay: float
    g_bx: float
    g_by: float
    g_xy: float
    g_ab: float
    warnings: tuple[str, ...] = field(default=(), compare=False)

    def __post_init__(self):
        for f in dataclasses.fields(self):
            if f.name == "warnings":
                continue
            value = getattr(self, f.name)
            if not math.isfinite(value):
                raise DomainError(f"{f.name} must be finite, got {value!r}")
        if self.alpha_x > 0 or self.alpha_y > 0:
            raise DomainError("anharmonicities must be non-positive")
        for name in ("g_ax", "g_ay", "g_bx", "g_by", "g_xy", "g_ab"):
            if getattr(self, name) < 0:
                raise DomainError(f"{name} must be non-negative")

    @property
    def qubit_resonator_couplings(self) -> dict[tuple[str, str], float]:
        return {("a", "x"): self.g_ax, ("a", "y"): self.g_ay,
                ("b", "x"): self.g_bx, ("b", "y"): self.g_by}

    def g(self, resonator: str, qubit: str) -> float:
        return self.qubit_resonator_couplings[(resonator, qubit)]

    def resonator_frequency(self, resonator: str) -> float:
        return self.omega_a if resonator == "a" else self.omega_b

    def alpha(self, qubit: str) -> float:
        return self.alpha_x if qubit == "x" else self.alpha_y

    def replace(self, **changes) -> "CircuitParams":
        return dataclasses.replace(self, **changes)

    def with_qubit_frequencies(self, omega_x: float | None = None,
                               omega_y: float | None = None) -> "CircuitParams":
        """Fix the zero-bias qubit frequencies (used when sweeping ω directly)."""
        changes = {}
        if omega_x is not None:
            changes["omega_x_max"] = omega_x
        if omega_y is not None:
            changes["omega_y_max"] = omega_y
        return self.replace(**changes)

    def scaled_couplings(self, s: float) -> "CircuitParams":
        """Scale the four qubit-resonator couplings by s."""
        return self.replace(g_ax=self.g_ax * s, g_ay=self.g_ay * s,
                            g_bx=self.g_bx * s, g_by=self.g_by * s)

    def swapped_qubits(self) -> "CircuitParams":
        return self.replace(
            omega_x_max=self.omega_y_max, omega_y_max=self.omega_x_max,
            alpha_x=self.alpha_y, alpha_y=self.alpha_x,
            g_ax=self.g_ay, g_ay=self.g_ax, g_bx=self.g_by, g_by=self.g_bx,
        )

    def swapped_resonators(self) -> "CircuitParams":
        return self.replace(omega_a=self.omega_b, omega_b=self.omega_a,
                            g_ax=self.g_bx, g_bx=self.g_ax, g_ay=self.g_by, g_by=self.g_ay)

    def ordering_warnings(self, bias: FluxBias = ZERO_BIAS) -> list[str]:
        omega_x, omega_y = flux_tuned_frequency(self, bias)
        if self.omega_a < omega_x <= omega_y < self.omega_b:
            return []
        return [f"frequency ordering ω_a < ω_x ≤ ω_y < ω_b violated "
                f"({self.omega_a:.4g}, {omega_x:.4g}, {omega_y:.4g}, {self.omega_b:.4g} GHz)"]

    def as_dict(self) -> dict[str, float]:
        d = dataclasses.asdict(self)
        d.pop("warnings")
        return d


# Reference device, GHz.
FIG2_PARAMS = CircuitParams(
    omega_a=4.10, omega_b=5.20,
    omega_x_max=4.56, omega_y_max=5.12,
    alpha_x=-0.175, alpha_y=-0.195,
    g_ax=0.032, g_ay=0.032, g_bx=0.030, g_by=0.030,
    g_xy=0.001, g_ab=0.0001,
)


class QubitFrequency(NamedTuple):
    omega: float
    alpha: float
    valid: bool


def charging_energy(C: float) -> float:
    """E_C/h = e²/(2C h) in GHz for a capacitance in farads."""
    if not (C > 0):
        raise DomainError(f"capacitance must be positive, got {C!r}")
    return constants.e ** 2 / (2.0 * C) / constants.h / 1e9


def qubit_frequency(EJ: float, EC: float) -> QubitFrequency:
    """Transmon 0-1 frequency √(8 E_J E_C) − E_C and anharmonicity −E_C (GHz)."""
    if EJ < 0 or EC < 0:
        raise DomainError(f"energies must be non-negative, got EJ={EJ!r}, EC={EC!r}")
    omega = math.sqrt(8.0 * EJ * EC) - EC
    valid = EC > 0 and EJ / EC >= TRANSMON_MIN_RATIO
    if not valid:
        _logger.warning(f"EJ/EC = {EJ / EC if EC else float('inf'):.3g} is outside the transmon regime")
    return QubitFrequency(omega, -EC, valid)


def josephson_energy_for(omega: float, EC: float) -> float:
    """Inverse of qubit_frequency: the E_J (GHz) giving the 0-1 frequency omega."""
    if not (EC > 0):
        raise DomainError(f"EC must be positive, got {EC!r}")
    if omega + EC < 0:
        raise DomainError(f"frequency {omega!r} GHz is below -EC")
    return (omega + EC) ** 2 / (8.0 * EC)


def resonator_frequency(L: float, C: float) -> float:
    """1/(2π√(LC)) in GHz."""
    if not (L > 0 and C > 0):
        raise DomainError(f"L and C must be positive, got L={L!r}, C={C!r}")
    return 1.0 / (2.0 * math.pi * math.sqrt(L * C)) / 1e9


def _pair_coupling(C_mutual: float, C_1: float, C_2: float, omega_1: float, omega_2: float) -> float:
    return 0.5 * C_mutual / math.sqrt(C_1 * C_2) * math.sqrt(omega_1 * omega_2)


def couplings_from_network(net: CapacitanceNetwork) -> CircuitParams:
    """Frequencies and all six pairwise couplings of the network.

    g_ab and g_xy include the enhancement through the intermediate devices:
    g_ab = ½ (C_ab + C_ax C_bx/C_x + C_ay C_by/C_y)/√(C_a C_b) · √(ω_a ω_b), likewise for g_xy.
    """
    omega_a = resonator_frequency(net.L_a, net.C_a)
    omega_b = resonator_frequency(net.L_b, net.C_b)
    qx = qubit_frequency(net.EJ_x, charging_energy(net.C_x))
    qy = qubit_frequency(net.EJ_y, charging_energy(net.C_y))

    warnings: list[str] = []
    if not (qx.valid and qy.valid):
        warnings.append("qubit outside the transmon regime (EJ/EC < 20)")
    if qx.omega <= 0 or qy.omega <= 0:
        raise DomainError("qubit frequency is not positive; check EJ and C")
    omega_x, omega_y = qx.omega, qy.omega

    g_ax = _pair_coupling(net.C_ax, net.C_a, net.C_x, omega_a, omega_x)
    g_ay = _pair_coupling(net.C_ay, net.C_a, net.C_y, omega_a, omega_y)
    g_bx = _pair_coupling(net.C_bx, net.C_b, net.C_x, omega_b, omega_x)
    g_by = _pair_coupling(net.C_by, net.C_b, net.C_y, omega_b, omega_y)
    ab_bracket = net.C_ab + net.C_ax * net.C_bx / net.C_x + net.C_ay * net.C_by / net.C_y
    xy_bracket = net.C_xy + net.C_ax * net.C_ay / net.C_a + net.C_bx * net.C_by / net.C_b
    g_ab = _pair_coupling(ab_bracket, net.C_a, net.C_b, omega_a, omega_b)
    g_xy = _pair_coupling(xy_bracket, net.C_x, net.C_y, omega_x, omega_y)

    for message in net.hierarchy_violations():
        _logger.warning(f"capacitance hierarchy: {message}")
        warnings.append(f"capacitance hierarchy: {message}")

    params = CircuitParams(
        omega_a=omega_a, omega_b=omega_b,
        omega_x_max=omega_x, omega_y_max=omega_y,
        alpha_x=qx.alpha, alpha_y=qy.alpha,
        g_ax=g_ax, g_ay=g_ay, g_bx=g_bx, g_by=g_by,
        g_xy=g_xy, g_ab=g_ab,
    )
    for message in params.ordering_warnings():
        _logger.warning(message)
        warnings.append(message)
    return params.replace(warnings=tuple(warnings))


def capacitance_matrix(net: CapacitanceNetwork) -> np.ndarray:
    """Maxwell capacitance matrix in device order (a, b, x, y)."""
    C11 = net.C_a + net.C_ab + net.C_ax + net.C_ay
    C22 = net.C_ab + net.C_b + net.C_bx + net.C_by
    C33 = net.C_ax + net.C_bx + net.C_x + net.C_xy
    C44 = net.C_ay + net.C_by + net.C_xy + net.C_y
    return np.array([
        [C11, -net.C_ab, -net.C_ax, -net.C_ay],
        [-net.C_ab, C22, -net.C_bx, -net.C_by],
        [-net.C_ax, -net.C_bx, C33, -net.C_xy],
        [-net.C_ay, -net.C_by, -net.C_xy, C44],
    ])


def _approximate_inverse(net: CapacitanceNetwork, Ca: float, Cb: float, Cx: float, Cy: float) -> np.ndarray:
    A = np.empty((4, 4))
    A[0, 0] = Cb * Cx * Cy
    A[1, 1] = Ca * Cx * Cy
    A[2, 2] = Ca * Cb * Cy
    A[3, 3] = Ca * Cb * Cx
    A[0, 1] = net.C_ab * Cx * Cy + net.C_ax * net.C_bx * Cy + net.C_ay * net.C_by * Cx
    A[0, 2] = Cb * Cy * net.C_ax
    A[0, 3] = Cb * Cx * net.C_ay
    A[1, 2] = Ca * Cy * net.C_bx
    A[1, 3] = Ca * Cx * net.C_by
    A[2, 3] = net.C_xy * Ca * Cb + Ca * net.C_bx * net.C_by + Cb * net.C_ax * net.C_ay
    for i in range(4):
        for j in range(i):
            A[i, j] = A[j, i]
    return A / (Ca * Cb * Cx * Cy)


def capacitance_inverse(net: CapacitanceNetwork, mode: InverseMode = "exact") -> np.ndarray:
    """Inverse capacitance matrix, order (a, b, x, y).

    ``approximate`` evaluates the leading-order adjugate with the node totals
    (diagonal entries) as C_a..C_y; ``approximate-self`` uses the bare self
    capacitances instead.
    """
    M = capacitance_matrix(net)
    if mode == "exact":
        cond = np.linalg.cond(M)
        if not np.isfinite(cond) or cond > MAX_CONDITION:
            raise NumericError(f"capacitance matrix is singular (condition estimate {cond:.3e})")
        return np.linalg.inv(M)
    if mode == "approximate":
        return _approximate_inverse(net, *np.diag(M))
    if mode == "approximate-self":
        return _approximate_inverse(net, net.C_a, net.C_b, net.C_x, net.C_y)
    raise DomainError(f"unknown inverse mode {mode!r}")


def _clip_phase(phi: float, name: str) -> float:
    limit = math.pi / 2
    if abs(phi) > limit:
        _logger.warning(f"{name}={phi:.4g} outside the single-well branch, clipped to ±π/2")
        return math.copysign(limit, phi)
    return phi


def tuned_frequency(omega_max: float, alpha: float, phi: float, name: str = "phi") -> float:
    """(ω_max + |α|)·√|cos φ| − |α|."""
    phi = _clip_phase(phi, name)
    return (omega_max + abs(alpha)) * math.sqrt(abs(math.cos(phi))) - abs(alpha)


def flux_for_frequency(omega_max: float, alpha: float, omega: float) -> float:
    """The φ in [0, π/2] at which tuned_frequency returns omega."""
    if not (-abs(alpha) <= omega <= omega_max):
        raise DomainError(f"frequency {omega!r} GHz not reachable (max {omega_max!r} GHz)")
    ratio = ((omega + abs(alpha)) / (omega_max + abs(alpha))) ** 2
    return math.acos(min(1.0, max(0.0, ratio)))


def flux_tuned_frequency(params: CircuitParams, bias: FluxBias = ZERO_BIAS) -> tuple[float, float]:
    """Qubit frequencies (ω_x, ω_y) at the given node phases."""
    return (tuned_frequency(params.omega_x_max, params.alpha_x, bias.phi_x, "phi_x"),
            tuned_frequency(params.omega_y_max, params.alpha_y, bias.phi_y, "phi_y"))
