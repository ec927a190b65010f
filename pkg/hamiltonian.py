"""Truncated matrix form of the two-resonator / two-qubit Hamiltonian.

Basis kets are |m_a m_x m_y m_b>, flattened in that device order with m_a
most significant (the np.kron order). Energies are GHz (ω/2π); the vacuum
offset is dropped.
"""
from __future__ import annotations

import functools
import itertools
import logging
from dataclasses import dataclass, field
from typing import Literal

import numpy as np
import pandas as pd

from circuit_model import ZERO_BIAS, CircuitParams, FluxBias, flux_tuned_frequency
from dataset_io import write_dataset
from errors import DomainError

_logger = logging.getLogger(__name__)

CouplingConvention = Literal["uniform", "bosonic"]
DEVICES = ("a", "x", "y", "b")


@dataclass(frozen=True)
class TruncationScheme:
    n_levels_a: int = 4
    n_levels_x: int = 3
    n_levels_y: int = 3
    n_levels_b: int = 4

    def __post_init__(self):
        for name in ("n_levels_a", "n_levels_x", "n_levels_y", "n_levels_b"):
            value = getattr(self, name)
            if not isinstance(value, (int, np.integer)) or value < 2:
                raise DomainError(f"{name} must be an integer >= 2, got {value!r}")

    @classmethod
    def parse(cls, text: str) -> "TruncationScheme":
        """Parse an 'a,x,y,b' level-count list."""
        parts = [p.strip() for p in text.split(",")]
        if len(parts) != 4:
            raise DomainError(f"truncation needs four counts a,x,y,b, got {text!r}")
        try:
            a, x, y, b = (int(p) for p in parts)
        except ValueError:
            raise DomainError(f"truncation counts must be integers, got {text!r}") from None
        return cls(n_levels_a=a, n_levels_x=x, n_levels_y=y, n_levels_b=b)

    @property
    def levels(self) -> tuple[int, int, int, int]:
        return (self.n_levels_a, self.n_levels_x, self.n_levels_y, self.n_levels_b)

    @property
    def dimension(self) -> int:
        return int(np.prod(self.levels))

    def __str__(self) -> str:
        return ",".join(str(n) for n in self.levels)


DEFAULT_TRUNCATION = TruncationScheme()


@dataclass(frozen=True, order=True)
class BasisIndex:
    m_a: int
    m_x: int
    m_y: int
    m_b: int

    @classmethod
    def from_label(cls, label: str) -> "BasisIndex":
        """'0110' -> BasisIndex(0, 1, 1, 0)."""
        if len(label) != 4 or not label.isdigit():
            raise DomainError(f"state label must be four digits m_a m_x m_y m_b, got {label!r}")
        return cls(*(int(ch) for ch in label))

    @classmethod
    def from_flat(cls, flat: int, trunc: TruncationScheme) -> "BasisIndex":
        if not 0 <= flat < trunc.dimension:
            raise DomainError(f"flat index {flat} outside dimension {trunc.dimension}")
        return cls(*(int(m) for m in np.unravel_index(flat, trunc.levels)))

    @property
    def occupations(self) -> tuple[int, int, int, int]:
        return (self.m_a, self.m_x, self.m_y, self.m_b)

    @property
    def label(self) -> str:
        return "".join(str(m) for m in self.occupations)

    def check(self, trunc: TruncationScheme) -> None:
        for m, n, name in zip(self.occupations, trunc.levels, DEVICES):
            if not 0 <= m < n:
                raise DomainError(f"m_{name}={m} outside truncation ({n} levels)")

    def flat(self, trunc: TruncationScheme) -> int:
        self.check(trunc)
        return int(np.ravel_multi_index(self.occupations, trunc.levels))

    def __str__(self) -> str:
        return f"|{self.label}>"


def basis_states(trunc: TruncationScheme) -> list[BasisIndex]:
    return [BasisIndex(*occ) for occ in itertools.product(*(range(n) for n in trunc.levels))]


@dataclass(frozen=True)
class HamiltonianOptions:
    rwa: bool = False
    coupling_convention: CouplingConvention = "uniform"

    def __post_init__(self):
        if self.coupling_convention not in ("uniform", "bosonic"):
            raise DomainError(f"unknown coupling convention {self.coupling_convention!r}")


@dataclass(frozen=True)
class HamiltonianMatrix:
    matrix: np.ndarray = field(repr=False)
    params: CircuitParams
    bias: FluxBias
    trunc: TruncationScheme
    options: HamiltonianOptions
    omega_x: float
    omega_y: float

    @property
    def dimension(self) -> int:
        return self.matrix.shape[0]

    @property
    def metadata(self) -> dict:
        return {
            "params": self.params.as_dict(),
            "phi_x": self.bias.phi_x,
            "phi_y": self.bias.phi_y,
            "truncation": str(self.trunc),
            "rwa": self.options.rwa,
            "coupling_convention": self.options.coupling_convention,
        }


def number_operator(n: int) -> np.ndarray:
    return np.diag(np.arange(n, dtype=float))


def lowering_operator(n: int, convention: CouplingConvention = "bosonic") -> np.ndarray:
    """Lowering operator on n levels.

    ``bosonic`` has √k matrix elements; ``uniform`` gives every neighbor
    transition unit weight.
    """
    if convention == "bosonic":
        elements = np.sqrt(np.arange(1, n, dtype=float))
    else:
        elements = np.ones(n - 1)
    return np.diag(elements, k=1)


def _embed(op: np.ndarray, position: int, levels: tuple[int, ...]) -> np.ndarray:
    factors = [op if i == position else np.eye(n) for i, n in enumerate(levels)]
    return functools.reduce(np.kron, factors)


def _duffing_diagonal(n: int, omega: float, alpha: float) -> np.ndarray:
    m = np.arange(n, dtype=float)
    return np.diag(omega * m + 0.5 * alpha * m * (m - 1))


def _coupling_term(g: float, A: np.ndarray, B: np.ndarray, rwa: bool) -> np.ndarray:
    term = A.T @ B + A @ B.T
    if not rwa:
        term = term - (A.T @ B.T + A @ B)
    return g * term


def build_hamiltonian(params: CircuitParams, trunc: TruncationScheme = DEFAULT_TRUNCATION,
                      options: HamiltonianOptions | None = None,
                      bias: FluxBias = ZERO_BIAS) -> HamiltonianMatrix:
    """Dense Hamiltonian over the truncated Fock basis.

    Free terms ω m + α m(m−1)/2 plus g(A†B + AB†) − g(A†B† + AB) for every
    coupled pair; the counter-rotating part is dropped when ``options.rwa``.
    Resonator operators are always bosonic.
    """
    options = options or HamiltonianOptions()
    omega_x, omega_y = flux_tuned_frequency(params, bias)
    levels = trunc.levels
    n_a, n_x, n_y, n_b = levels

    c_a = _embed(lowering_operator(n_a), 0, levels)
    a_x = _embed(lowering_operator(n_x, options.coupling_convention), 1, levels)
    a_y = _embed(lowering_operator(n_y, options.coupling_convention), 2, levels)
    c_b = _embed(lowering_operator(n_b), 3, levels)

    H = (
        _embed(_duffing_diagonal(n_a, params.omega_a, 0.0), 0, levels)
        + _embed(_duffing_diagonal(n_x, omega_x, params.alpha_x), 1, levels)
        + _embed(_duffing_diagonal(n_y, omega_y, params.alpha_y), 2, levels)
        + _embed(_duffing_diagonal(n_b, params.omega_b, 0.0), 3, levels)
    )
    pairs = (
        (params.g_ax, c_a, a_x),
        (params.g_ay, c_a, a_y),
        (params.g_bx, c_b, a_x),
        (params.g_by, c_b, a_y),
        (params.g_ab, c_a, c_b),
        (params.g_xy, a_x, a_y),
    )
    for g, A, B in pairs:
        if g != 0.0:
            H = H + _coupling_term(g, A, B, options.rwa)

    _logger.debug(f"built {H.shape[0]}-dim Hamiltonian at ω_x={omega_x:.6f}, ω_y={omega_y:.6f} GHz")
    return HamiltonianMatrix(matrix=H, params=params, bias=bias, trunc=trunc, options=options,
                             omega_x=omega_x, omega_y=omega_y)


def excitation_number_operator(trunc: TruncationScheme) -> np.ndarray:
    """Total excitation number N = Σ m_η."""
    levels = trunc.levels
    return sum(_embed(number_operator(n), i, levels) for i, n in enumerate(levels))


def hermiticity_error(matrix: np.ndarray) -> float:
    """max|H − H†| relative to max|H| (0 for the zero matrix)."""
    scale = float(np.max(np.abs(matrix))) if matrix.size else 0.0
    if scale == 0.0:
        return 0.0
    return float(np.max(np.abs(matrix - matrix.conj().T))) / scale


def bare_energy(index: BasisIndex, params: CircuitParams, bias: FluxBias = ZERO_BIAS,
                trunc: TruncationScheme | None = None) -> float:
    """Σ m_λ ω_λ + Σ [m_β ω_β + m_β(m_β−1) α_β/2]."""
    if trunc is not None:
        index.check(trunc)
    elif min(index.occupations) < 0:
        raise DomainError(f"negative occupation in {index}")
    omega_x, omega_y = flux_tuned_frequency(params, bias)
    return (
        index.m_a * params.omega_a
        + index.m_b * params.omega_b
        + index.m_x * omega_x + 0.5 * index.m_x * (index.m_x - 1) * params.alpha_x
        + index.m_y * omega_y + 0.5 * index.m_y * (index.m_y - 1) * params.alpha_y
    )


def matrix_frame(H: HamiltonianMatrix) -> pd.DataFrame:
    """Non-zero entries of H as (row, col, value) rows."""
    rows, cols = np.nonzero(H.matrix)
    return pd.DataFrame({"row": rows, "col": cols, "value": H.matrix[rows, cols].real})


def dump_matrix_csv(H: HamiltonianMatrix, path: str) -> str:
    """Write the non-zero entries of H and a metadata sidecar (debug export)."""
    frame = matrix_frame(H)
    labels = [s.label for s in basis_states(H.trunc)]
    frame.insert(2, "row_label", [labels[r] for r in frame["row"]])
    frame.insert(3, "col_label", [labels[c] for c in frame["col"]])
    write_dataset(path, frame, {"matrix": H.metadata, "dimension": H.dimension})
    _logger.debug(f"dumped {len(frame)} matrix entries to {path}")
    return path
