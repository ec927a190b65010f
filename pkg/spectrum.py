"""Diagonalization, bare-state labeling, level tracking and numeric ZZ."""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

import numpy as np
import pandas as pd
import scipy.linalg

from circuit_model import CircuitParams, FluxBias
from errors import DomainError
from hamiltonian import (
    DEFAULT_TRUNCATION,
    BasisIndex,
    HamiltonianMatrix,
    HamiltonianOptions,
    TruncationScheme,
    build_hamiltonian,
    hermiticity_error,
)

_logger = logging.getLogger(__name__)

HERMITIAN_TOL = 1e-12
HYBRIDIZED_OVERLAP = 0.5
# share of sub-0.5 neighbor overlaps above which a sweep is reported as too coarse
COARSE_FRACTION = 0.10


class Eigenpairs(NamedTuple):
    energies: np.ndarray
    vectors: np.ndarray
    trunc: TruncationScheme | None = None


def diagonalize(H: HamiltonianMatrix | np.ndarray) -> Eigenpairs:
    """Full spectrum (ascending) and orthonormal eigenvectors as columns."""
    matrix = H.matrix if isinstance(H, HamiltonianMatrix) else np.asarray(H)
    trunc = H.trunc if isinstance(H, HamiltonianMatrix) else None
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise DomainError(f"matrix must be square, got shape {matrix.shape}")
    err = hermiticity_error(matrix)
    if err > HERMITIAN_TOL:
        raise DomainError(f"matrix is not Hermitian (relative asymmetry {err:.3e})")
    energies, vectors = scipy.linalg.eigh(matrix)
    return Eigenpairs(energies, vectors, trunc)


def _greedy_match(weights: np.ndarray) -> np.ndarray:
    """Assign each column to a distinct row, taking pairs by descending weight.

    Returns ``row_of`` with row_of[col] the row matched to col.
    """
    n_rows, n_cols = weights.shape
    row_of = np.full(n_cols, -1, dtype=int)
    row_taken = np.zeros(n_rows, dtype=bool)
    remaining = min(n_rows, n_cols)
    for flat in np.argsort(-weights, axis=None, kind="stable"):
        row, col = divmod(int(flat), n_cols)
        if row_taken[row] or row_of[col] >= 0:
            continue
        row_of[col] = row
        row_taken[row] = True
        remaining -= 1
        if remaining == 0:
            break
    return row_of


@dataclass(frozen=True)
class LabeledSpectrum:
    energies: np.ndarray = field(repr=False)
    vectors: np.ndarray = field(repr=False)
    trunc: TruncationScheme
    bare_of: np.ndarray = field(repr=False)      # eigen index -> flat bare index
    eigen_of: np.ndarray = field(repr=False)     # flat bare index -> eigen index
    overlaps: np.ndarray = field(repr=False)     # |<bare|eigen>|² of each assigned pair, by eigen index

    @property
    def hybridized(self) -> np.ndarray:
        return self.overlaps <= HYBRIDIZED_OVERLAP + 1e-9

    def index_of(self, state: BasisIndex | str) -> int:
        if isinstance(state, str):
            state = BasisIndex.from_label(state)
        return int(self.eigen_of[state.flat(self.trunc)])

    def energy(self, state: BasisIndex | str) -> float:
        return float(self.energies[self.index_of(state)])

    def overlap(self, state: BasisIndex | str) -> float:
        return float(self.overlaps[self.index_of(state)])

    def is_hybridized(self, state: BasisIndex | str) -> bool:
        return bool(self.hybridized[self.index_of(state)])

    def label(self, eigen_index: int) -> BasisIndex:
        return BasisIndex.from_flat(int(self.bare_of[eigen_index]), self.trunc)


def label_states(eigenpairs: Eigenpairs, trunc: TruncationScheme | None = None) -> LabeledSpectrum:
    """Greedy maximum-overlap assignment of eigenvectors to bare states."""
    trunc = trunc or eigenpairs.trunc
    if trunc is None:
        raise DomainError("a truncation scheme is needed to label states")
    energies, vectors = eigenpairs.energies, eigenpairs.vectors
    if vectors.shape != (trunc.dimension, trunc.dimension):
        raise DomainError(f"eigenbasis shape {vectors.shape} does not match truncation {trunc}")
    weights = np.abs(vectors) ** 2
    bare_of = _greedy_match(weights)
    eigen_of = np.empty_like(bare_of)
    eigen_of[bare_of] = np.arange(bare_of.size)
    overlaps = weights[bare_of, np.arange(bare_of.size)]
    n_hyb = int(np.count_nonzero(overlaps <= HYBRIDIZED_OVERLAP + 1e-9))
    if n_hyb:
        _logger.debug(f"{n_hyb} eigenstates hybridized (overlap <= {HYBRIDIZED_OVERLAP})")
    return LabeledSpectrum(energies=energies, vectors=vectors, trunc=trunc,
                           bare_of=bare_of, eigen_of=eigen_of, overlaps=overlaps)


def solve(params: CircuitParams, bias: FluxBias = FluxBias(),
          trunc: TruncationScheme = DEFAULT_TRUNCATION,
          options: HamiltonianOptions | None = None) -> LabeledSpectrum:
    """Build, diagonalize and label in one step."""
    H = build_hamiltonian(params, trunc, options, bias)
    return label_states(diagonalize(H), trunc)


class NumericZZ(NamedTuple):
    value: float
    unreliable: bool


ZZ_STATES = ("0110", "0100", "0010", "0000")


def zz_numeric(spec: LabeledSpectrum) -> NumericZZ:
    """E(0110) − E(0100) − E(0010) + E(0000), GHz."""
    e11, e10, e01, e00 = (spec.energy(s) for s in ZZ_STATES)
    unreliable = any(spec.is_hybridized(s) for s in ZZ_STATES)
    if unreliable:
        _logger.warning("numeric ZZ involves a hybridized state; unreliable near resonance")
    return NumericZZ(e11 - e10 - e01 + e00, unreliable)


class ExchangeCoupling(NamedTuple):
    coupling: float       # off-diagonal element of the projected 2x2 Hamiltonian
    detuning: float       # H_eff[1,1] − H_eff[0,0]
    gap: float            # |E_1 − E_2| of the two dressed states
    weight: float         # smallest weight of the two dressed states inside the pair subspace


def exchange_coupling(spec: LabeledSpectrum, first: BasisIndex | str,
                      second: BasisIndex | str) -> ExchangeCoupling:
    """Effective two-level Hamiltonian of a bare-state pair.

    The two eigenstates with the largest weight on {first, second} are
    projected onto that pair, orthonormalized by polar decomposition and used
    to rebuild H_eff = U diag(E) U†. This is a two-state diagnostic; it does
    not resolve couplings mediated through other nearly resonant states.
    """
    if isinstance(first, str):
        first = BasisIndex.from_label(first)
    if isinstance(second, str):
        second = BasisIndex.from_label(second)
    rows = [first.flat(spec.trunc), second.flat(spec.trunc)]
    sub = spec.vectors[rows, :]
    weight = np.sum(np.abs(sub) ** 2, axis=0)
    chosen = np.sort(np.argsort(-weight, kind="stable")[:2])
    U, _ = scipy.linalg.polar(sub[:, chosen])
    E = spec.energies[chosen]
    H_eff = U @ np.diag(E) @ U.conj().T
    return ExchangeCoupling(
        coupling=float(np.real(H_eff[0, 1])),
        detuning=float(np.real(H_eff[1, 1] - H_eff[0, 0])),
        gap=float(abs(E[1] - E[0])),
        weight=float(np.min(weight[chosen])),
    )


def pair_splitting(spec: LabeledSpectrum, first: BasisIndex | str, second: BasisIndex | str) -> float:
    """Energy splitting of the two eigenstates that carry the pair."""
    return exchange_coupling(spec, first, second).gap


@dataclass(frozen=True)
class LevelSweep:
    biases: tuple[FluxBias, ...]
    spectra: tuple[LabeledSpectrum, ...] = field(repr=False)
    branch_eigen: np.ndarray = field(repr=False)  # [point, branch] -> eigen index
    continuity: np.ndarray = field(repr=False)    # [point, branch] -> overlap with previous point
    coarse: bool = False

    @property
    def trunc(self) -> TruncationScheme:
        return self.spectra[0].trunc

    def branch_label(self, branch: int) -> BasisIndex:
        """Branches are named by their label at the first grid point."""
        return self.spectra[0].label(int(self.branch_eigen[0, branch]))

    def branch_of(self, state: BasisIndex | str) -> int:
        return int(self.spectra[0].index_of(state))

    def tracked_energies(self, state: BasisIndex | str) -> np.ndarray:
        branch = self.branch_of(state)
        return np.array([s.energies[self.branch_eigen[k, branch]] for k, s in enumerate(self.spectra)])

    def labeled_energies(self, state: BasisIndex | str) -> np.ndarray:
        return np.array([s.energy(state) for s in self.spectra])

    def _selected(self, labels: Sequence[str] | None) -> list[BasisIndex]:
        if labels is None:
            return sorted(self.spectra[0].label(i) for i in range(self.trunc.dimension))
        return [BasisIndex.from_label(lab) for lab in labels]

    def labeled_frame(self, labels: Sequence[str] | None = None) -> pd.DataFrame:
        """One row per (grid point, labeled state)."""
        states = self._selected(labels)
        rows = []
        for bias, spec in zip(self.biases, self.spectra):
            for state in states:
                idx = spec.index_of(state)
                rows.append({
                    "phi_x": bias.phi_x, "phi_y": bias.phi_y, "label": state.label,
                    "energy_ghz": float(spec.energies[idx]), "overlap": float(spec.overlaps[idx]),
                    "hybridized": bool(spec.hybridized[idx]),
                })
        return pd.DataFrame(rows, columns=["phi_x", "phi_y", "label", "energy_ghz", "overlap", "hybridized"])

    def tracked_frame(self, labels: Sequence[str] | None = None) -> pd.DataFrame:
        """One row per (grid point, adiabatic branch); branches named at the first point."""
        states = self._selected(labels)
        rows = []
        for k, (bias, spec) in enumerate(zip(self.biases, self.spectra)):
            for state in states:
                branch = self.branch_of(state)
                idx = int(self.branch_eigen[k, branch])
                rows.append({
                    "phi_x": bias.phi_x, "phi_y": bias.phi_y, "branch": state.label,
                    "energy_ghz": float(spec.energies[idx]), "label": spec.label(idx).label,
                    "continuity": float(self.continuity[k, branch]),
                })
        return pd.DataFrame(rows, columns=["phi_x", "phi_y", "branch", "energy_ghz", "label", "continuity"])


def sweep_levels(params: CircuitParams | Sequence[CircuitParams], bias_grid: Sequence[FluxBias],
                 trunc: TruncationScheme = DEFAULT_TRUNCATION,
                 options: HamiltonianOptions | None = None) -> LevelSweep:
    """Labeled spectra along an ordered grid plus adiabatic branch tracking.

    ``params`` may be one parameter set or one per grid point.
    """
    biases = tuple(bias_grid)
    if not biases:
        raise DomainError("bias grid is empty")
    if isinstance(params, CircuitParams):
        param_list = [params] * len(biases)
    else:
        param_list = list(params)
        if len(param_list) != len(biases):
            raise DomainError("one parameter set per grid point is required")

    spectra = tuple(solve(p, b, trunc, options) for p, b in zip(param_list, biases))
    dim = trunc.dimension
    branch_eigen = np.empty((len(spectra), dim), dtype=int)
    continuity = np.ones((len(spectra), dim))
    branch_eigen[0] = np.arange(dim)
    for k in range(1, len(spectra)):
        prev = spectra[k - 1].vectors[:, branch_eigen[k - 1]]
        weights = np.abs(prev.conj().T @ spectra[k].vectors) ** 2  # [branch, eigen]
        eigen_of_branch = _greedy_match(weights.T)
        branch_eigen[k] = eigen_of_branch
        continuity[k] = weights[np.arange(dim), eigen_of_branch]

    poor = np.count_nonzero(continuity[1:] < HYBRIDIZED_OVERLAP)
    total = max(1, continuity[1:].size)
    coarse = poor / total > COARSE_FRACTION
    if coarse:
        _logger.warning(f"sweep grid too coarse: {poor} of {total} neighbor overlaps below {HYBRIDIZED_OVERLAP}")
    return LevelSweep(biases=biases, spectra=spectra, branch_eigen=branch_eigen,
                      continuity=continuity, coarse=coarse)
