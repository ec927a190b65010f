import json

import numpy as np
import pandas as pd
import pytest

from errors import DomainError
from hamiltonian import (
    BasisIndex,
    HamiltonianOptions,
    TruncationScheme,
    bare_energy,
    basis_states,
    build_hamiltonian,
    dump_matrix_csv,
    excitation_number_operator,
    hermiticity_error,
    lowering_operator,
)


def test_truncation_parse():
    t = TruncationScheme.parse("4, 3, 3, 4")
    assert t.levels == (4, 3, 3, 4)
    assert t.dimension == 144
    assert str(t) == "4,3,3,4"


@pytest.mark.parametrize("text", ["4,3,3", "4,3,x,4", "4,1,3,4"])
def test_truncation_rejects(text):
    with pytest.raises(DomainError):
        TruncationScheme.parse(text)


def test_basis_index_flat_round_trip(trunc):
    states = basis_states(trunc)
    assert len(states) == trunc.dimension
    for flat, state in enumerate(states):
        assert state.flat(trunc) == flat
        assert BasisIndex.from_flat(flat, trunc) == state


def test_basis_label():
    s = BasisIndex.from_label("0110")
    assert s.occupations == (0, 1, 1, 0)
    assert s.label == "0110"
    with pytest.raises(DomainError):
        BasisIndex.from_label("011")


def test_basis_index_outside_truncation(trunc):
    with pytest.raises(DomainError):
        BasisIndex(0, 3, 0, 0).flat(trunc)


def test_lowering_operator_conventions():
    assert np.allclose(np.diag(lowering_operator(4, "bosonic"), 1), np.sqrt([1, 2, 3]))
    assert np.allclose(np.diag(lowering_operator(3, "uniform"), 1), [1, 1])


def test_hamiltonian_is_hermitian(fig2_params, trunc):
    H = build_hamiltonian(fig2_params, trunc)
    assert H.dimension == 144
    assert hermiticity_error(H.matrix) == 0.0


def test_diagonal_is_bare_energies(fig2_params, trunc):
    H = build_hamiltonian(fig2_params, trunc)
    expected = [bare_energy(s, fig2_params) for s in basis_states(trunc)]
    assert np.allclose(np.diag(H.matrix), expected)
    assert np.trace(H.matrix) == pytest.approx(sum(expected))


def test_bare_energy_of_doubly_excited_qubit(fig2_params):
    assert bare_energy(BasisIndex.from_label("0200"), fig2_params) == pytest.approx(2 * 4.56 - 0.175)


def test_rwa_conserves_excitation_number(fig2_params, trunc):
    N = excitation_number_operator(trunc)
    rwa = build_hamiltonian(fig2_params, trunc, HamiltonianOptions(rwa=True)).matrix
    full = build_hamiltonian(fig2_params, trunc).matrix
    assert np.max(np.abs(rwa @ N - N @ rwa)) < 1e-12
    assert np.max(np.abs(full @ N - N @ full)) > 1e-3


def test_coupling_element_between_single_excitations(fig2_params, trunc):
    H = build_hamiltonian(fig2_params, trunc).matrix
    i = BasisIndex.from_label("0100").flat(trunc)
    j = BasisIndex.from_label("0010").flat(trunc)
    assert H[i, j] == pytest.approx(fig2_params.g_xy)


def test_unknown_convention():
    with pytest.raises(DomainError):
        HamiltonianOptions(coupling_convention="fermionic")


def test_dump_matrix_csv(tmp_path, fig2_params, trunc):
    H = build_hamiltonian(fig2_params, trunc)
    path = dump_matrix_csv(H, str(tmp_path / "H.csv"))
    frame = pd.read_csv(path, dtype={"row_label": str, "col_label": str})
    assert list(frame.columns) == ["row", "col", "row_label", "col_label", "value"]
    assert len(frame) == np.count_nonzero(H.matrix)
    meta = json.loads((tmp_path / "H.meta.json").read_text())
    assert meta["dimension"] == 144
    assert meta["matrix"]["truncation"] == "4,3,3,4"
