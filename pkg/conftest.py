import pytest

from circuit_model import FIG2_PARAMS, CapacitanceNetwork
from hamiltonian import DEFAULT_TRUNCATION, HamiltonianOptions


@pytest.fixture
def fig2_params():
    return FIG2_PARAMS


@pytest.fixture
def trunc():
    return DEFAULT_TRUNCATION


@pytest.fixture
def bosonic():
    return HamiltonianOptions(coupling_convention="bosonic")


@pytest.fixture
def uncoupled(fig2_params):
    return fig2_params.replace(g_ax=0.0, g_ay=0.0, g_bx=0.0, g_by=0.0, g_xy=0.0, g_ab=0.0)


@pytest.fixture
def hierarchy_network():
    return CapacitanceNetwork.from_femtofarads(
        L_a_nH=1.67, L_b_nH=1.04, EJ_x=13.2, EJ_y=16.5,
        C_a=900.0, C_b=900.0, C_x=90.0, C_y=90.0, C_ab=0.01, C_xy=0.1,
        C_ax=4.0, C_ay=4.0, C_bx=4.0, C_by=4.0,
    )
