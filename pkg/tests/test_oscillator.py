import math

import numpy as np
import pytest

from qbath.linalg import commutator, frobenius, matrix_function_hermitian
from qbath.oscillator import (
    OscillatorModel,
    energies,
    gibbs_state,
    gibbs_state_spectral,
    hamiltonian,
    ladder_operators,
    log_partition_function,
    momentum_matrix,
    position_matrix,
)

INV_SQRT2 = 0.7071067811865476


def test_position_momentum_entries_d2():
    model = OscillatorModel(dim=2)
    q = position_matrix(model)
    p = momentum_matrix(model)
    assert np.allclose(q, [[0, INV_SQRT2], [INV_SQRT2, 0]], atol=1e-15)
    assert np.allclose(p, [[0, -1j * INV_SQRT2], [1j * INV_SQRT2, 0]], atol=1e-15)


@pytest.mark.parametrize("d", [2, 5, 16, 32])
def test_q_p_hermitian_traceless(d):
    model = OscillatorModel(dim=d)
    for op in (position_matrix(model), momentum_matrix(model)):
        assert frobenius(op - op.conj().T) < 1e-14
        assert np.all(np.diag(op) == 0)
        assert abs(np.trace(op)) == 0.0


def test_hamiltonian_levels_and_trace():
    model = OscillatorModel(dim=3)
    assert np.allclose(np.diag(hamiltonian(model)).real, [0.5, 1.5, 2.5])
    for d in (4, 16):
        m = OscillatorModel(dim=d)
        assert abs(np.trace(hamiltonian(m)).real - d**2 / 2.0) < 1e-12


def test_hamiltonian_commutes_with_gibbs(model):
    assert frobenius(commutator(hamiltonian(model), gibbs_state(model))) == 0.0


def test_annihilation_kills_vacuum(model):
    a, adag = ladder_operators(model)
    ground = np.zeros(model.dim)
    ground[0] = 1.0
    assert np.linalg.norm(a @ ground) < 1e-15
    assert frobenius(adag - a.conj().T) == 0.0


def test_number_operator_diagonal(model):
    a, adag = ladder_operators(model)
    num = adag @ a
    assert np.allclose(np.diag(num).real, np.arange(model.dim), atol=1e-14)
    assert frobenius(num - np.diag(np.diag(num))) < 1e-14


def test_ladder_commutator_corner():
    d = 6
    model = OscillatorModel(dim=d)
    a, adag = ladder_operators(model)
    corner = np.zeros((d, d))
    corner[d - 1, d - 1] = 1.0
    assert frobenius(commutator(a, adag) - (np.eye(d) - d * corner)) < 1e-13


def test_canonical_commutator_interior_block():
    model = OscillatorModel(dim=16)
    err = commutator(position_matrix(model), momentum_matrix(model)) - 1j * np.eye(16)
    assert frobenius(err[:15, :15]) <= 1e-12


def test_gibbs_trace_and_infinite_temperature():
    model = OscillatorModel(dim=16)
    assert abs(np.trace(gibbs_state(model)).real - 1.0) <= 1e-14
    hot = OscillatorModel(dim=16, temperature=1e9)
    assert np.max(np.abs(np.diag(gibbs_state(hot)).real - 1.0 / 16.0)) < 1e-8


def test_gibbs_values_against_geometric_sums(model):
    # Oracle: plain sums exp(-(n+1/2)) over the 16 retained levels.
    weights = [math.exp(-(n + 0.5)) for n in range(16)]
    z16 = sum(weights)
    rho = gibbs_state(model)
    assert abs(rho[0, 0].real - weights[0] / z16) < 1e-15
    assert abs(rho[0, 0].real - 0.6321206299643635) < 1e-14
    energy = np.trace(hamiltonian(model) @ rho).real
    oracle = sum((n + 0.5) * w for n, w in enumerate(weights)) / z16
    assert abs(energy - oracle) < 1e-13
    assert abs(energy - 1.0819749063063282) < 1e-12
    # within truncation error of the closed-form untruncated value
    assert abs(energy - (0.5 + 1.0 / math.expm1(1.0))) < 2e-6
    assert abs(log_partition_function(model) - math.log(z16)) < 1e-13


def test_gibbs_matches_spectral_construction(model):
    assert frobenius(gibbs_state(model) - gibbs_state_spectral(model)) <= 1e-14


def test_gibbs_fixed_point_of_matrix_function(model):
    h = hamiltonian(model)
    g = matrix_function_hermitian(h, lambda x: np.exp(-(x - x.min())))
    g = g / np.trace(g).real
    assert frobenius(g - gibbs_state(model)) <= 1e-14


def test_energies_match_levels():
    model = OscillatorModel(dim=4, hbar=2.0, omega=3.0)
    assert np.allclose(energies(model), [3.0, 9.0, 15.0, 21.0])


def test_model_validation():
    with pytest.raises(ValueError):
        OscillatorModel(temperature=0.0)
    with pytest.raises(ValueError):
        OscillatorModel(beta_p=-0.1)
    with pytest.raises(ValueError):
        OscillatorModel(dim=0)
    m = OscillatorModel(hbar=2.0, omega=3.0, temperature=4.0)
    assert abs(m.xi - 2.0 * 3.0 / (2 * 4.0)) < 1e-15
    assert abs(m.eta - 2.0 * m.xi) < 1e-15
    assert abs(m.beta_q_rate - m.mass**2 * m.omega**2 * m.beta_q) < 1e-15
