import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qdcavity.model import (BasisIndex, FullState, InitialStateSpec, SystemConfig, build_hamiltonian,
                            build_initial_state)
from qdcavity.observables import (ObservableKind, QubitPairDensity, Structure, fidelity,
                                  observable_series, populations, purity, purity_from_spectrum,
                                  reduce_to_qubits, reduced_densities, structural_classifier)
from qdcavity.solvers import decompose_blocks, propagate_block

S = 1 / math.sqrt(2)
PSI = np.array([0, S, S, 0], dtype=complex)
PHI = np.array([S, 0, 0, S], dtype=complex)
MIXED = QubitPairDensity(np.eye(4, dtype=complex) / 4)


def evolved(q=None, m=1, state="psi", alpha_sq=10.0, times=np.linspace(0, 50, 201)):
    cfg = SystemConfig.build(m=m, q=q, alpha_sq=alpha_sq)
    psi0 = build_initial_state(InitialStateSpec.named(state), cfg)
    return cfg, psi0, propagate_block(decompose_blocks(build_hamiltonian(cfg), cfg), psi0.amplitudes, times)


def test_reduce_product_state():
    cfg = SystemConfig.build(m=1)
    rho = reduce_to_qubits(build_initial_state(InitialStateSpec.psi(), cfg)).check()
    np.testing.assert_allclose(rho.rho, np.outer(PSI, PSI.conj()), atol=1e-12)
    assert purity(rho) == pytest.approx(1.0, abs=1e-12)


def test_reduce_fock_ee():
    cfg = SystemConfig.build(m=1, alpha_sq=0.0)
    amps = np.zeros(cfg.dim, complex)
    amps[BasisIndex("e", "e", 0).flat(cfg.n_max)] = 1
    rho = reduce_to_qubits(FullState(amps))
    np.testing.assert_array_equal(rho.rho, np.diag([1, 0, 0, 0]).astype(complex))


def test_reduced_density_oracle():
    # explicit loop over the partial trace
    cfg, _, amps = evolved(0.5, 2, "phi", alpha_sq=3.0, times=[3.7])
    v = amps[0].reshape(4, cfg.n_fock)
    oracle = np.zeros((4, 4), complex)
    for a in range(4):
        for b in range(4):
            oracle[a, b] = sum(v[a, n] * np.conj(v[b, n]) for n in range(cfg.n_fock))
    np.testing.assert_allclose(reduced_densities(amps)[0], oracle, atol=1e-14)


def test_purity_examples():
    assert purity(QubitPairDensity.pure(PSI)) == pytest.approx(1.0, abs=1e-15)
    assert purity(MIXED) == pytest.approx(0.25, abs=1e-15)


def test_purity_mid_evolution():
    _, _, amps = evolved(times=[0.0, 5.0])
    rho = QubitPairDensity(reduced_densities(amps)[1]).check()
    p = purity(rho)
    assert 0.25 < p < 1
    assert p == pytest.approx(purity_from_spectrum(rho), abs=1e-10)
    assert p >= np.max(np.linalg.eigvalsh(rho.rho)) ** 2 - 1e-12


def test_fidelity_examples():
    pure_psi = QubitPairDensity.pure(PSI)
    assert fidelity(pure_psi, pure_psi) == pytest.approx(1.0, abs=1e-15)
    assert fidelity(pure_psi, QubitPairDensity.pure(PHI)) == pytest.approx(0.0, abs=1e-15)
    assert fidelity(pure_psi, MIXED) == pytest.approx(0.25, abs=1e-15)


def test_population_examples():
    np.testing.assert_allclose(populations(QubitPairDensity.pure(PSI)), [0, 0.5, 0.5, 0], atol=1e-15)
    np.testing.assert_allclose(populations(QubitPairDensity.pure(PHI)), [0.5, 0, 0, 0.5], atol=1e-15)


@pytest.mark.parametrize("diag,tol,expected", [
    ((0.2, 0.3, 0.3, 0.2), 1e-6, Structure.STR0),
    ((0.25, 0.25, 0.25, 0.25), 0.02, Structure.STR0),
    ((0.2, 0.2, 0.2, 0.4), 0.02, Structure.STR02),
    ((0.1, 0.3, 0.3, 0.3), 0.02, Structure.STR01),
    ((0.1, 0.5, 0.2, 0.2), 0.02, Structure.OTHER),
])
def test_structural_classifier(diag, tol, expected):
    rho = QubitPairDensity(np.diag(diag).astype(complex))
    assert structural_classifier(rho, tol) is expected


def test_density_check_rejects_bad_matrices():
    with pytest.raises(ValueError):
        QubitPairDensity(np.diag([0.5, 0.5, 0.5, 0]).astype(complex)).check()
    with pytest.raises(ValueError):
        QubitPairDensity(np.diag([1.2, -0.2, 0, 0]).astype(complex)).check()


@pytest.mark.parametrize("state", ["psi", "phi"])
@pytest.mark.parametrize("q", [None, 0.5])
def test_series_properties(state, q):
    times = np.linspace(0, 50, 201)
    _, psi0, amps = evolved(q, 1, state, times=times)
    atomic = InitialStateSpec.named(state).amplitudes
    kinds = list(ObservableKind)
    series = observable_series(amps, times, kinds, atomic)
    pur = series[ObservableKind.PURITY].values
    fid = series[ObservableKind.FIDELITY].values
    pops = np.array([series[k].values for k in kinds[2:]])
    assert pur[0] == pytest.approx(1.0, abs=1e-10)
    assert fid[0] == pytest.approx(1.0, abs=1e-10)
    assert np.all(pur >= 0.25 - 1e-10) and np.all(pur <= 1 + 1e-10)
    assert np.all((fid >= -1e-10) & (fid <= 1 + 1e-10))
    np.testing.assert_allclose(pops.sum(axis=0), 1.0, atol=1e-10)
    rhos = reduced_densities(amps)
    # fidelity with a pure target is <trans|rho|trans>
    direct = np.einsum("i,tij,j->t", atomic.conj(), rhos, atomic).real
    np.testing.assert_allclose(fid, direct, atol=1e-12)
    spectral = [purity_from_spectrum(QubitPairDensity(r)) for r in rhos]
    np.testing.assert_allclose(pur, spectral, atol=1e-10)
    eig = np.linalg.eigvalsh(rhos)
    assert eig.min() >= -1e-10
    # atom swap eg <-> ge leaves rho unchanged
    perm = [0, 2, 1, 3]
    np.testing.assert_allclose(rhos[:, perm][:, :, perm], rhos, atol=1e-10)


def test_fidelity_series_needs_target():
    _, _, amps = evolved(times=[0.0, 1.0])
    with pytest.raises(ValueError):
        observable_series(amps, [0.0, 1.0], [ObservableKind.FIDELITY])


@settings(max_examples=60, deadline=None)
@given(st.lists(st.complex_numbers(max_magnitude=1.0, allow_nan=False, allow_infinity=False),
                min_size=12, max_size=12).filter(lambda v: np.linalg.norm(v) > 1e-3))
def test_random_states_give_valid_densities(raw):
    v = np.array(raw).reshape(1, 12)
    v /= np.linalg.norm(v)
    rho = QubitPairDensity(reduced_densities(v)[0]).check()
    p = purity(rho)
    assert 0.25 - 1e-12 <= p <= 1 + 1e-12
    assert p == pytest.approx(purity_from_spectrum(rho), abs=1e-10)
    assert sum(populations(rho)) == pytest.approx(1.0, abs=1e-12)
    assert 0 - 1e-12 <= fidelity(QubitPairDensity.pure(PSI), rho) <= 1 + 1e-12
