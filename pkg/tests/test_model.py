import math

import numpy as np
import pytest

from qdcavity.algebra import eval_f
from qdcavity.errors import ConfigurationError, CutoffTooSmallError
from qdcavity.model import (PAIR_LABELS, BasisIndex, InitialStateSpec, SystemConfig,
                            build_hamiltonian, build_initial_state, coherent_weights,
                            commutator_norm, constant_of_motion_M, decoupled_energy,
                            excitation_label, heisenberg_residual, required_n_max)


def h_element(cfg, bra, ket):
    """<bra|H|ket> from the action of each term on basis labels.

    Labels are ``(pair, photons)``; the multiphoton factors are built by
    applying the single-photon operator ``m`` times.
    """
    (pb, nb), (pk, nk) = bra, ket
    value = 0.0
    if bra == ket:
        s = [1 if c == "e" else -1 for c in pk]
        value += cfg.omega * nk * eval_f(cfg.profile, nk) ** 2
        value += 0.5 * (cfg.omega1 * s[0] + cfg.omega2 * s[1])
    for atom in (0, 1):
        other = 1 - atom
        if pb[other] != pk[other]:
            continue
        c = cfg.couplings[atom] * cfg.lam
        # raise atom, remove m photons
        if pk[atom] == "g" and pb[atom] == "e" and nb == nk - cfg.m and nb >= 0:
            amp = 1.0
            for k in range(nk, nk - cfg.m, -1):
                amp *= math.sqrt(k) * eval_f(cfg.profile, k)
            value += c * amp
        # lower atom, add m photons
        if pk[atom] == "e" and pb[atom] == "g" and nb == nk + cfg.m and nb <= cfg.n_max:
            amp = 1.0
            for k in range(nk + 1, nk + cfg.m + 1):
                amp *= math.sqrt(k) * eval_f(cfg.profile, k)
            value += c * amp
    return value


def labels(cfg):
    return [(PAIR_LABELS[p], n) for p in range(4) for n in range(cfg.n_fock)]


def test_required_n_max():
    assert required_n_max(10.0, 1) == 38
    assert required_n_max(10.0, 2) == 40
    assert required_n_max(0.0, 1) == 2


def test_cutoff_too_small():
    with pytest.raises(CutoffTooSmallError) as exc:
        SystemConfig.build(m=1, alpha_sq=10.0, n_max=5)
    assert exc.value.required_n_max == 38


def test_detuning():
    cfg = SystemConfig.build(m=2, alpha_sq=0.0, omega=1.5, omega1=3.0, omega2=2.0)
    assert cfg.detunings == (0.0, -1.0)
    assert not cfg.is_resonant
    assert SystemConfig.build(m=2, alpha_sq=0.0, omega=1.5).is_resonant


def test_basis_index_bijective():
    n_max = 7
    flats = [BasisIndex(a, b, n).flat(n_max) for a in "eg" for b in "eg" for n in range(n_max + 1)]
    assert flats == list(range(4 * (n_max + 1)))
    for i in range(4 * (n_max + 1)):
        assert BasisIndex.from_flat(i, n_max).flat(n_max) == i
    assert BasisIndex("g", "e", 3).flat(n_max) == 2 * 8 + 3


def test_coherent_vacuum():
    Q = coherent_weights(0.0, 5)
    np.testing.assert_array_equal(Q, [1, 0, 0, 0, 0, 0])


def test_coherent_q0():
    Q = coherent_weights(math.sqrt(10.0), 40)
    assert Q[0].real == pytest.approx(6.737946999085467e-3, rel=1e-14)


def test_coherent_matches_poisson():
    Q = coherent_weights(math.sqrt(10.0), 40)
    pmf = [math.exp(-10.0) * 10.0 ** n / math.factorial(n) for n in range(41)]
    np.testing.assert_allclose(np.abs(Q) ** 2, pmf, rtol=1e-12)
    assert np.sum(np.abs(Q) ** 2) >= 1 - 1e-9


def test_coherent_complex_phase():
    alpha = 1.3 * np.exp(0.4j)
    Q = coherent_weights(alpha, 30)
    expected = [np.exp(-abs(alpha) ** 2 / 2) * alpha ** n / math.sqrt(math.factorial(n)) for n in range(31)]
    np.testing.assert_allclose(Q, expected, rtol=1e-12)


def test_initial_psi_vacuum():
    cfg = SystemConfig.build(m=1, alpha_sq=0.0)
    psi = build_initial_state(InitialStateSpec.psi(), cfg)
    s = 1 / math.sqrt(2)
    assert psi.amplitude("e", "g", 0) == pytest.approx(s)
    assert psi.amplitude("g", "e", 0) == pytest.approx(s)
    assert np.count_nonzero(psi.amplitudes) == 2


def test_initial_phi_coherent():
    cfg = SystemConfig.build(m=1, alpha_sq=10.0)
    psi = build_initial_state(InitialStateSpec.phi(), cfg)
    Q = coherent_weights(cfg.alpha, cfg.n_max)
    for n in range(cfg.n_fock):
        assert psi.amplitude("e", "e", n) == pytest.approx(Q[n] / math.sqrt(2), rel=1e-9, abs=1e-15)
    assert psi.norm_defect < 1e-9


def test_initial_custom():
    cfg = SystemConfig.build(m=2, alpha_sq=4.0)
    psi = build_initial_state(InitialStateSpec.custom(1, 0, 0, 0), cfg)
    assert psi.norm == pytest.approx(1.0, abs=1e-15)
    assert np.all(psi.amplitudes[cfg.n_fock:] == 0)


def test_custom_normalization_enforced():
    with pytest.raises(ConfigurationError):
        InitialStateSpec.custom(1, 1, 0, 0)


@pytest.mark.parametrize("q", [None, 0.3, 0.9])
@pytest.mark.parametrize("m", [1, 2])
def test_hamiltonian_matches_first_principles(q, m):
    cfg = SystemConfig.build(m=m, q=q, alpha_sq=0.0, n_max=6, omega=0.8, omega1=1.1,
                             omega2=2.3, lam=0.7, couplings=(1.0, 0.6))
    H = build_hamiltonian(cfg)
    basis = labels(cfg)
    expected = np.array([[h_element(cfg, b, k) for k in basis] for b in basis])
    np.testing.assert_allclose(H, expected, atol=1e-14)


@pytest.mark.parametrize("q", [None, 0.1, 0.5, 0.9])
@pytest.mark.parametrize("m", [1, 2, 3])
def test_hamiltonian_hermitian(q, m):
    H = build_hamiltonian(SystemConfig.build(m=m, q=q, omega=0.4, omega1=0.1))
    assert np.max(np.abs(H - H.conj().T)) <= 1e-12


def test_decoupled_limit():
    cfg = SystemConfig.build(m=1, alpha_sq=0.0, n_max=8, omega=1.3, omega1=0.9, omega2=2.1, lam=0.0)
    H = build_hamiltonian(cfg)
    assert np.count_nonzero(H - np.diag(np.diag(H))) == 0
    for n in range(cfg.n_fock):
        i = BasisIndex("e", "e", n).flat(cfg.n_max)
        assert H[i, i].real == pytest.approx(1.3 * n + (0.9 + 2.1) / 2)
        assert decoupled_energy(cfg, "ee", n) == pytest.approx(H[i, i].real)


def test_single_excitation_block():
    cfg = SystemConfig.build(m=1, alpha_sq=0.0, omega=1.0, lam=0.5)
    H = build_hamiltonian(cfg)
    idx = [BasisIndex(*lab, n).flat(cfg.n_max) for lab, n in (("eg", 0), ("ge", 0), ("gg", 1))]
    block = H[np.ix_(idx, idx)]
    expected = np.array([[0.0, 0.0, 0.5], [0.0, 0.0, 0.5], [0.5, 0.5, 0.0]])
    # on resonance the three diagonal energies all vanish
    np.testing.assert_allclose(block, expected, atol=1e-15)


def test_M_diagonal_values():
    cfg = SystemConfig.build(m=2, alpha_sq=0.0, n_max=10)
    M = constant_of_motion_M(cfg)
    assert np.count_nonzero(M - np.diag(np.diag(M))) == 0
    for n in range(cfg.n_fock):
        g = BasisIndex("g", "g", n).flat(10)
        e = BasisIndex("e", "e", n).flat(10)
        assert M[g, g].real == n - 2
        assert M[e, e].real == n + 2


def test_deformed_M_diagonal():
    cfg = SystemConfig.build(m=1, q=0.5, alpha_sq=0.0, n_max=10)
    M = constant_of_motion_M(cfg, deformed=True)
    for n in range(cfg.n_fock):
        i = BasisIndex("e", "e", n).flat(10)
        assert M[i, i].real == pytest.approx(n * eval_f(cfg.profile, n) ** 2 + 1)


@pytest.mark.parametrize("q", [None, 0.1, 0.5, 0.9])
@pytest.mark.parametrize("m", [1, 2])
def test_M_commutes_with_H(q, m):
    cfg = SystemConfig.build(m=m, q=q, omega=0.6, omega1=0.2, omega2=1.7)
    H = build_hamiltonian(cfg)
    assert commutator_norm(constant_of_motion_M(cfg), H, cfg) < 1e-10


def test_deformed_M_not_conserved_under_deformation():
    cfg = SystemConfig.build(m=1, q=0.5, alpha_sq=4.0)
    H = build_hamiltonian(cfg)
    assert commutator_norm(constant_of_motion_M(cfg, deformed=True), H, cfg) > 1e-2
    cfg0 = SystemConfig.build(m=1, alpha_sq=4.0)
    assert commutator_norm(constant_of_motion_M(cfg0, deformed=True), build_hamiltonian(cfg0), cfg0) < 1e-10


@pytest.mark.parametrize("q", [None, 0.5])
@pytest.mark.parametrize("m", [1, 2, 3])
def test_block_structure_scan(q, m):
    cfg = SystemConfig.build(m=m, q=q, omega=0.3, omega1=1.0)
    H = build_hamiltonian(cfg)
    lab = excitation_label(cfg)
    diag_M = np.diag(constant_of_motion_M(cfg)).real
    rows, cols = np.nonzero(H)
    assert np.all(lab[rows] == lab[cols])
    assert np.all(diag_M[rows] == diag_M[cols])


@pytest.mark.parametrize("q,m", [(None, 1), (0.5, 2), (0.9, 1), (0.1, 3)])
def test_heisenberg_residual(q, m):
    cfg = SystemConfig.build(m=m, q=q, omega=0.5, omega1=0.2, omega2=0.9)
    assert heisenberg_residual(cfg) < 1e-10


def test_heisenberg_residual_decoupled():
    cfg = SystemConfig.build(m=1, alpha_sq=1.0, lam=0.0, omega=1.0)
    assert heisenberg_residual(cfg) == 0.0


def test_jaynes_cummings_spectrum():
    # atom 2 decoupled and parked in |g>: the atom-1 sector is the JC ladder
    omega, lam = 1.0, 0.35
    cfg = SystemConfig.build(m=1, alpha_sq=0.0, n_max=12, omega=omega, lam=lam, couplings=(1.0, 0.0))
    H = build_hamiltonian(cfg)
    shift = -0.5 * omega
    for n in range(6):
        idx = [BasisIndex("e", "g", n).flat(12), BasisIndex("g", "g", n + 1).flat(12)]
        E = np.linalg.eigvalsh(H[np.ix_(idx, idx)])
        hand = [omega * (n + 0.5) - lam * math.sqrt(n + 1) + shift,
                omega * (n + 0.5) + lam * math.sqrt(n + 1) + shift]
        np.testing.assert_allclose(E, hand, atol=1e-13)
