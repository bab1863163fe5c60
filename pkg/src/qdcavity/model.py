"""Physical configuration, product basis, Hamiltonian and initial states.

Basis ordering: ``qubit1 (x) qubit2 (x) field`` with the qubit pair flattened
as ``ee=0, eg=1, ge=2, gg=3`` and the flat index
``pair * (n_max + 1) + photons``.  Energies are in units of the coupling
``lambda`` and time is the scaled time ``lambda t``; ``hbar = 1``.
"""

import math
from dataclasses import dataclass

import numpy as np

from .algebra import DeformationProfile, build_deformed_annihilator, eval_f
from .errors import ConfigurationError, CutoffTooSmallError
from .tolerances import TOL

PAIR_LABELS = ("ee", "eg", "ge", "gg")
# number of excited atoms in each qubit-pair state
EXCITED = np.array([2, 1, 1, 0])

# single-qubit operators in the (e, g) basis; S_z has eigenvalues +1/-1
SZ = np.diag([1.0, -1.0]).astype(complex)
SPLUS = np.array([[0, 1], [0, 0]], dtype=complex)
SMINUS = SPLUS.T.copy()
I2 = np.eye(2, dtype=complex)


def required_n_max(alpha_sq, m):
    """Smallest cutoff holding the coherent tail plus ``2m`` exchange headroom."""
    return int(math.ceil(alpha_sq + 8.0 * math.sqrt(alpha_sq) + 2 * m - 1e-12))


@dataclass(frozen=True, eq=False)
class SystemConfig:
    """All physical parameters of one simulation.

    ``couplings`` scales the coupling of each atom individually; (1, 1) is
    the physical model, other values are for limiting-case checks.
    """

    m: int
    profile: DeformationProfile
    n_max: int
    alpha: complex = 0.0
    omega: float = 0.0
    omega1: float = 0.0
    omega2: float = 0.0
    lam: float = 1.0
    couplings: tuple = (1.0, 1.0)

    def __post_init__(self):
        if int(self.m) != self.m or self.m < 1:
            raise ConfigurationError(f"photon multiplicity m must be a positive integer, got {self.m}")
        if self.lam < 0:
            raise ConfigurationError(f"coupling lambda must be non-negative, got {self.lam}")
        if self.n_max < 1:
            raise ConfigurationError(f"Fock cutoff must be positive, got {self.n_max}")
        if self.profile.n_max < self.n_max:
            raise ConfigurationError("deformation table shorter than the Fock cutoff")
        need = required_n_max(abs(self.alpha) ** 2, self.m)
        if self.n_max < need:
            raise CutoffTooSmallError(
                f"n_max={self.n_max} too small for |alpha|^2={abs(self.alpha) ** 2:g}, m={self.m}; "
                f"need n_max >= {need}",
                need,
            )

    @classmethod
    def build(cls, m=1, q=None, alpha_sq=10.0, n_max=None, omega=0.0, omega1=None,
              omega2=None, lam=1.0, couplings=(1.0, 1.0)):
        """Convenience constructor from scalar parameters.

        ``q=None`` (or 1) selects the undeformed field.  The atomic
        frequencies default to resonance, ``Omega_j = m * omega``.
        """
        if alpha_sq < 0:
            raise ConfigurationError(f"mean photon number must be non-negative, got {alpha_sq}")
        if n_max is None:
            n_max = required_n_max(alpha_sq, m)
        omega1 = m * omega if omega1 is None else omega1
        omega2 = m * omega if omega2 is None else omega2
        profile = DeformationProfile.qbox(q, n_max + 2 * m)
        return cls(m=m, profile=profile, n_max=int(n_max), alpha=complex(math.sqrt(alpha_sq)),
                   omega=omega, omega1=omega1, omega2=omega2, lam=lam,
                   couplings=tuple(couplings))

    @property
    def n_fock(self):
        return self.n_max + 1

    @property
    def dim(self):
        return 4 * self.n_fock

    @property
    def detunings(self):
        return (self.omega1 - self.m * self.omega, self.omega2 - self.m * self.omega)

    @property
    def is_resonant(self):
        return self.detunings == (0.0, 0.0)

    def photons(self):
        return np.tile(np.arange(self.n_fock), 4)

    def pairs(self):
        return np.repeat(np.arange(4), self.n_fock)

    def safe_mask(self):
        """Basis states far enough below the cutoff for operator identities to hold."""
        return self.photons() <= self.n_max - 2 * self.m


@dataclass(frozen=True)
class BasisIndex:
    qubit1: str
    qubit2: str
    photons: int

    def flat(self, n_max):
        if self.photons < 0 or self.photons > n_max:
            raise IndexError(f"photon number {self.photons} outside 0..{n_max}")
        return PAIR_LABELS.index(self.qubit1 + self.qubit2) * (n_max + 1) + self.photons

    @classmethod
    def from_flat(cls, index, n_max):
        pair, n = divmod(int(index), n_max + 1)
        if not 0 <= pair < 4:
            raise IndexError(f"flat index {index} outside basis of size {4 * (n_max + 1)}")
        label = PAIR_LABELS[pair]
        return cls(label[0], label[1], n)


@dataclass
class FullState:
    """Joint atoms-field state vector at scaled time ``time``.

    ``norm_defect`` records how far the state was from unit norm before it
    was renormalized (truncation loss or closed-form inconsistency).
    """

    amplitudes: np.ndarray
    time: float = 0.0
    norm_defect: float = 0.0

    @property
    def norm(self):
        return float(np.linalg.norm(self.amplitudes))

    def amplitude(self, qubit1, qubit2, photons):
        n_max = self.amplitudes.size // 4 - 1
        return self.amplitudes[BasisIndex(qubit1, qubit2, photons).flat(n_max)]


@dataclass(frozen=True)
class InitialStateSpec:
    """Atomic amplitudes ``(a_ee, a_eg, a_ge, a_gg)`` and an optional field amplitude.

    When ``alpha`` is ``None`` the coherent amplitude of the config is used.
    """

    atomic: tuple
    label: str = "custom"
    alpha: complex | None = None

    def __post_init__(self):
        amps = np.asarray(self.atomic, dtype=complex)
        if amps.shape != (4,):
            raise ConfigurationError("atomic state needs exactly four amplitudes")
        total = float(np.sum(np.abs(amps) ** 2))
        if abs(total - 1.0) > TOL.custom_normalization:
            raise ConfigurationError(f"atomic amplitudes not normalized: sum |a|^2 = {total!r}")

    @classmethod
    def psi(cls, alpha=None):
        s = 1 / math.sqrt(2)
        return cls((0.0, s, s, 0.0), "psi", alpha)

    @classmethod
    def phi(cls, alpha=None):
        s = 1 / math.sqrt(2)
        return cls((s, 0.0, 0.0, s), "phi", alpha)

    @classmethod
    def custom(cls, a1, a2, a3, a4, alpha=None):
        return cls((a1, a2, a3, a4), "custom", alpha)

    @classmethod
    def named(cls, name, alpha=None):
        try:
            return {"psi": cls.psi, "phi": cls.phi}[name](alpha)
        except KeyError:
            raise ConfigurationError(f"unknown Bell state {name!r} (expected psi or phi)") from None

    @property
    def amplitudes(self):
        return np.asarray(self.atomic, dtype=complex)


def coherent_weights(alpha, n_max):
    """Coherent-state amplitudes ``Q_0..Q_n_max`` by the ratio recurrence."""
    if n_max < 0:
        raise ConfigurationError(f"n_max must be non-negative, got {n_max}")
    alpha = complex(alpha)
    Q = np.empty(n_max + 1, dtype=complex)
    Q[0] = math.exp(-0.5 * abs(alpha) ** 2)
    for n in range(1, n_max + 1):
        Q[n] = Q[n - 1] * alpha / math.sqrt(n)
    return Q


def build_initial_state(spec, cfg):
    alpha = cfg.alpha if spec.alpha is None else spec.alpha
    Q = coherent_weights(alpha, cfg.n_max)
    deficit = 1.0 - float(np.sum(np.abs(Q) ** 2))
    if deficit > TOL.cutoff_deficit:
        need = required_n_max(abs(alpha) ** 2, cfg.m)
        raise CutoffTooSmallError(
            f"coherent tail beyond n_max={cfg.n_max} carries weight {deficit:.3g}; "
            f"need n_max >= {need}", need)
    amps = np.kron(spec.amplitudes, Q)
    amps /= np.linalg.norm(amps)
    return FullState(amps, 0.0, max(deficit, 0.0))


def _embed_qubit(op, atom):
    return np.kron(op, I2) if atom == 0 else np.kron(I2, op)


def qubit_operator(op, atom, cfg):
    """Single-atom operator lifted to the full space."""
    return np.kron(_embed_qubit(op, atom), np.eye(cfg.n_fock))


def field_operators(cfg):
    """``(A, A^dag)`` on the Fock space of ``cfg``."""
    A = build_deformed_annihilator(cfg.profile, cfg.n_fock)
    return A, A.conj().T


def build_hamiltonian(cfg):
    A, Ad = field_operators(cfg)
    Am = np.linalg.matrix_power(A, cfg.m)
    Adm = np.linalg.matrix_power(Ad, cfg.m)
    I4 = np.eye(4)
    H = cfg.omega * np.kron(I4, Ad @ A)
    for atom, Om, c in ((0, cfg.omega1, cfg.couplings[0]), (1, cfg.omega2, cfg.couplings[1])):
        H = H + 0.5 * Om * np.kron(_embed_qubit(SZ, atom), np.eye(cfg.n_fock))
        H = H + cfg.lam * c * (np.kron(_embed_qubit(SPLUS, atom), Am)
                               + np.kron(_embed_qubit(SMINUS, atom), Adm))
    return H


def excitation_label(cfg):
    """Integer conserved by the coupling: ``photons + m * (excited atoms)``."""
    return cfg.photons() + cfg.m * EXCITED[cfg.pairs()]


def constant_of_motion_M(cfg, deformed=False):
    """``N + (m/2)(S_z1 + S_z2)`` as a diagonal matrix.

    With ``deformed=False`` the photon term is the bare number operator,
    which commutes with the Hamiltonian for every profile.  ``deformed=True``
    uses ``A^dag A = n f(n)^2`` instead; that variant is conserved only for
    the undeformed field and is kept for comparison.
    """
    n = cfg.photons()
    if deformed:
        f = cfg.profile.f_values[n]
        photon_term = n * f ** 2
    else:
        photon_term = n.astype(float)
    sz_sum = 2.0 * EXCITED[cfg.pairs()] - 2.0
    return np.diag(photon_term + 0.5 * cfg.m * sz_sum).astype(complex)


def _safe_block(X, cfg):
    mask = cfg.safe_mask()
    return X[np.ix_(mask, mask)]


def commutator_norm(X, Y, cfg):
    """Max entry of ``[X, Y]`` on the truncation-safe sub-block."""
    return float(np.max(np.abs(_safe_block(X @ Y - Y @ X, cfg)), initial=0.0))


def heisenberg_residual(cfg, H=None):
    """Max deviation of ``i[H, S_z1]`` from ``2i lam (S_-1 A^dag^m - S_+1 A^m)``."""
    if H is None:
        H = build_hamiltonian(cfg)
    A, Ad = field_operators(cfg)
    Am = np.linalg.matrix_power(A, cfg.m)
    Adm = np.linalg.matrix_power(Ad, cfg.m)
    Sz1 = qubit_operator(SZ, 0, cfg)
    lhs = 1j * (H @ Sz1 - Sz1 @ H)
    c = cfg.couplings[0]
    rhs = 2j * cfg.lam * c * (np.kron(_embed_qubit(SMINUS, 0), Adm) - np.kron(_embed_qubit(SPLUS, 0), Am))
    return float(np.max(np.abs(_safe_block(lhs - rhs, cfg)), initial=0.0))


def decoupled_energy(cfg, pair, n):
    """Diagonal energy of ``|pair, n>`` when the coupling is switched off."""
    sz = {"ee": (1, 1), "eg": (1, -1), "ge": (-1, 1), "gg": (-1, -1)}[pair]
    f = eval_f(cfg.profile, n)
    return cfg.omega * n * f ** 2 + 0.5 * (cfg.omega1 * sz[0] + cfg.omega2 * sz[1])
