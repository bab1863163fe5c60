"""Deformation profiles and matrices of the deformed field operators.

The deformed annihilator is ``A = a f(n)``, so that
``A|n> = sqrt(n) f(n) |n-1>`` and ``A^dag A = n f(n)^2``.  Two profiles are
supported: the ordinary oscillator (``f = 1``) and the q-box deformation
``f(n) = sqrt((1 - q**n) / (n (1 - q)))`` with ``0 < q < 1``.
"""

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import ConfigurationError, OutOfRangeError


class ProfileKind(Enum):
    IDENTITY = "identity"
    QBOX = "qbox"


def _qbox_table(q, n_max):
    n = np.arange(n_max + 1, dtype=float)
    f = np.ones(n_max + 1)
    if n_max >= 1:
        # 1 - q**n without cancellation when q is close to 1
        one_minus_qn = -np.expm1(n[1:] * np.log(q))
        f[1:] = np.sqrt(one_minus_qn / (n[1:] * (1.0 - q)))
        f[1] = 1.0
    return f


@dataclass(frozen=True, eq=False)
class DeformationProfile:
    """Tabulated deformation function ``f(0..n_max)``.

    ``f(0)`` is stored as 1; it always multiplies ``sqrt(0)`` and never
    reaches a matrix element.
    """

    kind: ProfileKind
    q: float | None
    n_max: int
    f_values: np.ndarray

    @classmethod
    def identity(cls, n_max):
        table = np.ones(n_max + 1)
        table.flags.writeable = False
        return cls(ProfileKind.IDENTITY, None, int(n_max), table)

    @classmethod
    def qbox(cls, q, n_max):
        """q-box profile; ``q == 1`` (or ``None``) falls back to the identity."""
        if q is None or q == 1.0:
            return cls.identity(n_max)
        if not 0.0 < q < 1.0:
            raise ConfigurationError(f"deformation parameter must satisfy 0 < q < 1, got {q}")
        table = _qbox_table(float(q), int(n_max))
        table.flags.writeable = False
        return cls(ProfileKind.QBOX, float(q), int(n_max), table)

    @classmethod
    def from_q(cls, q, n_max):
        return cls.qbox(q, n_max)

    @property
    def is_identity(self):
        return self.kind is ProfileKind.IDENTITY

    def extended(self, n_max):
        """Same profile with a table reaching at least ``n_max``."""
        if n_max <= self.n_max:
            return self
        if self.is_identity:
            return DeformationProfile.identity(n_max)
        return DeformationProfile.qbox(self.q, n_max)

    def label(self):
        return "none" if self.is_identity else f"{self.q:g}"

    def __repr__(self):
        return f"DeformationProfile({self.kind.value}, q={self.q}, n_max={self.n_max})"


def eval_f(profile, n):
    if n < 0 or n > profile.n_max:
        raise OutOfRangeError(f"f({n}) outside table 0..{profile.n_max}")
    return float(profile.f_values[n])


def eval_G(profile, n, m):
    """Product ``f(n+1) f(n+2) ... f(n+m)``.

    This is the factor that multiplies ``sqrt((n+m)!/n!)`` in ``<n|A^m|n+m>``.
    """
    if m < 1:
        raise ConfigurationError(f"photon multiplicity must be positive, got {m}")
    if n < 0 or n + m > profile.n_max:
        raise OutOfRangeError(f"G({n}, {m}) needs f up to {n + m}, table ends at {profile.n_max}")
    return float(np.prod(profile.f_values[n + 1:n + m + 1]))


def eval_G_printed(profile, n, top):
    """Literal product ``f(n) f(n+1) ... f(top)`` (``top - n + 1`` factors)."""
    if n < 0 or top > profile.n_max:
        raise OutOfRangeError(f"product needs f up to {top}, table ends at {profile.n_max}")
    return float(np.prod(profile.f_values[n:top + 1]))


def multiphoton_element(profile, n, m):
    """``<n|A^m|n+m> = sqrt((n+m)!/n!) * G(n, m)``; zero for ``n < 0``."""
    if n < 0:
        return 0.0
    ratio = float(np.prod(np.arange(n + 1, n + m + 1, dtype=float)))
    return np.sqrt(ratio) * eval_G(profile, n, m)


def number_operator(dim):
    return np.diag(np.arange(dim, dtype=float)).astype(complex)


def build_deformed_annihilator(profile, dim):
    """Dense matrix of ``A`` on the Fock states ``|0>..|dim-1>``."""
    if dim < 2:
        raise ConfigurationError(f"Fock dimension must be at least 2, got {dim}")
    if dim - 1 > profile.n_max:
        raise OutOfRangeError(f"dimension {dim} exceeds deformation table 0..{profile.n_max}")
    n = np.arange(1, dim)
    A = np.zeros((dim, dim), dtype=complex)
    A[n - 1, n] = np.sqrt(n) * profile.f_values[1:dim]
    return A


def build_deformed_creator(profile, dim):
    return build_deformed_annihilator(profile, dim).conj().T


def commutator_defect(profile, dim):
    """Largest deviation of ``<n|[A, A^dag]|n>`` from ``(n+1)f(n+1)^2 - n f(n)^2``.

    The top Fock level is excluded because truncation corrupts it.
    """
    if dim < 3:
        raise ConfigurationError(f"need dim >= 3, got {dim}")
    A = build_deformed_annihilator(profile, dim)
    Ad = A.conj().T
    comm = A @ Ad - Ad @ A
    n = np.arange(dim - 1, dtype=float)
    f = profile.f_values
    expected = (n + 1) * f[1:dim] ** 2 - n * f[:dim - 1] ** 2
    return float(np.max(np.abs(np.diag(comm)[:dim - 1] - expected)))


def number_commutator_defects(profile, dim):
    """Entrywise defects of ``[A, n] = A`` and ``[A^dag, n] = -A^dag``.

    Both identities hold exactly on a truncated space; returns the pair of
    maximum absolute deviations.
    """
    A = build_deformed_annihilator(profile, dim)
    Ad = A.conj().T
    N = number_operator(dim)
    lower = np.max(np.abs((A @ N - N @ A) - A))
    upper = np.max(np.abs((Ad @ N - N @ Ad) + Ad))
    return float(lower), float(upper)
