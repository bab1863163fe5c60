"""Reduced two-qubit density matrix and the observables built on it."""

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .tolerances import TOL


class ObservableKind(Enum):
    PURITY = "purity"
    FIDELITY = "fidelity"
    POP_EE = "pop_ee"
    POP_EG = "pop_eg"
    POP_GE = "pop_ge"
    POP_GG = "pop_gg"


POPULATION_KINDS = (ObservableKind.POP_EE, ObservableKind.POP_EG,
                    ObservableKind.POP_GE, ObservableKind.POP_GG)


class Structure(Enum):
    STR0 = "Str0"
    STR01 = "Str01"
    STR02 = "Str02"
    OTHER = "Other"


@dataclass(frozen=True, eq=False)
class QubitPairDensity:
    """4x4 density matrix in the order ``ee, eg, ge, gg``."""

    rho: np.ndarray

    def check(self, tol=TOL.trace):
        rho = self.rho
        if np.max(np.abs(rho - rho.conj().T)) > TOL.hermiticity:
            raise ValueError("density matrix is not Hermitian")
        if abs(np.trace(rho).real - 1.0) > tol:
            raise ValueError(f"density matrix trace {np.trace(rho).real!r} != 1")
        if np.min(np.linalg.eigvalsh(rho)) < -TOL.psd:
            raise ValueError("density matrix has a negative eigenvalue")
        return self

    @classmethod
    def pure(cls, atomic):
        v = np.asarray(atomic, dtype=complex)
        return cls(np.outer(v, v.conj()))


@dataclass
class ObservableSeries:
    times: np.ndarray
    values: np.ndarray
    kind: ObservableKind


def reduced_densities(amplitudes):
    """Partial trace over the field for a stack ``(..., 4*(n_max+1))`` of states."""
    amps = np.asarray(amplitudes)
    psi = amps.reshape(*amps.shape[:-1], 4, amps.shape[-1] // 4)
    return np.einsum("...in,...jn->...ij", psi, psi.conj())


def reduce_to_qubits(state):
    return QubitPairDensity(reduced_densities(state.amplitudes))


def purity(rho):
    r = rho.rho if isinstance(rho, QubitPairDensity) else rho
    return float(np.einsum("ij,ji->", r, r).real)


def purity_from_spectrum(rho):
    """Sum of squared eigenvalues; an independent route to ``Tr(rho^2)``."""
    r = rho.rho if isinstance(rho, QubitPairDensity) else rho
    return float(np.sum(np.linalg.eigvalsh(r) ** 2))


def fidelity(rho_trans, rho_out):
    a = rho_trans.rho if isinstance(rho_trans, QubitPairDensity) else rho_trans
    b = rho_out.rho if isinstance(rho_out, QubitPairDensity) else rho_out
    return float(np.einsum("ij,ji->", a, b).real)


def populations(rho):
    """``(P_ee, P_eg, P_ge, P_gg)``."""
    r = rho.rho if isinstance(rho, QubitPairDensity) else rho
    return tuple(float(x) for x in np.real(np.diag(r)))


def structural_classifier(rho, tol=TOL.structure):
    """Population pattern of the reduced state.

    ``Str0``: P_eg = P_ge and P_ee = P_gg.  ``Str01``: P_eg = P_ge only.
    ``Str02``: P_eg = P_ge = P_ee.  Checked in the order Str0, Str02, Str01
    so that the more specific patterns win; phases are ignored.
    """
    p_ee, p_eg, p_ge, p_gg = populations(rho)
    if abs(p_eg - p_ge) > tol:
        return Structure.OTHER
    if abs(p_ee - p_gg) <= tol:
        return Structure.STR0
    if abs(p_ee - p_eg) <= tol and abs(p_ee - p_ge) <= tol:
        return Structure.STR02
    return Structure.STR01


def observable_series(amplitudes, times, kinds, initial_atomic=None):
    """Evaluate observables for a stack of states.

    Fidelity compares against the pure initial atomic state ``initial_atomic``.
    Returns a dict ``kind -> ObservableSeries``.
    """
    rhos = reduced_densities(amplitudes)
    times = np.asarray(times, dtype=float)
    out = {}
    for kind in kinds:
        kind = ObservableKind(kind)
        if kind is ObservableKind.PURITY:
            values = np.einsum("tij,tji->t", rhos, rhos).real
        elif kind is ObservableKind.FIDELITY:
            if initial_atomic is None:
                raise ValueError("fidelity needs the initial atomic state")
            target = QubitPairDensity.pure(initial_atomic).rho
            values = np.einsum("ij,tji->t", target, rhos).real
        else:
            k = POPULATION_KINDS.index(kind)
            values = rhos[:, k, k].real
        out[kind] = ObservableSeries(times, np.ascontiguousarray(values), kind)
    return out
