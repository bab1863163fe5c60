"""Full-matrix propagator: diagonalize ``H`` once, then phase-rotate."""

import numpy as np

from ..errors import NumericalError
from ..model import FullState


class ReferencePropagator:
    """Caches the eigendecomposition of a Hermitian ``H``."""

    def __init__(self, H):
        try:
            self.energies, self.vectors = np.linalg.eigh(H)
        except np.linalg.LinAlgError as exc:
            raise NumericalError(
                f"eigendecomposition of {H.shape[0]}x{H.shape[0]} Hamiltonian failed: {exc}") from exc
        defect = np.max(np.abs(self.vectors.conj().T @ self.vectors - np.eye(H.shape[0])))
        if defect > 1e-10:
            raise NumericalError(f"eigenvectors not orthonormal (defect {defect:.3g})")

    def propagate(self, psi0, times):
        c = self.vectors.conj().T @ np.asarray(psi0, dtype=complex)
        phases = np.exp(-1j * np.outer(np.asarray(times, dtype=float), self.energies))
        return (phases * c) @ self.vectors.T


def propagate_reference(H, psi0, times):
    return ReferencePropagator(H).propagate(psi0, times)


def evolve_reference(H, psi0, times):
    """``exp(-iHt)|psi0>`` for every ``t`` in ``times``."""
    times = np.asarray(times, dtype=float)
    if times.size and (times[0] < 0 or np.any(np.diff(times) < 0)):
        raise ValueError("times must be ascending and non-negative")
    amps = propagate_reference(H, psi0.amplitudes, times)
    out = [FullState(a, float(t)) for a, t in zip(amps, times)]
    if times.size and times[0] == 0.0:
        out[0] = FullState(psi0.amplitudes.copy(), 0.0, psi0.norm_defect)
    return out
