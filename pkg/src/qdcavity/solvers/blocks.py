"""Block-exact propagation using the conserved excitation label.

The coupling lowers the field by exactly ``m`` photons whenever an atom is
raised, so ``photons + m * (excited atoms)`` is an integer constant of the
motion for every deformation.  States sharing a label form a block of at
most four: ``|ee,n>, |eg,n+m>, |ge,n+m>, |gg,n+2m>``.
"""

from dataclasses import dataclass, field

import numpy as np

from ..errors import BlockStructureError, NumericalError
from ..model import FullState, excitation_label

PAD = 4


@dataclass
class BlockDecomposition:
    """Partition of the basis into blocks with their Hamiltonian sub-matrices."""

    blocks: list
    labels: np.ndarray
    dim: int
    _eig: tuple | None = field(default=None, repr=False)

    def __len__(self):
        return len(self.blocks)

    def sizes(self):
        return [len(idx) for idx, _ in self.blocks]

    def packed(self):
        """Index table ``(nb, 4)`` padded with ``dim`` plus eigendata ``(E, V)``.

        Padding slots are zero rows and columns, decoupled from the block.
        """
        if self._eig is None:
            nb = len(self.blocks)
            index = np.full((nb, PAD), self.dim, dtype=int)
            mats = np.zeros((nb, PAD, PAD), dtype=complex)
            for b, (idx, sub) in enumerate(self.blocks):
                k = len(idx)
                index[b, :k] = idx
                mats[b, :k, :k] = sub
            try:
                E, V = np.linalg.eigh(mats)
            except np.linalg.LinAlgError as exc:
                raise NumericalError(f"block eigendecomposition failed: {exc}") from exc
            self._eig = (index, E, V)
        return self._eig


def decompose_blocks(H, cfg, labels=None):
    """Group basis states by excitation label and cut ``H`` into blocks.

    Raises :class:`BlockStructureError` if any nonzero entry of ``H`` joins
    two different labels.
    """
    if labels is None:
        labels = excitation_label(cfg)
    labels = np.asarray(labels)
    rows, cols = np.nonzero(H)
    crossing = labels[rows] != labels[cols]
    if np.any(crossing):
        r, c = rows[crossing][0], cols[crossing][0]
        raise BlockStructureError(
            f"H[{r},{c}] = {H[r, c]!r} couples labels {labels[r]} and {labels[c]}")
    blocks = []
    for value in np.unique(labels):
        idx = np.flatnonzero(labels == value)
        blocks.append((idx, H[np.ix_(idx, idx)]))
    return BlockDecomposition(blocks, labels, H.shape[0])


def propagate_block(blocks, psi0, times):
    """Amplitude array ``(len(times), dim)`` for ``exp(-iHt) psi0``."""
    index, E, V = blocks.packed()
    amps0 = np.append(np.asarray(psi0, dtype=complex), 0.0)
    c = np.einsum("bik,bi->bk", V.conj(), amps0[index])
    times = np.asarray(times, dtype=float)
    out = np.zeros((len(times), blocks.dim + 1), dtype=complex)
    for j, t in enumerate(times):
        out[j, index] = np.einsum("bik,bk->bi", V, c * np.exp(-1j * E * t))
    return out[:, :-1]


def evolve_block(blocks, psi0, times):
    """Evolve ``psi0`` (a :class:`FullState`) to each of ``times``."""
    amps = propagate_block(blocks, psi0.amplitudes, times)
    return [FullState(a, float(t)) for a, t in zip(amps, times)]
