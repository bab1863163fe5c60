"""Two qubits coupled to a q-deformed multiphoton cavity field."""

from .algebra import (DeformationProfile, ProfileKind, build_deformed_annihilator,
                      commutator_defect, eval_f, eval_G)
from .model import (FullState, InitialStateSpec, SystemConfig, build_hamiltonian,
                    build_initial_state, coherent_weights, constant_of_motion_M,
                    heisenberg_residual)
from .observables import (ObservableKind, QubitPairDensity, Structure, fidelity, populations,
                          purity, reduce_to_qubits, structural_classifier)
from .solvers import (TypoPolicy, decompose_blocks, evolve_analytic, evolve_block,
                      evolve_reference)

__version__ = "0.1.0"
