"""Propagators for the joint atoms-field state."""

from .analytic import (CORRECTIONS, AnalyticAmplitudes, TypoPolicy, analytic_amplitudes,
                       calibrate_block_form, evolve_analytic)
from .blocks import BlockDecomposition, decompose_blocks, evolve_block, propagate_block
from .reference import ReferencePropagator, evolve_reference, propagate_reference

__all__ = [
    "CORRECTIONS", "AnalyticAmplitudes", "TypoPolicy", "analytic_amplitudes",
    "calibrate_block_form", "evolve_analytic", "BlockDecomposition", "decompose_blocks",
    "evolve_block", "propagate_block", "ReferencePropagator", "evolve_reference",
    "propagate_reference",
]
