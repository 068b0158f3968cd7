"""
Monte Carlo Engine Module
"""

from .estimator import (
    Estimate,
    PairedEstimate,
    sample_config,
    estimate_tau_fN,
    estimate_pair_difference,
    sweep,
)

__all__ = [
    'Estimate',
    'PairedEstimate',
    'sample_config',
    'estimate_tau_fN',
    'estimate_pair_difference',
    'sweep',
]
