"""
Exact Connectivity Module

This module provides the brute-force and transfer-matrix engines for tau^{f,N}(x, y).
"""

from .exact_result import Engine, ExactResult
from .brute_force import tau_fN_bruteforce, partition_identity_check, PartitionIdentityReport
from .transfer_matrix import tau_fN_transfer, FrontierState
from .connectivity_service import tau_fN, tau_fN_monotonicity_probe

__all__ = [
    'Engine',
    'ExactResult',
    'tau_fN_bruteforce',
    'partition_identity_check',
    'PartitionIdentityReport',
    'tau_fN_transfer',
    'FrontierState',
    'tau_fN',
    'tau_fN_monotonicity_probe',
]
