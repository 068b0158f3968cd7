"""
Core Model Module

This module provides the lattice, parameter and configuration types and the cluster machinery.
"""

from .model import (
    Params,
    LatticeRegion,
    Configuration,
    TargetPair,
    make_edge,
    make_params,
    params_from_eta,
    norm_x,
    reflect,
)

from .clusters import (
    UnionFind,
    truncated_event,
    label_clusters,
)

__all__ = [
    'Params',
    'LatticeRegion',
    'Configuration',
    'TargetPair',
    'make_edge',
    'make_params',
    'params_from_eta',
    'norm_x',
    'reflect',
    'UnionFind',
    'truncated_event',
    'label_clusters',
]
