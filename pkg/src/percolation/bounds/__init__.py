"""
Bounds Module

This module provides the closed-form bounds, the eta_tilde threshold and the p_star search.
"""

from .bounds import (
    BoundReport,
    UpperBound,
    lower_bound,
    upper_bound,
    minimal_event_lower,
    eta_tilde,
    f_limit,
    eta_tilde_sequence,
    inequality_certificate,
    sweep_bounds,
    upper_series_from_census,
)

from .threshold import ThresholdReport, p_star_search

__all__ = [
    'BoundReport',
    'UpperBound',
    'lower_bound',
    'upper_bound',
    'minimal_event_lower',
    'eta_tilde',
    'f_limit',
    'eta_tilde_sequence',
    'inequality_certificate',
    'sweep_bounds',
    'upper_series_from_census',
    'ThresholdReport',
    'p_star_search',
]
