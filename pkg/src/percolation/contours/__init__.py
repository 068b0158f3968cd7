"""
Contours Module

This module provides dual circuits, contours, minimal-contour counting and the contour census.
"""

from .contour_model import (
    DualCircuit,
    Contour,
    is_contour,
    dual_of,
    primal_of,
    word_encode,
    word_decode,
)

from .minimal_contours import (
    beta,
    beta_narayana,
    beta_lgv,
    enumerate_minimal_contours,
    alpha_sequence,
    companion_paths,
)

from .census import (
    ContourCensus,
    LemmaReport,
    census,
    verify_counting_lemma,
    census_to_frame,
    lemma_reports,
    lemma_table,
)

__all__ = [
    'DualCircuit',
    'Contour',
    'is_contour',
    'dual_of',
    'primal_of',
    'word_encode',
    'word_decode',
    'beta',
    'beta_narayana',
    'beta_lgv',
    'enumerate_minimal_contours',
    'alpha_sequence',
    'companion_paths',
    'ContourCensus',
    'LemmaReport',
    'census',
    'verify_counting_lemma',
    'census_to_frame',
    'lemma_reports',
    'lemma_table',
]
