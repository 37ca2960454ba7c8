"""Beta Shapley data valuation."""

from ._betashap import (
    BetaShapError,
    detect_noisy,
    flip_labels,
    generate,
    semivalue_table,
    snr_scan,
    value_exact,
    value_mc,
    weights,
)

__all__ = [
    "BetaShapError",
    "detect_noisy",
    "flip_labels",
    "generate",
    "semivalue_table",
    "snr_scan",
    "value_exact",
    "value_mc",
    "weights",
]
