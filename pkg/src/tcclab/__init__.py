"""Temporal colour constancy lab.

Library + CLI for per-frame and temporal illuminant estimation with cascading
coarse-to-fine refinement, plus the training, evaluation, statistics, and
benchmarking harness around it.
"""

__version__ = "0.1.0"

from tcclab.color import (
    ColorDomainError,
    EstimateTrace,
    Illuminant,
    ImageFrame,
    angular_error,
    apply_correction,
    cumulative_estimate,
    gray_world,
)

__all__ = [
    "__version__",
    "ColorDomainError",
    "EstimateTrace",
    "Illuminant",
    "ImageFrame",
    "angular_error",
    "apply_correction",
    "cumulative_estimate",
    "gray_world",
]
