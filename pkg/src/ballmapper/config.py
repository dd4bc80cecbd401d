"""
Shared configuration constants for the Ball Mapper library and CLI.

All defaults live here; functions elsewhere import them instead of hard-coding values.
Nothing in this package reads environment variables: every setting is explicit.
"""

import logging
from typing import Optional, Union

# Serialization
FORMAT_VERSION = "1.0"

# Nerve construction
DEFAULT_MAX_DIM = 2
DEFAULT_COVER_GUARD = 20  # max centers covering one point before nerve enumeration aborts

# Denoising
DEFAULT_DENOISE_QUANTILE = 0.25

# k-means center selection
DEFAULT_KMEANS_MAX_ITERS = 300

# Distance kernels
DISTANCE_BLOCK_ELEMENTS = 4_000_000  # entries per distance block; bounds peak memory per worker
SYMMETRY_TOLERANCE = 1e-12

# Worker pool (clamped to [1, MAX_WORKERS])
DEFAULT_WORKERS = 4
MAX_WORKERS = 32

# DOT rendering
DOT_WIDTH_SCALE = 0.2  # node width in inches = scale * sqrt(size)
DOT_COLOR_RAMP = (
    "#ffffcc",
    "#ffeda0",
    "#fed976",
    "#feb24c",
    "#fd8d3c",
    "#fc4e2a",
    "#e31a1c",
    "#bd0026",
    "#800026",
)
DOT_DEFAULT_FILL = "#d9d9d9"

logger = logging.getLogger(__name__)


def resolve_worker_count(raw: Optional[Union[int, str]] = None) -> int:
    """Resolve the number of worker threads for blocked computations.

    Resolution order:
        1. Explicit value (``--threads`` flag or ``workers=`` argument)
        2. Default: DEFAULT_WORKERS (4)

    The returned value is always clamped to the range [1, MAX_WORKERS].
    Worker count never changes results, only wall time.

    Returns:
        int: Number of workers between 1 and MAX_WORKERS.
    """
    if raw is not None:
        try:
            workers = int(raw)
            return max(1, min(MAX_WORKERS, workers))
        except (ValueError, TypeError):
            logger.warning("Invalid worker count '%s', using default %d", raw, DEFAULT_WORKERS)

    return DEFAULT_WORKERS
