"""
Shared test fixtures for the Ball Mapper test suite.

Provides:
- src/ path setup so the package imports without installation
- Small hand-checkable point clouds (a line, two clusters, a square)
- Iris loaded once per session
"""

import os
import sys

import numpy as np
import pytest

# ---------------------------------------------------------------------------
# Path setup: make src/ importable
# ---------------------------------------------------------------------------
_src_path = os.path.join(os.path.dirname(__file__), "..", "src")
sys.path.insert(0, _src_path)


# ---------------------------------------------------------------------------
# Sample clouds
# ---------------------------------------------------------------------------


@pytest.fixture
def line_cloud():
    """Five points on a line at 0, 0.5, 1.0, 1.5, 2.0."""
    from ballmapper.metric import PointCloud

    return PointCloud.from_array(np.array([[0.0], [0.5], [1.0], [1.5], [2.0]]))


@pytest.fixture
def two_clusters():
    """Two tight clusters of three points, 10 apart along x."""
    from ballmapper.metric import PointCloud

    points = np.array(
        [[0.0, 0.0], [0.1, 0.0], [0.0, 0.1], [10.0, 0.0], [10.1, 0.0], [10.0, 0.1]]
    )
    return PointCloud.from_array(points, attributes={"group": [0, 0, 0, 1, 1, 1]})


@pytest.fixture
def unit_square():
    """Corners of the unit square, listed counter-clockwise from the origin."""
    from ballmapper.metric import PointCloud

    return PointCloud.from_array(np.array([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]))


@pytest.fixture
def euclidean():
    from ballmapper.metric import MetricSpec

    return MetricSpec("euclidean")


@pytest.fixture(scope="session")
def iris():
    from ballmapper.datasets import load_iris

    return load_iris()
