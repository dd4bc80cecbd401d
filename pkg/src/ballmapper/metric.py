"""
Finite metric spaces: point storage, metrics, blocked distance kernels and Hausdorff distance.

Balls are closed everywhere in this package: x is covered by c iff d(x, c) <= epsilon,
compared exactly in 64-bit floating point.
"""

import logging
from collections.abc import Mapping, Sequence
from dataclasses import dataclass, field
from typing import Optional, Union

import numpy as np
from scipy.spatial.distance import cdist

from ballmapper.config import DISTANCE_BLOCK_ELEMENTS, SYMMETRY_TOLERANCE
from ballmapper.exceptions import ConfigError, DataError, DimensionMismatchError, MetricError
from ballmapper.parallel import block_ranges, map_ordered

logger = logging.getLogger(__name__)

METRIC_KINDS = ("euclidean", "manhattan", "chebyshev", "precomputed")

# Names understood by scipy.spatial.distance.cdist
_CDIST_NAMES = {
    "euclidean": "euclidean",
    "manhattan": "cityblock",
    "chebyshev": "chebyshev",
}


def _frozen(array: np.ndarray) -> np.ndarray:
    array.setflags(write=False)
    return array


@dataclass(frozen=True, eq=False)
class PointCloud:
    """N points in D coordinates plus optional named per-point attribute columns.

    ``points`` is ``None`` for a cloud backed only by a precomputed distance matrix;
    such a cloud carries ids ``0..n-1`` and nothing else.
    """

    n: int
    points: Optional[np.ndarray] = None
    attributes: Mapping[str, np.ndarray] = field(default_factory=dict)

    @classmethod
    def from_array(
        cls,
        points: Union[np.ndarray, Sequence],
        attributes: Optional[Mapping[str, Union[np.ndarray, Sequence]]] = None,
    ) -> "PointCloud":
        """Validate and wrap an N×D array; a 1-D array is read as N points on a line."""
        array = np.array(points, dtype=np.float64)
        if array.ndim == 1:
            array = array.reshape(-1, 1)
        if array.ndim != 2:
            raise DataError(f"points must be a 2-D array, got {array.ndim} dimensions")
        if array.shape[0] == 0:
            raise DataError("point cloud is empty")
        if array.shape[1] == 0:
            raise DataError("points have zero coordinates")
        if not np.all(np.isfinite(array)):
            bad_row = int(np.nonzero(~np.all(np.isfinite(array), axis=1))[0][0])
            raise DataError(f"point {bad_row} has a non-finite coordinate")
        return cls(
            n=array.shape[0],
            points=_frozen(array),
            attributes=_validate_attributes(attributes, array.shape[0]),
        )

    @classmethod
    def ids_only(
        cls, n: int, attributes: Optional[Mapping[str, Union[np.ndarray, Sequence]]] = None
    ) -> "PointCloud":
        if n < 1:
            raise DataError("point cloud is empty")
        return cls(n=n, points=None, attributes=_validate_attributes(attributes, n))

    @property
    def has_coordinates(self) -> bool:
        return self.points is not None

    @property
    def dim(self) -> int:
        return 0 if self.points is None else self.points.shape[1]

    @property
    def ids(self) -> range:
        return range(self.n)

    def require_coordinates(self) -> np.ndarray:
        if self.points is None:
            raise MetricError("this operation needs coordinates, but the cloud only has ids")
        return self.points

    def attribute(self, name: str) -> np.ndarray:
        try:
            return self.attributes[name]
        except KeyError:
            known = ", ".join(sorted(self.attributes)) or "none"
            raise DataError(f"unknown attribute '{name}' (available: {known})") from None

    def with_attributes(self, **columns: Union[np.ndarray, Sequence]) -> "PointCloud":
        merged = dict(self.attributes)
        merged.update(_validate_attributes(columns, self.n))
        return PointCloud(n=self.n, points=self.points, attributes=merged)


def _validate_attributes(
    attributes: Optional[Mapping[str, Union[np.ndarray, Sequence]]], n: int
) -> dict[str, np.ndarray]:
    validated: dict[str, np.ndarray] = {}
    for name, values in (attributes or {}).items():
        column = np.array(values, dtype=np.float64).reshape(-1)
        if column.shape[0] != n:
            raise DataError(
                f"attribute '{name}' has length {column.shape[0]}, expected {n}"
            )
        validated[name] = _frozen(column)
    return validated


@dataclass(frozen=True, eq=False)
class MetricSpec:
    """A metric on a point cloud: one of the coordinate metrics or a precomputed matrix."""

    kind: str = "euclidean"
    matrix: Optional[np.ndarray] = None

    def __post_init__(self):
        if self.kind not in METRIC_KINDS:
            raise ConfigError(f"unknown metric '{self.kind}' (expected one of {METRIC_KINDS})")
        if self.kind == "precomputed":
            if self.matrix is None:
                raise MetricError("precomputed metric requires a distance matrix")
            object.__setattr__(self, "matrix", validate_distance_matrix(self.matrix))
        elif self.matrix is not None:
            raise MetricError(f"metric '{self.kind}' does not take a matrix")

    @classmethod
    def precomputed(cls, matrix: Union[np.ndarray, Sequence]) -> "MetricSpec":
        return cls(kind="precomputed", matrix=np.array(matrix, dtype=np.float64))

    @property
    def is_precomputed(self) -> bool:
        return self.kind == "precomputed"


def validate_distance_matrix(matrix: Union[np.ndarray, Sequence]) -> np.ndarray:
    """Check squareness, finiteness, nonnegativity, zero diagonal and symmetry within 1e-12."""
    array = np.array(matrix, dtype=np.float64)
    if array.ndim != 2 or array.shape[0] != array.shape[1]:
        raise MetricError(f"distance matrix must be square, got shape {array.shape}")
    if array.shape[0] == 0:
        raise MetricError("distance matrix is empty")
    if not np.all(np.isfinite(array)):
        raise MetricError("distance matrix has non-finite entries")
    negative = np.argwhere(array < 0)
    if len(negative):
        i, j = negative[0]
        raise MetricError(f"distance matrix has a negative entry at ({i},{j})")
    diagonal = np.nonzero(np.diagonal(array) != 0)[0]
    if len(diagonal):
        i = int(diagonal[0])
        raise MetricError(f"distance matrix has a nonzero diagonal entry at ({i},{i})")
    asymmetric = np.argwhere(np.abs(array - array.T) > SYMMETRY_TOLERANCE)
    if len(asymmetric):
        i, j = asymmetric[0]
        raise MetricError(
            f"distance matrix is asymmetric at ({i},{j}): {array[i, j]!r} vs {array[j, i]!r}"
        )
    return _frozen(array)


def _check_indices(indices: np.ndarray, n: int) -> np.ndarray:
    indices = np.asarray(indices, dtype=np.int64).reshape(-1)
    if len(indices) and (indices.min() < 0 or indices.max() >= n):
        bad = int(indices[(indices < 0) | (indices >= n)][0])
        raise DataError(f"point index {bad} out of range for a cloud of {n} points")
    return indices


def rows_per_block(n_cols: int) -> int:
    return max(1, DISTANCE_BLOCK_ELEMENTS // max(1, n_cols))


def pairwise_distances(
    cloud: PointCloud,
    metric: MetricSpec,
    rows: Optional[Union[np.ndarray, Sequence[int]]] = None,
    cols: Optional[Union[np.ndarray, Sequence[int]]] = None,
) -> np.ndarray:
    """Distance block between the point indices ``rows`` and ``cols`` (default: all points).

    This is the single distance kernel of the package; every oracle goes through it, so
    coverage tests against brute force compare bit-identical values.
    """
    rows = np.arange(cloud.n) if rows is None else _check_indices(rows, cloud.n)
    cols = np.arange(cloud.n) if cols is None else _check_indices(cols, cloud.n)

    if metric.is_precomputed:
        if metric.matrix.shape[0] != cloud.n:
            raise MetricError(
                f"distance matrix is {metric.matrix.shape[0]}x{metric.matrix.shape[0]} "
                f"but the cloud has {cloud.n} points"
            )
        return metric.matrix[np.ix_(rows, cols)]

    points = cloud.require_coordinates()
    return cdist(points[rows], points[cols], metric=_CDIST_NAMES[metric.kind])


def distance(
    metric: MetricSpec,
    a: Union[int, np.ndarray, Sequence[float]],
    b: Union[int, np.ndarray, Sequence[float]],
    cloud: Optional[PointCloud] = None,
) -> float:
    """Distance between two points, each given as an index or as coordinates."""
    a_is_index = isinstance(a, (int, np.integer))
    b_is_index = isinstance(b, (int, np.integer))

    if metric.is_precomputed:
        if not (a_is_index and b_is_index):
            raise MetricError("a precomputed metric can only be queried with point indices")
        n = metric.matrix.shape[0]
        _check_indices(np.array([a, b]), n)
        return float(metric.matrix[a, b])

    if a_is_index or b_is_index:
        if cloud is None:
            raise DataError("point indices need a point cloud to resolve coordinates")
        points = cloud.require_coordinates()
        _check_indices(np.array([x for x in (a, b) if isinstance(x, (int, np.integer))]), cloud.n)
    u = points[a] if a_is_index else np.asarray(a, dtype=np.float64).reshape(-1)
    v = points[b] if b_is_index else np.asarray(b, dtype=np.float64).reshape(-1)
    if u.shape != v.shape:
        raise DimensionMismatchError(
            f"cannot compare points of dimension {u.shape[0]} and {v.shape[0]}"
        )
    return float(cdist(u[None, :], v[None, :], metric=_CDIST_NAMES[metric.kind])[0, 0])


def nearest_center_distances(
    cloud: PointCloud,
    metric: MetricSpec,
    centers: Union[np.ndarray, Sequence[int]],
    workers: Optional[int] = None,
) -> tuple[np.ndarray, np.ndarray]:
    """For every point: distance to its nearest center and that center's position in ``centers``.

    Ties go to the earliest position.
    """
    centers = _check_indices(centers, cloud.n)
    if len(centers) == 0:
        raise DataError("center list is empty")

    def _block(bounds: tuple[int, int]) -> tuple[np.ndarray, np.ndarray]:
        block = pairwise_distances(cloud, metric, np.arange(*bounds), centers)
        nearest = np.argmin(block, axis=1)
        return block[np.arange(len(block)), nearest], nearest

    parts = map_ordered(_block, block_ranges(cloud.n, rows_per_block(len(centers))), workers)
    return (
        np.concatenate([p[0] for p in parts]),
        np.concatenate([p[1] for p in parts]),
    )


def diameter(cloud: PointCloud, metric: MetricSpec, workers: Optional[int] = None) -> float:
    """Largest pairwise distance."""

    def _block(bounds: tuple[int, int]) -> float:
        return float(pairwise_distances(cloud, metric, np.arange(*bounds)).max())

    return max(map_ordered(_block, block_ranges(cloud.n, rows_per_block(cloud.n)), workers))


def _directed_hausdorff(
    X: PointCloud, Y: PointCloud, metric: MetricSpec, workers: Optional[int]
) -> float:
    x_points = X.require_coordinates()
    y_points = Y.require_coordinates()
    name = _CDIST_NAMES[metric.kind]

    def _block(bounds: tuple[int, int]) -> float:
        block = cdist(x_points[bounds[0] : bounds[1]], y_points, metric=name)
        return float(block.min(axis=1).max())

    return max(map_ordered(_block, block_ranges(X.n, rows_per_block(Y.n)), workers))


def hausdorff_distance(
    X: PointCloud, Y: PointCloud, metric: MetricSpec, workers: Optional[int] = None
) -> float:
    """max{ sup_x inf_y d(x,y), sup_y inf_x d(x,y) } by exhaustive (blocked) comparison."""
    if metric.is_precomputed:
        raise MetricError("Hausdorff distance between two clouds is undefined for one matrix")
    if X.n == 0 or Y.n == 0:
        raise DataError("Hausdorff distance needs two nonempty clouds")
    if X.dim != Y.dim:
        raise DimensionMismatchError(
            f"cannot compare clouds of dimension {X.dim} and {Y.dim}"
        )
    return max(
        _directed_hausdorff(X, Y, metric, workers),
        _directed_hausdorff(Y, X, metric, workers),
    )
