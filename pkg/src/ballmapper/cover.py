"""
Ball center selection and cover vectors.

A cover vector records, for every point, the centers whose closed epsilon-balls contain it.
Centers come from a greedy epsilon-net, a max-min (farthest point) epsilon-net, k-means
centroids snapped to data points, or an externally supplied index list.
"""

import logging
from collections.abc import Sequence
from dataclasses import dataclass, replace
from functools import cached_property
from typing import Optional, Union

import numpy as np
from scipy import sparse
from scipy.spatial.distance import cdist
from sklearn.cluster import KMeans

from ballmapper.config import DEFAULT_KMEANS_MAX_ITERS
from ballmapper.exceptions import ConfigError, DataError, UncoveredPointError
from ballmapper.metric import (
    MetricSpec,
    PointCloud,
    nearest_center_distances,
    pairwise_distances,
    rows_per_block,
)
from ballmapper.parallel import block_ranges, map_ordered

logger = logging.getLogger(__name__)

NET_ALGORITHMS = ("greedy", "maxmin", "kmeans")


@dataclass(frozen=True)
class NetParams:
    """Center selection parameters; only the fields of the chosen algorithm may be set."""

    algorithm: str = "greedy"
    epsilon: Optional[float] = None
    max_centers: Optional[int] = None
    k: Optional[int] = None
    seed: int = 0
    kmeans_max_iters: int = DEFAULT_KMEANS_MAX_ITERS

    def __post_init__(self):
        if self.algorithm not in NET_ALGORITHMS:
            raise ConfigError(
                f"unknown net algorithm '{self.algorithm}' (expected one of {NET_ALGORITHMS})"
            )
        if self.algorithm == "kmeans":
            if self.k is None or self.k < 1:
                raise ConfigError("kmeans needs a positive k")
            if self.epsilon is not None:
                raise ConfigError("kmeans derives epsilon from the clustering; do not set it")
            if self.kmeans_max_iters < 1:
                raise ConfigError("kmeans_max_iters must be positive")
        else:
            if self.epsilon is not None:
                _check_epsilon(self.epsilon)
            if self.k is not None:
                raise ConfigError(f"k only applies to kmeans, not {self.algorithm}")
        if self.max_centers is not None:
            if self.algorithm != "maxmin":
                raise ConfigError("max_centers only applies to maxmin")
            if self.max_centers < 1:
                raise ConfigError("max_centers must be at least 1")

    def at_epsilon(self, epsilon: float) -> "NetParams":
        """Same parameters at another radius (kmeans ignores the radius)."""
        if self.algorithm == "kmeans":
            return self
        return replace(self, epsilon=epsilon)


@dataclass(frozen=True, eq=False)
class CoverVector:
    """Per-point sorted lists of covering center indices at radius ``epsilon``.

    Stored as CSR arrays: the centers covering point x are
    ``indices[indptr[x]:indptr[x + 1]]`` (point indices of centers, ascending).
    """

    epsilon: float
    centers: tuple[int, ...]
    indptr: np.ndarray
    indices: np.ndarray

    @property
    def n_points(self) -> int:
        return len(self.indptr) - 1

    @property
    def n_centers(self) -> int:
        return len(self.centers)

    @cached_property
    def covers(self) -> tuple[tuple[int, ...], ...]:
        flat = self.indices.tolist()
        bounds = self.indptr.tolist()
        return tuple(tuple(flat[bounds[x] : bounds[x + 1]]) for x in range(self.n_points))

    def cover_of(self, point: int) -> tuple[int, ...]:
        return tuple(self.indices[self.indptr[point] : self.indptr[point + 1]].tolist())

    def cover_sizes(self) -> np.ndarray:
        return np.diff(self.indptr)

    @cached_property
    def vertex_of(self) -> dict[int, int]:
        """Center point index -> vertex id (position in ``centers``)."""
        return {center: vertex for vertex, center in enumerate(self.centers)}

    def incidence(self) -> sparse.csr_matrix:
        """Point × vertex 0/1 matrix; column j is the ball of ``centers[j]``."""
        lookup = np.full(max(self.centers) + 1, -1, dtype=np.int64)
        lookup[list(self.centers)] = np.arange(self.n_centers)
        columns = lookup[self.indices]
        matrix = sparse.csr_matrix(
            (np.ones(len(columns), dtype=np.int64), columns, self.indptr.copy()),
            shape=(self.n_points, self.n_centers),
        )
        matrix.sort_indices()
        return matrix

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, CoverVector):
            return NotImplemented
        return (
            self.epsilon == other.epsilon
            and self.centers == other.centers
            and np.array_equal(self.indptr, other.indptr)
            and np.array_equal(self.indices, other.indices)
        )

    __hash__ = None


def _check_epsilon(epsilon: float) -> float:
    if not np.isfinite(epsilon) or epsilon <= 0:
        raise ConfigError(f"epsilon must be a positive finite number, got {epsilon!r}")
    return float(epsilon)


def _check_centers(centers: Union[np.ndarray, Sequence[int]], n: int) -> np.ndarray:
    array = np.asarray(centers, dtype=np.int64).reshape(-1)
    if len(array) == 0:
        raise DataError("center list is empty")
    if array.min() < 0 or array.max() >= n:
        bad = int(array[(array < 0) | (array >= n)][0])
        raise DataError(f"center index {bad} out of range for a cloud of {n} points")
    if len(np.unique(array)) != len(array):
        raise DataError("center list contains duplicates")
    return array


def _build_cover(
    cloud: PointCloud,
    metric: MetricSpec,
    centers: np.ndarray,
    epsilon: float,
    workers: Optional[int] = None,
) -> CoverVector:
    """Compute every cover list against fixed centers; raises on the first uncovered point."""
    sorted_centers = np.sort(centers)

    def _block(bounds: tuple[int, int]) -> tuple[np.ndarray, np.ndarray]:
        start, stop = bounds
        block = pairwise_distances(cloud, metric, np.arange(start, stop), sorted_centers)
        inside = block <= epsilon
        counts = inside.sum(axis=1)
        empty = np.flatnonzero(counts == 0)
        if len(empty):
            row = int(empty[0])
            raise UncoveredPointError(start + row, float(block[row].min()), epsilon)
        # Row-major nonzero keeps each row's centers in ascending point-index order
        _, cols = np.nonzero(inside)
        return counts, sorted_centers[cols]

    parts = map_ordered(
        _block, block_ranges(cloud.n, rows_per_block(len(sorted_centers))), workers
    )
    counts = np.concatenate([p[0] for p in parts])
    indptr = np.zeros(cloud.n + 1, dtype=np.int64)
    np.cumsum(counts, out=indptr[1:])
    indices = np.concatenate([p[1] for p in parts]).astype(np.int64)
    indptr.setflags(write=False)
    indices.setflags(write=False)

    return CoverVector(
        epsilon=float(epsilon),
        centers=tuple(int(c) for c in centers),
        indptr=indptr,
        indices=indices,
    )


def _column(cloud: PointCloud, metric: MetricSpec, point: int) -> np.ndarray:
    return pairwise_distances(cloud, metric, None, [point])[:, 0]


def greedy_epsilon_net(
    X: PointCloud, metric: MetricSpec, epsilon: float, workers: Optional[int] = None
) -> CoverVector:
    """Greedy epsilon-net: scan points in index order, open a ball at each uncovered one.

    The result depends on the input order; the same order always yields the same net.
    """
    epsilon = _check_epsilon(epsilon)
    covered = np.zeros(X.n, dtype=bool)
    centers: list[int] = []

    point = 0
    while point < X.n:
        if covered[point]:
            # Jump to the next uncovered point
            offset = int(np.argmin(covered[point:]))
            if covered[point + offset]:
                break
            point += offset
        centers.append(point)
        covered |= _column(X, metric, point) <= epsilon
        point += 1

    logger.info(
        "Greedy net at epsilon=%s selected %d centers for %d points", epsilon, len(centers), X.n
    )
    return _build_cover(X, metric, np.array(centers, dtype=np.int64), epsilon, workers)


def maxmin_epsilon_net(
    X: PointCloud,
    metric: MetricSpec,
    epsilon: float,
    max_centers: Optional[int] = None,
    workers: Optional[int] = None,
) -> CoverVector:
    """Max-min epsilon-net: start at point 0, repeatedly add the point farthest from the centers.

    Ties go to the lowest index. The loop stops before adding a point whose distance is
    already <= epsilon, so distinct centers stay more than epsilon apart. When
    ``max_centers`` cuts the loop short, the cover is computed at the radius that actually
    covers every point and that radius is reported as the cover's epsilon.
    """
    epsilon = _check_epsilon(epsilon)
    if max_centers is not None and max_centers < 1:
        raise ConfigError("max_centers must be at least 1")

    centers = [0]
    min_dist = _column(X, metric, 0)
    while max_centers is None or len(centers) < max_centers:
        farthest = int(np.argmax(min_dist))
        if min_dist[farthest] <= epsilon:
            break
        centers.append(farthest)
        min_dist = np.minimum(min_dist, _column(X, metric, farthest))

    radius = epsilon
    reach = float(min_dist.max())
    if reach > epsilon:
        logger.warning(
            "Max-min net truncated at %d centers; covering radius raised from %s to %s",
            len(centers),
            epsilon,
            reach,
        )
        radius = reach

    logger.info(
        "Max-min net at epsilon=%s selected %d centers for %d points", radius, len(centers), X.n
    )
    return _build_cover(X, metric, np.array(centers, dtype=np.int64), radius, workers)


def _farthest_point_seeds(points: np.ndarray, k: int, start: int) -> list[int]:
    seeds = [start]
    min_dist = np.linalg.norm(points - points[start], axis=1)
    while len(seeds) < k:
        farthest = int(np.argmax(min_dist))
        seeds.append(farthest)
        min_dist = np.minimum(min_dist, np.linalg.norm(points - points[farthest], axis=1))
    return seeds


def kmeans_centers(
    X: PointCloud,
    metric: MetricSpec,
    k: int,
    seed: int = 0,
    max_iters: int = DEFAULT_KMEANS_MAX_ITERS,
    workers: Optional[int] = None,
) -> CoverVector:
    """k-means (Lloyd) centers snapped to their nearest data points.

    Seeding is farthest-point from a seeded random start. Epsilon becomes the distance of
    the farthest point from its nearest snapped center, so the cover is total by construction.
    """
    if metric.kind != "euclidean":
        raise ConfigError(f"kmeans centers need the euclidean metric, got '{metric.kind}'")
    points = X.require_coordinates()
    if not 1 <= k <= X.n:
        raise ConfigError(f"k must be between 1 and {X.n}, got {k}")

    rng = np.random.default_rng(seed)
    start = int(rng.integers(X.n))
    seeds = _farthest_point_seeds(points, k, start)

    model = KMeans(
        n_clusters=k,
        init=points[seeds],
        n_init=1,
        max_iter=max_iters,
        algorithm="lloyd",
        random_state=seed,
    ).fit(points)

    # Snap each centroid to its nearest data point (lowest index on ties), keep first occurrence
    snapped = np.argmin(cdist(model.cluster_centers_, points), axis=1)
    centers = list(dict.fromkeys(int(c) for c in snapped))
    if len(centers) < k:
        logger.warning(
            "%d centroids snapped onto shared data points; %d centers remain",
            k - len(centers),
            len(centers),
        )

    reach, _ = nearest_center_distances(X, metric, centers, workers)
    epsilon = float(reach.max())
    logger.info(
        "k-means with k=%d stopped after %d iterations; epsilon=%s", k, model.n_iter_, epsilon
    )
    return _build_cover(X, metric, np.array(centers, dtype=np.int64), epsilon, workers)


def recover(
    X: PointCloud,
    metric: MetricSpec,
    centers: Union[np.ndarray, Sequence[int]],
    epsilon: float,
    workers: Optional[int] = None,
) -> CoverVector:
    """Recompute all cover lists for fixed centers at a new radius; center order is kept."""
    epsilon = _check_epsilon(epsilon)
    return _build_cover(X, metric, _check_centers(centers, X.n), epsilon, workers)


def cover_from_centers(
    X: PointCloud,
    metric: MetricSpec,
    centers: Union[np.ndarray, Sequence[int]],
    workers: Optional[int] = None,
) -> CoverVector:
    """Cover for externally chosen centers at the smallest radius that covers every point."""
    centers = _check_centers(centers, X.n)
    reach, _ = nearest_center_distances(X, metric, centers, workers)
    epsilon = float(reach.max())
    logger.info(
        "External centers (%d) need epsilon=%s to cover %d points", len(centers), epsilon, X.n
    )
    cover = _build_cover(X, metric, centers, epsilon, workers)
    if not is_separated(X, metric, cover):
        logger.warning(
            "External centers are not an epsilon-net: two of them lie within epsilon=%s", epsilon
        )
    return cover


def build_net(
    X: PointCloud, metric: MetricSpec, params: NetParams, workers: Optional[int] = None
) -> CoverVector:
    """Dispatch to the center selection named by ``params.algorithm``."""
    if params.algorithm == "kmeans":
        return kmeans_centers(X, metric, params.k, params.seed, params.kmeans_max_iters, workers)
    if params.epsilon is None:
        raise ConfigError(f"{params.algorithm} net needs an epsilon")
    if params.algorithm == "maxmin":
        return maxmin_epsilon_net(X, metric, params.epsilon, params.max_centers, workers)
    return greedy_epsilon_net(X, metric, params.epsilon, workers)


def is_separated(X: PointCloud, metric: MetricSpec, cover: CoverVector) -> bool:
    """True when every pair of distinct centers is more than ``cover.epsilon`` apart."""
    block = pairwise_distances(X, metric, cover.centers, cover.centers)
    np.fill_diagonal(block, np.inf)
    return bool(np.all(block > cover.epsilon))
