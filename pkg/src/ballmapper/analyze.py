"""
Graph statistics for interpreting Ball Mapper output: average degree, degree sweeps over radii
as a dimension proxy, the Hausdorff trust band and density thresholds for denoising.
"""

import logging
from collections.abc import Callable, Collection, Sequence
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from ballmapper.config import DEFAULT_DENOISE_QUANTILE
from ballmapper.cover import NetParams, recover
from ballmapper.exceptions import ConfigError, DataError
from ballmapper.metric import MetricSpec, PointCloud, hausdorff_distance
from ballmapper.multiscale import multiscale_bm
from ballmapper.nerve import (
    BMGraph,
    build_bm_graph,
    connected_components,
    vertex_degrees,
    vertex_majority,
)
from ballmapper.parallel import map_ordered

logger = logging.getLogger(__name__)

Sampler = Callable[[int], PointCloud]


@dataclass(frozen=True)
class DegreeSweep:
    """Average vertex degree per radius, averaged over repetitions.

    ``interior_mean_degree`` is only filled when the sweep knows the sampling box; entries are
    NaN for radii where no vertex is far enough from the faces.
    """

    radii: tuple[float, ...]
    mean_degree: tuple[float, ...]
    per_repetition: tuple[tuple[float, ...], ...]
    repetitions: int
    interior_mean_degree: Optional[tuple[float, ...]] = None


@dataclass(frozen=True)
class TrustBand:
    lower: float
    upper: float

    def contains(self, radius: float) -> bool:
        return self.lower <= radius <= self.upper


@dataclass(frozen=True)
class DegreeProfile:
    """Mean degree of vertices grouped by how close their centers sit to the box faces."""

    interior_mean: Optional[float]
    boundary_mean: Optional[float]
    corner_mean: Optional[float]
    interior_count: int
    boundary_count: int
    corner_count: int


def average_degree(graph: BMGraph) -> float:
    if graph.n_vertices == 0:
        raise DataError("average degree of an empty graph is undefined")
    return 2.0 * graph.n_edges / graph.n_vertices


def degree_profile(
    graph: BMGraph,
    X: PointCloud,
    side: float,
    interior_margin: Optional[float] = None,
    corner_margin: Optional[float] = None,
) -> DegreeProfile:
    """Split vertices of a graph over [0, side]^d into interior, corner and boundary groups.

    Interior centers are at least ``interior_margin`` (default 2 epsilon) from every face.
    Corner centers are within ``corner_margin`` (default epsilon) of a face in every coordinate.
    Everything else is boundary.
    """
    if side <= 0:
        raise ConfigError(f"side must be positive, got {side!r}")
    interior_margin = 2 * graph.epsilon if interior_margin is None else interior_margin
    corner_margin = graph.epsilon if corner_margin is None else corner_margin

    coords = X.require_coordinates()[list(graph.centers())]
    to_face = np.minimum(coords, side - coords)
    interior = np.all(to_face >= interior_margin, axis=1)
    corner = np.all(to_face <= corner_margin, axis=1) & ~interior
    boundary = ~(interior | corner)
    degrees = vertex_degrees(graph)

    def _mean(mask: np.ndarray) -> Optional[float]:
        return float(degrees[mask].mean()) if mask.any() else None

    return DegreeProfile(
        interior_mean=_mean(interior),
        boundary_mean=_mean(boundary),
        corner_mean=_mean(corner),
        interior_count=int(interior.sum()),
        boundary_count=int(boundary.sum()),
        corner_count=int(corner.sum()),
    )


def _column_nanmeans(rows: Sequence[Sequence[float]]) -> tuple[float, ...]:
    table = np.array(rows, dtype=np.float64)
    means = []
    for column in table.T:
        finite = column[~np.isnan(column)]
        means.append(float(finite.mean()) if len(finite) else float("nan"))
    return tuple(means)


def dimension_sweep(
    source: Union[PointCloud, Sampler],
    metric: MetricSpec,
    radii: Sequence[float],
    repetitions: int = 1,
    seed: int = 0,
    net: Optional[NetParams] = None,
    box_side: Optional[float] = None,
    workers: Optional[int] = None,
) -> DegreeSweep:
    """Average degree per radius of multi-scale BM graphs, averaged over repetitions.

    Args:
        source: A fixed cloud, or a sampler called with ``seed + repetition`` for fresh draws.
        metric: Metric used for every repetition.
        radii: Nondecreasing radii; each repetition picks its centers at ``radii[0]``.
        repetitions: Number of repetitions (>= 1).
        seed: Master seed.
        net: Center selection; defaults to the greedy net.
        box_side: Side of the sampling box [0, side]^d; enables the interior-only averages.
        workers: Thread cap; repetitions run concurrently.

    Returns:
        DegreeSweep: Per-radius means and the per-repetition rows they came from.
    """
    if repetitions < 1:
        raise ConfigError(f"repetitions must be at least 1, got {repetitions}")

    def _repetition(rep: int) -> tuple[list[float], list[float]]:
        X = source(seed + rep) if callable(source) else source
        ms = multiscale_bm(X, metric, radii, net=net, workers=1)
        degrees = [average_degree(g) for g in ms.graphs]
        interior = []
        if box_side is not None:
            for g in ms.graphs:
                mean = degree_profile(g, X, box_side).interior_mean
                interior.append(float("nan") if mean is None else mean)
        logger.debug("Sweep repetition %d: %s", rep, degrees)
        return degrees, interior

    results = map_ordered(_repetition, range(repetitions), workers)
    per_repetition = tuple(tuple(r[0]) for r in results)
    mean_degree = tuple(float(v) for v in np.mean(np.array(per_repetition), axis=0))
    interior = _column_nanmeans([r[1] for r in results]) if box_side is not None else None

    logger.info(
        "Dimension sweep over %d radii, %d repetitions: mean degree %s .. %s",
        len(mean_degree),
        repetitions,
        mean_degree[0],
        mean_degree[-1],
    )
    return DegreeSweep(
        radii=tuple(float(r) for r in radii),
        mean_degree=mean_degree,
        per_repetition=per_repetition,
        repetitions=repetitions,
        interior_mean_degree=interior,
    )


def plateau_degree(sweep: DegreeSweep) -> float:
    """Median mean degree over the middle third of the radii."""
    n = len(sweep.mean_degree)
    if n < 3:
        raise ConfigError(f"plateau needs at least 3 radii, got {n}")
    middle = sweep.mean_degree[n // 3 : n - n // 3]
    return float(np.median(middle))


def trust_band(epsilon: float, delta: float) -> TrustBand:
    """Radii between which features of a BM graph of a noisy sample can be trusted."""
    if not np.isfinite(epsilon) or epsilon <= 0:
        raise ConfigError(f"epsilon must be positive, got {epsilon!r}")
    if not np.isfinite(delta) or delta < 0:
        raise ConfigError(f"delta must be nonnegative, got {delta!r}")
    return TrustBand(lower=float(epsilon), upper=3.0 * epsilon + 2.0 * delta)


def hausdorff_trust_band(
    X: PointCloud,
    Y: PointCloud,
    metric: MetricSpec,
    epsilon: float,
    workers: Optional[int] = None,
) -> TrustBand:
    """Trust band with delta measured as the Hausdorff distance between the two samples."""
    delta = hausdorff_distance(X, Y, metric, workers)
    logger.info("Hausdorff distance between samples: %s", delta)
    return trust_band(epsilon, delta)


def suggest_density_threshold(
    graph: BMGraph, quantile: float = DEFAULT_DENOISE_QUANTILE
) -> int:
    """Vertex-size quantile, rounded down, as the ``n_min`` for ``filter_low_density``."""
    if not 0.0 <= quantile <= 1.0:
        raise ConfigError(f"quantile must be in [0, 1], got {quantile!r}")
    if graph.n_vertices == 0:
        raise DataError("cannot suggest a density threshold for an empty graph")
    return int(np.floor(np.quantile(graph.sizes(), quantile)))


def merge_radius(
    X: PointCloud,
    metric: MetricSpec,
    centers: Sequence[int],
    labels: Union[np.ndarray, Sequence[int]],
    group_a: Collection[int],
    group_b: Collection[int],
    lo: float,
    hi: float,
    tol: float = 0.05,
) -> float:
    """Smallest radius (to within ``tol``) at which the two label groups share a component.

    Vertex majorities are taken once at ``lo``; vertex ids are stable across radii because the
    centers are fixed. Returns ``lo`` when the groups already touch there.

    Raises:
        ConfigError: If ``lo >= hi`` or ``tol`` is not positive.
        DataError: If the groups are still apart at ``hi``.
    """
    if not lo < hi:
        raise ConfigError(f"need lo < hi, got {lo!r} and {hi!r}")
    if tol <= 0:
        raise ConfigError(f"tol must be positive, got {tol!r}")

    base = build_bm_graph(recover(X, metric, centers, lo))
    majority = np.array(vertex_majority(base, labels))
    in_a = np.isin(majority, list(group_a))
    in_b = np.isin(majority, list(group_b))

    def _touching(radius: float) -> bool:
        graph = base if radius == lo else build_bm_graph(recover(X, metric, centers, radius))
        _, components = connected_components(graph)
        components = np.array(components)
        return bool(set(components[in_a].tolist()) & set(components[in_b].tolist()))

    if _touching(lo):
        return float(lo)
    if not _touching(hi):
        raise DataError(f"label groups are still apart at radius {hi!r}")
    while hi - lo > tol:
        mid = (lo + hi) / 2
        if _touching(mid):
            hi = mid
        else:
            lo = mid
    logger.info("Groups %s and %s merge at radius %s", sorted(group_a), sorted(group_b), hi)
    return float(hi)
