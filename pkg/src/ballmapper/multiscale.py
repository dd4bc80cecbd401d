"""
Multi-scale Ball Mapper: one fixed center set, a nondecreasing list of radii, one graph per
radius, and the checks that the resulting graphs nest.

The component-level interleaving check compares BM graphs against single-linkage clustering
of the raw points, which is the discrete stand-in for components of a union of balls.
"""

import logging
from collections.abc import Sequence
from dataclasses import dataclass, field
from typing import Optional, Union

import numpy as np

from ballmapper.cover import NetParams, build_net, is_separated, recover
from ballmapper.exceptions import ConfigError, DataError, UncoveredPointError
from ballmapper.metric import MetricSpec, PointCloud, pairwise_distances, rows_per_block
from ballmapper.nerve import BMGraph, build_bm_graph, connected_components
from ballmapper.parallel import block_ranges, map_ordered
from ballmapper.unionfind import UnionFind

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class MultiScaleBM:
    centers: tuple[int, ...]
    radii: tuple[float, ...]
    graphs: tuple[BMGraph, ...]


@dataclass(frozen=True)
class InclusionReport:
    """Outcome of the nesting checks; ``violations`` lists every failure in radius order."""

    radii: tuple[float, ...]
    component_counts: tuple[int, ...]
    violations: tuple[str, ...] = ()

    @property
    def passed(self) -> bool:
        return not self.violations

    @property
    def first_violation(self) -> Optional[str]:
        return self.violations[0] if self.violations else None

    def to_record(self) -> dict:
        return {
            "check": "inclusions",
            "passed": self.passed,
            "radii": list(self.radii),
            "component_counts": list(self.component_counts),
            "violations": list(self.violations),
        }


@dataclass(frozen=True)
class InterleavingStep:
    """Component counts for one step k of the chain at net radius epsilon.

    ``lower_holds``: components(SL(2k eps)) <= components(G_{k eps}).
    ``upper_holds``: components(G_{(k+1) eps}) <= components(SL(k eps)).
    """

    k: int
    graph_components: int
    next_graph_components: int
    linkage_components: int
    double_linkage_components: int

    @property
    def lower_holds(self) -> bool:
        return self.double_linkage_components <= self.graph_components

    @property
    def upper_holds(self) -> bool:
        return self.next_graph_components <= self.linkage_components


@dataclass(frozen=True)
class InterleavingReport:
    epsilon: float
    steps: tuple[InterleavingStep, ...] = field(default_factory=tuple)

    @property
    def passed(self) -> bool:
        return all(s.lower_holds and s.upper_holds for s in self.steps)

    def to_record(self) -> dict:
        return {
            "check": "interleaving",
            "epsilon": self.epsilon,
            "passed": self.passed,
            "steps": [
                {
                    "k": s.k,
                    "graph_components": s.graph_components,
                    "next_graph_components": s.next_graph_components,
                    "linkage_components": s.linkage_components,
                    "double_linkage_components": s.double_linkage_components,
                    "lower_holds": s.lower_holds,
                    "upper_holds": s.upper_holds,
                }
                for s in self.steps
            ],
        }


def _check_radii(radii: Sequence[float]) -> tuple[float, ...]:
    radii = tuple(float(r) for r in radii)
    if not radii:
        raise ConfigError("radii list is empty")
    for r in radii:
        if not np.isfinite(r) or r <= 0:
            raise ConfigError(f"radii must be positive finite numbers, got {r!r}")
    for i in range(1, len(radii)):
        if radii[i] < radii[i - 1]:
            raise ConfigError(
                f"radii must be sorted nondecreasing: {radii[i - 1]!r} comes before {radii[i]!r}"
            )
    return radii


def graphs_at_radii(
    X: PointCloud,
    metric: MetricSpec,
    centers: Sequence[int],
    radii: Sequence[float],
    workers: Optional[int] = None,
) -> tuple[BMGraph, ...]:
    """BM graph for fixed centers at each radius; builds run concurrently, one per radius."""

    def _build(epsilon: float) -> BMGraph:
        return build_bm_graph(recover(X, metric, centers, epsilon, workers=1))

    return tuple(map_ordered(_build, radii, workers))


def multiscale_bm(
    X: PointCloud,
    metric: MetricSpec,
    radii: Sequence[float],
    net: Optional[NetParams] = None,
    centers: Optional[Sequence[int]] = None,
    workers: Optional[int] = None,
) -> MultiScaleBM:
    """Choose centers once at ``radii[0]`` and build the BM graph at every radius.

    Args:
        X: Point cloud.
        metric: Metric on ``X``.
        radii: Nondecreasing positive radii; the net is built at the first one.
        net: Center selection. Its epsilon is replaced by ``radii[0]`` (k-means keeps its own).
        centers: Externally chosen centers; when given, ``net`` is ignored.
        workers: Thread cap for the per-radius builds.

    Returns:
        MultiScaleBM: Shared centers plus one graph per radius.

    Raises:
        ConfigError: If radii are empty, nonpositive or unsorted.
        UncoveredPointError: If the centers do not cover ``X`` at ``radii[0]``.
    """
    radii = _check_radii(radii)
    if centers is None:
        params = (net or NetParams()).at_epsilon(radii[0])
        centers = build_net(X, metric, params, workers).centers
    centers = tuple(int(c) for c in centers)

    graphs = graphs_at_radii(X, metric, centers, radii, workers)
    logger.info(
        "Multi-scale BM: %d centers over %d radii (%s .. %s)",
        len(centers),
        len(radii),
        radii[0],
        radii[-1],
    )
    return MultiScaleBM(centers=centers, radii=radii, graphs=graphs)


def check_inclusions(ms: MultiScaleBM) -> InclusionReport:
    """Edge nesting, weight monotonicity and nonincreasing component counts between radii."""
    violations: list[str] = []
    counts = tuple(connected_components(g)[0] for g in ms.graphs)

    for i in range(1, len(ms.graphs)):
        small, large = ms.graphs[i - 1], ms.graphs[i]
        if small.centers() != large.centers():
            violations.append(
                f"vertex sets differ between epsilon={small.epsilon!r} and {large.epsilon!r}"
            )
            continue
        larger_weights = large.edge_weights()
        for e in small.edges:
            name = f"edge ({small.vertices[e.u].center},{small.vertices[e.v].center})"
            weight = larger_weights.get((e.u, e.v))
            if weight is None:
                violations.append(
                    f"{name} at epsilon={small.epsilon!r} is missing at epsilon={large.epsilon!r}"
                )
            elif weight < e.weight:
                violations.append(
                    f"{name} weight drops from {e.weight} to {weight} "
                    f"between epsilon={small.epsilon!r} and {large.epsilon!r}"
                )
        if counts[i] > counts[i - 1]:
            violations.append(
                f"component count rises from {counts[i - 1]} to {counts[i]} "
                f"between epsilon={small.epsilon!r} and {large.epsilon!r}"
            )

    if violations:
        logger.warning("Inclusion check failed: %s", violations[0])
    return InclusionReport(radii=ms.radii, component_counts=counts, violations=tuple(violations))


def single_linkage_components(
    X: PointCloud,
    metric: MetricSpec,
    cutoff: float,
    workers: Optional[int] = None,
) -> tuple[int, tuple[int, ...]]:
    """Components of the graph joining every pair of points at distance <= ``cutoff``.

    Close pairs are found block by block over all pairs; unions happen in the calling thread.
    Labels are canonical (smallest point index in the component).
    """
    if not np.isfinite(cutoff) or cutoff < 0:
        raise ConfigError(f"cutoff must be a nonnegative finite number, got {cutoff!r}")

    def _close_pairs(bounds: tuple[int, int]) -> tuple[np.ndarray, np.ndarray]:
        start, stop = bounds
        block = pairwise_distances(X, metric, np.arange(start, stop), np.arange(start, X.n))
        rows, cols = np.nonzero(np.triu(block <= cutoff, k=1))
        return rows + start, cols + start

    forest = UnionFind(X.n)
    for left, right in map_ordered(_close_pairs, block_ranges(X.n, rows_per_block(X.n)), workers):
        forest.union_pairs(left, right)
    labels = forest.labels()
    return len(set(labels)), labels


def rips_components(
    X: PointCloud, metric: MetricSpec, r: float, workers: Optional[int] = None
) -> int:
    """Component count of the Vietoris-Rips 1-skeleton with balls of radius ``r``."""
    count, _ = single_linkage_components(X, metric, 2 * r, workers)
    return count


def interleaving_h0_check(
    X: PointCloud,
    metric: MetricSpec,
    centers: Union[np.ndarray, Sequence[int]],
    epsilon: float,
    steps: int = 1,
    workers: Optional[int] = None,
) -> InterleavingReport:
    """Compare BM graph components against single linkage along the chain of radii k*epsilon.

    For k = 1..steps: components(SL(2k eps)) <= components(G_{k eps}) and
    components(G_{(k+1) eps}) <= components(SL(k eps)). Graphs are built on the given centers,
    which must cover ``X`` at ``epsilon``. Two centers within epsilon of each other are
    rejected as well.

    Raises:
        ConfigError: If steps < 1 or epsilon is not positive.
        DataError: If the centers are not an epsilon-net of ``X`` (uncovered point or two
            centers within epsilon).
    """
    if steps < 1:
        raise ConfigError(f"steps must be at least 1, got {steps}")
    try:
        base_cover = recover(X, metric, centers, epsilon, workers)
    except UncoveredPointError as exc:
        raise DataError(f"centers are not an epsilon-net at epsilon={epsilon!r}: {exc}") from exc
    if not is_separated(X, metric, base_cover):
        raise DataError(
            f"centers are not an epsilon-net at epsilon={epsilon!r}: two centers lie within epsilon"
        )
    base = build_bm_graph(base_cover)

    centers = base.centers()
    radii = [k * epsilon for k in range(2, steps + 2)]
    graph_counts = [connected_components(base)[0]]
    for graph in graphs_at_radii(X, metric, centers, radii, workers):
        graph_counts.append(connected_components(graph)[0])

    cutoffs = sorted(
        {k * epsilon for k in range(1, steps + 1)} | {2 * k * epsilon for k in range(1, steps + 1)}
    )

    def _linkage(cutoff: float) -> int:
        return single_linkage_components(X, metric, cutoff, workers=1)[0]

    linkage = dict(zip(cutoffs, map_ordered(_linkage, cutoffs, workers)))

    report = InterleavingReport(
        epsilon=float(epsilon),
        steps=tuple(
            InterleavingStep(
                k=k,
                graph_components=graph_counts[k - 1],
                next_graph_components=graph_counts[k],
                linkage_components=linkage[k * epsilon],
                double_linkage_components=linkage[2 * k * epsilon],
            )
            for k in range(1, steps + 1)
        ),
    )
    if not report.passed:
        logger.warning("Interleaving check failed at epsilon=%s", epsilon)
    return report
