"""
Ball Mapper graph and filtered nerve construction from a cover vector.

Vertices are ball centers in cover order. Two vertices are joined when some point lies in
both balls; the edge weight is the number of such witness points. The nerve generalizes
this to higher simplices with the witness count as filtration value.
"""

import logging
from collections import Counter
from collections.abc import Mapping, Sequence
from dataclasses import dataclass
from itertools import combinations
from types import MappingProxyType
from typing import Union

import numpy as np
from scipy import sparse

from ballmapper.config import DEFAULT_COVER_GUARD, DEFAULT_MAX_DIM
from ballmapper.cover import CoverVector
from ballmapper.exceptions import ConfigError, CoverGuardError, DataError
from ballmapper.unionfind import UnionFind

logger = logging.getLogger(__name__)

AGGREGATORS = ("mean", "min", "max")


@dataclass(frozen=True)
class Vertex:
    id: int
    center: int
    covered: tuple[int, ...]

    @property
    def size(self) -> int:
        return len(self.covered)


@dataclass(frozen=True, order=True)
class Edge:
    u: int
    v: int
    weight: int


@dataclass(frozen=True)
class BMGraph:
    """Ball Mapper graph at radius ``epsilon``.

    ``partial`` is set once density filtering has dropped vertices: the covered sets then
    no longer add up to all ``n_points`` points.
    """

    epsilon: float
    vertices: tuple[Vertex, ...]
    edges: tuple[Edge, ...]
    n_points: int
    partial: bool = False

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    def sizes(self) -> np.ndarray:
        return np.array([v.size for v in self.vertices], dtype=np.int64)

    def centers(self) -> tuple[int, ...]:
        return tuple(v.center for v in self.vertices)

    def edge_weights(self) -> dict[tuple[int, int], int]:
        return {(e.u, e.v): e.weight for e in self.edges}

    def adjacency(self) -> list[list[int]]:
        neighbors: list[list[int]] = [[] for _ in self.vertices]
        for e in self.edges:
            neighbors[e.u].append(e.v)
            neighbors[e.v].append(e.u)
        return [sorted(n) for n in neighbors]


@dataclass(frozen=True)
class NerveComplex:
    """Simplices (sorted tuples of center point indices) mapped to their witness counts."""

    max_dim: int
    simplices: Mapping[tuple[int, ...], int]

    def skeleton(self, dim: int) -> dict[tuple[int, ...], int]:
        return {s: f for s, f in self.simplices.items() if len(s) == dim + 1}

    def count_by_dim(self) -> dict[int, int]:
        counts = Counter(len(s) - 1 for s in self.simplices)
        return dict(sorted(counts.items()))


@dataclass(frozen=True)
class VertexColoring:
    attribute: str
    aggregator: str
    values: tuple[float, ...]


def _witness_counts(incidence: sparse.csr_matrix) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Upper-triangular pairs (u < v) of columns sharing rows, with the shared row count."""
    gram = sparse.triu(incidence.T @ incidence, k=1).tocoo()
    order = np.lexsort((gram.col, gram.row))
    return gram.row[order], gram.col[order], gram.data[order].astype(np.int64)


def build_bm_graph(cover: CoverVector) -> BMGraph:
    """Ball Mapper graph: one vertex per center, one weighted edge per co-covered pair."""
    incidence = cover.incidence()
    by_vertex = incidence.tocsc()
    by_vertex.sort_indices()
    rows = by_vertex.indices.tolist()
    bounds = by_vertex.indptr.tolist()

    vertices = tuple(
        Vertex(id=j, center=center, covered=tuple(rows[bounds[j] : bounds[j + 1]]))
        for j, center in enumerate(cover.centers)
    )
    us, vs, weights = _witness_counts(incidence)
    edges = tuple(
        Edge(u, v, w) for u, v, w in zip(us.tolist(), vs.tolist(), weights.tolist())
    )
    logger.info(
        "BM graph at epsilon=%s: %d vertices, %d edges", cover.epsilon, len(vertices), len(edges)
    )
    return BMGraph(epsilon=cover.epsilon, vertices=vertices, edges=edges, n_points=cover.n_points)


def build_nerve(
    cover: CoverVector,
    max_dim: int = DEFAULT_MAX_DIM,
    max_covers_per_point: int = DEFAULT_COVER_GUARD,
) -> NerveComplex:
    """Filtered nerve up to ``max_dim``: every subset of a point's cover list is a simplex.

    Enumeration is exponential in the cover list length, so a point covered by more than
    ``max_covers_per_point`` centers aborts the build.
    """
    if max_dim < 1:
        raise ConfigError(f"max_dim must be at least 1, got {max_dim}")
    sizes = cover.cover_sizes()
    crowded = np.flatnonzero(sizes > max_covers_per_point)
    if len(crowded):
        point = int(crowded[0])
        raise CoverGuardError(point, int(sizes[point]), max_covers_per_point)

    counts: Counter = Counter()
    for cover_list in cover.covers:
        for size in range(1, min(max_dim + 1, len(cover_list)) + 1):
            counts.update(combinations(cover_list, size))

    ordered = dict(sorted(counts.items(), key=lambda item: (len(item[0]), item[0])))
    logger.info("Nerve up to dimension %d: %d simplices", max_dim, len(ordered))
    return NerveComplex(max_dim=max_dim, simplices=MappingProxyType(ordered))


def vertex_coloring(
    graph: BMGraph,
    attribute: Union[np.ndarray, Sequence[float]],
    aggregator: str = "mean",
    name: str = "attribute",
) -> VertexColoring:
    """Aggregate a per-point attribute over the points each vertex covers."""
    if aggregator not in AGGREGATORS:
        raise ConfigError(f"unknown aggregator '{aggregator}' (expected one of {AGGREGATORS})")
    values = np.asarray(attribute, dtype=np.float64).reshape(-1)
    if len(values) != graph.n_points:
        raise DataError(
            f"attribute '{name}' has length {len(values)}, the graph covers {graph.n_points} points"
        )
    if not np.all(np.isfinite(values)):
        raise DataError(f"attribute '{name}' has non-finite entries")

    reduce = {"mean": np.mean, "min": np.min, "max": np.max}[aggregator]
    aggregated = tuple(float(reduce(values[list(v.covered)])) for v in graph.vertices)
    return VertexColoring(attribute=name, aggregator=aggregator, values=aggregated)


def connected_components(graph: BMGraph) -> tuple[int, tuple[int, ...]]:
    """Component count and canonical labels (smallest vertex id in each component)."""
    forest = UnionFind(graph.n_vertices)
    for e in graph.edges:
        forest.union(e.u, e.v)
    labels = forest.labels()
    return len(set(labels)), labels


def cycle_rank(graph: BMGraph) -> int:
    """Number of independent cycles: E - V + C."""
    count, _ = connected_components(graph)
    return graph.n_edges - graph.n_vertices + count


def vertex_degrees(graph: BMGraph) -> np.ndarray:
    ends = np.array([(e.u, e.v) for e in graph.edges], dtype=np.int64).reshape(-1)
    return np.bincount(ends, minlength=graph.n_vertices)


def filter_low_density(graph: BMGraph, n_min: int) -> BMGraph:
    """Drop vertices covering fewer than ``n_min`` points, with their edges; ids are re-indexed."""
    if n_min < 0:
        raise ConfigError(f"n_min must be nonnegative, got {n_min}")

    kept = [v for v in graph.vertices if v.size >= n_min]
    new_id = {v.id: i for i, v in enumerate(kept)}
    vertices = tuple(Vertex(id=i, center=v.center, covered=v.covered) for i, v in enumerate(kept))
    edges = tuple(
        Edge(new_id[e.u], new_id[e.v], e.weight)
        for e in graph.edges
        if e.u in new_id and e.v in new_id
    )
    removed = graph.n_vertices - len(kept)
    if removed:
        logger.info(
            "Density filter n_min=%d removed %d of %d vertices", n_min, removed, graph.n_vertices
        )
    return BMGraph(
        epsilon=graph.epsilon,
        vertices=vertices,
        edges=edges,
        n_points=graph.n_points,
        partial=graph.partial or removed > 0,
    )


def vertex_majority(graph: BMGraph, labels: Union[np.ndarray, Sequence[int]]) -> tuple[int, ...]:
    """Most frequent label among each vertex's covered points (lowest label on ties)."""
    labels = np.asarray(labels, dtype=np.int64).reshape(-1)
    if len(labels) != graph.n_points:
        raise DataError(f"labels have length {len(labels)}, expected {graph.n_points}")
    if len(labels) and labels.min() < 0:
        raise DataError("labels must be nonnegative integers")
    return tuple(int(np.bincount(labels[list(v.covered)]).argmax()) for v in graph.vertices)
