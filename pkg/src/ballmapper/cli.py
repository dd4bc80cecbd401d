"""
Command-line entry point: ``ballmapper {build,multiscale,dimension,denoise} ...``.

stdout carries only the summary lines; logging goes to stderr. Exit codes:
0 success, 1 usage or parameter error, 2 data error, 3 invariant violation.
"""

import argparse
import logging
import sys
from collections.abc import Sequence
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from ballmapper.analyze import dimension_sweep, plateau_degree, suggest_density_threshold
from ballmapper.config import (
    DEFAULT_COVER_GUARD,
    DEFAULT_DENOISE_QUANTILE,
    DEFAULT_KMEANS_MAX_ITERS,
)
from ballmapper.cover import NET_ALGORITHMS, CoverVector, NetParams, build_net, cover_from_centers
from ballmapper.cover import recover as recover_cover
from ballmapper.datasets import GeneratorSpec, generate
from ballmapper.exceptions import (
    EXIT_OK,
    EXIT_USAGE,
    BallMapperError,
    ConfigError,
    InvariantViolation,
)
from ballmapper.export import (
    append_report,
    write_dot,
    write_graph_json,
    write_html,
    write_sweep_csv,
)
from ballmapper.ingest import read_centers, read_distance_matrix_csv, read_points_csv
from ballmapper.metric import METRIC_KINDS, MetricSpec, PointCloud
from ballmapper.multiscale import check_inclusions, interleaving_h0_check, multiscale_bm
from ballmapper.nerve import (
    AGGREGATORS,
    BMGraph,
    VertexColoring,
    build_bm_graph,
    build_nerve,
    connected_components,
    cycle_rank,
    filter_low_density,
    vertex_coloring,
)

logger = logging.getLogger(__name__)


class BallMapperArgumentParser(argparse.ArgumentParser):
    """ArgumentParser whose usage errors exit with code 1."""

    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _float_list(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(part) for part in text.split(",") if part.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected numbers, got {text!r}") from None


def _int_list(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(part) for part in text.split(",") if part.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected integers, got {text!r}") from None


def _name_list(text: str) -> tuple[str, ...]:
    return tuple(part.strip() for part in text.split(",") if part.strip())


@dataclass(frozen=True)
class RunConfig:
    """Everything one CLI invocation needs; built from parsed arguments."""

    command: str
    input_path: Optional[Path] = None
    distance_matrix: Optional[Path] = None
    gen: Optional[str] = None
    delimiter: str = ","
    header: bool = False
    attribute_columns: tuple[str, ...] = ()
    metric: str = "euclidean"
    net: str = "greedy"
    epsilon: Optional[float] = None
    radii: tuple[float, ...] = ()
    k: Optional[int] = None
    max_centers: Optional[int] = None
    kmeans_max_iters: int = DEFAULT_KMEANS_MAX_ITERS
    seed: int = 0
    centers_path: Optional[Path] = None
    denoise_min: Optional[int] = None
    denoise_quantile: Optional[float] = None
    color: Optional[str] = None
    color_agg: str = "mean"
    weighted_edges: bool = False
    include_covered: bool = False
    out_json: Optional[Path] = None
    out_dot: Optional[Path] = None
    out_html: Optional[Path] = None
    out_csv: Optional[Path] = None
    out_report: Optional[Path] = None
    max_dim: Optional[int] = None
    cover_guard: int = DEFAULT_COVER_GUARD
    dims: tuple[int, ...] = ()
    reps: int = 1
    interleaving_steps: int = 0
    threads: Optional[int] = None

    @classmethod
    def from_namespace(cls, ns: argparse.Namespace) -> "RunConfig":
        values = {name: getattr(ns, name) for name in cls.__dataclass_fields__ if hasattr(ns, name)}
        config = cls(**values)
        config.validate()
        return config

    def validate(self) -> None:
        sources = [s for s in (self.input_path, self.distance_matrix, self.gen) if s is not None]
        if len(sources) != 1:
            raise ConfigError("exactly one of --input, --distance-matrix, --gen is required")
        if list(self.radii) != sorted(self.radii):
            raise ConfigError(f"--radii must be sorted nondecreasing, got {list(self.radii)}")
        if self.denoise_min is not None and self.denoise_min < 0:
            raise ConfigError("--denoise-min must be nonnegative")
        if self.denoise_quantile is not None and not 0.0 <= self.denoise_quantile <= 1.0:
            raise ConfigError(f"--denoise-quantile must be in [0, 1], got {self.denoise_quantile}")
        if self.reps < 1:
            raise ConfigError("--reps must be at least 1")
        if any(d < 1 for d in self.dims):
            raise ConfigError(f"--dims must be positive, got {list(self.dims)}")
        if self.distance_matrix is not None and self.metric != "euclidean":
            raise ConfigError("--metric does not apply to --distance-matrix input")

    def net_params(self, epsilon: Optional[float]) -> NetParams:
        return NetParams(
            algorithm=self.net,
            epsilon=None if self.net == "kmeans" else epsilon,
            max_centers=self.max_centers,
            k=self.k,
            seed=self.seed,
            kmeans_max_iters=self.kmeans_max_iters,
        )

    def generator(self) -> GeneratorSpec:
        spec = GeneratorSpec.parse(self.gen)
        # A seed in the spec string wins over --seed
        return spec if "seed=" in self.gen else spec.with_seed(self.seed)


def build_parser() -> argparse.ArgumentParser:
    common = BallMapperArgumentParser(add_help=False)

    source = common.add_argument_group("input")
    inputs = source.add_mutually_exclusive_group(required=True)
    inputs.add_argument("--input", dest="input_path", type=Path, help="point cloud CSV")
    inputs.add_argument("--distance-matrix", type=Path, help="square distance matrix CSV")
    inputs.add_argument("--gen", help="generator spec, e.g. circle:n=500,dim=3,seed=0")
    source.add_argument("--delimiter", default=",")
    source.add_argument("--header", action="store_true", help="first CSV line is a header")
    source.add_argument(
        "--attribute-columns", type=_name_list, default=(), help="comma list of names or positions"
    )

    cover = common.add_argument_group("cover")
    metrics = [m for m in METRIC_KINDS if m != "precomputed"]
    cover.add_argument("--metric", choices=metrics, default="euclidean")
    cover.add_argument("--net", choices=NET_ALGORITHMS, default="greedy")
    cover.add_argument("--epsilon", type=float)
    cover.add_argument("--k", type=int, help="number of k-means centers")
    cover.add_argument("--max-centers", type=int, help="max-min net early stop")
    cover.add_argument("--kmeans-max-iters", type=int, default=DEFAULT_KMEANS_MAX_ITERS)
    cover.add_argument("--seed", type=int, default=0)
    cover.add_argument(
        "--centers", dest="centers_path", type=Path, help="center point indices, one per line"
    )
    cover.add_argument("--max-dim", type=int, help="also build the nerve up to this dimension")
    cover.add_argument("--cover-guard", type=int, default=DEFAULT_COVER_GUARD)

    output = common.add_argument_group("output")
    output.add_argument("--color", help="attribute column used to color vertices")
    output.add_argument("--color-agg", choices=AGGREGATORS, default="mean")
    output.add_argument("--weighted-edges", action="store_true")
    output.add_argument("--include-covered", action="store_true")
    output.add_argument("--out-json", type=Path)
    output.add_argument("--out-dot", type=Path)
    output.add_argument("--out-html", type=Path)
    output.add_argument("--out-csv", type=Path)
    output.add_argument("--out-report", type=Path, help="JSON-lines check report")

    runtime = common.add_argument_group("runtime")
    runtime.add_argument("--threads", type=int, help="worker thread cap")
    runtime.add_argument(
        "--log-level", default="WARNING", choices=["DEBUG", "INFO", "WARNING", "ERROR"]
    )

    denoise = BallMapperArgumentParser(add_help=False)
    threshold = denoise.add_mutually_exclusive_group()
    threshold.add_argument("--denoise-min", type=int)
    threshold.add_argument("--denoise-quantile", type=float)

    parser = BallMapperArgumentParser(prog="ballmapper", description=__doc__.strip().split("\n")[0])
    commands = parser.add_subparsers(dest="command", required=True)
    commands.add_parser("build", parents=[common, denoise], help="BM graph at one epsilon")
    multiscale = commands.add_parser("multiscale", parents=[common], help="BM graphs over radii")
    multiscale.add_argument("--radii", type=_float_list, required=True)
    multiscale.add_argument("--interleaving-steps", type=int, default=0)
    dimension = commands.add_parser("dimension", parents=[common], help="degree sweeps")
    dimension.add_argument("--radii", type=_float_list, required=True)
    dimension.add_argument("--dims", type=_int_list, default=())
    dimension.add_argument("--reps", type=int, default=1)
    commands.add_parser("denoise", parents=[common, denoise], help="drop low-density vertices")
    return parser


# ---------------------------------------------------------------------------
# Shared steps
# ---------------------------------------------------------------------------


def indexed_path(path: Path, tag: str) -> Path:
    """graph.json + "0" -> graph.0.json"""
    return path.with_name(f"{path.stem}.{tag}{path.suffix}")


def load_input(config: RunConfig) -> tuple[PointCloud, MetricSpec]:
    if config.input_path is not None:
        cloud = read_points_csv(
            config.input_path, config.delimiter, config.header, config.attribute_columns
        )
        return cloud, MetricSpec(config.metric)
    if config.distance_matrix is not None:
        metric, cloud = read_distance_matrix_csv(config.distance_matrix, config.delimiter)
        return cloud, metric
    return generate(config.generator()), MetricSpec(config.metric)


def select_cover(cloud: PointCloud, metric: MetricSpec, config: RunConfig) -> CoverVector:
    if config.centers_path is not None:
        centers = read_centers(config.centers_path)
        if config.epsilon is None:
            return cover_from_centers(cloud, metric, centers, config.threads)
        return recover_cover(cloud, metric, centers, config.epsilon, config.threads)
    return build_net(cloud, metric, config.net_params(config.epsilon), config.threads)


def color_graph(
    graph: BMGraph, cloud: PointCloud, config: RunConfig
) -> Optional[VertexColoring]:
    if config.color is None:
        return None
    return vertex_coloring(graph, cloud.attribute(config.color), config.color_agg, config.color)


def export_graph(
    graph: BMGraph,
    coloring: Optional[VertexColoring],
    metric: MetricSpec,
    config: RunConfig,
    tag: Optional[str] = None,
) -> None:
    def _target(path: Optional[Path]) -> Optional[Path]:
        if path is None:
            return None
        return path if tag is None else indexed_path(path, tag)

    if config.out_json is not None:
        write_graph_json(
            graph, _target(config.out_json), coloring, metric.kind, config.include_covered
        )
    if config.out_dot is not None:
        write_dot(graph, _target(config.out_dot), coloring, config.weighted_edges)
    if config.out_html is not None:
        write_html(graph, _target(config.out_html), coloring, metric.kind, config.weighted_edges)


def summary_line(graph: BMGraph) -> str:
    count, _ = connected_components(graph)
    return f"V={graph.n_vertices} E={graph.n_edges} CC={count} cycle_rank={cycle_rank(graph)}"


def density_threshold(graph: BMGraph, config: RunConfig) -> int:
    if config.denoise_min is not None:
        return config.denoise_min
    quantile = (
        DEFAULT_DENOISE_QUANTILE if config.denoise_quantile is None else config.denoise_quantile
    )
    return suggest_density_threshold(graph, quantile)


def check_nerve(cover: CoverVector, graph: BMGraph, config: RunConfig) -> str:
    """Build the nerve and confirm its 1-skeleton matches the graph."""
    nerve = build_nerve(cover, config.max_dim, config.cover_guard)
    vertex_of = cover.vertex_of
    skeleton = {
        tuple(sorted((vertex_of[a], vertex_of[b]))): weight
        for (a, b), weight in nerve.skeleton(1).items()
    }
    if skeleton != graph.edge_weights():
        raise InvariantViolation("nerve 1-skeleton differs from the BM graph")
    counts = nerve.count_by_dim()
    return "nerve " + " ".join(f"dim{d}={counts[d]}" for d in sorted(counts))


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------


def cmd_build(config: RunConfig) -> int:
    cloud, metric = load_input(config)
    cover = select_cover(cloud, metric, config)
    graph = build_bm_graph(cover)

    nerve_line = check_nerve(cover, graph, config) if config.max_dim is not None else None
    if config.denoise_min is not None or config.denoise_quantile is not None:
        graph = filter_low_density(graph, density_threshold(graph, config))

    export_graph(graph, color_graph(graph, cloud, config), metric, config)
    print(summary_line(graph))
    if nerve_line:
        print(nerve_line)
    return EXIT_OK


def cmd_multiscale(config: RunConfig) -> int:
    cloud, metric = load_input(config)
    centers = read_centers(config.centers_path) if config.centers_path is not None else None
    ms = multiscale_bm(
        cloud,
        metric,
        config.radii,
        net=config.net_params(config.radii[0]),
        centers=centers,
        workers=config.threads,
    )

    for i, graph in enumerate(ms.graphs):
        export_graph(graph, color_graph(graph, cloud, config), metric, config, tag=str(i))
        print(f"epsilon={graph.epsilon!r} {summary_line(graph)}")

    report = check_inclusions(ms)
    passed = report.passed
    print("inclusions: pass" if passed else f"inclusions: FAIL {report.first_violation}")
    if config.out_report is not None:
        append_report(config.out_report, report.to_record())

    if config.interleaving_steps > 0:
        interleaving = interleaving_h0_check(
            cloud, metric, ms.centers, ms.radii[0], config.interleaving_steps, config.threads
        )
        passed = passed and interleaving.passed
        print("interleaving: pass" if interleaving.passed else "interleaving: FAIL")
        if config.out_report is not None:
            append_report(config.out_report, interleaving.to_record())

    if not passed:
        raise InvariantViolation("multi-scale checks failed")
    return EXIT_OK


def cmd_dimension(config: RunConfig) -> int:
    if config.gen is None:
        raise ConfigError("dimension needs a generator input (--gen)")
    base = config.generator()
    if config.dims and "d" not in base.params:
        raise ConfigError(f"--dims needs a generator with a 'd' parameter, not '{base.kind}'")
    dims = config.dims or ((int(base.params["d"]),) if "d" in base.params else (None,))
    metric = MetricSpec(config.metric)
    box_side = float(base.params["side"]) if base.kind == "cube" else None
    net = config.net_params(config.radii[0])

    plateaus = []
    for d in dims:
        params = dict(base.params) if d is None else {**base.params, "d": d}
        spec = GeneratorSpec(base.kind, params, base.seed)

        def _sampler(seed: int, spec: GeneratorSpec = spec) -> PointCloud:
            return generate(spec.with_seed(seed))

        sweep = dimension_sweep(
            _sampler, metric, config.radii, config.reps, base.seed, net, box_side, config.threads
        )
        if config.out_csv is not None:
            tag = None if len(dims) == 1 else f"d{d}"
            target = config.out_csv if tag is None else indexed_path(config.out_csv, tag)
            write_sweep_csv(sweep, target)
        label = "" if d is None else f"d={d} "
        if len(config.radii) >= 3:
            plateau = plateau_degree(sweep)
            plateaus.append(plateau)
            print(f"{label}plateau={plateau!r}")
        else:
            print(f"{label}mean_degree={list(sweep.mean_degree)!r}")

    if len(plateaus) > 1:
        increasing = all(a < b for a, b in zip(plateaus, plateaus[1:]))
        print(f"plateau increasing with d: {'yes' if increasing else 'no'}")
    return EXIT_OK


def cmd_denoise(config: RunConfig) -> int:
    cloud, metric = load_input(config)
    graph = build_bm_graph(select_cover(cloud, metric, config))
    threshold = density_threshold(graph, config)
    filtered = filter_low_density(graph, threshold)

    export_graph(filtered, color_graph(filtered, cloud, config), metric, config)
    print(f"threshold={threshold} removed {graph.n_vertices - filtered.n_vertices}")
    print(summary_line(filtered))
    return EXIT_OK


COMMAND_HANDLERS = {
    "build": cmd_build,
    "multiscale": cmd_multiscale,
    "dimension": cmd_dimension,
    "denoise": cmd_denoise,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    ns = parser.parse_args(argv)
    logging.basicConfig(
        level=getattr(logging, ns.log_level),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )

    try:
        config = RunConfig.from_namespace(ns)
        return COMMAND_HANDLERS[config.command](config)
    except BallMapperError as exc:
        logger.debug("Command %s failed", ns.command, exc_info=True)
        print(f"ballmapper: error: {exc}", file=sys.stderr)
        return exc.exit_code
