"""
Writers for Ball Mapper graphs and sweeps, plus the readers that check them.

JSON documents are written with sorted keys and Python's shortest round-trip float repr, so
equal graphs always produce identical bytes.
"""

import json
import logging
import math
import re
from collections.abc import Mapping
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Optional, Union

import pandas as pd

from ballmapper.analyze import DegreeSweep
from ballmapper.config import DOT_COLOR_RAMP, DOT_DEFAULT_FILL, DOT_WIDTH_SCALE, FORMAT_VERSION
from ballmapper.exceptions import DataError, FormatError
from ballmapper.nerve import BMGraph, Edge, Vertex, VertexColoring

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]


# ---------------------------------------------------------------------------
# Graph document (JSON)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class VertexRecord:
    id: int
    center: int
    size: int
    covered: Optional[tuple[int, ...]] = None
    color: Optional[float] = None


@dataclass(frozen=True)
class GraphDocument:
    """Serializable form of a BM graph with an optional coloring."""

    epsilon: float
    metric: str
    n_points: int
    vertices: tuple[VertexRecord, ...]
    edges: tuple[Edge, ...]
    partial: bool = False
    coloring: Optional[tuple[str, str]] = None  # (attribute, aggregator)
    format_version: str = FORMAT_VERSION

    def to_dict(self) -> dict[str, Any]:
        vertices = []
        for v in self.vertices:
            record: dict[str, Any] = {"id": v.id, "center": v.center, "size": v.size}
            if v.covered is not None:
                record["covered"] = list(v.covered)
            if v.color is not None:
                record["color"] = v.color
            vertices.append(record)
        return {
            "format_version": self.format_version,
            "epsilon": self.epsilon,
            "metric": self.metric,
            "n_points": self.n_points,
            "partial": self.partial,
            "coloring": (
                None
                if self.coloring is None
                else {"attribute": self.coloring[0], "aggregator": self.coloring[1]}
            ),
            "vertices": vertices,
            "edges": [{"u": e.u, "v": e.v, "weight": e.weight} for e in self.edges],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2) + "\n"

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "GraphDocument":
        version = str(data.get("format_version", ""))
        if version.split(".")[0] != FORMAT_VERSION.split(".")[0]:
            raise FormatError(f"unsupported graph format version {version!r}")
        try:
            coloring = data.get("coloring")
            vertices = tuple(
                VertexRecord(
                    id=int(v["id"]),
                    center=int(v["center"]),
                    size=int(v["size"]),
                    covered=tuple(int(x) for x in v["covered"]) if "covered" in v else None,
                    color=float(v["color"]) if "color" in v else None,
                )
                for v in data["vertices"]
            )
            edges = tuple(
                Edge(int(e["u"]), int(e["v"]), int(e["weight"])) for e in data["edges"]
            )
            return cls(
                epsilon=float(data["epsilon"]),
                metric=str(data["metric"]),
                n_points=int(data["n_points"]),
                vertices=vertices,
                edges=edges,
                partial=bool(data.get("partial", False)),
                coloring=(
                    None
                    if coloring is None
                    else (str(coloring["attribute"]), str(coloring["aggregator"]))
                ),
                format_version=version,
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise FormatError(f"malformed graph document: {exc!r}") from exc

    @classmethod
    def from_json(cls, text: str) -> "GraphDocument":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise FormatError(
                f"invalid JSON: {exc.msg}", row=exc.lineno, column=exc.colno
            ) from exc
        if not isinstance(data, dict):
            raise FormatError("graph document must be a JSON object")
        return cls.from_dict(data)

    def to_graph(self) -> BMGraph:
        """Rebuild the BMGraph; needs a document written with covered lists."""
        if any(v.covered is None for v in self.vertices):
            raise FormatError(
                "graph document has no covered lists; write it with include_covered"
            )
        return BMGraph(
            epsilon=self.epsilon,
            vertices=tuple(Vertex(v.id, v.center, v.covered) for v in self.vertices),
            edges=self.edges,
            n_points=self.n_points,
            partial=self.partial,
        )


def graph_document(
    graph: BMGraph,
    coloring: Optional[VertexColoring] = None,
    metric_name: str = "euclidean",
    include_covered: bool = False,
) -> GraphDocument:
    if coloring is not None and len(coloring.values) != graph.n_vertices:
        raise DataError(
            f"coloring has {len(coloring.values)} values for {graph.n_vertices} vertices"
        )
    vertices = tuple(
        VertexRecord(
            id=v.id,
            center=v.center,
            size=v.size,
            covered=v.covered if include_covered else None,
            color=None if coloring is None else coloring.values[v.id],
        )
        for v in graph.vertices
    )
    return GraphDocument(
        epsilon=graph.epsilon,
        metric=metric_name,
        n_points=graph.n_points,
        vertices=vertices,
        edges=graph.edges,
        partial=graph.partial,
        coloring=None if coloring is None else (coloring.attribute, coloring.aggregator),
    )


def _write_text(path: PathLike, text: str) -> Path:
    target = Path(path)
    try:
        target.write_text(text, encoding="utf-8", newline="\n")
    except OSError as exc:
        raise DataError(f"cannot write {target}: {exc}") from exc
    logger.info("Wrote %s", target)
    return target


def write_graph_json(
    graph: BMGraph,
    path: PathLike,
    coloring: Optional[VertexColoring] = None,
    metric_name: str = "euclidean",
    include_covered: bool = False,
) -> Path:
    document = graph_document(graph, coloring, metric_name, include_covered)
    return _write_text(path, document.to_json())


def read_graph_json(path: PathLike) -> GraphDocument:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}") from exc
    return GraphDocument.from_json(text)


# ---------------------------------------------------------------------------
# DOT
# ---------------------------------------------------------------------------


def ramp_color(value: float, lo: float, hi: float) -> str:
    """Color of ``value`` on the sequential ramp spanning [lo, hi]."""
    if hi <= lo:
        return DOT_COLOR_RAMP[0]
    stops = len(DOT_COLOR_RAMP)
    position = int((value - lo) / (hi - lo) * stops)
    return DOT_COLOR_RAMP[min(max(position, 0), stops - 1)]


def _fill_colors(graph: BMGraph, coloring: Optional[VertexColoring]) -> list[str]:
    if coloring is None or not coloring.values:
        return [DOT_DEFAULT_FILL] * graph.n_vertices
    lo, hi = min(coloring.values), max(coloring.values)
    return [ramp_color(value, lo, hi) for value in coloring.values]


def _quote(text: str) -> str:
    return '"' + text.replace("\\", "\\\\").replace('"', '\\"') + '"'


def dot_source(
    graph: BMGraph, coloring: Optional[VertexColoring] = None, weighted: bool = False
) -> str:
    """Undirected DOT text: node label "center:size", width = 0.2 * sqrt(size) inches."""
    fills = _fill_colors(graph, coloring)
    lines = [
        "graph ballmapper {",
        "  node [shape=circle, style=filled, fixedsize=true];",
    ]
    for v in graph.vertices:
        width = DOT_WIDTH_SCALE * math.sqrt(v.size)
        lines.append(
            f"  {v.id} [label={_quote(f'{v.center}:{v.size}')}, "
            f"width={width!r}, fillcolor={_quote(fills[v.id])}];"
        )
    for e in graph.edges:
        if weighted:
            lines.append(f"  {e.u} -- {e.v} [weight={e.weight}, penwidth={e.weight}];")
        else:
            lines.append(f"  {e.u} -- {e.v};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def write_dot(
    graph: BMGraph,
    path: PathLike,
    coloring: Optional[VertexColoring] = None,
    weighted: bool = False,
) -> Path:
    return _write_text(path, dot_source(graph, coloring, weighted))


@dataclass
class DotGraph:
    name: Optional[str]
    directed: bool
    nodes: dict[str, dict[str, str]] = field(default_factory=dict)
    edges: list[tuple[str, str, dict[str, str]]] = field(default_factory=list)
    attributes: dict[str, str] = field(default_factory=dict)


_DOT_TOKEN = re.compile(
    r"""
    (?P<space>\s+|//[^\n]*|\#[^\n]*|/\*.*?\*/)
    |(?P<string>"(?:[^"\\]|\\.)*")
    |(?P<edgeop>--|->)
    |(?P<number>-?(?:\.\d+|\d+(?:\.\d*)?))
    |(?P<name>[A-Za-z_][A-Za-z0-9_]*)
    |(?P<punct>[{}\[\];,=:])
    """,
    re.VERBOSE | re.DOTALL,
)
_DOT_KEYWORDS = {"strict", "graph", "digraph", "node", "edge", "subgraph"}


def _tokenize_dot(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    while pos < len(text):
        match = _DOT_TOKEN.match(text, pos)
        if match is None:
            line = text.count("\n", 0, pos) + 1
            raise FormatError(f"unexpected character {text[pos]!r} in DOT", row=line, column=1)
        kind = match.lastgroup
        if kind != "space":
            value = match.group()
            if kind == "string":
                value = value[1:-1].replace('\\"', '"').replace("\\\\", "\\")
                kind = "id"
            elif kind in ("number", "name"):
                kind = "keyword" if value.lower() in _DOT_KEYWORDS else "id"
                value = value.lower() if kind == "keyword" else value
            tokens.append((kind, value, text.count("\n", 0, pos) + 1))
        pos = match.end()
    return tokens


class _DotParser:
    def __init__(self, text: str):
        self.tokens = _tokenize_dot(text)
        self.pos = 0

    def _peek(self) -> tuple[str, str, int]:
        if self.pos < len(self.tokens):
            return self.tokens[self.pos]
        return ("eof", "", self.tokens[-1][2] if self.tokens else 1)

    def _take(self, kind: str, value: Optional[str] = None) -> str:
        tok_kind, tok_value, line = self._peek()
        if tok_kind != kind or (value is not None and tok_value != value):
            expected = value or kind
            raise FormatError(
                f"DOT syntax: expected {expected!r}, got {tok_value!r}", row=line, column=1
            )
        self.pos += 1
        return tok_value

    def _accept(self, kind: str, value: Optional[str] = None) -> bool:
        tok_kind, tok_value, _ = self._peek()
        if tok_kind == kind and (value is None or tok_value == value):
            self.pos += 1
            return True
        return False

    def _attr_lists(self) -> dict[str, str]:
        attrs: dict[str, str] = {}
        while self._accept("punct", "["):
            while not self._accept("punct", "]"):
                key = self._take("id")
                self._take("punct", "=")
                attrs[key] = self._take("id")
                if not self._accept("punct", ","):
                    self._accept("punct", ";")
        return attrs

    def _node_id(self) -> str:
        node = self._take("id")
        if self._accept("punct", ":"):
            self._take("id")  # port, ignored
        return node

    def parse(self) -> DotGraph:
        self._accept("keyword", "strict")
        if self._accept("keyword", "digraph"):
            directed = True
        else:
            self._take("keyword", "graph")
            directed = False
        name = self._take("id") if self._peek()[0] == "id" else None
        graph = DotGraph(name=name, directed=directed)
        edge_op = "->" if directed else "--"

        self._take("punct", "{")
        while not self._accept("punct", "}"):
            kind, value, line = self._peek()
            if kind == "keyword" and value in ("node", "edge", "graph"):
                self.pos += 1
                self._attr_lists()
            elif kind == "id":
                first = self._node_id()
                if self._accept("punct", "="):
                    graph.attributes[first] = self._take("id")
                else:
                    chain = [first]
                    while self._peek()[0] == "edgeop":
                        op = self._take("edgeop")
                        if op != edge_op:
                            kind_name = "digraph" if directed else "graph"
                            raise FormatError(
                                f"DOT syntax: {op!r} in a {kind_name}", row=line, column=1
                            )
                        chain.append(self._node_id())
                    attrs = self._attr_lists()
                    if len(chain) == 1:
                        graph.nodes.setdefault(first, {}).update(attrs)
                    else:
                        for node in chain:
                            graph.nodes.setdefault(node, {})
                        for u, v in zip(chain, chain[1:]):
                            graph.edges.append((u, v, dict(attrs)))
            else:
                raise FormatError(f"DOT syntax: unexpected {value!r}", row=line, column=1)
            self._accept("punct", ";")

        if self._peek()[0] != "eof":
            raise FormatError(
                "DOT syntax: content after the closing brace", row=self._peek()[2], column=1
            )
        return graph


def parse_dot(text: str) -> DotGraph:
    """Parse the subset of DOT these writers emit (plus comments, quoting and edge chains)."""
    return _DotParser(text).parse()


# ---------------------------------------------------------------------------
# Static HTML
# ---------------------------------------------------------------------------

_HTML_TEMPLATE = """<!DOCTYPE html>
<html lang="en">
<head>
<meta charset="utf-8">
<title>__TITLE__</title>
<style>
  body { margin: 0; font-family: sans-serif; background: #fafafa; }
  #info { position: absolute; top: 8px; left: 8px; font-size: 13px; color: #333; }
  canvas { display: block; }
</style>
</head>
<body>
<div id="info"></div>
<canvas id="view"></canvas>
<script type="application/json" id="bm-data">__DATA__</script>
<script>
(function () {
  var doc = JSON.parse(document.getElementById("bm-data").textContent);
  var ramp = __RAMP__;
  var fallback = "__FALLBACK__";
  var weighted = __WEIGHTED__;
  var canvas = document.getElementById("view");
  var ctx = canvas.getContext("2d");
  var width = canvas.width = window.innerWidth;
  var height = canvas.height = window.innerHeight;

  var colors = doc.vertices.map(function (v) { return v.color; });
  var lo = Math.min.apply(null, colors), hi = Math.max.apply(null, colors);
  function fill(v) {
    if (v.color === undefined) return fallback;
    if (!(hi > lo)) return ramp[0];
    var k = Math.floor((v.color - lo) / (hi - lo) * ramp.length);
    return ramp[Math.min(Math.max(k, 0), ramp.length - 1)];
  }

  var nodes = doc.vertices.map(function (v, i) {
    var angle = 2 * Math.PI * i / Math.max(1, doc.vertices.length);
    return {
      v: v,
      x: width / 2 + 0.3 * Math.min(width, height) * Math.cos(angle),
      y: height / 2 + 0.3 * Math.min(width, height) * Math.sin(angle),
      dx: 0, dy: 0,
      r: 3 + 2 * Math.sqrt(v.size)
    };
  });
  var edges = doc.edges;
  var maxWeight = Math.max.apply(null, [1].concat(edges.map(function (e) { return e.weight; })));

  function step() {
    var k = Math.sqrt(width * height / Math.max(1, nodes.length));
    nodes.forEach(function (a) { a.dx = 0; a.dy = 0; });
    for (var i = 0; i < nodes.length; i++) {
      for (var j = i + 1; j < nodes.length; j++) {
        var a = nodes[i], b = nodes[j];
        var x = a.x - b.x, y = a.y - b.y, d = Math.sqrt(x * x + y * y) + 0.01;
        var f = k * k / d / d;
        a.dx += x * f; a.dy += y * f; b.dx -= x * f; b.dy -= y * f;
      }
    }
    edges.forEach(function (e) {
      var a = nodes[e.u], b = nodes[e.v];
      var x = a.x - b.x, y = a.y - b.y, d = Math.sqrt(x * x + y * y) + 0.01;
      var f = d / k;
      a.dx -= x * f; a.dy -= y * f; b.dx += x * f; b.dy += y * f;
    });
    nodes.forEach(function (a) {
      a.dx += (width / 2 - a.x) * 0.01;
      a.dy += (height / 2 - a.y) * 0.01;
      var m = Math.sqrt(a.dx * a.dx + a.dy * a.dy) + 0.01, cap = Math.min(m, 10);
      a.x += a.dx / m * cap; a.y += a.dy / m * cap;
    });
  }

  function draw() {
    ctx.clearRect(0, 0, width, height);
    ctx.strokeStyle = "#888";
    edges.forEach(function (e) {
      ctx.lineWidth = weighted ? 1 + 4 * e.weight / maxWeight : 1;
      ctx.beginPath();
      ctx.moveTo(nodes[e.u].x, nodes[e.u].y);
      ctx.lineTo(nodes[e.v].x, nodes[e.v].y);
      ctx.stroke();
    });
    ctx.lineWidth = 1;
    nodes.forEach(function (n) {
      ctx.beginPath();
      ctx.arc(n.x, n.y, n.r, 0, 2 * Math.PI);
      ctx.fillStyle = fill(n.v);
      ctx.fill();
      ctx.strokeStyle = "#444";
      ctx.stroke();
    });
  }

  var ticks = 0;
  function frame() {
    step();
    draw();
    if (++ticks < 300) window.requestAnimationFrame(frame);
  }
  document.getElementById("info").textContent =
    "epsilon=" + doc.epsilon + "  V=" + doc.vertices.length + "  E=" + edges.length +
    (doc.coloring ? "  color=" + doc.coloring.aggregator + "(" + doc.coloring.attribute + ")" : "");
  frame();
})();
</script>
</body>
</html>
"""


def html_source(
    graph: BMGraph,
    coloring: Optional[VertexColoring] = None,
    metric_name: str = "euclidean",
    weighted: bool = False,
    title: Optional[str] = None,
) -> str:
    """Self-contained page: the graph document embedded as JSON plus a canvas force layout."""
    document = graph_document(graph, coloring, metric_name, include_covered=False)
    data = json.dumps(document.to_dict(), sort_keys=True).replace("</", "<\\/")
    title = title or f"Ball Mapper graph, epsilon={graph.epsilon!r}"
    escaped_title = title.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")
    return (
        _HTML_TEMPLATE.replace("__TITLE__", escaped_title)
        .replace("__RAMP__", json.dumps(list(DOT_COLOR_RAMP)))
        .replace("__FALLBACK__", DOT_DEFAULT_FILL)
        .replace("__WEIGHTED__", "true" if weighted else "false")
        .replace("__DATA__", data)
    )


def write_html(
    graph: BMGraph,
    path: PathLike,
    coloring: Optional[VertexColoring] = None,
    metric_name: str = "euclidean",
    weighted: bool = False,
) -> Path:
    return _write_text(path, html_source(graph, coloring, metric_name, weighted))


# ---------------------------------------------------------------------------
# Sweeps and reports
# ---------------------------------------------------------------------------


def sweep_frame(sweep: DegreeSweep) -> pd.DataFrame:
    """Columns: radius, mean_degree, rep_1..rep_k (k > 1), interior_mean_degree (if known)."""
    frame = pd.DataFrame({"radius": list(sweep.radii), "mean_degree": list(sweep.mean_degree)})
    if sweep.repetitions > 1:
        for k, row in enumerate(sweep.per_repetition, start=1):
            frame[f"rep_{k}"] = list(row)
    if sweep.interior_mean_degree is not None:
        frame["interior_mean_degree"] = list(sweep.interior_mean_degree)
    return frame


def write_sweep_csv(sweep: DegreeSweep, path: PathLike) -> Path:
    text = sweep_frame(sweep).to_csv(index=False, lineterminator="\n")
    return _write_text(path, text)


def append_report(path: PathLike, record: Mapping[str, Any]) -> Path:
    """Append one JSON object as a line."""
    target = Path(path)
    try:
        with target.open("a", encoding="utf-8", newline="\n") as handle:
            handle.write(json.dumps(record, sort_keys=True) + "\n")
    except OSError as exc:
        raise DataError(f"cannot write {target}: {exc}") from exc
    return target
