"""
Seeded synthetic point clouds and bundled real data for the Ball Mapper experiments.

Every generator draws from ``numpy.random.default_rng(seed)`` (PCG64), so one seed always
yields the same cloud on every platform.
"""

import logging
from collections.abc import Mapping
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from types import MappingProxyType
from typing import Optional, Union

import numpy as np
import pandas as pd

from ballmapper.exceptions import ConfigError, DataError, FormatError
from ballmapper.metric import PointCloud

logger = logging.getLogger(__name__)

IRIS_CLASSES = ("setosa", "versicolor", "virginica")
IRIS_FEATURES = ("sepal_length", "sepal_width", "petal_length", "petal_width")

# Y-junction arms, in degrees from the x axis
Y_ARM_ANGLES = (90.0, 210.0, 330.0)

# Defaults per generator kind; GeneratorSpec.parse accepts exactly these keys (plus seed)
GENERATOR_DEFAULTS: dict[str, dict[str, Union[int, float]]] = {
    "cube": {"n": 1000, "d": 2, "side": 10.0},
    "torus": {"n": 1300, "R": 2.0, "r": 1.0},
    "circle": {"n": 500, "radius": 1.0, "dim": 2},
    "y_junction": {"n": 600, "arm": 1.0, "jitter": 0.02},
    "window": {"n": 2000, "outer": 10.0, "inner": 5.0},
    "x_noise": {"n": 1000, "noise": 1.0, "box": 5.0, "jitter": 0.05},
    "iris": {},
}


@dataclass(frozen=True)
class GeneratorSpec:
    """A named generator plus its parameters, e.g. ``circle:n=500,dim=3,seed=7``."""

    kind: str
    params: Mapping[str, Union[int, float]] = field(default_factory=dict)
    seed: int = 0

    def __post_init__(self):
        if self.kind not in GENERATOR_DEFAULTS:
            raise ConfigError(
                f"unknown generator '{self.kind}' (expected one of {sorted(GENERATOR_DEFAULTS)})"
            )
        allowed = GENERATOR_DEFAULTS[self.kind]
        unknown = sorted(set(self.params) - set(allowed))
        if unknown:
            raise ConfigError(f"generator '{self.kind}' does not take {', '.join(unknown)}")
        merged = {**allowed, **self.params}
        object.__setattr__(self, "params", MappingProxyType(merged))

    @classmethod
    def parse(cls, text: str) -> "GeneratorSpec":
        kind, _, rest = text.strip().partition(":")
        params: dict[str, Union[int, float]] = {}
        seed = 0
        for item in filter(None, (part.strip() for part in rest.split(","))):
            key, sep, raw = item.partition("=")
            if not sep or not key:
                raise ConfigError(f"generator parameter '{item}' is not of the form key=value")
            try:
                value: Union[int, float] = int(raw)
            except ValueError:
                try:
                    value = float(raw)
                except ValueError:
                    raise ConfigError(
                        f"generator parameter {key}={raw!r} is not a number"
                    ) from None
            if key == "seed":
                if not isinstance(value, int):
                    raise ConfigError(f"seed must be an integer, got {raw!r}")
                seed = value
            else:
                params[key] = value
        return cls(kind=kind.strip(), params=params, seed=seed)

    def with_seed(self, seed: int) -> "GeneratorSpec":
        return GeneratorSpec(kind=self.kind, params=dict(self.params), seed=seed)


def _check_count(n: int) -> int:
    if int(n) != n or n < 1:
        raise ConfigError(f"sample size must be a positive integer, got {n!r}")
    return int(n)


def _check_positive(name: str, value: float) -> float:
    if not np.isfinite(value) or value <= 0:
        raise ConfigError(f"{name} must be positive, got {value!r}")
    return float(value)


def sample_cube(n: int, d: int, side: float = 10.0, seed: int = 0) -> PointCloud:
    """Uniform iid points in [0, side]^d."""
    n = _check_count(n)
    if int(d) != d or d < 1:
        raise ConfigError(f"dimension must be a positive integer, got {d!r}")
    side = _check_positive("side", side)
    rng = np.random.default_rng(seed)
    return PointCloud.from_array(rng.uniform(0.0, side, size=(n, int(d))))


def sample_torus(n: int, R: float = 2.0, r: float = 1.0, seed: int = 0) -> PointCloud:
    """Torus in R^3 with both angles uniform in [0, 2 pi)."""
    n = _check_count(n)
    r = _check_positive("r", r)
    if not R > r:
        raise ConfigError(f"torus needs R > r, got R={R!r}, r={r!r}")
    rng = np.random.default_rng(seed)
    u = rng.uniform(0.0, 2 * np.pi, size=n)
    v = rng.uniform(0.0, 2 * np.pi, size=n)
    ring = R + r * np.cos(v)
    points = np.column_stack([ring * np.cos(u), ring * np.sin(u), r * np.sin(v)])
    return PointCloud.from_array(points)


def sample_circle(n: int, radius: float = 1.0, ambient_dim: int = 2, seed: int = 0) -> PointCloud:
    """Circle in the first two coordinates, zero-padded to ``ambient_dim``."""
    n = _check_count(n)
    radius = _check_positive("radius", radius)
    if int(ambient_dim) != ambient_dim or ambient_dim < 2:
        raise ConfigError(f"ambient_dim must be an integer >= 2, got {ambient_dim!r}")
    rng = np.random.default_rng(seed)
    angle = rng.uniform(0.0, 2 * np.pi, size=n)
    points = np.zeros((n, int(ambient_dim)))
    points[:, 0] = radius * np.cos(angle)
    points[:, 1] = radius * np.sin(angle)
    return PointCloud.from_array(points)


def sample_y_junction(
    n: int, arm_length: float = 1.0, jitter: float = 0.02, seed: int = 0
) -> PointCloud:
    """Three segments meeting at the origin at 120 degrees, with Gaussian jitter.

    Arm membership is stored in the ``arm`` attribute (0, 1, 2).
    """
    n = _check_count(n)
    arm_length = _check_positive("arm_length", arm_length)
    if jitter < 0:
        raise ConfigError(f"jitter must be nonnegative, got {jitter!r}")
    rng = np.random.default_rng(seed)
    arm = rng.integers(0, 3, size=n)
    t = rng.uniform(0.0, arm_length, size=n)
    theta = np.deg2rad(np.array(Y_ARM_ANGLES))[arm]
    points = np.column_stack([t * np.cos(theta), t * np.sin(theta)])
    points += rng.normal(0.0, jitter, size=points.shape)
    return PointCloud.from_array(points, attributes={"arm": arm})


def sample_window(
    n: int, outer: float = 10.0, inner: float = 5.0, seed: int = 0
) -> PointCloud:
    """Uniform points on the square annulus [-outer, outer]^2 minus (-inner, inner)^2."""
    n = _check_count(n)
    outer = _check_positive("outer", outer)
    inner = _check_positive("inner", inner)
    if not inner < outer:
        raise ConfigError(f"window needs inner < outer, got inner={inner!r}, outer={outer!r}")
    rng = np.random.default_rng(seed)
    accepted: list[np.ndarray] = []
    total = 0
    while total < n:
        batch = rng.uniform(-outer, outer, size=(2 * n, 2))
        keep = batch[np.max(np.abs(batch), axis=1) >= inner]
        accepted.append(keep)
        total += len(keep)
    return PointCloud.from_array(np.concatenate(accepted)[:n])


def x_shape_with_noise(
    n_signal: int,
    noise_pct: float = 1.0,
    box: float = 5.0,
    jitter: float = 0.05,
    seed: int = 0,
) -> PointCloud:
    """Two crossing diagonals of [-box, box]^2 plus uniform noise over the same box.

    The noise count is ``round(n_signal * noise_pct)``. Signal points come first; the 0/1
    attributes ``signal`` and ``noise`` label every point.
    """
    n_signal = _check_count(n_signal)
    box = _check_positive("box", box)
    if not np.isfinite(noise_pct) or noise_pct < 0:
        raise ConfigError(f"noise_pct must be nonnegative, got {noise_pct!r}")
    if jitter < 0:
        raise ConfigError(f"jitter must be nonnegative, got {jitter!r}")
    n_noise = int(round(n_signal * noise_pct))

    rng = np.random.default_rng(seed)
    t = rng.uniform(-box, box, size=n_signal)
    slope = np.where(rng.integers(0, 2, size=n_signal) == 0, 1.0, -1.0)
    signal = np.column_stack([t, slope * t]) + rng.normal(0.0, jitter, size=(n_signal, 2))
    noise = rng.uniform(-box, box, size=(n_noise, 2))

    is_signal = np.concatenate([np.ones(n_signal), np.zeros(n_noise)])
    logger.debug("X shape: %d signal points, %d noise points", n_signal, n_noise)
    return PointCloud.from_array(
        np.vstack([signal, noise]),
        attributes={"signal": is_signal, "noise": 1.0 - is_signal},
    )


def _read_iris(csv_path: Path) -> PointCloud:
    try:
        table = pd.read_csv(csv_path, header=None, skip_blank_lines=True)
    except (OSError, pd.errors.ParserError, pd.errors.EmptyDataError) as exc:
        raise FormatError(f"cannot read iris file {csv_path}: {exc}") from exc

    if table.shape[1] != 5:
        raise FormatError(f"iris file needs 5 columns, found {table.shape[1]}")
    features = table.iloc[:, :4].apply(pd.to_numeric, errors="coerce")
    bad = np.argwhere(features.isna().to_numpy())
    if len(bad):
        row, col = bad[0]
        raise FormatError("non-numeric iris feature", row=int(row) + 1, column=int(col) + 1)

    names = table.iloc[:, 4].astype(str).str.strip().str.removeprefix("Iris-")
    unknown = sorted(set(names) - set(IRIS_CLASSES))
    if unknown:
        raise FormatError(f"unknown iris class {unknown[0]!r}")

    species = names.map({name: i for i, name in enumerate(IRIS_CLASSES)}).to_numpy()
    attributes = {name: (species == i).astype(np.float64) for i, name in enumerate(IRIS_CLASSES)}
    attributes["species"] = species
    logger.info("Loaded iris: %d rows", len(table))
    return PointCloud.from_array(features.to_numpy(dtype=np.float64), attributes=attributes)


def load_iris(path: Optional[Union[str, Path]] = None) -> PointCloud:
    """Load the 150-row Iris table (4 features + class name, no header).

    Without ``path`` the bundled copy is used. Classes become the 0/1 attributes ``setosa``,
    ``versicolor`` and ``virginica`` plus an integer ``species`` column (0, 1, 2).

    Raises:
        FormatError: If the file is not 5 columns of 4 numbers and a known class name.
    """
    if path is not None:
        return _read_iris(Path(path))
    with resources.as_file(resources.files("ballmapper") / "data" / "iris.csv") as bundled:
        return _read_iris(bundled)


def load_image_directory(path: Union[str, Path], side: int = 128) -> PointCloud:
    """One point per raw 8-bit grayscale raster of ``side`` x ``side`` bytes, flattened row-major.

    Files are read in name order.
    """
    directory = Path(path)
    if not directory.is_dir():
        raise DataError(f"image directory {directory} does not exist")
    files = sorted(p for p in directory.iterdir() if p.is_file())
    if not files:
        raise DataError(f"image directory {directory} is empty")

    expected = side * side
    rows = []
    for i, image in enumerate(files):
        pixels = np.fromfile(image, dtype=np.uint8)
        if pixels.size != expected:
            raise FormatError(
                f"image {image.name} has {pixels.size} bytes, expected {expected}",
                row=i + 1,
                column=1,
            )
        rows.append(pixels.astype(np.float64))
    logger.info("Loaded %d images of %dx%d pixels from %s", len(rows), side, side, directory)
    return PointCloud.from_array(np.vstack(rows))


def generate(spec: GeneratorSpec) -> PointCloud:
    """Build the cloud a GeneratorSpec describes."""
    p = spec.params
    if spec.kind == "cube":
        return sample_cube(p["n"], p["d"], p["side"], spec.seed)
    if spec.kind == "torus":
        return sample_torus(p["n"], p["R"], p["r"], spec.seed)
    if spec.kind == "circle":
        return sample_circle(p["n"], p["radius"], p["dim"], spec.seed)
    if spec.kind == "y_junction":
        return sample_y_junction(p["n"], p["arm"], p["jitter"], spec.seed)
    if spec.kind == "window":
        return sample_window(p["n"], p["outer"], p["inner"], spec.seed)
    if spec.kind == "x_noise":
        return x_shape_with_noise(p["n"], p["noise"], p["box"], p["jitter"], spec.seed)
    return load_iris()
