"""
Readers for point-cloud CSVs, precomputed distance matrices and center-index lists.

Cells are read as text first and converted column by column, so a bad cell can be reported
with its 1-based (row, column) position in the file.
"""

import logging
from collections.abc import Sequence
from pathlib import Path
from typing import Union

import numpy as np
import pandas as pd

from ballmapper.exceptions import DataError, FormatError
from ballmapper.metric import MetricSpec, PointCloud

logger = logging.getLogger(__name__)


def _read_table(path: Union[str, Path], delimiter: str, has_header: bool) -> pd.DataFrame:
    try:
        frame = pd.read_csv(
            path,
            sep=delimiter,
            header=0 if has_header else None,
            dtype=str,
            keep_default_na=False,
            skip_blank_lines=True,
        )
    except pd.errors.EmptyDataError as exc:
        raise FormatError(f"{path} is empty") from exc
    except pd.errors.ParserError as exc:
        raise FormatError(f"{path} has ragged rows: {exc}") from exc
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}") from exc

    if frame.empty:
        raise FormatError(f"{path} has no data rows")
    # Short rows are padded with NaN; real cells are never NaN because dtype=str
    short = np.flatnonzero(frame.isna().any(axis=1).to_numpy())
    if len(short):
        row = int(short[0]) + 1 + int(has_header)
        width = int(frame.iloc[short[0]].notna().sum())
        raise FormatError(
            f"ragged row: {width} cells where {frame.shape[1]} were expected",
            row=row,
            column=width + 1,
        )
    return frame


def _to_numbers(frame: pd.DataFrame, columns: Sequence[int], row_offset: int) -> np.ndarray:
    """Convert the given column positions to float64, naming the first bad cell."""
    values = np.empty((len(frame), len(columns)), dtype=np.float64)
    for out, col in enumerate(columns):
        converted = pd.to_numeric(frame.iloc[:, col].str.strip(), errors="coerce").to_numpy(
            dtype=np.float64
        )
        values[:, out] = converted

    bad = np.argwhere(~np.isfinite(values))
    if len(bad):
        # argwhere is row-major, so this is the first bad cell in reading order
        row, out = bad[0]
        col = columns[out]
        cell = frame.iat[int(row), col]
        raise FormatError(
            f"non-numeric cell {cell!r}", row=int(row) + 1 + row_offset, column=col + 1
        )
    return values


def _resolve_columns(
    frame: pd.DataFrame, names: Sequence[Union[str, int]], has_header: bool
) -> list[int]:
    """Map attribute column names (header) or 1-based positions to 0-based positions."""
    header = [str(c) for c in frame.columns]
    positions = []
    for name in names:
        if has_header and str(name) in header:
            positions.append(header.index(str(name)))
            continue
        try:
            position = int(name) - 1
        except (TypeError, ValueError):
            raise DataError(f"attribute column {name!r} not found in the header") from None
        if not 0 <= position < frame.shape[1]:
            raise DataError(f"attribute column {name!r} is out of range")
        positions.append(position)
    return positions


def read_points_csv(
    path: Union[str, Path],
    delimiter: str = ",",
    has_header: bool = False,
    attribute_columns: Sequence[Union[str, int]] = (),
) -> PointCloud:
    """Read a rectangular numeric table as a point cloud.

    Args:
        path: CSV file.
        delimiter: Field separator.
        has_header: Whether the first line names the columns.
        attribute_columns: Columns to keep out of the coordinates, by header name or 1-based
            position. They become attributes named after the header (or ``col<k>``).

    Returns:
        PointCloud: Coordinates are the remaining columns in file order; row index = point id.

    Raises:
        FormatError: Empty file, ragged row or non-numeric cell (with its file row and column).
    """
    frame = _read_table(path, delimiter, has_header)
    attr_positions = _resolve_columns(frame, attribute_columns, has_header)
    coord_positions = [c for c in range(frame.shape[1]) if c not in attr_positions]
    if not coord_positions:
        raise FormatError(f"{path} has no coordinate columns left")

    row_offset = int(has_header)
    points = _to_numbers(frame, coord_positions, row_offset)
    attributes = {}
    if attr_positions:
        values = _to_numbers(frame, attr_positions, row_offset)
        for out, col in enumerate(attr_positions):
            name = str(frame.columns[col]) if has_header else f"col{col + 1}"
            attributes[name] = values[:, out]

    logger.info("Read %d points in %d dimensions from %s", *points.shape, path)
    return PointCloud.from_array(points, attributes=attributes)


def read_distance_matrix_csv(
    path: Union[str, Path], delimiter: str = ","
) -> tuple[MetricSpec, PointCloud]:
    """Read a square distance matrix; the matching cloud carries ids only.

    Raises:
        FormatError: Unreadable or non-numeric cells.
        MetricError: Non-square, asymmetric, negative or nonzero-diagonal matrix.
    """
    frame = _read_table(path, delimiter, has_header=False)
    matrix = _to_numbers(frame, list(range(frame.shape[1])), row_offset=0)
    metric = MetricSpec.precomputed(matrix)
    logger.info("Read %dx%d distance matrix from %s", *matrix.shape, path)
    return metric, PointCloud.ids_only(matrix.shape[0])


def read_centers(path: Union[str, Path]) -> tuple[int, ...]:
    """Read center point indices, one integer per line; blank lines are skipped."""
    try:
        lines = Path(path).read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}") from exc

    centers = []
    for number, line in enumerate(lines, start=1):
        text = line.strip()
        if not text:
            continue
        try:
            centers.append(int(text))
        except ValueError:
            raise FormatError(
                f"center index {text!r} is not an integer", row=number, column=1
            ) from None
    if not centers:
        raise FormatError(f"{path} lists no centers")
    return tuple(centers)
