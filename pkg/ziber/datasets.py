"""CSV ingestion into Dataset objects."""
import logging
from dataclasses import dataclass

import numpy as np
import pandas as pd

from .exceptions import DataError
from .model import Dataset

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class CsvSchema:
    y_col: str
    x_cols: tuple = ()
    z_cols: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, 'x_cols', tuple(self.x_cols))
        object.__setattr__(self, 'z_cols', tuple(self.z_cols))
        names = self.columns
        duplicates = sorted({name for name in names if names.count(name) > 1})
        if duplicates:
            raise DataError(f'column names must be distinct, repeated: {", ".join(duplicates)}')

    @property
    def columns(self):
        return (self.y_col,) + self.x_cols + self.z_cols


def _read_frame(path):
    # Strings first so unparsable cells can be reported by row.
    try:
        return pd.read_csv(path, dtype=str, keep_default_na=False, skipinitialspace=True)
    except pd.errors.EmptyDataError:
        raise DataError(f'{path}: file is empty') from None
    except pd.errors.ParserError as exc:
        raise DataError(f'{path}: {exc}') from None


def _numeric_column(frame, column, path):
    values = pd.to_numeric(frame[column].str.strip(), errors='coerce').to_numpy(dtype=float)
    bad = np.flatnonzero(~np.isfinite(values))
    if bad.size:
        row = int(bad[0])
        raise DataError(
            f'{path}: column {column!r} row {row + 1}: {frame[column].iloc[row]!r} is not a finite number'
        )
    return values


def _require_columns(frame, columns, path):
    missing = [column for column in columns if column not in frame.columns]
    if missing:
        raise DataError(f'{path}: missing column(s) {", ".join(missing)}')


def read_dataset(path, schema, dichotomize=False):
    """
    Load the schema's columns. Rows are numbered from 1 after the header.

    With `dichotomize` the response becomes 1{y > 0}; otherwise it must be 0 or 1.
    """
    frame = _read_frame(path)
    _require_columns(frame, schema.columns, path)
    if frame.empty:
        raise DataError(f'{path}: no data rows')

    y = _numeric_column(frame, schema.y_col, path)
    if dichotomize:
        y = (y > 0).astype(float)
    else:
        bad = np.flatnonzero((y != 0.0) & (y != 1.0))
        if bad.size:
            row = int(bad[0])
            raise DataError(
                f'{path}: column {schema.y_col!r} row {row + 1}: response {frame[schema.y_col].iloc[row]!r}'
                ' is not 0 or 1'
            )

    x_raw = np.column_stack([_numeric_column(frame, c, path) for c in schema.x_cols]) \
        if schema.x_cols else None
    z_raw = np.column_stack([_numeric_column(frame, c, path) for c in schema.z_cols]) \
        if schema.z_cols else None
    logger.info('read %d rows from %s', len(frame), path)
    return Dataset(y=y, x_raw=x_raw, z_raw=z_raw, x_names=schema.x_cols, z_names=schema.z_cols)


def count_frequencies(path, column):
    """Value -> frequency for an integer column, ascending, plus the zero fraction."""
    frame = _read_frame(path)
    _require_columns(frame, [column], path)
    if frame.empty:
        raise DataError(f'{path}: no data rows')
    values = _numeric_column(frame, column, path)
    bad = np.flatnonzero(values != np.floor(values))
    if bad.size:
        row = int(bad[0])
        raise DataError(f'{path}: column {column!r} row {row + 1}: {frame[column].iloc[row]!r} is not an integer')

    counts = pd.Series(values.astype(np.int64)).value_counts().sort_index()
    table = pd.DataFrame({'value': counts.index.to_numpy(), 'frequency': counts.to_numpy()})
    zero_fraction = float(np.mean(values == 0.0))
    return table, zero_fraction
