"""
Dataset acquisition and preprocessing: fetch, CSV loading, sampling, cleaning, encoding and scaling
"""
import hashlib
import json
import logging
import math
import os
import shutil
import tempfile
import zipfile
from collections import OrderedDict
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
import requests

from .exceptions import FetchError, FormatError, ParseError, ValidationError

logger = logging.getLogger(__name__)

DEFAULT_MEMBER = "bank-additional/bank-additional.csv"

# Sampling multiplies fraction by the row count; absorbs representation error such as 0.29 * 100.
_FLOOR_SLACK = 1e-9


class RawTable:
    """Ordered table of numeric and categorical text columns, before encoding"""

    def __init__(self, frame: pd.DataFrame):
        """
        Wrap a DataFrame whose columns are float64 (numeric) or object (text)

        Args:
            frame: Source data; the index is discarded
        """
        names = [str(c) for c in frame.columns]
        if len(set(names)) != len(names):
            raise ValidationError(f"Duplicate column names: {names}")
        self.frame = frame.reset_index(drop=True)
        self.frame.columns = names

    @property
    def column_names(self) -> List[str]:
        return list(self.frame.columns)

    @property
    def n_rows(self) -> int:
        return len(self.frame)

    @property
    def n_cols(self) -> int:
        return self.frame.shape[1]

    def is_numeric(self, name: str) -> bool:
        return pd.api.types.is_float_dtype(self.frame[name])

    def __repr__(self):
        return f"RawTable({self.n_rows} rows x {self.n_cols} columns)"


class FrameTable:
    """Named-column dense float64 table; every value is finite"""

    def __init__(self, column_names: Sequence[str], data: np.ndarray):
        """
        Initialize a table

        Args:
            column_names: Unique column names, in order
            data: Row-major matrix with one column per name
        """
        names = [str(n) for n in column_names]
        matrix = np.array(data, dtype=np.float64, order="C", copy=True)
        if matrix.ndim == 1 and matrix.size == 0:
            matrix = matrix.reshape(0, len(names))
        if matrix.ndim != 2 or matrix.shape[1] != len(names):
            raise ValidationError(f"Data shape {matrix.shape} does not match {len(names)} column names")
        if len(set(names)) != len(names):
            seen = set()
            duplicates = [n for n in names if n in seen or seen.add(n)]
            raise ValidationError(f"Duplicate column names: {', '.join(duplicates)}")
        if not np.isfinite(matrix).all():
            bad = [names[j] for j in np.where(~np.isfinite(matrix).all(axis=0))[0]]
            raise ValidationError(f"Non-finite values in columns: {', '.join(bad)}")
        self.column_names = names
        self.data = matrix
        self._index = {name: j for j, name in enumerate(names)}

    @property
    def n_rows(self) -> int:
        return self.data.shape[0]

    @property
    def n_cols(self) -> int:
        return self.data.shape[1]

    def __contains__(self, name: str) -> bool:
        return name in self._index

    def __repr__(self):
        return f"FrameTable({self.n_rows} rows x {self.n_cols} columns)"

    def __eq__(self, other):
        if not isinstance(other, FrameTable):
            return NotImplemented
        return self.column_names == other.column_names and np.array_equal(self.data, other.data)

    def index_of(self, name: str) -> int:
        """Position of a column, or ValidationError naming it"""
        try:
            return self._index[name]
        except KeyError:
            raise ValidationError(f"Column '{name}' not found")

    def column(self, name: str) -> np.ndarray:
        """Copy of one column"""
        return self.data[:, self.index_of(name)].copy()

    def select(self, names: Sequence[str]) -> "FrameTable":
        positions = [self.index_of(n) for n in names]
        return FrameTable(names, self.data[:, positions])

    def drop(self, names: Iterable[str]) -> "FrameTable":
        removed = set(names)
        for name in removed:
            self.index_of(name)
        keep = [n for n in self.column_names if n not in removed]
        return self.select(keep)

    def take(self, rows: Sequence[int]) -> "FrameTable":
        return FrameTable(self.column_names, self.data[np.asarray(rows, dtype=np.int64)])

    def with_column(self, name: str, values: np.ndarray) -> "FrameTable":
        """Copy with one existing column replaced"""
        data = self.data.copy()
        data[:, self.index_of(name)] = values
        return FrameTable(self.column_names, data)

    def hstack(self, other: "FrameTable") -> "FrameTable":
        """This table's columns followed by other's"""
        if other.n_rows != self.n_rows:
            raise ValidationError(f"Row count mismatch: {self.n_rows} vs {other.n_rows}")
        return FrameTable(self.column_names + other.column_names, np.hstack([self.data, other.data]))

    def fingerprint(self) -> str:
        """SHA-256 over column names and raw values"""
        digest = hashlib.sha256()
        digest.update(json.dumps(self.column_names).encode("utf-8"))
        digest.update(np.ascontiguousarray(self.data, dtype="<f8").tobytes())
        return digest.hexdigest()

    def to_dataframe(self) -> pd.DataFrame:
        """Export to a pandas DataFrame"""
        return pd.DataFrame(self.data, columns=self.column_names)

    @classmethod
    def from_dataframe(cls, frame: pd.DataFrame) -> "FrameTable":
        return cls([str(c) for c in frame.columns], frame.to_numpy(dtype=np.float64))

    def to_csv(self, path: Optional[str] = None) -> Optional[str]:
        """Export to CSV with '.' decimal point and round-trip precision"""
        return self.to_dataframe().to_csv(path, index=False, lineterminator="\n")


class ScalerParams:
    """Per-column mean and population standard deviation recorded by standardize"""

    def __init__(self, column_names: Sequence[str], mean: np.ndarray, stddev: np.ndarray, scale: np.ndarray):
        self.column_names = list(column_names)
        self.mean = mean
        self.stddev = stddev
        # divisor actually applied; 1 where the column had no variance
        self.scale = scale

    def to_dict(self) -> Dict[str, Dict[str, float]]:
        """Convert to dictionary representation"""
        return OrderedDict(
            (name, {"mean": float(m), "stddev": float(s)})
            for name, m, s in zip(self.column_names, self.mean, self.stddev)
        )


class StageCounts:
    """Row and column counts recorded after every preprocessing stage"""

    def __init__(self):
        self.stages: "OrderedDict[str, Dict[str, int]]" = OrderedDict()

    def record(self, stage: str, n_rows: int, n_cols: int):
        self.stages[stage] = {"rows": int(n_rows), "columns": int(n_cols)}
        logger.info("%s: %d rows x %d columns", stage, n_rows, n_cols)

    def to_dict(self) -> Dict[str, Dict[str, int]]:
        return OrderedDict((k, dict(v)) for k, v in self.stages.items())


def _extract_member(archive_path: str, member: str, destination: str) -> str:
    try:
        with zipfile.ZipFile(archive_path) as archive:
            try:
                info = archive.getinfo(member)
            except KeyError:
                raise FormatError(f"Member '{member}' not found in {archive_path}")
            os.makedirs(os.path.dirname(destination) or ".", exist_ok=True)
            with archive.open(info) as src, tempfile.NamedTemporaryFile(
                    "wb", dir=os.path.dirname(destination) or ".", delete=False) as dst:
                shutil.copyfileobj(src, dst)
                tmp_name = dst.name
    except zipfile.BadZipFile as e:
        raise FormatError(f"{archive_path} is not a valid zip archive: {e}")
    os.replace(tmp_name, destination)
    return destination


def fetch_dataset(url: str, cache_path: str, member: str = DEFAULT_MEMBER, timeout: float = 60.0) -> str:
    """
    Return a local path to the dataset CSV, downloading and extracting it on first use

    Args:
        url: HTTP(S) URL of a zip archive, or a local zip archive or CSV file
        cache_path: Cache directory; the member is extracted under it keeping its relative path
        member: CSV member inside the archive
        timeout: HTTP timeout in seconds

    Returns:
        Path of the extracted CSV
    """
    if os.path.isfile(url) and not url.lower().endswith(".zip"):
        return url

    target = os.path.join(cache_path, *member.split("/"))
    if os.path.isfile(target):
        logger.info("Using cached dataset %s", target)
        return target

    os.makedirs(cache_path, exist_ok=True)
    if os.path.isfile(url):
        return _extract_member(url, member, target)

    archive_path = os.path.join(cache_path, os.path.basename(url.split("?", 1)[0]) or "dataset.zip")
    if not os.path.isfile(archive_path):
        logger.info("Downloading %s", url)
        try:
            response = requests.get(url, timeout=timeout)
            response.raise_for_status()
        except requests.RequestException as e:
            raise FetchError(f"Cannot download {url} and no cached copy exists: {e}")
        with tempfile.NamedTemporaryFile("wb", dir=cache_path, delete=False) as tmp:
            tmp.write(response.content)
            tmp_name = tmp.name
        os.replace(tmp_name, archive_path)
    return _extract_member(archive_path, member, target)


def load_csv(path: str, separator: str = ";") -> RawTable:
    """
    Read a header-first CSV; columns whose every non-empty cell is a finite number become numeric

    Args:
        path: CSV file
        separator: Field separator

    Returns:
        RawTable with one column per header field
    """
    try:
        frame = pd.read_csv(path, sep=separator, dtype=str, quotechar='"',
                            keep_default_na=False, na_filter=False)
    except pd.errors.EmptyDataError:
        raise FormatError(f"{path} is empty")
    except pd.errors.ParserError as e:
        raise ParseError(f"{path}: {e}")
    except OSError as e:
        raise FormatError(f"Cannot read {path}: {e}")

    if len(frame) and not isinstance(frame.index, pd.RangeIndex):
        # pandas moves surplus leading fields into the index
        raise ParseError(f"{path}: line 2 has more fields than the header")
    short = frame.isna().any(axis=1)
    if short.any():
        line = int(np.argmax(short.to_numpy())) + 2
        raise ParseError(f"{path}: line {line} has fewer fields than the header")

    columns = OrderedDict()
    for name in frame.columns:
        text = frame[name].astype(str)
        present = text != ""
        numbers = pd.to_numeric(text.where(present), errors="coerce")
        finite = np.isfinite(numbers[present].to_numpy(dtype=np.float64)) if present.any() else np.array([])
        if present.any() and finite.all():
            columns[name] = numbers.astype(np.float64)
        else:
            columns[name] = text.astype(object)
    return RawTable(pd.DataFrame(columns, index=frame.index))


def sample_rows(t: RawTable, fraction: float, seed: int) -> RawTable:
    """floor(fraction * n_rows) rows drawn without replacement, in the sampler's order"""
    if not 0.0 < fraction <= 1.0:
        raise ValidationError(f"fraction must lie in (0, 1], got {fraction}")
    size = min(t.n_rows, math.floor(fraction * t.n_rows + _FLOOR_SLACK))
    return RawTable(t.frame.sample(n=size, random_state=seed))


def drop_duplicates(t: RawTable) -> RawTable:
    """Keep the first occurrence of each fully identical row"""
    return RawTable(t.frame.drop_duplicates(keep="first"))


def drop_missing(t: RawTable, missing_values: Optional[Sequence[str]] = None) -> RawTable:
    """Remove rows holding an empty cell, a NaN or one of the configured sentinel texts"""
    sentinels = [""] + [v for v in (missing_values or []) if v != ""]
    missing = t.frame.isna() | t.frame.isin(sentinels)
    return RawTable(t.frame[~missing.any(axis=1)])


def one_hot_encode(t: RawTable) -> FrameTable:
    """
    Numeric columns pass through; a text column with k distinct values becomes k 0/1 columns
    named '<col>_<value>', sorted by value and placed where the source column stood
    """
    blocks = []
    for name in t.column_names:
        series = t.frame[name]
        if t.is_numeric(name):
            blocks.append(series.astype(np.float64).to_frame(name))
        else:
            values = series.astype(str)
            levels = sorted(values.unique())
            block = pd.DataFrame(
                {f"{name}_{level}": (values == level).astype(np.float64) for level in levels},
                index=series.index,
            )
            blocks.append(block)
    if not blocks:
        return FrameTable([], np.empty((t.n_rows, 0)))
    return FrameTable.from_dataframe(pd.concat(blocks, axis=1))


def standardize(t: FrameTable) -> Tuple[FrameTable, ScalerParams]:
    """(x - mean) / population stddev per column; zero-variance columns become 0"""
    if t.n_rows < 1:
        raise ValidationError("standardize needs at least one row")
    mean = t.data.mean(axis=0)
    stddev = t.data.std(axis=0)
    tolerance = 10 * np.finfo(np.float64).eps * np.maximum(1.0, np.abs(mean))
    constant = stddev < tolerance
    scale = np.where(constant, 1.0, stddev)
    scaled = (t.data - mean) / scale
    scaled[:, constant] = 0.0
    return FrameTable(t.column_names, scaled), ScalerParams(t.column_names, mean, stddev, scale)


def binarize_target(t: FrameTable, target: str) -> FrameTable:
    """Values strictly above the column minimum become 1, the rest 0"""
    values = t.column(target)
    if values.size == 0:
        raise ValidationError(f"Target '{target}' has no values")
    return t.with_column(target, (values > values.min()).astype(np.float64))


def drop_columns(t: FrameTable, names: Sequence[str]) -> FrameTable:
    """Remove configured columns; every name must exist"""
    return t.drop(names) if names else t


def preprocess(raw: RawTable, cfg) -> Tuple[FrameTable, StageCounts]:
    """
    Run the preprocessing stages in order: sample, deduplicate, drop missing,
    one-hot encode, standardize, binarize the target, drop configured columns

    Args:
        raw: Loaded table
        cfg: RunConfig

    Returns:
        Preprocessed table and the per-stage counts
    """
    counts = StageCounts()
    counts.record("loaded", raw.n_rows, raw.n_cols)

    table = sample_rows(raw, cfg.sample_fraction, cfg.sample_seed)
    counts.record("sampled", table.n_rows, table.n_cols)
    table = drop_duplicates(table)
    counts.record("deduplicated", table.n_rows, table.n_cols)
    table = drop_missing(table, cfg.missing_values)
    counts.record("missing_dropped", table.n_rows, table.n_cols)

    frame = one_hot_encode(table)
    counts.record("encoded", frame.n_rows, frame.n_cols)
    if cfg.target not in frame:
        raise ValidationError(f"Target '{cfg.target}' not present after encoding")
    frame, _ = standardize(frame)
    counts.record("standardized", frame.n_rows, frame.n_cols)
    if cfg.binarize:
        frame = binarize_target(frame, cfg.target)
        counts.record("target_binarized", frame.n_rows, frame.n_cols)
    frame = drop_columns(frame, cfg.drop_columns)
    counts.record("columns_dropped", frame.n_rows, frame.n_cols)
    return frame, counts
