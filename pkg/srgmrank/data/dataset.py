import io
import logging
import math
import os

import numpy as np
import pandas as pd

from srgmrank.errors import DatasetParseError, DatasetValidationError

HEADER = ("t", "cumulative_faults")
COMMENT_PREFIX = "#"
NAME_DIRECTIVE = "# name:"
DEFAULT_NAME = "dataset"

logger = logging.getLogger(__name__)


class FailureDataset:
    """Cumulative software-failure observations

    A dataset holds ``k`` observation times ``t_1 < ... < t_k`` (test weeks,
    CPU hours, ...) together with the cumulative number of detected faults
    ``m_1 <= ... <= m_k`` at those times. Instances are immutable.

    Arguments:
        times (array-like) : observation times, strictly increasing and > 0
        counts (array-like) : cumulative detected faults, nondecreasing and >= 0
        name (str, optional) : dataset identifier. Defaults to "dataset".

    Raises:
        DatasetValidationError: when an invariant is violated. Rows are 1-based.
    """

    def __init__(self, times, counts, name=DEFAULT_NAME):
        times = np.array(times, dtype=float)
        counts = np.array(counts, dtype=float)
        if times.ndim != 1 or times.shape != counts.shape:
            raise DatasetValidationError(
                f"times and counts must be 1-D of equal length, got shapes {times.shape} and {counts.shape}"
            )
        _validate(times, counts)
        times.setflags(write=False)
        counts.setflags(write=False)
        self._times = times
        self._counts = counts
        self._name = str(name)

    @property
    def name(self):
        return self._name

    @property
    def times(self):
        return self._times

    @property
    def counts(self):
        return self._counts

    @property
    def k(self):
        """Sample size"""
        return len(self._times)

    @property
    def last_time(self):
        return float(self._times[-1])

    @property
    def last_count(self):
        """Cumulative faults at the last observation (M_a)"""
        return float(self._counts[-1])

    @property
    def points(self):
        return list(zip(self._times.tolist(), self._counts.tolist()))

    def __len__(self):
        return self.k

    def __eq__(self, other):
        if not isinstance(other, FailureDataset):
            return NotImplemented
        return (
            self.name == other.name
            and np.array_equal(self.times, other.times)
            and np.array_equal(self.counts, other.counts)
        )

    def __hash__(self):
        return hash((self.name, self.times.tobytes(), self.counts.tobytes()))

    def __repr__(self):
        return f"FailureDataset(name={self.name!r}, k={self.k}, last_time={self.last_time}, last_count={self.last_count})"


def _validate(times, counts):
    if len(times) < 2:
        raise DatasetValidationError(f"a dataset needs at least 2 rows, got {len(times)}", row=len(times) or None)
    for row, (t, m) in enumerate(zip(times, counts), start=1):
        if not (math.isfinite(t) and math.isfinite(m)):
            raise DatasetValidationError(f"non-finite value at row {row}", row=row)
        if t <= 0:
            raise DatasetValidationError(f"time must be positive at row {row}, got {t}", row=row)
        if m < 0:
            raise DatasetValidationError(f"cumulative count must be nonnegative at row {row}, got {m}", row=row)
    for row in range(2, len(times) + 1):
        if times[row - 1] <= times[row - 2]:
            raise DatasetValidationError(f"times not strictly increasing at row {row}", row=row)
        if counts[row - 1] < counts[row - 2]:
            raise DatasetValidationError(f"cumulative counts decrease at row {row}", row=row)


def _parse_number(text, line_no, column):
    try:
        value = float(text)
    except ValueError:
        raise DatasetParseError(f"malformed number {text!r} in column '{column}'", line=line_no)
    if not math.isfinite(value):
        raise DatasetParseError(f"non-finite number {text!r} in column '{column}'", line=line_no)
    return value


def parse_dataset(source, name=None):
    """Read a dataset from CSV text

    The first non-comment line must be the header ``t,cumulative_faults``;
    each following line holds one ``t,m`` pair. Lines starting with ``#``
    and blank lines are skipped. A ``# name: <id>`` comment names the dataset
    when ``name`` is not given.

    Arguments:
        source (file-like or str) : text stream (or the text itself)
        name (str, optional) : dataset name. Defaults to the ``# name:`` comment,
            then the stream's file name, then "dataset".

    Raises:
        DatasetParseError: bad header or malformed line (carries the line number)
        DatasetValidationError: invariant violated (carries the data row)

    Returns:
        FailureDataset
    """
    text = source if isinstance(source, str) else source.read()
    declared_name = None
    header_seen = False
    times, counts = [], []
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith(COMMENT_PREFIX):
            if line.lower().startswith(NAME_DIRECTIVE) and declared_name is None:
                declared_name = line[len(NAME_DIRECTIVE):].strip() or None
            continue
        fields = [field.strip() for field in line.split(",")]
        if not header_seen:
            if tuple(fields) != HEADER:
                raise DatasetParseError(f"expected header '{','.join(HEADER)}', got {line!r}", line=line_no)
            header_seen = True
            continue
        if len(fields) != 2:
            raise DatasetParseError(f"expected 2 fields, got {len(fields)}", line=line_no)
        times.append(_parse_number(fields[0], line_no, HEADER[0]))
        counts.append(_parse_number(fields[1], line_no, HEADER[1]))
    if not header_seen:
        raise DatasetParseError(f"missing header '{','.join(HEADER)}'")

    if name is None:
        name = declared_name or _stream_name(source) or DEFAULT_NAME
    dataset = FailureDataset(times, counts, name=name)
    logger.debug(f"Parsed {dataset!r}")
    return dataset


def _stream_name(source):
    path = getattr(source, "name", None)
    if not isinstance(path, str):
        return None
    return os.path.splitext(os.path.basename(path))[0]


def load_dataset(path, name=None):
    """Read a dataset CSV file from disk. See ``parse_dataset``."""
    with open(path, "r", encoding="utf8") as f:
        return parse_dataset(f, name=name)


def serialize(dataset, path=None):
    """Write a dataset in the format ``parse_dataset`` reads

    Arguments:
        dataset (FailureDataset) : dataset to write
        path (str, optional) : destination file. Defaults to None.

    Returns:
        str: the CSV text (also written to ``path`` when given)
    """
    buffer = io.StringIO()
    buffer.write(f"{NAME_DIRECTIVE} {dataset.name}\n")
    frame = pd.DataFrame({HEADER[0]: dataset.times, HEADER[1]: dataset.counts})
    frame.to_csv(buffer, index=False, lineterminator="\n")
    text = buffer.getvalue()
    if path is not None:
        with open(path, "w", encoding="utf8", newline="") as f:
            f.write(text)
    return text
