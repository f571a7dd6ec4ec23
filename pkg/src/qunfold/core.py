"""Basis-state indexing, count vectors and response matrices.

Internally every vector and matrix is indexed with qubit 0 as the least
significant bit of the basis index (``BitOrdering.Q0_LSB``).  Bitstring
labels are always written qubit 0 first; the ordering decides how such a
label maps to an integer index.  Under ``Q0_MSB`` the label is simply the
zero-padded binary expansion of the index, which is also the order obtained
by sorting labels lexicographically.
"""

from __future__ import annotations

import csv
import enum
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from .errors import (
    BadIndex,
    BadLabel,
    DimensionMismatch,
    NotStochastic,
    ZeroColumn,
)

MAX_QUBITS = 24

STOCHASTIC_ATOL = 1e-9
STOCHASTIC_ATOL_LOADED = 1e-6


class BitOrdering(str, enum.Enum):
    Q0_LSB = "Q0_LSB"
    Q0_MSB = "Q0_MSB"


def check_n_qubits(n_qubits: int) -> int:
    n = int(n_qubits)
    if n != n_qubits or not 1 <= n <= MAX_QUBITS:
        raise BadIndex(f"n_qubits must be an integer in [1, {MAX_QUBITS}], got {n_qubits!r}")
    return n


def n_qubits_for_length(length: int) -> int:
    """Return n such that ``2**n == length`` or raise DimensionMismatch."""
    if length < 2 or length & (length - 1):
        raise DimensionMismatch(f"length {length} is not a power of two >= 2")
    return check_n_qubits(length.bit_length() - 1)


@dataclass(frozen=True)
class BasisIndex:
    value: int
    n_qubits: int

    def __post_init__(self):
        check_n_qubits(self.n_qubits)
        if not 0 <= self.value < 2**self.n_qubits:
            raise BadIndex(f"index {self.value} out of range for {self.n_qubits} qubits")

    def __int__(self):
        return self.value


def index_to_label(index: int | BasisIndex, n_qubits: int | None = None,
                   ordering: BitOrdering = BitOrdering.Q0_MSB) -> str:
    """Bitstring label of a basis index.

    >>> index_to_label(7, 5, BitOrdering.Q0_MSB)
    '00111'
    >>> index_to_label(7, 5, BitOrdering.Q0_LSB)
    '11100'
    """
    if not isinstance(index, BasisIndex):
        if n_qubits is None:
            raise BadIndex("n_qubits is required for a plain integer index")
        index = BasisIndex(int(index), int(n_qubits))
    label = format(index.value, "b").zfill(index.n_qubits)
    if BitOrdering(ordering) is BitOrdering.Q0_LSB:
        label = label[::-1]
    return label


def label_to_index(label: str, ordering: BitOrdering = BitOrdering.Q0_MSB) -> int:
    if not label or any(ch not in "01" for ch in label):
        raise BadLabel(f"label {label!r} must be a non-empty string of 0/1")
    check_n_qubits(len(label))
    if BitOrdering(ordering) is BitOrdering.Q0_LSB:
        label = label[::-1]
    return int(label, 2)


def bit_reversal_permutation(n_qubits: int) -> np.ndarray:
    idx = np.arange(2**n_qubits)
    rev = np.zeros_like(idx)
    for k in range(n_qubits):
        rev |= ((idx >> k) & 1) << (n_qubits - 1 - k)
    return rev


def reorder(vector, n_qubits: int, src: BitOrdering, dst: BitOrdering) -> np.ndarray:
    """Re-index a length-2**n vector from one ordering convention to another."""
    vec = np.asarray(vector)
    if vec.shape[0] != 2**n_qubits:
        raise DimensionMismatch(f"vector of length {vec.shape[0]} for {n_qubits} qubits")
    if BitOrdering(src) is BitOrdering(dst):
        return vec.copy()
    return vec[bit_reversal_permutation(n_qubits)]


def _frozen(array: np.ndarray) -> np.ndarray:
    array = np.array(array, copy=True)
    array.setflags(write=False)
    return array


@dataclass(frozen=True, eq=False)
class CountVector:
    """Real-valued histogram over the 2**n computational basis states.

    Entries may be negative (matrix inversion output) but must be finite.
    """

    counts: np.ndarray
    n_qubits: int

    def __post_init__(self):
        n = check_n_qubits(self.n_qubits)
        counts = np.asarray(self.counts, dtype=float)
        if counts.ndim != 1 or counts.shape[0] != 2**n:
            raise DimensionMismatch(f"expected {2**n} counts, got shape {counts.shape}")
        if not np.all(np.isfinite(counts)):
            raise ValueError("counts must be finite")
        object.__setattr__(self, "counts", _frozen(counts))

    @classmethod
    def from_array(cls, values) -> "CountVector":
        values = np.asarray(values, dtype=float)
        return cls(values, n_qubits_for_length(values.shape[0]))

    def __array__(self, dtype=None, copy=None):
        return self.counts if dtype is None else self.counts.astype(dtype)

    def __len__(self):
        return self.counts.shape[0]

    def __eq__(self, other):
        if not isinstance(other, CountVector):
            return NotImplemented
        return self.n_qubits == other.n_qubits and np.array_equal(self.counts, other.counts)

    @property
    def total(self) -> float:
        return float(self.counts.sum())

    def labels(self, ordering: BitOrdering = BitOrdering.Q0_MSB) -> list[str]:
        return [index_to_label(i, self.n_qubits, ordering) for i in range(len(self))]

    def to_dict(self, ordering: BitOrdering = BitOrdering.Q0_MSB) -> dict[str, float]:
        return dict(zip(self.labels(ordering), self.counts.tolist()))


@dataclass(frozen=True, eq=False)
class ResponseMatrix:
    """Column-stochastic matrix with ``entries[i, j] = P(measured i | true j)``."""

    entries: np.ndarray
    n_qubits: int
    atol: float = field(default=STOCHASTIC_ATOL, repr=False)

    def __post_init__(self):
        n = check_n_qubits(self.n_qubits)
        entries = np.asarray(self.entries, dtype=float)
        dim = 2**n
        if entries.shape != (dim, dim):
            raise DimensionMismatch(f"expected a {dim}x{dim} matrix, got {entries.shape}")
        check_column_stochastic(entries, self.atol)
        object.__setattr__(self, "entries", _frozen(entries))

    @classmethod
    def from_array(cls, entries, atol: float = STOCHASTIC_ATOL) -> "ResponseMatrix":
        entries = np.asarray(entries, dtype=float)
        if entries.ndim != 2 or entries.shape[0] != entries.shape[1]:
            raise DimensionMismatch(f"response matrix must be square, got {entries.shape}")
        return cls(entries, n_qubits_for_length(entries.shape[0]), atol)

    @classmethod
    def identity(cls, n_qubits: int) -> "ResponseMatrix":
        return cls(np.eye(2**check_n_qubits(n_qubits)), n_qubits)

    def __array__(self, dtype=None, copy=None):
        return self.entries if dtype is None else self.entries.astype(dtype)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def column_sums(self) -> np.ndarray:
        return self.entries.sum(axis=0)

    def fold(self, truth) -> np.ndarray:
        """Expected measured histogram ``R @ t``."""
        truth = np.asarray(truth, dtype=float)
        if truth.shape != (self.dim,):
            raise DimensionMismatch(f"truth of shape {truth.shape} for a {self.dim}-dim response")
        return self.entries @ truth


def check_column_stochastic(entries: np.ndarray, atol: float = STOCHASTIC_ATOL) -> None:
    if not np.all(np.isfinite(entries)):
        raise NotStochastic("response entries must be finite")
    if entries.min() < -atol or entries.max() > 1 + atol:
        raise NotStochastic("response entries must lie in [0, 1]")
    sums = entries.sum(axis=0)
    bad = np.flatnonzero(np.abs(sums - 1.0) > atol)
    if bad.size:
        j = int(bad[0])
        raise NotStochastic(f"column {j} sums to {sums[j]!r}, not 1 (atol={atol})")


def normalize_columns(raw, shots: float | None = None) -> ResponseMatrix:
    """Turn a matrix of calibration counts into a response matrix.

    Column ``j`` holds the counts measured after preparing basis state ``j``.
    Each column is divided by its own total; ``shots``, when given, is only
    checked against those totals.
    """
    raw = np.asarray(raw, dtype=float)
    if raw.ndim != 2 or raw.shape[0] != raw.shape[1]:
        raise DimensionMismatch(f"calibration counts must be square, got {raw.shape}")
    if np.any(raw < 0):
        raise ValueError("calibration counts must be non-negative")
    totals = raw.sum(axis=0)
    zero = np.flatnonzero(totals == 0)
    if zero.size:
        raise ZeroColumn(f"calibration column(s) {zero.tolist()} have no counts")
    if shots is not None:
        off = np.abs(totals - shots) > max(0.5, 1e-9 * shots)
        if np.any(off):
            j = int(np.flatnonzero(off)[0])
            raise NotStochastic(f"column {j} totals {totals[j]!r}, expected {shots!r} shots")
    return ResponseMatrix.from_array(raw / totals)


def sorted_counts_from_labeled(mapping: Mapping[str, float],
                               ordering: BitOrdering = BitOrdering.Q0_MSB,
                               n_qubits: int | None = None) -> CountVector:
    """Arrange a ``{bitstring: count}`` map into an index-ordered CountVector.

    Labels missing from the map get a count of zero.  With the default
    ``Q0_MSB`` ordering the result follows ascending label order.
    """
    if not mapping and n_qubits is None:
        raise BadLabel("cannot infer the number of qubits from an empty map")
    lengths = {len(label) for label in mapping}
    if n_qubits is None:
        if len(lengths) != 1:
            raise BadLabel(f"labels have mixed lengths {sorted(lengths)}")
        n_qubits = lengths.pop()
    n = check_n_qubits(n_qubits)
    counts = np.zeros(2**n)
    for label, value in mapping.items():
        if len(label) != n:
            raise BadLabel(f"label {label!r} does not have {n} bits")
        if value < 0:
            raise ValueError(f"negative count {value!r} for label {label!r}")
        counts[label_to_index(label, ordering)] += value
    return CountVector(counts, n)


# ---------------------------------------------------------------- file formats

def _parse_meta_line(line: str) -> dict[str, str]:
    meta = {}
    for token in line.lstrip("#").split():
        if "=" in token:
            key, value = token.split("=", 1)
            meta[key.strip()] = value.strip()
    return meta


def format_meta(meta: Mapping[str, object] | None) -> str:
    if not meta:
        return ""
    return "# " + " ".join(f"{k}={v}" for k, v in meta.items()) + "\n"


def read_header_meta(path) -> dict[str, str]:
    """Collect ``key=value`` tokens from the leading ``#`` lines of a file."""
    meta: dict[str, str] = {}
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if not line.startswith("#"):
                break
            meta.update(_parse_meta_line(line))
    return meta


def _data_lines(path) -> list[str]:
    with open(path, encoding="utf-8") as fh:
        return [ln for ln in fh if ln.strip() and not ln.startswith("#")]


def write_counts_csv(path, counts, meta: Mapping[str, object] | None = None,
                     ordering: BitOrdering = BitOrdering.Q0_MSB) -> Path:
    """Write ``index,label,count`` rows in ascending index order."""
    if not isinstance(counts, CountVector):
        counts = CountVector.from_array(counts)
    path = Path(path)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(format_meta(meta))
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["index", "label", "count"])
        for i, (label, value) in enumerate(zip(counts.labels(ordering), counts.counts)):
            writer.writerow([i, label, repr(float(value))])
    return path


def write_vector_csv(path, values, labels: Sequence[str], meta: Mapping[str, object] | None = None) -> Path:
    """``index,label,count`` rows for a histogram with arbitrary bin labels."""
    values = as_vector(values)
    if len(labels) != values.size:
        raise DimensionMismatch(f"{len(labels)} labels for {values.size} values")
    path = Path(path)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(format_meta(meta))
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["index", "label", "count"])
        for i, (label, value) in enumerate(zip(labels, values)):
            writer.writerow([i, label, repr(float(value))])
    return path


def read_vector_csv(path) -> tuple[np.ndarray, list[str]]:
    rows = list(csv.reader(_data_lines(path)))
    if not rows or [c.strip() for c in rows[0]] != ["index", "label", "count"]:
        raise BadLabel(f"{path}: missing 'index,label,count' header")
    values, labels = [], []
    for expected, row in enumerate(rows[1:]):
        index, label, value = (c.strip() for c in row)
        if int(index) != expected:
            raise BadLabel(f"{path}: rows must be in ascending index order")
        labels.append(label)
        values.append(float(value))
    return np.array(values, dtype=float), labels


def read_counts(path) -> CountVector:
    """Load a CountVector from the CSV format or a flat JSON ``{label: count}``."""
    path = Path(path)
    if path.suffix.lower() == ".json":
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
        if not isinstance(data, dict):
            raise BadLabel(f"{path}: expected a JSON object of label -> count")
        return sorted_counts_from_labeled({str(k): float(v) for k, v in data.items()})
    values, labels = read_vector_csv(path)
    n = n_qubits_for_length(len(values))
    for i, label in enumerate(labels):
        if len(label) != n or any(ch not in "01" for ch in label):
            raise BadLabel(f"{path}: bad label {label!r} on row {i}")
    return CountVector(values, n)


def write_matrix_csv(path, matrix, meta: Mapping[str, object] | None = None) -> Path:
    matrix = as_square(matrix)
    path = Path(path)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(format_meta(meta))
        writer = csv.writer(fh, lineterminator="\n")
        for row in matrix:
            writer.writerow([repr(float(v)) for v in row])
    return path


def write_response_csv(path, response, meta: Mapping[str, object] | None = None) -> Path:
    if not isinstance(response, ResponseMatrix):
        response = ResponseMatrix.from_array(response)
    header = {"n_qubits": response.n_qubits}
    header.update(meta or {})
    return write_matrix_csv(path, response.entries, header)


def read_matrix_csv(path) -> np.ndarray:
    rows = [[float(v) for v in row] for row in csv.reader(_data_lines(path))]
    matrix = np.array(rows, dtype=float)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise DimensionMismatch(f"{path}: matrix is not square ({matrix.shape})")
    return matrix


def read_response_csv(path, atol: float = STOCHASTIC_ATOL_LOADED) -> ResponseMatrix:
    matrix = read_matrix_csv(path)
    meta = read_header_meta(path)
    response = ResponseMatrix.from_array(matrix, atol=atol)
    if "n_qubits" in meta and int(meta["n_qubits"]) != response.n_qubits:
        raise DimensionMismatch(
            f"{path}: header says n_qubits={meta['n_qubits']} but matrix is {response.dim}x{response.dim}")
    return response


def as_vector(values, name: str = "vector") -> np.ndarray:
    arr = np.asarray(values, dtype=float)
    if arr.ndim != 1:
        raise DimensionMismatch(f"{name} must be one-dimensional, got shape {arr.shape}")
    return arr


def as_square(values, name: str = "matrix") -> np.ndarray:
    arr = np.asarray(values, dtype=float)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise DimensionMismatch(f"{name} must be square, got shape {arr.shape}")
    return arr


def labels_for(n_qubits: int, ordering: BitOrdering = BitOrdering.Q0_MSB) -> Sequence[str]:
    return [index_to_label(i, n_qubits, ordering) for i in range(2**n_qubits)]
