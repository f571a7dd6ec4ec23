"""Non-quantum synthetic histograms and the threshold-noise distortion."""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import BadRange, DimensionMismatch, NotStochastic

THRESHOLD_RANGE = (-10, 10)


@dataclass(frozen=True, eq=False)
class IntegerSample:
    values: np.ndarray
    bin_range: tuple[int, int]

    def __post_init__(self):
        vals = np.asarray(self.values)
        if vals.ndim != 1:
            raise DimensionMismatch("sample must be one-dimensional")
        if vals.size and not np.all(vals == np.round(vals)):
            raise ValueError("sample values must be integers")
        vals = vals.astype(np.int64)
        lo, hi = (int(b) for b in self.bin_range)
        if lo > hi:
            raise BadRange(f"empty range [{lo}, {hi}]")
        if vals.size and (vals.min() < lo or vals.max() > hi):
            raise BadRange(f"values outside [{lo}, {hi}]")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "bin_range", (lo, hi))

    def __len__(self):
        return self.values.size

    def __eq__(self, other):
        if not isinstance(other, IntegerSample):
            return NotImplemented
        return self.bin_range == other.bin_range and np.array_equal(self.values, other.values)


@dataclass(frozen=True, eq=False)
class Histogram:
    edges: np.ndarray
    counts: np.ndarray

    def __post_init__(self):
        edges = np.asarray(self.edges, dtype=float)
        counts = np.asarray(self.counts, dtype=float)
        if edges.ndim != 1 or edges.size < 2 or np.any(np.diff(edges) <= 0):
            raise ValueError("edges must be strictly increasing with at least two entries")
        if counts.shape != (edges.size - 1,):
            raise DimensionMismatch(f"{counts.size} counts for {edges.size - 1} bins")
        if not np.all(np.isfinite(counts)):
            raise ValueError("counts must be finite")
        object.__setattr__(self, "edges", edges)
        object.__setattr__(self, "counts", counts)

    @property
    def centers(self) -> np.ndarray:
        return 0.5 * (self.edges[1:] + self.edges[:-1])

    def total(self) -> float:
        return float(self.counts.sum())


def round_half_away(x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    return np.sign(x) * np.floor(np.abs(x) + 0.5)


def clipped_normal_integers(n: int, sigma: float, clip=(-10, 10), seed=None) -> IntegerSample:
    """``n`` draws from N(0, sigma), clipped and rounded half away from zero."""
    lo, hi = clip
    if sigma <= 0:
        raise ValueError("sigma must be positive")
    if lo >= hi:
        raise BadRange(f"clip range [{lo}, {hi}] is empty")
    raw = np.random.default_rng(seed).standard_normal(int(n)) * sigma
    vals = round_half_away(np.clip(raw, lo, hi)).astype(np.int64)
    # rounding a clipped non-integer bound could step outside it
    vals = np.clip(vals, int(np.ceil(lo)), int(np.floor(hi)))
    return IntegerSample(vals, (int(np.ceil(lo)), int(np.floor(hi))))


def threshold_noise(truth: IntegerSample, seed=None, *, draws=None) -> IntegerSample:
    """Shift each value by -1, 0 or +1 according to a uniform draw.

    Pass ``draws`` to replay a known stream instead of sampling one.
    """
    if truth.bin_range != THRESHOLD_RANGE:
        raise BadRange(f"threshold noise is defined on {THRESHOLD_RANGE}, got {truth.bin_range}")
    v = truth.values
    if draws is None:
        u = np.random.default_rng(seed).uniform(0.0, 1.0, v.size)
    else:
        u = np.asarray(draws, dtype=float)
        if u.shape != v.shape:
            raise DimensionMismatch(f"{u.size} draws for {v.size} values")
    lo, hi = THRESHOLD_RANGE
    inner = np.abs(v) < hi
    step = np.select(
        [(v == lo) & (u < 0.2), (v == hi) & (u < 0.3), inner & (u < 0.2), inner & (u < 0.8)],
        [1, -1, -1, 1],
        default=0,
    )
    return IntegerSample(v + step, truth.bin_range)


def tridiagonal_response(n_bins: int) -> np.ndarray:
    """Smearing matrix that leaks a quarter of each bin into each neighbour."""
    if n_bins < 2:
        raise ValueError("need at least two bins")
    r = np.zeros((n_bins, n_bins))
    idx = np.arange(n_bins)
    r[idx, idx] = 0.5
    r[idx[:-1], idx[1:]] = 0.25
    r[idx[1:], idx[:-1]] = 0.25
    r[0, 0] = r[-1, -1] = 0.75
    return r


def unit_edges(lo: int = -10, hi: int = 10) -> np.ndarray:
    return np.linspace(lo - 0.5, hi + 0.5, hi - lo + 2)


def histogram(sample: IntegerSample | np.ndarray, edges) -> Histogram:
    values = sample.values if isinstance(sample, IntegerSample) else np.asarray(sample)
    counts, edges = np.histogram(values, bins=np.asarray(edges, dtype=float))
    return Histogram(edges, counts.astype(float))


def distort_histogram(truth_counts, response, seed=None, shots: int | None = None) -> np.ndarray:
    """Multinomial draw of ``shots`` events (default ``sum(truth)``) from ``response @ truth``."""
    t = np.asarray(truth_counts, dtype=float)
    r = np.asarray(response, dtype=float)
    if r.shape != (t.size, t.size):
        raise DimensionMismatch(f"response {r.shape} for {t.size} bins")
    if t.min() < 0:
        raise ValueError("truth counts must be non-negative")
    total = int(round(t.sum())) if shots is None else int(shots)
    if total < 0:
        raise ValueError("shots must be non-negative")
    if total == 0 or t.sum() == 0:
        return np.zeros_like(t)
    p = r @ t
    if p.min() < -1e-12 or abs(p.sum() - t.sum()) > 1e-9 * max(1.0, t.sum()):
        raise NotStochastic("response does not conserve the truth total")
    p = np.clip(p, 0, None)
    return np.random.default_rng(seed).multinomial(total, p / p.sum()).astype(float)


def write_sample(path, sample: IntegerSample) -> Path:
    path = Path(path)
    lo, hi = sample.bin_range
    lines = [f"# lo={lo}", f"# hi={hi}"] + [str(int(v)) for v in sample.values]
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


def read_sample(path, bin_range=None) -> IntegerSample:
    header = {}
    values = []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        line = line.strip()
        if not line:
            continue
        if line.startswith("#"):
            key, _, val = line[1:].partition("=")
            header[key.strip()] = val.strip()
        else:
            values.append(int(line))
    if bin_range is None:
        if "lo" in header and "hi" in header:
            bin_range = (int(header["lo"]), int(header["hi"]))
        else:
            bin_range = THRESHOLD_RANGE
    return IntegerSample(np.array(values, dtype=np.int64), bin_range)


def write_histogram_csv(path, hist: Histogram) -> Path:
    path = Path(path)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["lo", "hi", "count"])
        for lo, hi, c in zip(hist.edges[:-1], hist.edges[1:], hist.counts):
            writer.writerow([repr(float(lo)), repr(float(hi)), repr(float(c))])
    return path


def read_histogram_csv(path) -> Histogram:
    with open(path, encoding="utf-8", newline="") as fh:
        rows = [r for r in csv.reader(line for line in fh if not line.startswith("#"))]
    if not rows or rows[0] != ["lo", "hi", "count"]:
        raise ValueError(f"{path}: expected header lo,hi,count")
    body = np.array([[float(x) for x in r] for r in rows[1:]], dtype=float)
    if body.size == 0:
        raise ValueError(f"{path}: no bins")
    if np.any(body[1:, 0] != body[:-1, 1]):
        raise ValueError(f"{path}: bins are not contiguous")
    edges = np.append(body[:, 0], body[-1, 1])
    return Histogram(edges, body[:, 2])
