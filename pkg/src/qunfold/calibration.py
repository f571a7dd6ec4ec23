"""Calibration circuits, response-matrix assembly and matrix export."""

from __future__ import annotations

import csv
import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

from .core import (
    BitOrdering,
    CountVector,
    ResponseMatrix,
    check_n_qubits,
    format_meta,
    index_to_label,
    label_to_index,
    normalize_columns,
    read_counts,
    write_counts_csv,
    write_response_csv,
)
from .errors import ConflictingColumn, DimensionMismatch, IncompleteRun, NotStochastic
from .statesim import (
    Circuit,
    Gate,
    GateKind,
    apply_channel_and_sample,
    exact_probabilities,
    run_circuit,
)


@dataclass(frozen=True)
class CalibrationPlan:
    n_qubits: int
    circuits: tuple[Circuit, ...]

    def __len__(self):
        return len(self.circuits)

    def labels(self, ordering: BitOrdering = BitOrdering.Q0_MSB) -> list[str]:
        return [index_to_label(j, self.n_qubits, ordering) for j in range(len(self))]


def make_calibration_plan(n_qubits: int) -> CalibrationPlan:
    """One circuit per basis state; circuit ``j`` flips the set bits of ``j``."""
    n = check_n_qubits(n_qubits)
    circuits = tuple(
        Circuit(n, tuple(Gate(GateKind.X, (q,)) for q in range(n) if (j >> q) & 1))
        for j in range(2**n)
    )
    return CalibrationPlan(n, circuits)


@dataclass(frozen=True, eq=False)
class CalibrationRun:
    """Measured counts for (a subset of) the calibration circuits.

    ``columns`` maps the prepared basis index to its measured histogram.
    """

    n_qubits: int
    shots: int
    columns: Mapping[int, np.ndarray] = field(default_factory=dict)
    seed: int | None = None

    def __post_init__(self):
        n = check_n_qubits(self.n_qubits)
        dim = 2**n
        cols = {}
        for j, counts in self.columns.items():
            j = int(j)
            if not 0 <= j < dim:
                raise DimensionMismatch(f"column index {j} out of range for {n} qubits")
            arr = np.array(counts, dtype=float)
            if arr.shape != (dim,):
                raise DimensionMismatch(f"column {j} has shape {arr.shape}, expected ({dim},)")
            if arr.min() < 0 or abs(arr.sum() - self.shots) > 1e-6 * max(1, self.shots):
                raise NotStochastic(f"column {j} counts sum to {arr.sum()!r}, not {self.shots} shots")
            arr.setflags(write=False)
            cols[j] = arr
        object.__setattr__(self, "columns", dict(sorted(cols.items())))

    @property
    def dim(self) -> int:
        return 2**self.n_qubits

    @property
    def bitmap(self) -> np.ndarray:
        present = np.zeros(self.dim, dtype=bool)
        present[list(self.columns)] = True
        return present

    @property
    def missing(self) -> list[int]:
        return [j for j in range(self.dim) if j not in self.columns]

    @property
    def complete(self) -> bool:
        return len(self.columns) == self.dim

    def count_matrix(self) -> np.ndarray:
        raw = np.zeros((self.dim, self.dim))
        for j, counts in self.columns.items():
            raw[:, j] = counts
        return raw


def simulate_calibration(n_qubits: int, channel, shots: int, seed: int,
                         columns: Iterable[int] | None = None,
                         max_workers: int | None = None) -> CalibrationRun:
    """Run calibration circuits through a simulated readout channel.

    Circuit ``j`` draws with a generator seeded from ``(seed, j)``, so any
    split of the columns into batches, and any thread count, gives the same
    counts column by column.
    """
    plan = make_calibration_plan(n_qubits)
    channel = np.asarray(channel, dtype=float)
    if channel.shape != (plan_dim := 2**plan.n_qubits, plan_dim):
        raise DimensionMismatch(f"channel of shape {channel.shape} for {plan.n_qubits} qubits")
    wanted = range(len(plan)) if columns is None else [int(j) for j in columns]

    def one(j: int) -> np.ndarray:
        truth = exact_probabilities(run_circuit(plan.circuits[j]))
        rng_seed = np.random.SeedSequence([int(seed), j])
        return apply_channel_and_sample(truth, channel, shots, rng_seed).counts

    if max_workers and max_workers > 1:
        with ThreadPoolExecutor(max_workers=max_workers) as pool:
            results = list(pool.map(one, wanted))
    else:
        results = [one(j) for j in wanted]
    return CalibrationRun(plan.n_qubits, int(shots), dict(zip(wanted, results)), seed)


def simulate_calibration_batched(n_qubits: int, channel, shots: int, seed: int,
                                 batch_size: int) -> CalibrationRun:
    """Simulate the plan in consecutive batches and merge them."""
    if batch_size <= 0:
        raise ValueError("batch_size must be positive")
    dim = 2 ** check_n_qubits(n_qubits)
    run = CalibrationRun(n_qubits, int(shots), {}, seed)
    for start in range(0, dim, batch_size):
        batch = simulate_calibration(n_qubits, channel, shots, seed,
                                     range(start, min(start + batch_size, dim)))
        run = merge_runs(run, batch)
    return run


def assemble_response(run: CalibrationRun) -> ResponseMatrix:
    if not run.complete:
        raise IncompleteRun(run.missing)
    return normalize_columns(run.count_matrix(), run.shots)


def merge_runs(a: CalibrationRun, b: CalibrationRun) -> CalibrationRun:
    """Union of two runs; shared columns must carry identical counts."""
    if a.n_qubits != b.n_qubits or a.shots != b.shots:
        raise DimensionMismatch(
            f"cannot merge runs ({a.n_qubits} qubits, {a.shots} shots) and "
            f"({b.n_qubits} qubits, {b.shots} shots)")
    merged = dict(a.columns)
    for j, counts in b.columns.items():
        if j in merged and not np.array_equal(merged[j], counts):
            raise ConflictingColumn(f"column {j} differs between the two runs")
        merged[j] = counts
    seed = a.seed if a.seed is not None else b.seed
    return CalibrationRun(a.n_qubits, a.shots, merged, seed)


def tensor_response(per_qubit: Sequence) -> ResponseMatrix:
    """Response of independent per-qubit channels; ``per_qubit[k]`` acts on qubit k."""
    factors = [np.asarray(f, dtype=float) for f in per_qubit]
    if not factors:
        raise DimensionMismatch("need at least one per-qubit factor")
    for k, f in enumerate(factors):
        if f.shape != (2, 2):
            raise DimensionMismatch(f"factor {k} has shape {f.shape}, expected (2, 2)")
        if f.min() < 0 or np.any(np.abs(f.sum(axis=0) - 1) > 1e-9):
            raise NotStochastic(f"factor {k} is not column-stochastic")
    out = np.ones((1, 1))
    # qubit 0 is the least significant bit, so it is the rightmost Kronecker factor
    for f in factors:
        out = np.kron(f, out)
    return ResponseMatrix.from_array(out)


def random_readout_factors(n_qubits: int, seed: int, low: float = 0.89,
                           high: float = 0.97) -> list[np.ndarray]:
    """Per-qubit 2x2 channels with P(0|0), P(1|1) drawn uniformly in [low, high]."""
    rng = np.random.default_rng(seed)
    factors = []
    for _ in range(check_n_qubits(n_qubits)):
        p00, p11 = rng.uniform(low, high, size=2)
        factors.append(np.array([[p00, 1 - p11], [1 - p00, p11]]))
    return factors


# ----------------------------------------------------------------------- export

def export_matrix_csv(response: ResponseMatrix, path, meta: Mapping[str, object] | None = None) -> Path:
    return write_response_csv(path, response, meta)


def export_heatmap_data(response: ResponseMatrix,
                        ordering: BitOrdering = BitOrdering.Q0_MSB) -> list[tuple[str, str, float]]:
    """Rows of ``(true_label, measured_label, percent)``, column-normalised to 100."""
    entries = np.asarray(response, dtype=float)
    n = response.n_qubits
    sums = entries.sum(axis=0)
    rows = []
    for j in range(entries.shape[1]):
        for i in range(entries.shape[0]):
            pct = 100.0 * entries[i, j] / sums[j] if sums[j] > 0 else 0.0
            rows.append((index_to_label(j, n, ordering), index_to_label(i, n, ordering), pct))
    return rows


def write_heatmap_csv(response: ResponseMatrix, path,
                      ordering: BitOrdering = BitOrdering.Q0_MSB,
                      meta: Mapping[str, object] | None = None) -> Path:
    path = Path(path)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(format_meta(meta))
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["true_label", "measured_label", "percent"])
        for true, measured, pct in export_heatmap_data(response, ordering):
            writer.writerow([true, measured, repr(pct)])
    return path


# --------------------------------------------------------------- run directory

def save_run(run: CalibrationRun, directory, extra: Mapping[str, object] | None = None) -> Path:
    """Persist as ``meta.json`` plus one counts CSV per present column."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    meta = {
        "n_qubits": run.n_qubits,
        "shots": run.shots,
        "bitmap": "".join("1" if b else "0" for b in run.bitmap),
        "seed": run.seed,
        "label_ordering": BitOrdering.Q0_MSB.value,
    }
    meta.update(extra or {})
    (directory / "meta.json").write_text(json.dumps(meta, indent=2) + "\n", encoding="utf-8")
    for j, counts in run.columns.items():
        label = index_to_label(j, run.n_qubits, BitOrdering.Q0_MSB)
        write_counts_csv(directory / f"{label}.csv", CountVector(counts, run.n_qubits), extra)
    return directory


def load_run(directory) -> CalibrationRun:
    directory = Path(directory)
    meta = json.loads((directory / "meta.json").read_text(encoding="utf-8"))
    n = int(meta["n_qubits"])
    ordering = BitOrdering(meta.get("label_ordering", BitOrdering.Q0_MSB.value))
    bitmap = meta["bitmap"]
    columns = {}
    for j, flag in enumerate(bitmap):
        if flag != "1":
            continue
        label = index_to_label(j, n, ordering)
        counts = read_counts(directory / f"{label}.csv")
        if label_to_index(label, ordering) != j or counts.n_qubits != n:
            raise DimensionMismatch(f"{directory}: column file {label}.csv does not match meta")
        columns[j] = counts.counts
    return CalibrationRun(n, int(meta["shots"]), columns, meta.get("seed"))
