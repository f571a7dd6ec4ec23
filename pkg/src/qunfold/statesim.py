"""Small state-vector simulator used to produce truth distributions.

Amplitudes are stored with qubit 0 as the least significant bit of the basis
index.  A gate acting on ``targets = (a, b, ...)`` uses its textbook matrix
with ``a`` as the most significant bit, so ``CX`` on ``(control, target)``
is the usual ``[[1,0,0,0],[0,1,0,0],[0,0,0,1],[0,0,1,0]]``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable

import numpy as np

from .core import (
    BitOrdering,
    CountVector,
    check_n_qubits,
    n_qubits_for_length,
    reorder,
)
from .errors import (
    BadDistribution,
    BadTarget,
    CircuitSyntaxError,
    DimensionMismatch,
    ZeroVector,
)

NORM_ATOL = 1e-9


class GateKind(str, enum.Enum):
    I = "I"
    X = "X"
    Y = "Y"
    Z = "Z"
    H = "H"
    S = "S"
    SDG = "SDG"
    T = "T"
    TDG = "TDG"
    P = "P"
    SX = "SX"
    SXDG = "SXDG"
    SWAP = "SWAP"
    CX = "CX"
    CCX = "CCX"


ARITY = {GateKind.SWAP: 2, GateKind.CX: 2, GateKind.CCX: 3}

_ALIASES = {
    "ID": GateKind.I,
    "S†": GateKind.SDG,
    "T†": GateKind.TDG,
    "SQRTX": GateKind.SX,
    "SQRTXDG": GateKind.SXDG,
    "CNOT": GateKind.CX,
    "TOFFOLI": GateKind.CCX,
    "CCNOT": GateKind.CCX,
    "PHASE": GateKind.P,
}

_SQ2 = 1 / np.sqrt(2)


def gate_matrix(kind: GateKind | str, theta: float | None = None) -> np.ndarray:
    """Unitary of a gate, first target as the most significant bit."""
    kind = parse_kind(kind)
    if kind is GateKind.P:
        if theta is None:
            raise BadTarget("P gate needs an angle")
        return np.array([[1, 0], [0, np.exp(1j * theta)]], dtype=complex)
    return _FIXED[kind].copy()


def _perm(n, mapping):
    m = np.zeros((n, n), dtype=complex)
    for col in range(n):
        m[mapping.get(col, col), col] = 1
    return m


_FIXED = {
    GateKind.I: np.eye(2, dtype=complex),
    GateKind.X: np.array([[0, 1], [1, 0]], dtype=complex),
    GateKind.Y: np.array([[0, -1j], [1j, 0]], dtype=complex),
    GateKind.Z: np.array([[1, 0], [0, -1]], dtype=complex),
    GateKind.H: _SQ2 * np.array([[1, 1], [1, -1]], dtype=complex),
    GateKind.S: np.array([[1, 0], [0, 1j]], dtype=complex),
    GateKind.SDG: np.array([[1, 0], [0, -1j]], dtype=complex),
    GateKind.T: np.array([[1, 0], [0, np.exp(1j * np.pi / 4)]], dtype=complex),
    GateKind.TDG: np.array([[1, 0], [0, np.exp(-1j * np.pi / 4)]], dtype=complex),
    GateKind.SX: 0.5 * np.array([[1 + 1j, 1 - 1j], [1 - 1j, 1 + 1j]], dtype=complex),
    GateKind.SXDG: 0.5 * np.array([[1 - 1j, 1 + 1j], [1 + 1j, 1 - 1j]], dtype=complex),
    GateKind.SWAP: _perm(4, {1: 2, 2: 1}),
    GateKind.CX: _perm(4, {2: 3, 3: 2}),
    GateKind.CCX: _perm(8, {6: 7, 7: 6}),
}


def parse_kind(kind: GateKind | str) -> GateKind:
    if isinstance(kind, GateKind):
        return kind
    key = str(kind).strip().upper()
    if key in _ALIASES:
        return _ALIASES[key]
    try:
        return GateKind(key)
    except ValueError:
        raise BadTarget(f"unknown gate {kind!r}") from None


@dataclass(frozen=True)
class Gate:
    kind: GateKind
    targets: tuple[int, ...]
    theta: float | None = None

    def __post_init__(self):
        kind = parse_kind(self.kind)
        targets = tuple(int(q) for q in self.targets)
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "targets", targets)
        if len(targets) != ARITY.get(kind, 1):
            raise BadTarget(f"{kind.value} takes {ARITY.get(kind, 1)} qubit(s), got {targets}")
        if len(set(targets)) != len(targets):
            raise BadTarget(f"{kind.value} targets must be distinct, got {targets}")
        if any(q < 0 for q in targets):
            raise BadTarget(f"negative qubit index in {targets}")
        if (kind is GateKind.P) != (self.theta is not None):
            raise BadTarget("only the P gate takes an angle, and it requires one")

    def matrix(self) -> np.ndarray:
        return gate_matrix(self.kind, self.theta)

    def __str__(self):
        qubits = " ".join(str(q) for q in self.targets)
        if self.kind is GateKind.P:
            return f"P {self.theta!r} {qubits}"
        return f"{self.kind.value} {qubits}"


@dataclass(frozen=True)
class Circuit:
    n_qubits: int
    ops: tuple[Gate, ...] = field(default_factory=tuple)

    def __post_init__(self):
        check_n_qubits(self.n_qubits)
        ops = tuple(self.ops)
        object.__setattr__(self, "ops", ops)
        for gate in ops:
            if max(gate.targets) >= self.n_qubits:
                raise BadTarget(f"{gate} addresses a qubit outside 0..{self.n_qubits - 1}")

    def __iter__(self):
        return iter(self.ops)

    def __len__(self):
        return len(self.ops)

    def then(self, *gates: Gate) -> "Circuit":
        return Circuit(self.n_qubits, self.ops + tuple(gates))

    def to_text(self) -> str:
        return "".join(f"{gate}\n" for gate in self.ops)


@dataclass(frozen=True, eq=False)
class StateVector:
    amplitudes: np.ndarray
    n_qubits: int

    def __post_init__(self):
        n = check_n_qubits(self.n_qubits)
        amps = np.array(self.amplitudes, dtype=complex)
        if amps.shape != (2**n,):
            raise DimensionMismatch(f"expected {2**n} amplitudes, got shape {amps.shape}")
        norm = float(np.vdot(amps, amps).real)
        if abs(norm - 1.0) > NORM_ATOL:
            raise ZeroVector(f"state is not normalised (sum |a|^2 = {norm!r})")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def zero(cls, n_qubits: int) -> "StateVector":
        amps = np.zeros(2**check_n_qubits(n_qubits), dtype=complex)
        amps[0] = 1
        return cls(amps, n_qubits)

    @classmethod
    def basis(cls, index: int, n_qubits: int) -> "StateVector":
        amps = np.zeros(2**check_n_qubits(n_qubits), dtype=complex)
        amps[index] = 1
        return cls(amps, n_qubits)

    def __array__(self, dtype=None, copy=None):
        return self.amplitudes if dtype is None else self.amplitudes.astype(dtype)


def apply_gate(state: StateVector, gate: Gate) -> StateVector:
    """Apply ``gate`` by contracting its small unitary with the target axes.

    The full 2**n x 2**n operator is never built.
    """
    n = state.n_qubits
    if max(gate.targets) >= n:
        raise BadTarget(f"{gate} addresses a qubit outside 0..{n - 1}")
    k = len(gate.targets)
    # axis 0 of the reshaped tensor is the most significant bit, i.e. qubit n-1
    axes = [n - 1 - q for q in gate.targets]
    psi = state.amplitudes.reshape((2,) * n)
    u = gate.matrix().reshape((2,) * (2 * k))
    out = np.tensordot(u, psi, axes=(list(range(k, 2 * k)), axes))
    out = np.moveaxis(out, list(range(k)), axes)
    return _unchecked_state(out.reshape(-1), n)


def _unchecked_state(amps: np.ndarray, n: int) -> StateVector:
    # skips the norm check of __init__; unitaries preserve it up to rounding
    sv = object.__new__(StateVector)
    amps = np.ascontiguousarray(amps, dtype=complex)
    amps.setflags(write=False)
    object.__setattr__(sv, "amplitudes", amps)
    object.__setattr__(sv, "n_qubits", n)
    return sv


def run_circuit(circuit: Circuit, initial: StateVector | None = None) -> StateVector:
    """Apply the circuit's gates in order, starting from ``|0...0>``."""
    state = StateVector.zero(circuit.n_qubits) if initial is None else initial
    if state.n_qubits != circuit.n_qubits:
        raise DimensionMismatch("initial state and circuit disagree on qubit count")
    for gate in circuit.ops:
        state = apply_gate(state, gate)
    return state


def unitary(circuit: Circuit) -> np.ndarray:
    """Dense unitary of a circuit, columns indexed like the amplitudes."""
    dim = 2**circuit.n_qubits
    cols = [run_circuit(circuit, StateVector.basis(j, circuit.n_qubits)).amplitudes
            for j in range(dim)]
    return np.stack(cols, axis=1)


def initialize_amplitudes(desired) -> StateVector:
    """Normalise an arbitrary amplitude vector into a state."""
    desired = np.asarray(desired, dtype=complex)
    norm = np.linalg.norm(desired)
    if norm == 0 or not np.isfinite(norm):
        raise ZeroVector("cannot initialise from a zero (or non-finite) vector")
    return StateVector(desired / norm, n_qubits_for_length(desired.shape[0]))


def gaussian_amplitudes(n_qubits: int) -> np.ndarray:
    """Unnormalised harmonic-oscillator ground state sampled on 2**n points.

    Point ``z`` maps to ``x = 2 (z + 0.5 - 2**(n-1)) / 2**(n-1)`` and the
    amplitude is ``exp(-x**2 / 2)``.
    """
    half = 2 ** (check_n_qubits(n_qubits) - 1)
    z = np.arange(2**n_qubits)
    x = 2.0 * (z + 0.5 - half) / half
    return np.exp(-x**2 / 2)


def exact_probabilities(state: StateVector) -> CountVector:
    probs = np.abs(state.amplitudes) ** 2
    return CountVector(probs, state.n_qubits)


def _check_probs(probs) -> np.ndarray:
    p = np.asarray(probs, dtype=float)
    if p.ndim != 1 or p.size == 0:
        raise BadDistribution("probabilities must be a non-empty vector")
    if not np.all(np.isfinite(p)) or p.min() < -1e-12:
        raise BadDistribution("probabilities must be finite and non-negative")
    total = p.sum()
    if abs(total - 1.0) > 1e-6:
        raise BadDistribution(f"probabilities sum to {total!r}, not 1")
    p = np.clip(p, 0.0, None)
    return p / p.sum()


def sample_counts(probs, shots: int, seed) -> CountVector:
    """Multinomial draw of ``shots`` outcomes, reproducible for a fixed seed.

    ``seed`` is anything accepted by ``numpy.random.default_rng`` (an int or a
    ``SeedSequence``); the generator is PCG64.
    """
    p = _check_probs(probs)
    if int(shots) != shots or shots <= 0:
        raise BadDistribution(f"shots must be a positive integer, got {shots!r}")
    rng = np.random.default_rng(seed)
    counts = rng.multinomial(int(shots), p).astype(float)
    return CountVector(counts, n_qubits_for_length(p.shape[0]))


def apply_channel_and_sample(truth_probs, response, shots: int, seed) -> CountVector:
    """Sample measured counts for a truth distribution seen through a readout channel.

    Equivalent in distribution to drawing each shot's true outcome and then
    its measured outcome from the response column; done as one multinomial
    draw from ``R @ p``.
    """
    p = np.asarray(truth_probs, dtype=float)
    r = np.asarray(response, dtype=float)
    if r.ndim != 2 or r.shape != (p.shape[0], p.shape[0]):
        raise DimensionMismatch(f"response of shape {r.shape} for {p.shape[0]} truth bins")
    _check_probs(p)
    return sample_counts(np.clip(r @ p, 0.0, None), shots, seed)


# --------------------------------------------------------------- named circuits

BELL_STATES = {
    "phi+": np.array([1, 0, 0, 1]) * _SQ2,
    "phi-": np.array([1, 0, 0, -1]) * _SQ2,
    "psi+": np.array([0, 1, 1, 0]) * _SQ2,
    "psi-": np.array([0, 1, -1, 0]) * _SQ2,
}
"""Bell amplitude vectors written in the |q0 q1> (qubit 0 most significant) basis."""


def bell_circuit(name: str) -> Circuit:
    """Circuits preparing the four Bell states on qubits (0, 1)."""
    h, cx = ("H", 0), ("CX", 0, 1)
    recipes = {
        "phi+": [h, cx],
        "phi-": [("X", 0), h, cx],
        "psi+": [h, ("X", 1), cx],
        "psi-": [("X", 0), h, ("X", 1), cx],
    }
    key = name.lower()
    if key not in recipes:
        raise KeyError(f"unknown Bell state {name!r}; expected one of {sorted(recipes)}")
    return circuit_from_gates(2, recipes[key])


def uniform_circuit(n_qubits: int) -> Circuit:
    return Circuit(n_qubits, tuple(Gate(GateKind.H, (q,)) for q in range(n_qubits)))


# ------------------------------------------------------------------ text format

def parse_circuit(text: str, n_qubits: int | None = None) -> Circuit:
    """Parse one gate per line: ``GATE q0 [q1 [q2]]`` or ``P theta q0``.

    ``#`` starts a comment.  A ``QUBITS n`` line may declare the register
    size; otherwise ``n_qubits`` or the largest referenced qubit decides.
    """
    gates: list[Gate] = []
    declared = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        head = parts[0].upper()
        try:
            if head == "QUBITS":
                declared = int(parts[1])
                continue
            kind = parse_kind(head)
            if kind is GateKind.P:
                gates.append(Gate(kind, tuple(int(q) for q in parts[2:]), float(parts[1])))
            else:
                gates.append(Gate(kind, tuple(int(q) for q in parts[1:])))
        except (ValueError, IndexError, BadTarget) as exc:
            raise CircuitSyntaxError(f"line {lineno}: {raw.strip()!r}: {exc}") from None
    n = n_qubits or declared
    if n is None:
        if not gates:
            raise CircuitSyntaxError("empty circuit without a qubit count")
        n = max(max(g.targets) for g in gates) + 1
    try:
        return Circuit(n, tuple(gates))
    except BadTarget as exc:
        raise CircuitSyntaxError(str(exc)) from None


def load_circuit(path, n_qubits: int | None = None) -> Circuit:
    return parse_circuit(Path(path).read_text(encoding="utf-8"), n_qubits)


def circuit_from_gates(n_qubits: int, gates: Iterable[tuple]) -> Circuit:
    """Convenience builder: ``circuit_from_gates(2, [("H", 0), ("CX", 0, 1)])``."""
    ops = []
    for spec in gates:
        kind = parse_kind(spec[0])
        if kind is GateKind.P:
            ops.append(Gate(kind, tuple(spec[2:]), float(spec[1])))
        else:
            ops.append(Gate(kind, tuple(spec[1:])))
    return Circuit(n_qubits, tuple(ops))


def state_in_ordering(state: StateVector, ordering) -> np.ndarray:
    """Amplitudes re-indexed to the requested bit ordering."""
    return reorder(state.amplitudes, state.n_qubits, BitOrdering.Q0_LSB, ordering)

