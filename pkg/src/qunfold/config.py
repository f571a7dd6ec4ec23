"""Experiment configuration: a flat ``key = value`` file plus overrides.

Grammar, one entry per line::

    # comment
    qubits = 5
    truth = gaussian
    methods = mi, ibu, cls

Keys are case-insensitive and ``-`` is read as ``_``. Blank lines and ``#``
comments are ignored; a repeated key keeps its last value.
"""

from __future__ import annotations

import dataclasses
import hashlib
import json
from dataclasses import dataclass, fields
from pathlib import Path
from typing import Any, Mapping

from .core import MAX_QUBITS
from .errors import BadSource, ConfigError

METHODS = ("mi", "ibu", "cls")
TRUTH_KINDS = ("uniform", "gaussian", "bell", "circuit", "clipped-normal", "file")
CHANNEL_KINDS = ("identity", "tensor", "tridiagonal", "file")
PRIOR_KINDS = ("uniform", "tent", "triangular", "file")
BELL_NAMES = ("phi+", "phi-", "psi+", "psi-")


@dataclass(frozen=True)
class ExperimentConfig:
    qubits: int = 2
    shots: int = 8192
    seed: int = 0
    truth: str = "uniform"
    truth_mode: str = "exact"
    samples: int = 10000
    sigma: float = 3.0
    bins: int = 21
    channel: str = "tensor"
    channel_seed: int | None = None
    cal_shots: int = 8192
    batch_size: int = 0
    methods: tuple[str, ...] = METHODS
    ibu_iters: int = 1
    prior: str = "uniform"
    cls_tol: float = 1e-6
    cls_max_steps: int = 1000
    out: str = "out"

    # ------------------------------------------------------------ derived

    @property
    def truth_kind(self) -> str:
        return self.truth.split(":", 1)[0]

    @property
    def truth_arg(self) -> str | None:
        kind, sep, arg = self.truth.partition(":")
        return arg if sep else None

    @property
    def channel_kind(self) -> str:
        return self.channel.split(":", 1)[0]

    @property
    def channel_arg(self) -> str | None:
        kind, sep, arg = self.channel.partition(":")
        return arg if sep else None

    @property
    def synthetic(self) -> bool:
        """True for the integer-histogram world, where bins replace qubits."""
        return self.truth_kind == "clipped-normal"

    @property
    def dim(self) -> int:
        return self.bins if self.synthetic else 2**self.qubits

    @property
    def effective_channel_seed(self) -> int:
        return self.seed if self.channel_seed is None else self.channel_seed

    # ------------------------------------------------------------ lifecycle

    def validate(self) -> "ExperimentConfig":
        if not 1 <= self.qubits <= MAX_QUBITS:
            raise ConfigError(f"qubits must be in [1, {MAX_QUBITS}], got {self.qubits}")
        for name in ("shots", "cal_shots", "samples", "cls_max_steps"):
            if getattr(self, name) <= 0:
                raise ConfigError(f"{name} must be positive")
        if self.batch_size < 0 or self.ibu_iters < 0 or self.seed < 0:
            raise ConfigError("batch_size, ibu_iters and seed must be non-negative")
        if self.sigma <= 0 or self.cls_tol <= 0:
            raise ConfigError("sigma and cls_tol must be positive")
        if self.bins < 2:
            raise ConfigError("bins must be at least 2")
        if self.truth_mode not in ("exact", "sampled"):
            raise ConfigError(f"truth_mode must be exact or sampled, got {self.truth_mode!r}")
        if not self.methods or any(m not in METHODS for m in self.methods):
            raise ConfigError(f"methods must be drawn from {', '.join(METHODS)}")

        if self.truth_kind not in TRUTH_KINDS:
            raise BadSource(f"unknown truth source {self.truth!r}")
        if self.truth_kind in ("bell", "circuit", "file") and not self.truth_arg:
            raise BadSource(f"truth source {self.truth_kind!r} needs an argument, e.g. {self.truth_kind}:...")
        if self.truth_kind == "bell":
            if self.truth_arg not in BELL_NAMES:
                raise BadSource(f"unknown Bell state {self.truth_arg!r}")
            if self.qubits != 2:
                raise ConfigError("Bell truth requires qubits = 2")
        if self.truth_kind in ("circuit", "file"):
            _must_exist(self.truth_arg)

        if self.channel_kind not in CHANNEL_KINDS:
            raise ConfigError(f"unknown channel {self.channel!r}")
        if self.channel_kind == "file":
            if not self.channel_arg:
                raise ConfigError("channel file needs a path, e.g. file:response.csv")
            _must_exist(self.channel_arg)
        if self.channel_kind == "tensor" and self.synthetic:
            raise ConfigError("a tensor channel needs qubit truth, not clipped-normal bins")

        kind, _, arg = self.prior.partition(":")
        if kind not in PRIOR_KINDS:
            raise ConfigError(f"unknown prior {self.prior!r}")
        if kind == "file":
            if not arg:
                raise ConfigError("prior file needs a path, e.g. file:prior.csv")
            _must_exist(arg)
        return self

    def to_dict(self) -> dict[str, Any]:
        out = dataclasses.asdict(self)
        out["methods"] = list(self.methods)
        return out

    def hash(self) -> str:
        """Short digest of every setting that affects numbers (``out`` excluded)."""
        payload = self.to_dict()
        payload.pop("out")
        blob = json.dumps(payload, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()[:12]

    def provenance(self) -> dict[str, object]:
        return {"seed": self.seed, "config_hash": self.hash()}

    def with_overrides(self, overrides: Mapping[str, object]) -> "ExperimentConfig":
        return dataclasses.replace(self, **coerce(overrides))


def _must_exist(path: str) -> None:
    if not Path(path).exists():
        raise ConfigError(f"referenced file does not exist: {path}")


_FIELDS = {f.name: f for f in fields(ExperimentConfig)}


def _normalize_key(key: str) -> str:
    return key.strip().lower().replace("-", "_")


def _coerce_value(name: str, value: object) -> object:
    if value is None:
        return None
    target = _FIELDS[name].type
    try:
        if name == "methods":
            if isinstance(value, str):
                items = [v.strip().lower() for v in value.split(",")]
            else:
                items = [str(v).strip().lower() for v in value]
            return tuple(v for v in items if v)
        if name == "channel_seed" and str(value).strip().lower() in ("", "none"):
            return None
        if "int" in target:
            f = float(value)
            if f != int(f):
                raise ValueError
            return int(f)
        if "float" in target:
            return float(value)
        return str(value).strip()
    except (TypeError, ValueError):
        raise ConfigError(f"bad value {value!r} for {name}") from None


def coerce(raw: Mapping[str, object]) -> dict[str, object]:
    out = {}
    for key, value in raw.items():
        name = _normalize_key(key)
        if name not in _FIELDS:
            raise ConfigError(f"unknown config key {key!r}")
        out[name] = _coerce_value(name, value)
    return out


def parse_config_text(text: str, source: str = "<config>") -> dict[str, object]:
    raw: dict[str, object] = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep or not key.strip():
            raise ConfigError(f"{source}:{lineno}: expected 'key = value'")
        raw[key] = value.strip()
    return coerce(raw)


def load_config(path=None, overrides: Mapping[str, object] | None = None) -> ExperimentConfig:
    """Defaults, then the file (if any), then ``overrides``; the result is validated."""
    values: dict[str, object] = {}
    if path is not None:
        path = Path(path)
        try:
            text = path.read_text(encoding="utf-8")
        except FileNotFoundError:
            raise ConfigError(f"config file not found: {path}") from None
        values.update(parse_config_text(text, str(path)))
    values.update(coerce({k: v for k, v in (overrides or {}).items() if v is not None}))
    return ExperimentConfig(**values).validate()


def dump_config(cfg: ExperimentConfig) -> str:
    lines = []
    for key, value in cfg.to_dict().items():
        if isinstance(value, list):
            value = ", ".join(value)
        lines.append(f"{key} = {'none' if value is None else value}")
    return "\n".join(lines) + "\n"
