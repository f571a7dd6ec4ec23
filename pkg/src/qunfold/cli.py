"""``qunfold`` command line: calibrate, generate truth, distort, unfold, report.

Every file written carries the master seed and the config hash. CSV files
carry them as ``# key=value`` header lines and JSON files as fields.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

import numpy as np

from . import calibration, fixtures, statesim, synth, unfold
from .config import METHODS, ExperimentConfig, dump_config, load_config
from .core import (
    check_column_stochastic,
    format_meta,
    labels_for,
    n_qubits_for_length,
    read_counts,
    read_matrix_csv,
    read_vector_csv,
    write_matrix_csv,
    write_vector_csv,
    STOCHASTIC_ATOL_LOADED,
)
from .errors import BadSource, ConfigError, DimensionMismatch, NumericalError, QUnfoldError

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC, EXIT_IO = 0, 2, 3, 4

# stage tags keep the random streams of different pipeline steps apart
TRUTH_STREAM, DISTORT_STREAM = 101, 102

TRUTH_FILE = "truth.csv"
RESPONSE_FILE = "response.csv"
TRUE_CHANNEL_FILE = "true_channel.csv"
CALIBRATION_DIR = "calibration"
MEASURED_FILE = "measured.csv"
UNFOLD_FILE = "unfold.json"
REPORT_FILE = "report.csv"
HEATMAP_FILE = "heatmap.csv"
CONFIG_FILE = "config.txt"


def stage_seed(seed: int, stage: int) -> np.random.SeedSequence:
    return np.random.SeedSequence([int(seed), stage])


def bin_labels(cfg: ExperimentConfig, dim: int) -> list[str]:
    if cfg.synthetic:
        lo = -(cfg.bins // 2)
        return [str(lo + i) for i in range(dim)]
    return list(labels_for(n_qubits_for_length(dim)))


def _meta(cfg: ExperimentConfig, **extra) -> dict[str, object]:
    meta = cfg.provenance()
    meta.update(extra)
    return meta


# ------------------------------------------------------------------ builders

def build_channel(cfg: ExperimentConfig) -> np.ndarray:
    """The true readout channel named by the config."""
    dim = cfg.dim
    kind = cfg.channel_kind
    if kind == "identity":
        return np.eye(dim)
    if kind == "tridiagonal":
        return synth.tridiagonal_response(dim)
    if kind == "tensor":
        factors = calibration.random_readout_factors(cfg.qubits, cfg.effective_channel_seed)
        return np.asarray(calibration.tensor_response(factors))
    matrix = load_matrix(cfg.channel_arg)
    if matrix.shape != (dim, dim):
        raise DimensionMismatch(f"channel file is {matrix.shape[0]}x{matrix.shape[1]}, config needs {dim}")
    return matrix


def build_truth(cfg: ExperimentConfig) -> np.ndarray:
    kind, arg = cfg.truth_kind, cfg.truth_arg
    if kind == "clipped-normal":
        sample = synth.clipped_normal_integers(cfg.samples, cfg.sigma, (-10, 10),
                                               stage_seed(cfg.seed, TRUTH_STREAM))
        half = cfg.bins // 2
        edges = np.linspace(-half - 0.5, cfg.bins - half - 0.5, cfg.bins + 1)
        return synth.histogram(sample, edges).counts
    if kind == "file":
        values = load_vector(arg)
        if values.size != cfg.dim:
            raise DimensionMismatch(f"truth file has {values.size} bins, config needs {cfg.dim}")
        return values

    n = cfg.qubits
    if kind == "uniform":
        probs = np.full(2**n, 1.0 / 2**n)
    elif kind == "gaussian":
        state = statesim.initialize_amplitudes(statesim.gaussian_amplitudes(n))
        probs = np.asarray(statesim.exact_probabilities(state))
    elif kind == "bell":
        probs = np.asarray(statesim.exact_probabilities(statesim.run_circuit(statesim.bell_circuit(arg))))
    elif kind == "circuit":
        circuit = statesim.load_circuit(arg, n)
        if circuit.n_qubits != n:
            raise DimensionMismatch(f"circuit has {circuit.n_qubits} qubits, config says {n}")
        probs = np.asarray(statesim.exact_probabilities(statesim.run_circuit(circuit)))
    else:
        raise BadSource(f"unknown truth source {cfg.truth!r}")
    if cfg.truth_mode == "sampled":
        return statesim.sample_counts(probs, cfg.shots, stage_seed(cfg.seed, TRUTH_STREAM)).counts
    return cfg.shots * probs


def build_prior(cfg: ExperimentConfig, dim: int) -> np.ndarray:
    kind, _, arg = cfg.prior.partition(":")
    if kind == "file":
        prior = load_vector(arg)
        if prior.size != dim:
            raise DimensionMismatch(f"prior has {prior.size} bins, expected {dim}")
        return prior
    return unfold.PRIORS[kind](dim)


def run_methods(cfg: ExperimentConfig, m: np.ndarray, response: np.ndarray) -> list[unfold.UnfoldResult]:
    results = []
    for method in cfg.methods:
        if method == "mi":
            res = unfold.matrix_inversion(m, response)
        elif method == "ibu":
            res = unfold.ibu(m, build_prior(cfg, m.size), response, cfg.ibu_iters)
            res.parameters["prior_spec"] = cfg.prior
        else:
            res = unfold.constrained_ls(m, response, cfg.cls_tol, cfg.cls_max_steps, cfg.seed)
        results.append(res)
    return results


# ------------------------------------------------------------------- file IO

def load_vector(path) -> np.ndarray:
    path = Path(path)
    if path.suffix.lower() == ".json":
        return np.asarray(read_counts(path), dtype=float)
    return read_vector_csv(path)[0]


def load_matrix(path) -> np.ndarray:
    matrix = read_matrix_csv(path)
    check_column_stochastic(matrix, STOCHASTIC_ATOL_LOADED)
    return matrix


def write_counts(path, cfg: ExperimentConfig, values: np.ndarray, **extra) -> Path:
    return write_vector_csv(path, values, bin_labels(cfg, values.size), _meta(cfg, **extra))


def write_results(path, cfg: ExperimentConfig, results, **extra) -> Path:
    doc = _meta(cfg, **extra)
    doc["results"] = [r.to_dict() for r in results]
    Path(path).write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return Path(path)


def read_results(path) -> list[unfold.UnfoldResult]:
    doc = json.loads(Path(path).read_text(encoding="utf-8"))
    return [unfold.UnfoldResult.from_dict(r) for r in doc["results"]]


def write_report(path, cfg: ExperimentConfig, t, m, results) -> Path:
    t = np.asarray(t, dtype=float)
    m = np.asarray(m, dtype=float)
    if m.shape != t.shape:
        raise DimensionMismatch(f"truth has {t.size} bins, measured has {m.size}")
    for r in results:
        if r.t_hat.shape != t.shape:
            raise DimensionMismatch(f"{r.method} result has {r.t_hat.size} bins, expected {t.size}")
    names = _column_names(results)
    stats = [unfold.metrics(r.t_hat, t) for r in results]
    labels = bin_labels(cfg, t.size)
    path = Path(path)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(format_meta(_meta(cfg)))
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["bin", "label", "t", "m", *names, *(f"ratio_{n}" for n in names)])
        for i in range(t.size):
            writer.writerow([i, labels[i], repr(float(t[i])), repr(float(m[i])),
                             *(repr(float(r.t_hat[i])) for r in results),
                             *(repr(float(s.ratio[i])) for s in stats)])
        blank = [""] * len(names)
        writer.writerow(["summary", "l2", "", "", *(repr(s.l2) for s in stats), *blank])
        writer.writerow(["summary", "negatives", "", "", *(s.negativity_count for s in stats), *blank])
    return path


def _column_names(results) -> list[str]:
    names, seen = [], {}
    for r in results:
        k = seen.get(r.method, 0)
        seen[r.method] = k + 1
        names.append(r.method if k == 0 else f"{r.method}_{k}")
    return names


# ---------------------------------------------------------------- subcommands

def cmd_calibrate(cfg: ExperimentConfig, out: Path) -> Path:
    channel = build_channel(cfg)
    meta = _meta(cfg)
    write_matrix_csv(out / TRUE_CHANNEL_FILE, channel, meta)
    if cfg.synthetic:
        # no calibration circuits exist for plain bins; the channel is the response
        response = channel
        write_matrix_csv(out / RESPONSE_FILE, response, _meta(cfg, source="channel"))
    else:
        n = cfg.qubits
        if cfg.batch_size:
            run = calibration.simulate_calibration_batched(n, channel, cfg.cal_shots, cfg.seed, cfg.batch_size)
        else:
            run = calibration.simulate_calibration(n, channel, cfg.cal_shots, cfg.seed)
        response = calibration.assemble_response(run)
        calibration.save_run(run, out / CALIBRATION_DIR, meta)
        write_matrix_csv(out / RESPONSE_FILE, np.asarray(response),
                         _meta(cfg, n_qubits=n, shots=cfg.cal_shots, source="calibration"))
        calibration.write_heatmap_csv(response, out / HEATMAP_FILE, meta=meta)
    return out / RESPONSE_FILE


def cmd_gen_truth(cfg: ExperimentConfig, out: Path) -> Path:
    t = build_truth(cfg)
    return write_counts(out / TRUTH_FILE, cfg, t, source=cfg.truth, mode=cfg.truth_mode)


def distort(cfg: ExperimentConfig, t: np.ndarray, response: np.ndarray, shots: int | None = None) -> np.ndarray:
    return synth.distort_histogram(t, response, stage_seed(cfg.seed, DISTORT_STREAM),
                                   cfg.shots if shots is None else shots)


def cmd_distort(cfg: ExperimentConfig, out: Path, truth_path, response_path) -> Path:
    t = load_vector(truth_path)
    response = load_matrix(response_path)
    m = distort(cfg, t, response)
    return write_counts(out / MEASURED_FILE, cfg, m, shots=cfg.shots)


def cmd_unfold(cfg: ExperimentConfig, out: Path, measured_path, response_path) -> Path:
    m = load_vector(measured_path)
    response = load_matrix(response_path)
    if response.shape != (m.size, m.size):
        raise DimensionMismatch(f"response is {response.shape[0]}x{response.shape[1]}, measured has {m.size} bins")
    return write_results(out / UNFOLD_FILE, cfg, run_methods(cfg, m, response))


def cmd_report(cfg: ExperimentConfig, out: Path, truth_path, measured_path, results_path=None) -> Path:
    t = load_vector(truth_path)
    m = load_vector(measured_path)
    results = read_results(results_path) if results_path else []
    return write_report(out / REPORT_FILE, cfg, t, m, results)


def cmd_run(cfg: ExperimentConfig, out: Path) -> Path:
    """All steps chained through the files they write."""
    (out / CONFIG_FILE).write_text(format_meta(_meta(cfg)) + dump_config(cfg), encoding="utf-8")
    response = cmd_calibrate(cfg, out)
    truth = cmd_gen_truth(cfg, out)
    measured = cmd_distort(cfg, out, truth, response)
    results = cmd_unfold(cfg, out, measured, response)
    return cmd_report(cfg, out, truth, measured, results)


def demo_table() -> str:
    """Psi+ worked example: truth from the simulator, fixed measured counts."""
    state = statesim.run_circuit(statesim.bell_circuit("psi+"))
    t = fixtures.CAL_SHOTS * np.asarray(statesim.exact_probabilities(state))
    r = fixtures.R_2Q
    m = fixtures.PSI_PLUS_M
    labels = labels_for(2)
    rows = [("truth", t), ("measured", m), ("R t", r @ t),
            ("MI", unfold.matrix_inversion(m, r).t_hat)]
    for n in (1, 5, 10, 100, 1000):
        rows.append((f"IBU n={n}", unfold.ibu(m, unfold.uniform_prior(4), r, n).t_hat))
    for n in (1, 10):
        rows.append((f"IBU n={n} [0,1,1,0]", unfold.ibu(m, fixtures.IBU_2Q_INFORMED_PRIOR, r, n).t_hat))
    rows.append(("CLS", unfold.constrained_ls(m, r).t_hat))
    width = max(len(name) for name, _ in rows)
    lines = [" " * width + "".join(f"{lab:>12}" for lab in labels)]
    for name, vec in rows:
        lines.append(f"{name:<{width}}" + "".join(f"{v:12.3f}" for v in vec))
    return "\n".join(lines)


# ------------------------------------------------------------------- parsing

def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="flat key = value config file")
    p.add_argument("--seed", type=int)
    p.add_argument("--shots", type=int)
    p.add_argument("--qubits", type=int)
    p.add_argument("--truth", help="uniform | gaussian | bell:<name> | circuit:<path> | clipped-normal | file:<path>")
    p.add_argument("--truth-mode", choices=["exact", "sampled"])
    p.add_argument("--channel", help="identity | tensor | tridiagonal | file:<path>")
    p.add_argument("--channel-seed", type=int)
    p.add_argument("--bins", type=int)
    p.add_argument("--samples", type=int)
    p.add_argument("--sigma", type=float)
    p.add_argument("--cal-shots", type=int)
    p.add_argument("--batch-size", type=int)
    p.add_argument("--method", action="append", choices=METHODS,
                   help="repeat to run several methods")
    p.add_argument("--ibu-iters", type=int)
    p.add_argument("--prior", help="uniform | tent | triangular | file:<path>")
    p.add_argument("--cls-tol", type=float)
    p.add_argument("--cls-max-steps", type=int)
    p.add_argument("--out", help="output directory")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qunfold", description="Readout-error unfolding pipeline.")
    sub = parser.add_subparsers(dest="command", required=True)

    _common(sub.add_parser("calibrate", help="simulate calibration circuits and write the response matrix"))
    _common(sub.add_parser("gen-truth", help="write the truth histogram"))
    p = sub.add_parser("distort", help="sample measured counts from truth through a response")
    _common(p)
    p.add_argument("--truth-file", required=True)
    p.add_argument("--response", required=True)
    p = sub.add_parser("unfold", help="unfold measured counts")
    _common(p)
    p.add_argument("--measured", required=True)
    p.add_argument("--response", required=True)
    p = sub.add_parser("report", help="comparison table of truth, measured and unfolded")
    _common(p)
    p.add_argument("--truth-file", required=True)
    p.add_argument("--measured", required=True)
    p.add_argument("--results")
    _common(sub.add_parser("run", help="calibrate, gen-truth, distort, unfold and report in one go"))
    sub.add_parser("demo", help="print the Psi+ worked example")
    return parser


_OVERRIDE_KEYS = ("seed", "shots", "qubits", "truth", "truth_mode", "channel", "channel_seed",
                  "bins", "samples", "sigma", "cal_shots", "batch_size", "ibu_iters", "prior",
                  "cls_tol", "cls_max_steps", "out")


def config_from_args(args: argparse.Namespace) -> ExperimentConfig:
    overrides = {k: getattr(args, k) for k in _OVERRIDE_KEYS}
    if args.method:
        overrides["methods"] = list(dict.fromkeys(args.method))
    return load_config(args.config, overrides)


def dispatch(args: argparse.Namespace) -> Path | None:
    if args.command == "demo":
        print(demo_table())
        return None
    cfg = config_from_args(args)
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    if args.command == "calibrate":
        path = cmd_calibrate(cfg, out)
    elif args.command == "gen-truth":
        path = cmd_gen_truth(cfg, out)
    elif args.command == "distort":
        path = cmd_distort(cfg, out, args.truth_file, args.response)
    elif args.command == "unfold":
        path = cmd_unfold(cfg, out, args.measured, args.response)
    elif args.command == "report":
        path = cmd_report(cfg, out, args.truth_file, args.measured, args.results)
    else:
        path = cmd_run(cfg, out)
    print(path)
    return path


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        dispatch(args)
    except NumericalError as exc:
        print(f"qunfold: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (QUnfoldError, ConfigError, ValueError) as exc:
        print(f"qunfold: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"qunfold: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
