"""Command-line surface: synthesize data, train, evaluate, gradient-check.

Exit codes: 0 success, 1 usage error, 2 data/config error, 3 check failure.
Every command is deterministic given its flags; all randomness flows from
--seed. Artifacts are text (AEFV, checkpoints, CSV) with repr-formatted
floats so identical runs are byte-identical.
"""
from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

import numpy as np

from . import _engine, grad, metrics, optim
from .data import gen_synthetic, read_aefv, write_aefv
from .errors import (AefvParseError, ConfigError, DegenerateInputError,
                     TrainingError)
from .model import ModelConfig, ModelParams, forward, n_qubits_for_dim
from .optim import TrainConfig, run_repeats

CHECKPOINT_TAG = "aecqtl-checkpoint"
CHECKPOINT_VERSION = 1

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_CONFIG = 2
EXIT_CHECK_FAILED = 3


class _Parser(argparse.ArgumentParser):
    """argparse customized to exit 1 (not 2) on usage errors."""

    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


# --- checkpoints --------------------------------------------------------------

def save_checkpoint(path, config: ModelConfig, params: ModelParams,
                    seed: int, tcfg: TrainConfig) -> None:
    lines = [
        f"{CHECKPOINT_TAG},{CHECKPOINT_VERSION}",
        f"model,{config.kind.value}",
        f"n_qubits,{config.n_qubits}",
        f"layers,{config.layers}",
        f"num_classes,{config.num_classes}",
        f"feature_dim,{config.feature_dim}",
        f"seed,{seed}",
        f"epochs,{tcfg.epochs}",
        f"batch_size,{tcfg.batch_size}",
        f"lr0,{tcfg.lr0!r}",
        f"decay_every,{tcfg.decay_every}",
        f"decay_factor,{tcfg.decay_factor!r}",
        f"repeats,{tcfg.repeats}",
        "theta," + ",".join(repr(float(v)) for v in params.theta),
        "W," + ",".join(repr(float(v)) for v in params.W.ravel()),
        "b," + ",".join(repr(float(v)) for v in params.b),
    ]
    Path(path).write_bytes(("\n".join(lines) + "\n").encode("utf-8"))


def load_checkpoint(path) -> tuple[ModelConfig, ModelParams, int, TrainConfig]:
    text = Path(path).read_text(encoding="utf-8")
    fields: dict[str, list[str]] = {}
    lines = text.split("\n")
    if not lines or lines[0] != f"{CHECKPOINT_TAG},{CHECKPOINT_VERSION}":
        raise ConfigError(f"{path}: not a {CHECKPOINT_TAG} v{CHECKPOINT_VERSION} file")
    for ln in lines[1:]:
        if ln == "":
            continue
        key, _, rest = ln.partition(",")
        fields[key] = rest.split(",")
    try:
        config = ModelConfig(
            kind=fields["model"][0],
            n_qubits=int(fields["n_qubits"][0]),
            layers=int(fields["layers"][0]),
            feature_dim=int(fields["feature_dim"][0]),
            num_classes=int(fields["num_classes"][0]),
        )
        seed = int(fields["seed"][0])
        tcfg = TrainConfig(
            epochs=int(fields["epochs"][0]),
            batch_size=int(fields["batch_size"][0]),
            lr0=float(fields["lr0"][0]),
            decay_every=int(fields["decay_every"][0]),
            decay_factor=float(fields["decay_factor"][0]),
            seed=seed,
            repeats=int(fields["repeats"][0]),
        )
        theta = np.array([float(v) for v in fields["theta"]])
        w_flat = np.array([float(v) for v in fields["W"]])
        b = np.array([float(v) for v in fields["b"]])
    except (KeyError, ValueError, IndexError) as exc:
        raise ConfigError(f"{path}: malformed checkpoint ({exc})") from None
    n_meas = len(config.measured_qubits)
    if theta.shape[0] != config.num_slots:
        raise ConfigError(f"{path}: theta has {theta.shape[0]} entries, model needs {config.num_slots}")
    if w_flat.shape[0] != config.num_classes * n_meas:
        raise ConfigError(f"{path}: W has {w_flat.shape[0]} entries, model needs {config.num_classes * n_meas}")
    if b.shape[0] != config.num_classes:
        raise ConfigError(f"{path}: b has {b.shape[0]} entries, model needs {config.num_classes}")
    params = ModelParams(theta, w_flat.reshape(config.num_classes, n_meas), b)
    return config, params, seed, tcfg


# --- csv helpers --------------------------------------------------------------

def _fmt(value) -> str:
    return repr(float(value)) if isinstance(value, float) else str(value)


def _write_csv(path, header: list[str], rows: list[list]) -> None:
    lines = [",".join(header)]
    lines += [",".join(_fmt(v) for v in row) for row in rows]
    Path(path).write_bytes(("\n".join(lines) + "\n").encode("utf-8"))


def write_loss_curve(path, curve) -> None:
    _write_csv(path, ["epoch", "mean_train_loss", "test_accuracy"],
               [[rec.epoch, float(rec.mean_train_loss), float(rec.test_accuracy)] for rec in curve])


# --- commands -----------------------------------------------------------------

def _setup_workers(args) -> None:
    workers = getattr(args, "workers", None)
    if workers is None:
        env = os.environ.get("AECQTL_WORKERS")
        workers = int(env) if env else None
    if workers is not None:
        _engine.set_workers(workers)


def cmd_synth(args) -> int:
    dataset = gen_synthetic(args.dim, args.per_class, args.sep, args.seed)
    write_aefv(dataset, args.out)
    print(f"wrote {len(dataset)} samples (dim {dataset.dim}) to {args.out}")
    return EXIT_OK


def _model_config_for(model_kind: str, layers: int, dim: int, class_count: int) -> ModelConfig:
    return ModelConfig(kind=model_kind, n_qubits=n_qubits_for_dim(dim),
                       layers=layers, feature_dim=dim, num_classes=class_count)


def cmd_train(args) -> int:
    train_set = read_aefv(args.train)
    test_set = read_aefv(args.test)
    if train_set.dim != test_set.dim:
        raise ConfigError(f"train dim {train_set.dim} != test dim {test_set.dim}")
    if train_set.class_count != test_set.class_count:
        raise ConfigError("train/test class counts differ")
    layers = args.layers if args.layers is not None else (4 if args.model == "tlqnn" else 6)
    config = _model_config_for(args.model, layers, train_set.dim, train_set.class_count)
    tcfg = TrainConfig(epochs=args.epochs, batch_size=args.batch, lr0=args.lr,
                       decay_every=args.decay_every, decay_factor=args.decay_factor,
                       seed=args.seed, repeats=args.repeats)
    nq, nc = config.num_slots, config.num_classical
    print(f"model {config.kind.value}: {config.n_qubits} qubits, {config.layers} layers, "
          f"{nq} quantum + {nc} classical = {nq + nc} parameters")

    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    results = run_repeats(config, train_set, test_set, tcfg)
    for r, result in enumerate(results):
        write_loss_curve(out_dir / f"loss_curve_{r}.csv", result.curve)
        save_checkpoint(out_dir / f"checkpoint_{r}.txt", config, result.params,
                        result.seed, tcfg)
        print(f"run {r} (seed {result.seed}): final test accuracy "
              f"{result.final_test_accuracy:.4f}%, final loss {result.final_train_loss:.6f}")

    if args.pooled_roc:
        scores = np.concatenate([r.test_scores for r in results])
        truth = np.concatenate([test_set.labels] * len(results))
    else:
        scores, truth = results[0].test_scores, test_set.labels
    auc = metrics.roc_auc(scores, truth).auc
    summary = metrics.summarize_runs([r.final_test_accuracy for r in results],
                                     [r.final_train_loss for r in results], auc)
    _write_csv(out_dir / "summary.csv",
               ["model", "source_dim", "qubits", "layers", "params_quantum",
                "params_classical", "acc_mean", "acc_std", "final_loss_mean", "auc"],
               [[config.kind.value, config.feature_dim, config.n_qubits, config.layers,
                 nq, nc, summary.accuracy_mean, summary.accuracy_std,
                 summary.final_loss_mean, summary.auc]])
    print(f"summary: accuracy {summary.accuracy_mean:.4f} +- {summary.accuracy_std:.4f} %, "
          f"AUC {summary.auc:.6f}")
    return EXIT_OK


def cmd_eval(args) -> int:
    config, params, _, _ = load_checkpoint(args.checkpoint)
    dataset = read_aefv(args.data)
    if dataset.dim != config.feature_dim:
        raise ConfigError(f"data dim {dataset.dim} != checkpoint feature_dim {config.feature_dim}")
    if dataset.class_count != config.num_classes:
        raise ConfigError(f"data classes {dataset.class_count} != checkpoint classes {config.num_classes}")
    preds = np.empty(len(dataset), dtype=np.int64)
    scores = np.empty(len(dataset))
    for i in range(len(dataset)):
        trace = forward(config, params, dataset.features[i])
        preds[i] = trace.predicted
        scores[i] = trace.probabilities[1] if config.num_classes == 2 else trace.probabilities[-1]
    acc = metrics.accuracy(preds, dataset.labels)
    curve = metrics.roc_auc(scores, dataset.labels)
    print(f"accuracy_percent={acc!r}")
    print(f"auc={curve.auc!r}")
    if args.roc:
        _write_csv(args.roc, ["fpr", "tpr"], [[float(f), float(t)] for f, t in curve.points])
    return EXIT_OK


def cmd_gradcheck(args) -> int:
    dim = 1 << args.qubits
    config = _model_config_for(args.model, args.layers, dim, 2)
    rng = np.random.default_rng(args.seed)
    params, _ = optim.init_params(config, rng)
    x = rng.standard_normal(dim)
    y = int(rng.integers(0, 2))
    analytic = grad.sample_gradient(config, params, x, y)
    numeric = grad.fd_grad(config, params, x, y, h=1e-5)
    dev, where = grad.bundle_deviation(analytic, numeric)
    ok = dev < args.tolerance
    label = "PASS" if ok else "FAIL"
    print(f"{label} max relative deviation {dev:.3e} at {where} (tolerance {args.tolerance:g})")
    return EXIT_OK if ok else EXIT_CHECK_FAILED


# --- argument wiring ----------------------------------------------------------

def build_parser() -> _Parser:
    parser = _Parser(prog="aecqtl", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("synth", help="generate a synthetic two-blob AEFV file")
    p.add_argument("--dim", type=int, default=512)
    p.add_argument("--per-class", type=int, default=384, dest="per_class")
    p.add_argument("--sep", type=float, default=4.0)
    p.add_argument("--seed", type=int, default=7)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("train", help="train one model over repeated seeded runs")
    p.add_argument("--model", choices=["tlqnn", "tlqcnn"], required=True)
    p.add_argument("--layers", type=int, default=None,
                   help="ansatz/FC layer count (default: 4 for tlqnn, 6 for tlqcnn)")
    p.add_argument("--train", required=True)
    p.add_argument("--test", required=True)
    p.add_argument("--epochs", type=int, default=20)
    p.add_argument("--batch", type=int, default=4)
    p.add_argument("--lr", type=float, default=0.01)
    p.add_argument("--decay-every", type=int, default=10, dest="decay_every")
    p.add_argument("--decay-factor", type=float, default=0.1, dest="decay_factor")
    p.add_argument("--repeats", type=int, default=5)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--out-dir", required=True, dest="out_dir")
    p.add_argument("--pooled-roc", action="store_true", dest="pooled_roc",
                   help="pool scores over all repeats for the summary AUC")
    p.add_argument("--workers", type=int, default=None)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("eval", help="evaluate a checkpoint on an AEFV file")
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--roc", default=None, help="optional ROC points CSV path")
    p.add_argument("--workers", type=int, default=None)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("gradcheck", help="parameter-shift vs finite differences")
    p.add_argument("--model", choices=["tlqnn", "tlqcnn"], required=True)
    p.add_argument("--qubits", type=int, required=True)
    p.add_argument("--layers", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tolerance", type=float, default=1e-5)
    p.add_argument("--workers", type=int, default=None)
    p.set_defaults(func=cmd_gradcheck)
    return parser


def _validate(parser: _Parser, args) -> None:
    if getattr(args, "epochs", 1) < 1:
        parser.error("--epochs must be >= 1")
    if getattr(args, "batch", 1) < 1:
        parser.error("--batch must be >= 1")
    if getattr(args, "repeats", 1) < 1:
        parser.error("--repeats must be >= 1")
    if getattr(args, "per_class", 1) < 1:
        parser.error("--per-class must be >= 1")
    if getattr(args, "layers", 1) is not None and getattr(args, "layers", 1) < 1:
        parser.error("--layers must be >= 1")
    if getattr(args, "qubits", 2) < 2:
        parser.error("--qubits must be >= 2")
    workers = getattr(args, "workers", None)
    if workers is not None and workers < 1:
        parser.error("--workers must be >= 1")


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    _validate(parser, args)
    try:
        _setup_workers(args)
        return args.func(args)
    except (ConfigError, DegenerateInputError, AefvParseError, TrainingError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
